//! Random-case campaigns over generated valuation sites.
//!
//! Cases are numbered; case `i` draws from an RNG stream owned by `i`
//! alone, so outcomes do not depend on scheduling and any case can be
//! replayed in isolation with `--cases 1 --offset i`. Workers pull case
//! numbers from a shared counter and results are merged by case number.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;

use muloc_core::{
    basis_reextension_check, case_rng, inner_frame, quotient_invariance_check, random_mu_site,
    theorem_equivalence_check, Valuation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FuzzKind {
    /// Splitting verdict vs inner-frame Booleanness vs Boolean-quotient
    /// identification.
    Equivalence,
    /// Valuation difference bounds and Heyting adjunction laws.
    Laws,
    /// Inner frame unchanged by the measure-equality quotient.
    Quotient,
    /// Re-extension from generator images reproduces the inner measure.
    Basis,
}

impl FuzzKind {
    pub fn name(self) -> &'static str {
        match self {
            FuzzKind::Equivalence => "equivalence",
            FuzzKind::Laws => "laws",
            FuzzKind::Quotient => "quotient",
            FuzzKind::Basis => "basis",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub case: u64,
    pub pass: bool,
    /// Generator attempts spent on this case.
    pub attempts: u64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignSpec {
    pub kind: FuzzKind,
    pub cases: u64,
    pub max_size: usize,
    pub seed: u64,
    pub offset: u64,
    pub workers: usize,
}

/// Difference bounds for meets and joins plus the implication adjunction
/// on the inner frame, all exhaustive.
fn laws_check(v: &Valuation) -> Result<(), String> {
    let lat = v.lattice();
    for p in lat.elements() {
        for q in lat.downset(p).iter() {
            for r in lat.elements() {
                let lhs = v.value(lat.meet(p, r)) + v.value(q);
                let rhs = v.value(lat.meet(q, r)) + v.value(p);
                if lhs > rhs {
                    return Err(format!(
                        "meet difference grew at p={} q={} r={}",
                        lat.display(p),
                        lat.display(q),
                        lat.display(r)
                    ));
                }
                for q2 in lat.downset(r).iter() {
                    let lhs = &(v.value(lat.join(p, r)) + v.value(q)) + v.value(q2);
                    let rhs = &(v.value(lat.join(q, q2)) + v.value(p)) + v.value(r);
                    if lhs > rhs {
                        return Err(format!(
                            "join difference exceeded the sum at p1={} q1={} p2={} q2={}",
                            lat.display(p),
                            lat.display(q),
                            lat.display(r),
                            lat.display(q2)
                        ));
                    }
                }
            }
        }
    }
    let rep = inner_frame(v).map_err(|e| e.to_string())?;
    let flat = rep.frame.lattice();
    for u in flat.elements() {
        for w in flat.elements() {
            let uw = rep.frame.heyting(u, w);
            for x in flat.elements() {
                let ok = flat.leq(flat.meet(x, u), w) == flat.leq(x, uw);
                if !ok {
                    return Err(format!(
                        "adjunction failed at u={} w={} x={}",
                        flat.display(u),
                        flat.display(w),
                        flat.display(x)
                    ));
                }
            }
        }
    }
    Ok(())
}

fn run_case(kind: FuzzKind, seed: u64, case: u64, max_size: usize) -> CaseOutcome {
    let mut rng = case_rng(seed, case);
    let sampled = match random_mu_site(&mut rng, max_size) {
        Ok(s) => s,
        Err(e) => {
            return CaseOutcome {
                case,
                pass: false,
                attempts: 0,
                detail: format!("generator: {e}"),
            }
        }
    };
    let attempts = sampled.attempts;
    let v = sampled
        .value
        .valuation()
        .expect("generated sites carry a valuation")
        .clone();
    let verdict: Result<Result<(), String>, String> = match kind {
        FuzzKind::Equivalence => theorem_equivalence_check(&v)
            .map_err(|e| e.to_string())
            .map(|r| {
                if r.agree {
                    Ok(())
                } else {
                    Err(format!(
                        "split={} boolean={} bsub={}",
                        r.almost.disconnected, r.inner_boolean, r.bsub_match
                    ))
                }
            }),
        FuzzKind::Laws => Ok(laws_check(&v)),
        FuzzKind::Quotient => quotient_invariance_check(&v)
            .map_err(|e| e.to_string())
            .map(|ok| {
                if ok {
                    Ok(())
                } else {
                    Err("inner frame changed across the quotient".to_string())
                }
            }),
        FuzzKind::Basis => basis_reextension_check(&v)
            .map_err(|e| e.to_string())
            .map(|ok| {
                if ok {
                    Ok(())
                } else {
                    Err("re-extension disagreed with the inner measure".to_string())
                }
            }),
    };
    let (pass, detail) = match verdict {
        Ok(Ok(())) => (true, format!("size {}", v.lattice().size())),
        Ok(Err(why)) => (false, why),
        Err(e) => (false, e),
    };
    CaseOutcome {
        case,
        pass,
        attempts,
        detail,
    }
}

/// Runs the campaign and returns outcomes sorted by case number.
pub fn run_campaign(spec: &CampaignSpec) -> Vec<CaseOutcome> {
    let workers = spec.workers.max(1);
    if workers == 1 || spec.cases <= 1 {
        return (0..spec.cases)
            .map(|i| run_case(spec.kind, spec.seed, spec.offset + i, spec.max_size))
            .collect();
    }

    let next = AtomicU64::new(0);
    let (tx, rx) = mpsc::channel::<CaseOutcome>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= spec.cases {
                    break;
                }
                let out = run_case(spec.kind, spec.seed, spec.offset + i, spec.max_size);
                if tx.send(out).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });
    let mut outcomes: Vec<CaseOutcome> = rx.into_iter().collect();
    outcomes.sort_by_key(|o| o.case);
    outcomes
}
