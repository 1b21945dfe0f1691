//! Inner measure frames and the deciders built on them: the frame of
//! measure-saturated ideals with its induced measure, the
//! almost-disconnectedness test, the three-way equivalence check, greedy
//! exhaustion, the faithful roundtrip, and the staged coin spaces with the
//! positive-measure nowhere-complemented example.

use std::collections::BTreeSet;

use crate::frame::{FiniteFrame, FrameError};
use crate::order::{ElemSet, ElementId, FiniteLattice};
use crate::rat::Rat;
use crate::site::{principal_sheaf, IdealSet, SiteError, SitePresentation, ENUM_CAP};
use crate::valuation::{check_valuation, quotient_by_congruence, Valuation, ValuationError};

/// Default ceiling on lattice size for the equivalence check, which builds
/// several frames per input.
pub const EQUIVALENCE_CAP: usize = 12;

/// Errors from inner frame construction and the staged examples.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InnerError {
    #[error("{what} count {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("input measure is not faithful: `{p}` < `{q}` share a value")]
    NotFaithfulInput { p: String, q: String },
    #[error("stage {stage} not available; {have} stages were built")]
    BadStage { stage: usize, have: usize },
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// The frame of measure-saturated ideals together with everything computed
/// on the way: the induced measure, the null ideal, and structure flags.
#[derive(Clone, Debug)]
pub struct InnerLocaleReport {
    pub frame: FiniteFrame,
    /// The induced measure on the frame: largest value of a member.
    pub inner_measure: Valuation,
    pub null_ideal: IdealSet,
    pub boolean: bool,
    /// Strict monotonicity of the induced measure; true by construction.
    pub faithful: bool,
    /// Frame element generated by each lattice element.
    pub principal: Vec<ElementId>,
}

impl InnerLocaleReport {
    pub fn ideals(&self) -> &[IdealSet] {
        self.frame
            .ideals()
            .expect("inner frames carry their ideals")
    }
}

/// Builds the inner measure frame of a valuation.
pub fn inner_frame(v: &Valuation) -> Result<InnerLocaleReport, InnerError> {
    inner_frame_capped(v, ENUM_CAP)
}

pub fn inner_frame_capped(v: &Valuation, cap: usize) -> Result<InnerLocaleReport, InnerError> {
    let site = SitePresentation::mu_inner(v.clone());
    let frame = FiniteFrame::from_site_capped(&site, cap)?;
    let ideals = frame
        .ideals()
        .expect("site frames carry their ideals")
        .to_vec();
    let lat = v.lattice();

    let max_value = |ideal: &IdealSet| -> Rat {
        ideal
            .members()
            .iter()
            .map(|p| v.value(p).clone())
            .max()
            .expect("ideals contain the bottom")
    };
    let values: Vec<Rat> = ideals.iter().map(max_value).collect();
    let inner_measure = check_valuation(frame.lattice().clone(), values)?;

    let null_ideal = principal_sheaf(&site, lat.bottom());
    let principal: Vec<ElementId> = lat
        .elements()
        .map(|p| {
            let sheaf = principal_sheaf(&site, p);
            let idx = ideals
                .iter()
                .position(|i| *i == sheaf)
                .expect("principal ideals appear in the enumeration");
            ElementId(idx)
        })
        .collect();
    for p in lat.elements() {
        debug_assert_eq!(inner_measure.value(principal[p.index()]), v.value(p));
    }

    // Strict inclusions force strictly larger values: otherwise the
    // measure step would have merged the two ideals.
    let faithful = inner_measure.is_faithful();
    assert!(faithful, "the induced measure separates distinct ideals");

    let boolean = frame.is_boolean();
    Ok(InnerLocaleReport {
        frame,
        inner_measure,
        null_ideal,
        boolean,
        faithful,
        principal,
    })
}

/// One inspected candidate in a failed search: the element tried and the
/// two values that had to hit zero and the target measure.
#[derive(Clone, Debug)]
pub struct SplitCandidate {
    pub d: ElementId,
    pub meet_value: Rat,
    pub join_value: Rat,
}

/// Witness for a failed split: no `d` under `c` is disjoint in measure
/// from `c0` while filling `c` together with it.
#[derive(Clone, Debug)]
pub struct AlmostWitness {
    pub c: ElementId,
    pub c0: ElementId,
    pub target: Rat,
    pub scanned: Vec<SplitCandidate>,
}

/// Verdict of the splitting property, with a witness on failure.
///
/// On finite data the disconnectedness and Booleanness readings coincide,
/// so the two flags always agree; both are kept because callers ask the
/// two questions separately.
#[derive(Clone, Debug)]
pub struct AlmostBooleanVerdict {
    pub disconnected: bool,
    pub boolean: bool,
    pub witness: Option<AlmostWitness>,
}

fn split_kernel(v: &Valuation) -> AlmostBooleanVerdict {
    let lat = v.lattice();
    for c in lat.elements() {
        for c0 in lat.downset(c).iter() {
            let ok = lat.downset(c).iter().any(|d| {
                v.value(lat.meet(d, c0)).is_zero() && v.value(lat.join(d, c0)) == v.value(c)
            });
            if !ok {
                let scanned = lat
                    .downset(c)
                    .iter()
                    .map(|d| SplitCandidate {
                        d,
                        meet_value: v.value(lat.meet(d, c0)).clone(),
                        join_value: v.value(lat.join(d, c0)).clone(),
                    })
                    .collect();
                return AlmostBooleanVerdict {
                    disconnected: false,
                    boolean: false,
                    witness: Some(AlmostWitness {
                        c,
                        c0,
                        target: v.value(c).clone(),
                        scanned,
                    }),
                };
            }
        }
    }
    AlmostBooleanVerdict {
        disconnected: true,
        boolean: true,
        witness: None,
    }
}

/// Whether every element splits against each of its lower elements up to
/// measure zero.
pub fn is_almost_disconnected(v: &Valuation) -> AlmostBooleanVerdict {
    split_kernel(v)
}

/// Same decision procedure as [`is_almost_disconnected`]; finite chains of
/// approximations stabilize, so the two notions agree here.
pub fn is_almost_boolean(v: &Valuation) -> AlmostBooleanVerdict {
    split_kernel(v)
}

/// The three characterizations checked against each other.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub almost: AlmostBooleanVerdict,
    pub inner_boolean: bool,
    /// Whether the inner frame equals the Boolean quotient of the plain
    /// join frame at the null part.
    pub bsub_match: bool,
    pub agree: bool,
    pub inner_size: usize,
    pub base_size: usize,
}

/// Checks that the splitting verdict, Booleanness of the inner frame, and
/// identification with the Boolean quotient at the null ideal all agree.
pub fn theorem_equivalence_check(v: &Valuation) -> Result<EquivalenceReport, InnerError> {
    theorem_equivalence_check_capped(v, EQUIVALENCE_CAP)
}

pub fn theorem_equivalence_check_capped(
    v: &Valuation,
    cap: usize,
) -> Result<EquivalenceReport, InnerError> {
    let lat = v.lattice();
    if lat.size() > cap {
        return Err(InnerError::CapExceeded {
            what: "lattice elements",
            size: lat.size(),
            cap,
        });
    }
    let almost = split_kernel(v);
    let rep = inner_frame_capped(v, cap.max(ENUM_CAP))?;

    // The plain join coverage keeps every downset of a single element; its
    // frame is the lattice itself in ideal form.
    let base_site = SitePresentation::finite_join(lat.clone());
    let base = FiniteFrame::from_site_capped(&base_site, cap.max(ENUM_CAP))?;
    let base_ideals = base.ideals().expect("site frames carry their ideals");

    // The null elements are closed under joins, so they form the downset
    // of their join, which is an element of the base frame.
    let null_root = lat.join_all(v.null_elements());
    debug_assert_eq!(lat.downset(null_root), v.null_elements());
    let null_index = base_ideals
        .iter()
        .position(|i| i.members() == lat.downset(null_root))
        .map(ElementId)
        .expect("principal downsets are base ideals");

    let bsub = base.boolean_sublocale(null_index);
    let bsub_sets: BTreeSet<u64> = bsub
        .members
        .iter()
        .map(|m| base_ideals[m.index()].members().mask())
        .collect();
    let inner_sets: BTreeSet<u64> = rep.ideals().iter().map(|i| i.members().mask()).collect();
    let bsub_match = bsub_sets == inner_sets;

    let agree = almost.boolean == rep.boolean && bsub_match == rep.boolean;
    Ok(EquivalenceReport {
        almost,
        inner_boolean: rep.boolean,
        bsub_match,
        agree,
        inner_size: rep.frame.size(),
        base_size: base.size(),
    })
}

/// Greedy exhaustion of an ideal: start at a largest-value member, then
/// join in any member that strictly increases the value. The chain's
/// values are nondecreasing and its last element generates the ideal.
pub fn exhaustion(v: &Valuation, ideal: IdealSet) -> Vec<ElementId> {
    let lat = v.lattice();
    let start = ideal
        .members()
        .iter()
        .max_by(|a, b| v.value(*a).cmp(v.value(*b)).then(b.index().cmp(&a.index())))
        .expect("ideals contain the bottom");
    let mut chain = vec![start];
    loop {
        let last = *chain.last().unwrap();
        let best = ideal
            .members()
            .iter()
            .map(|d| lat.join(last, d))
            .filter(|cand| v.value(*cand) > v.value(last))
            .max_by(|a, b| v.value(*a).cmp(v.value(*b)).then(b.index().cmp(&a.index())));
        match best {
            Some(next) => chain.push(next),
            None => break,
        }
    }
    let site = SitePresentation::mu_inner(v.clone());
    debug_assert_eq!(principal_sheaf(&site, *chain.last().unwrap()), ideal);
    chain
}

/// Roundtrip outcome for a faithful input.
#[derive(Clone, Debug)]
pub struct RoundtripReport {
    /// Whether the ideal frame reproduces the input lattice element for
    /// element with matching values.
    pub iso: bool,
    pub rebuilt: InnerLocaleReport,
}

/// Rebuilds the inner frame of a faithful measure and checks that nothing
/// was gained or lost: ideals are exactly the downsets of single elements
/// and the induced values match the input.
pub fn finite_part_roundtrip(m: &Valuation) -> Result<RoundtripReport, InnerError> {
    if let Some((p, q)) = m.faithfulness_witness() {
        let lat = m.lattice();
        return Err(InnerError::NotFaithfulInput {
            p: lat.display(p),
            q: lat.display(q),
        });
    }
    let rebuilt = inner_frame(m)?;
    let lat = m.lattice();
    let ideal_sets: BTreeSet<u64> = rebuilt
        .ideals()
        .iter()
        .map(|i| i.members().mask())
        .collect();
    let principal_sets: BTreeSet<u64> = lat.elements().map(|p| lat.downset(p).mask()).collect();
    let mut iso = ideal_sets == principal_sets && rebuilt.frame.size() == lat.size();
    if iso {
        for p in lat.elements() {
            let image = rebuilt.principal[p.index()];
            if rebuilt.inner_measure.value(image) != m.value(p) {
                iso = false;
                break;
            }
        }
    }
    Ok(RoundtripReport { iso, rebuilt })
}

/// Checks that quotienting by measure equality does not change the inner
/// frame: the projection induces an inclusion-preserving bijection of
/// ideals matching the induced measures.
pub fn quotient_invariance_check(v: &Valuation) -> Result<bool, InnerError> {
    let rep_v = inner_frame(v)?;
    let q = quotient_by_congruence(v);
    let rep_q = inner_frame(&q.valuation)?;
    if rep_v.frame.size() != rep_q.frame.size() {
        return Ok(false);
    }
    let project = |ideal: &IdealSet| -> ElemSet {
        ideal
            .members()
            .iter()
            .map(|p| q.projection.apply(p))
            .collect()
    };
    let q_ideals = rep_q.ideals();
    let v_ideals = rep_v.ideals();
    // The projection must send ideals onto ideals bijectively ...
    let mut image_index = Vec::with_capacity(v_ideals.len());
    for (vi, ideal) in v_ideals.iter().enumerate() {
        let img = project(ideal);
        match q_ideals.iter().position(|i| i.members() == img) {
            Some(qi) => {
                if rep_v.inner_measure.value(ElementId(vi))
                    != rep_q.inner_measure.value(ElementId(qi))
                {
                    return Ok(false);
                }
                image_index.push(qi);
            }
            None => return Ok(false),
        }
    }
    let distinct: BTreeSet<usize> = image_index.iter().copied().collect();
    if distinct.len() != v_ideals.len() {
        return Ok(false);
    }
    // ... preserving and reflecting inclusion.
    for (i, a) in v_ideals.iter().enumerate() {
        for (j, b) in v_ideals.iter().enumerate() {
            let before = a.members().is_subset(b.members());
            let after = q_ideals[image_index[i]]
                .members()
                .is_subset(q_ideals[image_index[j]].members());
            if before != after {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks that the induced measure is recovered from its values on the
/// ideals generated by single elements, and that rebuilding from those
/// generators reproduces the frame.
pub fn basis_reextension_check(v: &Valuation) -> Result<bool, InnerError> {
    let rep = inner_frame(v)?;
    let flat = rep.frame.lattice();
    // Re-extension by maximization over generators below.
    for u in flat.elements() {
        let best = v
            .lattice()
            .elements()
            .filter(|p| flat.leq(rep.principal[p.index()], u))
            .map(|p| v.value(p).clone())
            .max()
            .expect("the bottom generator is below everything");
        if &best != rep.inner_measure.value(u) {
            return Ok(false);
        }
    }
    // Rebuilding from the generator image is the same as rebuilding from
    // the measure quotient.
    let q = quotient_by_congruence(v);
    let rep_q = inner_frame(&q.valuation)?;
    Ok(rep_q.frame.size() == rep.frame.size() && rep_q.boolean == rep.boolean)
}

/// How outcomes at stage n are counted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Grading {
    /// One coin per stage: 2^n outcomes.
    Plain,
    /// n new coins at stage n: 2^(n*n) outcomes.
    Thickened,
}

/// One stage of the staged coin space: a finite uniform outcome space.
#[derive(Clone, Copy, Debug)]
pub struct CoinStage {
    n: u32,
    grading: Grading,
    log2_ground: u32,
}

/// Builds the stage-n outcome space.
pub fn coin_site(n: u32, grading: Grading) -> Result<CoinStage, InnerError> {
    let (log2_ground, cap, what) = match grading {
        Grading::Plain => (n, 16, "plain stage"),
        Grading::Thickened => (n * n, 4, "thickened stage"),
    };
    if n == 0 || n as usize > cap {
        return Err(InnerError::CapExceeded {
            what,
            size: n as usize,
            cap,
        });
    }
    Ok(CoinStage {
        n,
        grading,
        log2_ground,
    })
}

impl CoinStage {
    pub fn stage(&self) -> u32 {
        self.n
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn ground(&self) -> usize {
        1usize << self.log2_ground
    }

    pub fn log2_ground(&self) -> u32 {
        self.log2_ground
    }

    /// Uniform measure: share of outcomes.
    pub fn measure(&self, set: &OutcomeSet) -> Rat {
        assert_eq!(set.log2_ground(), self.log2_ground, "stage mismatch");
        Rat::dyadic(set.card(), self.log2_ground)
    }

    /// The full powerset lattice with the uniform valuation, for grounds
    /// small enough to enumerate.
    pub fn lattice_valuation(&self) -> Result<Valuation, InnerError> {
        let ground = self.ground();
        if ground > 6 {
            return Err(InnerError::CapExceeded {
                what: "outcomes for powerset form",
                size: ground,
                cap: 6,
            });
        }
        let names: Vec<String> = (0..ground).map(|i| format!("o{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let lat = FiniteLattice::powerset(&refs).map_err(FrameError::from)?;
        let values: Vec<Rat> = (0..lat.size())
            .map(|mask| Rat::dyadic(mask.count_ones() as u64, self.log2_ground))
            .collect();
        Ok(check_valuation(lat, values)?)
    }
}

/// A subset of one stage's outcomes, as a bit vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OutcomeSet {
    log2_ground: u32,
    bits: Vec<u64>,
}

impl OutcomeSet {
    pub fn empty(log2_ground: u32) -> OutcomeSet {
        let words = (1usize << log2_ground).div_ceil(64);
        OutcomeSet {
            log2_ground,
            bits: vec![0; words],
        }
    }

    pub fn log2_ground(&self) -> u32 {
        self.log2_ground
    }

    pub fn insert(&mut self, outcome: usize) {
        self.bits[outcome / 64] |= 1u64 << (outcome % 64);
    }

    pub fn contains(&self, outcome: usize) -> bool {
        self.bits[outcome / 64] >> (outcome % 64) & 1 == 1
    }

    pub fn card(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Builds stages 1..=k of the thickened coin set with no complement:
/// survivors keep their whole fiber, dropouts re-enter on the zero suffix.
pub fn fat_cantor(k: u32) -> Result<Vec<OutcomeSet>, InnerError> {
    if k == 0 || k > 4 {
        return Err(InnerError::CapExceeded {
            what: "thickened stages",
            size: k as usize,
            cap: 4,
        });
    }
    let mut stages = Vec::with_capacity(k as usize);
    let mut first = OutcomeSet::empty(1);
    first.insert(0);
    stages.push(first);
    for n in 2..=k {
        let prev_bits = (n - 1) * (n - 1);
        let suffix_bits = 2 * n - 1;
        let prev = stages.last().unwrap();
        let mut cur = OutcomeSet::empty(n * n);
        for y in 0..1usize << prev_bits {
            if prev.contains(y) {
                for t in 0..1usize << suffix_bits {
                    cur.insert(t << prev_bits | y);
                }
            } else {
                // Coordinates are read low bit first, so the zero suffix is
                // the smallest extension of y.
                cur.insert(y);
            }
        }
        stages.push(cur);
    }
    Ok(stages)
}

/// Certifies at stage `k` that no complement survives to stage `k + 1`:
/// every dropped outcome has an extension inside the next stage, and every
/// kept outcome keeps its whole fiber.
pub fn verify_no_complement(stages: &[OutcomeSet], k: usize) -> Result<bool, InnerError> {
    if k == 0 || k + 1 > stages.len() {
        return Err(InnerError::BadStage {
            stage: k,
            have: stages.len(),
        });
    }
    if k > 3 {
        return Err(InnerError::CapExceeded {
            what: "fiber scan stage",
            size: k,
            cap: 3,
        });
    }
    let cur = &stages[k - 1];
    let next = &stages[k];
    let prev_bits = (k * k) as u32;
    let suffix_bits = 2 * k + 1;
    for y in 0..1usize << prev_bits {
        let fiber = (0..1usize << suffix_bits).map(|t| t << prev_bits | y);
        if cur.contains(y) {
            if !fiber.clone().all(|x| next.contains(x)) {
                return Ok(false);
            }
        } else if !fiber.clone().any(|x| next.contains(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}
