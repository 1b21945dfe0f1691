//! Seeded random instances for fuzz campaigns: bounded distributive
//! lattices, modular valuations on them, measure sites, and standard sets.
//!
//! Everything is rejection-sampled against the real validators, so a
//! generated value satisfies exactly the same contracts as a parsed one.
//! Attempt counts are returned so callers can report acceptance rates.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::StandardSet;
use crate::order::{ElementId, FiniteLattice};
use crate::rat::Rat;
use crate::site::SitePresentation;
use crate::valuation::{check_valuation, Valuation};

/// Bail out of rejection sampling after this many failed attempts.
const MAX_ATTEMPTS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("gave up generating {what} after {attempts} attempts")]
    Exhausted { what: &'static str, attempts: u64 },
}

/// A generated value with the number of sampling attempts it took.
#[derive(Debug, Clone)]
pub struct Sampled<T> {
    pub value: T,
    pub attempts: u64,
}

/// The per-case generator: one fixed seed, one stream per case index, so
/// campaigns can fan out across workers and still replay case-by-case.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Samples a bounded distributive lattice with 2..=max_size elements.
///
/// Each attempt grows a random forest over the index order (element i
/// picks a parent below it), sprinkles extra order pairs, transitively
/// closes, and keeps the result only if the closure is a bounded
/// distributive lattice. Index 0 is always the bottom.
pub fn random_lattice(
    rng: &mut impl Rng,
    max_size: usize,
) -> Result<Sampled<Arc<FiniteLattice>>, GenError> {
    let max_size = max_size.clamp(2, 16);
    let mut attempts = 0;
    while attempts < MAX_ATTEMPTS {
        attempts += 1;
        let size = rng.gen_range(2..=max_size);
        let mut pairs: Vec<(usize, usize)> = (1..size).map(|i| (rng.gen_range(0..i), i)).collect();
        let extra = rng.gen_range(0..=size);
        for _ in 0..extra {
            let b = rng.gen_range(1..size);
            let a = rng.gen_range(0..b);
            pairs.push((a, b));
        }
        let labels = vec![None; size];
        if let Ok(lat) = FiniteLattice::from_relation(labels, &pairs) {
            return Ok(Sampled {
                value: lat,
                attempts,
            });
        }
    }
    Err(GenError::Exhausted {
        what: "lattice",
        attempts,
    })
}

/// Increment pool for join-irreducible elements; zero is weighted so null
/// and non-faithful regions show up often.
const INCREMENTS: [(u64, u64); 10] = [
    (0, 1),
    (0, 1),
    (0, 1),
    (1, 4),
    (1, 3),
    (1, 2),
    (3, 4),
    (1, 1),
    (1, 8),
    (2, 1),
];

/// Samples a valuation on the lattice.
///
/// Values are assigned along a linear extension: the bottom gets zero;
/// a join-reducible element gets the value modularity forces from one of
/// its decompositions; a join-irreducible element gets the max of its
/// strict lower set plus a random increment. Attempts whose forced values
/// clash, or that fail the full valuation check, are rejected.
pub fn random_valuation(
    rng: &mut impl Rng,
    lattice: &Arc<FiniteLattice>,
) -> Result<Sampled<Valuation>, GenError> {
    let order = lattice.linear_extension();
    let mut attempts = 0;
    'attempt: while attempts < MAX_ATTEMPTS {
        attempts += 1;
        let mut values: Vec<Option<Rat>> = vec![None; lattice.size()];
        for &p in &order {
            if p == lattice.bottom() {
                values[p.index()] = Some(Rat::zero());
                continue;
            }
            let strict_lower: Vec<ElementId> =
                lattice.downset(p).iter().filter(|q| *q != p).collect();
            // Forced value from any decomposition p = a v b with a, b
            // strictly below: mu(a) + mu(b) - mu(a ^ b).
            let mut forced: Option<Rat> = None;
            for (ai, &a) in strict_lower.iter().enumerate() {
                for &b in &strict_lower[ai + 1..] {
                    if lattice.join(a, b) != p {
                        continue;
                    }
                    let va = values[a.index()].clone().expect("assigned below");
                    let vb = values[b.index()].clone().expect("assigned below");
                    let vm = values[lattice.meet(a, b).index()]
                        .clone()
                        .expect("assigned below");
                    let f = &(&va + &vb)
                        .checked_sub(&vm)
                        .expect("meets stay below joins");
                    match &forced {
                        None => forced = Some(f.clone()),
                        Some(g) if g == f => {}
                        Some(_) => continue 'attempt,
                    }
                }
            }
            let value = match forced {
                Some(f) => f,
                None => {
                    let base = strict_lower
                        .iter()
                        .map(|q| values[q.index()].clone().expect("assigned below"))
                        .max()
                        .unwrap_or_else(Rat::zero);
                    let (n, d) = *INCREMENTS.choose(rng).expect("pool is nonempty");
                    &base + &Rat::new(n, d).expect("pool entries are valid")
                }
            };
            values[p.index()] = Some(value);
        }
        let values: Vec<Rat> = values
            .into_iter()
            .map(|v| v.expect("all assigned"))
            .collect();
        if let Ok(v) = check_valuation(Arc::clone(lattice), values) {
            return Ok(Sampled { value: v, attempts });
        }
    }
    Err(GenError::Exhausted {
        what: "valuation",
        attempts,
    })
}

/// Samples a measure site: a random lattice carrying a random valuation.
pub fn random_mu_site(
    rng: &mut impl Rng,
    max_size: usize,
) -> Result<Sampled<SitePresentation>, GenError> {
    let lat = random_lattice(rng, max_size)?;
    let val = random_valuation(rng, &lat.value)?;
    Ok(Sampled {
        value: SitePresentation::mu_inner(val.value),
        attempts: lat.attempts + val.attempts - 1,
    })
}

/// Samples a standard set with bounded dimension and thinness; cube
/// corners land in a small box around the unit cube.
pub fn random_standard_set(rng: &mut impl Rng, max_dim: usize, max_thinness: u32) -> StandardSet {
    let dim = rng.gen_range(1..=max_dim.clamp(1, 3));
    random_standard_set_dim(rng, dim, max_thinness)
}

/// Like [`random_standard_set`] with the dimension fixed, so callers can
/// draw pairs that are compatible for set algebra.
pub fn random_standard_set_dim(rng: &mut impl Rng, dim: usize, max_thinness: u32) -> StandardSet {
    let dim = dim.clamp(1, 3);
    let thinness = rng.gen_range(0..=max_thinness.min(5));
    let span = 1i64 << thinness;
    let count = rng.gen_range(0..=10);
    let corners = (0..count).map(|_| {
        (0..dim)
            .map(|_| rng.gen_range(-span..=2 * span))
            .collect::<Vec<i64>>()
    });
    StandardSet::new(dim, thinness, corners).expect("corners match the sampled dimension")
}
