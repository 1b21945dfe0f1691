//! Exact geometry of finite unions of half-open dyadic cubes: measures,
//! refinement, Boolean combinations, translation, shearing brackets, and
//! the staged removed-middle interval family.
//!
//! A cube at thinness n has side 1/2^n; a corner vector names the cube of
//! points between corner/2^n and (corner+1)/2^n. All arithmetic is on
//! scaled integers, so results are exact.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::order::FiniteLattice;
use crate::rat::Rat;
use crate::valuation::{check_valuation, Valuation};

/// Cap on materialized cube counts for refinement and conversions.
pub const CUBE_CAP: usize = 1 << 22;

/// Errors from dyadic set construction and operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DyadicError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimensions differ: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("corner has {got} coordinates, expected {expected}")]
    BadCorner { expected: usize, got: usize },
    #[error("cannot refine from thinness {current} down to {requested}")]
    RefineBelow { current: u32, requested: u32 },
    #[error("{what} count {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("shearing is only implemented in dimension 2, got {dim}")]
    ScopeError { dim: usize },
    #[error("shear axes must be two distinct axes below the dimension")]
    BadAxes,
    #[error("`{0}` is not a dyadic rational p/2^k")]
    NotDyadic(String),
}

/// A signed dyadic rational num / 2^log_den in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dyadic {
    num: i64,
    log_den: u32,
}

impl Dyadic {
    pub fn new(num: i64, log_den: u32) -> Dyadic {
        let mut d = Dyadic { num, log_den };
        while d.num != 0 && d.num % 2 == 0 && d.log_den > 0 {
            d.num /= 2;
            d.log_den -= 1;
        }
        if d.num == 0 {
            d.log_den = 0;
        }
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic { num: 0, log_den: 0 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn log_den(&self) -> u32 {
        self.log_den
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1i64 << self.log_den)
        }
    }
}

impl FromStr for Dyadic {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Dyadic, DyadicError> {
        let t = s.trim();
        let bad = || DyadicError::NotDyadic(s.to_string());
        match t.split_once('/') {
            None => {
                let num: i64 = t.parse().map_err(|_| bad())?;
                Ok(Dyadic::new(num, 0))
            }
            Some((p, q)) => {
                let num: i64 = p.trim().parse().map_err(|_| bad())?;
                let den: u64 = q.trim().parse().map_err(|_| bad())?;
                if den == 0 || !den.is_power_of_two() {
                    return Err(bad());
                }
                Ok(Dyadic::new(num, den.trailing_zeros()))
            }
        }
    }
}

/// A single dyadic cube, named by thinness and integer corner.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DyadicCube {
    pub dim: usize,
    pub thinness: u32,
    pub corner: Vec<i64>,
}

/// A finite union of same-thinness dyadic cubes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StandardSet {
    dim: usize,
    thinness: u32,
    cubes: BTreeSet<Vec<i64>>,
}

impl StandardSet {
    pub fn new(
        dim: usize,
        thinness: u32,
        corners: impl IntoIterator<Item = Vec<i64>>,
    ) -> Result<StandardSet, DyadicError> {
        if dim == 0 {
            return Err(DyadicError::ZeroDimension);
        }
        let mut cubes = BTreeSet::new();
        for c in corners {
            if c.len() != dim {
                return Err(DyadicError::BadCorner {
                    expected: dim,
                    got: c.len(),
                });
            }
            cubes.insert(c);
        }
        Ok(StandardSet {
            dim,
            thinness,
            cubes,
        })
    }

    /// The unit cube [0,1)^dim at thinness 0.
    pub fn unit_cube(dim: usize) -> Result<StandardSet, DyadicError> {
        StandardSet::new(dim, 0, [vec![0; dim]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn thinness(&self) -> u32 {
        self.thinness
    }

    pub fn cube_count(&self) -> usize {
        self.cubes.len()
    }

    pub fn corners(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.cubes.iter()
    }

    /// Cube share of space: count over 2^(thinness * dim).
    pub fn measure(&self) -> Rat {
        let shift = self.thinness * self.dim as u32;
        Rat::dyadic(self.cubes.len() as u64, shift)
    }

    /// Rewrites the set at a finer thinness; the measure is unchanged.
    pub fn refine(&self, thinness: u32) -> Result<StandardSet, DyadicError> {
        if thinness < self.thinness {
            return Err(DyadicError::RefineBelow {
                current: self.thinness,
                requested: thinness,
            });
        }
        let delta = thinness - self.thinness;
        let bits = delta as u64 * self.dim as u64;
        let total: u128 = if bits >= 64 {
            u128::MAX
        } else {
            (self.cubes.len() as u128) << bits
        };
        if total > CUBE_CAP as u128 {
            return Err(DyadicError::CapExceeded {
                what: "refined cubes",
                size: total.min(usize::MAX as u128) as usize,
                cap: CUBE_CAP,
            });
        }
        let total = total as usize;
        let per_axis = 1i64 << delta;
        let mut cubes = BTreeSet::new();
        for corner in &self.cubes {
            let base: Vec<i64> = corner.iter().map(|c| c << delta).collect();
            let mut offset = vec![0i64; self.dim];
            loop {
                cubes.insert(
                    base.iter()
                        .zip(&offset)
                        .map(|(b, o)| b + o)
                        .collect::<Vec<i64>>(),
                );
                // Odometer over the subdivision offsets.
                let mut axis = 0;
                loop {
                    if axis == self.dim {
                        break;
                    }
                    offset[axis] += 1;
                    if offset[axis] < per_axis {
                        break;
                    }
                    offset[axis] = 0;
                    axis += 1;
                }
                if axis == self.dim {
                    break;
                }
            }
        }
        debug_assert_eq!(cubes.len(), total);
        Ok(StandardSet {
            dim: self.dim,
            thinness,
            cubes,
        })
    }

    fn common_refinement(
        &self,
        other: &StandardSet,
    ) -> Result<(StandardSet, StandardSet), DyadicError> {
        if self.dim != other.dim {
            return Err(DyadicError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let t = self.thinness.max(other.thinness);
        Ok((self.refine(t)?, other.refine(t)?))
    }

    pub fn union(&self, other: &StandardSet) -> Result<StandardSet, DyadicError> {
        let (a, b) = self.common_refinement(other)?;
        let cubes = a.cubes.union(&b.cubes).cloned().collect();
        Ok(StandardSet {
            dim: self.dim,
            thinness: a.thinness,
            cubes,
        })
    }

    pub fn intersect(&self, other: &StandardSet) -> Result<StandardSet, DyadicError> {
        let (a, b) = self.common_refinement(other)?;
        let cubes = a.cubes.intersection(&b.cubes).cloned().collect();
        Ok(StandardSet {
            dim: self.dim,
            thinness: a.thinness,
            cubes,
        })
    }

    /// Shifts by a dyadic vector, refining as needed so the shifted cubes
    /// stay on the grid.
    pub fn translate(&self, v: &[Dyadic]) -> Result<StandardSet, DyadicError> {
        if v.len() != self.dim {
            return Err(DyadicError::DimMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let t = v
            .iter()
            .map(|d| d.log_den())
            .max()
            .unwrap_or(0)
            .max(self.thinness);
        let refined = self.refine(t)?;
        let offset: Vec<i64> = v.iter().map(|d| d.num() << (t - d.log_den())).collect();
        let cubes = refined
            .cubes
            .iter()
            .map(|c| c.iter().zip(&offset).map(|(a, o)| a + o).collect())
            .collect();
        Ok(StandardSet {
            dim: self.dim,
            thinness: t,
            cubes,
        })
    }

    /// Whether two sets cover the same points, comparing on a common grid.
    pub fn equivalent(&self, other: &StandardSet) -> Result<bool, DyadicError> {
        let (a, b) = self.common_refinement(other)?;
        Ok(a.cubes == b.cubes)
    }
}

/// A shear: add `amount` times the coordinate on `by_axis` to the
/// coordinate on `axis`.
#[derive(Clone, Copy, Debug)]
pub struct ShearSpec {
    axis: usize,
    by_axis: usize,
    amount: Dyadic,
}

impl ShearSpec {
    pub fn new(axis: usize, by_axis: usize, amount: Dyadic) -> Result<ShearSpec, DyadicError> {
        if axis == by_axis {
            return Err(DyadicError::BadAxes);
        }
        Ok(ShearSpec {
            axis,
            by_axis,
            amount,
        })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn by_axis(&self) -> usize {
        self.by_axis
    }

    pub fn amount(&self) -> Dyadic {
        self.amount
    }
}

/// Inner and outer cube approximations of a sheared set at one thinness.
#[derive(Clone, Debug)]
pub struct ShearBracket {
    pub inner: StandardSet,
    pub outer: StandardSet,
}

impl ShearBracket {
    pub fn inner_measure(&self) -> Rat {
        self.inner.measure()
    }

    pub fn outer_measure(&self) -> Rat {
        self.outer.measure()
    }

    /// outer - inner; the bracket never inverts.
    pub fn gap(&self) -> Rat {
        self.outer
            .measure()
            .checked_sub(&self.inner.measure())
            .expect("outer approximations dominate inner ones")
    }
}

/// Ceiling on shear bracket thinness; the grid scan is quadratic in 2^n.
pub const SHEAR_THINNESS_CAP: u32 = 12;

/// Brackets the image of `s` under a shear between an inner union of
/// cubes (cubes whose corner and edge-midpoint samples all land inside)
/// and an outer union (cubes with open overlap with some sheared cube).
pub fn shear_bracket(
    s: &StandardSet,
    spec: &ShearSpec,
    thinness: u32,
) -> Result<ShearBracket, DyadicError> {
    if s.dim() != 2 {
        return Err(DyadicError::ScopeError { dim: s.dim() });
    }
    if spec.axis() >= 2 || spec.by_axis() >= 2 {
        return Err(DyadicError::BadAxes);
    }
    if thinness > SHEAR_THINNESS_CAP {
        return Err(DyadicError::CapExceeded {
            what: "shear thinness",
            size: thinness as usize,
            cap: SHEAR_THINNESS_CAP as usize,
        });
    }
    let i = spec.axis();
    let j = spec.by_axis();
    let num = spec.amount().num() as i128;
    let al = spec.amount().log_den();
    let m = s.thinness();
    let n = thinness;

    // One scale for every exact coordinate in play: source cube bounds
    // (thinness m), sample points (thinness n + 1), and shear images
    // (denominator gaining al).
    let scale_log = (m.max(n + 1) + al + 1) as i128;
    let scale_log = scale_log as u32;
    let sm = 1i128 << (scale_log - m);
    let sn1 = 1i128 << (scale_log - n - 1);

    let forward = |p: [i128; 2]| -> [i128; 2] {
        let mut out = p;
        out[i] = p[i] + (num * p[j]) / (1i128 << al);
        out
    };
    let backward = |p: [i128; 2]| -> [i128; 2] {
        let mut out = p;
        out[i] = p[i] - (num * p[j]) / (1i128 << al);
        out
    };

    // Separating axis directions, scaled to integer vectors: the two grid
    // axes and the sheared edge normal.
    let axes: [[i128; 2]; 3] = {
        let mut normal = [0i128; 2];
        normal[i] = 1i128 << al;
        normal[j] = -num;
        let mut e_i = [0i128; 2];
        e_i[i] = 1;
        let mut e_j = [0i128; 2];
        e_j[j] = 1;
        [e_i, e_j, normal]
    };
    let dot = |a: [i128; 2], b: [i128; 2]| a[0] * b[0] + a[1] * b[1];

    // Projection intervals of each sheared source cube on each axis, and
    // the global bounding box.
    struct SourcePiece {
        lo: [i128; 2],
        hi: [i128; 2],
        proj: [(i128, i128); 3],
    }
    let mut pieces = Vec::with_capacity(s.cube_count());
    let mut bbox_lo = [i128::MAX; 2];
    let mut bbox_hi = [i128::MIN; 2];
    for corner in s.corners() {
        let c = [corner[0] as i128 * sm, corner[1] as i128 * sm];
        let verts: Vec<[i128; 2]> = (0..4)
            .map(|k| forward([c[0] + (k & 1) * sm, c[1] + (k >> 1) * sm]))
            .collect();
        let mut proj = [(i128::MAX, i128::MIN); 3];
        for v in &verts {
            for (ai, axis) in axes.iter().enumerate() {
                let d = dot(*v, *axis);
                proj[ai].0 = proj[ai].0.min(d);
                proj[ai].1 = proj[ai].1.max(d);
            }
            for t in 0..2 {
                bbox_lo[t] = bbox_lo[t].min(v[t]);
                bbox_hi[t] = bbox_hi[t].max(v[t]);
            }
        }
        pieces.push(SourcePiece {
            lo: c,
            hi: [c[0] + sm, c[1] + sm],
            proj,
        });
    }
    if pieces.is_empty() {
        let empty = StandardSet::new(2, n, [])?;
        return Ok(ShearBracket {
            inner: empty.clone(),
            outer: empty,
        });
    }

    let sn = 2 * sn1;
    let grid_lo: Vec<i64> = bbox_lo
        .iter()
        .map(|v| (v.div_euclid(sn) - 1) as i64)
        .collect();
    let grid_hi: Vec<i64> = bbox_hi
        .iter()
        .map(|v| (v.div_euclid(sn) + 1) as i64)
        .collect();
    let cols = (grid_hi[0] - grid_lo[0] + 1) as usize;
    let rows = (grid_hi[1] - grid_lo[1] + 1) as usize;
    if cols.saturating_mul(rows) > CUBE_CAP {
        return Err(DyadicError::CapExceeded {
            what: "scanned cubes",
            size: cols.saturating_mul(rows),
            cap: CUBE_CAP,
        });
    }

    let inside_source = |p: [i128; 2]| -> bool {
        let q = backward(p);
        pieces
            .iter()
            .any(|c| (0..2).all(|t| c.lo[t] <= q[t] && q[t] <= c.hi[t]))
    };

    let mut inner_cubes = Vec::new();
    let mut outer_cubes = Vec::new();
    for gx in grid_lo[0]..=grid_hi[0] {
        for gy in grid_lo[1]..=grid_hi[1] {
            let base = [gx as i128 * sn, gy as i128 * sn];

            // Inner: corners and edge midpoints all land in the image.
            // The image of each cube is convex, but the union need not be,
            // so the midpoints genuinely strengthen the corner test.
            let mut inner = true;
            'samples: for dx in 0..3i128 {
                for dy in 0..3i128 {
                    if dx == 1 && dy == 1 {
                        continue;
                    }
                    let p = [base[0] + dx * sn1, base[1] + dy * sn1];
                    if !inside_source(p) {
                        inner = false;
                        break 'samples;
                    }
                }
            }
            if inner {
                inner_cubes.push(vec![gx, gy]);
            }

            // Outer: open overlap with some sheared cube, by strict
            // interval overlap on every separating axis candidate.
            let qverts: [[i128; 2]; 4] = [
                base,
                [base[0] + sn, base[1]],
                [base[0], base[1] + sn],
                [base[0] + sn, base[1] + sn],
            ];
            let mut qproj = [(i128::MAX, i128::MIN); 3];
            for v in &qverts {
                for (ai, axis) in axes.iter().enumerate() {
                    let d = dot(*v, *axis);
                    qproj[ai].0 = qproj[ai].0.min(d);
                    qproj[ai].1 = qproj[ai].1.max(d);
                }
            }
            let overlaps = pieces.iter().any(|c| {
                (0..3).all(|ai| qproj[ai].0.max(c.proj[ai].0) < qproj[ai].1.min(c.proj[ai].1))
            });
            if overlaps {
                outer_cubes.push(vec![gx, gy]);
            }
        }
    }

    Ok(ShearBracket {
        inner: StandardSet::new(2, n, inner_cubes)?,
        outer: StandardSet::new(2, n, outer_cubes)?,
    })
}

/// One stage of the removed-middles construction on the unit interval:
/// stage k removes an open middle of length 4^-m from each piece at step
/// m = 1..k. Pieces are closed intervals with endpoints over 2^(2k+1).
#[derive(Clone, Debug)]
pub struct SvcStage {
    k: u32,
    denom_log: u32,
    pieces: Vec<(u64, u64)>,
    measure: Rat,
}

/// Ceiling on removed-middle stages; piece count doubles per stage.
pub const SVC_STAGE_CAP: u32 = 20;

/// Builds stage k and checks its measure against the closed form
/// 1/2 + 1/2^(k+1).
pub fn svc_stage(k: u32) -> Result<SvcStage, DyadicError> {
    if k > SVC_STAGE_CAP {
        return Err(DyadicError::CapExceeded {
            what: "removed-middle stages",
            size: k as usize,
            cap: SVC_STAGE_CAP as usize,
        });
    }
    let mut denom_log = 0u32;
    let mut pieces: Vec<(u64, u64)> = vec![(0, 1)];
    for m in 1..=k {
        let target = 2 * m + 1;
        let shift = target - denom_log;
        denom_log = target;
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for (l, r) in pieces {
            let (l, r) = (l << shift, r << shift);
            // Endpoints are even after scaling, so the midpoint is exact;
            // the removed middle has radius one grid unit, which is half
            // of 4^-m at this denominator.
            let mid = (l + r) / 2;
            next.push((l, mid - 1));
            next.push((mid + 1, r));
        }
        pieces = next;
    }
    let total: u64 = pieces.iter().map(|(l, r)| r - l).sum();
    let measure = Rat::dyadic(total, denom_log);
    let expected = &Rat::new(1, 2).unwrap() + &Rat::dyadic(1, k + 1);
    assert_eq!(measure, expected, "stage measure follows the closed form");
    Ok(SvcStage {
        k,
        denom_log,
        pieces,
        measure,
    })
}

impl SvcStage {
    pub fn stage(&self) -> u32 {
        self.k
    }

    /// Thinness of the grid the endpoints live on.
    pub fn denom_log(&self) -> u32 {
        self.denom_log
    }

    /// Closed intervals as numerator pairs over 2^denom_log.
    pub fn pieces(&self) -> &[(u64, u64)] {
        &self.pieces
    }

    pub fn measure(&self) -> &Rat {
        &self.measure
    }

    /// Materializes the stage as unit grid cubes; stages past 10 exceed
    /// the cube cap of 2^22.
    pub fn to_standard_set(&self) -> Result<StandardSet, DyadicError> {
        let count: u64 = self.pieces.iter().map(|(l, r)| r - l).sum();
        if count as usize > CUBE_CAP {
            return Err(DyadicError::CapExceeded {
                what: "interval cubes",
                size: count as usize,
                cap: CUBE_CAP,
            });
        }
        let corners = self
            .pieces
            .iter()
            .flat_map(|&(l, r)| (l..r).map(|x| vec![x as i64]));
        StandardSet::new(1, self.denom_log, corners)
    }
}

/// Builds the cube-subset lattice of a region at one thinness, with the
/// cube-share measure on it. Returns the valuation and the cube legend in
/// label order.
pub fn standard_set_site(
    region: &StandardSet,
    thinness: u32,
) -> Result<(Valuation, Vec<Vec<i64>>), DyadicError> {
    let refined = region.refine(thinness)?;
    let cubes: Vec<Vec<i64>> = refined.corners().cloned().collect();
    // The lattice is the full powerset, so the 64-element carrier cap
    // allows at most 6 cubes.
    if cubes.len() > 6 {
        return Err(DyadicError::CapExceeded {
            what: "region cubes",
            size: cubes.len(),
            cap: 6,
        });
    }
    let names: Vec<String> = (0..cubes.len()).map(|i| format!("c{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let lat = FiniteLattice::powerset(&refs).expect("at most 6 atoms");
    let shift = thinness * refined.dim() as u32;
    let values: Vec<Rat> = (0..lat.size())
        .map(|mask| Rat::dyadic(mask.count_ones() as u64, shift))
        .collect();
    let v = check_valuation(lat, values).expect("cube shares are modular");
    Ok((v, cubes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_and_refinement_invariance() {
        let s = StandardSet::unit_cube(2).unwrap();
        assert_eq!(s.measure(), Rat::one());
        let r = s.refine(3).unwrap();
        assert_eq!(r.cube_count(), 64);
        assert_eq!(r.measure(), Rat::one());
        assert!(s.equivalent(&r).unwrap());
        assert!(matches!(r.refine(1), Err(DyadicError::RefineBelow { .. })));
    }

    #[test]
    fn union_intersection_on_common_grid() {
        let a = StandardSet::new(1, 1, [vec![0], vec![1]]).unwrap(); // [0,1)
        let b = StandardSet::new(1, 2, [vec![1], vec![2]]).unwrap(); // [1/4,3/4)
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(u.measure(), Rat::one());
        assert_eq!(i.measure(), Rat::new(1, 2).unwrap());
        // Modular law.
        let lhs = &a.measure() + &b.measure();
        let rhs = &u.measure() + &i.measure();
        assert_eq!(lhs, rhs);
        let c = StandardSet::unit_cube(2).unwrap();
        assert!(matches!(a.union(&c), Err(DyadicError::DimMismatch { .. })));
    }

    #[test]
    fn overlapping_squares_are_modular() {
        let a = StandardSet::unit_cube(2).unwrap();
        let b = StandardSet::new(2, 1, [vec![1, 0], vec![2, 0], vec![1, 1], vec![2, 1]]).unwrap();
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(u.measure(), Rat::new(3, 2).unwrap());
        assert_eq!(u.cube_count(), 6);
        assert_eq!(i.measure(), Rat::new(1, 2).unwrap());
        assert_eq!(&a.measure() + &b.measure(), &u.measure() + &i.measure());
        // Identities on the algebra.
        let empty = StandardSet::new(2, 0, []).unwrap();
        assert_eq!(empty.measure(), Rat::zero());
        assert!(a.union(&empty).unwrap().equivalent(&a).unwrap());
        assert!(a.intersect(&a).unwrap().equivalent(&a).unwrap());
    }

    #[test]
    fn refine_splits_into_children() {
        let one = StandardSet::new(2, 1, [vec![0, 0]]).unwrap();
        let r = one.refine(2).unwrap();
        assert_eq!(r.cube_count(), 4);
        assert_eq!(r.measure(), Rat::new(1, 4).unwrap());
    }

    #[test]
    fn translation_preserves_measure_and_roundtrips() {
        let s = StandardSet::new(2, 1, [vec![0, 0], vec![1, 1]]).unwrap();
        let v = ["3/4".parse::<Dyadic>().unwrap(), "-1/2".parse().unwrap()];
        let t = s.translate(&v).unwrap();
        assert_eq!(t.measure(), s.measure());
        let back = [Dyadic::new(-3, 2), Dyadic::new(1, 1)];
        let rt = t.translate(&back).unwrap();
        assert!(rt.equivalent(&s).unwrap());

        let square = StandardSet::unit_cube(2).unwrap();
        let shifted = square
            .translate(&[Dyadic::new(3, 2), Dyadic::new(-1, 2)])
            .unwrap();
        assert_eq!(shifted.thinness(), 2);
        assert_eq!(shifted.measure(), Rat::one());

        let interval = StandardSet::unit_cube(1).unwrap();
        let half = interval.translate(&[Dyadic::new(1, 1)]).unwrap();
        assert_eq!(half.measure(), Rat::one());
        let expect = StandardSet::new(1, 1, [vec![1], vec![2]]).unwrap();
        assert_eq!(half, expect);
        let same = interval.translate(&[Dyadic::zero()]).unwrap();
        assert!(same.equivalent(&interval).unwrap());
    }

    #[test]
    fn dyadic_parsing() {
        assert_eq!("3/4".parse::<Dyadic>().unwrap(), Dyadic::new(3, 2));
        assert_eq!("-2/4".parse::<Dyadic>().unwrap(), Dyadic::new(-1, 1));
        assert_eq!("5".parse::<Dyadic>().unwrap(), Dyadic::new(5, 0));
        assert!(matches!(
            "1/3".parse::<Dyadic>(),
            Err(DyadicError::NotDyadic(_))
        ));
        assert!(matches!(
            "1/0".parse::<Dyadic>(),
            Err(DyadicError::NotDyadic(_))
        ));
    }

    #[test]
    fn stage_one_removes_the_middle_quarter() {
        let s = svc_stage(1).unwrap();
        assert_eq!(s.denom_log(), 3);
        assert_eq!(s.pieces(), &[(0, 3), (5, 8)]);
        assert_eq!(s.measure(), &Rat::new(3, 4).unwrap());
        let cubes = s.to_standard_set().unwrap();
        let expect =
            StandardSet::new(1, 3, [vec![0], vec![1], vec![2], vec![5], vec![6], vec![7]]).unwrap();
        assert_eq!(cubes, expect);
    }

    #[test]
    fn stage_zero_is_the_unit_interval() {
        let s = svc_stage(0).unwrap();
        assert_eq!(s.pieces(), &[(0, 1)]);
        assert_eq!(s.measure(), &Rat::one());
    }

    #[test]
    fn stage_cap_enforced() {
        assert!(svc_stage(20).is_ok());
        assert!(matches!(
            svc_stage(21),
            Err(DyadicError::CapExceeded { .. })
        ));
    }

    #[test]
    fn stage_three_measure() {
        let s = svc_stage(3).unwrap();
        assert_eq!(s.measure(), &Rat::new(9, 16).unwrap());
        assert_eq!(s.pieces().len(), 8);
    }

    #[test]
    fn standard_site_of_quartered_interval() {
        let region = StandardSet::unit_cube(1).unwrap();
        let (v, cubes) = standard_set_site(&region, 2).unwrap();
        assert_eq!(cubes.len(), 4);
        assert_eq!(v.lattice().size(), 16);
        assert_eq!(v.total(), &Rat::one());
        // Values are k/4 by cube count.
        let a = v.lattice().by_label("{c0}").unwrap();
        assert_eq!(v.value(a), &Rat::new(1, 4).unwrap());
        // Five or more cubes exceed the powerset cap.
        assert!(matches!(
            standard_set_site(&region, 3),
            Err(DyadicError::CapExceeded {
                size: 8,
                cap: 6,
                ..
            })
        ));

        let square = StandardSet::unit_cube(2).unwrap();
        let (v2, cubes2) = standard_set_site(&square, 1).unwrap();
        assert_eq!(cubes2.len(), 4);
        assert_eq!(v2.lattice().size(), 16);
        assert_eq!(v2.total(), &Rat::one());
    }

    #[test]
    fn shear_bracket_of_unit_square() {
        let s = StandardSet::unit_cube(2).unwrap();
        let spec = ShearSpec::new(0, 1, Dyadic::new(1, 1)).unwrap();
        let br = shear_bracket(&s, &spec, 2).unwrap();
        // Slope 1/2 at grid 4: three full cubes per row inside, five per
        // row touched.
        assert_eq!(br.inner_measure(), Rat::new(3, 4).unwrap());
        assert_eq!(br.outer_measure(), Rat::new(5, 4).unwrap());
        assert_eq!(br.gap(), Rat::new(1, 2).unwrap());
    }

    #[test]
    fn shear_gap_shrinks_linearly() {
        let s = StandardSet::unit_cube(2).unwrap();
        let spec = ShearSpec::new(0, 1, Dyadic::new(1, 1)).unwrap();
        for n in 1..=6u32 {
            let br = shear_bracket(&s, &spec, n).unwrap();
            assert_eq!(br.gap(), Rat::dyadic(2, n));
            assert!(br.inner_measure() < Rat::one());
            assert!(br.outer_measure() > Rat::one());
        }
    }

    #[test]
    fn shear_identity_amount_zero() {
        let s = StandardSet::new(2, 1, [vec![0, 0], vec![1, 0]]).unwrap();
        let spec = ShearSpec::new(0, 1, Dyadic::zero()).unwrap();
        let br = shear_bracket(&s, &spec, 3).unwrap();
        // With no shear the bracket is exact.
        assert!(br.inner.equivalent(&s).unwrap());
        assert!(br.outer.equivalent(&s).unwrap());
    }

    #[test]
    fn shear_scope_and_axis_errors() {
        let s1 = StandardSet::unit_cube(1).unwrap();
        let spec = ShearSpec::new(0, 1, Dyadic::new(1, 1)).unwrap();
        assert!(matches!(
            shear_bracket(&s1, &spec, 2),
            Err(DyadicError::ScopeError { dim: 1 })
        ));
        assert!(matches!(
            ShearSpec::new(1, 1, Dyadic::zero()),
            Err(DyadicError::BadAxes)
        ));
        let s2 = StandardSet::unit_cube(2).unwrap();
        assert!(matches!(
            shear_bracket(&s2, &spec, 13),
            Err(DyadicError::CapExceeded { .. })
        ));
    }

    #[test]
    fn shear_other_axis_direction() {
        let s = StandardSet::unit_cube(2).unwrap();
        let spec = ShearSpec::new(1, 0, Dyadic::new(-1, 1)).unwrap();
        let br = shear_bracket(&s, &spec, 3).unwrap();
        // Mirror of the standard case: same measures by symmetry.
        assert_eq!(br.inner_measure(), Rat::new(7, 8).unwrap());
        assert_eq!(br.outer_measure(), Rat::new(9, 8).unwrap());
    }
}
