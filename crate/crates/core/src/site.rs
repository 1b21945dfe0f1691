//! Coverage data on a lattice and the closure machinery it generates:
//! saturated ideals, their enumeration, cover testing, and points.
//!
//! Three coverage styles share one closure engine. A family covers a
//! target either because its join reaches the target, because its join
//! carries the same measure as the target, or because a listed generating
//! cover forces it.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::order::{downset_closure, ElemSet, ElementId, FiniteLattice};
use crate::valuation::Valuation;

/// Default ceiling on lattice size for whole-structure enumeration.
pub const ENUM_CAP: usize = 20;

/// Errors from coverage construction and ideal computation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SiteError {
    #[error("set is not downward closed: contains `{element}` but not `{below}`")]
    NotDownwardClosed { element: String, below: String },
    #[error("cover member `{member}` is not below its target `{target}`")]
    MemberAboveTarget { target: String, member: String },
    #[error("{what} count {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

/// An explicit list of generating covers.
#[derive(Clone, Debug)]
pub struct CoverageSpec {
    covers: Vec<(ElementId, ElemSet)>,
}

impl CoverageSpec {
    /// Validates that every family member sits below its target.
    pub fn new(
        lat: &FiniteLattice,
        covers: Vec<(ElementId, ElemSet)>,
    ) -> Result<CoverageSpec, SiteError> {
        for (target, family) in &covers {
            if let Some(m) = family.iter().find(|m| !lat.leq(*m, *target)) {
                return Err(SiteError::MemberAboveTarget {
                    target: lat.display(*target),
                    member: lat.display(m),
                });
            }
        }
        Ok(CoverageSpec { covers })
    }

    pub fn covers(&self) -> &[(ElementId, ElemSet)] {
        &self.covers
    }
}

/// How covers are determined on the underlying lattice.
#[derive(Clone, Debug)]
pub enum Coverage {
    /// Listed generating covers, closed under pullback and composition.
    Explicit(CoverageSpec),
    /// A family covers its join.
    FiniteJoin,
    /// A family covers anything its join exhausts in measure.
    MuInner(Valuation),
}

/// A lattice together with coverage data.
#[derive(Clone, Debug)]
pub struct SitePresentation {
    lattice: Arc<FiniteLattice>,
    coverage: Coverage,
}

impl SitePresentation {
    pub fn finite_join(lattice: Arc<FiniteLattice>) -> SitePresentation {
        SitePresentation {
            lattice,
            coverage: Coverage::FiniteJoin,
        }
    }

    pub fn mu_inner(valuation: Valuation) -> SitePresentation {
        SitePresentation {
            lattice: valuation.lattice().clone(),
            coverage: Coverage::MuInner(valuation),
        }
    }

    pub fn explicit(lattice: Arc<FiniteLattice>, spec: CoverageSpec) -> SitePresentation {
        SitePresentation {
            lattice,
            coverage: Coverage::Explicit(spec),
        }
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn coverage(&self) -> &Coverage {
        &self.coverage
    }

    pub fn valuation(&self) -> Option<&Valuation> {
        match &self.coverage {
            Coverage::MuInner(v) => Some(v),
            _ => None,
        }
    }
}

/// A saturated ideal: downward closed, contains the bottom, and closed
/// under the site's covers.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct IdealSet(ElemSet);

impl IdealSet {
    pub fn members(self) -> ElemSet {
        self.0
    }

    pub fn contains(self, e: ElementId) -> bool {
        self.0.contains(e)
    }

    pub fn len(self) -> usize {
        self.0.len()
    }

    pub fn is_empty(self) -> bool {
        self.0.is_empty()
    }
}

/// Closes a downward closed set into the least saturated ideal containing
/// it. This is a closure operator: inflationary, monotone, idempotent.
pub fn sheafify(site: &SitePresentation, set: ElemSet) -> Result<IdealSet, SiteError> {
    let lat = site.lattice();
    for p in set.iter() {
        if let Some(q) = lat.downset(p).iter().find(|q| !set.contains(*q)) {
            return Err(SiteError::NotDownwardClosed {
                element: lat.display(p),
                below: lat.display(q),
            });
        }
    }
    Ok(saturate(site, set))
}

/// The closure loop; `set` must already be downward closed.
fn saturate(site: &SitePresentation, set: ElemSet) -> IdealSet {
    let lat = site.lattice();
    let mut cur = set.with(lat.bottom());
    loop {
        let before = cur;

        // Downward closure is re-established every pass because the steps
        // below may add interior elements.
        for p in before.iter() {
            cur = cur | lat.downset(p);
        }

        match site.coverage() {
            Coverage::FiniteJoin | Coverage::MuInner(_) => {
                for p in cur.iter() {
                    for q in cur.iter() {
                        cur.insert(lat.join(p, q));
                    }
                }
            }
            Coverage::Explicit(spec) => {
                for (target, family) in spec.covers() {
                    // Pulled-back covers: for s below the target, the family
                    // meets down to a cover of s.
                    for s in lat.downset(*target).iter() {
                        if cur.contains(s) {
                            continue;
                        }
                        if family.iter().all(|f| cur.contains(lat.meet(f, s))) {
                            cur.insert(s);
                        }
                    }
                }
            }
        }

        if let Coverage::MuInner(v) = site.coverage() {
            // Anything measure-exhausted from below joins the ideal. The
            // ideal is join closed at this point, so the join of its part
            // under p is the best approximant.
            for p in lat.elements() {
                if cur.contains(p) {
                    continue;
                }
                let approx = lat.join_all(cur & lat.downset(p));
                if v.value(approx) == v.value(p) {
                    cur.insert(p);
                }
            }
        }

        if cur == before {
            return IdealSet(cur);
        }
    }
}

/// The ideal generated by the downset of one element.
pub fn principal_sheaf(site: &SitePresentation, p: ElementId) -> IdealSet {
    saturate(site, site.lattice().downset(p))
}

/// All saturated ideals, ordered by size then by element mask.
pub fn all_sheaves(site: &SitePresentation) -> Result<Vec<IdealSet>, SiteError> {
    all_sheaves_capped(site, ENUM_CAP)
}

pub fn all_sheaves_capped(site: &SitePresentation, cap: usize) -> Result<Vec<IdealSet>, SiteError> {
    let lat = site.lattice();
    if lat.size() > cap {
        return Err(SiteError::CapExceeded {
            what: "lattice elements",
            size: lat.size(),
            cap,
        });
    }
    let mut found: BTreeSet<IdealSet> = BTreeSet::new();
    match site.coverage() {
        Coverage::FiniteJoin | Coverage::MuInner(_) => {
            // Saturated ideals here are join closed and downward closed, so
            // each is the closure of a principal downset.
            for p in lat.elements() {
                found.insert(principal_sheaf(site, p));
            }
        }
        Coverage::Explicit(_) => {
            for set in enumerate_downsets(lat) {
                if set.is_empty() {
                    continue;
                }
                if saturate(site, set).members() == set {
                    found.insert(IdealSet(set));
                }
            }
        }
    }
    let mut out: Vec<IdealSet> = found.into_iter().collect();
    out.sort_by_key(|i| (i.len(), i.members().mask()));
    Ok(out)
}

/// Every downward closed subset, including the empty one.
fn enumerate_downsets(lat: &FiniteLattice) -> Vec<ElemSet> {
    let mut sets = vec![ElemSet::EMPTY];
    for e in lat.linear_extension() {
        let below = lat.downset(e).without(e);
        let mut next = Vec::with_capacity(sets.len() * 2);
        for s in sets {
            next.push(s);
            if below.is_subset(s) {
                next.push(s.with(e));
            }
        }
        sets = next;
    }
    sets
}

/// Whether `family` covers `target` under the site's coverage.
///
/// Families with members above the target cover nothing.
pub fn is_cover(site: &SitePresentation, target: ElementId, family: ElemSet) -> bool {
    let lat = site.lattice();
    if !family.is_subset(lat.downset(target)) {
        return false;
    }
    match site.coverage() {
        Coverage::FiniteJoin => lat.join_all(family) == target,
        Coverage::MuInner(v) => v.value(lat.join_all(family)) == v.value(target),
        Coverage::Explicit(_) => {
            saturate(site, downset_closure(lat, family).members()).contains(target)
        }
    }
}

/// A completely prime filter, listed by its members.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PointFilter(ElemSet);

impl PointFilter {
    pub fn members(self) -> ElemSet {
        self.0
    }

    /// The least member; filters on a finite lattice are upsets of it.
    pub fn generator(self, lat: &FiniteLattice) -> ElementId {
        lat.meet_all(self.0).expect("filters are nonempty")
        // meet of an upset stays in the upset
    }
}

/// All points of the site, in order of their generating element.
///
/// Filters on a finite lattice are principal upsets, and primality against
/// all covers reduces to the worst family below each member: everything in
/// the downset that avoids the filter.
pub fn enumerate_points(site: &SitePresentation) -> Result<Vec<PointFilter>, SiteError> {
    enumerate_points_capped(site, ENUM_CAP)
}

pub fn enumerate_points_capped(
    site: &SitePresentation,
    cap: usize,
) -> Result<Vec<PointFilter>, SiteError> {
    let lat = site.lattice();
    if lat.size() > cap {
        return Err(SiteError::CapExceeded {
            what: "lattice elements",
            size: lat.size(),
            cap,
        });
    }
    let mut out = Vec::new();
    'candidates: for m in lat.elements() {
        let filter = lat.upset(m);
        if filter.contains(lat.bottom()) {
            // Only possible when m is the bottom; the improper filter is
            // ruled out because the empty family covers the bottom.
            continue;
        }
        for p in filter.iter() {
            let worst = lat.downset(p) - filter;
            if is_cover(site, p, worst) {
                continue 'candidates;
            }
        }
        out.push(PointFilter(filter));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::Rat;
    use crate::valuation::check_valuation;

    fn rats(xs: &[(u64, u64)]) -> Vec<Rat> {
        xs.iter().map(|&(p, q)| Rat::new(p, q).unwrap()).collect()
    }

    fn chain_site(values: &[(u64, u64)]) -> SitePresentation {
        let labels: Vec<String> = match values.len() {
            2 => vec!["0".into(), "1".into()],
            3 => vec!["0".into(), "U".into(), "1".into()],
            n => (0..n).map(|i| format!("c{i}")).collect(),
        };
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let lat = FiniteLattice::chain(&refs).unwrap();
        let v = check_valuation(lat, rats(values)).unwrap();
        SitePresentation::mu_inner(v)
    }

    #[test]
    fn measure_step_completes_ideal() {
        // Chain 0 <= U <= 1 with values 0, 1/2, 1: the downset of U is
        // already saturated.
        let site = chain_site(&[(0, 1), (1, 2), (1, 1)]);
        let lat = site.lattice().clone();
        let u = lat.by_label("U").unwrap();
        let ideal = sheafify(&site, lat.downset(u)).unwrap();
        assert_eq!(ideal.members(), lat.downset(u));

        // With values 0, 1, 1 the top is measure-exhausted by U and must
        // join the ideal.
        let site2 = chain_site(&[(0, 1), (1, 1), (1, 1)]);
        let lat2 = site2.lattice().clone();
        let u2 = lat2.by_label("U").unwrap();
        let ideal2 = sheafify(&site2, lat2.downset(u2)).unwrap();
        assert_eq!(ideal2.members(), lat2.all());
    }

    #[test]
    fn sheafify_rejects_non_downsets() {
        let site = chain_site(&[(0, 1), (1, 2), (1, 1)]);
        let lat = site.lattice();
        let u = lat.by_label("U").unwrap();
        let err = sheafify(&site, ElemSet::singleton(u)).unwrap_err();
        assert!(matches!(err, SiteError::NotDownwardClosed { .. }));
    }

    #[test]
    fn counting_site_has_four_ideals() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let v = check_valuation(lat.clone(), rats(&[(0, 1), (1, 1), (1, 1), (2, 1)])).unwrap();
        let site = SitePresentation::mu_inner(v);
        let sheaves = all_sheaves(&site).unwrap();
        assert_eq!(sheaves.len(), 4);
        // Faithful counting measure keeps every principal downset distinct.
        let expected: BTreeSet<ElemSet> = lat.elements().map(|p| lat.downset(p)).collect();
        let got: BTreeSet<ElemSet> = sheaves.iter().map(|i| i.members()).collect();
        assert_eq!(expected, got);
    }

    #[test]
    fn sierpinski_half_keeps_three_ideals() {
        let site = chain_site(&[(0, 1), (1, 2), (1, 1)]);
        assert_eq!(all_sheaves(&site).unwrap().len(), 3);
    }

    #[test]
    fn indicator_measure_collapses_to_two_ideals() {
        let site = chain_site(&[(0, 1), (1, 1), (1, 1)]);
        let sheaves = all_sheaves(&site).unwrap();
        assert_eq!(sheaves.len(), 2);
        let lat = site.lattice();
        assert_eq!(sheaves[0].members(), ElemSet::singleton(lat.bottom()));
        assert_eq!(sheaves[1].members(), lat.all());
    }

    #[test]
    fn ideals_sorted_by_size_then_mask() {
        let site = chain_site(&[(0, 1), (1, 2), (1, 1)]);
        let sheaves = all_sheaves(&site).unwrap();
        let sizes: Vec<usize> = sheaves.iter().map(|i| i.len()).collect();
        assert_eq!(sizes, vec![1, 2, 3]);
    }

    #[test]
    fn explicit_empty_coverage_yields_all_downsets_with_bottom() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let spec = CoverageSpec::new(&lat, vec![]).unwrap();
        let site = SitePresentation::explicit(lat.clone(), spec);
        // Downsets of the four-element square containing the bottom:
        // {0}, {0,a}, {0,b}, {0,a,b}, all.
        assert_eq!(all_sheaves(&site).unwrap().len(), 5);
    }

    #[test]
    fn explicit_cover_forces_saturation() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let a = lat.by_label("{a}").unwrap();
        let b = lat.by_label("{b}").unwrap();
        let top = lat.top().unwrap();
        let spec = CoverageSpec::new(&lat, vec![(top, ElemSet::singleton(a).with(b))]).unwrap();
        let site = SitePresentation::explicit(lat.clone(), spec);
        // {0,a,b} is no longer saturated; the listed cover forces the top in.
        let sheaves = all_sheaves(&site).unwrap();
        assert_eq!(sheaves.len(), 4);
        assert!(is_cover(&site, top, ElemSet::singleton(a).with(b)));
        assert!(!is_cover(&site, top, ElemSet::singleton(a)));
    }

    #[test]
    fn explicit_cover_validation() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let a = lat.by_label("{a}").unwrap();
        let top = lat.top().unwrap();
        let err = CoverageSpec::new(&lat, vec![(a, ElemSet::singleton(top))]).unwrap_err();
        assert!(matches!(err, SiteError::MemberAboveTarget { .. }));
    }

    #[test]
    fn principal_sheaf_at_bottom_is_null_ideal() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let v = check_valuation(lat.clone(), rats(&[(0, 1), (0, 1), (1, 2), (1, 2)])).unwrap();
        let site = SitePresentation::mu_inner(v.clone());
        let null = principal_sheaf(&site, lat.bottom());
        assert_eq!(null.members(), v.null_elements());
    }

    #[test]
    fn finite_join_points_of_powerset_are_atoms() {
        let lat = FiniteLattice::powerset(&["a", "b", "c"]).unwrap();
        let site = SitePresentation::finite_join(lat.clone());
        let points = enumerate_points(&site).unwrap();
        assert_eq!(points.len(), 3);
        for pt in &points {
            let g = pt.generator(&lat);
            assert_eq!(lat.downset(g).len(), 2); // an atom
        }
    }

    #[test]
    fn mu_inner_counting_points_drop_thick_filters() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let v = check_valuation(lat.clone(), rats(&[(0, 1), (1, 1), (1, 1), (2, 1)])).unwrap();
        let site = SitePresentation::mu_inner(v);
        let points = enumerate_points(&site).unwrap();
        assert_eq!(points.len(), 2);
    }

    #[test]
    fn cover_test_matches_saturation_route() {
        let site = chain_site(&[(0, 1), (1, 1), (1, 1)]);
        let lat = site.lattice().clone();
        let u = lat.by_label("U").unwrap();
        let top = lat.top().unwrap();
        assert!(is_cover(&site, top, ElemSet::singleton(u)));
        // Family member above target covers nothing.
        assert!(!is_cover(&site, u, ElemSet::singleton(top)));
        // Empty family covers exactly the null part.
        assert!(is_cover(&site, lat.bottom(), ElemSet::EMPTY));
        assert!(!is_cover(&site, u, ElemSet::EMPTY));
    }

    #[test]
    fn enumeration_cap_respected() {
        let labels: Vec<String> = (0..21).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let lat = FiniteLattice::chain(&refs).unwrap();
        let site = SitePresentation::finite_join(lat);
        assert!(matches!(
            all_sheaves(&site).unwrap_err(),
            SiteError::CapExceeded {
                size: 21,
                cap: 20,
                ..
            }
        ));
        assert!(all_sheaves_capped(&site, 21).is_ok());
    }
}
