//! Finite bounded distributive lattices with verified structure.
//!
//! Elements are dense indices into fixed-width bitsets, so the carrier is
//! capped at 64 elements. Construction takes an arbitrary relation, closes
//! it reflexively and transitively, and then proves the result is a
//! distributive lattice with a bottom; every later operation reads
//! precomputed tables.

use std::fmt;
use std::sync::Arc;

/// Index of a lattice element. Only meaningful relative to one lattice.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub(crate) usize);

impl ElementId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Subset of lattice elements as a 64-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> ElemSet {
        debug_assert!(n <= 64);
        if n == 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: ElementId) -> ElemSet {
        ElemSet(1u64 << e.0)
    }

    pub fn contains(self, e: ElementId) -> bool {
        self.0 >> e.0 & 1 == 1
    }

    pub fn insert(&mut self, e: ElementId) {
        self.0 |= 1u64 << e.0;
    }

    pub fn with(self, e: ElementId) -> ElemSet {
        ElemSet(self.0 | 1u64 << e.0)
    }

    pub fn remove(&mut self, e: ElementId) {
        self.0 &= !(1u64 << e.0);
    }

    pub fn without(self, e: ElementId) -> ElemSet {
        ElemSet(self.0 & !(1u64 << e.0))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn from_mask(mask: u64) -> ElemSet {
        ElemSet(mask)
    }

    pub fn iter(self) -> impl Iterator<Item = ElementId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(ElementId(i))
            }
        })
    }
}

impl std::ops::BitOr for ElemSet {
    type Output = ElemSet;
    fn bitor(self, rhs: ElemSet) -> ElemSet {
        ElemSet(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for ElemSet {
    type Output = ElemSet;
    fn bitand(self, rhs: ElemSet) -> ElemSet {
        ElemSet(self.0 & rhs.0)
    }
}

impl std::ops::Sub for ElemSet {
    type Output = ElemSet;
    fn sub(self, rhs: ElemSet) -> ElemSet {
        ElemSet(self.0 & !rhs.0)
    }
}

impl FromIterator<ElementId> for ElemSet {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> ElemSet {
        let mut s = ElemSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Errors from lattice construction and total operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("element list is empty")]
    EmptyInput,
    #[error("more than 64 elements ({0})")]
    TooLarge(usize),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("order has a cycle through {}", cycle.join(", "))]
    Cycle { cycle: Vec<String> },
    #[error("no bottom element; minimal elements are {}", minimal.join(", "))]
    NoBottom { minimal: Vec<String> },
    #[error("elements `{a}` and `{b}` have no {kind}")]
    MissingBound {
        kind: &'static str,
        a: String,
        b: String,
    },
    #[error(
        "distributivity fails at ({a}, {b}, {c}): \
         meet({a}, join({b}, {c})) differs from join(meet({a}, {b}), meet({a}, {c}))"
    )]
    NotDistributive { a: String, b: String, c: String },
    #[error("empty meet needs a top element")]
    NoTop,
}

/// A finite bounded distributive lattice with precomputed order and
/// meet/join tables.
pub struct FiniteLattice {
    labels: Vec<Option<String>>,
    /// up[i] = set of j with i <= j; down[i] = set of j with j <= i.
    up: Vec<ElemSet>,
    down: Vec<ElemSet>,
    meet_t: Box<[u8]>,
    join_t: Box<[u8]>,
    bottom: ElementId,
    top: Option<ElementId>,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteLattice(n={})", self.size())
    }
}

impl FiniteLattice {
    /// Builds a lattice from labeled elements and a generating relation.
    ///
    /// The relation is closed reflexively and transitively before any
    /// checking, so callers list only the pairs they care about.
    pub fn build(
        elements: &[&str],
        leq_pairs: &[(&str, &str)],
    ) -> Result<Arc<FiniteLattice>, LatticeError> {
        let n = elements.len();
        check_size(n)?;
        let mut index = std::collections::HashMap::new();
        for (i, name) in elements.iter().enumerate() {
            if index.insert(name.to_string(), i).is_some() {
                return Err(LatticeError::DuplicateLabel(name.to_string()));
            }
        }
        let mut pairs = Vec::with_capacity(leq_pairs.len());
        for (a, b) in leq_pairs {
            let ia = *index
                .get(*a)
                .ok_or_else(|| LatticeError::UnknownLabel(a.to_string()))?;
            let ib = *index
                .get(*b)
                .ok_or_else(|| LatticeError::UnknownLabel(b.to_string()))?;
            pairs.push((ia, ib));
        }
        let labels = elements.iter().map(|s| Some(s.to_string())).collect();
        FiniteLattice::from_relation(labels, &pairs)
    }

    /// Builds from an index-level relation; labels are optional.
    pub fn from_relation(
        labels: Vec<Option<String>>,
        leq_pairs: &[(usize, usize)],
    ) -> Result<Arc<FiniteLattice>, LatticeError> {
        let n = labels.len();
        check_size(n)?;
        let mut up: Vec<ElemSet> = (0..n).map(|i| ElemSet::singleton(ElementId(i))).collect();
        for &(a, b) in leq_pairs {
            assert!(a < n && b < n, "relation index out of range");
            up[a].insert(ElementId(b));
        }
        // Reachability closure: after the k-loop, up[i] holds everything
        // reachable from i.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(ElementId(k)) {
                    up[i] = up[i] | up[k];
                }
            }
        }
        let this = FiniteLattice::from_closed_order(labels, up)?;
        Ok(Arc::new(this))
    }

    /// Core constructor: `up` must already be reflexive and transitive.
    fn from_closed_order(
        labels: Vec<Option<String>>,
        up: Vec<ElemSet>,
    ) -> Result<FiniteLattice, LatticeError> {
        let n = up.len();
        let full = ElemSet::full(n);
        let name = |i: usize| -> String {
            match &labels[i] {
                Some(s) => s.clone(),
                None => format!("#{i}"),
            }
        };

        for i in 0..n {
            for j in up[i].iter() {
                if j.0 != i && up[j.0].contains(ElementId(i)) {
                    // Mutually reachable pair: report the whole class.
                    let class: Vec<String> = (0..n)
                        .filter(|&k| up[i].contains(ElementId(k)) && up[k].contains(ElementId(i)))
                        .map(name)
                        .collect();
                    return Err(LatticeError::Cycle { cycle: class });
                }
            }
        }

        let mut down = vec![ElemSet::EMPTY; n];
        for i in 0..n {
            for j in up[i].iter() {
                down[j.0].insert(ElementId(i));
            }
        }

        let bottom = match (0..n).find(|&i| up[i] == full) {
            Some(i) => ElementId(i),
            None => {
                let minimal = (0..n).filter(|&i| down[i].len() == 1).map(name).collect();
                return Err(LatticeError::NoBottom { minimal });
            }
        };
        let top = (0..n).find(|&i| down[i] == full).map(ElementId);

        let mut meet_t = vec![0u8; n * n].into_boxed_slice();
        let mut join_t = vec![0u8; n * n].into_boxed_slice();
        for i in 0..n {
            for j in 0..n {
                let lower = down[i] & down[j];
                let m = lower
                    .iter()
                    .find(|&c| lower.is_subset(down[c.0]))
                    .ok_or_else(|| LatticeError::MissingBound {
                        kind: "meet",
                        a: name(i),
                        b: name(j),
                    })?;
                meet_t[i * n + j] = m.0 as u8;
                let upper = up[i] & up[j];
                let u = upper
                    .iter()
                    .find(|&c| upper.is_subset(up[c.0]))
                    .ok_or_else(|| LatticeError::MissingBound {
                        kind: "join",
                        a: name(i),
                        b: name(j),
                    })?;
                join_t[i * n + j] = u.0 as u8;
            }
        }

        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = meet_t[a * n + join_t[b * n + c] as usize];
                    let rhs = join_t[(meet_t[a * n + b] as usize) * n + meet_t[a * n + c] as usize];
                    if lhs != rhs {
                        return Err(LatticeError::NotDistributive {
                            a: name(a),
                            b: name(b),
                            c: name(c),
                        });
                    }
                }
            }
        }

        Ok(FiniteLattice {
            labels,
            up,
            down,
            meet_t,
            join_t,
            bottom,
            top,
        })
    }

    /// Powerset of up to 6 named atoms, ordered by inclusion.
    pub fn powerset(atoms: &[&str]) -> Result<Arc<FiniteLattice>, LatticeError> {
        if atoms.len() > 6 {
            return Err(LatticeError::TooLarge(1usize << atoms.len()));
        }
        let n = 1usize << atoms.len();
        let label = |s: usize| -> String {
            let parts: Vec<&str> = atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| s >> i & 1 == 1)
                .map(|(_, a)| *a)
                .collect();
            format!("{{{}}}", parts.join(","))
        };
        let labels: Vec<Option<String>> = (0..n).map(|s| Some(label(s))).collect();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a & b == a {
                    pairs.push((a, b));
                }
            }
        }
        FiniteLattice::from_relation(labels, &pairs)
    }

    /// Chain ordered by list position, first element at the bottom.
    pub fn chain(elements: &[&str]) -> Result<Arc<FiniteLattice>, LatticeError> {
        let pairs: Vec<(&str, &str)> = elements.windows(2).map(|w| (w[0], w[1])).collect();
        FiniteLattice::build(elements, &pairs)
    }

    pub fn size(&self) -> usize {
        self.up.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.size()).map(ElementId)
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.size())
    }

    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.up[a.0].contains(b)
    }

    pub fn meet(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.meet_t[a.0 * self.size() + b.0] as usize)
    }

    pub fn join(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.join_t[a.0 * self.size() + b.0] as usize)
    }

    pub fn bottom(&self) -> ElementId {
        self.bottom
    }

    pub fn top(&self) -> Option<ElementId> {
        self.top
    }

    pub fn upset(&self, a: ElementId) -> ElemSet {
        self.up[a.0]
    }

    pub fn downset(&self, a: ElementId) -> ElemSet {
        self.down[a.0]
    }

    pub fn label(&self, a: ElementId) -> Option<&str> {
        self.labels[a.0].as_deref()
    }

    /// Label if present, `#index` otherwise.
    pub fn display(&self, a: ElementId) -> String {
        match &self.labels[a.0] {
            Some(s) => s.clone(),
            None => format!("#{}", a.0),
        }
    }

    pub fn display_set(&self, s: ElemSet) -> String {
        let parts: Vec<String> = s.iter().map(|e| self.display(e)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn by_label(&self, label: &str) -> Option<ElementId> {
        self.labels
            .iter()
            .position(|l| l.as_deref() == Some(label))
            .map(ElementId)
    }

    /// Join of a set; the empty join is the bottom.
    pub fn join_all(&self, s: ElemSet) -> ElementId {
        s.iter().fold(self.bottom, |acc, e| self.join(acc, e))
    }

    /// Meet of a set; the empty meet needs a top.
    pub fn meet_all(&self, s: ElemSet) -> Result<ElementId, LatticeError> {
        match s.iter().next() {
            None => self.top.ok_or(LatticeError::NoTop),
            Some(first) => Ok(s.iter().skip(1).fold(first, |acc, e| self.meet(acc, e))),
        }
    }

    /// Pairs (a, b) where b covers a, for Hasse diagram output.
    pub fn cover_pairs(&self) -> Vec<(ElementId, ElementId)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.upset(a).iter() {
                if a == b {
                    continue;
                }
                let between = (self.upset(a) & self.downset(b)).len();
                if between == 2 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// A linear extension: element indices sorted so that smaller elements
    /// come first.
    pub fn linear_extension(&self) -> Vec<ElementId> {
        let mut order: Vec<ElementId> = self.elements().collect();
        order.sort_by_key(|e| (self.down[e.0].len(), e.0));
        order
    }
}

fn check_size(n: usize) -> Result<(), LatticeError> {
    if n == 0 {
        Err(LatticeError::EmptyInput)
    } else if n > 64 {
        Err(LatticeError::TooLarge(n))
    } else {
        Ok(())
    }
}

/// A downward closed subset of a fixed lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DownSet(ElemSet);

impl DownSet {
    /// Validates downward closure; `None` when some lower element is missing.
    pub fn try_new(lat: &FiniteLattice, set: ElemSet) -> Option<DownSet> {
        if set.iter().all(|p| lat.downset(p).is_subset(set)) {
            Some(DownSet(set))
        } else {
            None
        }
    }

    pub fn members(self) -> ElemSet {
        self.0
    }
}

/// Least downward closed superset of `seed`.
pub fn downset_closure(lat: &FiniteLattice, seed: ElemSet) -> DownSet {
    let set = seed
        .iter()
        .fold(ElemSet::EMPTY, |acc, p| acc | lat.downset(p));
    DownSet(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> Arc<FiniteLattice> {
        FiniteLattice::chain(&["0", "U", "1"]).unwrap()
    }

    #[test]
    fn chain_has_expected_structure() {
        let lat = sierpinski();
        assert_eq!(lat.size(), 3);
        assert_eq!(lat.display(lat.bottom()), "0");
        assert_eq!(lat.display(lat.top().unwrap()), "1");
        let u = lat.by_label("U").unwrap();
        assert!(lat.leq(lat.bottom(), u));
        assert_eq!(lat.meet(u, lat.top().unwrap()), u);
        assert_eq!(lat.join(u, lat.bottom()), u);
    }

    #[test]
    fn powerset_tables_match_bit_operations() {
        let lat = FiniteLattice::powerset(&["a", "b", "c"]).unwrap();
        assert_eq!(lat.size(), 8);
        for a in 0..8usize {
            for b in 0..8usize {
                assert_eq!(lat.meet(ElementId(a), ElementId(b)), ElementId(a & b));
                assert_eq!(lat.join(ElementId(a), ElementId(b)), ElementId(a | b));
                assert_eq!(lat.leq(ElementId(a), ElementId(b)), a & b == a);
            }
        }
        assert_eq!(lat.display(ElementId(0)), "{}");
        assert_eq!(lat.display(ElementId(5)), "{a,c}");
    }

    #[test]
    fn diamond_m3_is_not_distributive() {
        let err = FiniteLattice::build(
            &["0", "x", "y", "z", "1"],
            &[
                ("0", "x"),
                ("0", "y"),
                ("0", "z"),
                ("x", "1"),
                ("y", "1"),
                ("z", "1"),
            ],
        )
        .unwrap_err();
        match err {
            LatticeError::NotDistributive { a, b, c } => {
                assert!(a != b && b != c && a != c);
            }
            other => panic!("expected NotDistributive, got {other:?}"),
        }
    }

    #[test]
    fn pentagon_n5_is_not_distributive() {
        let err = FiniteLattice::build(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "c"), ("0", "b"), ("c", "1"), ("b", "1")],
        )
        .unwrap_err();
        assert!(matches!(err, LatticeError::NotDistributive { .. }));
    }

    #[test]
    fn cycle_reported_with_class() {
        let err = FiniteLattice::build(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")])
            .unwrap_err();
        match err {
            LatticeError::Cycle { cycle } => assert_eq!(cycle.len(), 3),
            other => panic!("expected Cycle, got {other:?}"),
        }
    }

    #[test]
    fn missing_join_reported() {
        let err = FiniteLattice::build(&["0", "a", "b"], &[("0", "a"), ("0", "b")]).unwrap_err();
        assert_eq!(
            err,
            LatticeError::MissingBound {
                kind: "join",
                a: "a".into(),
                b: "b".into()
            }
        );
    }

    #[test]
    fn no_bottom_reported_with_minimal_elements() {
        let err = FiniteLattice::build(&["a", "b"], &[]).unwrap_err();
        match err {
            LatticeError::NoBottom { minimal } => assert_eq!(minimal, vec!["a", "b"]),
            other => panic!("expected NoBottom, got {other:?}"),
        }
    }

    #[test]
    fn label_errors() {
        assert_eq!(
            FiniteLattice::build(&["a", "a"], &[]).unwrap_err(),
            LatticeError::DuplicateLabel("a".into())
        );
        assert_eq!(
            FiniteLattice::build(&["a"], &[("a", "z")]).unwrap_err(),
            LatticeError::UnknownLabel("z".into())
        );
        assert_eq!(
            FiniteLattice::build(&[], &[]).unwrap_err(),
            LatticeError::EmptyInput
        );
    }

    #[test]
    fn size_cap_enforced() {
        let labels: Vec<String> = (0..65).map(|i| format!("e{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        assert_eq!(
            FiniteLattice::build(&refs, &[]).unwrap_err(),
            LatticeError::TooLarge(65)
        );
    }

    #[test]
    fn empty_join_is_bottom_empty_meet_is_top() {
        let lat = sierpinski();
        assert_eq!(lat.join_all(ElemSet::EMPTY), lat.bottom());
        assert_eq!(lat.meet_all(ElemSet::EMPTY).unwrap(), lat.top().unwrap());
        let u = lat.by_label("U").unwrap();
        let one = lat.top().unwrap();
        let s = ElemSet::singleton(u).with(one);
        assert_eq!(lat.join_all(s), one);
        assert_eq!(lat.meet_all(s).unwrap(), u);
    }

    #[test]
    fn downset_closure_closes() {
        let lat = FiniteLattice::powerset(&["a", "b"]).unwrap();
        let ab = ElementId(3);
        let closed = downset_closure(&lat, ElemSet::singleton(ab));
        assert_eq!(closed.members(), ElemSet::full(4));
        let a = ElementId(1);
        let b = ElementId(2);
        let two = downset_closure(&lat, ElemSet::singleton(a).with(b));
        assert_eq!(two.members(), ElemSet::full(4).without(ab));
        assert!(DownSet::try_new(&lat, two.members()).is_some());
        assert!(DownSet::try_new(&lat, ElemSet::singleton(ab)).is_none());
    }

    #[test]
    fn cover_pairs_of_chain() {
        let lat = sierpinski();
        let covers = lat.cover_pairs();
        assert_eq!(covers.len(), 2);
    }

    #[test]
    fn linear_extension_respects_order() {
        let lat = FiniteLattice::powerset(&["a", "b", "c"]).unwrap();
        let ext = lat.linear_extension();
        for (i, a) in ext.iter().enumerate() {
            for b in ext.iter().skip(i + 1) {
                assert!(!lat.leq(*b, *a) || a == b);
            }
        }
    }
}
