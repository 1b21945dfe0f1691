//! Finitely additive measure data on lattices: law checking, quotients by
//! the measure-equality congruence, pullback along lattice homomorphisms,
//! gluing of compatible local data, and pushforward along frame maps.

use std::sync::Arc;

use crate::frame::FrameMap;
use crate::order::{ElemSet, ElementId, FiniteLattice};
use crate::rat::Rat;

/// Errors from valuation construction and the operations in this module.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValuationError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bottom has nonzero value {0}")]
    NonzeroBottom(Rat),
    #[error("not monotone: `{p}` <= `{q}` but {vp} > {vq}")]
    NotMonotone {
        p: String,
        q: String,
        vp: Rat,
        vq: Rat,
    },
    #[error("not modular at (`{p}`, `{q}`)")]
    NotModular { p: String, q: String },
    #[error("not a lattice homomorphism: {reason} at (`{a}`, `{b}`)")]
    NotLatticeHom {
        reason: &'static str,
        a: String,
        b: String,
    },
    #[error("values disagree on the overlap at `{element}`: {left} vs {right}")]
    RestrictionMismatch {
        element: String,
        left: Rat,
        right: Rat,
    },
    #[error("value supplied outside the downset of `{root}` at `{element}`")]
    OutsideDownset { root: String, element: String },
    #[error("no value supplied for `{element}` in the downset of `{root}`")]
    MissingValue { root: String, element: String },
    #[error("operands live on different lattices")]
    MismatchedLattice,
}

/// A monotone modular measure assignment with zero bottom.
///
/// Values are exact rationals; the laws are verified at construction and
/// hold for the lifetime of the value.
#[derive(Clone, Debug)]
pub struct Valuation {
    lattice: Arc<FiniteLattice>,
    values: Vec<Rat>,
}

/// Verifies the three valuation laws and wraps the data.
///
/// Witnesses name the first offending pair in element index order.
pub fn check_valuation(
    lattice: Arc<FiniteLattice>,
    values: Vec<Rat>,
) -> Result<Valuation, ValuationError> {
    let n = lattice.size();
    if values.len() != n {
        return Err(ValuationError::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    let bot = &values[lattice.bottom().index()];
    if !bot.is_zero() {
        return Err(ValuationError::NonzeroBottom(bot.clone()));
    }
    for p in lattice.elements() {
        for q in lattice.upset(p).iter() {
            if values[p.index()] > values[q.index()] {
                return Err(ValuationError::NotMonotone {
                    p: lattice.display(p),
                    q: lattice.display(q),
                    vp: values[p.index()].clone(),
                    vq: values[q.index()].clone(),
                });
            }
        }
    }
    for p in lattice.elements() {
        for q in lattice.elements().skip(p.index() + 1) {
            let lhs = &values[p.index()] + &values[q.index()];
            let rhs = &values[lattice.join(p, q).index()] + &values[lattice.meet(p, q).index()];
            if lhs != rhs {
                return Err(ValuationError::NotModular {
                    p: lattice.display(p),
                    q: lattice.display(q),
                });
            }
        }
    }
    Ok(Valuation { lattice, values })
}

impl Valuation {
    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn value(&self, p: ElementId) -> &Rat {
        &self.values[p.index()]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Total mass, the value at the top.
    pub fn total(&self) -> &Rat {
        self.value(self.lattice.top().expect("lattices here always have a top"))
    }

    /// True when strictly comparable elements get strictly different values.
    pub fn is_faithful(&self) -> bool {
        self.faithfulness_witness().is_none()
    }

    /// First pair `p < q` with equal values, in index order.
    pub fn faithfulness_witness(&self) -> Option<(ElementId, ElementId)> {
        for p in self.lattice.elements() {
            for q in self.lattice.upset(p).iter() {
                if p != q && self.values[p.index()] == self.values[q.index()] {
                    return Some((p, q));
                }
            }
        }
        None
    }

    /// Elements of zero value, always a downward closed set.
    pub fn null_elements(&self) -> ElemSet {
        self.lattice
            .elements()
            .filter(|p| self.values[p.index()].is_zero())
            .collect()
    }
}

/// A meet- and join-preserving map between lattices, bottom to bottom.
#[derive(Clone, Debug)]
pub struct LatticeHom {
    source: Arc<FiniteLattice>,
    target: Arc<FiniteLattice>,
    table: Vec<ElementId>,
}

impl LatticeHom {
    /// Validates preservation of bottom, binary meets, and binary joins.
    pub fn new(
        source: Arc<FiniteLattice>,
        target: Arc<FiniteLattice>,
        table: Vec<ElementId>,
    ) -> Result<LatticeHom, ValuationError> {
        if table.len() != source.size() {
            return Err(ValuationError::LengthMismatch {
                expected: source.size(),
                got: table.len(),
            });
        }
        for e in &table {
            assert!(e.index() < target.size(), "map image out of range");
        }
        if table[source.bottom().index()] != target.bottom() {
            return Err(ValuationError::NotLatticeHom {
                reason: "bottom not preserved",
                a: source.display(source.bottom()),
                b: source.display(source.bottom()),
            });
        }
        for a in source.elements() {
            for b in source.elements() {
                let fm = table[source.meet(a, b).index()];
                if fm != target.meet(table[a.index()], table[b.index()]) {
                    return Err(ValuationError::NotLatticeHom {
                        reason: "meet not preserved",
                        a: source.display(a),
                        b: source.display(b),
                    });
                }
                let fj = table[source.join(a, b).index()];
                if fj != target.join(table[a.index()], table[b.index()]) {
                    return Err(ValuationError::NotLatticeHom {
                        reason: "join not preserved",
                        a: source.display(a),
                        b: source.display(b),
                    });
                }
            }
        }
        Ok(LatticeHom {
            source,
            target,
            table,
        })
    }

    pub fn source(&self) -> &Arc<FiniteLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteLattice> {
        &self.target
    }

    pub fn apply(&self, p: ElementId) -> ElementId {
        self.table[p.index()]
    }
}

/// Result of quotienting a valuation by measure equality.
#[derive(Clone, Debug)]
pub struct QuotientResult {
    pub valuation: Valuation,
    pub projection: LatticeHom,
}

/// Collapses `p ~ q` whenever the values of `p`, `q`, and their meet agree.
///
/// The result is faithful and the projection preserves values exactly.
pub fn quotient_by_congruence(v: &Valuation) -> QuotientResult {
    let lat = v.lattice();
    let n = lat.size();

    // Union-find over the generating relation; the relation is already an
    // equivalence on a distributive lattice carrying a valuation.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for p in lat.elements() {
        for q in lat.elements().skip(p.index() + 1) {
            let m = lat.meet(p, q);
            if v.value(p) == v.value(q) && v.value(p) == v.value(m) {
                let (a, b) = (find(&mut parent, p.index()), find(&mut parent, q.index()));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    // Classes are join closed, so the join of a class is its canonical
    // representative.
    let mut class_members: Vec<ElemSet> = vec![ElemSet::EMPTY; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        class_members[r].insert(ElementId(i));
    }
    let mut reps: Vec<ElementId> = Vec::new();
    let mut rep_of: Vec<usize> = vec![usize::MAX; n];
    for i in 0..n {
        if !class_members[i].is_empty() {
            let rep = lat.join_all(class_members[i]);
            debug_assert!(class_members[i].contains(rep));
            let idx = reps.len();
            reps.push(rep);
            for m in class_members[i].iter() {
                rep_of[m.index()] = idx;
            }
        }
    }

    let labels: Vec<Option<String>> = reps
        .iter()
        .map(|r| Some(format!("[{}]", lat.display(*r))))
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate() {
            // Class order: [a] <= [b] iff the meet of representatives falls
            // back into the class of a.
            if rep_of[lat.meet(*a, *b).index()] == i {
                pairs.push((i, j));
            }
        }
    }
    let qlat = FiniteLattice::from_relation(labels, &pairs)
        .expect("quotient of a distributive lattice is a distributive lattice");
    let qvals: Vec<Rat> = reps.iter().map(|r| v.value(*r).clone()).collect();
    let qv =
        check_valuation(qlat.clone(), qvals).expect("quotient values inherit the valuation laws");
    assert!(qv.is_faithful(), "quotient must separate all classes");

    let table: Vec<ElementId> = (0..n).map(|i| ElementId(rep_of[i])).collect();
    let projection = LatticeHom::new(lat.clone(), qlat, table)
        .expect("congruence projection is a lattice homomorphism");
    for p in lat.elements() {
        debug_assert_eq!(v.value(p), qv.value(projection.apply(p)));
    }
    QuotientResult {
        valuation: qv,
        projection,
    }
}

/// Composes a valuation on the target of `hom` back onto its source.
pub fn pullback_valuation(hom: &LatticeHom, v: &Valuation) -> Result<Valuation, ValuationError> {
    if !Arc::ptr_eq(hom.target(), v.lattice()) {
        return Err(ValuationError::MismatchedLattice);
    }
    let values: Vec<Rat> = hom
        .source()
        .elements()
        .map(|p| v.value(hom.apply(p)).clone())
        .collect();
    check_valuation(hom.source().clone(), values)
}

/// Measure data on the downset of a single root element.
#[derive(Clone, Debug)]
pub struct DownsetValuation {
    lattice: Arc<FiniteLattice>,
    root: ElementId,
    values: Vec<Option<Rat>>,
}

impl DownsetValuation {
    /// Validates that values cover exactly the downset of `root` and satisfy
    /// the valuation laws there. The downset is meet and join closed, so the
    /// laws make sense locally.
    pub fn new(
        lattice: Arc<FiniteLattice>,
        root: ElementId,
        values: Vec<Option<Rat>>,
    ) -> Result<DownsetValuation, ValuationError> {
        if values.len() != lattice.size() {
            return Err(ValuationError::LengthMismatch {
                expected: lattice.size(),
                got: values.len(),
            });
        }
        let dom = lattice.downset(root);
        for p in lattice.elements() {
            match (&values[p.index()], dom.contains(p)) {
                (Some(_), false) => {
                    return Err(ValuationError::OutsideDownset {
                        root: lattice.display(root),
                        element: lattice.display(p),
                    })
                }
                (None, true) => {
                    return Err(ValuationError::MissingValue {
                        root: lattice.display(root),
                        element: lattice.display(p),
                    })
                }
                _ => {}
            }
        }
        let get = |p: ElementId| values[p.index()].as_ref().unwrap();
        let bot = get(lattice.bottom());
        if !bot.is_zero() {
            return Err(ValuationError::NonzeroBottom(bot.clone()));
        }
        for p in dom.iter() {
            for q in (lattice.upset(p) & dom).iter() {
                if get(p) > get(q) {
                    return Err(ValuationError::NotMonotone {
                        p: lattice.display(p),
                        q: lattice.display(q),
                        vp: get(p).clone(),
                        vq: get(q).clone(),
                    });
                }
            }
        }
        for p in dom.iter() {
            for q in dom.iter() {
                if q.index() <= p.index() {
                    continue;
                }
                let lhs = get(p) + get(q);
                let rhs = get(lattice.join(p, q)) + get(lattice.meet(p, q));
                if lhs != rhs {
                    return Err(ValuationError::NotModular {
                        p: lattice.display(p),
                        q: lattice.display(q),
                    });
                }
            }
        }
        Ok(DownsetValuation {
            lattice,
            root,
            values,
        })
    }

    /// Restricts a global valuation to the downset of `root`.
    pub fn restrict(v: &Valuation, root: ElementId) -> DownsetValuation {
        let lat = v.lattice();
        let dom = lat.downset(root);
        let values = lat
            .elements()
            .map(|p| dom.contains(p).then(|| v.value(p).clone()))
            .collect();
        DownsetValuation {
            lattice: lat.clone(),
            root,
            values,
        }
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn root(&self) -> ElementId {
        self.root
    }

    pub fn value(&self, p: ElementId) -> Option<&Rat> {
        self.values[p.index()].as_ref()
    }
}

/// Glues two local valuations that agree on the overlap into one on the
/// downset of the join of their roots, by inclusion and exclusion.
pub fn glue_measures(
    mu: &DownsetValuation,
    mv: &DownsetValuation,
) -> Result<DownsetValuation, ValuationError> {
    if !Arc::ptr_eq(mu.lattice(), mv.lattice()) {
        return Err(ValuationError::MismatchedLattice);
    }
    let lat = mu.lattice().clone();
    let u = mu.root();
    let v = mv.root();
    let overlap = lat.meet(u, v);
    for w in lat.downset(overlap).iter() {
        let left = mu.value(w).expect("overlap lies under both roots");
        let right = mv.value(w).expect("overlap lies under both roots");
        if left != right {
            return Err(ValuationError::RestrictionMismatch {
                element: lat.display(w),
                left: left.clone(),
                right: right.clone(),
            });
        }
    }
    let root = lat.join(u, v);
    let values: Vec<Option<Rat>> = lat
        .elements()
        .map(|w| {
            if !lat.downset(root).contains(w) {
                return None;
            }
            let a = mu.value(lat.meet(w, u)).unwrap();
            let b = mv.value(lat.meet(w, v)).unwrap();
            let c = mu.value(lat.meet(lat.meet(w, u), v)).unwrap();
            // c <= a by monotonicity under u, so the subtraction is safe.
            Some(
                (a + b)
                    .checked_sub(c)
                    .expect("overlap term is bounded by the first term"),
            )
        })
        .collect();
    let glued = DownsetValuation::new(lat, root, values)?;
    for w in glued.lattice().downset(u).iter() {
        debug_assert_eq!(glued.value(w), mu.value(w));
    }
    for w in glued.lattice().downset(v).iter() {
        debug_assert_eq!(glued.value(w), mv.value(w));
    }
    Ok(glued)
}

/// Composes a valuation with a frame map table.
///
/// `m` lives on the target frame of `f`; the result assigns each source
/// element the value of its image and is again a valuation because `f`
/// preserves meets and joins.
pub fn pushforward_measure(f: &FrameMap, m: &Valuation) -> Result<Valuation, ValuationError> {
    if !Arc::ptr_eq(f.target().lattice(), m.lattice()) {
        return Err(ValuationError::MismatchedLattice);
    }
    let values: Vec<Rat> = f
        .source()
        .lattice()
        .elements()
        .map(|p| m.value(f.apply(p)).clone())
        .collect();
    check_valuation(f.source().lattice().clone(), values)
}
