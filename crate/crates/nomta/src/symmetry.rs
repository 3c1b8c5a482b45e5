//! Data symmetries, atoms and finite injections.
//!
//! Everything else in this crate is parameterized by a [`SymmetryKind`]:
//! either the equality symmetry (natural-number atoms, all bijections) or
//! the total order symmetry (rational atoms, monotone bijections). Both
//! admit least supports, which the orbit machinery relies on throughout.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed};
use thiserror::Error;

/// The two supported data symmetries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryKind {
    /// Natural-number atoms, compared by equality only; the group is every
    /// bijection of the atoms.
    Equality,
    /// Rational atoms with their order; the group is every monotone
    /// bijection of the rationals.
    TotalOrder,
}

impl SymmetryKind {
    pub fn name(self) -> &'static str {
        match self {
            SymmetryKind::Equality => "equality",
            SymmetryKind::TotalOrder => "total-order",
        }
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryKind {
    type Err = SymmetryError;

    fn from_str(s: &str) -> Result<Self, SymmetryError> {
        match s {
            "equality" => Ok(SymmetryKind::Equality),
            "total-order" => Ok(SymmetryKind::TotalOrder),
            other => Err(SymmetryError::UnknownSymmetry(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("unknown symmetry `{0}` (expected `equality` or `total-order`)")]
    UnknownSymmetry(String),
    #[error("map is not injective: both {0} and {1} map to {2}")]
    NotInjective(Atom, Atom, Atom),
    #[error("atom {0} is not defined under the injection")]
    Undefined(Atom),
    #[error("injection does not extend to a permutation of the {0} symmetry")]
    NotInGroup(SymmetryKind),
    #[error("invalid atom literal `{0}`")]
    BadAtom(String),
}

/// A data value. Stored exactly: naturals for the equality symmetry,
/// rationals (numerator/denominator) for the total order symmetry.
/// Floating point is never used; orbit identity depends on exact
/// equality and order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Ratio<i64>);

impl Atom {
    pub fn nat(n: u64) -> Atom {
        Atom(Ratio::from_integer(n as i64))
    }

    pub fn int(n: i64) -> Atom {
        Atom(Ratio::from_integer(n))
    }

    pub fn rational(num: i64, den: i64) -> Atom {
        Atom(Ratio::new(num, den))
    }

    pub fn is_natural(self) -> bool {
        self.0.is_integer() && !self.0.is_negative()
    }

    /// Exact midpoint, used to place fresh rationals inside order gaps.
    pub fn midpoint(self, other: Atom) -> Atom {
        Atom((self.0 + other.0) / Ratio::from_integer(2))
    }

    pub fn succ(self) -> Atom {
        Atom(self.0 + Ratio::one())
    }

    pub fn pred(self) -> Atom {
        Atom(self.0 - Ratio::one())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Atom {
    type Err = SymmetryError;

    fn from_str(s: &str) -> Result<Self, SymmetryError> {
        let bad = || SymmetryError::BadAtom(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Atom::rational(num, den))
        } else {
            let n: i64 = s.trim().parse().map_err(|_| bad())?;
            Ok(Atom::int(n))
        }
    }
}

/// A finite, duplicate-free, sorted set of atoms. Houses supports.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct AtomSet(BTreeSet<Atom>);

impl AtomSet {
    pub fn new() -> AtomSet {
        AtomSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: Atom) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: Atom) -> bool {
        self.0.remove(&a)
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.union(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Atoms in ascending order.
    pub fn sorted(&self) -> Vec<Atom> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> AtomSet {
        AtomSet(iter.into_iter().collect())
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// A finite injective map between atoms.
///
/// Composition follows diagrammatic order throughout the crate:
/// `f.compose(&g)` is the map `x -> g(f(x))`, restricted to the atoms
/// where both steps are defined.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct FinInjection(BTreeMap<Atom, Atom>);

impl FinInjection {
    pub fn new(pairs: impl IntoIterator<Item = (Atom, Atom)>) -> Result<FinInjection, SymmetryError> {
        let mut map = BTreeMap::new();
        let mut seen: BTreeMap<Atom, Atom> = BTreeMap::new();
        for (k, v) in pairs {
            if let Some(prev) = seen.get(&v) {
                if *prev != k {
                    return Err(SymmetryError::NotInjective(*prev, k, v));
                }
            }
            seen.insert(v, k);
            map.insert(k, v);
        }
        Ok(FinInjection(map))
    }

    pub fn identity(on: &AtomSet) -> FinInjection {
        FinInjection(on.iter().map(|a| (a, a)).collect())
    }

    pub fn empty() -> FinInjection {
        FinInjection::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, a: Atom) -> Option<Atom> {
        self.0.get(&a).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Atom, Atom)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn domain(&self) -> AtomSet {
        self.0.keys().copied().collect()
    }

    pub fn image(&self) -> AtomSet {
        self.0.values().copied().collect()
    }

    /// Diagrammatic composition: `x -> g(f(x))` on `{x | f(x) in dom(g)}`.
    pub fn compose(&self, g: &FinInjection) -> FinInjection {
        FinInjection(
            self.0
                .iter()
                .filter_map(|(k, v)| g.apply(*v).map(|w| (*k, w)))
                .collect(),
        )
    }

    pub fn invert(&self) -> FinInjection {
        FinInjection(self.0.iter().map(|(k, v)| (*v, *k)).collect())
    }

    /// Whether the injection extends to a permutation of the symmetry's
    /// group: always for equality, exactly the strictly order-preserving
    /// maps for total order.
    pub fn extends_to_g(&self, kind: SymmetryKind) -> bool {
        match kind {
            SymmetryKind::Equality => true,
            // Domain iterates in ascending order, so the images must
            // ascend as well.
            SymmetryKind::TotalOrder => {
                let mut prev: Option<Atom> = None;
                for v in self.0.values() {
                    if let Some(p) = prev {
                        if *v <= p {
                            return false;
                        }
                    }
                    prev = Some(*v);
                }
                true
            }
        }
    }

    /// Extend this injection so it is defined on every atom in `needed`,
    /// choosing images deterministically: smallest unused naturals for
    /// equality; for total order, a fresh rational inside the order gap
    /// the new atom occupies relative to the existing domain.
    pub fn extend_to(&self, needed: &AtomSet, kind: SymmetryKind) -> FinInjection {
        let mut map = self.0.clone();
        let mut used: BTreeSet<Atom> = map.values().copied().collect();
        let missing: Vec<Atom> = needed.iter().filter(|a| !map.contains_key(a)).collect();
        match kind {
            SymmetryKind::Equality => {
                let mut next = 0u64;
                for a in missing {
                    let mut img = Atom::nat(next);
                    while used.contains(&img) {
                        next += 1;
                        img = Atom::nat(next);
                    }
                    used.insert(img);
                    map.insert(a, img);
                }
            }
            SymmetryKind::TotalOrder => {
                // Insert one atom at a time so later placements see the
                // earlier ones; ordering by value keeps it deterministic.
                for a in missing {
                    let below = map
                        .iter()
                        .filter(|(k, _)| **k < a)
                        .map(|(_, v)| *v)
                        .max();
                    let above = map
                        .iter()
                        .filter(|(k, _)| **k > a)
                        .map(|(_, v)| *v)
                        .min();
                    let img = fresh_in_gap(below, above, &used);
                    used.insert(img);
                    map.insert(a, img);
                }
            }
        }
        FinInjection(map)
    }
}

/// A deterministic fresh rational strictly inside the gap `(below, above)`
/// avoiding `used`, where either bound may be absent.
pub fn fresh_in_gap(below: Option<Atom>, above: Option<Atom>, used: &BTreeSet<Atom>) -> Atom {
    let mut candidate = match (below, above) {
        (None, None) => Atom::nat(0),
        (Some(b), None) => b.succ(),
        (None, Some(a)) => a.pred(),
        (Some(b), Some(a)) => b.midpoint(a),
    };
    while used.contains(&candidate) {
        candidate = match (below, above) {
            (Some(_), None) | (None, None) => candidate.succ(),
            (None, Some(_)) => candidate.pred(),
            (Some(b), Some(_)) => b.midpoint(candidate),
        };
    }
    candidate
}

impl fmt::Display for FinInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        write!(f, "}}")
    }
}

/// `n` atoms disjoint from `avoid`, deterministically the smallest
/// admissible values.
pub fn fresh_atoms(n: usize, avoid: &AtomSet, kind: SymmetryKind) -> AtomSet {
    let mut out = AtomSet::new();
    match kind {
        SymmetryKind::Equality | SymmetryKind::TotalOrder => {
            let mut next = 0u64;
            while out.len() < n {
                let a = Atom::nat(next);
                if !avoid.contains(a) {
                    out.insert(a);
                }
                next += 1;
            }
        }
    }
    out
}

/// The canonical support of degree `k`: atoms `0, 1, ..., k-1`.
pub fn canonical_support(k: usize) -> Vec<Atom> {
    (0..k as u64).map(Atom::nat).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn inj(pairs: &[(i64, i64)]) -> FinInjection {
        FinInjection::new(pairs.iter().map(|&(a, b)| (Atom::int(a), Atom::int(b)))).unwrap()
    }

    #[test]
    fn extends_to_g_examples() {
        // Any injection extends in the equality symmetry.
        let f = inj(&[(1, 8), (5, 1), (6, 3)]);
        assert!(f.extends_to_g(SymmetryKind::Equality));

        // Order reversed: no monotone extension.
        let g = inj(&[(0, 5), (1, 3)]);
        assert!(!g.extends_to_g(SymmetryKind::TotalOrder));

        // Monotone injections between finite rational sets always extend.
        let h = FinInjection::new([
            (Atom::int(0), Atom::int(-1)),
            (Atom::int(1), Atom::rational(1, 2)),
        ])
        .unwrap();
        assert!(h.extends_to_g(SymmetryKind::TotalOrder));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(inj(&[(0, 1)]).compose(&inj(&[(1, 2)])), inj(&[(0, 2)]));
        let id = inj(&[(0, 0), (1, 1)]);
        let g = inj(&[(0, 3), (1, 4)]);
        assert_eq!(id.compose(&g), g);
        // Disjoint domains compose to the empty injection.
        assert_eq!(inj(&[(0, 5)]).compose(&inj(&[(7, 9)])), FinInjection::empty());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(inj(&[(0, 3), (1, 7)]).invert(), inj(&[(3, 0), (7, 1)]));
        assert_eq!(FinInjection::empty().invert(), FinInjection::empty());
    }

    #[test]
    fn fresh_atoms_examples() {
        let avoid: AtomSet = [Atom::nat(0), Atom::nat(1)].into_iter().collect();
        let got = fresh_atoms(2, &avoid, SymmetryKind::Equality);
        assert_eq!(got.sorted(), vec![Atom::nat(2), Atom::nat(3)]);

        assert!(fresh_atoms(0, &avoid, SymmetryKind::Equality).is_empty());

        let avoid: AtomSet = (0..10).map(Atom::nat).collect();
        let got = fresh_atoms(1, &avoid, SymmetryKind::Equality);
        assert_eq!(got.sorted(), vec![Atom::nat(10)]);
    }

    #[test]
    fn canonical_support_examples() {
        assert!(canonical_support(0).is_empty());
        assert_eq!(canonical_support(1), vec![Atom::nat(0)]);
        assert_eq!(
            canonical_support(3),
            vec![Atom::nat(0), Atom::nat(1), Atom::nat(2)]
        );
    }

    #[test]
    fn not_injective_rejected() {
        let err = FinInjection::new([
            (Atom::int(0), Atom::int(1)),
            (Atom::int(2), Atom::int(1)),
        ])
        .unwrap_err();
        assert!(matches!(err, SymmetryError::NotInjective(..)));
    }

    #[test]
    fn atom_parse_roundtrip() {
        for s in ["0", "17", "-3", "2/3", "-5/7"] {
            let a: Atom = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("1/0".parse::<Atom>().is_err());
        assert!("abc".parse::<Atom>().is_err());
    }

    /// Group laws for permutations of a common finite support, by brute
    /// force over all permutations of supports of size <= 4.
    #[test]
    fn group_laws_small_supports() {
        for n in 0..=4usize {
            let support: Vec<Atom> = canonical_support(n);
            let set: AtomSet = support.iter().copied().collect();
            let perms: Vec<FinInjection> = support
                .iter()
                .copied()
                .permutations(n)
                .map(|img| {
                    FinInjection::new(support.iter().copied().zip(img)).unwrap()
                })
                .collect();
            let id = FinInjection::identity(&set);
            for p in &perms {
                assert_eq!(p.compose(&id), *p);
                assert_eq!(id.compose(p), *p);
                assert_eq!(p.compose(&p.invert()), id);
                for q in &perms {
                    for r in &perms {
                        assert_eq!(
                            p.compose(q).compose(r),
                            p.compose(&q.compose(r))
                        );
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn invert_is_involution(pairs in proptest::collection::btree_map(0i64..40, 0i64..40, 0..6)) {
            // Deduplicate values to keep the map injective.
            let mut seen = std::collections::BTreeSet::new();
            let pairs: Vec<(Atom, Atom)> = pairs
                .into_iter()
                .filter(|(_, v)| seen.insert(*v))
                .map(|(k, v)| (Atom::int(k), Atom::int(v)))
                .collect();
            let f = FinInjection::new(pairs).unwrap();
            prop_assert_eq!(f.invert().invert(), f);
        }

        #[test]
        fn extends_closed_under_compose_and_invert(
            a in proptest::collection::btree_set(0i64..20, 0..5),
            b in proptest::collection::btree_set(0i64..20, 0..5),
        ) {
            // Build monotone injections from the sorted sets; monotone maps
            // stay monotone under composition and inversion.
            let f = FinInjection::new(
                a.iter().enumerate().map(|(i, v)| (Atom::int(i as i64), Atom::int(*v))),
            ).unwrap();
            let g = FinInjection::new(
                b.iter().enumerate().map(|(i, v)| (Atom::int(*v), Atom::int(i as i64 + 100))),
            ).unwrap();
            for kind in [SymmetryKind::Equality, SymmetryKind::TotalOrder] {
                if f.extends_to_g(kind) && g.extends_to_g(kind) {
                    prop_assert!(f.compose(&g).extends_to_g(kind));
                    prop_assert!(f.invert().extends_to_g(kind));
                }
            }
        }

        #[test]
        fn fresh_atoms_disjoint(n in 0usize..=8, avoid in proptest::collection::btree_set(0u64..30, 0..10)) {
            let avoid: AtomSet = avoid.into_iter().map(Atom::nat).collect();
            for kind in [SymmetryKind::Equality, SymmetryKind::TotalOrder] {
                let got = fresh_atoms(n, &avoid, kind);
                prop_assert_eq!(got.len(), n);
                prop_assert!(got.is_disjoint(&avoid));
            }
        }
    }
}
