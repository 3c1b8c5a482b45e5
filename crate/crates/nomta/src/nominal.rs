//! Orbit-finite nominal sets via support representations.
//!
//! A single orbit is represented as a canonical support `{0..k-1}` together
//! with a local symmetry group on it; an element is an injection from the
//! canonical support into the atoms, stored in a canonical form so that
//! element equality and cache keys are structural. Local symmetries store
//! their full member list: supports here are tiny, and full lists make the
//! `uS ⊆ Tu` and `uS = Tu` checks exact by direct enumeration.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::symmetry::{
    canonical_support, Atom, AtomSet, FinInjection, SymmetryError, SymmetryKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NominalError {
    #[error("{0}")]
    Symmetry(#[from] SymmetryError),
    #[error("sym block of `{orbit}` is not a permutation group: {reason}")]
    NotAGroup { orbit: String, reason: String },
    #[error("witness has {got} atoms but orbit `{orbit}` has degree {want}")]
    DegreeMismatch { orbit: String, got: usize, want: usize },
    #[error("witness for orbit `{orbit}` does not extend to a permutation of the {kind} symmetry")]
    WitnessNotInGroup { orbit: String, kind: SymmetryKind },
    #[error("injection violates uS ⊆ Tu between `{domain}` and `{target}` (member {member})")]
    UsNotInTu { domain: String, target: String, member: String },
    #[error("no map entry for orbit `{0}`")]
    NoEntry(String),
    #[error("map entry injection must be from the target support into the domain support")]
    BadEntry,
    #[error("action is undefined on atom {0}")]
    ActionUndefined(Atom),
    #[error("action does not extend to a permutation of the {0} symmetry")]
    ActionNotInGroup(SymmetryKind),
}

/// A permutation of `{0..deg-1}` as its image tuple.
pub type Perm = Vec<usize>;

pub fn perm_identity(deg: usize) -> Perm {
    (0..deg).collect()
}

/// Diagrammatic composition: `(pq)(i) = q(p(i))`.
pub fn perm_compose(p: &Perm, q: &Perm) -> Perm {
    p.iter().map(|&i| q[i]).collect()
}

pub fn perm_invert(p: &Perm) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

pub fn all_perms(deg: usize) -> Vec<Perm> {
    (0..deg).permutations(deg).collect()
}

/// A permutation group on the canonical support `{0..degree-1}`, stored as
/// its full member list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalSymmetry {
    degree: usize,
    members: Vec<Perm>,
}

impl LocalSymmetry {
    /// Validates that `members` forms a group whose members all extend to
    /// the symmetry group. For the total order symmetry only the identity
    /// extends, so any nontrivial member is rejected.
    pub fn new(
        degree: usize,
        members: impl IntoIterator<Item = Perm>,
        kind: SymmetryKind,
        orbit: &str,
    ) -> Result<LocalSymmetry, NominalError> {
        let mut set: BTreeSet<Perm> = members.into_iter().collect();
        set.insert(perm_identity(degree));
        let group = |reason: &str| NominalError::NotAGroup {
            orbit: orbit.to_string(),
            reason: reason.to_string(),
        };
        for m in &set {
            if m.len() != degree {
                return Err(group(&format!("member {m:?} has wrong length")));
            }
            let mut seen = vec![false; degree];
            for &v in m {
                if v >= degree || seen[v] {
                    return Err(group(&format!("member {m:?} is not a permutation")));
                }
                seen[v] = true;
            }
            if kind == SymmetryKind::TotalOrder && *m != perm_identity(degree) {
                return Err(group(&format!(
                    "member {m:?} does not extend to a monotone bijection"
                )));
            }
        }
        for m in &set {
            if !set.contains(&perm_invert(m)) {
                return Err(group(&format!("missing inverse of {m:?}")));
            }
            for n in &set {
                if !set.contains(&perm_compose(m, n)) {
                    return Err(group(&format!("not closed under composition ({m:?};{n:?})")));
                }
            }
        }
        Ok(LocalSymmetry {
            degree,
            members: set.into_iter().collect(),
        })
    }

    /// Internal constructor for member sets already known to be groups
    /// (stabilizers computed by exhaustive search).
    pub(crate) fn from_group(degree: usize, members: BTreeSet<Perm>) -> LocalSymmetry {
        debug_assert!(members.contains(&perm_identity(degree)));
        LocalSymmetry {
            degree,
            members: members.into_iter().collect(),
        }
    }

    pub fn trivial(degree: usize) -> LocalSymmetry {
        LocalSymmetry {
            degree,
            members: vec![perm_identity(degree)],
        }
    }

    pub fn full(degree: usize) -> LocalSymmetry {
        LocalSymmetry {
            degree,
            members: all_perms(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn members(&self) -> &[Perm] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.members.binary_search(p).is_ok()
    }
}

/// All subgroups of `Sym(degree)`, by closure testing over subsets.
/// Only sensible for the tiny degrees this crate works with.
pub fn all_subgroups(degree: usize) -> Vec<LocalSymmetry> {
    let perms = all_perms(degree);
    let id = perm_identity(degree);
    let non_id: Vec<Perm> = perms.into_iter().filter(|p| *p != id).collect();
    let mut out = Vec::new();
    for mask in 0..(1u32 << non_id.len()) {
        let mut set: BTreeSet<Perm> = BTreeSet::new();
        set.insert(id.clone());
        for (i, p) in non_id.iter().enumerate() {
            if mask & (1 << i) != 0 {
                set.insert(p.clone());
            }
        }
        let closed = set.iter().all(|m| {
            set.contains(&perm_invert(m)) && set.iter().all(|n| set.contains(&perm_compose(m, n)))
        });
        if closed {
            out.push(LocalSymmetry::from_group(degree, set));
        }
    }
    out
}

/// A single-orbit nominal set: canonical support `{0..degree-1}` plus a
/// local symmetry on it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitSpec {
    pub name: String,
    pub degree: usize,
    pub sym: LocalSymmetry,
}

pub type OrbitRef = Arc<OrbitSpec>;

impl OrbitSpec {
    pub fn new(name: impl Into<String>, degree: usize, sym: LocalSymmetry) -> OrbitRef {
        assert_eq!(sym.degree(), degree, "local symmetry degree mismatch");
        Arc::new(OrbitSpec {
            name: name.into(),
            degree,
            sym,
        })
    }

    pub fn trivial(name: impl Into<String>, degree: usize) -> OrbitRef {
        OrbitSpec::new(name, degree, LocalSymmetry::trivial(degree))
    }
}

impl fmt::Display for OrbitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "orbit {} degree {} sym {{", self.name, self.degree)?;
        let mut first = true;
        for m in self.sym.members() {
            if *m == perm_identity(self.degree) {
                continue;
            }
            if !first {
                write!(f, " ;")?;
            }
            first = false;
            for v in m {
                write!(f, " {v}")?;
            }
        }
        write!(f, " }}")
    }
}

/// A point of a single-orbit nominal set: the S-class of an injection from
/// the canonical support into the atoms, stored canonically as the S-least
/// image tuple. The element's least support is exactly the witness image.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    orbit: OrbitRef,
    witness: Vec<Atom>,
}

impl Element {
    pub fn new(orbit: &OrbitRef, witness: Vec<Atom>, kind: SymmetryKind) -> Result<Element, NominalError> {
        if witness.len() != orbit.degree {
            return Err(NominalError::DegreeMismatch {
                orbit: orbit.name.clone(),
                got: witness.len(),
                want: orbit.degree,
            });
        }
        let mut seen = BTreeSet::new();
        for &a in &witness {
            if !seen.insert(a) {
                return Err(NominalError::Symmetry(SymmetryError::NotInjective(a, a, a)));
            }
        }
        let as_inj = FinInjection::new(
            canonical_support(orbit.degree).into_iter().zip(witness.iter().copied()),
        )?;
        if !as_inj.extends_to_g(kind) {
            return Err(NominalError::WitnessNotInGroup {
                orbit: orbit.name.clone(),
                kind,
            });
        }
        Ok(Element {
            orbit: orbit.clone(),
            witness: canonical_witness(&orbit.sym, witness),
        })
    }

    pub fn orbit(&self) -> &OrbitRef {
        &self.orbit
    }

    pub fn degree(&self) -> usize {
        self.orbit.degree
    }

    pub fn witness(&self) -> &[Atom] {
        &self.witness
    }

    /// The least support: the image of the witness.
    pub fn least_support(&self) -> AtomSet {
        self.witness.iter().copied().collect()
    }

    /// The group action `[u]_S · π = [uπ]_S`. `π` must be injective,
    /// defined on the least support, and extend to the symmetry group.
    pub fn act(&self, pi: &FinInjection, kind: SymmetryKind) -> Result<Element, NominalError> {
        if !pi.extends_to_g(kind) {
            return Err(NominalError::ActionNotInGroup(kind));
        }
        let witness = self
            .witness
            .iter()
            .map(|&a| pi.apply(a).ok_or(NominalError::ActionUndefined(a)))
            .collect::<Result<Vec<_>, _>>()?;
        Element::new(&self.orbit, witness, kind)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.orbit.name)?;
        if self.orbit.degree > 0 {
            write!(f, "[")?;
            for (i, a) in self.witness.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// The S-least representative of `{w∘τ | τ ∈ S}`, read as image tuples.
fn canonical_witness(sym: &LocalSymmetry, witness: Vec<Atom>) -> Vec<Atom> {
    sym.members()
        .iter()
        .map(|tau| tau.iter().map(|&i| witness[i]).collect::<Vec<_>>())
        .min()
        .unwrap_or(witness)
}

/// An orbit-finite nominal set: a finite list of named orbits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrbitFiniteSet {
    orbits: Vec<OrbitRef>,
}

impl OrbitFiniteSet {
    pub fn new(orbits: Vec<OrbitRef>) -> OrbitFiniteSet {
        let mut names = BTreeSet::new();
        for o in &orbits {
            assert!(names.insert(o.name.clone()), "duplicate orbit name {}", o.name);
        }
        OrbitFiniteSet { orbits }
    }

    pub fn orbits(&self) -> &[OrbitRef] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn by_name(&self, name: &str) -> Option<&OrbitRef> {
        self.orbits.iter().find(|o| o.name == name)
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.orbits.iter().any(|o| **o == **e.orbit())
    }

    pub fn measure(&self) -> OrbitMeasure {
        OrbitMeasure::new(self.orbits.iter().map(|o| (o.degree, o.sym.len())))
    }

    pub fn max_degree(&self) -> usize {
        self.orbits.iter().map(|o| o.degree).max().unwrap_or(0)
    }
}

/// All injections from the canonical support of `spec` into `atoms` that
/// extend to the symmetry group, i.e. every element of the orbit whose
/// least support lies inside `atoms`, without duplicates.
pub fn enumerate_orbit_elements(spec: &OrbitRef, atoms: &AtomSet, kind: SymmetryKind) -> Vec<Element> {
    let pool = atoms.sorted();
    let deg = spec.degree;
    if deg > pool.len() {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    match kind {
        SymmetryKind::Equality => {
            for img in pool.iter().copied().permutations(deg) {
                out.insert(Element::new(spec, img, kind).expect("valid witness"));
            }
        }
        SymmetryKind::TotalOrder => {
            for img in pool.iter().copied().combinations(deg) {
                // Combinations come out sorted, hence monotone.
                out.insert(Element::new(spec, img, kind).expect("valid witness"));
            }
        }
    }
    out.into_iter().collect()
}

/// All elements of an orbit-finite set with least support inside `atoms`.
pub fn enumerate_elements(set: &OrbitFiniteSet, atoms: &AtomSet, kind: SymmetryKind) -> Vec<Element> {
    set.orbits()
        .iter()
        .flat_map(|o| enumerate_orbit_elements(o, atoms, kind))
        .collect()
}

/// All bijections between two equal-sized atom sets that extend to the
/// symmetry group: every bijection for equality, only the monotone one for
/// total order.
pub fn admissible_bijections(from: &AtomSet, to: &AtomSet, kind: SymmetryKind) -> Vec<FinInjection> {
    if from.len() != to.len() {
        return Vec::new();
    }
    let dom = from.sorted();
    match kind {
        SymmetryKind::Equality => to
            .sorted()
            .into_iter()
            .permutations(dom.len())
            .map(|img| FinInjection::new(dom.iter().copied().zip(img)).expect("bijection"))
            .collect(),
        SymmetryKind::TotalOrder => {
            vec![FinInjection::new(dom.iter().copied().zip(to.sorted())).expect("bijection")]
        }
    }
}

/// An equivariant function between orbit-finite sets, one injection entry
/// per domain orbit, validated at construction to satisfy `uS ⊆ Tu`.
#[derive(Debug, Clone)]
pub struct EquivariantMap {
    entries: Vec<MapEntry>,
}

#[derive(Debug, Clone)]
struct MapEntry {
    domain: OrbitRef,
    target: OrbitRef,
    /// `u[i]` is the canonical-support index in the domain that target
    /// index `i` maps to.
    u: Vec<usize>,
}

/// Checks `uS ⊆ Tu` by enumerating both sides: for every `s ∈ S` there must
/// be `t ∈ T` with `us = tu` (diagrammatic composition).
pub fn us_subset_tu(u: &[usize], s: &LocalSymmetry, t: &LocalSymmetry) -> Result<(), Perm> {
    for m in s.members() {
        let us: Vec<usize> = u.iter().map(|&i| m[i]).collect();
        let found = t
            .members()
            .iter()
            .any(|n| n.iter().map(|&j| u[j]).collect::<Vec<_>>() == us);
        if !found {
            return Err(m.clone());
        }
    }
    Ok(())
}

/// `uS = Tu`, both containments by enumeration.
fn us_equals_tu(u: &[usize], s: &LocalSymmetry, t: &LocalSymmetry) -> bool {
    let us: BTreeSet<Vec<usize>> = s
        .members()
        .iter()
        .map(|m| u.iter().map(|&i| m[i]).collect())
        .collect();
    let tu: BTreeSet<Vec<usize>> = t
        .members()
        .iter()
        .map(|n| n.iter().map(|&j| u[j]).collect())
        .collect();
    us == tu
}

impl EquivariantMap {
    /// Builds a map from `(domain, target, u)` entries where `u` is an
    /// injection from the target's canonical support into the domain's.
    pub fn new(
        entries: impl IntoIterator<Item = (OrbitRef, OrbitRef, FinInjection)>,
        kind: SymmetryKind,
    ) -> Result<EquivariantMap, NominalError> {
        let mut out = Vec::new();
        for (domain, target, u) in entries {
            if !u.extends_to_g(kind) {
                return Err(NominalError::ActionNotInGroup(kind));
            }
            let dom_support: AtomSet = canonical_support(domain.degree).into_iter().collect();
            let mut u_idx = Vec::with_capacity(target.degree);
            for a in canonical_support(target.degree) {
                let img = u.apply(a).ok_or(NominalError::BadEntry)?;
                if !dom_support.contains(img) {
                    return Err(NominalError::BadEntry);
                }
                u_idx.push(canonical_support(domain.degree).iter().position(|&c| c == img).unwrap());
            }
            if u.len() != target.degree {
                return Err(NominalError::BadEntry);
            }
            if let Err(member) = us_subset_tu(&u_idx, &domain.sym, &target.sym) {
                return Err(NominalError::UsNotInTu {
                    domain: domain.name.clone(),
                    target: target.name.clone(),
                    member: format!("{member:?}"),
                });
            }
            out.push(MapEntry {
                domain,
                target,
                u: u_idx,
            });
        }
        Ok(EquivariantMap { entries: out })
    }

    pub(crate) fn from_indices(
        entries: Vec<(OrbitRef, OrbitRef, Vec<usize>)>,
    ) -> Result<EquivariantMap, NominalError> {
        let mut out = Vec::new();
        for (domain, target, u) in entries {
            if let Err(member) = us_subset_tu(&u, &domain.sym, &target.sym) {
                return Err(NominalError::UsNotInTu {
                    domain: domain.name.clone(),
                    target: target.name.clone(),
                    member: format!("{member:?}"),
                });
            }
            out.push(MapEntry { domain, target, u });
        }
        Ok(EquivariantMap { entries: out })
    }

    /// Applies the map: the target witness is the composition of the entry
    /// injection with the element's witness.
    pub fn apply(&self, x: &Element, kind: SymmetryKind) -> Result<Element, NominalError> {
        let entry = self
            .entries
            .iter()
            .find(|e| *e.domain == **x.orbit())
            .ok_or_else(|| NominalError::NoEntry(x.orbit().name.clone()))?;
        let witness = entry.u.iter().map(|&i| x.witness()[i]).collect();
        Element::new(&entry.target, witness, kind)
    }

    pub fn target_of(&self, domain: &OrbitRef) -> Option<&OrbitRef> {
        self.entries
            .iter()
            .find(|e| *e.domain == **domain)
            .map(|e| &e.target)
    }
}

/// A witnessing bijection for orbit isomorphism (`uS = Tu`), searched by
/// brute force over all admissible bijections of the canonical supports.
/// The smallest witness in image-tuple order is returned.
pub fn orbits_isomorphic(x: &OrbitRef, y: &OrbitRef, kind: SymmetryKind) -> Option<FinInjection> {
    if x.degree != y.degree {
        return None;
    }
    let deg = x.degree;
    let candidates: Vec<Perm> = match kind {
        SymmetryKind::Equality => all_perms(deg),
        SymmetryKind::TotalOrder => vec![perm_identity(deg)],
    };
    candidates
        .into_iter()
        .filter(|u| us_equals_tu(u, &x.sym, &y.sym))
        .map(|u| {
            FinInjection::new(
                canonical_support(deg)
                    .into_iter()
                    .zip(u.iter().map(|&i| Atom::nat(i as u64))),
            )
            .expect("bijection")
        })
        .next()
}

/// A witnessing injection for `Y ⪯ X` on single orbits: `u` from Y's
/// canonical support into X's with `uS ⊆ Tu`, extending to the group.
pub fn orbit_leq(y: &OrbitRef, x: &OrbitRef, kind: SymmetryKind) -> Option<FinInjection> {
    if y.degree > x.degree {
        return None;
    }
    let injections: Vec<Vec<usize>> = match kind {
        SymmetryKind::Equality => (0..x.degree).permutations(y.degree).collect(),
        SymmetryKind::TotalOrder => (0..x.degree).combinations(y.degree).collect(),
    };
    injections
        .into_iter()
        .filter(|u| us_subset_tu(u, &x.sym, &y.sym).is_ok())
        .map(|u| {
            FinInjection::new(
                canonical_support(y.degree)
                    .into_iter()
                    .zip(u.iter().map(|&i| Atom::nat(i as u64))),
            )
            .expect("injection")
        })
        .next()
}

/// Result of comparing two orbit-finite sets under the `⪯` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOrder {
    Isomorphic,
    StrictlyBelow,
    AboveOrIncomparable,
}

/// Searches for an injective assignment from `ys` into `xs` along `edge`.
fn saturating_matching<T, U>(ys: &[T], xs: &[U], edge: impl Fn(&T, &U) -> bool) -> Option<Vec<usize>> {
    fn assign<T, U>(
        i: usize,
        ys: &[T],
        xs: &[U],
        edge: &impl Fn(&T, &U) -> bool,
        taken: &mut Vec<Option<usize>>,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if i == ys.len() {
            return true;
        }
        for j in 0..xs.len() {
            if taken[j].is_none() && edge(&ys[i], &xs[j]) {
                taken[j] = Some(i);
                chosen.push(j);
                if assign(i + 1, ys, xs, edge, taken, chosen) {
                    return true;
                }
                chosen.pop();
                taken[j] = None;
            }
        }
        false
    }
    let mut taken = vec![None; xs.len()];
    let mut chosen = Vec::new();
    if assign(0, ys, xs, &edge, &mut taken, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

/// Compares `Y` against `X`: isomorphic when the orbits pair off under the
/// isomorphism test; strictly below when an equivariant surjection from a
/// sub-union of X's orbits onto Y exists (built orbit-wise from `orbit_leq`
/// witnesses) and the sets are not isomorphic.
pub fn set_compare(y: &OrbitFiniteSet, x: &OrbitFiniteSet, kind: SymmetryKind) -> SetOrder {
    let ys = y.orbits();
    let xs = x.orbits();
    if ys.len() == xs.len()
        && saturating_matching(ys, xs, |a, b| orbits_isomorphic(a, b, kind).is_some()).is_some()
    {
        return SetOrder::Isomorphic;
    }
    if saturating_matching(ys, xs, |a, b| orbit_leq(a, b, kind).is_some()).is_some() {
        return SetOrder::StrictlyBelow;
    }
    SetOrder::AboveOrIncomparable
}

/// A read-only multiset summary of an orbit-finite set: one
/// `(degree, |sym|)` pair per orbit. Used only for strict-growth
/// assertions along the learner's extension chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMeasure {
    pairs: Vec<(usize, usize)>,
}

impl OrbitMeasure {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> OrbitMeasure {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort();
        OrbitMeasure { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn orbit_count(&self) -> usize {
        self.pairs.len()
    }

    /// Strict growth along the learner's chain: an injective matching of
    /// the old orbits into the new ones where each matched orbit weakly
    /// refines (degree grows, or degree equal and the new symmetry size
    /// divides the old), and the multisets differ. This mirrors the two
    /// lemma-shaped events: a new orbit appears, or an orbit refines.
    pub fn strictly_grows_to(&self, new: &OrbitMeasure) -> bool {
        if self.pairs == new.pairs {
            return false;
        }
        let refines = |old: &(usize, usize), new: &(usize, usize)| {
            new.0 > old.0 || (new.0 == old.0 && new.1 != 0 && old.1 % new.1 == 0)
        };
        saturating_matching(&self.pairs, &new.pairs, refines).is_some()
    }
}

impl fmt::Display for OrbitMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (d, s)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({d},{s})")?;
        }
        write!(f, "]")
    }
}

/// Encoding of an element usable as a deterministic ordering key.
pub type ElementKey = (String, Vec<Atom>);

pub fn element_key(e: &Element) -> ElementKey {
    (e.orbit().name.clone(), e.witness().to_vec())
}

/// A tuple of elements in canonical atom form, together with its joint
/// support structure: the tuple orbit of the original elements.
#[derive(Debug, Clone)]
pub struct CanonTuple {
    /// The canonical representative; its joint support is `{0..degree-1}`.
    pub rep: Vec<Element>,
    /// Relabelling from the original joint support onto the canonical one.
    pub relabel: FinInjection,
    /// Admissible bijections of the canonical support fixing the tuple.
    pub stabilizer: LocalSymmetry,
    pub degree: usize,
}

impl CanonTuple {
    pub fn key(&self) -> Vec<ElementKey> {
        self.rep.iter().map(element_key).collect()
    }
}

/// Canonicalizes a tuple of elements: relabel the joint support onto
/// `{0..p-1}` by the admissible bijection minimizing the element encoding,
/// then compute the stabilizer by exhaustive search over admissible
/// bijections of the canonical support.
pub fn canonicalize_tuple(elems: &[Element], kind: SymmetryKind) -> CanonTuple {
    let mut support = AtomSet::new();
    for e in elems {
        for &a in e.witness() {
            support.insert(a);
        }
    }
    let p = support.len();
    let canon: AtomSet = canonical_support(p).into_iter().collect();
    let mut best: Option<(Vec<ElementKey>, Vec<Element>, FinInjection)> = None;
    for beta in admissible_bijections(&support, &canon, kind) {
        let mapped: Vec<Element> = elems
            .iter()
            .map(|e| e.act(&beta, kind).expect("bijection covers support"))
            .collect();
        let key: Vec<ElementKey> = mapped.iter().map(element_key).collect();
        if best.as_ref().map_or(true, |(bk, _, _)| key < *bk) {
            best = Some((key, mapped, beta));
        }
    }
    let (_, rep, relabel) = best.expect("at least one admissible bijection");
    let mut stab = BTreeSet::new();
    for sigma in admissible_bijections(&canon, &canon, kind) {
        let moved: Vec<Element> = rep
            .iter()
            .map(|e| e.act(&sigma, kind).expect("bijection"))
            .collect();
        if moved == rep {
            stab.insert(
                canonical_support(p)
                    .iter()
                    .map(|&a| {
                        let img = sigma.apply(a).unwrap();
                        canonical_support(p).iter().position(|&c| c == img).unwrap()
                    })
                    .collect::<Perm>(),
            );
        }
    }
    CanonTuple {
        rep,
        relabel,
        stabilizer: LocalSymmetry::from_group(p, stab),
        degree: p,
    }
}

/// The orbit decomposition of a product of two orbit-finite sets, with the
/// two projections. Representative pairs are enumerated over an atom
/// budget of the sum of the orbit degrees; every product orbit has a
/// representative within this budget.
pub fn product_orbits(
    x: &OrbitFiniteSet,
    y: &OrbitFiniteSet,
    kind: SymmetryKind,
) -> (OrbitFiniteSet, EquivariantMap, EquivariantMap) {
    let mut reps: Vec<CanonTuple> = Vec::new();
    let mut seen: BTreeSet<Vec<ElementKey>> = BTreeSet::new();
    for ox in x.orbits() {
        for oy in y.orbits() {
            let budget: AtomSet = canonical_support(ox.degree + oy.degree).into_iter().collect();
            for ex in enumerate_orbit_elements(ox, &budget, kind) {
                for ey in enumerate_orbit_elements(oy, &budget, kind) {
                    let canon = canonicalize_tuple(&[ex.clone(), ey.clone()], kind);
                    if seen.insert(canon.key()) {
                        reps.push(canon);
                    }
                }
            }
        }
    }
    reps.sort_by_key(|c| c.key());
    let mut orbits = Vec::new();
    let mut proj1 = Vec::new();
    let mut proj2 = Vec::new();
    for (i, canon) in reps.iter().enumerate() {
        let spec = OrbitSpec::new(format!("prod{i}"), canon.degree, canon.stabilizer.clone());
        let u_of = |e: &Element| -> Vec<usize> {
            e.witness()
                .iter()
                .map(|&a| {
                    canonical_support(canon.degree)
                        .iter()
                        .position(|&c| c == a)
                        .expect("witness atom inside canonical support")
                })
                .collect()
        };
        proj1.push((spec.clone(), canon.rep[0].orbit().clone(), u_of(&canon.rep[0])));
        proj2.push((spec.clone(), canon.rep[1].orbit().clone(), u_of(&canon.rep[1])));
        orbits.push(spec);
    }
    let p1 = EquivariantMap::from_indices(proj1).expect("projection is equivariant");
    let p2 = EquivariantMap::from_indices(proj2).expect("projection is equivariant");
    (OrbitFiniteSet::new(orbits), p1, p2)
}
