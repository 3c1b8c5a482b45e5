//! Data trees over an orbit-finite alphabet, one-hole contexts,
//! substitution, tree orbits and the one-layer extension set `Next(S)`.
//!
//! Trees are immutable term structures; the positions-as-strings view of
//! the definition is derived, never materialized. A context is a term with
//! exactly one nullary hole, written `x`, which the group action fixes.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::nominal::{
    admissible_bijections, enumerate_orbit_elements, Element, LocalSymmetry, NominalError,
    OrbitFiniteSet, OrbitRef, OrbitSpec,
};
use crate::symmetry::{canonical_support, Atom, AtomSet, FinInjection, SymmetryKind};

/// A data tree or context: a labelled node with ordered children, or the
/// hole. A term with no holes is a tree; with exactly one nullary hole it
/// is a context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Node(Element, Vec<Term>),
    Hole,
}

impl Term {
    pub fn leaf(label: Element) -> Term {
        Term::Node(label, Vec::new())
    }

    pub fn node(label: Element, children: Vec<Term>) -> Term {
        Term::Node(label, children)
    }

    pub fn hole_count(&self) -> usize {
        match self {
            Term::Hole => 1,
            Term::Node(_, children) => children.iter().map(Term::hole_count).sum(),
        }
    }

    pub fn is_tree(&self) -> bool {
        self.hole_count() == 0
    }

    pub fn is_context(&self) -> bool {
        self.hole_count() == 1
    }

    /// Number of nodes on the longest root-to-leaf path; the hole counts
    /// as a node.
    pub fn depth(&self) -> usize {
        match self {
            Term::Hole => 1,
            Term::Node(_, children) => 1 + children.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Hole => 1,
            Term::Node(_, children) => 1 + children.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn max_arity(&self) -> usize {
        match self {
            Term::Hole => 0,
            Term::Node(_, children) => children
                .len()
                .max(children.iter().map(Term::max_arity).max().unwrap_or(0)),
        }
    }

    /// Union of the label least supports over all positions.
    pub fn support(&self) -> AtomSet {
        let mut out = AtomSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut AtomSet) {
        if let Term::Node(label, children) = self {
            for a in label.witness() {
                out.insert(*a);
            }
            for c in children {
                c.collect_support(out);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Hole => write!(f, "x"),
            Term::Node(label, children) => {
                // Labels from the implicit atoms alphabet print bare.
                if label.orbit().name == ATOMS_ORBIT && label.degree() == 1 {
                    write!(f, "{}", label.witness()[0])?;
                } else {
                    write!(f, "{label}")?;
                }
                if !children.is_empty() {
                    write!(f, "(")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// The reserved orbit name of the implicit atoms alphabet.
pub const ATOMS_ORBIT: &str = "atom";

/// An alphabet: an orbit-finite set plus a flag for the common case of the
/// atoms themselves, whose labels read and print as bare atom literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    set: OrbitFiniteSet,
    atoms: bool,
}

impl Alphabet {
    pub fn atoms() -> Alphabet {
        Alphabet {
            set: OrbitFiniteSet::new(vec![OrbitSpec::trivial(ATOMS_ORBIT, 1)]),
            atoms: true,
        }
    }

    pub fn explicit(set: OrbitFiniteSet) -> Alphabet {
        Alphabet { set, atoms: false }
    }

    pub fn set(&self) -> &OrbitFiniteSet {
        &self.set
    }

    pub fn is_atoms(&self) -> bool {
        self.atoms
    }

    pub fn atom_label(&self, a: Atom, kind: SymmetryKind) -> Result<Element, NominalError> {
        let orbit = self
            .set
            .by_name(ATOMS_ORBIT)
            .expect("atoms alphabet has the atom orbit");
        Element::new(orbit, vec![a], kind)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{0}")]
    Nominal(#[from] NominalError),
}

fn syntax(pos: usize, msg: impl Into<String>) -> TreeError {
    TreeError::Syntax {
        pos,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(Atom),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, TreeError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '[' => {
                out.push((i, Tok::LBracket));
                i += 1;
            }
            ']' => {
                out.push((i, Tok::RBracket));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '/') {
                    i += 1;
                }
                let lit = &text[start..i];
                let atom: Atom = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("bad atom literal `{lit}`")))?;
                out.push((start, Tok::Number(atom)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_' | '-')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return Err(syntax(i, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alphabet: &'a Alphabet,
    kind: SymmetryKind,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn term(&mut self) -> Result<Term, TreeError> {
        let (pos, tok) = self
            .next()
            .ok_or_else(|| syntax(self.end, "expected a term"))?;
        let label = match tok {
            Tok::Ident(name) if name == "x" => return Ok(Term::Hole),
            Tok::Number(a) => {
                if !self.alphabet.is_atoms() {
                    return Err(syntax(pos, "bare atom label needs the atoms alphabet"));
                }
                self.alphabet.atom_label(a, self.kind)?
            }
            Tok::Ident(name) => {
                let orbit = self
                    .alphabet
                    .set()
                    .by_name(&name)
                    .ok_or_else(|| syntax(pos, format!("unknown alphabet orbit `{name}`")))?
                    .clone();
                let mut witness = Vec::new();
                if matches!(self.peek(), Some((_, Tok::LBracket))) {
                    self.next();
                    loop {
                        match self.next() {
                            Some((_, Tok::Number(a))) => witness.push(a),
                            Some((p, _)) => return Err(syntax(p, "expected an atom")),
                            None => return Err(syntax(self.end, "expected an atom")),
                        }
                        match self.next() {
                            Some((_, Tok::Comma)) => continue,
                            Some((_, Tok::RBracket)) => break,
                            Some((p, _)) => return Err(syntax(p, "expected `,` or `]`")),
                            None => return Err(syntax(self.end, "expected `]`")),
                        }
                    }
                }
                Element::new(&orbit, witness, self.kind)?
            }
            _ => return Err(syntax(pos, "expected a label")),
        };
        let mut children = Vec::new();
        if matches!(self.peek(), Some((_, Tok::LParen))) {
            self.next();
            loop {
                children.push(self.term()?);
                match self.next() {
                    Some((_, Tok::Comma)) => continue,
                    Some((_, Tok::RParen)) => break,
                    Some((p, _)) => return Err(syntax(p, "expected `,` or `)`")),
                    None => return Err(syntax(self.end, "expected `)`")),
                }
            }
        }
        Ok(Term::Node(label, children))
    }
}

/// Parses the term grammar `TREE := LABEL | LABEL '(' TREE (',' TREE)* ')'`
/// with `x` as the hole. Whitespace is insignificant.
pub fn parse_term(text: &str, alphabet: &Alphabet, kind: SymmetryKind) -> Result<Term, TreeError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
        kind,
        end: text.len(),
    };
    let t = p.term()?;
    if let Some((pos, _)) = p.peek() {
        return Err(syntax(*pos, "trailing input after term"));
    }
    Ok(t)
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

/// Replaces the hole of `c` with `t`. The result is a context exactly when
/// `t` is one.
pub fn substitute(c: &Term, t: &Term) -> Term {
    match c {
        Term::Hole => t.clone(),
        Term::Node(label, children) => Term::Node(
            label.clone(),
            children.iter().map(|ch| substitute(ch, t)).collect(),
        ),
    }
}

/// All distinct subtrees `t|_p`.
pub fn subtrees(t: &Term) -> Vec<Term> {
    let mut out = BTreeSet::new();
    collect_subtrees(t, &mut out);
    out.into_iter().collect()
}

fn collect_subtrees(t: &Term, out: &mut BTreeSet<Term>) {
    out.insert(t.clone());
    if let Term::Node(_, children) = t {
        for c in children {
            collect_subtrees(c, out);
        }
    }
}

/// Label-wise group action; the hole is fixed.
pub fn act_term(t: &Term, pi: &FinInjection, kind: SymmetryKind) -> Result<Term, NominalError> {
    match t {
        Term::Hole => Ok(Term::Hole),
        Term::Node(label, children) => Ok(Term::Node(
            label.act(pi, kind)?,
            children
                .iter()
                .map(|c| act_term(c, pi, kind))
                .collect::<Result<Vec<_>, _>>()?,
        )),
    }
}

/// A tree (or context) orbit: a representative in canonical atom form plus
/// the orbit spec derived from it (degree = support size, local symmetry =
/// the stabilizer of the representative under the tree action).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeOrbit {
    pub rep: Term,
    pub spec: OrbitRef,
}

impl TreeOrbit {
    /// Instances of this orbit with support inside `pool`.
    pub fn instances(&self, pool: &AtomSet, kind: SymmetryKind) -> Vec<Term> {
        let support = self.rep.support();
        admissible_injections(&support, pool, kind)
            .into_iter()
            .map(|pi| act_term(&self.rep, &pi, kind).expect("injection covers support"))
            .collect()
    }
}

impl fmt::Display for TreeOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// All injections from `dom` into `pool` that extend to the symmetry
/// group, as finite maps.
pub fn admissible_injections(dom: &AtomSet, pool: &AtomSet, kind: SymmetryKind) -> Vec<FinInjection> {
    use itertools::Itertools;
    let dom: Vec<Atom> = dom.sorted();
    let pool: Vec<Atom> = pool.sorted();
    if dom.len() > pool.len() {
        return Vec::new();
    }
    match kind {
        SymmetryKind::Equality => pool
            .iter()
            .copied()
            .permutations(dom.len())
            .map(|img| FinInjection::new(dom.iter().copied().zip(img)).expect("injective"))
            .collect(),
        SymmetryKind::TotalOrder => pool
            .iter()
            .copied()
            .combinations(dom.len())
            .map(|img| FinInjection::new(dom.iter().copied().zip(img)).expect("injective"))
            .collect(),
    }
}

/// The canonical representative of a term's orbit: among all admissible
/// relabellings of the support onto `{0..p-1}` (every bijection for
/// equality, the rank relabelling for total order), the least term; label
/// class representatives are minimized as part of element
/// canonicalization. The stabilizer is found by exhaustive search over
/// admissible bijections of the canonical support.
pub fn tree_orbit(t: &Term, kind: SymmetryKind) -> TreeOrbit {
    let support = t.support();
    let p = support.len();
    let canon: AtomSet = canonical_support(p).into_iter().collect();
    let rep = admissible_bijections(&support, &canon, kind)
        .into_iter()
        .map(|beta| act_term(t, &beta, kind).expect("bijection covers support"))
        .min()
        .expect("at least one admissible bijection");
    let mut stab = BTreeSet::new();
    for sigma in admissible_bijections(&canon, &canon, kind) {
        if act_term(&rep, &sigma, kind).expect("bijection") == rep {
            stab.insert(
                canonical_support(p)
                    .iter()
                    .map(|&a| {
                        let img = sigma.apply(a).unwrap();
                        canonical_support(p).iter().position(|&c| c == img).unwrap()
                    })
                    .collect::<Vec<usize>>(),
            );
        }
    }
    let spec = Arc::new(OrbitSpec {
        name: rep.to_string(),
        degree: p,
        sym: LocalSymmetry::from_group(p, stab),
    });
    TreeOrbit { rep, spec }
}

pub fn same_tree_orbit(t1: &Term, t2: &Term, kind: SymmetryKind) -> bool {
    tree_orbit(t1, kind).rep == tree_orbit(t2, kind).rep
}

/// `Next(S)`: the orbits of one-layer extensions `a(t_1..t_k)` not already
/// in `S`, for labels from the alphabet, children from `S` and
/// `1 <= k <= m`. Label and child representatives are instantiated over a
/// combined atom budget of the participating degrees.
pub fn next_orbits(
    s: &[TreeOrbit],
    alphabet: &Alphabet,
    max_arity: usize,
    kind: SymmetryKind,
) -> Vec<TreeOrbit> {
    let s_keys: BTreeSet<Term> = s.iter().map(|o| o.rep.clone()).collect();
    let mut seen: BTreeSet<Term> = BTreeSet::new();
    let mut out = Vec::new();
    for k in 1..=max_arity {
        for label_orbit in alphabet.set().orbits() {
            for combo in index_tuples(s.len(), k) {
                let budget: usize = label_orbit.degree
                    + combo.iter().map(|&i| s[i].spec.degree).sum::<usize>();
                let pool: AtomSet = canonical_support(budget).into_iter().collect();
                let child_choices: Vec<Vec<Term>> =
                    combo.iter().map(|&i| s[i].instances(&pool, kind)).collect();
                for label in enumerate_orbit_elements(label_orbit, &pool, kind) {
                    for children in multi_cartesian(&child_choices) {
                        let tree = Term::Node(label.clone(), children);
                        let orbit = tree_orbit(&tree, kind);
                        if !s_keys.contains(&orbit.rep) && seen.insert(orbit.rep.clone()) {
                            out.push(orbit);
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| (a.rep.size(), &a.rep).cmp(&(b.rep.size(), &b.rep)));
    out
}

/// Index tuples `{0..n-1}^k`.
fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

fn multi_cartesian(choices: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Subtree-closure on orbit representatives: the immediate children of
/// every representative must themselves have orbits in `S`.
pub fn check_subtree_closed(s: &[TreeOrbit], kind: SymmetryKind) -> bool {
    let keys: BTreeSet<Term> = s.iter().map(|o| o.rep.clone()).collect();
    s.iter().all(|o| {
        if let Term::Node(_, children) = &o.rep {
            children
                .iter()
                .all(|c| keys.contains(&tree_orbit(c, kind).rep))
        } else {
            true
        }
    })
}

/// x-prefix-closure of `E` on `S`, decided on representatives: every
/// context except `x` must decompose as `c'[a(b_1..x..b_{k-1})]` with `c'`
/// in `E` and the siblings in `S`. The decomposition at the hole's parent
/// is unique.
pub fn check_x_prefix_closed(e: &[TreeOrbit], s: &[TreeOrbit], kind: SymmetryKind) -> bool {
    let e_keys: BTreeSet<Term> = e.iter().map(|o| o.rep.clone()).collect();
    let s_keys: BTreeSet<Term> = s.iter().map(|o| o.rep.clone()).collect();
    e.iter().all(|c| {
        if c.rep == Term::Hole {
            return true;
        }
        match peel_context(&c.rep) {
            Some((outer, siblings)) => {
                e_keys.contains(&tree_orbit(&outer, kind).rep)
                    && siblings
                        .iter()
                        .all(|b| s_keys.contains(&tree_orbit(b, kind).rep))
            }
            None => false,
        }
    })
}

/// Splits a context at its hole's parent: returns the outer context (the
/// hole's parent subtree replaced by a hole) and the hole's siblings.
/// `None` for the trivial context.
pub fn peel_context(c: &Term) -> Option<(Term, Vec<Term>)> {
    match c {
        Term::Hole => None,
        Term::Node(label, children) => {
            if children.iter().any(|ch| *ch == Term::Hole) {
                let siblings = children.iter().filter(|ch| **ch != Term::Hole).cloned().collect();
                Some((Term::Hole, siblings))
            } else {
                let idx = children.iter().position(|ch| ch.hole_count() == 1)?;
                let (inner_outer, siblings) = peel_context(&children[idx])?;
                let mut new_children = children.clone();
                new_children[idx] = inner_outer;
                Some((Term::Node(label.clone(), new_children), siblings))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eq() -> SymmetryKind {
        SymmetryKind::Equality
    }

    fn parse(s: &str) -> Term {
        parse_term(s, &Alphabet::atoms(), eq()).unwrap()
    }

    fn parse_ord(s: &str) -> Term {
        parse_term(s, &Alphabet::atoms(), SymmetryKind::TotalOrder).unwrap()
    }

    #[test]
    fn parse_print_examples() {
        let t = parse("2(3(1,5))");
        assert_eq!(t.size(), 4);
        assert_eq!(t.depth(), 3);
        assert_eq!(print_term(&t), "2(3(1,5))");

        assert_eq!(parse("x"), Term::Hole);
        let leaf = parse("7");
        assert!(matches!(&leaf, Term::Node(_, c) if c.is_empty()));
        assert_eq!(print_term(&leaf), "7");
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(
            parse_term("2(3", &Alphabet::atoms(), eq()).unwrap_err(),
            TreeError::Syntax { .. }
        ));
        assert!(matches!(
            parse_term("2(3))", &Alphabet::atoms(), eq()).unwrap_err(),
            TreeError::Syntax { pos: 4, .. }
        ));
    }

    #[test]
    fn substitute_examples() {
        let c = parse("2(x)");
        let t = parse("3(1,5)");
        assert_eq!(substitute(&c, &t), parse("2(3(1,5))"));

        assert_eq!(substitute(&Term::Hole, &t), t);

        let c2 = parse("1(x)");
        let got = substitute(&c2, &Term::Hole);
        assert!(got.is_context());
        assert_eq!(got, c2);
    }

    #[test]
    fn subtrees_examples() {
        let t = parse("2(3(1,5))");
        let subs = subtrees(&t);
        assert_eq!(subs.len(), 4);
        assert!(subs.contains(&parse("5")));
        assert!(subs.contains(&parse("3(1,5)")));

        assert_eq!(subtrees(&parse("7")), vec![parse("7")]);
        assert_eq!(subtrees(&parse("1(1)")).len(), 2);
    }

    #[test]
    fn act_examples() {
        let t = parse("2(5,6)");
        let pi = FinInjection::new([
            (Atom::nat(2), Atom::nat(8)),
            (Atom::nat(5), Atom::nat(1)),
            (Atom::nat(6), Atom::nat(3)),
        ])
        .unwrap();
        assert_eq!(act_term(&t, &pi, eq()).unwrap(), parse("8(1,3)"));

        let id = FinInjection::identity(&t.support());
        assert_eq!(act_term(&t, &id, eq()).unwrap(), t);
    }

    #[test]
    fn tree_orbit_examples() {
        let oa = tree_orbit(&parse("8(1,3)"), eq());
        let ob = tree_orbit(&parse("2(5,6)"), eq());
        assert_eq!(oa.rep, ob.rep);
        assert_eq!(oa.rep.to_string(), "0(1,2)");

        let chain = tree_orbit(&parse("1(1)"), eq());
        assert_eq!(chain.rep.to_string(), "0(0)");
        assert_eq!(chain.spec.degree, 1);

        // Atom-labelled trees always have a trivial stabilizer: any
        // non-identity relabelling moves some label.
        for s in ["1", "1(2)", "1(2,3)", "1(2(3))"] {
            assert!(tree_orbit(&parse(s), eq()).spec.sym.is_trivial());
        }
    }

    #[test]
    fn same_tree_orbit_examples() {
        assert!(same_tree_orbit(&parse("1(2)"), &parse("2(1)"), eq()));
        assert!(!same_tree_orbit(&parse("1(1)"), &parse("1(2)"), eq()));
        // No monotone map sends 1<2 to 2>1.
        assert!(!same_tree_orbit(
            &parse_ord("1(2)"),
            &parse_ord("2(1)"),
            SymmetryKind::TotalOrder
        ));
    }

    #[test]
    fn next_orbits_example() {
        let alphabet = Alphabet::atoms();
        let s = vec![tree_orbit(&parse("1"), eq())];
        let next = next_orbits(&s, &alphabet, 2, eq());
        let names: Vec<String> = next.iter().map(|o| o.rep.to_string()).collect();
        // The unary and binary one-layer extensions of the atoms,
        // including the all-distinct binary shape the displayed definition
        // generates.
        assert_eq!(
            names,
            vec!["0(0)", "0(1)", "0(0,0)", "0(0,1)", "0(1,0)", "0(1,1)", "0(1,2)"]
        );

        assert!(next_orbits(&[], &alphabet, 2, eq()).is_empty());
    }

    /// Over a three-atom universe the orbit decomposition of Next(S)
    /// agrees with the brute-force set of one-layer extensions computed
    /// concretely and then orbit-partitioned.
    #[test]
    fn next_orbits_matches_brute_force() {
        let alphabet = Alphabet::atoms();
        let pool: AtomSet = canonical_support(3).into_iter().collect();
        for kind in [eq(), SymmetryKind::TotalOrder] {
            let leaf = Term::leaf(alphabet.atom_label(Atom::nat(1), kind).unwrap());
            let s = vec![tree_orbit(&leaf, kind)];
            let next = next_orbits(&s, &alphabet, 2, kind);

            let leaves: Vec<Term> = s[0].instances(&pool, kind);
            let labels: Vec<Element> =
                enumerate_orbit_elements(&alphabet.set().orbits()[0], &pool, kind);
            let mut brute: BTreeSet<Term> = BTreeSet::new();
            for a in &labels {
                for t1 in &leaves {
                    let tree = Term::Node(a.clone(), vec![t1.clone()]);
                    if !same_tree_orbit(&tree, &s[0].rep, kind) {
                        brute.insert(tree_orbit(&tree, kind).rep);
                    }
                    for t2 in &leaves {
                        let tree = Term::Node(a.clone(), vec![t1.clone(), t2.clone()]);
                        brute.insert(tree_orbit(&tree, kind).rep);
                    }
                }
            }
            let from_next: BTreeSet<Term> = next
                .iter()
                .filter(|o| o.spec.degree <= 3)
                .map(|o| o.rep.clone())
                .collect();
            assert_eq!(from_next, brute, "kind {kind:?}");
        }
    }

    #[test]
    fn closure_predicates() {
        let s1 = vec![tree_orbit(&parse("1"), eq())];
        assert!(check_subtree_closed(&s1, eq()));

        let s2 = vec![tree_orbit(&parse("1(1)"), eq())];
        assert!(!check_subtree_closed(&s2, eq()));

        let e = vec![
            tree_orbit(&Term::Hole, eq()),
            tree_orbit(&parse("1(x)"), eq()),
        ];
        assert!(check_x_prefix_closed(&e, &s1, eq()));

        // A context two layers deep is not x-prefix-closed without its
        // one-layer peel.
        let e_deep = vec![
            tree_orbit(&Term::Hole, eq()),
            tree_orbit(&parse("1(2(x))"), eq()),
        ];
        assert!(!check_x_prefix_closed(&e_deep, &s1, eq()));
    }

    #[test]
    fn peel_decomposition() {
        let c = parse("1(2(x,3))");
        let (outer, siblings) = peel_context(&c).unwrap();
        assert_eq!(outer, parse("1(x)"));
        assert_eq!(siblings, vec![parse("3")]);
        assert!(peel_context(&Term::Hole).is_none());
    }

    fn arb_injection() -> impl Strategy<Value = FinInjection> {
        proptest::collection::btree_set(0u64..12, 6).prop_map(|img| {
            let img: Vec<Atom> = img.into_iter().map(Atom::nat).collect();
            FinInjection::new((0..6u64).map(Atom::nat).zip(img)).unwrap()
        })
    }

    fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
        let leaf = (0u64..6).prop_map(|a| {
            Term::leaf(
                Alphabet::atoms()
                    .atom_label(Atom::nat(a), SymmetryKind::Equality)
                    .unwrap(),
            )
        });
        leaf.prop_recursive(depth, 16, 2, |inner| {
            ((0u64..6), proptest::collection::vec(inner, 1..=2)).prop_map(|(a, children)| {
                Term::Node(
                    Alphabet::atoms()
                        .atom_label(Atom::nat(a), SymmetryKind::Equality)
                        .unwrap(),
                    children,
                )
            })
        })
    }

    proptest! {
        /// Substitution respects the group action.
        #[test]
        fn substitute_respects_action(t in arb_term(3), pi in arb_injection()) {
            let c = Term::Node(
                Alphabet::atoms().atom_label(Atom::nat(2), eq()).unwrap(),
                vec![Term::Hole],
            );
            let lhs = act_term(&substitute(&c, &t), &pi, eq()).unwrap();
            let rhs = substitute(
                &act_term(&c, &pi, eq()).unwrap(),
                &act_term(&t, &pi, eq()).unwrap(),
            );
            prop_assert_eq!(lhs, rhs);
        }

        /// Canonical form is a true orbit invariant under any admissible
        /// relabelling.
        #[test]
        fn canonical_invariant_under_action(t in arb_term(3), pi in arb_injection()) {
            let moved = act_term(&t, &pi, eq()).unwrap();
            prop_assert!(same_tree_orbit(&t, &moved, eq()));
        }

        /// Supports transform along the action.
        #[test]
        fn support_transforms(t in arb_term(3), pi in arb_injection()) {
            let moved = act_term(&t, &pi, eq()).unwrap();
            let expect: AtomSet = t.support().iter().map(|a| pi.apply(a).unwrap()).collect();
            prop_assert_eq!(moved.support(), expect);
        }
    }

    /// Canonical forms differ exactly when no admissible relabelling
    /// carries one tree to the other, by brute-force search over
    /// bijections of small supports.
    #[test]
    fn canonical_separates_orbits() {
        let terms = [
            parse("1(2)"),
            parse("2(1)"),
            parse("1(1)"),
            parse("1(2,3)"),
            parse("1(1,2)"),
            parse("1(2,2)"),
            parse("0(1(2,3))"),
        ];
        for a in &terms {
            for b in &terms {
                let brute = admissible_bijections(&a.support(), &b.support(), eq())
                    .into_iter()
                    .any(|beta| act_term(a, &beta, eq()).unwrap() == *b);
                assert_eq!(same_tree_orbit(a, b, eq()), brute);
            }
        }
    }

    #[test]
    fn stabilizer_members_fix_rep() {
        for s in ["1(2,3)", "1(2(3),2(3))", "0(1,1)"] {
            let orbit = tree_orbit(&parse(s), eq());
            for m in orbit.spec.sym.members() {
                let pi = FinInjection::new(
                    m.iter()
                        .enumerate()
                        .map(|(i, &v)| (Atom::nat(i as u64), Atom::nat(v as u64))),
                )
                .unwrap();
                assert_eq!(act_term(&orbit.rep, &pi, eq()).unwrap(), orbit.rep);
            }
        }
    }
}
