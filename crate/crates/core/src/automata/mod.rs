//! Finite-state automorphisms of the rooted d-ary tree, given by wreath
//! recursions f = sigma(f_1,...,f_d).
//!
//! Handles (`AutRef`) are hash-consed: an automorphism is canonicalized by
//! exploring its reachable states, minimizing the resulting automaton under
//! bisimulation, and interning the canonical pointed table. Two canonical
//! handles are equal as automorphisms of T_d iff they are the same handle.
//! Automorphisms that cannot be resolved to a finite table within a cap
//! (e.g. induced representations that do not close) stay as lazy nodes and
//! are compared by bounded pair exploration.

mod engine;
pub mod analysis;
pub mod spec;

pub use analysis::{
    certify_nucleus, eventual_states, is_level_transitive_binary, level_transitive_orbit, nucleus,
    states_closure, NucleusOutcome, TransitivityVerdict,
};
pub use engine::{LazyAut, ProvSet};
pub use spec::LoadedAutomaton;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::word::Word;
use engine::store;

/// Interned handle to an automorphism of T_d.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutRef(pub(crate) u32);

impl std::fmt::Debug for AutRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "aut#{}", self.0)
    }
}

/// Three-valued answer for equality and membership questions whose decision
/// procedures are fuel-bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict3 {
    True,
    False,
    Indeterminate,
}

impl Verdict3 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict3::True
    }

    /// Treat Indeterminate as an error; useful when the caller's contract
    /// promises decidable inputs.
    pub fn decided(self, what: &'static str) -> Result<bool> {
        match self {
            Verdict3::True => Ok(true),
            Verdict3::False => Ok(false),
            Verdict3::Indeterminate => Err(Error::Indeterminate(what)),
        }
    }
}

/// The identity automorphism of T_d.
pub fn identity(d: usize) -> AutRef {
    store().identity(d)
}

pub fn arity(f: AutRef) -> usize {
    store().arity(f)
}

pub fn root_perm(f: AutRef) -> Permutation {
    store().root_perm(f)
}

pub fn is_identity(f: AutRef) -> bool {
    store().is_identity_flag(f)
}

/// State of f at the i-th first-level vertex (1-based).
pub fn child(f: AutRef, i: usize) -> Result<AutRef> {
    store().child(f, i)
}

/// State of f at an arbitrary vertex u.
pub fn state_at(f: AutRef, u: &Word) -> Result<AutRef> {
    let d = arity(f);
    u.validate(d)?;
    let mut cur = f;
    for &x in u.letters() {
        cur = child(cur, x as usize)?;
    }
    Ok(cur)
}

/// The action of f on a vertex address.
pub fn evaluate(f: AutRef, u: &Word) -> Result<Word> {
    let d = arity(f);
    u.validate(d)?;
    let mut cur = f;
    let mut out = Vec::with_capacity(u.len());
    for &x in u.letters() {
        out.push(root_perm(cur).apply(x as usize) as u8);
        cur = child(cur, x as usize)?;
    }
    Ok(Word(out))
}

/// Product of automorphisms: `(f g)(u) = f(g(u))`, wreath recursion
/// (fg)|_0 = rho(f) rho(g), (fg)_i = f_{rho(g)(i)} g_i.
pub fn aut_product(f: AutRef, g: AutRef) -> Result<AutRef> {
    store().product(f, g)
}

pub fn aut_inverse(f: AutRef) -> Result<AutRef> {
    store().inverse(f)
}

/// Product of a word of automorphisms, left to right (rightmost acts first).
pub fn aut_product_all(d: usize, factors: &[AutRef]) -> Result<AutRef> {
    let mut acc = identity(d);
    for &f in factors {
        acc = aut_product(acc, f)?;
    }
    Ok(acc)
}

/// Assemble the automorphism with wreath recursion `perm(children...)`.
pub fn assemble(perm: Permutation, children: Vec<AutRef>) -> Result<AutRef> {
    store().assemble(perm, children)
}

/// Decide equality in Aut(T_d). Canonical handles compare directly; lazy
/// handles are compared by exploring reachable state pairs, capped.
pub fn aut_equal(f: AutRef, g: AutRef) -> Verdict3 {
    store().equal(f, g, DEFAULT_EQ_CAP)
}

pub fn aut_equal_capped(f: AutRef, g: AutRef, cap: usize) -> Verdict3 {
    store().equal(f, g, cap)
}

/// Stable canonical key bytes of a handle (interning key). Lexicographic
/// order on these is the deterministic tie-break order used across the crate.
pub fn canonical_key(f: AutRef) -> std::sync::Arc<[u8]> {
    store().key(f)
}

pub fn is_canonical(f: AutRef) -> bool {
    store().is_canonical(f)
}

/// Try to resolve a (lazy) handle into a canonical one.
pub fn canonicalize(f: AutRef, cap: usize) -> Result<AutRef> {
    store().canonicalize(f, cap)
}

/// Fresh provenance tag for a constructed group; see `tag`/`has_tag`.
pub fn new_group_tag() -> u32 {
    store().new_group_tag()
}

/// Record that f (and, for self-similar constructions, all its states) was
/// produced by the tagged constructor.
pub fn tag(f: AutRef, group: u32) {
    store().tag_reachable(f, group)
}

pub fn has_tag(f: AutRef, group: u32) -> bool {
    store().has_tag(f, group)
}

/// Intern a lazy automorphism from an external generator (induced
/// representations). Attempts canonicalization first.
pub fn intern_lazy(gen: std::sync::Arc<dyn LazyAut>) -> AutRef {
    store().intern_external(gen)
}

pub const DEFAULT_EQ_CAP: usize = 1_000_000;

/// Portrait of f to a given depth: permutation labels on all vertices of
/// length <= depth, in breadth-first order.
#[derive(Clone, Debug)]
pub struct Portrait {
    pub d: usize,
    pub labels: Vec<(Word, Permutation)>,
}

pub fn portrait(f: AutRef, depth: usize) -> Result<Portrait> {
    let d = arity(f);
    let mut labels = Vec::new();
    let mut frontier = vec![(Word::root(), f)];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for (w, s) in &frontier {
            labels.push((w.clone(), root_perm(*s)));
            for i in 1..=d {
                next.push((w.child(i as u8), child(*s, i)?));
            }
        }
        frontier = next;
    }
    Ok(Portrait { d, labels })
}

impl Portrait {
    pub fn label(&self, u: &Word) -> Option<&Permutation> {
        self.labels.iter().find(|(w, _)| w == u).map(|(_, p)| p)
    }

    /// Recover the action on a word of length <= depth+1 from the labels.
    pub fn evaluate(&self, u: &Word) -> Option<Word> {
        let mut out = Vec::with_capacity(u.len());
        let mut prefix = Word::root();
        for &x in u.letters() {
            let p = self.label(&prefix)?;
            out.push(p.apply(x as usize) as u8);
            prefix = prefix.child(x);
        }
        Some(Word(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_swap() -> AutRef {
        // f = (1 2)(f, f)
        let spec = "arity 2\nstate f: perm=(1 2); children=f,f\n";
        spec::parse(spec).unwrap().get("f").unwrap()
    }

    fn grigorchuk() -> LoadedAutomaton {
        let text = "arity 2\n\
                    state a: perm=(1 2); children=e,e\n\
                    state b: perm=(); children=a,c\n\
                    state c: perm=(); children=a,d\n\
                    state d: perm=(); children=e,b\n";
        spec::parse(text).unwrap()
    }

    #[test]
    fn swap_inverts_every_letter() {
        let f = binary_swap();
        let u = Word::parse("112").unwrap();
        assert_eq!(evaluate(f, &u).unwrap(), Word::parse("221").unwrap());
        assert_eq!(evaluate(f, &Word::root()).unwrap(), Word::root());
    }

    #[test]
    fn swap_squares_to_identity() {
        let f = binary_swap();
        let ff = aut_product(f, f).unwrap();
        assert!(is_identity(ff));
        assert_eq!(ff, identity(2));
        assert_eq!(aut_product(f, identity(2)).unwrap(), f);
    }

    #[test]
    fn grigorchuk_states_and_relations() {
        let g = grigorchuk();
        let (a, b, c, d) = (
            g.get("a").unwrap(),
            g.get("b").unwrap(),
            g.get("c").unwrap(),
            g.get("d").unwrap(),
        );
        // a swaps the top level and acts trivially below: a(21) = 11.
        assert_eq!(
            evaluate(a, &Word::parse("21").unwrap()).unwrap(),
            Word::parse("11").unwrap()
        );
        // states of b
        assert_eq!(state_at(b, &Word::parse("1").unwrap()).unwrap(), a);
        assert_eq!(state_at(b, &Word::parse("2").unwrap()).unwrap(), c);
        assert_eq!(state_at(b, &Word::root()).unwrap(), b);
        // involutions and the Klein four relation bc = d
        assert!(is_identity(aut_product(a, a).unwrap()));
        assert!(!is_identity(a));
        assert_eq!(aut_product(b, c).unwrap(), d);
        assert_eq!(aut_inverse(b).unwrap(), b);
    }

    #[test]
    fn product_law_and_inverse_on_words() {
        let g = grigorchuk();
        let refs: Vec<AutRef> = ["a", "b", "c", "d"]
            .iter()
            .map(|n| g.get(n).unwrap())
            .collect();
        let words: Vec<Word> = (0..=6u32)
            .flat_map(|len| {
                (0..2u32.pow(len)).map(move |mut bits| {
                    let mut w = Vec::new();
                    for _ in 0..len {
                        w.push((bits % 2 + 1) as u8);
                        bits /= 2;
                    }
                    Word(w)
                })
            })
            .collect();
        for &f in &refs {
            for &h in &refs {
                let fh = aut_product(f, h).unwrap();
                let inv = aut_inverse(f).unwrap();
                for u in &words {
                    let lhs = evaluate(fh, u).unwrap();
                    let rhs = evaluate(f, &evaluate(h, u).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                    assert_eq!(evaluate(inv, &evaluate(f, u).unwrap()).unwrap(), *u);
                }
                // wreath-recursion product law via state_at
                for i in 1..=2 {
                    let lhs = child(fh, i).unwrap();
                    let rhs = aut_product(
                        child(f, root_perm(h).apply(i)).unwrap(),
                        child(h, i).unwrap(),
                    )
                    .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn equality_is_congruence_on_samples() {
        let g = grigorchuk();
        let a = g.get("a").unwrap();
        let b = g.get("b").unwrap();
        let ab = aut_product(a, b).unwrap();
        let ba = aut_product(b, a).unwrap();
        assert_eq!(aut_equal(ab, ab), Verdict3::True);
        assert_eq!(aut_equal(ab, ba), Verdict3::False);
        // congruence: equal handles stay equal under products
        let x = aut_product(ab, a).unwrap();
        let y = aut_product(ab, a).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn portraits_recover_evaluation() {
        let f = binary_swap();
        let p = portrait(f, 2).unwrap();
        assert_eq!(p.labels.len(), 7);
        assert!(p.labels.iter().all(|(_, perm)| !perm.is_identity()));
        for s in ["1", "21", "112"] {
            let u = Word::parse(s).unwrap();
            assert_eq!(p.evaluate(&u).unwrap(), evaluate(f, &u).unwrap());
        }
        let id = identity(2);
        let p = portrait(id, 3).unwrap();
        assert!(p.labels.iter().all(|(_, perm)| perm.is_identity()));
        // Grigorchuk a at depth 1: root (1 2), children trivial
        let g = grigorchuk();
        let pa = portrait(g.get("a").unwrap(), 1).unwrap();
        assert_eq!(pa.label(&Word::root()).unwrap().to_cycles(), "(1 2)");
        assert!(pa.label(&Word::parse("1").unwrap()).unwrap().is_identity());
    }

    #[test]
    fn assemble_matches_recursion() {
        let g = grigorchuk();
        let b = g.get("b").unwrap();
        let a = g.get("a").unwrap();
        let c = g.get("c").unwrap();
        let rebuilt = assemble(Permutation::identity(2), vec![a, c]).unwrap();
        assert_eq!(rebuilt, b);
    }
}
