//! The d-ary cloning system on the wreath products S_n wr Aut(T_d) and its
//! subsystem S_n wr G for self-similar G: cloning maps kappa_k^n, axiom
//! checkers, and tree-pair arithmetic in the resulting Thompson-like groups
//! (the Nekrashevych groups V_d(G)).

pub mod diagram;
pub mod literal;
pub mod treepair;

pub use treepair::{BoundaryImage, Reduction, TreePair};

use crate::automata::{self, aut_equal, aut_inverse, aut_product, child, root_perm, AutRef, Verdict3};
use crate::error::{Error, Result};
use crate::groups::SubgroupSpec;
use crate::perm::Permutation;

/// An element sigma(f_1,...,f_n) of S_n wr Aut(T_d).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WreathElement {
    sigma: Permutation,
    tuple: Vec<AutRef>,
    d: usize,
}

impl WreathElement {
    pub fn new(sigma: Permutation, tuple: Vec<AutRef>, d: usize) -> Result<WreathElement> {
        if sigma.degree() != tuple.len() {
            return Err(Error::DegreeMismatch(sigma.degree(), tuple.len()));
        }
        for &f in &tuple {
            let a = automata::arity(f);
            if a != d {
                return Err(Error::ArityMismatch(a, d));
            }
        }
        Ok(WreathElement { sigma, tuple, d })
    }

    pub fn identity(d: usize, n: usize) -> WreathElement {
        WreathElement {
            sigma: Permutation::identity(n),
            tuple: vec![automata::identity(d); n],
            d,
        }
    }

    /// Permutation part with trivial tuple.
    pub fn from_perm(sigma: Permutation, d: usize) -> WreathElement {
        let n = sigma.degree();
        WreathElement {
            sigma,
            tuple: vec![automata::identity(d); n],
            d,
        }
    }

    /// Trivial permutation with a single nontrivial entry at position k.
    pub fn from_single(d: usize, n: usize, k: usize, f: AutRef) -> Result<WreathElement> {
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        let mut tuple = vec![automata::identity(d); n];
        tuple[k - 1] = f;
        WreathElement::new(Permutation::identity(n), tuple, d)
    }

    pub fn degree(&self) -> usize {
        self.tuple.len()
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn tuple(&self) -> &[AutRef] {
        &self.tuple
    }

    pub fn entry(&self, i: usize) -> AutRef {
        self.tuple[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.is_identity() && self.tuple.iter().all(|&f| automata::is_identity(f))
    }

    /// Wreath product: sigma(f) tau(g) = sigma tau (f_{tau(i)} g_i).
    pub fn product(&self, other: &WreathElement) -> Result<WreathElement> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        if self.d != other.d {
            return Err(Error::ArityMismatch(self.d, other.d));
        }
        let sigma = self.sigma.compose(&other.sigma)?;
        let tuple = (1..=self.degree())
            .map(|i| aut_product(self.entry(other.sigma.apply(i)), other.entry(i)))
            .collect::<Result<Vec<_>>>()?;
        WreathElement::new(sigma, tuple, self.d)
    }

    pub fn inverse(&self) -> Result<WreathElement> {
        let sigma = self.sigma.inverse();
        let tuple = (1..=self.degree())
            .map(|i| aut_inverse(self.entry(sigma.apply(i))))
            .collect::<Result<Vec<_>>>()?;
        WreathElement::new(sigma, tuple, self.d)
    }

    pub fn equal(&self, other: &WreathElement) -> Result<bool> {
        if self.degree() != other.degree() || self.d != other.d || self.sigma != other.sigma {
            return Ok(false);
        }
        for (a, b) in self.tuple.iter().zip(other.tuple.iter()) {
            if !aut_equal(*a, *b).decided("wreath entry equality")? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The d-ary cloning map kappa_k^n: the entry f_k opens into its wreath
    /// recursion, the permutation becomes (sigma)varsigma_k^n rho^(k)(f_k).
    pub fn clone_at(&self, k: usize) -> Result<WreathElement> {
        let n = self.degree();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        let d = self.d;
        let fk = self.entry(k);
        let rho_fk = root_perm(fk);
        let cloned_sigma = self.sigma.clone_map(k, d)?;
        let block = rho_fk.block_embed(k, n + d - 1)?;
        let sigma = cloned_sigma.compose(&block)?;
        let mut tuple = Vec::with_capacity(n + d - 1);
        tuple.extend_from_slice(&self.tuple[..k - 1]);
        for j in 1..=d {
            tuple.push(child(fk, j)?);
        }
        tuple.extend_from_slice(&self.tuple[k..]);
        WreathElement::new(sigma, tuple, d)
    }

    /// Block sum.
    pub fn direct_sum(&self, other: &WreathElement) -> Result<WreathElement> {
        if self.d != other.d {
            return Err(Error::ArityMismatch(self.d, other.d));
        }
        let sigma = self.sigma.direct_sum(&other.sigma);
        let mut tuple = self.tuple.clone();
        tuple.extend_from_slice(&other.tuple);
        WreathElement::new(sigma, tuple, self.d)
    }

    /// Are all tuple entries in the given subgroup?
    pub fn entries_in(&self, h: &SubgroupSpec) -> Verdict3 {
        let mut verdict = Verdict3::True;
        for &f in &self.tuple {
            match h.contains(f) {
                Verdict3::False => return Verdict3::False,
                Verdict3::Indeterminate => verdict = Verdict3::Indeterminate,
                Verdict3::True => {}
            }
        }
        verdict
    }
}

impl std::fmt::Debug for WreathElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(", self.sigma.to_cycles())?;
        for (i, t) in self.tuple.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if automata::is_identity(*t) {
                write!(f, "id")?;
            } else {
                write!(f, "{t:?}")?;
            }
        }
        write!(f, ")")
    }
}

/// (C1) cloning a product: (gh)kappa_k = (g)kappa_{rho(h)(k)} (h)kappa_k.
pub fn check_c1(g: &WreathElement, h: &WreathElement, k: usize) -> Result<bool> {
    let lhs = g.product(h)?.clone_at(k)?;
    let rhs = g.clone_at(h.sigma.apply(k))?.product(&h.clone_at(k)?)?;
    lhs.equal(&rhs)
}

/// (C2) product of clonings: ((g)kappa_l)kappa_k = ((g)kappa_k)kappa_{l+d-1}
/// for k < l.
pub fn check_c2(g: &WreathElement, k: usize, l: usize) -> Result<bool> {
    if k >= l {
        return Err(Error::Precondition("check_c2 needs k < l".into()));
    }
    let d = g.arity();
    let lhs = g.clone_at(l)?.clone_at(k)?;
    let rhs = g.clone_at(k)?.clone_at(l + d - 1)?;
    lhs.equal(&rhs)
}

/// (C3) compatibility: the permutation of (g)kappa_k agrees with the cloned
/// permutation away from the new block {k..k+d-1}.
pub fn check_c3(g: &WreathElement, k: usize) -> Result<bool> {
    let d = g.arity();
    let n = g.degree();
    let cloned = g.clone_at(k)?;
    let plain = g.sigma.clone_map(k, d)?;
    for i in 1..=n + d - 1 {
        if i >= k && i <= k + d - 1 {
            continue;
        }
        if cloned.sigma.apply(i) != plain.apply(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One sampled axiom instance: (C1) on (g, h, k), (C2) on (g, k, l), (C3)
/// on (g, k).
#[derive(Clone, Debug)]
pub struct AxiomSample {
    pub g: WreathElement,
    pub h: WreathElement,
    pub k: usize,
    pub l: usize,
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub checked: usize,
    pub first_failure: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub fn check_axioms(samples: &[AxiomSample]) -> Result<AxiomReport> {
    for (idx, s) in samples.iter().enumerate() {
        if !check_c1(&s.g, &s.h, s.k)? {
            return Ok(AxiomReport {
                checked: idx + 1,
                first_failure: Some(format!("C1 fails at sample {idx} (k={})", s.k)),
            });
        }
        if s.k < s.l && !check_c2(&s.g, s.k, s.l)? {
            return Ok(AxiomReport {
                checked: idx + 1,
                first_failure: Some(format!("C2 fails at sample {idx} (k={},l={})", s.k, s.l)),
            });
        }
        if !check_c3(&s.g, s.k)? {
            return Ok(AxiomReport {
                checked: idx + 1,
                first_failure: Some(format!("C3 fails at sample {idx} (k={})", s.k)),
            });
        }
    }
    Ok(AxiomReport {
        checked: samples.len(),
        first_failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{grigorchuk, make_sd_embedding};

    fn binary_swap() -> AutRef {
        make_sd_embedding(2, &[Permutation::transposition(2, 1, 2).unwrap()])
            .unwrap()
            .get("s1")
            .unwrap()
    }

    #[test]
    fn kappa_matches_the_worked_example() {
        // ((1 2)(id,f)) kappa_2^2 = (1 3 2)(2 3)(id,f,f)
        let f = binary_swap();
        let id = automata::identity(2);
        let w = WreathElement::new(
            Permutation::transposition(2, 1, 2).unwrap(),
            vec![id, f],
            2,
        )
        .unwrap();
        let cloned = w.clone_at(2).unwrap();
        let expected_sigma = Permutation::parse_cycles("(1 3 2)", 3)
            .unwrap()
            .compose(&Permutation::parse_cycles("(2 3)", 3).unwrap())
            .unwrap();
        assert_eq!(cloned.sigma(), &expected_sigma);
        assert_eq!(cloned.tuple(), &[id, f, f]);
    }

    #[test]
    fn kappa_on_identity_pads_with_identities() {
        let w = WreathElement::identity(3, 2);
        let c = w.clone_at(1).unwrap();
        assert!(c.is_identity());
        assert_eq!(c.degree(), 4);
        assert!(w.clone_at(0).is_err());
        assert!(w.clone_at(3).is_err());
    }

    #[test]
    fn c1_on_the_squared_swap_instance() {
        // (f,f) kappa_2^2 = ((1 2)(id,f))kappa_1^2 ((1 2)(id,f))kappa_2^2
        let f = binary_swap();
        let id = automata::identity(2);
        let swap = Permutation::transposition(2, 1, 2).unwrap();
        let g = WreathElement::new(swap, vec![id, f], 2).unwrap();
        let gg = g.product(&g).unwrap();
        assert_eq!(gg.sigma(), &Permutation::identity(2));
        assert!(gg.equal(&WreathElement::new(Permutation::identity(2), vec![f, f], 2).unwrap()).unwrap());
        assert!(check_c1(&g, &g, 2).unwrap());
        let lhs = gg.clone_at(2).unwrap();
        let rhs = g.clone_at(1).unwrap().product(&g.clone_at(2).unwrap()).unwrap();
        assert!(lhs.equal(&rhs).unwrap());
    }

    #[test]
    fn axioms_hold_on_grigorchuk_samples() {
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        let c = g.automaton.get("c").unwrap();
        let mut samples = Vec::new();
        for k in 1..=3 {
            for l in 1..=3 {
                let w1 = WreathElement::new(
                    Permutation::parse_cycles("(1 2 3)", 3).unwrap(),
                    vec![g.a, b, c],
                    2,
                )
                .unwrap();
                let w2 = WreathElement::new(
                    Permutation::parse_cycles("(2 3)", 3).unwrap(),
                    vec![c, automata::identity(2), g.a],
                    2,
                )
                .unwrap();
                samples.push(AxiomSample {
                    g: w1,
                    h: w2,
                    k,
                    l,
                });
            }
        }
        let report = check_axioms(&samples).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure);
    }

    #[test]
    fn subsystem_closure_under_cloning() {
        // entries from the Grigorchuk group stay in it when cloned
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        let w = WreathElement::new(
            Permutation::transposition(2, 1, 2).unwrap(),
            vec![b, g.a],
            2,
        )
        .unwrap();
        let whole = SubgroupSpec::WholeGroup {
            tag: Some(g.automaton.group_tag),
            gens: g.generators(),
            fuel: 4096,
        };
        for k in 1..=2 {
            let c = w.clone_at(k).unwrap();
            assert_eq!(c.entries_in(&whole), Verdict3::True);
        }
    }

    #[test]
    fn inverse_and_product_laws() {
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        let w = WreathElement::new(
            Permutation::parse_cycles("(1 3 2)", 3).unwrap(),
            vec![g.a, b, automata::identity(2)],
            2,
        )
        .unwrap();
        let winv = w.inverse().unwrap();
        assert!(w.product(&winv).unwrap().is_identity());
        assert!(winv.product(&w).unwrap().is_identity());
    }
}
