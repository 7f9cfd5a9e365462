//! Tree pairs [T_-, w, T_+]: the elements of the Thompson-like group of the
//! cloning system on S_* wr G, i.e. of the Nekrashevych group V_d(G) when
//! all tuple entries lie in G.
//!
//! Multiplication and equality go through common refinements of the carried
//! trees, mirroring how almost-automorphisms are compared; canonical forms
//! are a deterministic normalization on top, not a correctness dependency.

use super::WreathElement;
use crate::automata::{self, aut_equal, child, root_perm, AutRef};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::Tree;
use crate::word::Word;

#[derive(Clone, PartialEq, Eq)]
pub struct TreePair {
    /// Range tree T_- (splits).
    range: Tree,
    w: WreathElement,
    /// Domain tree T_+ (merges).
    domain: Tree,
}

/// Why a position failed to reduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Reduced,
    DomainLeavesNotSiblings,
    ImageNotContiguous,
    RangeLeavesNotSiblings,
    PermNotCloneImage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryImage {
    Determined(Word),
    /// The input is shorter than every matching domain leaf; supplying
    /// `need` letters in total would determine it.
    Undetermined { need: usize },
}

impl TreePair {
    pub fn new(range: Tree, w: WreathElement, domain: Tree) -> Result<TreePair> {
        if range.arity() != w.arity() || domain.arity() != w.arity() {
            return Err(Error::ArityMismatch(range.arity(), w.arity()));
        }
        if range.leaves() != w.degree() || domain.leaves() != w.degree() {
            return Err(Error::DegreeMismatch(range.leaves(), w.degree()));
        }
        Ok(TreePair { range, w, domain })
    }

    pub fn identity(d: usize) -> TreePair {
        TreePair {
            range: Tree::leaf(d),
            w: WreathElement::identity(d, 1),
            domain: Tree::leaf(d),
        }
    }

    /// [1_1, f, 1_1]: a bare automorphism as a tree pair.
    pub fn from_aut(f: AutRef) -> TreePair {
        let d = automata::arity(f);
        TreePair {
            range: Tree::leaf(d),
            w: WreathElement::new(Permutation::identity(1), vec![f], d).unwrap(),
            domain: Tree::leaf(d),
        }
    }

    pub fn arity(&self) -> usize {
        self.w.arity()
    }

    pub fn leaves(&self) -> usize {
        self.w.degree()
    }

    pub fn range_tree(&self) -> &Tree {
        &self.range
    }

    pub fn domain_tree(&self) -> &Tree {
        &self.domain
    }

    pub fn wreath(&self) -> &WreathElement {
        &self.w
    }

    /// Expansion at domain leaf k: a d-caret is added at leaf k of T_+ and
    /// at leaf sigma(k) of T_-, and w becomes (w)kappa_k.
    pub fn expand(&self, k: usize) -> Result<TreePair> {
        let n = self.leaves();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        Ok(TreePair {
            range: self.range.with_caret(self.w.sigma().apply(k))?,
            w: self.w.clone_at(k)?,
            domain: self.domain.with_caret(k)?,
        })
    }

    /// Attempt the reduction whose removed domain caret has leaves
    /// k..k+d-1. On success the result is the unique kappa_k-preimage.
    pub fn try_reduce(&self, k: usize) -> Result<(Reduction, Option<TreePair>)> {
        let d = self.arity();
        let n = self.leaves();
        if k == 0 || k + d - 1 > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        // (i) domain leaves k..k+d-1 are siblings
        let mut domain = self.domain.clone();
        if !domain.remove_caret(k)? {
            return Ok((Reduction::DomainLeavesNotSiblings, None));
        }
        // (ii) sigma maps the block onto a contiguous block
        let sigma = self.w.sigma();
        let mut images: Vec<usize> = (k..k + d).map(|i| sigma.apply(i)).collect();
        let first = *images.iter().min().unwrap();
        images.sort_unstable();
        if images != (first..first + d).collect::<Vec<_>>() {
            return Ok((Reduction::ImageNotContiguous, None));
        }
        // (iii) range leaves first..first+d-1 are siblings
        let mut range = self.range.clone();
        if !range.remove_caret(first)? {
            return Ok((Reduction::RangeLeavesNotSiblings, None));
        }
        // tau: block order of the image
        let tau = Permutation::from_images(
            (k..k + d).map(|i| (sigma.apply(i) - first + 1) as u32).collect(),
        )?;
        // (iv) sigma . rho^(k)(tau)^-1 must lie in the image of varsigma_k
        let adjusted = sigma.compose(&tau.inverse().block_embed(k, n)?)?;
        let reduced_sigma = match adjusted.unclone_map(k, d) {
            Some(p) => p,
            None => return Ok((Reduction::PermNotCloneImage, None)),
        };
        // reconstruct the entry: f_k = tau(t_k, ..., t_{k+d-1})
        let fk = automata::assemble(tau, self.w.tuple()[k - 1..k + d - 1].to_vec())?;
        let mut tuple: Vec<AutRef> = Vec::with_capacity(n - d + 1);
        tuple.extend_from_slice(&self.w.tuple()[..k - 1]);
        tuple.push(fk);
        tuple.extend_from_slice(&self.w.tuple()[k + d - 1..]);
        let w = WreathElement::new(reduced_sigma, tuple, d)?;
        Ok((Reduction::Reduced, Some(TreePair { range, w, domain })))
    }

    /// Repeatedly reduce at the smallest reducible position. Deterministic;
    /// the leaf count strictly decreases, so this terminates.
    pub fn canonical_form(&self) -> Result<TreePair> {
        let d = self.arity();
        let mut cur = self.clone();
        'outer: loop {
            let n = cur.leaves();
            if n < d {
                return Ok(cur);
            }
            for k in 1..=n - d + 1 {
                if let (Reduction::Reduced, Some(next)) = cur.try_reduce(k)? {
                    cur = next;
                    continue 'outer;
                }
            }
            return Ok(cur);
        }
    }

    /// Expand until the domain tree equals `target` (which must contain it).
    pub fn expand_domain_to(&self, target: &Tree) -> Result<TreePair> {
        if !target.contains(&self.domain) {
            return Err(Error::Precondition("target does not refine the domain tree".into()));
        }
        let mut cur = self.clone();
        loop {
            let addrs = cur.domain.leaf_addresses();
            match addrs.iter().position(|a| target.is_caret_at(a)) {
                Some(idx) => cur = cur.expand(idx + 1)?,
                None => return Ok(cur),
            }
        }
    }

    /// Expand until the range tree equals `target`: the expansion at domain
    /// leaf sigma^-1(j) grows the range tree at leaf j.
    pub fn expand_range_to(&self, target: &Tree) -> Result<TreePair> {
        if !target.contains(&self.range) {
            return Err(Error::Precondition("target does not refine the range tree".into()));
        }
        let mut cur = self.clone();
        loop {
            let addrs = cur.range.leaf_addresses();
            match addrs.iter().position(|a| target.is_caret_at(a)) {
                Some(idx) => {
                    let k = cur.w.sigma().inverse().apply(idx + 1);
                    cur = cur.expand(k)?;
                }
                None => return Ok(cur),
            }
        }
    }

    /// Product via the least common refinement of T_+ and U_-; the result
    /// is returned in canonical form.
    pub fn multiply(&self, other: &TreePair) -> Result<TreePair> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        let middle = self.domain.union(&other.range)?;
        let lhs = self.expand_domain_to(&middle)?;
        let rhs = other.expand_range_to(&middle)?;
        debug_assert_eq!(lhs.domain, rhs.range);
        let w = lhs.w.product(&rhs.w)?;
        TreePair {
            range: lhs.range,
            w,
            domain: rhs.domain,
        }
        .canonical_form()
    }

    pub fn invert(&self) -> Result<TreePair> {
        Ok(TreePair {
            range: self.domain.clone(),
            w: self.w.inverse()?,
            domain: self.range.clone(),
        })
    }

    /// Equality of the represented elements: expand both to the common
    /// refinement of the domain trees and compare componentwise.
    pub fn equal(&self, other: &TreePair) -> Result<bool> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        let common = self.domain.union(&other.domain)?;
        let lhs = self.expand_domain_to(&common)?;
        let rhs = other.expand_domain_to(&common)?;
        if lhs.range != rhs.range {
            return Ok(false);
        }
        lhs.w.equal(&rhs.w)
    }

    pub fn is_identity_element(&self) -> Result<bool> {
        self.equal(&TreePair::identity(self.arity()))
    }

    /// The boundary action: if a domain leaf address p is a prefix of
    /// u = p v, the image is q (f_l applied to v) for q the address of the
    /// range leaf sigma(l).
    pub fn boundary_eval(&self, u: &Word) -> Result<BoundaryImage> {
        u.validate(self.arity())?;
        let addrs = self.domain.leaf_addresses();
        for (idx, p) in addrs.iter().enumerate() {
            if u.letters().len() >= p.len() && &u.letters()[..p.len()] == p.letters() {
                let l = idx + 1;
                let target = self.w.sigma().apply(l);
                let q = self.range.leaf_addresses()[target - 1].clone();
                let v = Word(u.letters()[p.len()..].to_vec());
                let image = automata::evaluate(self.w.entry(l), &v)?;
                let mut out = q.letters().to_vec();
                out.extend_from_slice(image.letters());
                return Ok(BoundaryImage::Determined(Word(out)));
            }
        }
        // u is a proper prefix of some leaf address
        let need = addrs
            .iter()
            .filter(|p| p.len() > u.len() && &p.letters()[..u.len()] == u.letters())
            .map(|p| p.len())
            .min()
            .expect("complete tree: u must be prefix of some leaf");
        Ok(BoundaryImage::Undetermined { need })
    }
}

impl std::fmt::Debug for TreePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[ {} | {:?} | {} ]",
            self.range.encode(),
            self.w,
            self.domain.encode()
        )
    }
}

/// Sample helper used across tests: all entries of the wreath part plus
/// whether the whole element stays put on every word up to a length.
pub fn boundary_agrees(a: &TreePair, b: &TreePair, max_len: usize) -> Result<bool> {
    let d = a.arity();
    let mut words = vec![Word::root()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &words {
            for x in 1..=d {
                next.push(w.child(x as u8));
            }
        }
        for w in &next {
            let ia = a.boundary_eval(w)?;
            let ib = b.boundary_eval(w)?;
            if let (BoundaryImage::Determined(x), BoundaryImage::Determined(y)) = (&ia, &ib) {
                if x != y {
                    return Ok(false);
                }
            }
        }
        words = next;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::make_sd_embedding;

    fn swap() -> AutRef {
        make_sd_embedding(2, &[Permutation::transposition(2, 1, 2).unwrap()])
            .unwrap()
            .get("s1")
            .unwrap()
    }

    fn fig_left_element() -> TreePair {
        // [caret, (1 2)(id, f), caret]
        let f = swap();
        TreePair::new(
            Tree::caret(2),
            WreathElement::new(
                Permutation::transposition(2, 1, 2).unwrap(),
                vec![automata::identity(2), f],
                2,
            )
            .unwrap(),
            Tree::caret(2),
        )
        .unwrap()
    }

    #[test]
    fn expansion_matches_figure() {
        let t = fig_left_element();
        let e = t.expand(2).unwrap();
        // domain gets a caret at leaf 2, range at sigma(2) = 1
        assert_eq!(e.domain_tree().encode(), "clcll");
        assert_eq!(e.range_tree().encode(), "cclll");
        let f = swap();
        assert_eq!(e.wreath().tuple(), &[automata::identity(2), f, f]);
        // and reduces back
        let (r, back) = e.try_reduce(2).unwrap();
        assert_eq!(r, Reduction::Reduced);
        assert!(back.unwrap().equal(&t).unwrap());
    }

    #[test]
    fn reduce_rejects_non_contiguous_block() {
        // sigma = (2 3) on a 3-leaf pair: block {1,2} maps to {1,3}
        let d = 2;
        let tree = Tree::decode("cclll", d).unwrap();
        let w = WreathElement::from_perm(Permutation::parse_cycles("(2 3)", 3).unwrap(), d);
        let t = TreePair::new(tree.clone(), w, tree).unwrap();
        let (r, out) = t.try_reduce(1).unwrap();
        assert_eq!(r, Reduction::ImageNotContiguous);
        assert!(out.is_none());
    }

    #[test]
    fn canonical_form_collapses_trivial_pairs() {
        let d = 2;
        let tree = Tree::decode("ccllcll", d).unwrap();
        let w = WreathElement::identity(d, 4);
        let t = TreePair::new(tree.clone(), w, tree).unwrap();
        let c = t.canonical_form().unwrap();
        assert!(c.equal(&TreePair::identity(2)).unwrap());
        assert_eq!(c.leaves(), 1);
        // a single caret pair reduces to a bare automorphism
        let t = fig_left_element();
        let c = t.canonical_form().unwrap();
        assert_eq!(c.leaves(), 1);
        assert!(c.equal(&t).unwrap());
        // mismatched tree shapes with the trivial permutation are irreducible
        let t = TreePair::new(
            Tree::decode("clcll", 2).unwrap(),
            WreathElement::identity(2, 3),
            Tree::decode("cclll", 2).unwrap(),
        )
        .unwrap();
        let c = t.canonical_form().unwrap();
        assert_eq!(c, t);
    }

    #[test]
    fn fig6_product_reproduced() {
        // [cll,(1 2)(id,f),cll] . [clcll,(f,f,id),cclll] = [cclll,(1 3)(f,id,f),cclll]
        let f = swap();
        let id = automata::identity(2);
        let x = fig_left_element();
        let y = TreePair::new(
            Tree::decode("clcll", 2).unwrap(),
            WreathElement::new(Permutation::identity(3), vec![f, f, id], 2).unwrap(),
            Tree::decode("cclll", 2).unwrap(),
        )
        .unwrap();
        let expected = TreePair::new(
            Tree::decode("cclll", 2).unwrap(),
            WreathElement::new(Permutation::parse_cycles("(1 3)", 3).unwrap(), vec![f, id, f], 2)
                .unwrap(),
            Tree::decode("cclll", 2).unwrap(),
        )
        .unwrap();
        let got = x.multiply(&y).unwrap();
        assert!(got.equal(&expected).unwrap());
        // f^2 = id is what makes the middle entry trivial
        assert!(automata::is_identity(automata::aut_product(f, f).unwrap()));
    }

    #[test]
    fn inverse_gives_identity() {
        let t = fig_left_element();
        let p = t.multiply(&t.invert().unwrap()).unwrap();
        assert!(p.is_identity_element().unwrap());
    }

    #[test]
    fn boundary_eval_cases() {
        let t = TreePair::identity(2);
        assert_eq!(
            t.boundary_eval(&Word::parse("121").unwrap()).unwrap(),
            BoundaryImage::Determined(Word::parse("121").unwrap())
        );
        let t = fig_left_element();
        // leaf 2 of the domain caret maps to range leaf 1 with entry f
        assert_eq!(
            t.boundary_eval(&Word::parse("21").unwrap()).unwrap(),
            BoundaryImage::Determined(Word::parse("12").unwrap())
        );
        assert_eq!(
            t.boundary_eval(&Word::root()).unwrap(),
            BoundaryImage::Undetermined { need: 1 }
        );
        // equal representatives agree on the boundary
        let e = t.expand(1).unwrap();
        assert!(boundary_agrees(&t, &e, 6).unwrap());
    }

    #[test]
    fn boundary_is_multiplicative() {
        let f = swap();
        let id = automata::identity(2);
        let x = fig_left_element();
        let y = TreePair::new(
            Tree::decode("clcll", 2).unwrap(),
            WreathElement::new(Permutation::parse_cycles("(1 2 3)", 3).unwrap(), vec![f, id, f], 2)
                .unwrap(),
            Tree::decode("cclll", 2).unwrap(),
        )
        .unwrap();
        let xy = x.multiply(&y).unwrap();
        for len in 0..=6usize {
            for bits in 0..(1u32 << len) {
                let u = Word((0..len).map(|i| ((bits >> i) & 1) as u8 + 1).collect());
                if let BoundaryImage::Determined(yu) = y.boundary_eval(&u).unwrap() {
                    if let BoundaryImage::Determined(xyu) = x.boundary_eval(&yu).unwrap() {
                        match xy.boundary_eval(&u).unwrap() {
                            BoundaryImage::Determined(got) => assert_eq!(got, xyu),
                            BoundaryImage::Undetermined { .. } => {}
                        }
                    }
                }
            }
        }
    }
}
