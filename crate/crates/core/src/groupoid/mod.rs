//! The groupoid of forest pairs [F_-, w, F_+] over S_* wr G: heads are the
//! roots of the range forest, feet the roots of the domain forest, and the
//! product x y exists exactly when feet(x) = heads(y).

pub mod coset;

pub use coset::{CosetVertex, HContext};

use crate::automata::{self, AutRef};
use crate::cloning::WreathElement;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::{Forest, Tree, TreeNode};
use crate::word::Word;

#[derive(Clone, PartialEq, Eq)]
pub struct GroupoidElement {
    range: Forest,
    w: WreathElement,
    domain: Forest,
}

impl GroupoidElement {
    pub fn new(range: Forest, w: WreathElement, domain: Forest) -> Result<GroupoidElement> {
        if range.arity() != w.arity() || domain.arity() != w.arity() {
            return Err(Error::ArityMismatch(range.arity(), w.arity()));
        }
        if range.leaves() != w.degree() || domain.leaves() != w.degree() {
            return Err(Error::DegreeMismatch(range.leaves(), w.degree()));
        }
        Ok(GroupoidElement { range, w, domain })
    }

    /// The identity element 1_n.
    pub fn trivial(d: usize, n: usize) -> GroupoidElement {
        GroupoidElement {
            range: Forest::trivial(d, n),
            w: WreathElement::identity(d, n),
            domain: Forest::trivial(d, n),
        }
    }

    /// [1_n, w, 1_n] for w of full degree.
    pub fn from_wreath(w: WreathElement) -> GroupoidElement {
        let n = w.degree();
        let d = w.arity();
        GroupoidElement {
            range: Forest::trivial(d, n),
            w,
            domain: Forest::trivial(d, n),
        }
    }

    /// The single-caret splitting [wedge_k^n, id, 1_{n+d-1}].
    pub fn single_split(d: usize, n: usize, k: usize) -> Result<GroupoidElement> {
        GroupoidElement::new(
            Forest::single_caret(d, n, k)?,
            WreathElement::identity(d, n + d - 1),
            Forest::trivial(d, n + d - 1),
        )
    }

    pub fn from_tree_pair(t: &crate::cloning::TreePair) -> GroupoidElement {
        GroupoidElement {
            range: Forest::from_tree(t.range_tree().clone()),
            w: t.wreath().clone(),
            domain: Forest::from_tree(t.domain_tree().clone()),
        }
    }

    pub fn arity(&self) -> usize {
        self.w.arity()
    }

    pub fn heads(&self) -> usize {
        self.range.roots()
    }

    pub fn feet(&self) -> usize {
        self.domain.roots()
    }

    pub fn leaves(&self) -> usize {
        self.w.degree()
    }

    pub fn range_forest(&self) -> &Forest {
        &self.range
    }

    pub fn domain_forest(&self) -> &Forest {
        &self.domain
    }

    pub fn wreath(&self) -> &WreathElement {
        &self.w
    }

    pub fn expand(&self, k: usize) -> Result<GroupoidElement> {
        Ok(GroupoidElement {
            range: self.range.with_caret(self.w.sigma().apply(k))?,
            w: self.w.clone_at(k)?,
            domain: self.domain.with_caret(k)?,
        })
    }

    pub fn try_reduce(&self, k: usize) -> Result<Option<GroupoidElement>> {
        let d = self.arity();
        let n = self.leaves();
        if k == 0 || k + d - 1 > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        let mut domain = self.domain.clone();
        if !domain.remove_caret(k)? {
            return Ok(None);
        }
        let sigma = self.w.sigma();
        let mut images: Vec<usize> = (k..k + d).map(|i| sigma.apply(i)).collect();
        let first = *images.iter().min().unwrap();
        images.sort_unstable();
        if images != (first..first + d).collect::<Vec<_>>() {
            return Ok(None);
        }
        let mut range = self.range.clone();
        if !range.remove_caret(first)? {
            return Ok(None);
        }
        let tau = Permutation::from_images(
            (k..k + d).map(|i| (sigma.apply(i) - first + 1) as u32).collect(),
        )?;
        let adjusted = sigma.compose(&tau.inverse().block_embed(k, n)?)?;
        let reduced_sigma = match adjusted.unclone_map(k, d) {
            Some(p) => p,
            None => return Ok(None),
        };
        let fk = automata::assemble(tau, self.w.tuple()[k - 1..k + d - 1].to_vec())?;
        let mut tuple: Vec<AutRef> = Vec::with_capacity(n - d + 1);
        tuple.extend_from_slice(&self.w.tuple()[..k - 1]);
        tuple.push(fk);
        tuple.extend_from_slice(&self.w.tuple()[k + d - 1..]);
        let w = WreathElement::new(reduced_sigma, tuple, d)?;
        Ok(Some(GroupoidElement { range, w, domain }))
    }

    /// Leftmost-first full reduction (deterministic representative).
    pub fn reduce(&self) -> Result<GroupoidElement> {
        let d = self.arity();
        let mut cur = self.clone();
        'outer: loop {
            let n = cur.leaves();
            if n < d {
                return Ok(cur);
            }
            for k in 1..=n - d + 1 {
                if let Some(next) = cur.try_reduce(k)? {
                    cur = next;
                    continue 'outer;
                }
            }
            return Ok(cur);
        }
    }

    pub fn expand_domain_to(&self, target: &Forest) -> Result<GroupoidElement> {
        if !target.contains(&self.domain) {
            return Err(Error::Precondition(
                "target does not refine the domain forest".into(),
            ));
        }
        let mut cur = self.clone();
        loop {
            let mut found = None;
            'leafscan: for idx in 1..=cur.domain.leaves() {
                let (tree, local) = cur.domain.locate_leaf(idx)?;
                let addr = cur.domain.trees()[tree].leaf_addresses()[local - 1].clone();
                if target.trees()[tree].is_caret_at(&addr) {
                    found = Some(idx);
                    break 'leafscan;
                }
            }
            match found {
                Some(idx) => cur = cur.expand(idx)?,
                None => return Ok(cur),
            }
        }
    }

    pub fn expand_range_to(&self, target: &Forest) -> Result<GroupoidElement> {
        if !target.contains(&self.range) {
            return Err(Error::Precondition(
                "target does not refine the range forest".into(),
            ));
        }
        let mut cur = self.clone();
        loop {
            let mut found = None;
            'leafscan: for idx in 1..=cur.range.leaves() {
                let (tree, local) = cur.range.locate_leaf(idx)?;
                let addr = cur.range.trees()[tree].leaf_addresses()[local - 1].clone();
                if target.trees()[tree].is_caret_at(&addr) {
                    found = Some(idx);
                    break 'leafscan;
                }
            }
            match found {
                Some(idx) => {
                    let k = cur.w.sigma().inverse().apply(idx);
                    cur = cur.expand(k)?;
                }
                None => return Ok(cur),
            }
        }
    }

    /// Groupoid product; defined iff feet(self) = heads(other).
    pub fn compose(&self, other: &GroupoidElement) -> Result<GroupoidElement> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        if self.feet() != other.heads() {
            return Err(Error::FeetHeadsMismatch {
                feet: self.feet(),
                heads: other.heads(),
            });
        }
        let middle = self.domain.union(&other.range)?;
        let lhs = self.expand_domain_to(&middle)?;
        let rhs = other.expand_range_to(&middle)?;
        debug_assert_eq!(lhs.domain, rhs.range);
        Ok(GroupoidElement {
            range: lhs.range,
            w: lhs.w.product(&rhs.w)?,
            domain: rhs.domain,
        })
    }

    pub fn invert(&self) -> Result<GroupoidElement> {
        Ok(GroupoidElement {
            range: self.domain.clone(),
            w: self.w.inverse()?,
            domain: self.range.clone(),
        })
    }

    pub fn direct_sum(&self, other: &GroupoidElement) -> Result<GroupoidElement> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        Ok(GroupoidElement {
            range: self.range.direct_sum(&other.range),
            w: self.w.direct_sum(&other.w)?,
            domain: self.domain.direct_sum(&other.domain),
        })
    }

    pub fn direct_sum_all(parts: &[GroupoidElement]) -> Result<GroupoidElement> {
        let mut it = parts.iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Precondition("direct sum of nothing".into()))?;
        let mut acc = first.clone();
        for p in it {
            acc = acc.direct_sum(p)?;
        }
        Ok(acc)
    }

    /// Equality in the groupoid via common refinement of domain forests.
    pub fn equal(&self, other: &GroupoidElement) -> Result<bool> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        if self.heads() != other.heads() || self.feet() != other.feet() {
            return Ok(false);
        }
        let common = self.domain.union(&other.domain)?;
        let lhs = self.expand_domain_to(&common)?;
        let rhs = other.expand_domain_to(&common)?;
        if lhs.range != rhs.range {
            return Ok(false);
        }
        lhs.w.equal(&rhs.w)
    }

    /// If this element equals [1_q, W, 1_q], return W (the permutation maps
    /// foot i to the head its boundary tree lands in, entries are honest
    /// automorphisms reconstructed from the leaf bijection and labels).
    pub fn as_pure_wreath(&self) -> Result<Option<WreathElement>> {
        if self.heads() != self.feet() {
            return Ok(None);
        }
        let q = self.feet();
        let d = self.arity();
        let sigma = self.w.sigma();
        let mut head_of = vec![0usize; q]; // 1-based head per foot
        let mut used = vec![false; q];
        for j in 0..q {
            let (lo, hi) = self.domain.leaf_span(j);
            let (head, _) = self.range.locate_leaf(sigma.apply(lo))?;
            for leaf in lo..=hi {
                let (h2, _) = self.range.locate_leaf(sigma.apply(leaf))?;
                if h2 != head {
                    return Ok(None);
                }
            }
            if used[head] {
                return Ok(None);
            }
            used[head] = true;
            head_of[j] = head + 1;
        }
        let mut entries = Vec::with_capacity(q);
        for j in 0..q {
            let (dlo, _) = self.domain.leaf_span(j);
            let (rlo, rhi) = self.range.leaf_span(head_of[j] - 1);
            let dnode = self.domain.trees()[j].node();
            let rnode = self.range.trees()[head_of[j] - 1].node();
            if self.domain.trees()[j].leaves() != rhi - rlo + 1 {
                return Ok(None);
            }
            match reconstruct(dnode, dlo, rnode, rlo, sigma, self.w.tuple(), d)? {
                Some(g) => entries.push(g),
                None => return Ok(None),
            }
        }
        let perm = Permutation::from_images(head_of.iter().map(|&h| h as u32).collect())?;
        Ok(Some(WreathElement::new(perm, entries, d)?))
    }

    /// Deterministic byte serialization (used for representative election);
    /// independent of interning order.
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(self.range.encode().as_bytes());
        out.push(b'|');
        out.extend_from_slice(self.w.sigma().to_one_line().as_bytes());
        out.push(b';');
        for &f in self.w.tuple() {
            out.extend_from_slice(&automata::canonical_key(f));
            out.push(b',');
        }
        out.push(b'|');
        out.extend_from_slice(self.domain.encode().as_bytes());
        out
    }
}

/// Rebuild the automorphism sending the domain subtree to the range subtree
/// per the leaf bijection sigma, with the given leaf labels below.
fn reconstruct(
    dnode: &TreeNode,
    dstart: usize,
    rnode: &TreeNode,
    rstart: usize,
    sigma: &Permutation,
    entries: &[AutRef],
    d: usize,
) -> Result<Option<AutRef>> {
    match (dnode, rnode) {
        (TreeNode::Leaf, TreeNode::Leaf) => {
            if sigma.apply(dstart) != rstart {
                return Ok(None);
            }
            Ok(Some(entries[dstart - 1]))
        }
        (TreeNode::Caret(dk), TreeNode::Caret(rk)) => {
            // leaf spans of the children
            let dspans = child_spans(dk, dstart);
            let rspans = child_spans(rk, rstart);
            let mut pi = vec![0u32; d];
            let mut seen = vec![false; d];
            for (j, &(dlo, dhi)) in dspans.iter().enumerate() {
                let target = sigma.apply(dlo);
                let Some(tj) = rspans.iter().position(|&(rlo, rhi)| target >= rlo && target <= rhi)
                else {
                    return Ok(None);
                };
                let (rlo, rhi) = rspans[tj];
                if rhi - rlo != dhi - dlo || seen[tj] {
                    return Ok(None);
                }
                seen[tj] = true;
                pi[j] = tj as u32 + 1;
            }
            let mut kids = Vec::with_capacity(d);
            for (j, &(dlo, _)) in dspans.iter().enumerate() {
                let tj = pi[j] as usize;
                let (rlo, _) = rspans[tj - 1];
                match reconstruct(&dk[j], dlo, &rk[tj - 1], rlo, sigma, entries, d)? {
                    Some(g) => kids.push(g),
                    None => return Ok(None),
                }
            }
            Ok(Some(automata::assemble(
                Permutation::from_images(pi)?,
                kids,
            )?))
        }
        // leaf counts agree at every call site, so a leaf never faces a caret
        _ => Ok(None),
    }
}

fn child_spans(kids: &[TreeNode], start: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(kids.len());
    let mut lo = start;
    for k in kids {
        let n = k.leaves_count();
        out.push((lo, lo + n - 1));
        lo += n;
    }
    out
}

impl std::fmt::Debug for GroupoidElement {
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

/// Groupoid element literal: `[ cll , l | (1 2) ; id, f | l , cll ]`.
pub fn parse_groupoid_literal(
    text: &str,
    atlas: &crate::automata::spec::LoadedAutomaton,
) -> Result<GroupoidElement> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse("groupoid literal must be [ ... ]".into()))?;
    let parts: Vec<&str> = inner.split('|').collect();
    if parts.len() != 3 {
        return Err(Error::Parse("groupoid literal needs two '|' separators".into()));
    }
    let d = atlas.d;
    let range = Forest::decode(parts[0], d)?;
    let domain = Forest::decode(parts[2], d)?;
    let w = crate::cloning::literal::parse_wreath(parts[1], range.leaves(), atlas)?;
    GroupoidElement::new(range, w, domain)
}

pub fn print_groupoid_literal(
    x: &GroupoidElement,
    atlas: &crate::automata::spec::LoadedAutomaton,
) -> String {
    let entries: Vec<String> = x
        .wreath()
        .tuple()
        .iter()
        .map(|&f| crate::cloning::literal::entry_display(f, atlas, 2000))
        .collect();
    format!(
        "[ {} | {} ; {} | {} ]",
        x.range_forest().encode(),
        x.wreath().sigma().to_cycles(),
        entries.join(", "),
        x.domain_forest().encode()
    )
}

/// Evaluate the boundary action of a groupoid element on an address in one
/// of its domain trees; mirrors TreePair::boundary_eval.
pub fn boundary_eval(
    x: &GroupoidElement,
    foot: usize,
    u: &Word,
) -> Result<Option<(usize, Word)>> {
    if foot == 0 || foot > x.feet() {
        return Err(Error::IndexOutOfRange {
            k: foot,
            n: x.feet(),
        });
    }
    u.validate(x.arity())?;
    let (lo, hi) = x.domain.leaf_span(foot - 1);
    let tree = &x.domain.trees()[foot - 1];
    for (local, p) in tree.leaf_addresses().iter().enumerate() {
        if u.letters().len() >= p.len() && &u.letters()[..p.len()] == p.letters() {
            let leaf = lo + local;
            debug_assert!(leaf <= hi);
            let target = x.w.sigma().apply(leaf);
            let (head, rlocal) = x.range.locate_leaf(target)?;
            let q = x.range.trees()[head].leaf_addresses()[rlocal - 1].clone();
            let v = Word(u.letters()[p.len()..].to_vec());
            let image = automata::evaluate(x.w.entry(leaf), &v)?;
            let mut out = q.letters().to_vec();
            out.extend_from_slice(image.letters());
            return Ok(Some((head + 1, Word(out))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::grigorchuk;

    #[test]
    fn compose_and_invert() {
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        let x = GroupoidElement::new(
            Forest::decode("cll,l", 2).unwrap(),
            WreathElement::new(
                Permutation::parse_cycles("(1 3 2)", 3).unwrap(),
                vec![g.a, b, automata::identity(2)],
                2,
            )
            .unwrap(),
            Forest::decode("l,cll", 2).unwrap(),
        )
        .unwrap();
        assert_eq!(x.heads(), 2);
        assert_eq!(x.feet(), 2);
        let e = x.compose(&x.invert().unwrap()).unwrap();
        let w = e.as_pure_wreath().unwrap().expect("identity is pure");
        assert!(w.is_identity());
        // feet/heads mismatch rejected
        let y = GroupoidElement::trivial(2, 3);
        assert!(matches!(
            x.compose(&y),
            Err(Error::FeetHeadsMismatch { feet: 2, heads: 3 })
        ));
    }

    #[test]
    fn direct_sum_associates() {
        let a = GroupoidElement::trivial(2, 1);
        let b = GroupoidElement::single_split(2, 1, 1).unwrap();
        let c = GroupoidElement::trivial(2, 2);
        let lhs = a.direct_sum(&b).unwrap().direct_sum(&c).unwrap();
        let rhs = a.direct_sum(&b.direct_sum(&c).unwrap()).unwrap();
        assert!(lhs.equal(&rhs).unwrap());
    }

    #[test]
    fn pure_wreath_reconstruction_roundtrip() {
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        let c = g.automaton.get("c").unwrap();
        let w = WreathElement::new(
            Permutation::parse_cycles("(1 2)", 2).unwrap(),
            vec![b, c],
            2,
        )
        .unwrap();
        let x = GroupoidElement::from_wreath(w.clone());
        // random-ish expansions
        let e = x.expand(1).unwrap().expand(2).unwrap().expand(4).unwrap();
        assert_eq!(e.leaves(), 5);
        let back = e.as_pure_wreath().unwrap().expect("still pure");
        assert!(back.equal(&w).unwrap());
        // a genuine splitting is not pure
        let s = GroupoidElement::single_split(2, 2, 1).unwrap();
        assert!(s.as_pure_wreath().unwrap().is_none());
    }

    #[test]
    fn literal_roundtrip() {
        let atlas =
            crate::automata::spec::parse("arity 2\nstate f: perm=(1 2); children=f,f\n").unwrap();
        let x = parse_groupoid_literal("[ cll , l | (1 2) ; id, f, id | l , cll ]", &atlas).unwrap();
        assert_eq!(x.heads(), 2);
        let text = print_groupoid_literal(&x, &atlas);
        let y = parse_groupoid_literal(&text, &atlas).unwrap();
        assert!(x.equal(&y).unwrap());
    }
}
