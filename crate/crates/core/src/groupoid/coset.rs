//! H-cosets of groupoid elements, the splitting poset, least upper bounds
//! and elementary cores: the combinatorial engine behind the complexes.
//!
//! Throughout, [x]_H is the right coset x [1_n, S_n wr H, 1_n]; the Morse
//! function phi counts feet. Contexts carry PASS records of the coarse
//! self-similarity and orderly checks, which the enumeration of length-1
//! splittings relies on.

use super::GroupoidElement;
use crate::automata::{self, aut_equal, AutRef, Verdict3};
use crate::cloning::WreathElement;
use crate::error::{Error, Result};
use crate::groups::{check_coarsely_self_similar, check_orderly, CoarseVerdict, OrderlyVerdict, SubgroupSpec};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorClass {
    Trivial,
    /// Index into the context's deduped length-1 block splittings.
    Single(usize),
    /// The double split (caret, then caret on its first new foot).
    Double,
}

pub struct HContext {
    pub label: String,
    pub d: usize,
    pub h: SubgroupSpec,
    pub artifacts: Vec<AutRef>,
    /// Deduped ~_H-classes of length-1 splittings of [1_1]_H, one
    /// representative each; index 0 is the plain split [wedge, id, 1_d].
    block_splittings: Vec<GroupoidElement>,
    double_split: GroupoidElement,
    coset_key_memo: std::sync::Mutex<std::collections::HashMap<AutRef, Arc<[u8]>>>,
}

impl std::fmt::Debug for HContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HContext({}, d={})", self.label, self.d)
    }
}

impl HContext {
    /// Validate the (H, A) hypotheses and precompute the splitting classes.
    /// Fails loudly if the coarse or orderly check does not PASS.
    pub fn new(
        label: impl Into<String>,
        d: usize,
        h: SubgroupSpec,
        artifacts: Vec<AutRef>,
    ) -> Result<Arc<HContext>> {
        if d < 2 {
            return Err(Error::BadArity(d));
        }
        h.validate()?;
        let mut arts: Vec<AutRef> = vec![automata::identity(d)];
        for a in artifacts {
            if automata::arity(a) != d {
                return Err(Error::ArityMismatch(automata::arity(a), d));
            }
            if !arts.iter().any(|&x| aut_equal(x, a).is_true()) {
                arts.push(a);
            }
        }
        let reps: Vec<AutRef> = match &h {
            SubgroupSpec::FiniteEnumerated(list) => {
                match check_coarsely_self_similar(list, &arts)? {
                    CoarseVerdict::Pass => {}
                    CoarseVerdict::Fail { h, child } => {
                        return Err(Error::Precondition(format!(
                            "H is not A-coarsely self-similar (element {h}, state {child})"
                        )))
                    }
                }
                match check_orderly(list, &arts)? {
                    OrderlyVerdict::Pass => {}
                    OrderlyVerdict::Fail { condition, detail } => {
                        return Err(Error::Precondition(format!(
                            "(H, A) is not orderly (condition {condition}: {detail})"
                        )))
                    }
                }
                list.clone()
            }
            SubgroupSpec::WholeGroup { .. } => {
                if arts.len() != 1 {
                    return Err(Error::UnsupportedContext(
                        "H = G contexts use A = {id}".into(),
                    ));
                }
                vec![automata::identity(d)]
            }
            SubgroupSpec::Generated { .. } => {
                return Err(Error::UnsupportedContext(
                    "complex construction needs finite H or H = G".into(),
                ))
            }
        };
        let mut ctx = HContext {
            label: label.into(),
            d,
            h,
            artifacts: arts,
            block_splittings: Vec::new(),
            double_split: GroupoidElement::single_split(d, 1, 1)?
                .compose(&GroupoidElement::single_split(d, d, 1)?)?,
        };
        // Length-1 splitting classes of [1_1]_H: clone each h at the only
        // position; the orderly structure collapses these to one class per
        // realizable artifact residue.
        let plain = GroupoidElement::single_split(d, 1, 1)?;
        let mut blocks: Vec<GroupoidElement> = vec![plain.clone()];
        for &hr in &reps {
            if automata::is_identity(hr) {
                continue;
            }
            let w = WreathElement::new(crate::perm::Permutation::identity(1), vec![hr], d)?;
            let s = GroupoidElement::from_wreath(w).compose(&plain)?;
            if !blocks
                .iter()
                .map(|b| ctx.class_equal(b, &s))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .any(|&e| e)
            {
                blocks.push(s);
            }
        }
        ctx.block_splittings = blocks;
        Ok(Arc::new(ctx))
    }

    pub fn block_splittings(&self) -> &[GroupoidElement] {
        &self.block_splittings
    }

    pub fn double_split(&self) -> &GroupoidElement {
        &self.double_split
    }

    /// Doubles enter elementary sets only when at least two distinct
    /// length-1 classes exist at a position (equivalently A != {id} with a
    /// realizable artifact residue).
    pub fn doubles_allowed(&self) -> bool {
        self.block_splittings.len() >= 2
    }

    /// ~_H equality of raw groupoid elements: x ~ y iff x^-1 y lies in
    /// [1_n, S_n wr H, 1_n].
    pub fn class_equal(&self, x: &GroupoidElement, y: &GroupoidElement) -> Result<bool> {
        if x.heads() != y.heads() || x.feet() != y.feet() {
            return Ok(false);
        }
        let z = x.invert()?.compose(y)?;
        match z.as_pure_wreath()? {
            None => Ok(false),
            Some(w) => match w.entries_in(&self.h) {
                Verdict3::True => Ok(true),
                Verdict3::False => Ok(false),
                Verdict3::Indeterminate => Err(Error::Indeterminate("H membership in ~_H test")),
            },
        }
    }

    /// Place a 1-head element at foot position k among m feet.
    pub fn place_at(&self, s: &GroupoidElement, k: usize, m: usize) -> Result<GroupoidElement> {
        if k == 0 || k > m {
            return Err(Error::IndexOutOfRange { k, n: m });
        }
        let mut parts: Vec<GroupoidElement> = Vec::new();
        if k > 1 {
            parts.push(GroupoidElement::trivial(self.d, k - 1));
        }
        parts.push(s.clone());
        if k < m {
            parts.push(GroupoidElement::trivial(self.d, m - k));
        }
        GroupoidElement::direct_sum_all(&parts)
    }

    /// Factor a splitting z (heads = m) into per-head 1-head factors, up to
    /// reordering feet within ~_H. None if some foot's boundary straddles
    /// two heads (then z is not a splitting at all).
    pub fn factor_over_heads(&self, z: &GroupoidElement) -> Result<Option<Vec<GroupoidElement>>> {
        let m = z.heads();
        let sigma = z.wreath().sigma();
        let mut feet_of_head: Vec<Vec<usize>> = vec![Vec::new(); m];
        for j in 0..z.feet() {
            let (lo, hi) = z.domain_forest().leaf_span(j);
            let (head, _) = z.range_forest().locate_leaf(sigma.apply(lo))?;
            for leaf in lo..=hi {
                let (h2, _) = z.range_forest().locate_leaf(sigma.apply(leaf))?;
                if h2 != head {
                    return Ok(None);
                }
            }
            feet_of_head[head].push(j);
        }
        let mut out = Vec::with_capacity(m);
        for (i, feet) in feet_of_head.iter().enumerate() {
            if feet.is_empty() {
                return Ok(None);
            }
            let (rlo, _) = z.range_forest().leaf_span(i);
            let mut leaf_list: Vec<usize> = Vec::new();
            let mut domain_trees = Vec::new();
            for &j in feet {
                let (lo, hi) = z.domain_forest().leaf_span(j);
                leaf_list.extend(lo..=hi);
                domain_trees.push(z.domain_forest().trees()[j].clone());
            }
            let images: Vec<u32> = leaf_list
                .iter()
                .map(|&g| (sigma.apply(g) - rlo + 1) as u32)
                .collect();
            let local_sigma = crate::perm::Permutation::from_images(images)?;
            let entries: Vec<AutRef> = leaf_list.iter().map(|&g| z.wreath().entry(g)).collect();
            let w = WreathElement::new(local_sigma, entries, self.d)?;
            out.push(GroupoidElement::new(
                crate::tree::Forest::from_tree(z.range_forest().trees()[i].clone()),
                w,
                crate::tree::Forest::new(domain_trees)?,
            )?);
        }
        Ok(Some(out))
    }

    /// Classify a 1-head factor as an elementary form, if it is one.
    pub fn classify_factor(&self, f: &GroupoidElement) -> Result<Option<FactorClass>> {
        if f.feet() == 1 && self.class_equal(f, &GroupoidElement::trivial(self.d, 1))? {
            return Ok(Some(FactorClass::Trivial));
        }
        for (i, b) in self.block_splittings.iter().enumerate() {
            if self.class_equal(f, b)? {
                return Ok(Some(FactorClass::Single(i)));
            }
        }
        if self.doubles_allowed() && self.class_equal(f, &self.double_split)? {
            return Ok(Some(FactorClass::Double));
        }
        Ok(None)
    }

    /// Is z an elementary splitting (per-head factors all of elementary
    /// form)? Returns the factor classes if so.
    pub fn elementary_classes(&self, z: &GroupoidElement) -> Result<Option<Vec<FactorClass>>> {
        let Some(factors) = self.factor_over_heads(z)? else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(factors.len());
        for f in &factors {
            match self.classify_factor(f)? {
                Some(c) => out.push(c),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// A vertex [x]_H of the poset P_H, carried by a concrete representative.
#[derive(Clone)]
pub struct CosetVertex {
    pub ctx: Arc<HContext>,
    rep: GroupoidElement,
}

impl std::fmt::Debug for CosetVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?}]_H", self.rep)
    }
}

impl CosetVertex {
    pub fn new(ctx: Arc<HContext>, rep: GroupoidElement) -> Result<CosetVertex> {
        if rep.arity() != ctx.d {
            return Err(Error::ArityMismatch(rep.arity(), ctx.d));
        }
        let rep = rep.reduce()?;
        Ok(CosetVertex { ctx, rep })
    }

    /// The base vertex [1_1]_H.
    pub fn base(ctx: Arc<HContext>) -> CosetVertex {
        let d = ctx.d;
        CosetVertex {
            ctx,
            rep: GroupoidElement::trivial(d, 1),
        }
    }

    pub fn rep(&self) -> &GroupoidElement {
        &self.rep
    }

    /// The Morse function: number of feet.
    pub fn phi(&self) -> usize {
        self.rep.feet()
    }

    pub fn heads(&self) -> usize {
        self.rep.heads()
    }

    fn same_ctx(&self, other: &CosetVertex) -> Result<()> {
        if !Arc::ptr_eq(&self.ctx, &other.ctx) {
            return Err(Error::Precondition("vertices from different contexts".into()));
        }
        Ok(())
    }

    pub fn coset_equal(&self, other: &CosetVertex) -> Result<bool> {
        self.same_ctx(other)?;
        self.ctx.class_equal(&self.rep, &other.rep)
    }

    /// Right-multiply by a groupoid element (e.g. a splitting).
    pub fn extend(&self, s: &GroupoidElement) -> Result<CosetVertex> {
        CosetVertex::new(self.ctx.clone(), self.rep.compose(s)?)
    }

    /// All length-1 splittings of this vertex, up to ~_H, deterministically
    /// ordered (position-major, artifact class within).
    pub fn length1_splittings(&self) -> Result<Vec<CosetVertex>> {
        Ok(self
            .length1_candidates()?
            .into_iter()
            .map(|(_, _, v)| v)
            .collect())
    }

    /// Length-1 splittings together with their (position, block class)
    /// construction data.
    pub fn length1_candidates(&self) -> Result<Vec<(usize, usize, CosetVertex)>> {
        let m = self.phi();
        let mut out: Vec<(usize, usize, CosetVertex)> = Vec::new();
        for k in 1..=m {
            for (bi, block) in self.ctx.block_splittings().iter().enumerate() {
                let placed = self.ctx.place_at(block, k, m)?;
                let v = self.extend(&placed)?;
                let mut fresh = true;
                for (_, _, seen) in &out {
                    if seen.coset_equal(&v)? {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    out.push((k, bi, v));
                }
            }
        }
        Ok(out)
    }

    /// Poset order: [x]_H <= [y]_H iff x^-1 y is a splitting; decided by
    /// BFS over length-1 splittings, complete because every splitting
    /// factors into length-1 steps and phi-levels are finite.
    pub fn poset_leq(&self, other: &CosetVertex) -> Result<bool> {
        self.same_ctx(other)?;
        if self.heads() != other.heads() {
            return Err(Error::Precondition("poset_leq needs equal head counts".into()));
        }
        let target = other.phi();
        if self.phi() > target {
            return Ok(false);
        }
        if self.phi() == target {
            return self.coset_equal(other);
        }
        let mut frontier = vec![self.clone()];
        while !frontier.is_empty() {
            let mut next: Vec<CosetVertex> = Vec::new();
            for v in &frontier {
                for s in v.length1_splittings()? {
                    if s.phi() > target {
                        continue;
                    }
                    if s.phi() == target {
                        if s.coset_equal(other)? {
                            return Ok(true);
                        }
                        continue;
                    }
                    let mut fresh = true;
                    for seen in &next {
                        if seen.coset_equal(&s)? {
                            fresh = false;
                            break;
                        }
                    }
                    if fresh {
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        Ok(false)
    }

    /// Least upper bound of a finite set of length-1 splittings of this
    /// vertex, by the constructive grouping procedure: same-position groups
    /// with two or more distinct classes become the double split.
    pub fn lub_length1(&self, members: &[CosetVertex]) -> Result<CosetVertex> {
        let m = self.phi();
        let candidates = self.length1_candidates()?;
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
        for s in members {
            let mut matched = None;
            for (k, bi, v) in &candidates {
                if v.coset_equal(s)? {
                    matched = Some((*k, *bi));
                    break;
                }
            }
            let (k, bi) = matched.ok_or_else(|| {
                Error::Precondition("lub member is not a length-1 splitting of the vertex".into())
            })?;
            if !groups[k].contains(&bi) {
                groups[k].push(bi);
            }
        }
        let mut parts: Vec<GroupoidElement> = Vec::with_capacity(m);
        for k in 1..=m {
            let part = match groups[k].len() {
                0 => GroupoidElement::trivial(self.ctx.d, 1),
                1 => self.ctx.block_splittings()[groups[k][0]].clone(),
                _ => self.ctx.double_split().clone(),
            };
            parts.push(part);
        }
        self.extend(&GroupoidElement::direct_sum_all(&parts)?)
    }

    /// Elementary core of the interval [self, w]: the lub of the length-1
    /// splittings of self that lie below w.
    pub fn elementary_core(&self, w: &CosetVertex) -> Result<CosetVertex> {
        if !self.poset_leq(w)? {
            return Err(Error::Precondition("elementary_core needs v <= w".into()));
        }
        let mut members = Vec::new();
        for s in self.length1_splittings()? {
            if s.poset_leq(w)? {
                members.push(s);
            }
        }
        if members.is_empty() {
            return Ok(self.clone());
        }
        self.lub_length1(&members)
    }

    pub fn is_elementary_interval(&self, w: &CosetVertex) -> Result<bool> {
        self.elementary_core(w)?.coset_equal(w)
    }

    /// The relation v prec w: v and w lie in a common elementary interval;
    /// equivalently v <= w and v^-1 w is an elementary splitting (per-foot
    /// factors are elementary forms).
    pub fn prec(&self, w: &CosetVertex) -> Result<bool> {
        self.same_ctx(w)?;
        if self.heads() != w.heads() {
            return Ok(false);
        }
        if self.coset_equal(w)? {
            return Ok(true);
        }
        if self.phi() >= w.phi() {
            return Ok(false);
        }
        let z = self.rep.invert()?.compose(&w.rep)?;
        Ok(self.ctx.elementary_classes(&z)?.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::parse_groupoid_literal;
    use crate::groups::grigorchuk;
    use crate::perm::Permutation;
    use crate::tree::Forest;

    fn grig_ctx() -> Arc<HContext> {
        let g = grigorchuk();
        HContext::new(
            "grig",
            2,
            SubgroupSpec::finite(g.b_subgroup()).unwrap(),
            g.artifacts(),
        )
        .unwrap()
    }

    fn v2_ctx() -> Arc<HContext> {
        HContext::new(
            "v2",
            2,
            SubgroupSpec::finite(vec![automata::identity(2)]).unwrap(),
            vec![automata::identity(2)],
        )
        .unwrap()
    }

    #[test]
    fn grig_context_has_two_splitting_classes() {
        let ctx = grig_ctx();
        // residues of cloning 1, b, c, d at the only position: id and a
        assert_eq!(ctx.block_splittings().len(), 2);
        assert!(ctx.doubles_allowed());
        let v2 = v2_ctx();
        assert_eq!(v2.block_splittings().len(), 1);
        assert!(!v2.doubles_allowed());
    }

    #[test]
    fn coset_equality_examples() {
        let ctx = grig_ctx();
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        // [1_2, (1 2)(b, c), 1_2]_H = [1_2, id, 1_2]_H (everything in S wr H)
        let c = g.automaton.get("c").unwrap();
        let w = WreathElement::new(
            Permutation::transposition(2, 1, 2).unwrap(),
            vec![b, c],
            2,
        )
        .unwrap();
        let v1 = CosetVertex::new(ctx.clone(), GroupoidElement::from_wreath(w)).unwrap();
        let v2 = CosetVertex::new(ctx.clone(), GroupoidElement::trivial(2, 2)).unwrap();
        assert!(v1.coset_equal(&v2).unwrap());
        // [wedge, (a, id), 1_2]_H != [wedge, (id, id), 1_2]_H  (a outside H)
        let split = GroupoidElement::single_split(2, 1, 1).unwrap();
        let with_a = split
            .clone()
            .compose(&GroupoidElement::from_wreath(
                WreathElement::from_single(2, 2, 1, g.a).unwrap(),
            ))
            .unwrap();
        let va = CosetVertex::new(ctx.clone(), with_a).unwrap();
        let vid = CosetVertex::new(ctx.clone(), split).unwrap();
        assert!(!va.coset_equal(&vid).unwrap());
        assert!(va.coset_equal(&va).unwrap());
    }

    #[test]
    fn figure_splitting_equals_direct_sum() {
        // the 2-head length-2 splitting equals the direct sum of two 1-head
        // length-1 splittings under ~_H
        let ctx = grig_ctx();
        let g = grigorchuk();
        let (b, c, d) = (
            g.automaton.get("b").unwrap(),
            g.automaton.get("c").unwrap(),
            g.automaton.get("d").unwrap(),
        );
        let f0 = GroupoidElement::from_wreath(
            WreathElement::new(Permutation::transposition(2, 1, 2).unwrap(), vec![b, c], 2)
                .unwrap(),
        );
        let f1 = GroupoidElement::new(
            Forest::decode("cll,l", 2).unwrap(),
            WreathElement::identity(2, 3),
            Forest::trivial(2, 3),
        )
        .unwrap();
        let f2 = GroupoidElement::new(
            Forest::decode("l,l,cll", 2).unwrap(),
            WreathElement::new(
                Permutation::parse_cycles("(2 3 4)", 4).unwrap(),
                vec![d, b, c, d],
                2,
            )
            .unwrap(),
            Forest::trivial(2, 4),
        )
        .unwrap();
        let lambda = f0.compose(&f1).unwrap().compose(&f2).unwrap();
        // direct sum form: the strand labeled h_2=c feeds head 1, h_1=b head 2
        let lam1 = GroupoidElement::from_wreath(
            WreathElement::new(Permutation::identity(1), vec![c], 2).unwrap(),
        )
        .compose(&GroupoidElement::single_split(2, 1, 1).unwrap())
        .unwrap();
        let lam2 = GroupoidElement::from_wreath(
            WreathElement::new(Permutation::identity(1), vec![b], 2).unwrap(),
        )
        .compose(&GroupoidElement::single_split(2, 1, 1).unwrap())
        .unwrap();
        let sum = lam1.direct_sum(&lam2).unwrap();
        let va = CosetVertex::new(ctx.clone(), lambda).unwrap();
        let vb = CosetVertex::new(ctx.clone(), sum).unwrap();
        assert!(va.coset_equal(&vb).unwrap());
    }

    #[test]
    fn grig_base_has_two_splittings() {
        let ctx = grig_ctx();
        let base = CosetVertex::base(ctx);
        let splits = base.length1_splittings().unwrap();
        assert_eq!(splits.len(), 2);
        for s in &splits {
            assert_eq!(s.phi(), 2);
            assert!(base.poset_leq(s).unwrap());
            assert!(!s.poset_leq(&base.clone()).is_ok_and(|b| b));
        }
        // H = G context: exactly phi(v) splittings
        let g = grigorchuk();
        let whole = HContext::new(
            "grig-whole",
            2,
            SubgroupSpec::WholeGroup {
                tag: Some(g.automaton.group_tag),
                gens: g.generators(),
                fuel: 4096,
            },
            vec![],
        )
        .unwrap();
        let b2 = CosetVertex::new(whole.clone(), GroupoidElement::trivial(2, 3)).unwrap();
        assert_eq!(b2.length1_splittings().unwrap().len(), 3);
    }

    #[test]
    fn poset_reflexive_and_ordered() {
        let ctx = grig_ctx();
        let base = CosetVertex::base(ctx.clone());
        assert!(base.poset_leq(&base).unwrap());
        let split = CosetVertex::new(ctx, GroupoidElement::single_split(2, 1, 1).unwrap()).unwrap();
        assert!(base.poset_leq(&split).unwrap());
        assert!(!split.poset_leq(&base).unwrap());
    }

    #[test]
    fn lub_of_both_splittings_is_the_double_split() {
        let ctx = grig_ctx();
        let base = CosetVertex::base(ctx.clone());
        let splits = base.length1_splittings().unwrap();
        let lub = base.lub_length1(&splits).unwrap();
        assert_eq!(lub.phi(), 3);
        let expected = CosetVertex::new(ctx, ctx_double(&base)).unwrap();
        assert!(lub.coset_equal(&expected).unwrap());
        for s in &splits {
            assert!(s.poset_leq(&lub).unwrap());
        }
        // single-member lub is the member itself
        let single = base.lub_length1(&splits[..1].to_vec()).unwrap();
        assert!(single.coset_equal(&splits[0]).unwrap());
    }

    fn ctx_double(base: &CosetVertex) -> GroupoidElement {
        base.rep()
            .compose(base.ctx.double_split())
            .unwrap()
    }

    #[test]
    fn disjoint_positions_lub_is_direct_sum() {
        // d=3 trivial-H context over [1_3]_H: lub of splits at feet 1 and 3
        // is the disjoint double split with phi = 7
        let ctx = HContext::new(
            "v3",
            3,
            SubgroupSpec::finite(vec![automata::identity(3)]).unwrap(),
            vec![automata::identity(3)],
        )
        .unwrap();
        let v = CosetVertex::new(ctx.clone(), GroupoidElement::trivial(3, 3)).unwrap();
        let s1 = v
            .extend(&ctx.place_at(&ctx.block_splittings()[0], 1, 3).unwrap())
            .unwrap();
        let s3 = v
            .extend(&ctx.place_at(&ctx.block_splittings()[0], 3, 3).unwrap())
            .unwrap();
        let lub = v.lub_length1(&[s1.clone(), s3.clone()]).unwrap();
        assert_eq!(lub.phi(), 7);
        assert!(s1.poset_leq(&lub).unwrap());
        assert!(s3.poset_leq(&lub).unwrap());
    }

    #[test]
    fn elementary_core_and_prec() {
        let ctx = grig_ctx();
        let base = CosetVertex::base(ctx.clone());
        // core of the trivial interval
        assert!(base.elementary_core(&base).unwrap().coset_equal(&base).unwrap());
        // the interval up to the double split is elementary by construction
        let dbl = CosetVertex::new(ctx.clone(), ctx.double_split().clone()).unwrap();
        assert!(base.is_elementary_interval(&dbl).unwrap());
        assert!(base.prec(&dbl).unwrap());
        // a deep caret is not elementary: split twice at the *last* foot
        let deep = GroupoidElement::single_split(2, 1, 1)
            .unwrap()
            .compose(&GroupoidElement::single_split(2, 2, 2).unwrap())
            .unwrap();
        let vdeep = CosetVertex::new(ctx.clone(), deep).unwrap();
        assert!(base.poset_leq(&vdeep).unwrap());
        assert!(!base.is_elementary_interval(&vdeep).unwrap());
        assert!(!base.prec(&vdeep).unwrap());
    }

    #[test]
    fn literal_vertices_work() {
        let ctx = grig_ctx();
        let g = grigorchuk();
        let x = parse_groupoid_literal("[ cll | () ; a, id | l , l ]", &g.automaton).unwrap();
        let v = CosetVertex::new(ctx, x).unwrap();
        assert_eq!(v.phi(), 2);
        assert_eq!(v.heads(), 1);
    }
}
