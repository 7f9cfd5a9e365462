//! Constructors for the self-similar groups of interest and the finite
//! checkers for the subgroup hypotheses (coarse self-similarity, orderly
//! pairs, nuclearity), plus virtual-endomorphism machinery.

pub mod constructions;
pub mod finite;
pub mod induced;
pub mod sunic;

pub use constructions::{make_sd_embedding, make_vorobets_free, vorobets_lemma_instance, VorobetsGroup};
pub use finite::FiniteGroupTable;
pub use induced::{CosetData, GWord, InducedAction, Normalizer};
pub use sunic::{fabrykowski_gupta, grigorchuk, make_sunic, SunicData, SunicGroup};

use crate::automata::{
    self, aut_equal, aut_inverse, aut_product, child, identity, is_identity, root_perm, AutRef,
    Verdict3,
};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::Tree;

/// Membership description for a subgroup H <= G.
#[derive(Clone, Debug)]
pub enum SubgroupSpec {
    /// Explicit element list; validated closed under inverse and product.
    FiniteEnumerated(Vec<AutRef>),
    /// H is all of G; membership is a provenance hint plus fuel-bounded
    /// ball search over the generators.
    WholeGroup {
        tag: Option<u32>,
        gens: Vec<AutRef>,
        fuel: usize,
    },
    /// Generated subgroup with fuel-bounded word search.
    Generated { gens: Vec<AutRef>, fuel: usize },
}

impl SubgroupSpec {
    pub fn finite(elements: Vec<AutRef>) -> Result<SubgroupSpec> {
        let spec = SubgroupSpec::FiniteEnumerated(elements);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let SubgroupSpec::FiniteEnumerated(list) = self {
            if list.is_empty() || !list.iter().any(|&x| is_identity(x)) {
                return Err(Error::Precondition(
                    "finite subgroup list must contain the identity".into(),
                ));
            }
            for &x in list {
                let inv = aut_inverse(x)?;
                if !list.iter().any(|&y| aut_equal(y, inv).is_true()) {
                    return Err(Error::Precondition(
                        "finite subgroup list not closed under inverse".into(),
                    ));
                }
                for &y in list {
                    let xy = aut_product(x, y)?;
                    if !list.iter().any(|&z| aut_equal(z, xy).is_true()) {
                        return Err(Error::Precondition(
                            "finite subgroup list not closed under product".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: AutRef) -> Verdict3 {
        match self {
            SubgroupSpec::FiniteEnumerated(list) => {
                for &y in list {
                    match aut_equal(x, y) {
                        Verdict3::True => return Verdict3::True,
                        Verdict3::Indeterminate => return Verdict3::Indeterminate,
                        Verdict3::False => {}
                    }
                }
                Verdict3::False
            }
            SubgroupSpec::WholeGroup { tag, gens, fuel } => {
                if is_identity(x) {
                    return Verdict3::True;
                }
                if let Some(t) = tag {
                    if automata::has_tag(x, *t) {
                        return Verdict3::True;
                    }
                }
                ball_search(gens, x, *fuel)
            }
            SubgroupSpec::Generated { gens, fuel } => {
                if is_identity(x) {
                    return Verdict3::True;
                }
                ball_search(gens, x, *fuel)
            }
        }
    }

    /// The element list when H is finite.
    pub fn elements(&self) -> Option<&[AutRef]> {
        match self {
            SubgroupSpec::FiniteEnumerated(list) => Some(list),
            _ => None,
        }
    }

    pub fn is_whole_group(&self) -> bool {
        matches!(self, SubgroupSpec::WholeGroup { .. })
    }
}

/// Breadth-first ball search for x in <gens>, adding at most `fuel` fresh
/// elements before giving up.
fn ball_search(gens: &[AutRef], x: AutRef, fuel: usize) -> Verdict3 {
    if gens.is_empty() {
        return Verdict3::from_bool(is_identity(x));
    }
    let d = automata::arity(gens[0]);
    let mut step: Vec<AutRef> = vec![];
    for &g in gens {
        step.push(g);
        match aut_inverse(g) {
            Ok(inv) => step.push(inv),
            Err(_) => return Verdict3::Indeterminate,
        }
    }
    let mut ball: Vec<AutRef> = vec![identity(d)];
    let mut frontier = ball.clone();
    loop {
        let mut next = Vec::new();
        for &y in &frontier {
            for &s in &step {
                let z = match aut_product(y, s) {
                    Ok(z) => z,
                    Err(_) => return Verdict3::Indeterminate,
                };
                match aut_equal(z, x) {
                    Verdict3::True => return Verdict3::True,
                    Verdict3::Indeterminate => return Verdict3::Indeterminate,
                    Verdict3::False => {}
                }
                if !ball.contains(&z) {
                    ball.push(z);
                    next.push(z);
                    if ball.len() > fuel {
                        return Verdict3::Indeterminate;
                    }
                }
            }
        }
        if next.is_empty() {
            return Verdict3::False; // ball closed without finding x
        }
        frontier = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoarseVerdict {
    Pass,
    /// h_list[h] has its child-th state outside H and A.
    Fail { h: usize, child: usize },
}

/// A-coarse self-similarity: every first-level state of every h in H lies
/// in H or in the artifact list A.
pub fn check_coarsely_self_similar(h_list: &[AutRef], artifacts: &[AutRef]) -> Result<CoarseVerdict> {
    for (hi, &h) in h_list.iter().enumerate() {
        let d = automata::arity(h);
        for i in 1..=d {
            let s = child(h, i)?;
            let inside = h_list
                .iter()
                .chain(artifacts.iter())
                .any(|&y| aut_equal(s, y).is_true());
            if !inside {
                return Ok(CoarseVerdict::Fail { h: hi, child: i });
            }
        }
    }
    Ok(CoarseVerdict::Pass)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderlyVerdict {
    Pass,
    Fail { condition: u8, detail: String },
}

/// The three orderly conditions on (H, A): artifacts act only at the root,
/// the only non-H state of an h sits at index rho(h)(1) and lies in A u H,
/// and distinct artifacts have distinct first-level images of 1.
pub fn check_orderly(h_list: &[AutRef], artifacts: &[AutRef]) -> Result<OrderlyVerdict> {
    for (ai, &a) in artifacts.iter().enumerate() {
        let d = automata::arity(a);
        for i in 1..=d {
            if !is_identity(child(a, i)?) {
                return Ok(OrderlyVerdict::Fail {
                    condition: 1,
                    detail: format!("artifact #{ai} has a nontrivial state at {i}"),
                });
            }
        }
    }
    for (hi, &h) in h_list.iter().enumerate() {
        let d = automata::arity(h);
        let special = root_perm(h).apply(1);
        for i in 1..=d {
            let s = child(h, i)?;
            let in_h = h_list.iter().any(|&y| aut_equal(s, y).is_true());
            let in_a = artifacts.iter().any(|&y| aut_equal(s, y).is_true());
            let ok = if i == special { in_h || in_a } else { in_h };
            if !ok {
                return Ok(OrderlyVerdict::Fail {
                    condition: 2,
                    detail: format!("state {i} of h#{hi} escapes (special index {special})"),
                });
            }
        }
    }
    for (i, &a) in artifacts.iter().enumerate() {
        for (j, &b) in artifacts.iter().enumerate() {
            if i < j && !aut_equal(a, b).is_true() && root_perm(a).apply(1) == root_perm(b).apply(1)
            {
                return Ok(OrderlyVerdict::Fail {
                    condition: 3,
                    detail: format!("artifacts #{i} and #{j} share first image"),
                });
            }
        }
    }
    Ok(OrderlyVerdict::Pass)
}

/// Nonempty freely reduced words over `n` generators, up to length max_len;
/// letters are +-(index+1).
pub fn reduced_words(n: usize, max_len: usize) -> Vec<Vec<i32>> {
    reduced_words_with_orders(&vec![None; n], max_len)
}

/// Reduced words where generators of known finite order only appear with
/// positive exponent runs shorter than their order (so e.g. x*x is skipped
/// for an involution x), and infinite-order generators get free reduction.
pub fn reduced_words_with_orders(orders: &[Option<usize>], max_len: usize) -> Vec<Vec<i32>> {
    let n = orders.len();
    let mut out: Vec<Vec<i32>> = Vec::new();
    let mut frontier: Vec<Vec<i32>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 1..=n as i32 {
                let order = orders[g as usize - 1];
                let signs: &[i32] = if order.is_some() { &[1] } else { &[1, -1] };
                for &sign in signs {
                    let s = sign * g;
                    if w.last() == Some(&-s) {
                        continue;
                    }
                    if let Some(m) = order {
                        let run = w.iter().rev().take_while(|&&x| x == s).count();
                        if run + 1 >= m {
                            continue;
                        }
                    }
                    let mut w2 = w.clone();
                    w2.push(s);
                    next.push(w2);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn word_display(word: &[i32], names: &[String]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter()
        .map(|&s| {
            let base = &names[s.unsigned_abs() as usize - 1];
            if s < 0 {
                format!("{base}^-1")
            } else {
                base.clone()
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

pub fn word_to_aut(word: &[i32], gens: &[AutRef], d: usize) -> Result<AutRef> {
    let mut acc = identity(d);
    for &s in word {
        let mut f = gens[s.unsigned_abs() as usize - 1];
        if s < 0 {
            f = aut_inverse(f)?;
        }
        acc = aut_product(acc, f)?;
    }
    Ok(acc)
}

/// Report of a bounded nuclearity check: for each word a minimal complete
/// subtree below which all states lie in H, or a failure record.
#[derive(Clone, Debug)]
pub struct NuclearReport {
    pub entries: Vec<(String, Tree)>,
    pub failures: Vec<String>,
}

impl NuclearReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each reduced word over the generators (length <= word_len), grow a
/// complete subtree greedily (expanding any leaf whose state is outside H)
/// until all leaf states lie in H or the depth cap is hit.
pub fn check_nuclear(
    gens: &[(String, AutRef)],
    h: &SubgroupSpec,
    word_len: usize,
    depth_cap: usize,
) -> Result<NuclearReport> {
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let refs: Vec<AutRef> = gens.iter().map(|(_, r)| *r).collect();
    let d = automata::arity(refs[0]);
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for word in reduced_words(refs.len(), word_len) {
        let g = word_to_aut(&word, &refs, d)?;
        let label = word_display(&word, &names);
        let mut tree = Tree::leaf(d);
        let mut states = vec![g];
        let outcome = loop {
            let mut expand_at = None;
            for (i, s) in states.iter().enumerate() {
                if !h.contains(*s).decided("H membership in check_nuclear")? {
                    expand_at = Some(i);
                    break;
                }
            }
            match expand_at {
                None => break Some(tree.clone()),
                Some(i) => {
                    if tree.leaf_addresses()[i].len() >= depth_cap {
                        break None;
                    }
                    let s = states[i];
                    let kids: Vec<AutRef> =
                        (1..=d).map(|j| child(s, j)).collect::<Result<_>>()?;
                    tree.add_caret(i + 1)?;
                    states.splice(i..=i, kids);
                }
            }
        };
        match outcome {
            Some(t) => entries.push((label, t)),
            None => failures.push(label),
        }
    }
    Ok(NuclearReport { entries, failures })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaithVerdict {
    Pass,
    /// A nonempty word acting trivially to the tested depth (bounded
    /// evidence of a kernel element, not a proof).
    Fail { word: String },
}

/// Bounded faithfulness certificate: every nonempty reduced word of length
/// <= word_len must move some vertex of depth <= depth. Words are freely
/// reduced; generators of known finite order can be declared via
/// `faithfulness_certificate_with_orders` so that their trivial powers are
/// not misreported as kernel evidence.
pub fn faithfulness_certificate(
    gens: &[(String, AutRef)],
    word_len: usize,
    depth: usize,
) -> Result<FaithVerdict> {
    faithfulness_certificate_with_orders(gens, &vec![None; gens.len()], word_len, depth)
}

pub fn faithfulness_certificate_with_orders(
    gens: &[(String, AutRef)],
    orders: &[Option<usize>],
    word_len: usize,
    depth: usize,
) -> Result<FaithVerdict> {
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let refs: Vec<AutRef> = gens.iter().map(|(_, r)| *r).collect();
    let mut inv_refs = Vec::with_capacity(refs.len());
    for &r in &refs {
        inv_refs.push(aut_inverse(r)?);
    }
    for word in reduced_words_with_orders(orders, word_len) {
        let factors: Vec<AutRef> = word
            .iter()
            .map(|&s| {
                if s > 0 {
                    refs[s as usize - 1]
                } else {
                    inv_refs[(-s) as usize - 1]
                }
            })
            .collect();
        if !acts_nontrivially_factors(&factors, depth)? {
            return Ok(FaithVerdict::Fail {
                word: word_display(&word, &names),
            });
        }
    }
    Ok(FaithVerdict::Pass)
}

/// Does f move some vertex of depth <= depth? Equivalently, does some state
/// at depth < depth carry a nontrivial root permutation?
pub fn acts_nontrivially(f: AutRef, depth: usize) -> Result<bool> {
    acts_nontrivially_factors(&[f], depth)
}

/// Same check for a product f_1 f_2 ... f_k given by its factors, without
/// building the product machine: states of the product are tracked as
/// factor vectors via (u g)_i = u_{rho(g)(i)} g_i.
pub fn acts_nontrivially_factors(factors: &[AutRef], depth: usize) -> Result<bool> {
    if factors.is_empty() {
        return Ok(false);
    }
    let d = automata::arity(factors[0]);
    let word_perm = |ws: &[AutRef]| -> Permutation {
        let mut p = Permutation::identity(d);
        for &f in ws {
            p = p.compose(&root_perm(f)).expect("same degree");
        }
        p
    };
    let word_child = |ws: &[AutRef], i: usize| -> Result<Vec<AutRef>> {
        let mut out = vec![identity(d); ws.len()];
        let mut cur = i;
        for t in (0..ws.len()).rev() {
            out[t] = child(ws[t], cur)?;
            cur = root_perm(ws[t]).apply(cur);
        }
        Ok(out)
    };
    let mut seen: std::collections::HashSet<Vec<AutRef>> = std::collections::HashSet::new();
    let mut frontier = vec![factors.to_vec()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for ws in frontier {
            if !word_perm(&ws).is_identity() {
                return Ok(true);
            }
            if seen.insert(ws.clone()) {
                for i in 1..=d {
                    next.push(word_child(&ws, i)?);
                }
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        frontier = next;
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grigorchuk_b_is_coarse_and_orderly() {
        let g = grigorchuk();
        let b = g.b_subgroup();
        let arts = g.artifacts();
        assert_eq!(
            check_coarsely_self_similar(&b, &arts).unwrap(),
            CoarseVerdict::Pass
        );
        assert_eq!(check_orderly(&b, &arts).unwrap(), OrderlyVerdict::Pass);
        // self-similar G with A = {id} is trivially coarse and orderly:
        // the embedded symmetric group closure gives a quick instance
        let s2 = make_sd_embedding(2, &[crate::perm::Permutation::transposition(2, 1, 2).unwrap()])
            .unwrap();
        let f = s2.get("s1").unwrap();
        let whole = vec![identity(2), f];
        let trivial_a = vec![identity(2)];
        assert_eq!(
            check_coarsely_self_similar(&whole, &trivial_a).unwrap(),
            CoarseVerdict::Pass
        );
        assert_eq!(check_orderly(&whole, &trivial_a).unwrap(), OrderlyVerdict::Pass);
    }

    #[test]
    fn gupta_sidki_coarse_but_not_orderly() {
        // d=3, a = (1 2 3), b = (a, a^-1, b): <b> with artifacts {id,a,a2}
        // is coarsely self-similar; with A = {a, id} it fails; and the pair
        // (<b>, <a>) is not orderly.
        let text = "arity 3\n\
                    state a: perm=(1 2 3); children=e,e,e\n\
                    state a2: perm=(1 3 2); children=e,e,e\n\
                    state b: perm=(); children=a,a2,b\n\
                    state b2: perm=(); children=a2,a,b2\n";
        let aut = crate::automata::spec::parse(text).unwrap();
        let (a, a2, b, b2) = (
            aut.get("a").unwrap(),
            aut.get("a2").unwrap(),
            aut.get("b").unwrap(),
            aut.get("b2").unwrap(),
        );
        assert_eq!(aut_product(a, a).unwrap(), a2);
        assert_eq!(aut_inverse(b).unwrap(), b2);
        let h = vec![identity(3), b, b2];
        let full_a = vec![identity(3), a, a2];
        assert_eq!(
            check_coarsely_self_similar(&h, &full_a).unwrap(),
            CoarseVerdict::Pass
        );
        assert_eq!(
            check_coarsely_self_similar(&h, &[identity(3), a]).unwrap(),
            CoarseVerdict::Fail { h: 1, child: 2 }
        );
        assert!(matches!(
            check_orderly(&h, &full_a).unwrap(),
            OrderlyVerdict::Fail { condition: 2, .. }
        ));
    }

    #[test]
    fn nuclear_check_grigorchuk() {
        let g = grigorchuk();
        let h = SubgroupSpec::finite(g.b_subgroup()).unwrap();
        let gens: Vec<(String, AutRef)> = g
            .automaton
            .entries()
            .map(|(n, r)| (n.to_string(), r))
            .collect();
        let report = check_nuclear(&gens, &h, 3, 8).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
        // H = G: every word passes with the trivial tree
        let whole = SubgroupSpec::WholeGroup {
            tag: Some(g.automaton.group_tag),
            gens: g.generators(),
            fuel: 4096,
        };
        let report = check_nuclear(&gens, &whole, 2, 2).unwrap();
        assert!(report.passed());
        assert!(report.entries.iter().all(|(_, t)| t.is_leaf()));
    }

    #[test]
    fn nuclear_check_fails_for_free_group() {
        let v = vorobets_lemma_instance(1).unwrap();
        let gens: Vec<(String, AutRef)> = v
            .gens
            .iter()
            .map(|(n, r)| (n.clone(), *r))
            .take(1)
            .collect();
        let trivial = SubgroupSpec::finite(vec![identity(2)]).unwrap();
        let report = check_nuclear(&gens, &trivial, 1, 10).unwrap();
        assert!(report.failures.contains(&"a".to_string()));
    }

    #[test]
    fn faithfulness_passes_and_fails() {
        let g = grigorchuk();
        let gens: Vec<(String, AutRef)> = g
            .automaton
            .entries()
            .map(|(n, r)| (n.to_string(), r))
            .collect();
        // all four Grigorchuk generators are involutions
        assert_eq!(
            faithfulness_certificate_with_orders(&gens, &[Some(2); 4], 2, 4).unwrap(),
            FaithVerdict::Pass
        );
        // with free reduction alone, a*a is (correctly) reported as acting
        // trivially -- it is the identity element of the group
        assert_eq!(
            faithfulness_certificate(&gens, 2, 4).unwrap(),
            FaithVerdict::Fail { word: "a*a".into() }
        );
        let broken = vec![("x".to_string(), identity(2))];
        assert_eq!(
            faithfulness_certificate(&broken, 1, 4).unwrap(),
            FaithVerdict::Fail { word: "x".into() }
        );
        let v = vorobets_lemma_instance(1).unwrap();
        let vg: Vec<(String, AutRef)> = v.gens.iter().map(|(n, r)| (n.clone(), *r)).collect();
        assert_eq!(
            faithfulness_certificate(&vg, 6, 16).unwrap(),
            FaithVerdict::Pass
        );
    }

    #[test]
    fn generated_membership_verdicts() {
        let g = grigorchuk();
        let b = g.automaton.get("b").unwrap();
        let c = g.automaton.get("c").unwrap();
        let d = g.automaton.get("d").unwrap();
        let sub = SubgroupSpec::Generated {
            gens: vec![b, c],
            fuel: 64,
        };
        assert_eq!(sub.contains(d), Verdict3::True); // bc = d
        assert_eq!(sub.contains(g.a), Verdict3::False); // ball closes without a
        let tiny = SubgroupSpec::Generated {
            gens: vec![g.a, b],
            fuel: 2,
        };
        assert_eq!(tiny.contains(d), Verdict3::Indeterminate);
    }
}
