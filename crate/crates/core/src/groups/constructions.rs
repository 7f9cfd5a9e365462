//! Self-similar groups from finite permutation groups and the free-group
//! automata of Vorobets-Vorobets type.

use crate::automata::{self, spec::LoadedAutomaton, AutRef};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Embed D <= S_d self-similarly: each generator sigma becomes the state
/// s = sigma(s, ..., s).
pub fn make_sd_embedding(d: usize, gens: &[Permutation]) -> Result<LoadedAutomaton> {
    if d < 2 {
        return Err(Error::BadArity(d));
    }
    let mut names = Vec::new();
    let mut perms = Vec::new();
    let mut children = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.degree() != d {
            return Err(Error::DegreeMismatch(g.degree(), d));
        }
        let name = format!("s{}", i + 1);
        children.push(vec![name.clone(); d]);
        names.push(name);
        perms.push(g.clone());
    }
    automata::spec::build(d, names, perms, children)
}

/// The recursively defined binary automorphisms
/// a = (1 2)(c, b), b = (1 2)(b, c), c = sigma_0(d_1, d_1),
/// d_i = sigma_i(d_{i+1}, d_{i+1}), d_n = sigma_n(a, a),
/// which generate a free group of rank n+3 when an odd number of the
/// sigma_i are nontrivial.
#[derive(Clone, Debug)]
pub struct VorobetsGroup {
    pub automaton: LoadedAutomaton,
    pub gens: Vec<(String, AutRef)>,
}

pub fn make_vorobets_free(n: usize, sigmas: &[Permutation]) -> Result<VorobetsGroup> {
    if n < 1 {
        return Err(Error::Precondition("vorobets needs n >= 1".into()));
    }
    if sigmas.len() != n + 1 {
        return Err(Error::Precondition(format!(
            "need sigma_0..sigma_{n}, got {}",
            sigmas.len()
        )));
    }
    for s in sigmas {
        if s.degree() != 2 {
            return Err(Error::DegreeMismatch(s.degree(), 2));
        }
    }
    let nontrivial = sigmas.iter().filter(|s| !s.is_identity()).count();
    if nontrivial % 2 == 0 {
        return Err(Error::Precondition(
            "an odd number of the sigma_i must be nontrivial".into(),
        ));
    }
    let swap = Permutation::transposition(2, 1, 2)?;
    let mut names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    let mut perms = vec![swap.clone(), swap, sigmas[0].clone()];
    let mut children = vec![
        vec!["c".to_string(), "b".to_string()],
        vec!["b".to_string(), "c".to_string()],
        vec!["d1".to_string(), "d1".to_string()],
    ];
    for i in 1..=n {
        names.push(format!("d{i}"));
        perms.push(sigmas[i].clone());
        let next = if i < n { format!("d{}", i + 1) } else { "a".to_string() };
        children.push(vec![next.clone(), next]);
    }
    let automaton = automata::spec::build(2, names.clone(), perms, children)?;
    let gens = names
        .iter()
        .map(|n| automaton.get(n).map(|r| (n.clone(), r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(VorobetsGroup { automaton, gens })
}

/// The instance used for the level-transitivity lemma: sigma_1 = (1 2),
/// all other sigma_i trivial.
pub fn vorobets_lemma_instance(n: usize) -> Result<VorobetsGroup> {
    let mut sigmas = vec![Permutation::identity(2); n + 1];
    sigmas[1] = Permutation::transposition(2, 1, 2)?;
    make_vorobets_free(n, &sigmas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{aut_product, evaluate, is_identity, Verdict3};
    use crate::word::Word;

    #[test]
    fn sd_embedding_binary_swap() {
        let d2 = make_sd_embedding(2, &[Permutation::transposition(2, 1, 2).unwrap()]).unwrap();
        let f = d2.get("s1").unwrap();
        // f = (1 2)(f, f): the swap of the kappa figure
        assert_eq!(
            evaluate(f, &Word::parse("112").unwrap()).unwrap(),
            Word::parse("221").unwrap()
        );
        assert!(is_identity(aut_product(f, f).unwrap()));
    }

    #[test]
    fn sd_embedding_s3_is_closed() {
        let gens = vec![
            Permutation::parse_cycles("(1 2)", 3).unwrap(),
            Permutation::parse_cycles("(1 2 3)", 3).unwrap(),
        ];
        let g = make_sd_embedding(3, &gens).unwrap();
        let s = g.get("s1").unwrap();
        let r = g.get("s2").unwrap();
        // the generated set closes to 6 elements under products, and states
        // stay inside it
        let mut ball = vec![automata::identity(3)];
        let mut frontier = ball.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for &g in &[s, r] {
                    let y = aut_product(x, g).unwrap();
                    if !ball.contains(&y) {
                        ball.push(y);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(ball.len(), 6);
        for &x in &ball {
            for i in 1..=3 {
                assert!(ball.contains(&automata::child(x, i).unwrap()));
            }
        }
    }

    #[test]
    fn vorobets_parity_enforced() {
        let id = Permutation::identity(2);
        assert!(make_vorobets_free(1, &[id.clone(), id]).is_err());
    }

    #[test]
    fn vorobets_generators_nontrivial_and_noncommuting() {
        let g = vorobets_lemma_instance(1).unwrap();
        for (_, r) in &g.gens {
            assert!(!is_identity(*r));
        }
        let a = g.automaton.get("a").unwrap();
        let b = g.automaton.get("b").unwrap();
        let ab = aut_product(a, b).unwrap();
        let ba = aut_product(b, a).unwrap();
        assert_eq!(automata::aut_equal(ab, ba), Verdict3::False);
        // witness on words of length <= 12
        let mut found = false;
        'outer: for len in 1..=12usize {
            for bits in 0..(1u32 << len) {
                let w = Word((0..len).map(|i| ((bits >> i) & 1) as u8 + 1).collect());
                if evaluate(ab, &w).unwrap() != evaluate(ba, &w).unwrap() {
                    found = true;
                    break 'outer;
                }
            }
        }
        assert!(found);
    }
}
