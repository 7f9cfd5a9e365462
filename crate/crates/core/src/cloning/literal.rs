//! Text literals for tree-pair elements:
//!
//! ```text
//! [ cll | (1 2) ; id, f | cll ]
//! ```
//!
//! range tree | permutation ; tuple entries | domain tree. Entries are
//! words over the states of an automaton atlas ("id"/"e" for the identity,
//! products like "a*b^-1" allowed).

use super::{TreePair, WreathElement};
use crate::automata::{self, spec::LoadedAutomaton, AutRef};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::Tree;

pub fn parse_tree_pair(text: &str, atlas: &LoadedAutomaton) -> Result<TreePair> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse("element literal must be [ ... ]".into()))?;
    let parts: Vec<&str> = inner.split('|').collect();
    if parts.len() != 3 {
        return Err(Error::Parse("element literal needs two '|' separators".into()));
    }
    let d = atlas.d;
    let range = Tree::decode(parts[0], d)?;
    let domain = Tree::decode(parts[2], d)?;
    let w = parse_wreath(parts[1], range.leaves(), atlas)?;
    TreePair::new(range, w, domain)
}

pub(crate) fn parse_wreath(text: &str, n: usize, atlas: &LoadedAutomaton) -> Result<WreathElement> {
    let (perm_part, tuple_part) = match text.split_once(';') {
        Some((p, t)) => (p.trim(), t.trim()),
        None => (text.trim(), ""),
    };
    let sigma = Permutation::parse_cycles(perm_part, n)?;
    let tuple: Vec<AutRef> = if tuple_part.is_empty() {
        vec![automata::identity(atlas.d); n]
    } else {
        tuple_part
            .split(',')
            .map(|t| atlas.element(t))
            .collect::<Result<Vec<_>>>()?
    };
    if tuple.len() != n {
        return Err(Error::Parse(format!(
            "tuple lists {} entries for {} leaves",
            tuple.len(),
            n
        )));
    }
    WreathElement::new(sigma, tuple, atlas.d)
}

/// Shortest word over the atlas states equal to f, by bounded ball search;
/// falls back to the raw handle id.
pub fn entry_display(f: AutRef, atlas: &LoadedAutomaton, fuel: usize) -> String {
    if automata::is_identity(f) {
        return "id".into();
    }
    if let Some(name) = atlas.name_of(f) {
        return name.to_string();
    }
    let gens: Vec<(String, AutRef)> = atlas.entries().map(|(n, r)| (n.to_string(), r)).collect();
    let mut seen: Vec<AutRef> = vec![automata::identity(atlas.d)];
    let mut frontier: Vec<(AutRef, String)> = vec![(automata::identity(atlas.d), String::new())];
    while seen.len() < fuel {
        let mut next = Vec::new();
        for (x, wx) in &frontier {
            for (name, g) in &gens {
                let y = match automata::aut_product(*x, *g) {
                    Ok(y) => y,
                    Err(_) => continue,
                };
                if seen.contains(&y) {
                    continue;
                }
                let wy = if wx.is_empty() {
                    name.clone()
                } else {
                    format!("{wx}*{name}")
                };
                if y == f {
                    return wy;
                }
                seen.push(y);
                next.push((y, wy));
                if seen.len() >= fuel {
                    break;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    format!("#{f:?}")
}

pub fn print_tree_pair(t: &TreePair, atlas: &LoadedAutomaton) -> String {
    let entries: Vec<String> = t
        .wreath()
        .tuple()
        .iter()
        .map(|&f| entry_display(f, atlas, 2000))
        .collect();
    format!(
        "[ {} | {} ; {} | {} ]",
        t.range_tree().encode(),
        t.wreath().sigma().to_cycles(),
        entries.join(", "),
        t.domain_tree().encode()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::spec;

    fn atlas() -> LoadedAutomaton {
        spec::parse("arity 2\nstate f: perm=(1 2); children=f,f\n").unwrap()
    }

    #[test]
    fn parse_print_roundtrip() {
        let a = atlas();
        let t = parse_tree_pair("[ cll | (1 2) ; id, f | cll ]", &a).unwrap();
        assert_eq!(t.leaves(), 2);
        let text = print_tree_pair(&t, &a);
        let t2 = parse_tree_pair(&text, &a).unwrap();
        assert!(t.equal(&t2).unwrap());
    }

    #[test]
    fn parse_rejects_malformed() {
        let a = atlas();
        assert!(parse_tree_pair("cll | () | cll", &a).is_err());
        assert!(parse_tree_pair("[ cll | () ; id | cll ]", &a).is_err()); // 1 entry, 2 leaves
        assert!(parse_tree_pair("[ cll | (1 2) ; id, zz | cll ]", &a).is_err());
        assert!(parse_tree_pair("[ cll | (1 2 3) ; id, f | cll ]", &a).is_err());
    }

    #[test]
    fn displays_products_as_words() {
        let a = atlas();
        let f = a.get("f").unwrap();
        assert_eq!(entry_display(f, &a, 100), "f");
        assert_eq!(entry_display(automata::identity(2), &a, 100), "id");
    }
}
