//! Line-oriented text format for wreath-recursion automata:
//!
//! ```text
//! arity 2
//! state a: perm=(1 2); children=e,e
//! state b: perm=(); children=a,c
//! ```
//!
//! The identity state `e` is predeclared and may not be redefined. Lines
//! starting with `#` are comments.

use super::engine::{store, ProvSet};
use super::{identity, AutRef};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use std::collections::HashMap;

/// An automaton loaded from (or printable to) the text format: named
/// states resolved to interned handles.
#[derive(Clone, Debug)]
pub struct LoadedAutomaton {
    pub d: usize,
    pub names: Vec<String>,
    pub refs: Vec<AutRef>,
    pub group_tag: u32,
}

impl LoadedAutomaton {
    pub fn get(&self, name: &str) -> Result<AutRef> {
        if name == "e" || name == "id" {
            return Ok(identity(self.d));
        }
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.refs[i])
            .ok_or_else(|| Error::Parse(format!("unknown state '{name}'")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, AutRef)> {
        self.names
            .iter()
            .map(|n| n.as_str())
            .zip(self.refs.iter().copied())
    }

    /// Name lookup by handle, for printing; `e` covers the identity.
    pub fn name_of(&self, r: AutRef) -> Option<&str> {
        if r == identity(self.d) {
            return Some("e");
        }
        self.names
            .iter()
            .zip(self.refs.iter())
            .find(|(_, &x)| x == r)
            .map(|(n, _)| n.as_str())
    }

    /// Evaluate a word over state names (e.g. "a*b^-1*c" or just "a") to a
    /// handle.
    pub fn element(&self, word: &str) -> Result<AutRef> {
        let word = word.trim();
        let mut acc = identity(self.d);
        if word.is_empty() || word == "1" {
            return Ok(acc);
        }
        for factor in word.split('*') {
            let factor = factor.trim();
            let (name, inv) = match factor.strip_suffix("^-1") {
                Some(base) => (base.trim(), true),
                None => (factor, false),
            };
            let mut f = self.get(name)?;
            if inv {
                f = super::aut_inverse(f)?;
            }
            acc = super::aut_product(acc, f)?;
        }
        Ok(acc)
    }
}

pub fn parse(text: &str) -> Result<LoadedAutomaton> {
    let mut d: Option<usize> = None;
    let mut names: Vec<String> = Vec::new();
    let mut perms: Vec<Permutation> = Vec::new();
    let mut child_names: Vec<Vec<String>> = Vec::new();
    for raw_line in text.lines() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("arity") {
            let v: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad arity line '{line}'")))?;
            if v < 2 {
                return Err(Error::BadArity(v));
            }
            d = Some(v);
            continue;
        }
        let rest = line
            .strip_prefix("state")
            .ok_or_else(|| Error::Parse(format!("unexpected line '{line}'")))?;
        let d = d.ok_or_else(|| Error::Parse("state before arity".into()))?;
        let (name, body) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in '{line}'")))?;
        let name = name.trim().to_string();
        if name.is_empty() || name == "e" || name == "id" {
            return Err(Error::Parse(format!("reserved or empty state name '{name}'")))?;
        }
        if names.contains(&name) {
            return Err(Error::Parse(format!("state '{name}' redefined")));
        }
        let mut perm = None;
        let mut children = None;
        for part in body.split(';') {
            let part = part.trim();
            if let Some(p) = part.strip_prefix("perm=") {
                perm = Some(Permutation::parse_cycles(p, d)?);
            } else if let Some(c) = part.strip_prefix("children=") {
                let kids: Vec<String> = c.split(',').map(|s| s.trim().to_string()).collect();
                if kids.len() != d {
                    return Err(Error::Parse(format!(
                        "state '{name}' must list {d} children"
                    )));
                }
                children = Some(kids);
            } else if !part.is_empty() {
                return Err(Error::Parse(format!("unexpected field '{part}'")));
            }
        }
        names.push(name);
        perms.push(perm.ok_or_else(|| Error::Parse("missing perm=".into()))?);
        child_names.push(children.ok_or_else(|| Error::Parse("missing children=".into()))?);
    }
    let d = d.ok_or_else(|| Error::Parse("missing arity line".into()))?;
    build(d, names, perms, child_names)
}

/// Assemble a named automaton directly (used by the group constructors).
pub fn build(
    d: usize,
    names: Vec<String>,
    perms: Vec<Permutation>,
    child_names: Vec<Vec<String>>,
) -> Result<LoadedAutomaton> {
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let n = names.len();
    // raw machine: named states 0..n, identity at n
    let mut raw_perms = perms.clone();
    raw_perms.push(Permutation::identity(d));
    let mut children: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    for (i, kids) in child_names.iter().enumerate() {
        let row = kids
            .iter()
            .map(|k| {
                if k == "e" || k == "id" {
                    Ok(n)
                } else {
                    index
                        .get(k.as_str())
                        .copied()
                        .ok_or_else(|| Error::Parse(format!("state '{}' has unknown child '{k}'", names[i])))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        children.push(row);
    }
    children.push(vec![n; d]);
    for p in &raw_perms {
        if p.degree() != d {
            return Err(Error::DegreeMismatch(p.degree(), d));
        }
    }
    let raw_states: Vec<(Permutation, Vec<usize>)> = raw_perms
        .iter()
        .cloned()
        .zip(children.iter().cloned())
        .collect();
    let refs = intern_named(d, &raw_states)?;
    let group_tag = super::new_group_tag();
    for &r in &refs {
        super::tag(r, group_tag);
    }
    Ok(LoadedAutomaton {
        d,
        names,
        refs: refs[..n].to_vec(),
        group_tag,
    })
}

fn intern_named(d: usize, raw_states: &[(Permutation, Vec<usize>)]) -> Result<Vec<AutRef>> {
    // Self-contained graph; reuse the store's raw interning via a small
    // adapter graph where every child is an index into the same list.
    let perms: Vec<Permutation> = raw_states.iter().map(|(p, _)| p.clone()).collect();
    let children: Vec<Vec<usize>> = raw_states.iter().map(|(_, c)| c.clone()).collect();
    Ok(store().intern_raw(d, perms, children, &ProvSet::new()))
}

/// Print in the same line-oriented format; includes every named state.
pub fn print(aut: &LoadedAutomaton) -> Result<String> {
    let mut out = format!("arity {}\n", aut.d);
    for (name, r) in aut.entries() {
        let perm = super::root_perm(r);
        let kids: Vec<String> = (1..=aut.d)
            .map(|i| {
                let c = super::child(r, i)?;
                aut.name_of(c)
                    .map(|s| s.to_string())
                    .ok_or_else(|| Error::Parse(format!("state of '{name}' has no name")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push_str(&format!(
            "state {name}: perm={}; children={}\n",
            perm.to_cycles(),
            kids.join(",")
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{aut_equal, Verdict3};

    const GRIG: &str = "arity 2\n\
                        state a: perm=(1 2); children=e,e\n\
                        state b: perm=(); children=a,c\n\
                        state c: perm=(); children=a,d\n\
                        state d: perm=(); children=e,b\n";

    #[test]
    fn parse_print_roundtrip() {
        let a1 = parse(GRIG).unwrap();
        let text = print(&a1).unwrap();
        let a2 = parse(&text).unwrap();
        for (name, r) in a1.entries() {
            assert_eq!(a2.get(name).unwrap(), r);
            assert_eq!(aut_equal(a2.get(name).unwrap(), r), Verdict3::True);
        }
        assert_eq!(text, print(&a2).unwrap());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse("arity 1\nstate a: perm=(); children=a\n").is_err());
        assert!(parse("state a: perm=(); children=a,a\n").is_err());
        assert!(parse("arity 2\nstate e: perm=(); children=e,e\n").is_err());
        assert!(parse("arity 2\nstate a: perm=(1 2); children=a\n").is_err());
        assert!(parse("arity 2\nstate a: perm=(1 2); children=a,zz\n").is_err());
        assert!(parse("arity 2\nstate a: perm=(1 3); children=a,a\n").is_err());
    }

    #[test]
    fn element_words() {
        let g = parse(GRIG).unwrap();
        let bc = g.element("b*c").unwrap();
        assert_eq!(bc, g.get("d").unwrap());
        let e = g.element("a*a^-1").unwrap();
        assert!(crate::automata::is_identity(e));
    }
}
