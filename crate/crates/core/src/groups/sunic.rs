//! Abstract Sunic groups: A = <a> cyclic of order d acting on the first
//! level, B a finite group mapped into Aut(T_d) by the wreath recursion
//! b = (omega(b), id, ..., id, rho(b)).

use super::finite::FiniteGroupTable;
use crate::automata::{self, spec::LoadedAutomaton, AutRef};
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Debug)]
pub struct SunicData {
    pub d: usize,
    pub b_group: FiniteGroupTable,
    /// omega[b] = exponent j with omega(b) = a^j (0 means trivial).
    pub omega: Vec<usize>,
    /// rho[b] = index of rho(b) in the B table.
    pub rho: Vec<usize>,
}

impl SunicData {
    /// Validate the homomorphism and orbit conditions.
    pub fn validate(&self) -> Result<()> {
        let n = self.b_group.order();
        if self.d < 2 {
            return Err(Error::BadArity(self.d));
        }
        if self.omega.len() != n || self.rho.len() != n {
            return Err(Error::Precondition(
                "omega/rho must be defined on all of B".into(),
            ));
        }
        if self.omega.iter().any(|&j| j >= self.d) {
            return Err(Error::Precondition("omega exponent out of range".into()));
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.b_group.mult[x][y];
                if self.omega[xy] != (self.omega[x] + self.omega[y]) % self.d {
                    return Err(Error::Precondition(
                        "omega is not a homomorphism to A".into(),
                    ));
                }
            }
        }
        if !self.b_group.is_automorphism(&self.rho) {
            return Err(Error::Precondition("rho is not an automorphism of B".into()));
        }
        // No nontrivial rho-orbit may lie entirely in ker(omega) (else the
        // action would fail to be faithful).
        for b in 1..n {
            let mut x = b;
            let mut all_in_kernel = true;
            loop {
                if self.omega[x] != 0 {
                    all_in_kernel = false;
                }
                x = self.rho[x];
                if x == b {
                    break;
                }
            }
            if all_in_kernel {
                return Err(Error::Precondition(format!(
                    "rho-orbit of '{}' lies in ker(omega)",
                    self.b_group.names[b]
                )));
            }
        }
        Ok(())
    }

    /// Parse `d=2; B=K4{1,b,c,d}; omega: b->a, c->a, d->1; rho: b->c, c->d, d->b`.
    pub fn parse(text: &str) -> Result<SunicData> {
        let mut d = None;
        let mut b_group = None;
        let mut omega_pairs: Vec<(String, String)> = Vec::new();
        let mut rho_pairs: Vec<(String, String)> = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() || part.starts_with('#') {
                continue;
            }
            if let Some(v) = part.strip_prefix("d=") {
                d = Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad arity '{v}'")))?,
                );
            } else if let Some(v) = part.strip_prefix("B=") {
                b_group = Some(FiniteGroupTable::parse(v)?);
            } else if let Some(v) = part.strip_prefix("omega:") {
                omega_pairs = parse_arrows(v)?;
            } else if let Some(v) = part.strip_prefix("rho:") {
                rho_pairs = parse_arrows(v)?;
            } else {
                return Err(Error::Parse(format!("unexpected clause '{part}'")));
            }
        }
        let d = d.ok_or_else(|| Error::Parse("missing d=".into()))?;
        let b_group = b_group.ok_or_else(|| Error::Parse("missing B=".into()))?;
        let n = b_group.order();
        let mut omega = vec![0usize; n];
        for (from, to) in &omega_pairs {
            let i = b_group.index_of(from)?;
            omega[i] = parse_a_power(to, d)?;
        }
        let mut rho: Vec<usize> = (0..n).collect();
        for (from, to) in &rho_pairs {
            rho[b_group.index_of(from)?] = b_group.index_of(to)?;
        }
        let data = SunicData {
            d,
            b_group,
            omega,
            rho,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn print(&self) -> String {
        let names = &self.b_group.names;
        let omega: Vec<String> = (1..names.len())
            .map(|i| {
                let target = match self.omega[i] {
                    0 => "1".to_string(),
                    1 => "a".to_string(),
                    j => format!("a^{j}"),
                };
                format!("{}->{}", names[i], target)
            })
            .collect();
        let rho: Vec<String> = (1..names.len())
            .map(|i| format!("{}->{}", names[i], names[self.rho[i]]))
            .collect();
        format!(
            "d={}; B={}; omega: {}; rho: {}",
            self.d,
            self.b_group.print(),
            omega.join(", "),
            rho.join(", ")
        )
    }
}

fn parse_arrows(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.split_once("->")
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("expected 'x->y' in '{t}'")))
        })
        .collect()
}

fn parse_a_power(s: &str, d: usize) -> Result<usize> {
    let s = s.trim();
    if s == "1" || s == "id" || s == "e" {
        return Ok(0);
    }
    if s == "a" {
        return Ok(1);
    }
    if let Some(rest) = s.strip_prefix("a^").or_else(|| s.strip_prefix('a')) {
        let j: usize = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad a-power '{s}'")))?;
        return Ok(j % d);
    }
    Err(Error::Parse(format!("bad omega target '{s}'")))
}

/// A realized Sunic group: generators as interned automorphisms.
#[derive(Clone, Debug)]
pub struct SunicGroup {
    pub data: SunicData,
    pub automaton: LoadedAutomaton,
    /// a = (1 ... d)(id, ..., id)
    pub a: AutRef,
    /// the nontrivial elements of B in table order, as automorphisms
    pub b_elements: Vec<(String, AutRef)>,
}

impl SunicGroup {
    /// All of B as a subgroup list (identity included).
    pub fn b_subgroup(&self) -> Vec<AutRef> {
        let mut out = vec![automata::identity(self.data.d)];
        out.extend(self.b_elements.iter().map(|(_, r)| *r));
        out
    }

    /// The artifact set A = {id, a, a^2, ..., a^(d-1)}.
    pub fn artifacts(&self) -> Vec<AutRef> {
        let mut out = vec![automata::identity(self.data.d)];
        let mut cur = self.a;
        for _ in 1..self.data.d {
            out.push(cur);
            cur = automata::aut_product(cur, self.a).unwrap();
        }
        out
    }

    /// Generators {a} followed by the nontrivial B elements.
    pub fn generators(&self) -> Vec<AutRef> {
        let mut out = vec![self.a];
        out.extend(self.b_elements.iter().map(|(_, r)| *r));
        out
    }
}

/// Realize the abstract Sunic group as automaton states.
pub fn make_sunic(data: SunicData) -> Result<SunicGroup> {
    data.validate()?;
    let d = data.d;
    let b = &data.b_group;
    // Named states: a-powers a, a2, ..., then nontrivial B elements.
    let mut names: Vec<String> = Vec::new();
    let mut perms: Vec<Permutation> = Vec::new();
    let mut children: Vec<Vec<String>> = Vec::new();
    let a_name = |j: usize| -> String {
        match j {
            0 => "e".to_string(),
            1 => "a".to_string(),
            j => format!("a{j}"),
        }
    };
    let cycle = Permutation::cycle(d);
    for j in 1..d {
        names.push(a_name(j));
        perms.push(cycle.power(j as i64));
        children.push(vec!["e".to_string(); d]);
    }
    for i in 1..b.order() {
        names.push(b.names[i].clone());
        perms.push(Permutation::identity(d));
        let mut kids = vec!["e".to_string(); d];
        kids[0] = a_name(data.omega[i]);
        let rho_i = data.rho[i];
        // rho is an automorphism, so rho(b) is nontrivial for b nontrivial.
        kids[d - 1] = b.names[rho_i].clone();
        children.push(kids);
    }
    let automaton = crate::automata::spec::build(d, names, perms, children)?;
    let a = automaton.get("a")?;
    let b_elements = (1..b.order())
        .map(|i| {
            automaton
                .get(&b.names[i])
                .map(|r| (b.names[i].clone(), r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SunicGroup {
        data,
        automaton,
        a,
        b_elements,
    })
}

pub const GRIGORCHUK_SPEC: &str =
    "d=2; B=K4{1,b,c,d}; omega: b->a, c->a, d->1; rho: b->c, c->d, d->b";

/// d=3 instance with B = Z/3: the Fabrykowski-Gupta group.
pub const FABRYKOWSKI_GUPTA_SPEC: &str = "d=3; B=C3{1,b,b2}; omega: b->a, b2->a^2; rho: b->b, b2->b2";

pub fn grigorchuk() -> SunicGroup {
    make_sunic(SunicData::parse(GRIGORCHUK_SPEC).unwrap()).unwrap()
}

pub fn fabrykowski_gupta() -> SunicGroup {
    make_sunic(SunicData::parse(FABRYKOWSKI_GUPTA_SPEC).unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{aut_product, child, evaluate, is_identity, root_perm};
    use crate::word::Word;

    #[test]
    fn grigorchuk_matches_standard_recursion() {
        let g = grigorchuk();
        let a = g.a;
        let b = g.automaton.get("b").unwrap();
        let c = g.automaton.get("c").unwrap();
        let d = g.automaton.get("d").unwrap();
        assert_eq!(root_perm(a).to_cycles(), "(1 2)");
        assert_eq!(child(b, 1).unwrap(), a);
        assert_eq!(child(b, 2).unwrap(), c);
        assert_eq!(child(c, 1).unwrap(), a);
        assert_eq!(child(c, 2).unwrap(), d);
        assert!(is_identity(child(d, 1).unwrap()));
        assert_eq!(child(d, 2).unwrap(), b);
        assert_eq!(
            evaluate(a, &Word::parse("21").unwrap()).unwrap(),
            Word::parse("11").unwrap()
        );
    }

    #[test]
    fn trivial_b_gives_cyclic_top_action() {
        let data = SunicData {
            d: 3,
            b_group: FiniteGroupTable::cyclic(1, vec!["1".into()]).unwrap(),
            omega: vec![0],
            rho: vec![0],
        };
        let g = make_sunic(data).unwrap();
        assert!(g.b_elements.is_empty());
        let a3 = aut_product(aut_product(g.a, g.a).unwrap(), g.a).unwrap();
        assert!(is_identity(a3));
        for s in 1..=3 {
            assert!(is_identity(child(g.a, s).unwrap()));
        }
    }

    #[test]
    fn orbit_condition_rejected() {
        // d=3, B=C3, omega trivial: the whole rho-orbit of b is in ker(omega).
        let c3 = FiniteGroupTable::parse("C3{1,b,b2}").unwrap();
        let data = SunicData {
            d: 3,
            b_group: c3,
            omega: vec![0, 0, 0],
            rho: vec![0, 1, 2],
        };
        assert!(data.validate().is_err());
    }

    #[test]
    fn fabrykowski_gupta_recursion() {
        let g = fabrykowski_gupta();
        let b = g.automaton.get("b").unwrap();
        assert_eq!(child(b, 1).unwrap(), g.a);
        assert!(is_identity(child(b, 2).unwrap()));
        assert_eq!(child(b, 3).unwrap(), b);
    }

    #[test]
    fn spec_text_roundtrip() {
        let data = SunicData::parse(GRIGORCHUK_SPEC).unwrap();
        let reparsed = SunicData::parse(&data.print()).unwrap();
        assert_eq!(data.omega, reparsed.omega);
        assert_eq!(data.rho, reparsed.rho);
        assert_eq!(data.d, reparsed.d);
    }
}
