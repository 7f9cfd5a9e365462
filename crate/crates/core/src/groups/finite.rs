//! Small finite groups given by multiplication tables, just enough to
//! carry the B-data of abstract Sunic groups and finite coset arithmetic.

use crate::error::{Error, Result};

/// A finite group with named elements; index 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    pub kind: String,
    pub names: Vec<String>,
    pub mult: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
}

impl FiniteGroupTable {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn id(&self) -> usize {
        0
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Parse(format!("unknown element '{name}'")))
    }

    /// Cyclic group of order n; element i is g^i.
    pub fn cyclic(n: usize, names: Vec<String>) -> Result<FiniteGroupTable> {
        if names.len() != n || n == 0 {
            return Err(Error::Parse(format!("C{n} needs exactly {n} names")));
        }
        let mult = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let inv = (0..n).map(|i| (n - i) % n).collect();
        Ok(FiniteGroupTable {
            kind: format!("C{n}"),
            names,
            mult,
            inv,
        })
    }

    /// Klein four group; elements id, x, y, xy in the given name order.
    pub fn klein_four(names: Vec<String>) -> Result<FiniteGroupTable> {
        if names.len() != 4 {
            return Err(Error::Parse("K4 needs exactly 4 names".into()));
        }
        // xor table on {0,1,2,3}
        let mult = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
        let inv = (0..4).collect();
        Ok(FiniteGroupTable {
            kind: "K4".into(),
            names,
            mult,
            inv,
        })
    }

    /// Parse "K4{1,b,c,d}" or "C3{1,g,g2}".
    pub fn parse(s: &str) -> Result<FiniteGroupTable> {
        let s = s.trim();
        let open = s
            .find('{')
            .ok_or_else(|| Error::Parse(format!("expected '{{' in group spec '{s}'")))?;
        let close = s
            .rfind('}')
            .ok_or_else(|| Error::Parse(format!("expected '}}' in group spec '{s}'")))?;
        let kind = s[..open].trim();
        let names: Vec<String> = s[open + 1..close]
            .split(',')
            .map(|t| t.trim().to_string())
            .collect();
        if kind == "K4" {
            FiniteGroupTable::klein_four(names)
        } else if let Some(n) = kind.strip_prefix('C') {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad cyclic order in '{kind}'")))?;
            FiniteGroupTable::cyclic(n, names)
        } else {
            Err(Error::Parse(format!("unknown finite group kind '{kind}'")))
        }
    }

    pub fn print(&self) -> String {
        format!("{}{{{}}}", self.kind, self.names.join(","))
    }

    /// Check that a self-map given elementwise is a homomorphism.
    pub fn is_endomorphism(&self, image: &[usize]) -> bool {
        let n = self.order();
        image.len() == n
            && image.iter().all(|&v| v < n)
            && (0..n).all(|x| (0..n).all(|y| image[self.mult[x][y]] == self.mult[image[x]][image[y]]))
    }

    pub fn is_automorphism(&self, image: &[usize]) -> bool {
        let mut seen = vec![false; self.order()];
        self.is_endomorphism(image)
            && image.iter().all(|&v| {
                let fresh = !seen[v];
                seen[v] = true;
                fresh
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_four_structure() {
        let k4 = FiniteGroupTable::parse("K4{1,b,c,d}").unwrap();
        let (b, c, d) = (1, 2, 3);
        assert_eq!(k4.mult[b][c], d);
        assert_eq!(k4.mult[b][b], 0);
        assert_eq!(k4.inv[c], c);
        assert_eq!(k4.print(), "K4{1,b,c,d}");
        // rho: b -> c -> d -> b is an automorphism
        assert!(k4.is_automorphism(&[0, 2, 3, 1]));
        // b -> b, c -> b is not even well defined as a hom
        assert!(!k4.is_endomorphism(&[0, 1, 1, 3]));
    }

    #[test]
    fn cyclic_structure() {
        let c3 = FiniteGroupTable::parse("C3{1,g,g2}").unwrap();
        assert_eq!(c3.mult[1][2], 0);
        assert_eq!(c3.inv[1], 2);
        assert!(c3.is_automorphism(&[0, 2, 1]));
    }
}
