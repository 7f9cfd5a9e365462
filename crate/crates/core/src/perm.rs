//! Exact arithmetic in symmetric groups, plus the standard d-ary cloning
//! maps on them.
//!
//! Everything is 1-based: a permutation of degree n maps {1..n} to itself.
//! Products compose right-to-left: `(p * q)(i) = p(q(i))`, so in `p * q` the
//! factor `q` acts first. This convention is fixed once here and used by every
//! other module.

use crate::error::{Error, Result};
use std::fmt;

/// A permutation in one-line form: `images[i-1] = sigma(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n as u32).collect(),
        }
    }

    /// Build from one-line images (1-based). Checks bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidPermutation(format!(
                    "image {v} out of range 1..={n}"
                )));
            }
            if seen[v as usize - 1] {
                return Err(Error::InvalidPermutation(format!("image {v} repeated")));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// The transposition (a b) in degree n.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut p = Self::identity(n);
        if a == 0 || a > n || b == 0 || b > n {
            return Err(Error::IndexOutOfRange { k: a.max(b), n });
        }
        p.images.swap(a - 1, b - 1);
        Ok(p)
    }

    /// The long cycle (1 2 ... n).
    pub fn cycle(n: usize) -> Self {
        let mut images: Vec<u32> = (2..=n as u32).collect();
        images.push(1);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.degree());
        self.images[i - 1] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `(self * other)(i) = self(other(i))`: `other` applies first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: (1..=self.degree())
                .map(|i| self.apply(other.apply(i)) as u32)
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let n = self.degree();
        let mut images = vec![0u32; n];
        for i in 1..=n {
            images[self.apply(i) - 1] = i as u32;
        }
        Permutation { images }
    }

    pub fn power(&self, e: i64) -> Permutation {
        let n = self.degree();
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Permutation::identity(n);
        for _ in 0..e.unsigned_abs() {
            acc = base.compose(&acc).unwrap();
        }
        acc
    }

    /// Block sum: self acts on 1..m, other shifted to m+1..m+n.
    pub fn direct_sum(&self, other: &Permutation) -> Permutation {
        let m = self.degree() as u32;
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&v| v + m));
        Permutation { images }
    }

    /// Embed a permutation of degree d into S_n on the block {k..k+d-1},
    /// fixing everything else. This is the `rho^(k)` of the cloning maps.
    pub fn block_embed(&self, k: usize, n: usize) -> Result<Permutation> {
        let d = self.degree();
        if k == 0 || k + d - 1 > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        let mut images: Vec<u32> = (1..=n as u32).collect();
        for j in 1..=d {
            images[k + j - 2] = (k + self.apply(j) - 1) as u32;
        }
        Ok(Permutation { images })
    }

    /// The d-ary cloning map on symmetric groups: strand k splits into d
    /// parallel strands. Returns a permutation of degree n+d-1.
    pub fn clone_map(&self, k: usize, d: usize) -> Result<Permutation> {
        let n = self.degree();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        if d < 2 {
            return Err(Error::BadArity(d));
        }
        let sk = self.apply(k);
        let m = n + d - 1;
        let mut images = vec![0u32; m];
        for i in 1..=m {
            let v = if i <= k && i < k + d - 1 {
                // i <= k (and i != k+d-1 when d=1 cannot happen)
                let si = self.apply(i);
                if i == k || si <= sk {
                    si
                } else {
                    si + d - 1
                }
            } else if i > k && i < k + d - 1 {
                sk + i - k
            } else {
                // i >= k+d-1
                let si = self.apply(i - d + 1);
                if i > k + d - 1 && si < sk {
                    si
                } else {
                    si + d - 1
                }
            };
            images[i - 1] = v as u32;
        }
        Ok(Permutation { images })
    }

    /// Inverse of `clone_map` at position k: checks the block {k..k+d-1}
    /// maps to a contiguous increasing run, and returns the degree n-d+1
    /// preimage if so.
    pub fn unclone_map(&self, k: usize, d: usize) -> Option<Permutation> {
        let m = self.degree();
        if k == 0 || k + d - 1 > m || d < 2 {
            return None;
        }
        let c = self.apply(k);
        for t in 1..d {
            if self.apply(k + t) != c + t {
                return None;
            }
        }
        let n = m - d + 1;
        let collapse = |v: usize| -> u32 {
            if v <= c {
                v as u32
            } else {
                (v - d + 1) as u32
            }
        };
        let mut images = Vec::with_capacity(n);
        for i in 1..=n {
            let src = if i <= k { i } else { i + d - 1 };
            images.push(collapse(self.apply(src)));
        }
        let out = Permutation { images };
        if out.clone_map(k, d).as_ref() == Ok(self) {
            Some(out)
        } else {
            None
        }
    }

    /// Parse cycle notation, e.g. "(1 3 2)(4 5)" or "()" for the identity.
    /// Degree n must be supplied; cycles may not exceed it.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Permutation> {
        let mut images: Vec<u32> = (1..=n as u32).collect();
        let s = s.trim();
        if s.is_empty() || s == "()" || s == "id" || s == "e" {
            return Ok(Permutation { images });
        }
        let mut rest = s;
        let mut touched = vec![false; n];
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in cycles: {s}")))?;
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced ')' in cycles: {s}")))?
                + open;
            let body = &rest[open + 1..close];
            let pts: Vec<usize> = body
                .split(|c: char| c == ' ' || c == ',' || c == '~')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad cycle entry '{t}'")))
                })
                .collect::<Result<_>>()?;
            for &p in &pts {
                if p == 0 || p > n {
                    return Err(Error::Parse(format!("cycle point {p} exceeds degree {n}")));
                }
                if touched[p - 1] {
                    return Err(Error::Parse(format!("point {p} repeated in cycles")));
                }
                touched[p - 1] = true;
            }
            for w in 0..pts.len() {
                let from = pts[w];
                let to = pts[(w + 1) % pts.len()];
                images[from - 1] = to as u32;
            }
            rest = rest[close + 1..].trim_start();
        }
        Permutation::from_images(images)
    }

    /// Parse one-line form "[3,1,2]".
    pub fn parse_one_line(s: &str) -> Result<Permutation> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [..] one-line form: {s}")))?;
        let images: Vec<u32> = inner
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad one-line entry '{t}'")))
            })
            .collect::<std::result::Result<_, _>>()?;
        Permutation::from_images(images)
    }

    /// Cycle-notation printer; "()" for the identity.
    pub fn to_cycles(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 1..=n {
            if seen[start - 1] || self.apply(start) == start {
                seen[start - 1] = true;
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i - 1] {
                seen[i - 1] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&i.to_string());
                first = false;
                i = self.apply(i);
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    pub fn to_one_line(&self) -> String {
        let body: Vec<String> = self.images.iter().map(|v| v.to_string()).collect();
        format!("[{}]", body.join(","))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycles())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycles())
    }
}
