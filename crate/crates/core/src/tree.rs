//! Finite rooted d-ary trees and ordered forests of them.
//!
//! Trees are shapes only (every internal node has exactly d children); leaves
//! are numbered 1..n left to right, globally across a forest. The text
//! encoding is preorder over {c, l}: a 2-caret is "cll", the 3-leaf
//! left-caret binary tree is "cclll".

use crate::error::{Error, Result};
use crate::word::Word;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeNode {
    Leaf,
    Caret(Vec<TreeNode>),
}

impl TreeNode {
    pub fn leaves_count(&self) -> usize {
        self.leaves()
    }

    fn leaves(&self) -> usize {
        match self {
            TreeNode::Leaf => 1,
            TreeNode::Caret(kids) => kids.iter().map(|k| k.leaves()).sum(),
        }
    }

    fn check_arity(&self, d: usize) -> bool {
        match self {
            TreeNode::Leaf => true,
            TreeNode::Caret(kids) => kids.len() == d && kids.iter().all(|k| k.check_arity(d)),
        }
    }

    fn encode(&self, out: &mut String) {
        match self {
            TreeNode::Leaf => out.push('l'),
            TreeNode::Caret(kids) => {
                out.push('c');
                for k in kids {
                    k.encode(out);
                }
            }
        }
    }

    fn leaf_addresses(&self, prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
        match self {
            TreeNode::Leaf => out.push(Word(prefix.clone())),
            TreeNode::Caret(kids) => {
                for (i, k) in kids.iter().enumerate() {
                    prefix.push(i as u8 + 1);
                    k.leaf_addresses(prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    /// Replace the k-th leaf (1-based within this subtree) by a d-caret.
    /// Returns leaves consumed if k was not inside this subtree.
    fn add_caret(&mut self, k: usize, d: usize) -> std::result::Result<(), usize> {
        match self {
            TreeNode::Leaf => {
                if k == 1 {
                    *self = TreeNode::Caret(vec![TreeNode::Leaf; d]);
                    Ok(())
                } else {
                    Err(1)
                }
            }
            TreeNode::Caret(kids) => {
                let mut rem = k;
                for kid in kids.iter_mut() {
                    match kid.add_caret(rem, d) {
                        Ok(()) => return Ok(()),
                        Err(used) => rem -= used,
                    }
                }
                Err(k - rem)
            }
        }
    }

    /// If leaves k..k+d-1 are the children of a single caret, remove it.
    fn remove_caret(&mut self, k: usize, d: usize) -> std::result::Result<bool, usize> {
        match self {
            TreeNode::Leaf => Err(1),
            TreeNode::Caret(kids) => {
                if k == 1 && kids.iter().all(|kid| *kid == TreeNode::Leaf) {
                    *self = TreeNode::Leaf;
                    return Ok(true);
                }
                let mut rem = k;
                for kid in kids.iter_mut() {
                    let n = kid.leaves();
                    if rem <= n {
                        return match kid.remove_caret(rem, d) {
                            Ok(done) => Ok(done),
                            Err(_) => Ok(false),
                        };
                    }
                    rem -= n;
                }
                Err(k - rem)
            }
        }
    }

    fn union(&self, other: &TreeNode, d: usize) -> TreeNode {
        match (self, other) {
            (TreeNode::Leaf, t) => t.clone(),
            (t, TreeNode::Leaf) => t.clone(),
            (TreeNode::Caret(a), TreeNode::Caret(b)) => TreeNode::Caret(
                a.iter().zip(b.iter()).map(|(x, y)| x.union(y, d)).collect(),
            ),
        }
    }

    fn contains(&self, other: &TreeNode) -> bool {
        match (self, other) {
            (_, TreeNode::Leaf) => true,
            (TreeNode::Leaf, TreeNode::Caret(_)) => false,
            (TreeNode::Caret(a), TreeNode::Caret(b)) => {
                a.iter().zip(b.iter()).all(|(x, y)| x.contains(y))
            }
        }
    }

    fn decode(chars: &mut std::slice::Iter<'_, u8>, d: usize) -> Result<TreeNode> {
        match chars.next() {
            Some(b'l') => Ok(TreeNode::Leaf),
            Some(b'c') => {
                let kids = (0..d)
                    .map(|_| TreeNode::decode(chars, d))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TreeNode::Caret(kids))
            }
            Some(c) => Err(Error::Parse(format!("bad tree character '{}'", *c as char))),
            None => Err(Error::Parse("truncated tree encoding".into())),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    d: usize,
    root: TreeNode,
}

impl Tree {
    pub fn leaf(d: usize) -> Tree {
        Tree {
            d,
            root: TreeNode::Leaf,
        }
    }

    /// The single d-caret.
    pub fn caret(d: usize) -> Tree {
        Tree {
            d,
            root: TreeNode::Caret(vec![TreeNode::Leaf; d]),
        }
    }

    /// The complete tree with all leaves at depth `depth`.
    pub fn complete(d: usize, depth: usize) -> Tree {
        let mut t = Tree::leaf(d);
        for _ in 0..depth {
            let n = t.leaves();
            for k in (1..=n).rev() {
                t.add_caret(k).unwrap();
            }
        }
        t
    }

    pub fn from_node(d: usize, root: TreeNode) -> Result<Tree> {
        if d < 2 {
            return Err(Error::BadArity(d));
        }
        if !root.check_arity(d) {
            return Err(Error::Parse("caret with wrong number of children".into()));
        }
        Ok(Tree { d, root })
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn leaves(&self) -> usize {
        self.root.leaves()
    }

    pub fn is_leaf(&self) -> bool {
        self.root == TreeNode::Leaf
    }

    pub fn node(&self) -> &TreeNode {
        &self.root
    }

    pub fn leaf_addresses(&self) -> Vec<Word> {
        let mut out = Vec::new();
        self.root.leaf_addresses(&mut Vec::new(), &mut out);
        out
    }

    pub fn node_at(&self, w: &Word) -> Option<&TreeNode> {
        let mut cur = &self.root;
        for &x in w.letters() {
            match cur {
                TreeNode::Leaf => return None,
                TreeNode::Caret(kids) => cur = kids.get(x as usize - 1)?,
            }
        }
        Some(cur)
    }

    /// Is the vertex at w an internal (caret) node of this tree?
    pub fn is_caret_at(&self, w: &Word) -> bool {
        matches!(self.node_at(w), Some(TreeNode::Caret(_)))
    }

    pub fn add_caret(&mut self, k: usize) -> Result<()> {
        let n = self.leaves();
        self.root
            .add_caret(k, self.d)
            .map_err(|_| Error::IndexOutOfRange { k, n })
    }

    pub fn with_caret(&self, k: usize) -> Result<Tree> {
        let mut t = self.clone();
        t.add_caret(k)?;
        Ok(t)
    }

    /// Remove the caret whose leaves are k..k+d-1, if they are siblings.
    pub fn remove_caret(&mut self, k: usize) -> Result<bool> {
        let n = self.leaves();
        if k == 0 || k + self.d - 1 > n {
            return Err(Error::IndexOutOfRange { k, n });
        }
        self.root
            .remove_caret(k, self.d)
            .map_err(|_| Error::IndexOutOfRange { k, n })
    }

    /// Leafwise least upper bound under "is a rooted complete subtree of".
    pub fn union(&self, other: &Tree) -> Result<Tree> {
        if self.d != other.d {
            return Err(Error::ArityMismatch(self.d, other.d));
        }
        Ok(Tree {
            d: self.d,
            root: self.root.union(&other.root, self.d),
        })
    }

    pub fn contains(&self, other: &Tree) -> bool {
        self.d == other.d && self.root.contains(&other.root)
    }

    pub fn encode(&self) -> String {
        let mut s = String::new();
        self.root.encode(&mut s);
        s
    }

    pub fn decode(s: &str, d: usize) -> Result<Tree> {
        if d < 2 {
            return Err(Error::BadArity(d));
        }
        let bytes = s.trim().as_bytes().to_vec();
        let mut it = bytes.iter();
        let root = TreeNode::decode(&mut it, d)?;
        if it.next().is_some() {
            return Err(Error::Parse(format!("trailing characters in tree '{s}'")));
        }
        Ok(Tree { d, root })
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

/// Ordered forest of d-ary trees with globally numbered leaves.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub fn new(trees: Vec<Tree>) -> Result<Forest> {
        if trees.is_empty() {
            return Err(Error::Parse("forest must be nonempty".into()));
        }
        let d = trees[0].arity();
        for t in &trees {
            if t.arity() != d {
                return Err(Error::ArityMismatch(d, t.arity()));
            }
        }
        Ok(Forest { trees })
    }

    /// The forest 1_n of n bare roots.
    pub fn trivial(d: usize, n: usize) -> Forest {
        Forest {
            trees: vec![Tree::leaf(d); n],
        }
    }

    /// The forest with a single caret on leaf k of 1_n.
    pub fn single_caret(d: usize, n: usize, k: usize) -> Result<Forest> {
        let mut f = Forest::trivial(d, n);
        f.add_caret(k)?;
        Ok(f)
    }

    pub fn from_tree(t: Tree) -> Forest {
        Forest { trees: vec![t] }
    }

    pub fn arity(&self) -> usize {
        self.trees[0].arity()
    }

    pub fn roots(&self) -> usize {
        self.trees.len()
    }

    pub fn leaves(&self) -> usize {
        self.trees.iter().map(|t| t.leaves()).sum()
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn is_trivial(&self) -> bool {
        self.trees.iter().all(|t| t.is_leaf())
    }

    /// (tree index 0-based, local leaf 1-based) of global leaf k.
    pub fn locate_leaf(&self, k: usize) -> Result<(usize, usize)> {
        let mut rem = k;
        for (i, t) in self.trees.iter().enumerate() {
            let n = t.leaves();
            if rem <= n {
                return Ok((i, rem));
            }
            rem -= n;
        }
        Err(Error::IndexOutOfRange {
            k,
            n: self.leaves(),
        })
    }

    /// Global leaf range (1-based, inclusive) of tree i (0-based).
    pub fn leaf_span(&self, i: usize) -> (usize, usize) {
        let before: usize = self.trees[..i].iter().map(|t| t.leaves()).sum();
        (before + 1, before + self.trees[i].leaves())
    }

    pub fn add_caret(&mut self, k: usize) -> Result<()> {
        let (i, local) = self.locate_leaf(k)?;
        self.trees[i].add_caret(local)
    }

    pub fn with_caret(&self, k: usize) -> Result<Forest> {
        let mut f = self.clone();
        f.add_caret(k)?;
        Ok(f)
    }

    pub fn remove_caret(&mut self, k: usize) -> Result<bool> {
        let d = self.arity();
        let (i, local) = self.locate_leaf(k)?;
        let (_, hi) = self.leaf_span(i);
        if k + d - 1 > hi {
            return Ok(false); // block crosses a tree boundary
        }
        self.trees[i].remove_caret(local)
    }

    pub fn union(&self, other: &Forest) -> Result<Forest> {
        if self.roots() != other.roots() {
            return Err(Error::FeetHeadsMismatch {
                feet: self.roots(),
                heads: other.roots(),
            });
        }
        let trees = self
            .trees
            .iter()
            .zip(other.trees.iter())
            .map(|(a, b)| a.union(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Forest { trees })
    }

    pub fn contains(&self, other: &Forest) -> bool {
        self.roots() == other.roots()
            && self
                .trees
                .iter()
                .zip(other.trees.iter())
                .all(|(a, b)| a.contains(b))
    }

    pub fn direct_sum(&self, other: &Forest) -> Forest {
        let mut trees = self.trees.clone();
        trees.extend(other.trees.iter().cloned());
        Forest { trees }
    }

    /// Address of global leaf k: (root index 1-based, word within that tree).
    pub fn leaf_address(&self, k: usize) -> Result<(usize, Word)> {
        let (i, local) = self.locate_leaf(k)?;
        let addrs = self.trees[i].leaf_addresses();
        Ok((i + 1, addrs[local - 1].clone()))
    }

    pub fn encode(&self) -> String {
        let parts: Vec<String> = self.trees.iter().map(|t| t.encode()).collect();
        parts.join(",")
    }

    pub fn decode(s: &str, d: usize) -> Result<Forest> {
        let trees = s
            .split(',')
            .map(|t| Tree::decode(t, d))
            .collect::<Result<Vec<_>>>()?;
        Forest::new(trees)
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_count_mod_invariant() {
        let d = 3;
        let mut t = Tree::leaf(d);
        t.add_caret(1).unwrap();
        t.add_caret(2).unwrap();
        assert_eq!(t.leaves(), 5);
        assert_eq!(t.leaves() % (d - 1), 1 % (d - 1));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let t = Tree::decode("cclll", 2).unwrap();
        assert_eq!(t.leaves(), 3);
        assert_eq!(t.encode(), "cclll");
        let u = Tree::decode("clcll", 2).unwrap();
        assert_ne!(t, u);
        assert!(Tree::decode("cll", 3).is_err());
        assert!(Tree::decode("cxl", 2).is_err());
        let f = Forest::decode("cll,l", 2).unwrap();
        assert_eq!(f.roots(), 2);
        assert_eq!(f.leaves(), 3);
        assert_eq!(f.encode(), "cll,l");
    }

    #[test]
    fn caret_add_remove_roundtrip() {
        let d = 2;
        let t = Tree::caret(d); // cll
        let t1 = t.with_caret(2).unwrap(); // clcll
        assert_eq!(t1.encode(), "clcll");
        let mut t2 = t1.clone();
        assert!(t2.remove_caret(2).unwrap());
        assert_eq!(t2, t);
        // leaves 1..2 of clcll are not siblings
        let mut t3 = t1.clone();
        assert!(!t3.remove_caret(1).unwrap());
    }

    #[test]
    fn union_is_lub() {
        let a = Tree::decode("cclll", 2).unwrap();
        let b = Tree::decode("clcll", 2).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.encode(), "ccllcll");
        assert!(u.contains(&a) && u.contains(&b));
    }

    #[test]
    fn leaf_addresses_in_order() {
        let t = Tree::decode("cclll", 2).unwrap();
        let addrs: Vec<String> = t.leaf_addresses().iter().map(|w| w.to_string()).collect();
        assert_eq!(addrs, vec!["11", "12", "2"]);
    }

    #[test]
    fn forest_leaf_location() {
        let f = Forest::decode("cll,l,cll", 2).unwrap();
        assert_eq!(f.locate_leaf(3).unwrap(), (1, 1));
        assert_eq!(f.leaf_span(2), (4, 5));
        let (root, w) = f.leaf_address(5).unwrap();
        assert_eq!((root, w.to_string().as_str()), (3, "2"));
    }
}
