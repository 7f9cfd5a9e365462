//! Computational engine for self-similar groups acting on rooted d-ary
//! trees and the Thompson-like groups built from them via d-ary cloning
//! systems: exact symmetric-group arithmetic, wreath-recursion automata,
//! tree-pair arithmetic in the Nekrashevych groups V_d(G), the groupoid of
//! forest pairs with its coset poset, and desk-scale construction of the
//! associated polysimplicial complexes with finite connectivity
//! certificates.

pub mod error;
pub mod perm;
pub mod word;
pub mod tree;
pub mod automata;
pub mod cloning;
pub mod complex;
pub mod groupoid;
pub mod groups;

pub use automata::{AutRef, Verdict3};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use tree::{Forest, Tree};
pub use word::Word;
