//! Strand-diagram export: the range tree as splits on top, the wreath
//! permutation as arrows in the middle (labels at arrow bases), and the
//! domain tree as merges at the bottom. Deterministic output.

use super::literal::entry_display;
use super::TreePair;
use crate::automata::spec::LoadedAutomaton;
use crate::error::{Error, Result};
use crate::tree::Tree;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramFormat {
    Dot,
    Tikz,
}

impl DiagramFormat {
    pub fn parse(s: &str) -> Result<DiagramFormat> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(DiagramFormat::Dot),
            "tikz" => Ok(DiagramFormat::Tikz),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn node_id(prefix: &str, w: &Word) -> String {
    if w.is_empty() {
        format!("{prefix}_root")
    } else {
        format!("{prefix}_{w}")
    }
}

fn internal_vertices(t: &Tree) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = vec![Word::root()];
    while let Some(w) = stack.pop() {
        if t.is_caret_at(&w) {
            out.push(w.clone());
            for i in (1..=t.arity()).rev() {
                stack.push(w.child(i as u8));
            }
        }
    }
    out
}

pub fn export(t: &TreePair, atlas: &LoadedAutomaton, format: DiagramFormat) -> Result<String> {
    match format {
        DiagramFormat::Dot => Ok(export_dot(t, atlas)),
        DiagramFormat::Tikz => Ok(export_tikz(t, atlas)),
    }
}

fn labels(t: &TreePair, atlas: &LoadedAutomaton) -> Vec<String> {
    t.wreath()
        .tuple()
        .iter()
        .map(|&f| entry_display(f, atlas, 2000))
        .collect()
}

fn export_dot(t: &TreePair, atlas: &LoadedAutomaton) -> String {
    let d = t.arity();
    let mut out = String::from("digraph strand {\n  rankdir=TB;\n  node [shape=point];\n");
    // splits: range tree, root at top, edges parent -> child
    for v in internal_vertices(t.range_tree()) {
        for i in 1..=d {
            out.push_str(&format!(
                "  {} -> {};\n",
                node_id("s", &v),
                node_id("s", &v.child(i as u8))
            ));
        }
    }
    // merges: domain tree upside down, edges child -> parent
    for v in internal_vertices(t.domain_tree()) {
        for i in 1..=d {
            out.push_str(&format!(
                "  {} -> {};\n",
                node_id("m", &v.child(i as u8)),
                node_id("m", &v)
            ));
        }
    }
    // middle arrows with labels at bases
    let range_leaves = t.range_tree().leaf_addresses();
    let domain_leaves = t.domain_tree().leaf_addresses();
    let labels = labels(t, atlas);
    for i in 1..=t.leaves() {
        let from = node_id("m", &domain_leaves[i - 1]);
        let to = node_id("s", &range_leaves[t.wreath().sigma().apply(i) - 1]);
        out.push_str(&format!(
            "  {from} -> {to} [label=\"{}\", taillabel=\"{}\"];\n",
            labels[i - 1],
            labels[i - 1]
        ));
    }
    out.push_str("}\n");
    out
}

/// Leaf-indexed x coordinates; internal vertices centered over their leaf
/// spans. Returns (word, x, depth) triples.
fn layout(t: &Tree) -> Vec<(Word, f64, usize)> {
    let mut out = Vec::new();
    let leaves = t.leaf_addresses();
    let mut stack = vec![Word::root()];
    while let Some(w) = stack.pop() {
        let span: Vec<usize> = leaves
            .iter()
            .enumerate()
            .filter(|(_, l)| l.len() >= w.len() && &l.letters()[..w.len()] == w.letters())
            .map(|(i, _)| i + 1)
            .collect();
        let x = (*span.first().unwrap() + *span.last().unwrap()) as f64 / 2.0;
        out.push((w.clone(), x, w.len()));
        if t.is_caret_at(&w) {
            for i in (1..=t.arity()).rev() {
                stack.push(w.child(i as u8));
            }
        }
    }
    out
}

fn export_tikz(t: &TreePair, atlas: &LoadedAutomaton) -> String {
    let depth_r = t
        .range_tree()
        .leaf_addresses()
        .iter()
        .map(|w| w.len())
        .max()
        .unwrap_or(0) as f64;
    let mut out = String::from("\\begin{tikzpicture}[line width=0.8pt]\n");
    // range tree above y = 0, root on top
    let top = layout(t.range_tree());
    let y_of_r = |depth: usize| depth_r - depth as f64 + 1.0;
    for (w, x, depth) in &top {
        if t.range_tree().is_caret_at(w) {
            for i in 1..=t.arity() {
                let c = w.child(i as u8);
                let (_, cx, cd) = top.iter().find(|(v, _, _)| *v == c).unwrap();
                out.push_str(&format!(
                    "  \\draw ({:.2},{:.2}) -- ({:.2},{:.2});\n",
                    x,
                    y_of_r(*depth),
                    cx,
                    y_of_r(*cd)
                ));
            }
        }
    }
    // domain tree below y = -1, root at bottom (mirrored)
    let bottom = layout(t.domain_tree());
    let depth_m = t
        .domain_tree()
        .leaf_addresses()
        .iter()
        .map(|w| w.len())
        .max()
        .unwrap_or(0) as f64;
    let y_of_m = |depth: usize| -(depth_m - depth as f64) - 2.0;
    for (w, x, depth) in &bottom {
        if t.domain_tree().is_caret_at(w) {
            for i in 1..=t.arity() {
                let c = w.child(i as u8);
                let (_, cx, cd) = bottom.iter().find(|(v, _, _)| *v == c).unwrap();
                out.push_str(&format!(
                    "  \\draw ({:.2},{:.2}) -- ({:.2},{:.2});\n",
                    x,
                    y_of_m(*depth),
                    cx,
                    y_of_m(*cd)
                ));
            }
        }
    }
    // arrows between leaf rows, labels at the bases
    let range_leaves = t.range_tree().leaf_addresses();
    let domain_leaves = t.domain_tree().leaf_addresses();
    let labels = labels(t, atlas);
    for i in 1..=t.leaves() {
        let (_, fx, _) = bottom
            .iter()
            .find(|(v, _, _)| *v == domain_leaves[i - 1])
            .unwrap();
        let j = t.wreath().sigma().apply(i);
        let (_, tx, _) = top.iter().find(|(v, _, _)| *v == range_leaves[j - 1]).unwrap();
        out.push_str(&format!(
            "  \\draw[->] ({fx:.2},-2.00) -- ({tx:.2},1.00);\n  \\node at ({fx:.2},-2.25) {{${}$}};\n",
            labels[i - 1]
        ));
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloning::literal::parse_tree_pair;

    #[test]
    fn dot_export_has_one_split_and_merge() {
        let atlas =
            crate::automata::spec::parse("arity 2\nstate f: perm=(1 2); children=f,f\n").unwrap();
        let t = parse_tree_pair("[ cll | (1 2) ; id, f | cll ]", &atlas).unwrap();
        let dot = export(&t, &atlas, DiagramFormat::Dot).unwrap();
        assert_eq!(dot.matches("s_root ->").count(), 2);
        assert_eq!(dot.matches("-> m_root").count(), 2);
        assert!(dot.contains("label=\"f\""));
        assert!(dot.contains("label=\"id\""));
        // determinism
        assert_eq!(dot, export(&t, &atlas, DiagramFormat::Dot).unwrap());
        assert!(DiagramFormat::parse("png").is_err());
    }

    #[test]
    fn identity_is_a_single_strand() {
        let atlas =
            crate::automata::spec::parse("arity 2\nstate f: perm=(1 2); children=f,f\n").unwrap();
        let t = TreePair::identity(2);
        let dot = export(&t, &atlas, DiagramFormat::Dot).unwrap();
        assert!(dot.contains("m_root -> s_root"));
        let tikz = export(&t, &atlas, DiagramFormat::Tikz).unwrap();
        assert!(tikz.contains("\\draw[->]"));
    }
}
