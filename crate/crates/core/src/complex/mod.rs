//! Desk-scale construction of sublevel sets of the coset poset, the
//! polysimplicial cell structure, descending links, connectivity
//! certificates and stabilizer embeddings.

pub mod homology;

pub use homology::{homology, HomologyReport, SimplicialComplex};

use crate::automata::Verdict3;
use crate::cloning::{TreePair, WreathElement};
use crate::error::{Error, Result};
use crate::groupoid::coset::FactorClass;
use crate::groupoid::{CosetVertex, GroupoidElement, HContext};
use crate::perm::Permutation;
use std::collections::BTreeSet;
use std::sync::Arc;

/// The sublevel set of the coset poset up to a phi bound, with order and
/// elementary-order relations filled in.
pub struct SublevelComplex {
    pub ctx: Arc<HContext>,
    pub q: usize,
    pub vertices: Vec<CosetVertex>,
    /// leq[i][j]: vertex i <= vertex j.
    pub leq: Vec<Vec<bool>>,
    /// prec[i][j]: i and j lie in a common elementary interval (i <= j).
    pub prec: Vec<Vec<bool>>,
}

/// BFS from [1_1]_H by length-1 splittings up to phi <= q.
pub fn build_sublevel(ctx: Arc<HContext>, q: usize) -> Result<SublevelComplex> {
    let d = ctx.d;
    if q == 0 || (q - 1) % (d - 1) != 0 {
        return Err(Error::Precondition(format!(
            "q must be 1 mod {} (got {q})",
            d - 1
        )));
    }
    let base = CosetVertex::base(ctx.clone());
    let mut vertices: Vec<CosetVertex> = vec![base.clone()];
    let mut covers: Vec<(usize, usize)> = Vec::new();
    let mut frontier: Vec<usize> = vec![0];
    while !frontier.is_empty() {
        let mut next: Vec<usize> = Vec::new();
        for &vi in &frontier {
            let v = vertices[vi].clone();
            if v.phi() + (d - 1) > q {
                continue;
            }
            for s in v.length1_splittings()? {
                let mut found = None;
                for (j, u) in vertices.iter().enumerate() {
                    if u.phi() == s.phi() && u.coset_equal(&s)? {
                        found = Some(j);
                        break;
                    }
                }
                let j = match found {
                    Some(j) => j,
                    None => {
                        vertices.push(s);
                        let j = vertices.len() - 1;
                        next.push(j);
                        j
                    }
                };
                covers.push((vi, j));
            }
        }
        frontier = next;
    }
    // deterministic ordering: phi-major, then serialized representative
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by_key(|&i| (vertices[i].phi(), vertices[i].rep().serialize()));
    let rank: Vec<usize> = {
        let mut r = vec![0; order.len()];
        for (new_i, &old_i) in order.iter().enumerate() {
            r[old_i] = new_i;
        }
        r
    };
    let vertices: Vec<CosetVertex> = order.iter().map(|&i| vertices[i].clone()).collect();
    let n = vertices.len();
    // <= is the reflexive-transitive closure of the covering relation
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut sorted_covers: Vec<(usize, usize)> = covers
        .iter()
        .map(|&(a, b)| (rank[a], rank[b]))
        .collect();
    sorted_covers.sort_unstable();
    sorted_covers.dedup();
    // vertices are phi-sorted, so propagating covers in phi order closes
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in &sorted_covers {
            for i in 0..n {
                if leq[i][a] && !leq[i][b] {
                    leq[i][b] = true;
                    changed = true;
                }
            }
        }
    }
    let mut prec = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if leq[i][j] {
                prec[i][j] = vertices[i].prec(&vertices[j])?;
            }
        }
    }
    Ok(SublevelComplex {
        ctx,
        q,
        vertices,
        leq,
        prec,
    })
}

impl SublevelComplex {
    pub fn find(&self, v: &CosetVertex) -> Result<Option<usize>> {
        for (i, u) in self.vertices.iter().enumerate() {
            if u.phi() == v.phi() && u.coset_equal(v)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn counts_by_phi(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for v in &self.vertices {
            match out.iter_mut().find(|(p, _)| *p == v.phi()) {
                Some((_, c)) => *c += 1,
                None => out.push((v.phi(), 1)),
            }
        }
        out
    }

    /// Line-oriented dump: vertex table, order relation, elementary relation.
    pub fn dump(&self, atlas: &crate::automata::spec::LoadedAutomaton) -> String {
        let mut out = format!("sublevel q={} vertices={}\n", self.q, self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!(
                "v {i} phi={} rep={}\n",
                v.phi(),
                crate::groupoid::print_groupoid_literal(v.rep(), atlas)
            ));
        }
        for i in 0..self.vertices.len() {
            for j in 0..self.vertices.len() {
                if i != j && self.leq[i][j] {
                    let tag = if self.prec[i][j] { "elem" } else { "leq" };
                    out.push_str(&format!("{tag} {i} {j}\n"));
                }
            }
        }
        out
    }

    /// DOT rendering of the Hasse diagram of <=.
    pub fn hasse_dot(&self) -> String {
        let n = self.vertices.len();
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  v{i} [label=\"{i} (phi={})\"];\n", v.phi()));
        }
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                // Hasse edge: no intermediate k
                let covered = (0..n)
                    .any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j]);
                if !covered {
                    out.push_str(&format!("  v{i} -> v{j};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// One elementary-set choice at a foot of the base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElemSet {
    /// {1_1}
    Trivial,
    /// {1_1, single split with block class bi}
    Edge(usize),
    /// {1_1, single split bi, double split}
    Triangle(usize),
    /// {1_1, double split}
    Diagonal,
}

impl ElemSet {
    fn chain(&self, ctx: &HContext) -> Vec<Option<GroupoidElement>> {
        match self {
            ElemSet::Trivial => vec![None],
            ElemSet::Edge(bi) => vec![None, Some(ctx.block_splittings()[*bi].clone())],
            ElemSet::Triangle(bi) => vec![
                None,
                Some(ctx.block_splittings()[*bi].clone()),
                Some(ctx.double_split().clone()),
            ],
            ElemSet::Diagonal => vec![None, Some(ctx.double_split().clone())],
        }
    }

    fn size(&self) -> usize {
        match self {
            ElemSet::Trivial => 1,
            ElemSet::Edge(_) | ElemSet::Diagonal => 2,
            ElemSet::Triangle(_) => 3,
        }
    }

    fn max_len(&self) -> usize {
        match self {
            ElemSet::Trivial => 0,
            ElemSet::Edge(_) => 1,
            ElemSet::Triangle(_) | ElemSet::Diagonal => 2,
        }
    }
}

/// A polysimplicial cell <x | S_1, ..., S_m> of the Stein-Farley complex.
#[derive(Clone, Debug)]
pub struct Polysimplex {
    pub base: usize,
    pub sets: Vec<ElemSet>,
    /// Vertex indices into the sublevel complex, sorted.
    pub vertices: Vec<usize>,
    pub dim: usize,
}

/// Enumerate the polysimplicial cells with all vertices inside the
/// sublevel complex. Validates that phi is affine on each cell (the vertex
/// phi values are the base phi plus the summed factor lengths).
pub fn stein_cells(c: &SublevelComplex) -> Result<Vec<Polysimplex>> {
    let ctx = &c.ctx;
    let d = ctx.d;
    let mut out: Vec<Polysimplex> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let n_blocks = ctx.block_splittings().len();
    for (base_idx, base) in c.vertices.iter().enumerate() {
        let m = base.phi();
        let budget = (c.q - base.phi()) / (d - 1);
        // options per position
        let mut options: Vec<ElemSet> = vec![ElemSet::Trivial];
        for bi in 0..n_blocks {
            options.push(ElemSet::Edge(bi));
        }
        if ctx.doubles_allowed() {
            for bi in 0..n_blocks {
                options.push(ElemSet::Triangle(bi));
            }
            options.push(ElemSet::Diagonal);
        }
        let mut assignment: Vec<ElemSet> = vec![ElemSet::Trivial; m];
        enumerate_cells(
            c,
            base_idx,
            &options,
            &mut assignment,
            0,
            budget,
            &mut seen,
            &mut out,
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_cells(
    c: &SublevelComplex,
    base_idx: usize,
    options: &[ElemSet],
    assignment: &mut Vec<ElemSet>,
    pos: usize,
    budget: usize,
    seen: &mut BTreeSet<Vec<usize>>,
    out: &mut Vec<Polysimplex>,
) -> Result<()> {
    let m = assignment.len();
    if pos == m {
        if let Some(cell) = realize_cell(c, base_idx, assignment)? {
            if seen.insert(cell.vertices.clone()) {
                out.push(cell);
            }
        }
        return Ok(());
    }
    for opt in options {
        if opt.max_len() > budget {
            continue;
        }
        assignment[pos] = opt.clone();
        enumerate_cells(
            c,
            base_idx,
            options,
            assignment,
            pos + 1,
            budget - opt.max_len(),
            seen,
            out,
        )?;
        assignment[pos] = ElemSet::Trivial;
    }
    Ok(())
}

fn realize_cell(
    c: &SublevelComplex,
    base_idx: usize,
    sets: &[ElemSet],
) -> Result<Option<Polysimplex>> {
    let ctx = &c.ctx;
    let d = ctx.d;
    let base = &c.vertices[base_idx];
    let m = base.phi();
    let chains: Vec<Vec<Option<GroupoidElement>>> = sets.iter().map(|s| s.chain(ctx)).collect();
    let mut vertex_ids: Vec<usize> = Vec::new();
    let mut combo = vec![0usize; m];
    loop {
        // realize this combination
        let mut parts: Vec<GroupoidElement> = Vec::with_capacity(m);
        let mut extra_len = 0usize;
        for (i, &ci) in combo.iter().enumerate() {
            match &chains[i][ci] {
                None => parts.push(GroupoidElement::trivial(d, 1)),
                Some(s) => {
                    extra_len += (s.feet() - 1) / (d - 1);
                    parts.push(s.clone());
                }
            }
        }
        let v = base.extend(&GroupoidElement::direct_sum_all(&parts)?)?;
        // phi must extend affinely: base phi plus summed factor lengths
        if v.phi() != base.phi() + extra_len * (d - 1) {
            return Err(Error::Precondition(
                "phi is not affine on a constructed cell".into(),
            ));
        }
        match c.find(&v)? {
            Some(idx) => vertex_ids.push(idx),
            None => return Ok(None), // cell pokes above the sublevel bound
        }
        // next combination
        let mut i = 0;
        loop {
            if i == m {
                vertex_ids.sort_unstable();
                vertex_ids.dedup();
                let dim = sets.iter().map(|s| s.size() - 1).sum();
                return Ok(Some(Polysimplex {
                    base: base_idx,
                    sets: sets.to_vec(),
                    vertices: vertex_ids,
                    dim,
                }));
            }
            combo[i] += 1;
            if combo[i] < chains[i].len() {
                break;
            }
            combo[i] = 0;
            i += 1;
        }
    }
}

/// A vertex of the descending link: a nontrivial simple elementary merging
/// of the center, with its support.
#[derive(Clone)]
pub struct LinkVertex {
    pub vertex: CosetVertex,
    pub support: BTreeSet<usize>,
    /// Length of the merging (1 or 2).
    pub length: usize,
}

pub struct DescendingLink {
    pub ctx: Arc<HContext>,
    pub center: CosetVertex,
    pub vertices: Vec<LinkVertex>,
    pub edges: Vec<(usize, usize)>,
}

/// Cap on the decoration alphabet for link enumeration.
const LINK_DECOR_CAP: usize = 4096;

/// Build the descending link of a vertex: vertices are the classes [x Y]_H
/// for Y a nontrivial simple elementary merging of x; edges join mergings
/// with disjoint supports always, and nested supports exactly when the
/// relative element is again a simple elementary merging. Higher simplices
/// are the cliques (the link is a flag complex).
pub fn descending_link(x: &CosetVertex) -> Result<DescendingLink> {
    let ctx = x.ctx.clone();
    let d = ctx.d;
    let m = x.phi();
    let mut decorations: Vec<crate::automata::AutRef> = vec![crate::automata::identity(d)];
    if let Some(list) = ctx.h.elements() {
        for &h in list {
            if !decorations.iter().any(|&y| crate::automata::aut_equal(y, h).is_true()) {
                decorations.push(h);
            }
        }
    }
    for &a in &ctx.artifacts {
        if !decorations.iter().any(|&y| crate::automata::aut_equal(y, a).is_true()) {
            decorations.push(a);
        }
    }
    let mut vertices: Vec<LinkVertex> = Vec::new();
    let mut shapes: Vec<(usize, Vec<usize>)> = Vec::new(); // (length, ordered feet)
    for tuple in ordered_tuples(m, d) {
        shapes.push((1, tuple));
    }
    if ctx.doubles_allowed() {
        for tuple in ordered_tuples(m, 2 * d - 1) {
            shapes.push((2, tuple));
        }
    }
    for (length, feet) in shapes {
        let block = feet.len();
        let n_decs = decorations.len().pow(block as u32);
        if n_decs > LINK_DECOR_CAP {
            return Err(Error::UnsupportedContext(format!(
                "link decoration alphabet too large ({n_decs})"
            )));
        }
        for mut dec_idx in 0..n_decs {
            let mut decs = Vec::with_capacity(block);
            for _ in 0..block {
                decs.push(decorations[dec_idx % decorations.len()]);
                dec_idx /= decorations.len();
            }
            let y = x.extend(&merging_element(&ctx, m, length, &feet, &decs)?)?;
            // the honest filter: y^-1 x must be a nontrivial *simple*
            // elementary splitting
            let z = y.rep().invert()?.compose(x.rep())?;
            let Some(classes) = ctx.elementary_classes(&z)? else {
                continue;
            };
            let nontrivial = classes
                .iter()
                .filter(|c| !matches!(c, FactorClass::Trivial))
                .count();
            if nontrivial != 1 {
                continue;
            }
            let mut fresh = true;
            for seen in &vertices {
                if seen.vertex.coset_equal(&y)? {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                vertices.push(LinkVertex {
                    vertex: y,
                    support: feet.iter().copied().collect(),
                    length,
                });
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if link_edge(&ctx, &vertices[i], &vertices[j])? {
                edges.push((i, j));
            }
        }
    }
    Ok(DescendingLink {
        ctx,
        center: x.clone(),
        vertices,
        edges,
    })
}

fn ordered_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = Vec::new();
    fn rec(m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 1..=m {
            if !cur.contains(&v) {
                cur.push(v);
                rec(m, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(m, k, &mut cur, &mut out);
    out
}

/// The merging [1_m, P(decorations), F] gluing the listed feet of the
/// center into one foot (placed first), where F carries a single caret
/// (length 1) or the double caret (length 2).
fn merging_element(
    ctx: &HContext,
    m: usize,
    length: usize,
    feet: &[usize],
    decs: &[crate::automata::AutRef],
) -> Result<GroupoidElement> {
    let d = ctx.d;
    let remaining = m - feet.len();
    let feet_after = remaining + 1;
    let mut domain = crate::tree::Forest::trivial(d, feet_after);
    domain.add_caret(1)?;
    if length == 2 {
        domain.add_caret(1)?;
    }
    debug_assert_eq!(domain.leaves(), m);
    // leaf t of the caret block goes to head feet[t-1]; the untouched feet
    // follow in increasing order
    let mut images: Vec<u32> = Vec::with_capacity(m);
    for &f in feet {
        images.push(f as u32);
    }
    let used: BTreeSet<usize> = feet.iter().copied().collect();
    for f in 1..=m {
        if !used.contains(&f) {
            images.push(f as u32);
        }
    }
    let sigma = Permutation::from_images(images)?;
    let mut tuple = decs.to_vec();
    tuple.resize(m, crate::automata::identity(d));
    let w = WreathElement::new(sigma, tuple, d)?;
    GroupoidElement::new(crate::tree::Forest::trivial(d, m), w, domain)
}

fn link_edge(ctx: &HContext, a: &LinkVertex, b: &LinkVertex) -> Result<bool> {
    if a.support.is_disjoint(&b.support) {
        return Ok(true);
    }
    let nested = a.support.is_subset(&b.support) || b.support.is_subset(&a.support);
    if !nested || a.support == b.support {
        return Ok(false);
    }
    // properly nested: the relative element must again be a simple
    // elementary merging (equivalently its inverse a simple elementary
    // splitting from the smaller-phi side)
    let (lo, hi) = if a.vertex.phi() < b.vertex.phi() {
        (a, b)
    } else {
        (b, a)
    };
    let z = lo.vertex.rep().invert()?.compose(hi.vertex.rep())?;
    let Some(classes) = ctx.elementary_classes(&z)? else {
        return Ok(false);
    };
    Ok(classes
        .iter()
        .filter(|c| !matches!(c, FactorClass::Trivial))
        .count()
        == 1)
}

impl DescendingLink {
    /// The flag (clique) complex of the link, up to the given dimension.
    pub fn flag_complex(&self, max_dim: usize) -> SimplicialComplex {
        SimplicialComplex::flag(self.vertices.len(), &self.edges, max_dim)
    }
}

/// Outcome of the Belk-Forrest style certificate on a descending link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityCertificate {
    /// Vertices of the ground simplex (indices into the link).
    pub sigma: Vec<usize>,
    pub sigma_dim: usize,
    /// k = 2(d-1)+1.
    pub k: usize,
    /// Largest c with c k <= dim Sigma.
    pub c: usize,
    /// Worst miss count observed.
    pub max_misses: usize,
    /// Connectivity certified by the realized ground simplex: c - 1
    /// (meaningful for c >= 1).
    pub certified_connectivity: i64,
    /// The threshold formula floor(floor(m/d)/k) - 1 for cross-checking.
    pub formula_connectivity: i64,
}

/// Take Sigma = the ground simplex of pairwise-disjoint standard mergings
/// and verify every link vertex misses at most k = 2(d-1)+1 of its
/// vertices. Returns None when the miss bound fails (which would indicate
/// a construction bug).
pub fn connectivity_certificate(link: &DescendingLink) -> Result<Option<ConnectivityCertificate>> {
    let ctx = &link.ctx;
    let d = ctx.d;
    let m = link.center.phi();
    let k = 2 * (d - 1) + 1;
    // ground simplex mergings: glue feet {di+1..di+d} in order
    let mut sigma = Vec::new();
    let mut i = 0;
    while d * i + d <= m {
        let feet: Vec<usize> = (d * i + 1..=d * i + d).collect();
        let decs = vec![crate::automata::identity(d); d];
        let y = link
            .center
            .extend(&merging_element(ctx, m, 1, &feet, &decs)?)?;
        let mut found = None;
        for (vi, lv) in link.vertices.iter().enumerate() {
            if lv.vertex.coset_equal(&y)? {
                found = Some(vi);
                break;
            }
        }
        let vi = found.ok_or_else(|| {
            Error::Precondition("ground-simplex merging missing from the link".into())
        })?;
        sigma.push(vi);
        i += 1;
    }
    if sigma.is_empty() {
        return Ok(Some(ConnectivityCertificate {
            sigma,
            sigma_dim: 0,
            k,
            c: 0,
            max_misses: 0,
            certified_connectivity: -1,
            formula_connectivity: (m / d / k) as i64 - 1,
        }));
    }
    // adjacency on the link
    let mut adj = vec![BTreeSet::new(); link.vertices.len()];
    for &(a, b) in &link.edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut max_misses = 0;
    for v in 0..link.vertices.len() {
        let misses = sigma
            .iter()
            .filter(|&&s| s != v && !adj[v].contains(&s))
            .count();
        max_misses = max_misses.max(misses);
    }
    if max_misses > k {
        return Ok(None);
    }
    let sigma_dim = sigma.len() - 1;
    let c = sigma_dim / k;
    Ok(Some(ConnectivityCertificate {
        sigma,
        sigma_dim,
        k,
        c,
        max_misses,
        certified_connectivity: c as i64 - 1,
        formula_connectivity: (m / d / k) as i64 - 1,
    }))
}

#[derive(Clone, Debug)]
pub enum StabOutcome {
    /// x^-1 g x = [1_n, w, 1_n] with all entries in H.
    Embedded(WreathElement),
    NotInStabilizer,
}

/// The stabilizer embedding Stab([x]_H) -> S_n wr H, g |-> x^-1 g x.
pub fn stabilizer_embed(ctx: &Arc<HContext>, g: &TreePair, x: &CosetVertex) -> Result<StabOutcome> {
    let ghat = GroupoidElement::from_tree_pair(g);
    if ghat.heads() != 1 || ghat.feet() != 1 {
        return Err(Error::Precondition("stabilizer_embed needs a 1-head 1-foot element".into()));
    }
    let z = x.rep().invert()?.compose(&ghat)?.compose(x.rep())?;
    match z.as_pure_wreath()? {
        None => Ok(StabOutcome::NotInStabilizer),
        Some(w) => match w.entries_in(&ctx.h) {
            Verdict3::True => Ok(StabOutcome::Embedded(w)),
            Verdict3::False => Ok(StabOutcome::NotInStabilizer),
            Verdict3::Indeterminate => Err(Error::Indeterminate("H membership in stabilizer_embed")),
        },
    }
}

/// BFS search for a common upper bound of two vertices within a phi cap.
pub fn common_upper_bound(
    v: &CosetVertex,
    w: &CosetVertex,
    phi_cap: usize,
) -> Result<Option<CosetVertex>> {
    let mut v_levels: Vec<CosetVertex> = vec![v.clone()];
    let mut frontier = vec![v.clone()];
    while !frontier.is_empty() {
        let mut next: Vec<CosetVertex> = Vec::new();
        for u in &frontier {
            if u.phi() + (v.ctx.d - 1) > phi_cap {
                continue;
            }
            for s in u.length1_splittings()? {
                let mut fresh = true;
                for seen in v_levels.iter().chain(next.iter()) {
                    if seen.phi() == s.phi() && seen.coset_equal(&s)? {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    next.push(s.clone());
                }
            }
        }
        v_levels.extend(next.iter().cloned());
        frontier = next;
    }
    for u in &v_levels {
        if w.phi() <= u.phi() && w.poset_leq(u)? {
            return Ok(Some(u.clone()));
        }
    }
    Ok(None)
}
