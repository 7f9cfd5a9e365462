//! The intern store backing `AutRef`.
//!
//! Canonicalization: explore reachable states, minimize by partition
//! refinement (bisimulation), serialize the pointed minimal automaton in
//! BFS order, and intern the bytes. The table is append-only and shared;
//! inserts are idempotent.

use super::{AutRef, Verdict3};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

/// Provenance tags: ids of tagged constructors whose self-similar closure
/// contains this automorphism. A membership hint, not a proof system.
pub type ProvSet = BTreeSet<u32>;

/// External lazily-computed automorphism (used by induced representations).
pub trait LazyAut: Send + Sync {
    fn arity(&self) -> usize;
    fn root_perm(&self) -> Permutation;
    fn child(&self, i: usize) -> AutRef;
    /// Structural key for dedup; must be injective across semantically
    /// distinct sources within a process.
    fn key(&self) -> Vec<u8>;
}

enum Kind {
    Canon { children: OnceLock<Vec<AutRef>> },
    Product(AutRef, AutRef),
    Inverse(AutRef),
    Assembled(Vec<AutRef>),
    External(Arc<dyn LazyAut>),
}

struct Entry {
    d: usize,
    perm: Permutation,
    kind: Kind,
    key: Arc<[u8]>,
    is_identity: bool,
    provenance: Mutex<ProvSet>,
    lazy_children: OnceLock<Vec<AutRef>>,
}

impl Entry {
    fn is_canon(&self) -> bool {
        matches!(self.kind, Kind::Canon { .. })
    }
}

pub(crate) struct Store {
    entries: RwLock<Vec<Arc<Entry>>>,
    canon_index: Mutex<HashMap<Arc<[u8]>, u32>>,
    lazy_index: Mutex<HashMap<Vec<u8>, u32>>,
    identities: Mutex<HashMap<usize, AutRef>>,
    next_tag: Mutex<u32>,
}

static STORE: OnceLock<Store> = OnceLock::new();

pub(crate) fn store() -> &'static Store {
    STORE.get_or_init(Store::new)
}

thread_local! {
    // Depth guard: while canonicalizing, opportunistic re-canonicalization
    // of freshly interned lazy children must be suppressed, or mutually
    // recursive states would never bottom out.
    static RESOLVE_DEPTH: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
}

fn resolving() -> bool {
    RESOLVE_DEPTH.with(|c| c.get() > 0)
}

struct ResolveGuard;

impl ResolveGuard {
    fn enter() -> ResolveGuard {
        RESOLVE_DEPTH.with(|c| c.set(c.get() + 1));
        ResolveGuard
    }
}

impl Drop for ResolveGuard {
    fn drop(&mut self) {
        RESOLVE_DEPTH.with(|c| c.set(c.get() - 1));
    }
}

/// Cap for silently resolving lazy operands before falling back to formal
/// product/inverse nodes.
const LAZY_RESOLVE_CAP: usize = 4096;
/// Cap on pair exploration in eager products of canonical handles.
const PRODUCT_CAP: usize = 1_000_000;

/// A raw (not yet minimized) machine; states indexed from 0.
struct Raw {
    d: usize,
    perms: Vec<Permutation>,
    children: Vec<Vec<usize>>,
}

impl Raw {
    fn minimize(&self) -> Vec<usize> {
        let n = self.perms.len();
        let mut class = vec![0usize; n];
        let mut by_perm: HashMap<&Permutation, usize> = HashMap::new();
        for i in 0..n {
            let next = by_perm.len();
            class[i] = *by_perm.entry(&self.perms[i]).or_insert(next);
        }
        loop {
            let mut sig_map: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0usize; n];
            for i in 0..n {
                let sig = (
                    class[i],
                    self.children[i].iter().map(|&c| class[c]).collect::<Vec<_>>(),
                );
                let fresh = sig_map.len();
                next_class[i] = *sig_map.entry(sig).or_insert(fresh);
            }
            let stable = sig_map.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next_class;
            if stable {
                return class;
            }
        }
    }
}

/// Canonical serialization of the minimized machine pointed at `start`:
/// classes numbered in BFS order, rows are (perm images, child numbers).
fn pointed_key(
    d: usize,
    class_perm: &HashMap<usize, &Permutation>,
    class_children: &HashMap<usize, Vec<usize>>,
    start: usize,
) -> (Vec<u8>, bool) {
    let mut order: HashMap<usize, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    order.insert(start, 0);
    queue.push_back(start);
    let mut rows: Vec<(usize, Vec<u32>)> = Vec::new();
    while let Some(c) = queue.pop_front() {
        let mut row = Vec::with_capacity(d);
        for &cc in &class_children[&c] {
            let next = order.len() as u32;
            let id = *order.entry(cc).or_insert_with(|| {
                queue.push_back(cc);
                next
            });
            row.push(id);
        }
        rows.push((c, row));
    }
    let mut bytes = Vec::with_capacity(8 + rows.len() * d * 8);
    bytes.extend_from_slice(&(d as u32).to_le_bytes());
    bytes.extend_from_slice(&(rows.len() as u32).to_le_bytes());
    for (c, row) in &rows {
        for &img in class_perm[c].images() {
            bytes.extend_from_slice(&img.to_le_bytes());
        }
        for &child in row {
            bytes.extend_from_slice(&child.to_le_bytes());
        }
    }
    let is_id = rows.len() == 1 && class_perm[&start].is_identity();
    (bytes, is_id)
}

impl Store {
    fn new() -> Store {
        Store {
            entries: RwLock::new(Vec::new()),
            canon_index: Mutex::new(HashMap::new()),
            lazy_index: Mutex::new(HashMap::new()),
            identities: Mutex::new(HashMap::new()),
            next_tag: Mutex::new(0),
        }
    }

    fn entry(&self, r: AutRef) -> Arc<Entry> {
        self.entries.read().unwrap()[r.0 as usize].clone()
    }

    pub(crate) fn arity(&self, r: AutRef) -> usize {
        self.entry(r).d
    }

    pub(crate) fn root_perm(&self, r: AutRef) -> Permutation {
        self.entry(r).perm.clone()
    }

    pub(crate) fn is_identity_flag(&self, r: AutRef) -> bool {
        self.entry(r).is_identity
    }

    pub(crate) fn is_canonical(&self, r: AutRef) -> bool {
        self.entry(r).is_canon()
    }

    pub(crate) fn key(&self, r: AutRef) -> Arc<[u8]> {
        self.entry(r).key.clone()
    }

    pub(crate) fn new_group_tag(&self) -> u32 {
        let mut t = self.next_tag.lock().unwrap();
        *t += 1;
        *t
    }

    pub(crate) fn has_tag(&self, r: AutRef, group: u32) -> bool {
        self.entry(r).provenance.lock().unwrap().contains(&group)
    }

    pub(crate) fn tag_reachable(&self, r: AutRef, group: u32) {
        let mut seen = BTreeSet::new();
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            let e = self.entry(x);
            e.provenance.lock().unwrap().insert(group);
            if let Kind::Canon { children } = &e.kind {
                for &c in children.get().expect("canon children set") {
                    stack.push(c);
                }
            }
        }
    }

    fn prov_of(&self, r: AutRef) -> ProvSet {
        self.entry(r).provenance.lock().unwrap().clone()
    }

    /// Intern every state of a raw machine; returns handles per raw state.
    fn intern_all(&self, raw: &Raw, prov: &ProvSet) -> Vec<AutRef> {
        let class = raw.minimize();
        let n = raw.perms.len();
        let mut class_perm: HashMap<usize, &Permutation> = HashMap::new();
        let mut class_children: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            class_perm.entry(class[i]).or_insert(&raw.perms[i]);
            class_children
                .entry(class[i])
                .or_insert_with(|| raw.children[i].iter().map(|&c| class[c]).collect());
        }
        let mut keys: HashMap<usize, (Arc<[u8]>, bool)> = HashMap::new();
        for &c in class_children.keys() {
            let (bytes, is_id) = pointed_key(raw.d, &class_perm, &class_children, c);
            keys.insert(c, (Arc::from(bytes.into_boxed_slice()), is_id));
        }
        // Interning proper, under the write locks.
        let mut entries = self.entries.write().unwrap();
        let mut index = self.canon_index.lock().unwrap();
        let mut ids: HashMap<usize, u32> = HashMap::new();
        let mut fresh: Vec<usize> = Vec::new();
        let mut classes_sorted: Vec<usize> = class_children.keys().copied().collect();
        classes_sorted.sort_unstable();
        for &c in &classes_sorted {
            let (key, is_id) = &keys[&c];
            if let Some(&existing) = index.get(key) {
                ids.insert(c, existing);
                if !prov.is_empty() {
                    let e = &entries[existing as usize];
                    e.provenance.lock().unwrap().extend(prov.iter().copied());
                }
            } else {
                let id = entries.len() as u32;
                entries.push(Arc::new(Entry {
                    d: raw.d,
                    perm: class_perm[&c].clone(),
                    kind: Kind::Canon {
                        children: OnceLock::new(),
                    },
                    key: key.clone(),
                    is_identity: *is_id,
                    provenance: Mutex::new(prov.clone()),
                    lazy_children: OnceLock::new(),
                }));
                index.insert(key.clone(), id);
                ids.insert(c, id);
                fresh.push(c);
            }
        }
        for &c in &fresh {
            let kids: Vec<AutRef> = class_children[&c].iter().map(|cc| AutRef(ids[cc])).collect();
            if let Kind::Canon { children } = &entries[ids[&c] as usize].kind {
                children.set(kids).ok();
            }
        }
        (0..n).map(|i| AutRef(ids[&class[i]])).collect()
    }

    /// Intern every state of a self-contained raw graph (children are
    /// indices into the same list). Returns handles per raw state.
    pub(crate) fn intern_raw(
        &self,
        d: usize,
        perms: Vec<Permutation>,
        children: Vec<Vec<usize>>,
        prov: &ProvSet,
    ) -> Vec<AutRef> {
        let raw = Raw { d, perms, children };
        self.intern_all(&raw, prov)
    }

    pub(crate) fn identity(&self, d: usize) -> AutRef {
        if let Some(&r) = self.identities.lock().unwrap().get(&d) {
            return r;
        }
        let raw = Raw {
            d,
            perms: vec![Permutation::identity(d)],
            children: vec![vec![0; d]],
        };
        let r = self.intern_all(&raw, &ProvSet::new())[0];
        self.identities.lock().unwrap().insert(d, r);
        r
    }

    /// Intern a machine built from raw states described by (perm, children
    /// handles). Handles appearing as children must be canonical.
    pub(crate) fn intern_from_graph(
        &self,
        d: usize,
        states: &[(Permutation, Vec<AutRef>)],
        roots: &[usize],
        prov: &ProvSet,
    ) -> Vec<AutRef> {
        // Pull in the full reachable set of any canonical handle referenced.
        let mut idx_of: HashMap<AutRef, usize> = HashMap::new();
        let mut perms: Vec<Permutation> = states.iter().map(|(p, _)| p.clone()).collect();
        let mut children_h: Vec<Vec<AutRef>> = states.iter().map(|(_, c)| c.clone()).collect();
        let mut queue: VecDeque<AutRef> = children_h.iter().flatten().copied().collect();
        while let Some(h) = queue.pop_front() {
            if idx_of.contains_key(&h) {
                continue;
            }
            let e = self.entry(h);
            let kids = match &e.kind {
                Kind::Canon { children } => children.get().expect("canon children").clone(),
                _ => panic!("intern_from_graph requires canonical children"),
            };
            idx_of.insert(h, perms.len());
            perms.push(e.perm.clone());
            children_h.push(kids.clone());
            for k in kids {
                if !idx_of.contains_key(&k) {
                    queue.push_back(k);
                }
            }
        }
        let base = states.len();
        let children: Vec<Vec<usize>> = children_h
            .iter()
            .enumerate()
            .map(|(i, kids)| {
                kids.iter()
                    .map(|h| {
                        if i < base || true {
                            *idx_of.get(h).expect("resolved index")
                        } else {
                            unreachable!()
                        }
                    })
                    .collect()
            })
            .collect();
        let raw = Raw { d, perms, children };
        let all = self.intern_all(&raw, prov);
        roots.iter().map(|&r| all[r]).collect()
    }

    pub(crate) fn child(&self, r: AutRef, i: usize) -> Result<AutRef> {
        let e = self.entry(r);
        if i == 0 || i > e.d {
            return Err(Error::LetterOutOfRange { letter: i, d: e.d });
        }
        match &e.kind {
            Kind::Canon { children } => Ok(children.get().expect("canon children")[i - 1]),
            _ => {
                if let Some(kids) = e.lazy_children.get() {
                    return Ok(kids[i - 1]);
                }
                let kids = self.compute_lazy_children(&e)?;
                let _ = e.lazy_children.set(kids.clone());
                Ok(kids[i - 1])
            }
        }
    }

    fn compute_lazy_children(&self, e: &Entry) -> Result<Vec<AutRef>> {
        let d = e.d;
        match &e.kind {
            Kind::Canon { .. } => unreachable!(),
            Kind::Product(a, b) => {
                let pb = self.root_perm(*b);
                (1..=d)
                    .map(|i| {
                        let fa = self.child(*a, pb.apply(i))?;
                        let gb = self.child(*b, i)?;
                        self.product(fa, gb)
                    })
                    .collect()
            }
            Kind::Inverse(a) => {
                let pa_inv = self.root_perm(*a).inverse();
                (1..=d)
                    .map(|i| self.inverse(self.child(*a, pa_inv.apply(i))?))
                    .collect()
            }
            Kind::Assembled(kids) => Ok(kids.clone()),
            Kind::External(gen) => Ok((1..=d).map(|i| gen.child(i)).collect()),
        }
    }

    fn alloc_lazy(
        &self,
        d: usize,
        perm: Permutation,
        kind: Kind,
        lazy_key: Vec<u8>,
        prov: ProvSet,
    ) -> AutRef {
        let mut index = self.lazy_index.lock().unwrap();
        if let Some(&id) = index.get(&lazy_key) {
            return AutRef(id);
        }
        let mut entries = self.entries.write().unwrap();
        let id = entries.len() as u32;
        entries.push(Arc::new(Entry {
            d,
            perm,
            kind,
            key: Arc::from(lazy_key.clone().into_boxed_slice()),
            is_identity: false,
            provenance: Mutex::new(prov),
            lazy_children: OnceLock::new(),
        }));
        index.insert(lazy_key, id);
        AutRef(id)
    }

    pub(crate) fn intern_external(&self, gen: Arc<dyn LazyAut>) -> AutRef {
        let d = gen.arity();
        let perm = gen.root_perm();
        let mut key = b"X".to_vec();
        key.extend_from_slice(&gen.key());
        let r = self.alloc_lazy(d, perm, Kind::External(gen), key, ProvSet::new());
        if resolving() {
            r
        } else {
            self.canonicalize(r, LAZY_RESOLVE_CAP).unwrap_or(r)
        }
    }

    pub(crate) fn product(&self, f: AutRef, g: AutRef) -> Result<AutRef> {
        let (ef, eg) = (self.entry(f), self.entry(g));
        if ef.d != eg.d {
            return Err(Error::ArityMismatch(ef.d, eg.d));
        }
        if ef.is_identity {
            return Ok(g);
        }
        if eg.is_identity {
            return Ok(f);
        }
        if ef.is_canon() && eg.is_canon() {
            return self.product_canon(f, g, &ef, &eg);
        }
        // Try to resolve lazy operands cheaply first (not while already
        // inside a resolution, which must stay iterative).
        let resolve = |x: AutRef, canon: bool| {
            if canon || resolving() {
                x
            } else {
                self.canonicalize(x, LAZY_RESOLVE_CAP).unwrap_or(x)
            }
        };
        let f2 = resolve(f, ef.is_canon());
        let g2 = resolve(g, eg.is_canon());
        if self.entry(f2).is_canon() && self.entry(g2).is_canon() {
            return self.product(f2, g2);
        }
        let mut prov = self.prov_of(f2);
        let other = self.prov_of(g2);
        prov.retain(|t| other.contains(t));
        let perm = ef.perm.compose(&eg.perm)?;
        let mut key = b"P".to_vec();
        key.extend_from_slice(&f2.0.to_le_bytes());
        key.extend_from_slice(&g2.0.to_le_bytes());
        Ok(self.alloc_lazy(ef.d, perm, Kind::Product(f2, g2), key, prov))
    }

    fn product_canon(&self, f: AutRef, g: AutRef, ef: &Entry, _eg: &Entry) -> Result<AutRef> {
        let d = ef.d;
        let mut idx: HashMap<(AutRef, AutRef), usize> = HashMap::new();
        let mut pairs: Vec<(AutRef, AutRef)> = vec![(f, g)];
        idx.insert((f, g), 0);
        let mut perms = Vec::new();
        let mut children = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            if pairs.len() > PRODUCT_CAP {
                return Err(Error::CapExceeded("product state exploration"));
            }
            let (x, y) = pairs[i];
            let (px, py) = (self.root_perm(x), self.root_perm(y));
            perms.push(px.compose(&py)?);
            let mut row = Vec::with_capacity(d);
            for j in 1..=d {
                let cx = self.child(x, py.apply(j))?;
                let cy = self.child(y, j)?;
                let key = (cx, cy);
                let next = pairs.len();
                let id = *idx.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    next
                });
                row.push(id);
            }
            children.push(row);
            i += 1;
        }
        let mut prov = self.prov_of(f);
        let other = self.prov_of(g);
        prov.retain(|t| other.contains(t));
        let raw = Raw { d, perms, children };
        Ok(self.intern_all(&raw, &prov)[0])
    }

    pub(crate) fn inverse(&self, f: AutRef) -> Result<AutRef> {
        let ef = self.entry(f);
        if ef.is_identity {
            return Ok(f);
        }
        if !ef.is_canon() {
            let f2 = if resolving() {
                f
            } else {
                self.canonicalize(f, LAZY_RESOLVE_CAP).unwrap_or(f)
            };
            if self.entry(f2).is_canon() {
                return self.inverse(f2);
            }
            let mut key = b"I".to_vec();
            key.extend_from_slice(&f2.0.to_le_bytes());
            let prov = self.prov_of(f2);
            return Ok(self.alloc_lazy(ef.d, ef.perm.inverse(), Kind::Inverse(f2), key, prov));
        }
        let d = ef.d;
        let mut idx: HashMap<AutRef, usize> = HashMap::new();
        let mut states = vec![f];
        idx.insert(f, 0);
        let mut perms = Vec::new();
        let mut children = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let x = states[i];
            let px = self.root_perm(x);
            let inv = px.inverse();
            perms.push(inv.clone());
            let mut row = Vec::with_capacity(d);
            for j in 1..=d {
                let cx = self.child(x, inv.apply(j))?;
                let next = states.len();
                let id = *idx.entry(cx).or_insert_with(|| {
                    states.push(cx);
                    next
                });
                row.push(id);
            }
            children.push(row);
            i += 1;
        }
        let prov = self.prov_of(f);
        let raw = Raw { d, perms, children };
        Ok(self.intern_all(&raw, &prov)[0])
    }

    pub(crate) fn assemble(&self, perm: Permutation, kids: Vec<AutRef>) -> Result<AutRef> {
        let d = perm.degree();
        if kids.len() != d {
            return Err(Error::ArityMismatch(d, kids.len()));
        }
        for &k in &kids {
            let a = self.arity(k);
            if a != d {
                return Err(Error::ArityMismatch(d, a));
            }
        }
        if kids.iter().all(|&k| self.entry(k).is_canon()) {
            return Ok(self
                .intern_from_graph(d, &[(perm, kids)], &[0], &ProvSet::new())
                .pop()
                .unwrap());
        }
        let mut key = b"A".to_vec();
        key.extend_from_slice(&(d as u32).to_le_bytes());
        for img in perm.images() {
            key.extend_from_slice(&img.to_le_bytes());
        }
        for k in &kids {
            key.extend_from_slice(&k.0.to_le_bytes());
        }
        Ok(self.alloc_lazy(d, perm, Kind::Assembled(kids), key, ProvSet::new()))
    }

    pub(crate) fn canonicalize(&self, f: AutRef, cap: usize) -> Result<AutRef> {
        let ef = self.entry(f);
        if ef.is_canon() {
            return Ok(f);
        }
        let _guard = ResolveGuard::enter();
        let d = ef.d;
        let mut idx: HashMap<AutRef, usize> = HashMap::new();
        let mut states = vec![f];
        idx.insert(f, 0);
        let mut perms = Vec::new();
        let mut children = Vec::new();
        let mut i = 0;
        while i < states.len() {
            if states.len() > cap {
                return Err(Error::CapExceeded("lazy state exploration"));
            }
            let x = states[i];
            perms.push(self.root_perm(x));
            let mut row = Vec::with_capacity(d);
            for j in 1..=d {
                let cx = self.child(x, j)?;
                let next = states.len();
                let id = *idx.entry(cx).or_insert_with(|| {
                    states.push(cx);
                    next
                });
                row.push(id);
            }
            children.push(row);
            i += 1;
        }
        let prov = self.prov_of(f);
        let raw = Raw { d, perms, children };
        Ok(self.intern_all(&raw, &prov)[0])
    }

    pub(crate) fn equal(&self, f: AutRef, g: AutRef, cap: usize) -> Verdict3 {
        if f == g {
            return Verdict3::True;
        }
        let (ef, eg) = (self.entry(f), self.entry(g));
        if ef.d != eg.d {
            return Verdict3::False;
        }
        if ef.is_canon() && eg.is_canon() {
            return Verdict3::False; // canonical handles are unique per automorphism
        }
        let d = ef.d;
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(f, g)];
        while let Some((x, y)) = stack.pop() {
            if x == y || !seen.insert((x, y)) {
                continue;
            }
            if seen.len() > cap {
                return Verdict3::Indeterminate;
            }
            let (ex, ey) = (self.entry(x), self.entry(y));
            if ex.is_canon() && ey.is_canon() {
                return Verdict3::False;
            }
            if ex.perm != ey.perm {
                return Verdict3::False;
            }
            for j in 1..=d {
                match (self.child(x, j), self.child(y, j)) {
                    (Ok(cx), Ok(cy)) => stack.push((cx, cy)),
                    _ => return Verdict3::Indeterminate,
                }
            }
        }
        Verdict3::True
    }
}
