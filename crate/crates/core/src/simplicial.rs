//! Finite abstract simplicial complexes and the Alexandrov calculus on their
//! face posets.
//!
//! Up-closed simplex sets model open subsets of the realization, down-closed
//! sets model closed subcomplexes. Simplex ids are assigned by
//! `(dimension, lexicographic vertex tuple)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{collect_sparse, SparseMatrix, SparseVec};

/// A set of simplex ids of one complex.
pub type SimplexSet = BTreeSet<usize>;

/// Vertex label: integers sort before strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Vertex {
    Int(i64),
    Str(String),
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Vertex::Int(a), Vertex::Int(b)) => a.cmp(b),
            (Vertex::Int(_), Vertex::Str(_)) => Ordering::Less,
            (Vertex::Str(_), Vertex::Int(_)) => Ordering::Greater,
            (Vertex::Str(a), Vertex::Str(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Int(v) => write!(f, "{v}"),
            Vertex::Str(s) => write!(f, "{s:?}"),
        }
    }
}

impl From<i64> for Vertex {
    fn from(v: i64) -> Self {
        Vertex::Int(v)
    }
}

/// On-disk form of a complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub vertices: Vec<Vertex>,
    pub maximal_simplices: Vec<Vec<Vertex>>,
}

/// Whether a simplex set is up-closed, down-closed, both or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    UpClosed,
    DownClosed,
    Both,
    Neither,
}

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<Vertex>,
    simplices: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    /// Codimension-one faces with incidence sign `(-1)^i`, `i` the removed position.
    facets: Vec<Vec<(usize, i8)>>,
    cofacets: Vec<Vec<usize>>,
    dim: usize,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.simplices == other.simplices
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    /// Downward closure of the given maximal simplices.
    pub fn from_maximal(vertices: &[Vertex], maximal: &[Vec<Vertex>]) -> Result<Self> {
        let mut labels = vertices.to_vec();
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Input(format!("vertex {} listed twice", w[0])));
            }
        }
        let pos: HashMap<&Vertex, usize> = labels.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut tops: Vec<Vec<usize>> = Vec::new();
        for s in maximal {
            let mut t = Vec::with_capacity(s.len());
            for v in s {
                let i = *pos.get(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
                t.push(i);
            }
            t.sort_unstable();
            if let Some(w) = t.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateVertex {
                    vertex: labels[w[0]].to_string(),
                    simplex: render(s),
                });
            }
            if !t.is_empty() {
                tops.push(t);
            }
        }
        if tops.is_empty() {
            return Err(Error::EmptyComplex);
        }
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in &tops {
            let k = t.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| t[b]).collect();
                all.insert(face);
            }
        }
        let mut simplices: Vec<Vec<usize>> = all.into_iter().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Self::from_sorted(labels, simplices))
    }

    fn from_sorted(labels: Vec<Vertex>, simplices: Vec<Vec<usize>>) -> Self {
        let index: HashMap<Vec<usize>, usize> = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut facets = vec![Vec::new(); simplices.len()];
        let mut cofacets = vec![Vec::new(); simplices.len()];
        for (id, s) in simplices.iter().enumerate() {
            if s.len() < 2 {
                continue;
            }
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                let fid = index[&f];
                facets[id].push((fid, if i % 2 == 0 { 1 } else { -1 }));
                cofacets[fid].push(id);
            }
        }
        for c in &mut cofacets {
            c.sort_unstable();
        }
        let dim = simplices.last().map(|s| s.len() - 1).unwrap_or(0);
        SimplicialComplex {
            labels,
            simplices,
            index,
            facets,
            cofacets,
            dim,
        }
    }

    pub fn from_doc(doc: &ComplexDoc) -> Result<Self> {
        Self::from_maximal(&doc.vertices, &doc.maximal_simplices)
    }

    /// Parses the JSON complex format.
    pub fn load_json(text: &str) -> Result<Self> {
        let doc: ComplexDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    /// Document listing the vertices and maximal simplices.
    pub fn to_doc(&self) -> ComplexDoc {
        let maximal = (0..self.len())
            .filter(|&s| self.cofacets[s].is_empty())
            .map(|s| self.labels_of(s))
            .collect();
        ComplexDoc {
            vertices: self.labels.clone(),
            maximal_simplices: maximal,
        }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[Vertex] {
        &self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Sorted vertex indices of a simplex.
    pub fn simplex(&self, id: usize) -> &[usize] {
        &self.simplices[id]
    }

    pub fn dim_of(&self, id: usize) -> usize {
        self.simplices[id].len() - 1
    }

    pub fn labels_of(&self, id: usize) -> Vec<Vertex> {
        self.simplices[id].iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// Canonical text name such as `[0,1,2]`.
    pub fn name(&self, id: usize) -> String {
        render(&self.labels_of(id))
    }

    pub fn id_of(&self, verts: &[usize]) -> Option<usize> {
        self.index.get(verts).copied()
    }

    /// Looks a simplex up by vertex labels, in any order.
    pub fn find(&self, labels: &[Vertex]) -> Result<usize> {
        let mut t = Vec::with_capacity(labels.len());
        for v in labels {
            let i = self
                .labels
                .binary_search(v)
                .map_err(|_| Error::UnknownVertex(v.to_string()))?;
            t.push(i);
        }
        t.sort_unstable();
        self.id_of(&t)
            .ok_or_else(|| Error::UnknownSimplex(render(labels)))
    }

    pub fn vertex_id(&self, v: &Vertex) -> Result<usize> {
        self.find(std::slice::from_ref(v))
    }

    pub fn facets(&self, id: usize) -> &[(usize, i8)] {
        &self.facets[id]
    }

    /// Simplices having `id` as a codimension-one face.
    pub fn cofacets(&self, id: usize) -> &[usize] {
        &self.cofacets[id]
    }

    pub fn all(&self) -> SimplexSet {
        (0..self.len()).collect()
    }

    /// `a ⊆ b` as vertex sets.
    pub fn is_face(&self, a: usize, b: usize) -> bool {
        let (x, y) = (&self.simplices[a], &self.simplices[b]);
        if x.len() > y.len() {
            return false;
        }
        let mut j = 0;
        for v in x {
            while j < y.len() && y[j] < *v {
                j += 1;
            }
            if j == y.len() || y[j] != *v {
                return false;
            }
            j += 1;
        }
        true
    }

    fn check(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownSimplex(format!("#{id}")))
        }
    }

    /// `{τ : τ ⊇ σ}`.
    pub fn open_star(&self, sigma: usize) -> Result<SimplexSet> {
        self.check(sigma)?;
        Ok(self.up_closure_of(std::iter::once(sigma)))
    }

    fn up_closure_of(&self, seeds: impl IntoIterator<Item = usize>) -> SimplexSet {
        let mut out = SimplexSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if out.insert(s) {
                stack.extend(self.cofacets[s].iter().copied());
            }
        }
        out
    }

    pub fn up_closure(&self, set: &SimplexSet) -> SimplexSet {
        self.up_closure_of(set.iter().copied())
    }

    pub fn down_closure(&self, set: &SimplexSet) -> SimplexSet {
        let mut out = SimplexSet::new();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            if out.insert(s) {
                stack.extend(self.facets[s].iter().map(|f| f.0));
            }
        }
        out
    }

    /// Down-closure of the simplices named by label tuples.
    pub fn generate(&self, gens: &[Vec<Vertex>]) -> Result<SimplexSet> {
        let mut seeds = SimplexSet::new();
        for g in gens {
            seeds.insert(self.find(g)?);
        }
        Ok(self.down_closure(&seeds))
    }

    /// Up-closed relative to `within` (the whole complex if `None`).
    pub fn is_up_closed(&self, set: &SimplexSet, within: Option<&SimplexSet>) -> bool {
        set.iter().all(|&s| {
            self.cofacets[s]
                .iter()
                .all(|t| set.contains(t) || within.is_some_and(|w| !w.contains(t)))
        })
    }

    /// Down-closed relative to `within` (the whole complex if `None`).
    pub fn is_down_closed(&self, set: &SimplexSet, within: Option<&SimplexSet>) -> bool {
        set.iter().all(|&s| {
            self.facets[s]
                .iter()
                .all(|(f, _)| set.contains(f) || within.is_some_and(|w| !w.contains(f)))
        })
    }

    /// Up-, down-closedness of `set` inside the whole complex.
    pub fn closure_kind(&self, set: &SimplexSet) -> Closure {
        match (self.is_up_closed(set, None), self.is_down_closed(set, None)) {
            (true, true) => Closure::Both,
            (true, false) => Closure::UpClosed,
            (false, true) => Closure::DownClosed,
            (false, false) => Closure::Neither,
        }
    }

    /// Locally closed (convex) inside the whole complex: `ρ ≤ τ ≤ σ` with `ρ, σ` in the set forces `τ`.
    pub fn is_convex(&self, set: &SimplexSet) -> bool {
        let up = self.up_closure(set);
        let down = self.down_closure(set);
        up.intersection(&down).all(|s| set.contains(s))
    }

    /// `{τ : τ ∩ σ = ∅, τ ∪ σ a simplex}`, with the original labels.
    /// The result may be empty, in which case `Ok(None)` is returned.
    pub fn link_of(&self, sigma: usize) -> Result<Option<SimplicialComplex>> {
        let star = self.open_star(sigma)?;
        let sv = &self.simplices[sigma];
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for &t in &star {
            let rest: Vec<usize> = self.simplices[t]
                .iter()
                .copied()
                .filter(|v| !sv.contains(v))
                .collect();
            if !rest.is_empty() {
                faces.insert(rest);
            }
        }
        if faces.is_empty() {
            return Ok(None);
        }
        let used: BTreeSet<usize> = faces.iter().flatten().copied().collect();
        let vertices: Vec<Vertex> = used.iter().map(|&v| self.labels[v].clone()).collect();
        let maximal: Vec<Vec<Vertex>> = faces
            .iter()
            .map(|f| f.iter().map(|&v| self.labels[v].clone()).collect())
            .collect();
        Self::from_maximal(&vertices, &maximal).map(Some)
    }

    /// Partition by the equivalence generated by face-comparability inside the set.
    pub fn components_of(&self, set: &SimplexSet) -> Vec<SimplexSet> {
        let mut seen = SimplexSet::new();
        let mut out = Vec::new();
        for &start in set {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = SimplexSet::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(s) = stack.pop() {
                comp.insert(s);
                let nbrs = self.facets[s]
                    .iter()
                    .map(|f| f.0)
                    .chain(self.cofacets[s].iter().copied());
                for t in nbrs {
                    if set.contains(&t) && seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Strict chains `σ0 ⊂ … ⊂ σp` inside the set, in lexicographic id order.
    pub fn order_chains(&self, set: &SimplexSet, p: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(p + 1);
        for &s in set {
            cur.push(s);
            self.extend_chains(set, p, &mut cur, &mut out);
            cur.pop();
        }
        out
    }

    fn extend_chains(&self, set: &SimplexSet, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p + 1 {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &t in set.range(last + 1..) {
            if self.simplices[t].len() > self.simplices[last].len() && self.is_face(last, t) {
                cur.push(t);
                self.extend_chains(set, p, cur, out);
                cur.pop();
            }
        }
    }

    /// All strict chains in the set, grouped by length `p` (index `p`).
    pub fn all_chains(&self, set: &SimplexSet) -> Vec<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut p = 0;
        loop {
            let c = self.order_chains(set, p);
            if c.is_empty() {
                break;
            }
            out.push(c);
            p += 1;
        }
        out
    }

    /// Canonical names of the simplices in a set.
    pub fn names(&self, set: &SimplexSet) -> Vec<String> {
        set.iter().map(|&s| self.name(s)).collect()
    }

    /// Label tuples of the simplices in a set.
    pub fn tuples(&self, set: &SimplexSet) -> Vec<Vec<Vertex>> {
        set.iter().map(|&s| self.labels_of(s)).collect()
    }

    /// Maximal real simplex dimension in a set, `None` when empty.
    pub fn max_dim(&self, set: &SimplexSet) -> Option<usize> {
        set.iter().map(|&s| self.dim_of(s)).max()
    }

    /// Simplices of the given real dimension.
    pub fn of_dim(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&s| self.dim_of(s) == d)
    }

    /// f-vector: number of simplices per real dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim + 1];
        for s in &self.simplices {
            f[s.len() - 1] += 1;
        }
        f
    }

    /// Subcomplex spanned by a down-closed set, as a standalone complex.
    pub fn subcomplex(&self, set: &SimplexSet) -> Result<SimplicialComplex> {
        if !self.is_down_closed(set, None) {
            return Err(Error::Closure("subcomplex needs a down-closed set".into()));
        }
        let used: BTreeSet<usize> = set.iter().flat_map(|&s| self.simplices[s].iter().copied()).collect();
        let vertices: Vec<Vertex> = used.iter().map(|&v| self.labels[v].clone()).collect();
        let maximal: Vec<Vec<Vertex>> = set
            .iter()
            .filter(|&&s| self.cofacets[s].iter().all(|t| !set.contains(t)))
            .map(|&s| self.labels_of(s))
            .collect();
        Self::from_maximal(&vertices, &maximal)
    }

    /// Reduced Betti numbers `b̃_0, …, b̃_dim` over `F`, from the augmented
    /// simplicial chain complex.
    pub fn reduced_betti<F: Field>(&self) -> Vec<usize> {
        let top = self.dim();
        let mut index = vec![0usize; self.len()];
        let mut counts = vec![0usize; top + 1];
        for (id, s) in self.simplices.iter().enumerate() {
            index[id] = counts[s.len() - 1];
            counts[s.len() - 1] += 1;
        }
        // rank of ∂_d : C_d → C_{d−1}, with C_{−1} = F
        let mut ranks = vec![0usize; top + 2];
        for d in 0..=top {
            let cols: Vec<SparseVec<F>> = self
                .of_dim(d)
                .map(|s| {
                    if d == 0 {
                        vec![(0, F::one())]
                    } else {
                        collect_sparse(self.facets[s].iter().map(|&(f, sg)| (index[f], F::from_i64(sg as i64))))
                    }
                })
                .collect();
            let rows = if d == 0 { 1 } else { counts[d - 1] };
            ranks[d] = SparseMatrix::from_columns(rows, cols).rank();
        }
        (0..=top).map(|d| counts[d] - ranks[d] - ranks[d + 1]).collect()
    }

    /// Per-simplex name lookup table, handy for reports.
    pub fn name_map(&self, set: &SimplexSet) -> BTreeMap<usize, String> {
        set.iter().map(|&s| (s, self.name(s))).collect()
    }
}

pub(crate) fn render(labels: &[Vertex]) -> String {
    let parts: Vec<String> = labels.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Set difference helper.
pub fn minus(a: &SimplexSet, b: &SimplexSet) -> SimplexSet {
    a.difference(b).copied().collect()
}

/// Set union helper.
pub fn union(a: &SimplexSet, b: &SimplexSet) -> SimplexSet {
    a.union(b).copied().collect()
}

/// Set intersection helper.
pub fn meet(a: &SimplexSet, b: &SimplexSet) -> SimplexSet {
    a.intersection(b).copied().collect()
}
