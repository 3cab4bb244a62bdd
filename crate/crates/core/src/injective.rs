//! Minimal injective resolutions of cellular sheaves.
//!
//! On a finite poset the indecomposable injective sheaves are `[ρ]`: the
//! field on every face of `ρ`, zero elsewhere, identity restrictions. The
//! injective hull of `G` is `⊕_ρ [ρ] ⊗ N(ρ)` where `N(ρ)` is the part of
//! `G(ρ)` killed by every restriction to a coface. Iterating hull and
//! cokernel resolves `G`; the length is bounded by the height of the domain.

use std::collections::{BTreeMap, HashMap};

use crate::field::Field;
use crate::linalg::{collect_sparse, left_inverse, Quotient, SparseMatrix, SparseVec};
use crate::simplicial::{SimplexSet, SimplicialComplex};

/// A sheaf given by stalk dimensions and every restriction `σ ⊊ ρ`.
/// Missing pairs are zero maps.
#[derive(Clone, Debug)]
pub(crate) struct PairSheaf<F> {
    pub dims: BTreeMap<usize, usize>,
    pub maps: HashMap<(usize, usize), SparseMatrix<F>>,
}

impl<F: Field> PairSheaf<F> {
    fn dim(&self, s: usize) -> usize {
        self.dims.get(&s).copied().unwrap_or(0)
    }

    fn map_col(&self, s: usize, r: usize, i: usize) -> SparseVec<F> {
        if s == r {
            return vec![(i, F::one())];
        }
        self.maps.get(&(s, r)).map(|m| m.col(i).to_vec()).unwrap_or_default()
    }
}

/// One injective term `J^i = ⊕_ρ [ρ]^{n_ρ}`; elements are grouped by support in increasing id order.
#[derive(Clone, Debug)]
pub(crate) struct HullLevel<F> {
    pub supports: Vec<usize>,
    pub start: BTreeMap<usize, usize>,
    /// `π_ρ : G(ρ) → N(ρ)`, a left inverse of the inclusion of `N(ρ)`.
    pub pi: BTreeMap<usize, SparseMatrix<F>>,
}

#[derive(Clone, Debug)]
pub(crate) struct Hull<F> {
    pub levels: Vec<HullLevel<F>>,
    /// `diffs[i] : J^i → J^{i+1}`.
    pub diffs: Vec<SparseMatrix<F>>,
}

struct Cokernel<F> {
    /// Elements of `I(σ)` in order, and where each support block starts.
    elems: Vec<usize>,
    offsets: BTreeMap<usize, usize>,
    quotient: Quotient<F>,
    qmat: SparseMatrix<F>,
}

/// Simplices of the domain above each simplex, in increasing id order.
pub(crate) fn up_lists(cx: &SimplicialComplex, domain: &SimplexSet) -> BTreeMap<usize, Vec<usize>> {
    domain
        .iter()
        .map(|&s| {
            let ups = cx
                .open_star(s)
                .expect("domain simplex")
                .into_iter()
                .filter(|t| domain.contains(t))
                .collect();
            (s, ups)
        })
        .collect()
}

pub(crate) fn resolve<F: Field>(cx: &SimplicialComplex, domain: &SimplexSet, sheaf: PairSheaf<F>) -> Hull<F> {
    let ups = up_lists(cx, domain);
    let height = domain.iter().map(|&s| cx.dim_of(s)).max().unwrap_or(0)
        - domain.iter().map(|&s| cx.dim_of(s)).min().unwrap_or(0);
    let mut g = sheaf;
    let mut levels: Vec<HullLevel<F>> = Vec::new();
    let mut diffs = Vec::new();
    let mut prev: Option<BTreeMap<usize, Cokernel<F>>> = None;
    for _ in 0..height + 3 {
        if g.dims.values().all(|&d| d == 0) {
            break;
        }
        // Socle N(ρ) and its left inverse.
        let mut pi: BTreeMap<usize, SparseMatrix<F>> = BTreeMap::new();
        for &r in domain {
            let d = g.dim(r);
            if d == 0 {
                continue;
            }
            let mut stacked: Vec<SparseVec<F>> = vec![Vec::new(); d];
            let mut offset = 0;
            for &c in cx.cofacets(r) {
                if !domain.contains(&c) || g.dim(c) == 0 {
                    continue;
                }
                for (i, col) in stacked.iter_mut().enumerate() {
                    col.extend(g.map_col(r, c, i).into_iter().map(|(row, v)| (row + offset, v)));
                }
                offset += g.dim(c);
            }
            let kernel = SparseMatrix::from_columns(offset, stacked).kernel();
            if !kernel.is_empty() {
                pi.insert(r, left_inverse(&SparseMatrix::from_columns(d, kernel)));
            }
        }
        let mut supports = Vec::new();
        let mut start = BTreeMap::new();
        for (&r, p) in &pi {
            start.insert(r, supports.len());
            supports.extend(std::iter::repeat(r).take(p.nrows()));
        }
        let level = HullLevel { supports, start, pi };
        if let Some(prev) = prev.take() {
            diffs.push(connect(&levels.last().unwrap().supports, &prev, &level));
        }
        // Embedding into I(σ) and the cokernel sheaf.
        let mut cok: BTreeMap<usize, Cokernel<F>> = BTreeMap::new();
        for &s in domain {
            let mut elems = Vec::new();
            let mut offsets = BTreeMap::new();
            for &r in &ups[&s] {
                if let Some(p) = level.pi.get(&r) {
                    offsets.insert(r, elems.len());
                    let st = level.start[&r];
                    elems.extend(st..st + p.nrows());
                }
            }
            let eps: Vec<SparseVec<F>> = (0..g.dim(s))
                .map(|i| {
                    let mut col = Vec::new();
                    for (&r, &off) in &offsets {
                        let y = level.pi[&r].mul_vec(&g.map_col(s, r, i));
                        col.extend(y.into_iter().map(|(j, v)| (off + j, v)));
                    }
                    col
                })
                .collect();
            let quotient = Quotient::new(elems.len(), &eps);
            let qmat = quotient.matrix();
            cok.insert(
                s,
                Cokernel {
                    elems,
                    offsets,
                    quotient,
                    qmat,
                },
            );
        }
        let mut dims = BTreeMap::new();
        for (&s, c) in &cok {
            dims.insert(s, c.quotient.dim());
        }
        let mut maps = HashMap::new();
        for &s in domain {
            let cs = &cok[&s];
            if cs.quotient.dim() == 0 {
                continue;
            }
            for &r in &ups[&s] {
                if r == s || dims[&r] == 0 {
                    continue;
                }
                let cr = &cok[&r];
                let cols = cs
                    .quotient
                    .complement
                    .iter()
                    .map(|&p| {
                        let e = cs.elems[p];
                        let supp = level.supports[e];
                        match cr.offsets.get(&supp) {
                            Some(off) => cr.qmat.col(off + e - level.start[&supp]).to_vec(),
                            None => Vec::new(),
                        }
                    })
                    .collect();
                maps.insert((s, r), SparseMatrix::from_columns(dims[&r], cols));
            }
        }
        levels.push(level);
        prev = Some(cok);
        g = PairSheaf { dims, maps };
    }
    assert!(g.dims.values().all(|&d| d == 0), "resolution did not terminate");
    Hull { levels, diffs }
}

/// `J^i → J^{i+1}`: the quotient map onto the cokernel followed by the next hull embedding.
fn connect<F: Field>(prev_supports: &[usize], cok: &BTreeMap<usize, Cokernel<F>>, next: &HullLevel<F>) -> SparseMatrix<F> {
    let mut cols: Vec<Vec<(usize, F)>> = vec![Vec::new(); prev_supports.len()];
    for (&r, p) in &next.pi {
        let c = &cok[&r];
        let st = next.start[&r];
        for (pos, &e) in c.elems.iter().enumerate() {
            let y = p.mul_vec(c.qmat.col(pos));
            cols[e].extend(y.into_iter().map(|(j, v)| (st + j, v)));
        }
    }
    let cols = cols.into_iter().map(collect_sparse).collect();
    SparseMatrix::from_columns(next.supports.len(), cols)
}
