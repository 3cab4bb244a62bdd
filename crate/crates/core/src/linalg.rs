//! Sparse exact linear algebra.
//!
//! Matrices are stored column-major as sorted sparse columns. All rank,
//! kernel and coordinate computations go through [`Echelon`], an incremental
//! column-reduction basis in the style of boundary-matrix reduction: each
//! stored vector owns a distinct pivot (its largest row index).

use std::collections::BTreeMap;

use crate::field::Field;

/// Sorted `(index, value)` pairs with no explicit zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

/// `y + a * x`.
pub fn axpy<F: Field>(y: &[(usize, F)], a: &F, x: &[(usize, F)]) -> SparseVec<F> {
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j >= x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i >= y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i].clone());
            i += 1;
        } else if take_x {
            let v = a.clone() * x[j].1.clone();
            if !v.is_zero() {
                out.push((x[j].0, v));
            }
            j += 1;
        } else {
            let v = y[i].1.clone() + a.clone() * x[j].1.clone();
            if !v.is_zero() {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<F: Field>(a: &F, x: &[(usize, F)]) -> SparseVec<F> {
    if a.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, a.clone() * v.clone())).collect()
}

fn entry<F: Field>(v: &[(usize, F)], i: usize) -> Option<&F> {
    v.binary_search_by_key(&i, |e| e.0).ok().map(|k| &v[k].1)
}

/// Builds a sparse vector from arbitrary `(index, value)` pairs, summing duplicates.
pub fn collect_sparse<F: Field>(items: impl IntoIterator<Item = (usize, F)>) -> SparseVec<F> {
    let mut acc: BTreeMap<usize, F> = BTreeMap::new();
    for (i, v) in items {
        let e = acc.entry(i).or_insert_with(F::zero);
        *e = e.clone() + v;
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<F> {
    rows: usize,
    cols: Vec<SparseVec<F>>,
}

impl<F: Field> SparseMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: (0..n).map(|i| vec![(i, F::one())]).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec<F>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.iter().all(|(r, _)| *r < rows)));
        SparseMatrix { rows, cols }
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[Vec<F>]) -> Self {
        assert_eq!(data.len(), rows);
        let mut m = Self::zeros(rows, cols);
        for (r, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.cols[c].push((r, v.clone()));
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut out = vec![vec![F::zero(); self.ncols()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                out[*r][c] = v.clone();
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, c: usize) -> &[(usize, F)] {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[SparseVec<F>] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        entry(&self.cols[c], r).cloned().unwrap_or_else(F::zero)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn mul_vec(&self, x: &[(usize, F)]) -> SparseVec<F> {
        collect_sparse(x.iter().flat_map(|(c, a)| {
            self.cols[*c]
                .iter()
                .map(move |(r, v)| (*r, a.clone() * v.clone()))
        }))
    }

    pub fn mul(&self, other: &SparseMatrix<F>) -> SparseMatrix<F> {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch in product");
        SparseMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.mul_vec(c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix<F> {
        let mut cols = vec![Vec::new(); self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                cols[*r].push((c, v.clone()));
            }
        }
        SparseMatrix {
            rows: self.ncols(),
            cols,
        }
    }

    pub fn neg(&self) -> SparseMatrix<F> {
        SparseMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().map(|(r, v)| (*r, -v.clone())).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix<F>) -> SparseMatrix<F> {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.ncols(), other.ncols());
        SparseMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| axpy(a, &F::one(), b))
                .collect(),
        }
    }

    /// Keeps the listed rows and columns, renumbered in the given order.
    /// `row_map[old]` gives the new index of a kept row.
    pub fn select(&self, row_map: &[Option<usize>], new_rows: usize, col_sel: &[usize]) -> Self {
        let cols = col_sel
            .iter()
            .map(|&c| {
                let mut v: SparseVec<F> = self.cols[c]
                    .iter()
                    .filter_map(|(r, x)| row_map[*r].map(|nr| (nr, x.clone())))
                    .collect();
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        SparseMatrix {
            rows: new_rows,
            cols,
        }
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(false);
        self.cols.iter().filter(|c| e.insert(c).is_independent()).count()
    }

    /// Basis of the null space, as sparse vectors over column indices.
    pub fn kernel(&self) -> Vec<SparseVec<F>> {
        let mut e = Echelon::new(true);
        self.cols
            .iter()
            .filter_map(|c| match e.insert(c) {
                Insert::Dependent(rel) => Some(rel),
                Insert::Independent(_) => None,
            })
            .collect()
    }
}

pub enum Insert<F> {
    Independent(usize),
    /// A relation over the inserted vectors, with coefficient 1 on the new one, summing to zero.
    Dependent(SparseVec<F>),
}

impl<F> Insert<F> {
    pub fn is_independent(&self) -> bool {
        matches!(self, Insert::Independent(_))
    }
}

/// Incremental echelon basis over a field.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    vecs: Vec<SparseVec<F>>,
    pivot_of: BTreeMap<usize, usize>,
    combos: Option<Vec<SparseVec<F>>>,
    inserted: usize,
}

impl<F: Field> Echelon<F> {
    /// With `track` set, every stored vector remembers its expression in the inserted inputs.
    pub fn new(track: bool) -> Self {
        Echelon {
            vecs: Vec::new(),
            pivot_of: BTreeMap::new(),
            combos: track.then(Vec::new),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_of.keys().copied()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivot_of.contains_key(&i)
    }

    pub fn insert(&mut self, v: &[(usize, F)]) -> Insert<F> {
        let idx = self.inserted;
        self.inserted += 1;
        let mut v = v.to_vec();
        let mut combo: SparseVec<F> = if self.combos.is_some() {
            vec![(idx, F::one())]
        } else {
            Vec::new()
        };
        while let Some((p, lead)) = v.last().cloned() {
            let Some(&k) = self.pivot_of.get(&p) else {
                break;
            };
            let b = &self.vecs[k];
            let a = -(lead / b.last().unwrap().1.clone());
            v = axpy(&v, &a, b);
            if let Some(cs) = &self.combos {
                combo = axpy(&combo, &a, &cs[k]);
            }
        }
        match v.last() {
            None => Insert::Dependent(combo),
            Some(&(p, _)) => {
                let k = self.vecs.len();
                self.pivot_of.insert(p, k);
                self.vecs.push(v);
                if let Some(cs) = &mut self.combos {
                    cs.push(combo);
                }
                Insert::Independent(k)
            }
        }
    }

    /// Fully reduces `x`: returns coefficients over the inserted inputs and a
    /// residual vanishing at every pivot row, with `x = Σ coeff·input + residual`.
    /// Requires tracking.
    pub fn decompose(&self, x: &[(usize, F)]) -> (SparseVec<F>, SparseVec<F>) {
        let combos = self.combos.as_ref().expect("decompose requires tracking");
        let mut r = x.to_vec();
        let mut coeff: SparseVec<F> = Vec::new();
        let mut cursor = usize::MAX;
        loop {
            let next = r
                .iter()
                .rev()
                .find(|(i, _)| *i < cursor && self.pivot_of.contains_key(i))
                .cloned();
            let Some((p, val)) = next else { break };
            let k = self.pivot_of[&p];
            let b = &self.vecs[k];
            let a = val / b.last().unwrap().1.clone();
            r = axpy(&r, &(-a.clone()), b);
            coeff = axpy(&coeff, &a, &combos[k]);
            cursor = p;
        }
        (coeff, r)
    }

    /// Coefficients over the inserted inputs if `x` lies in their span.
    pub fn solve(&self, x: &[(usize, F)]) -> Option<SparseVec<F>> {
        let (c, r) = self.decompose(x);
        r.is_empty().then_some(c)
    }
}

/// Data describing a quotient `k^n / span(cols)`: the complement coordinates
/// (non-pivot rows) and the projection onto them.
#[derive(Clone, Debug)]
pub struct Quotient<F> {
    ambient: usize,
    basis: Echelon<F>,
    /// Ambient indices spanning a complement, in increasing order.
    pub complement: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl<F: Field> Quotient<F> {
    pub fn new(ambient: usize, span: &[SparseVec<F>]) -> Self {
        let mut basis = Echelon::new(true);
        for v in span {
            basis.insert(v);
        }
        let complement: Vec<usize> = (0..ambient).filter(|i| !basis.is_pivot(*i)).collect();
        let mut position = vec![None; ambient];
        for (k, &i) in complement.iter().enumerate() {
            position[i] = Some(k);
        }
        Quotient {
            ambient,
            basis,
            complement,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Class of `x` in complement coordinates.
    pub fn project(&self, x: &[(usize, F)]) -> SparseVec<F> {
        let (_, r) = self.basis.decompose(x);
        r.into_iter()
            .map(|(i, v)| (self.position[i].expect("residual on pivot row"), v))
            .collect()
    }

    /// Matrix of the projection, `dim × ambient`.
    pub fn matrix(&self) -> SparseMatrix<F> {
        let cols = (0..self.ambient)
            .map(|i| self.project(&[(i, F::one())]))
            .collect();
        SparseMatrix::from_columns(self.dim(), cols)
    }

    /// Lift of a complement-coordinate vector back into the ambient space.
    pub fn lift(&self, y: &[(usize, F)]) -> SparseVec<F> {
        y.iter()
            .map(|(k, v)| (self.complement[*k], v.clone()))
            .collect()
    }
}

/// A linear map `π` with `π · M = I` for a matrix `M` of full column rank.
pub fn left_inverse<F: Field>(m: &SparseMatrix<F>) -> SparseMatrix<F> {
    let mut e = Echelon::new(true);
    for c in m.columns() {
        assert!(e.insert(c).is_independent(), "left_inverse needs independent columns");
    }
    let cols = (0..m.nrows())
        .map(|i| e.decompose(&[(i, F::one())]).0)
        .collect();
    SparseMatrix::from_columns(m.ncols(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rational};
    use proptest::prelude::*;

    type Q = Rational;

    fn q(v: i64) -> Q {
        Q::from_i64(v)
    }

    fn dense(rows: &[&[i64]]) -> SparseMatrix<Q> {
        let data: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|v| q(*v)).collect()).collect();
        SparseMatrix::from_dense(rows.len(), rows[0].len(), &data)
    }

    #[test]
    fn rank_and_kernel_small() {
        let m = dense(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).is_empty());
    }

    #[test]
    fn quotient_projection_kills_span() {
        let span = vec![vec![(0, q(1)), (2, q(1))]];
        let quo = Quotient::new(3, &span);
        assert_eq!(quo.dim(), 2);
        assert!(quo.project(&span[0]).is_empty());
        let m = quo.matrix();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m.ncols(), 3);
        for (k, &i) in quo.complement.iter().enumerate() {
            assert_eq!(quo.project(&[(i, q(1))]), vec![(k, q(1))]);
        }
    }

    #[test]
    fn left_inverse_is_left_inverse() {
        let m = dense(&[&[1, 0], &[2, 1], &[0, 3]]);
        let pi = left_inverse(&m);
        assert_eq!(pi.mul(&m), SparseMatrix::identity(2));
    }

    #[test]
    fn mod_two_rank_differs() {
        let data: Vec<Vec<Fp<2>>> = [[1, 1], [1, -1]]
            .iter()
            .map(|r| r.iter().map(|v| Fp::new(*v)).collect())
            .collect();
        let m = SparseMatrix::from_dense(2, 2, &data);
        assert_eq!(m.rank(), 1);
        assert_eq!(dense(&[&[1, 1], &[1, -1]]).rank(), 2);
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-2i64..3, 20)) {
            let rows: Vec<Vec<Q>> = entries.chunks(5).map(|r| r.iter().map(|v| q(*v)).collect()).collect();
            let m = SparseMatrix::from_dense(4, 5, &rows);
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.len(), 5);
            for v in &k {
                prop_assert!(m.mul_vec(v).is_empty());
            }
            prop_assert_eq!(m.transpose().rank(), m.rank());
        }

        #[test]
        fn decompose_reconstructs(entries in proptest::collection::vec(-2i64..3, 12), x in proptest::collection::vec(-3i64..4, 4)) {
            let cols: Vec<SparseVec<Q>> = entries
                .chunks(4)
                .map(|c| c.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, q(*v))).collect())
                .collect();
            let mut e = Echelon::new(true);
            for c in &cols { e.insert(c); }
            let xv: SparseVec<Q> = x.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, q(*v))).collect();
            let (coeff, r) = e.decompose(&xv);
            let mut acc = r.clone();
            for (j, a) in &coeff { acc = axpy(&acc, a, &cols[*j]); }
            prop_assert_eq!(acc, xv);
            for (i, _) in &r { prop_assert!(!e.is_pivot(*i)); }
        }
    }
}
