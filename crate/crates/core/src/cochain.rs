//! Bounded cochain complexes of finite-dimensional vector spaces.

use std::collections::BTreeMap;

use crate::field::Field;
use crate::linalg::SparseMatrix;

/// Degree → dimension, zero entries omitted.
pub type DimTable = BTreeMap<i32, usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain<F> {
    lo: i32,
    dims: Vec<usize>,
    /// `d[i]` maps degree `lo+i` to `lo+i+1`.
    d: Vec<SparseMatrix<F>>,
}

impl<F: Field> Cochain<F> {
    pub fn new(lo: i32, dims: Vec<usize>, d: Vec<SparseMatrix<F>>) -> Self {
        assert_eq!(d.len(), dims.len().saturating_sub(1), "one differential per consecutive pair");
        for (i, m) in d.iter().enumerate() {
            assert_eq!(m.ncols(), dims[i]);
            assert_eq!(m.nrows(), dims[i + 1]);
        }
        Cochain { lo, dims, d }
    }

    pub fn zero() -> Self {
        Cochain {
            lo: 0,
            dims: Vec::new(),
            d: Vec::new(),
        }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// One past the top degree.
    pub fn end(&self) -> i32 {
        self.lo + self.dims.len() as i32
    }

    pub fn dim(&self, q: i32) -> usize {
        if q < self.lo || q >= self.end() {
            0
        } else {
            self.dims[(q - self.lo) as usize]
        }
    }

    /// Differential out of degree `q`, if both ends are in range.
    pub fn diff(&self, q: i32) -> Option<&SparseMatrix<F>> {
        if q < self.lo || q + 1 >= self.end() {
            None
        } else {
            self.d.get((q - self.lo) as usize)
        }
    }

    /// `d(q)` as an explicit matrix, zero outside the range.
    pub fn diff_or_zero(&self, q: i32) -> SparseMatrix<F> {
        self.diff(q)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dim(q + 1), self.dim(q)))
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_complex(&self) -> bool {
        self.d.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    pub fn cohomology(&self) -> DimTable {
        let ranks: Vec<usize> = self.d.iter().map(|m| m.rank()).collect();
        let mut out = DimTable::new();
        for (i, &n) in self.dims.iter().enumerate() {
            let out_rank = ranks.get(i).copied().unwrap_or(0);
            let in_rank = if i > 0 { ranks[i - 1] } else { 0 };
            let h = n - out_rank - in_rank;
            if h > 0 {
                out.insert(self.lo + i as i32, h);
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &n)| if (self.lo + i as i32).rem_euclid(2) == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// `C[k]`: degree `q` becomes `q−k`, differential multiplied by `(−1)^k`.
    pub fn shift(&self, k: i32) -> Self {
        let d = if k.rem_euclid(2) == 0 {
            self.d.clone()
        } else {
            self.d.iter().map(|m| m.neg()).collect()
        };
        Cochain {
            lo: self.lo - k,
            dims: self.dims.clone(),
            d,
        }
    }
}

/// Degreewise matrices `A^q → B^q`; missing degrees are zero.
#[derive(Clone, Debug)]
pub struct ChainMap<F> {
    pub maps: BTreeMap<i32, SparseMatrix<F>>,
}

impl<F: Field> ChainMap<F> {
    pub fn is_chain_map(&self, a: &Cochain<F>, b: &Cochain<F>) -> bool {
        let lo = a.lo().min(b.lo()) - 1;
        let hi = a.end().max(b.end()) + 1;
        (lo..hi).all(|q| {
            let fq = self.get(q, a, b);
            let fq1 = self.get(q + 1, a, b);
            fq1.mul(&a.diff_or_zero(q)) == b.diff_or_zero(q).mul(&fq)
        })
    }

    fn get(&self, q: i32, a: &Cochain<F>, b: &Cochain<F>) -> SparseMatrix<F> {
        self.maps
            .get(&q)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(b.dim(q), a.dim(q)))
    }

    /// `cone(f)^q = B^q ⊕ A^{q+1}` with differential `(b, a) ↦ (d_B b + f a, −d_A a)`.
    pub fn cone(&self, a: &Cochain<F>, b: &Cochain<F>) -> Cochain<F> {
        if a.total_dim() == 0 && b.total_dim() == 0 {
            return Cochain::zero();
        }
        let lo = b.lo().min(a.lo() - 1);
        let end = b.end().max(a.end() - 1);
        let dims: Vec<usize> = (lo..end).map(|q| b.dim(q) + a.dim(q + 1)).collect();
        let mut d = Vec::new();
        for q in lo..end - 1 {
            let (nb, na) = (b.dim(q), a.dim(q + 1));
            let (mb, ma) = (b.dim(q + 1), a.dim(q + 2));
            let db = b.diff_or_zero(q);
            let da = a.diff_or_zero(q + 1);
            let f = self.get(q + 1, a, b);
            let mut cols = Vec::with_capacity(nb + na);
            for c in 0..nb {
                cols.push(db.col(c).to_vec());
            }
            for c in 0..na {
                let mut col: Vec<(usize, F)> = f.col(c).to_vec();
                col.extend(da.col(c).iter().map(|(r, v)| (mb + r, -v.clone())));
                cols.push(col);
            }
            d.push(SparseMatrix::from_columns(mb + ma, cols));
        }
        Cochain::new(lo, dims, d)
    }
}
