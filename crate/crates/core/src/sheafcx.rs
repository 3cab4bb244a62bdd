//! Bounded complexes of cellular sheaves, stored as complexes of injectives.
//!
//! Every term is a sum of indecomposable injectives `[ρ]`, one per basis
//! element, where `[ρ]` is the field on each face of `ρ` and zero elsewhere.
//! A differential entry from an element supported on `ρ` to one supported on
//! `ρ'` may be nonzero only when `ρ' ⊆ ρ`. In this form:
//!
//! * the value (stalk) at `σ` is the subcomplex of elements supported on cofaces of `σ`;
//! * sections over an open set `U` are the elements supported in `U`;
//! * `j^*` keeps the elements supported in `U`, and `Rj_*`, `i_*` only change the domain.
//!
//! Truncation re-resolves the kernel sheaf with injective hulls. The nerve
//! (order-chain) resolution is available as an independent route and is used
//! for restriction to closed subsets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::cochain::{ChainMap, Cochain, DimTable};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::injective::{resolve, up_lists, PairSheaf};
use crate::linalg::{collect_sparse, Echelon, Insert, SparseMatrix, SparseVec};
use crate::sheaf::CellularSheaf;
use crate::simplicial::{SimplexSet, SimplicialComplex};
use crate::stratify::Stratification;

/// Simplex → degree → dimension.
pub type StalkTable = BTreeMap<usize, DimTable>;

#[derive(Clone, Debug)]
pub struct SheafComplex<F> {
    complex: Arc<SimplicialComplex>,
    domain: SimplexSet,
    lo: i32,
    supports: Vec<Vec<usize>>,
    diffs: Vec<SparseMatrix<F>>,
}

/// A subcomplex of sections together with the global element indices it keeps.
struct Sub<F> {
    cochain: Cochain<F>,
    kept: Vec<Vec<usize>>,
}

impl<F: Field> SheafComplex<F> {
    pub fn zero(complex: Arc<SimplicialComplex>, domain: SimplexSet) -> Self {
        SheafComplex {
            complex,
            domain,
            lo: 0,
            supports: Vec::new(),
            diffs: Vec::new(),
        }
    }

    /// Assembles a complex from raw data, checking supports, the face rule and `d² = 0`.
    pub fn from_parts(
        complex: Arc<SimplicialComplex>,
        domain: SimplexSet,
        lo: i32,
        supports: Vec<Vec<usize>>,
        diffs: Vec<SparseMatrix<F>>,
    ) -> Result<Self> {
        if diffs.len() != supports.len().saturating_sub(1) {
            return Err(Error::Input("one differential per consecutive pair of degrees".into()));
        }
        for term in &supports {
            if let Some(s) = term.iter().find(|s| !domain.contains(s)) {
                return Err(Error::Domain(format!("support {} outside the domain", complex.name(*s))));
            }
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.ncols() != supports[i].len() || d.nrows() != supports[i + 1].len() {
                return Err(Error::Input(format!("differential {} has the wrong shape", lo + i as i32)));
            }
            for (r, c, _) in d.entries() {
                if !complex.is_face(supports[i + 1][r], supports[i][c]) {
                    return Err(Error::Input(format!(
                        "differential entry from {} to {} violates the face rule",
                        complex.name(supports[i][c]),
                        complex.name(supports[i + 1][r])
                    )));
                }
            }
        }
        if diffs.windows(2).any(|w| !w[1].mul(&w[0]).is_zero()) {
            return Err(Error::Input("d∘d ≠ 0".into()));
        }
        let mut out = SheafComplex {
            complex,
            domain,
            lo,
            supports,
            diffs,
        };
        out.trim();
        Ok(out)
    }

    /// Injective resolution of a cellular sheaf placed in degree `degree`.
    pub fn resolve_sheaf(sheaf: &CellularSheaf<F>, degree: i32) -> Self {
        let cx = sheaf.complex().clone();
        let pair = PairSheaf {
            dims: sheaf.dims().clone(),
            maps: sheaf.all_pairs(),
        };
        let hull = resolve(&cx, sheaf.domain(), pair);
        let mut out = SheafComplex {
            complex: cx,
            domain: sheaf.domain().clone(),
            lo: degree,
            supports: hull.levels.into_iter().map(|l| l.supports).collect(),
            diffs: hull.diffs,
        };
        out.trim();
        out
    }

    /// Constant sheaf of rank `r` on the domain, placed in degree `degree`.
    pub fn constant(complex: Arc<SimplicialComplex>, domain: SimplexSet, rank: usize, degree: i32) -> Self {
        Self::resolve_sheaf(&CellularSheaf::constant(complex, domain, rank), degree)
    }

    fn trim(&mut self) {
        while self.supports.last().is_some_and(|t| t.is_empty()) {
            self.supports.pop();
            self.diffs.pop();
        }
        let lead = self.supports.iter().take_while(|t| t.is_empty()).count();
        if lead > 0 {
            self.supports.drain(..lead);
            self.diffs.drain(..lead.min(self.diffs.len()));
            self.lo += lead as i32;
        }
        if self.supports.is_empty() {
            self.lo = 0;
            self.diffs.clear();
        }
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn domain(&self) -> &SimplexSet {
        &self.domain
    }

    /// Lowest nonzero degree (0 for the zero complex).
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest nonzero degree, `lo − 1` for the zero complex.
    pub fn hi(&self) -> i32 {
        self.lo + self.supports.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.supports.is_empty()
    }

    /// Supports of the injective summands in degree `q`.
    pub fn term(&self, q: i32) -> &[usize] {
        if q < self.lo || q > self.hi() {
            &[]
        } else {
            &self.supports[(q - self.lo) as usize]
        }
    }

    /// Differential out of degree `q`.
    pub fn diff(&self, q: i32) -> Option<&SparseMatrix<F>> {
        if q < self.lo || q >= self.hi() {
            None
        } else {
            Some(&self.diffs[(q - self.lo) as usize])
        }
    }

    /// Number of indecomposable injective summands.
    pub fn size(&self) -> usize {
        self.supports.iter().map(Vec::len).sum()
    }

    fn sub(&self, keep: impl Fn(usize) -> bool) -> Sub<F> {
        let kept: Vec<Vec<usize>> = self
            .supports
            .iter()
            .map(|t| (0..t.len()).filter(|&i| keep(t[i])).collect())
            .collect();
        let dims: Vec<usize> = kept.iter().map(Vec::len).collect();
        let d = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut row_map = vec![None; self.supports[i + 1].len()];
                for (new, &old) in kept[i + 1].iter().enumerate() {
                    row_map[old] = Some(new);
                }
                m.select(&row_map, kept[i + 1].len(), &kept[i])
            })
            .collect();
        Sub {
            cochain: Cochain::new(self.lo, dims, d),
            kept,
        }
    }

    /// Value complex at `σ`, the derived sections over the open star.
    pub fn value(&self, sigma: usize) -> Cochain<F> {
        let cx = &self.complex;
        self.sub(|s| cx.is_face(sigma, s)).cochain
    }

    /// Sections over an open subset of the domain; the whole domain if `None`.
    pub fn sections(&self, open: Option<&SimplexSet>) -> Cochain<F> {
        match open {
            None => self.sub(|_| true).cochain,
            Some(u) => self.sub(|s| u.contains(&s)).cochain,
        }
    }

    pub fn stalk_cohomology(&self, sigma: usize) -> DimTable {
        self.value(sigma).cohomology()
    }

    /// Stalk cohomology at every simplex of the domain.
    pub fn stalk_table(&self) -> StalkTable {
        let sims: Vec<usize> = self.domain.iter().copied().collect();
        sims.into_par_iter().map(|s| (s, self.stalk_cohomology(s))).collect()
    }

    /// Hypercohomology over an open subset (the whole domain if `None`).
    pub fn hypercohomology(&self, open: Option<&SimplexSet>) -> Result<DimTable> {
        if let Some(u) = open {
            self.check_open(u)?;
        }
        Ok(self.sections(open).cohomology())
    }

    fn check_open(&self, u: &SimplexSet) -> Result<()> {
        if !u.is_subset(&self.domain) || !self.complex.is_up_closed(u, Some(&self.domain)) {
            return Err(Error::Closure("expected an open (up-closed) subset of the domain".into()));
        }
        Ok(())
    }

    /// `H^a(i_x^! S)` for `x` in the open cell of `σ`: the fiber of sections over
    /// the star of `σ` onto sections over the star minus `σ`, shifted by `[−dim σ]`.
    pub fn cell_costalk(&self, sigma: usize) -> DimTable {
        let cx = &self.complex;
        let a = self.sub(|s| cx.is_face(sigma, s));
        let b = self.sub(|s| s != sigma && cx.is_face(sigma, s));
        let mut maps = BTreeMap::new();
        for (i, (ka, kb)) in a.kept.iter().zip(&b.kept).enumerate() {
            let pos: HashMap<usize, usize> = kb.iter().enumerate().map(|(p, &e)| (e, p)).collect();
            let cols = ka
                .iter()
                .map(|e| pos.get(e).map(|&p| vec![(p, F::one())]).unwrap_or_default())
                .collect();
            maps.insert(self.lo + i as i32, SparseMatrix::from_columns(kb.len(), cols));
        }
        let f = ChainMap { maps };
        let cone = f.cone(&a.cochain, &b.cochain);
        let shift = cx.dim_of(sigma) as i32 + 1;
        cone.cohomology().into_iter().map(|(t, h)| (t + shift, h)).collect()
    }

    /// Costalk from the block of summands supported exactly on `σ`
    /// (the kernel of the restriction, which is surjective here).
    pub fn cell_costalk_diagonal(&self, sigma: usize) -> DimTable {
        let d = self.complex.dim_of(sigma) as i32;
        self.sub(|s| s == sigma)
            .cochain
            .cohomology()
            .into_iter()
            .map(|(t, h)| (t + d, h))
            .collect()
    }

    /// Costalks at the given simplices (the whole domain if `None`).
    pub fn costalk_table(&self, sample: Option<&SimplexSet>) -> StalkTable {
        let sims: Vec<usize> = match sample {
            Some(set) => set.intersection(&self.domain).copied().collect(),
            None => self.domain.iter().copied().collect(),
        };
        sims.into_par_iter().map(|s| (s, self.cell_costalk(s))).collect()
    }

    /// `j^*` for an open subset of the domain.
    pub fn restrict_open(&self, u: &SimplexSet) -> Result<Self> {
        self.check_open(u)?;
        let sub = self.sub(|s| u.contains(&s));
        let supports = sub
            .kept
            .iter()
            .zip(&self.supports)
            .map(|(k, t)| k.iter().map(|&i| t[i]).collect())
            .collect();
        let diffs = (0..sub.kept.len().saturating_sub(1))
            .map(|i| sub.cochain.diff(self.lo + i as i32).cloned().unwrap())
            .collect();
        let mut out = SheafComplex {
            complex: self.complex.clone(),
            domain: u.clone(),
            lo: self.lo,
            supports,
            diffs,
        };
        out.trim();
        Ok(out)
    }

    /// `Rj_*` along the inclusion of the domain as an open subset of `v`.
    pub fn pushforward_open(&self, v: &SimplexSet) -> Result<Self> {
        if !self.domain.is_subset(v) || !self.complex.is_up_closed(&self.domain, Some(v)) {
            return Err(Error::Closure("pushforward needs the domain to be open in the target".into()));
        }
        if !self.complex.is_convex(v) {
            return Err(Error::Closure("target of a pushforward must be locally closed".into()));
        }
        let mut out = self.clone();
        out.domain = v.clone();
        Ok(out)
    }

    /// `i_*` along the inclusion of the domain as a closed subset of `x`.
    pub fn extend_by_zero(&self, x: &SimplexSet) -> Result<Self> {
        if !self.domain.is_subset(x) || !self.complex.is_down_closed(&self.domain, Some(x)) {
            return Err(Error::Closure("extension by zero needs the domain to be closed in the target".into()));
        }
        if !self.complex.is_convex(x) {
            return Err(Error::Closure("target of an extension must be locally closed".into()));
        }
        let mut out = self.clone();
        out.domain = x.clone();
        Ok(out)
    }

    /// `i^*` for a closed subset of the domain, via the nerve resolution.
    pub fn restrict_closed(&self, z: &SimplexSet) -> Result<Self> {
        if !z.is_subset(&self.domain) || !self.complex.is_down_closed(z, Some(&self.domain)) {
            return Err(Error::Closure("expected a closed (down-closed) subset of the domain".into()));
        }
        Ok(self.nerve(z).cleanup())
    }

    /// Order-chain resolution of the restriction to `p`: summands
    /// `[ρ0] ⊗ S(ρ_p)` over chains `ρ0 ⊂ … ⊂ ρp` in `p`, total differential
    /// `δ + (−1)^p d_S`. Its value at `σ` is the nerve complex of `↑σ ∩ p`.
    pub fn nerve(&self, p: &SimplexSet) -> Self {
        let cx = &self.complex;
        let p: SimplexSet = p.intersection(&self.domain).copied().collect();
        let by_len = cx.all_chains(&p);
        let mut chains: Vec<Vec<usize>> = Vec::new();
        for group in &by_len {
            chains.extend(group.iter().cloned());
        }
        if chains.is_empty() || self.is_zero() {
            return Self::zero(self.complex.clone(), p);
        }
        let chain_id: HashMap<&[usize], usize> = chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut ext: Vec<Vec<(usize, usize)>> = vec![Vec::new(); chains.len()];
        for (cid, c) in chains.iter().enumerate() {
            if c.len() < 2 {
                continue;
            }
            for k in 0..c.len() {
                let mut face = c.clone();
                face.remove(k);
                ext[chain_id[face.as_slice()]].push((cid, k));
            }
        }
        let max_p = by_len.len() as i32 - 1;
        let lo = self.lo;
        let hi = self.hi() + max_p;
        let nt = (hi - lo + 1) as usize;
        let mut supports: Vec<Vec<usize>> = vec![Vec::new(); nt];
        let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for (cid, c) in chains.iter().enumerate() {
            let last = *c.last().unwrap();
            let pp = c.len() - 1;
            for (i, term) in self.supports.iter().enumerate() {
                for (e, &s) in term.iter().enumerate() {
                    if cx.is_face(last, s) {
                        let t = i + pp;
                        index.insert((cid, i, e), supports[t].len());
                        supports[t].push(c[0]);
                    }
                }
            }
        }
        let mut cols: Vec<Vec<Vec<(usize, F)>>> = supports.iter().map(|t| vec![Vec::new(); t.len()]).collect();
        for (&(cid, i, e), &pos) in &index {
            let pp = chains[cid].len() - 1;
            let t = i + pp;
            let col = &mut cols[t][pos];
            if i + 1 < self.supports.len() {
                let sign = if pp % 2 == 0 { F::one() } else { -F::one() };
                for (r, v) in self.diffs[i].col(e) {
                    if let Some(&tp) = index.get(&(cid, i + 1, *r)) {
                        col.push((tp, sign.clone() * v.clone()));
                    }
                }
            }
            for &(ncid, k) in &ext[cid] {
                if let Some(&tp) = index.get(&(ncid, i, e)) {
                    let v = if k % 2 == 0 { F::one() } else { -F::one() };
                    col.push((tp, v));
                }
            }
        }
        let diffs = (0..nt.saturating_sub(1))
            .map(|t| {
                let c = std::mem::take(&mut cols[t]).into_iter().map(collect_sparse).collect();
                SparseMatrix::from_columns(supports[t + 1].len(), c)
            })
            .collect();
        let mut out = SheafComplex {
            complex: self.complex.clone(),
            domain: p,
            lo,
            supports,
            diffs,
        };
        out.trim();
        out
    }

    /// Hypercohomology through the nerve (order-complex) cochains over an open set.
    pub fn nerve_hypercohomology(&self, open: Option<&SimplexSet>) -> DimTable {
        let u = open.cloned().unwrap_or_else(|| self.domain.clone());
        self.nerve(&u).sections(None).cohomology()
    }

    /// Pushforward computed through the nerve of the up-sets; same contract as
    /// [`pushforward_open`](Self::pushforward_open), larger representation.
    pub fn nerve_pushforward(&self, v: &SimplexSet) -> Result<Self> {
        self.nerve(&self.domain.clone()).pushforward_open(v)
    }

    /// `S[k]`: degree `q` becomes `q − k`, differentials multiplied by `(−1)^k`.
    pub fn shift(&self, k: i32) -> Self {
        let mut out = self.clone();
        if out.is_zero() {
            return out;
        }
        out.lo -= k;
        if k.rem_euclid(2) == 1 {
            out.diffs = out.diffs.iter().map(|m| m.neg()).collect();
        }
        out
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain || self.complex != other.complex {
            return Err(Error::Domain("direct sum needs equal domains".into()));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let mut supports = Vec::new();
        for q in lo..=hi {
            let mut t = self.term(q).to_vec();
            t.extend_from_slice(other.term(q));
            supports.push(t);
        }
        let mut diffs = Vec::new();
        for q in lo..hi {
            let (a0, a1) = (self.term(q).len(), self.term(q + 1).len());
            let (b0, b1) = (other.term(q).len(), other.term(q + 1).len());
            let mut cols: Vec<SparseVec<F>> = Vec::with_capacity(a0 + b0);
            match self.diff(q) {
                Some(m) => cols.extend(m.columns().iter().cloned()),
                None => cols.extend(std::iter::repeat_with(Vec::new).take(a0)),
            }
            match other.diff(q) {
                Some(m) => cols.extend(
                    m.columns()
                        .iter()
                        .map(|c| c.iter().map(|(r, v)| (r + a1, v.clone())).collect()),
                ),
                None => cols.extend(std::iter::repeat_with(Vec::new).take(b0)),
            }
            diffs.push(SparseMatrix::from_columns(a1 + b1, cols));
        }
        Ok(SheafComplex {
            complex: self.complex.clone(),
            domain: self.domain.clone(),
            lo,
            supports,
            diffs,
        })
    }

    /// Good truncation `τ_{≤a}`: degrees below `a` kept, degree `a` replaced by
    /// the kernel sheaf of `d^a` (re-resolved), nothing above.
    pub fn truncate_le(&self, a: i32) -> Self {
        if self.is_zero() || a >= self.hi() {
            return self.clone();
        }
        if a < self.lo {
            return Self::zero(self.complex.clone(), self.domain.clone());
        }
        let cx = &*self.complex;
        let ia = (a - self.lo) as usize;
        let sa = &self.supports[ia];
        let sa1 = &self.supports[ia + 1];
        let da = &self.diffs[ia];
        let ups = up_lists(cx, &self.domain);
        // Kernel sheaf K(σ) ⊆ S^a(σ), basis in global coordinates.
        let mut bases: BTreeMap<usize, (Vec<SparseVec<F>>, Echelon<F>)> = BTreeMap::new();
        for &s in &self.domain {
            let cols: Vec<usize> = (0..sa.len()).filter(|&i| cx.is_face(s, sa[i])).collect();
            let mut row_map = vec![None; sa1.len()];
            let mut nr = 0;
            for (r, &t) in sa1.iter().enumerate() {
                if cx.is_face(s, t) {
                    row_map[r] = Some(nr);
                    nr += 1;
                }
            }
            let local = da.select(&row_map, nr, &cols);
            let kernel: Vec<SparseVec<F>> = local
                .kernel()
                .into_iter()
                .map(|v| v.into_iter().map(|(i, x)| (cols[i], x)).collect())
                .collect();
            let mut ech = Echelon::new(true);
            for k in &kernel {
                ech.insert(k);
            }
            bases.insert(s, (kernel, ech));
        }
        let dims: BTreeMap<usize, usize> = bases.iter().map(|(s, (b, _))| (*s, b.len())).collect();
        let mut maps = HashMap::new();
        for &s in &self.domain {
            let (bs, _) = &bases[&s];
            if bs.is_empty() {
                continue;
            }
            for &r in &ups[&s] {
                if r == s || dims[&r] == 0 {
                    continue;
                }
                let (_, er) = &bases[&r];
                let cols = bs
                    .iter()
                    .map(|b| {
                        let proj: SparseVec<F> = b.iter().filter(|(i, _)| cx.is_face(r, sa[*i])).cloned().collect();
                        er.solve(&proj).expect("kernels restrict to kernels")
                    })
                    .collect();
                maps.insert((s, r), SparseMatrix::from_columns(dims[&r], cols));
            }
        }
        let hull = resolve(cx, &self.domain, PairSheaf { dims, maps });
        let mut supports: Vec<Vec<usize>> = self.supports[..ia].to_vec();
        let mut diffs: Vec<SparseMatrix<F>> = self.diffs[..ia.saturating_sub(1)].to_vec();
        if let Some(j0) = hull.levels.first() {
            if ia > 0 {
                let prev = &self.supports[ia - 1];
                let dprev = &self.diffs[ia - 1];
                let mut cols: Vec<Vec<(usize, F)>> = vec![Vec::new(); prev.len()];
                for (&r, pi) in &j0.pi {
                    let (_, er) = &bases[&r];
                    let st = j0.start[&r];
                    for (e, &se) in prev.iter().enumerate() {
                        if !cx.is_face(r, se) {
                            continue;
                        }
                        let proj: SparseVec<F> =
                            dprev.col(e).iter().filter(|(i, _)| cx.is_face(r, sa[*i])).cloned().collect();
                        let coords = er.solve(&proj).expect("boundaries are cycles");
                        cols[e].extend(pi.mul_vec(&coords).into_iter().map(|(j, v)| (st + j, v)));
                    }
                }
                let cols = cols.into_iter().map(collect_sparse).collect();
                diffs.push(SparseMatrix::from_columns(j0.supports.len(), cols));
            }
            for l in &hull.levels {
                supports.push(l.supports.clone());
            }
            diffs.extend(hull.diffs);
        }
        let mut out = SheafComplex {
            complex: self.complex.clone(),
            domain: self.domain.clone(),
            lo: self.lo,
            supports,
            diffs,
        };
        out.trim();
        out
    }

    /// Cancels contractible pairs `[ρ] → [ρ]` with invertible coefficient until none
    /// remain. The result is homotopy equivalent and minimal: no differential entry
    /// joins two summands with the same support.
    pub fn cleanup(&self) -> Self {
        let nq = self.supports.len();
        if nq == 0 {
            return self.clone();
        }
        let mut cols: Vec<Vec<BTreeMap<usize, F>>> = self
            .diffs
            .iter()
            .map(|m| m.columns().iter().map(|c| c.iter().cloned().collect()).collect())
            .collect();
        let mut rows: Vec<Vec<BTreeSet<usize>>> = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut r = vec![BTreeSet::new(); self.supports[i + 1].len()];
                for (row, col, _) in m.entries() {
                    r[row].insert(col);
                }
                r
            })
            .collect();
        let mut alive: Vec<Vec<bool>> = self.supports.iter().map(|t| vec![true; t.len()]).collect();
        for i in 0..nq.saturating_sub(1) {
            loop {
                let mut changed = false;
                for x in 0..self.supports[i].len() {
                    if !alive[i][x] {
                        continue;
                    }
                    let sx = self.supports[i][x];
                    let pivot = cols[i][x]
                        .iter()
                        .find(|(y, _)| self.supports[i + 1][**y] == sx)
                        .map(|(y, c)| (*y, c.clone()));
                    let Some((y, c)) = pivot else { continue };
                    let cinv = c.inv();
                    let us: Vec<usize> = rows[i][y].iter().copied().filter(|&u| u != x).collect();
                    let ws: Vec<(usize, F)> = cols[i][x]
                        .iter()
                        .filter(|(w, _)| **w != y)
                        .map(|(w, b)| (*w, b.clone()))
                        .collect();
                    for &u in &us {
                        let a = cols[i][u][&y].clone();
                        let factor = a * cinv.clone();
                        for (w, b) in &ws {
                            let delta = factor.clone() * b.clone();
                            let cur = cols[i][u].get(w).cloned().unwrap_or_else(F::zero);
                            let nv = cur - delta;
                            if nv.is_zero() {
                                cols[i][u].remove(w);
                                rows[i][*w].remove(&u);
                            } else {
                                cols[i][u].insert(*w, nv);
                                rows[i][*w].insert(u);
                            }
                        }
                    }
                    for &u in &us {
                        cols[i][u].remove(&y);
                    }
                    rows[i][y].clear();
                    for w in cols[i][x].keys() {
                        rows[i][*w].remove(&x);
                    }
                    cols[i][x].clear();
                    if i > 0 {
                        for v in std::mem::take(&mut rows[i - 1][x]) {
                            cols[i - 1][v].remove(&x);
                        }
                    }
                    if i + 1 < nq - 1 {
                        for w in std::mem::take(&mut cols[i + 1][y]).into_keys() {
                            rows[i + 1][w].remove(&y);
                        }
                    }
                    alive[i][x] = false;
                    alive[i + 1][y] = false;
                    changed = true;
                }
                if !changed {
                    break;
                }
            }
        }
        let renum: Vec<Vec<Option<usize>>> = alive
            .iter()
            .map(|a| {
                let mut k = 0;
                a.iter()
                    .map(|&keep| {
                        keep.then(|| {
                            k += 1;
                            k - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let supports: Vec<Vec<usize>> = self
            .supports
            .iter()
            .zip(&alive)
            .map(|(t, a)| t.iter().zip(a).filter(|(_, k)| **k).map(|(s, _)| *s).collect())
            .collect();
        let diffs = cols
            .into_iter()
            .enumerate()
            .map(|(i, cs)| {
                let c = cs
                    .into_iter()
                    .enumerate()
                    .filter(|(x, _)| alive[i][*x])
                    .map(|(_, col)| {
                        let mut v: SparseVec<F> =
                            col.into_iter().map(|(r, x)| (renum[i + 1][r].expect("live row"), x)).collect();
                        v.sort_by_key(|e| e.0);
                        v
                    })
                    .collect();
                SparseMatrix::from_columns(supports[i + 1].len(), c)
            })
            .collect();
        let mut out = SheafComplex {
            complex: self.complex.clone(),
            domain: self.domain.clone(),
            lo: self.lo,
            supports,
            diffs,
        };
        out.trim();
        out
    }

    /// Whether no differential entry joins summands of equal support.
    pub fn is_minimal(&self) -> bool {
        self.diffs.iter().enumerate().all(|(i, m)| {
            m.entries()
                .all(|(r, c, _)| self.supports[i + 1][r] != self.supports[i][c])
        })
    }

    /// The cohomology sheaf `H^a(S)` with its induced restriction maps.
    pub fn cohomology_sheaf(&self, a: i32) -> CellularSheaf<F> {
        let cx = &self.complex;
        let ta = self.term(a).to_vec();
        struct Local<F> {
            reps: Vec<SparseVec<F>>,
            ech: Echelon<F>,
            rep_of_input: HashMap<usize, usize>,
        }
        let mut data: BTreeMap<usize, Local<F>> = BTreeMap::new();
        for &s in &self.domain {
            let sub = self.sub(|t| cx.is_face(s, t));
            let ka: Vec<usize> = if (self.lo..=self.hi()).contains(&a) {
                sub.kept[(a - self.lo) as usize].clone()
            } else {
                Vec::new()
            };
            let mut ech = Echelon::new(true);
            let mut inputs = 0;
            if let Some(m) = sub.cochain.diff(a - 1) {
                for c in m.columns() {
                    ech.insert(&c.iter().map(|(r, v)| (ka[*r], v.clone())).collect::<Vec<_>>());
                    inputs += 1;
                }
            }
            let cycles: Vec<SparseVec<F>> = match sub.cochain.diff(a) {
                Some(m) => m.kernel(),
                None => (0..ka.len()).map(|i| vec![(i, F::one())]).collect(),
            };
            let mut reps = Vec::new();
            let mut rep_of_input = HashMap::new();
            for z in cycles {
                let zg: SparseVec<F> = z.into_iter().map(|(i, v)| (ka[i], v)).collect();
                if let Insert::Independent(_) = ech.insert(&zg) {
                    rep_of_input.insert(inputs, reps.len());
                    reps.push(zg);
                }
                inputs += 1;
            }
            data.insert(s, Local { reps, ech, rep_of_input });
        }
        let dims: BTreeMap<usize, usize> = data.iter().map(|(s, l)| (*s, l.reps.len())).collect();
        let mut maps = BTreeMap::new();
        for &s in &self.domain {
            for &t in cx.cofacets(s) {
                if !self.domain.contains(&t) || dims[&s] == 0 || dims[&t] == 0 {
                    continue;
                }
                let lt = &data[&t];
                let cols = data[&s]
                    .reps
                    .iter()
                    .map(|z| {
                        let proj: SparseVec<F> = z.iter().filter(|(i, _)| cx.is_face(t, ta[*i])).cloned().collect();
                        let (coeff, resid) = lt.ech.decompose(&proj);
                        assert!(resid.is_empty(), "cycles restrict to cycles");
                        let mut col: SparseVec<F> = coeff
                            .into_iter()
                            .filter_map(|(inp, v)| lt.rep_of_input.get(&inp).map(|&k| (k, v)))
                            .collect();
                        col.sort_by_key(|e| e.0);
                        col
                    })
                    .collect();
                maps.insert((s, t), SparseMatrix::from_columns(dims[&t], cols));
            }
        }
        CellularSheaf::new(self.complex.clone(), self.domain.clone(), dims, maps).expect("well-formed cohomology sheaf")
    }

    /// Degrees in which some stalk is nonzero.
    pub fn cohomology_degrees(&self) -> BTreeSet<i32> {
        self.stalk_table().values().flat_map(|t| t.keys().copied()).collect()
    }

    /// Checks that every cohomology sheaf is locally constant on every stratum.
    /// Returns the first offending (degree, face, coface).
    pub fn clc_violation(&self, strat: &Stratification) -> Option<(i32, usize, usize)> {
        for a in self.cohomology_degrees() {
            let h = self.cohomology_sheaf(a);
            for st in strat.strata() {
                let piece: SimplexSet = st.simplices.intersection(&self.domain).copied().collect();
                if let Some((s, t)) = h.first_non_invertible(&piece) {
                    return Some((a, s, t));
                }
            }
        }
        None
    }

    pub fn is_clc(&self, strat: &Stratification) -> bool {
        self.clc_violation(strat).is_none()
    }
}

/// First simplex and degree where two stalk tables differ.
pub fn first_difference(a: &StalkTable, b: &StalkTable) -> Option<(usize, i32)> {
    let keys: BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
    let empty = DimTable::new();
    for s in keys {
        let (x, y) = (a.get(&s).unwrap_or(&empty), b.get(&s).unwrap_or(&empty));
        if x != y {
            let degs: BTreeSet<i32> = x.keys().chain(y.keys()).copied().collect();
            let q = degs.into_iter().find(|q| x.get(q) != y.get(q)).unwrap();
            return Some((s, q));
        }
    }
    None
}
