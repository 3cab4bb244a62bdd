//! Cellular sheaves: functors on the face poset, given by stalk dimensions and
//! restriction matrices along covering pairs `σ ⋖ τ`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::SparseMatrix;
use crate::simplicial::{SimplexSet, SimplicialComplex, Vertex};
use crate::stratify::OpenStrata;

#[derive(Clone, Debug, PartialEq)]
pub struct CellularSheaf<F> {
    complex: Arc<SimplicialComplex>,
    domain: SimplexSet,
    dims: BTreeMap<usize, usize>,
    maps: BTreeMap<(usize, usize), SparseMatrix<F>>,
}

impl<F: Field> CellularSheaf<F> {
    /// `maps` must contain every covering pair inside the domain between nonzero stalks;
    /// missing pairs are zero maps.
    pub fn new(
        complex: Arc<SimplicialComplex>,
        domain: SimplexSet,
        dims: BTreeMap<usize, usize>,
        maps: BTreeMap<(usize, usize), SparseMatrix<F>>,
    ) -> Result<Self> {
        for (&(s, t), m) in &maps {
            if !domain.contains(&s) || !domain.contains(&t) || !complex.cofacets(s).contains(&t) {
                return Err(Error::Input(format!(
                    "restriction {} → {} is not a covering pair of the domain",
                    complex.name(s),
                    complex.name(t)
                )));
            }
            let (ds, dt) = (dims.get(&s).copied().unwrap_or(0), dims.get(&t).copied().unwrap_or(0));
            if m.ncols() != ds || m.nrows() != dt {
                return Err(Error::Input(format!(
                    "restriction {} → {} has shape {}×{}, expected {dt}×{ds}",
                    complex.name(s),
                    complex.name(t),
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let dims = domain.iter().map(|s| (*s, dims.get(s).copied().unwrap_or(0))).collect();
        Ok(CellularSheaf {
            complex,
            domain,
            dims,
            maps,
        })
    }

    /// Constant sheaf of the given rank.
    pub fn constant(complex: Arc<SimplicialComplex>, domain: SimplexSet, rank: usize) -> Self {
        let dims = domain.iter().map(|s| (*s, rank)).collect();
        let mut maps = BTreeMap::new();
        for &s in &domain {
            for &t in complex.cofacets(s) {
                if domain.contains(&t) {
                    maps.insert((s, t), SparseMatrix::identity(rank));
                }
            }
        }
        CellularSheaf {
            complex,
            domain,
            dims,
            maps,
        }
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn domain(&self) -> &SimplexSet {
        &self.domain
    }

    pub fn dim(&self, s: usize) -> usize {
        self.dims.get(&s).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<usize, usize> {
        &self.dims
    }

    /// Restriction along a covering pair.
    pub fn cover_map(&self, s: usize, t: usize) -> SparseMatrix<F> {
        self.maps
            .get(&(s, t))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dim(t), self.dim(s)))
    }

    pub fn cover_maps(&self) -> &BTreeMap<(usize, usize), SparseMatrix<F>> {
        &self.maps
    }

    /// Restriction `σ → ρ` for `σ ⊆ ρ` in the domain, composed along a maximal chain.
    pub fn restriction(&self, s: usize, r: usize) -> SparseMatrix<F> {
        assert!(self.complex.is_face(s, r), "restriction needs σ ⊆ ρ");
        let mut cur = s;
        let mut m = SparseMatrix::identity(self.dim(s));
        while cur != r {
            let next = *self
                .complex
                .cofacets(cur)
                .iter()
                .find(|&&t| self.domain.contains(&t) && self.complex.is_face(t, r))
                .expect("domain is convex");
            m = self.cover_map(cur, next).mul(&m);
            cur = next;
        }
        m
    }

    /// All restrictions `σ → ρ` with `σ ⊊ ρ` in the domain.
    pub fn all_pairs(&self) -> HashMap<(usize, usize), SparseMatrix<F>> {
        let mut out: HashMap<(usize, usize), SparseMatrix<F>> = HashMap::new();
        for &s in &self.domain {
            let mut ups: Vec<usize> = self
                .complex
                .open_star(s)
                .expect("domain simplex")
                .into_iter()
                .filter(|t| *t != s && self.domain.contains(t))
                .collect();
            ups.sort_by_key(|&t| (self.complex.dim_of(t), t));
            for r in ups {
                let m = if self.complex.dim_of(r) == self.complex.dim_of(s) + 1 {
                    self.cover_map(s, r)
                } else {
                    let via = self
                        .complex
                        .facets(r)
                        .iter()
                        .map(|f| f.0)
                        .find(|&t| self.domain.contains(&t) && self.complex.is_face(s, t))
                        .expect("domain is convex");
                    self.cover_map(via, r).mul(&out[&(s, via)])
                };
                out.insert((s, r), m);
            }
        }
        out
    }

    /// Both composites around every codimension-two diamond agree.
    pub fn check_path_independence(&self) -> Result<()> {
        for &s in &self.domain {
            for &t1 in self.complex.cofacets(s) {
                if !self.domain.contains(&t1) {
                    continue;
                }
                for &r in self.complex.cofacets(t1) {
                    if !self.domain.contains(&r) {
                        continue;
                    }
                    let a = self.cover_map(t1, r).mul(&self.cover_map(s, t1));
                    for &t2 in self.complex.cofacets(s) {
                        if t2 != t1 && self.domain.contains(&t2) && self.complex.is_face(t2, r) {
                            let b = self.cover_map(t2, r).mul(&self.cover_map(s, t2));
                            if a != b {
                                return Err(Error::LocalSystem(format!(
                                    "path dependence between {} and {}",
                                    self.complex.name(s),
                                    self.complex.name(r)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// First covering pair inside `set` whose restriction is not invertible.
    pub fn first_non_invertible(&self, set: &SimplexSet) -> Option<(usize, usize)> {
        for &s in set {
            for &t in self.complex.cofacets(s) {
                if set.contains(&t) && self.domain.contains(&t) {
                    let m = self.cover_map(s, t);
                    if m.nrows() != m.ncols() || m.rank() != m.ncols() {
                        return Some((s, t));
                    }
                }
            }
        }
        None
    }

    /// Restriction of the functor to a subset of the domain.
    pub fn restrict(&self, set: &SimplexSet) -> Result<Self> {
        if !set.is_subset(&self.domain) {
            return Err(Error::Domain("restriction outside the sheaf's domain".into()));
        }
        let dims = set.iter().map(|s| (*s, self.dim(*s))).collect();
        let maps = self
            .maps
            .iter()
            .filter(|((s, t), _)| set.contains(s) && set.contains(t))
            .map(|(k, m)| (*k, m.clone()))
            .collect();
        Ok(CellularSheaf {
            complex: self.complex.clone(),
            domain: set.clone(),
            dims,
            maps,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.dims.values().all(|&d| d == 0)
    }
}

/// A local system on the open dense part, split by dimension: `L = ⊕ L^m` with `L^m` on `U^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSystem<F> {
    pub parts: BTreeMap<usize, CellularSheaf<F>>,
}

/// On-disk form of a local system: ranks per dimension and optional
/// non-identity restriction matrices on covering pairs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalSystemDoc {
    #[serde(default)]
    pub ranks: BTreeMap<String, usize>,
    #[serde(default)]
    pub matrices: Vec<MatrixEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub face: Vec<Vertex>,
    pub coface: Vec<Vertex>,
    /// Row-major entries as exact scalars, e.g. `"-1"` or `"3/2"`.
    pub matrix: Vec<Vec<String>>,
}

impl<F: Field> LocalSystem<F> {
    /// Rank-one constant system on every nonempty `U^m`.
    pub fn constant(complex: &Arc<SimplicialComplex>, os: &OpenStrata) -> Self {
        let parts = os
            .u
            .iter()
            .filter(|(_, u)| !u.is_empty())
            .map(|(m, u)| (*m, CellularSheaf::constant(complex.clone(), u.clone(), 1)))
            .collect();
        LocalSystem { parts }
    }

    /// Validates a local system given per dimension.
    pub fn new(complex: &Arc<SimplicialComplex>, os: &OpenStrata, parts: BTreeMap<usize, CellularSheaf<F>>) -> Result<Self> {
        for (m, sheaf) in &parts {
            let um = os.u.get(m).ok_or_else(|| Error::LocalSystem(format!("no open stratum of dimension {m}")))?;
            if sheaf.domain() != um {
                return Err(Error::LocalSystem(format!("part {m} is not defined on U^{m}")));
            }
            make_local_system(complex, um, sheaf)?;
        }
        Ok(LocalSystem { parts })
    }

    pub fn from_doc(complex: &Arc<SimplicialComplex>, os: &OpenStrata, doc: &LocalSystemDoc) -> Result<Self> {
        let mut ranks: BTreeMap<usize, usize> = os.dims().into_iter().map(|m| (m, 1)).collect();
        for (k, r) in &doc.ranks {
            let m: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("rank key {k:?} is not a dimension")))?;
            if !ranks.contains_key(&m) {
                return Err(Error::LocalSystem(format!("no open stratum of dimension {m}")));
            }
            ranks.insert(m, *r);
        }
        let mut parts: BTreeMap<usize, CellularSheaf<F>> = ranks
            .iter()
            .map(|(m, r)| (*m, CellularSheaf::constant(complex.clone(), os.u[m].clone(), *r)))
            .collect();
        for e in &doc.matrices {
            let s = complex.find(&e.face)?;
            let t = complex.find(&e.coface)?;
            let m = ranks
                .keys()
                .copied()
                .find(|m| os.u[m].contains(&s))
                .ok_or_else(|| Error::LocalSystem(format!("{} is not in the open dense part", complex.name(s))))?;
            let r = ranks[&m];
            if e.matrix.len() != r || e.matrix.iter().any(|row| row.len() != r) {
                return Err(Error::LocalSystem(format!(
                    "matrix on {} → {} must be {r}×{r}",
                    complex.name(s),
                    complex.name(t)
                )));
            }
            let rows: Vec<Vec<F>> = e
                .matrix
                .iter()
                .map(|row| row.iter().map(|x| F::parse_text(x)).collect::<Result<Vec<F>>>())
                .collect::<Result<_>>()?;
            let sheaf = parts.get_mut(&m).unwrap();
            if !complex.cofacets(s).contains(&t) || !sheaf.domain.contains(&t) {
                return Err(Error::LocalSystem(format!(
                    "{} → {} is not a covering pair inside U^{m}",
                    complex.name(s),
                    complex.name(t)
                )));
            }
            sheaf.maps.insert((s, t), SparseMatrix::from_dense(r, r, &rows));
        }
        Self::new(complex, os, parts)
    }

    /// Restriction to the open strata of a refinement (each new `U^m` inside the old one).
    pub fn restrict_to(&self, os: &OpenStrata) -> Result<Self> {
        let mut parts = BTreeMap::new();
        for m in os.dims() {
            let part = self
                .parts
                .get(&m)
                .ok_or_else(|| Error::LocalSystem(format!("no local system on U^{m}")))?;
            parts.insert(m, part.restrict(&os.u[&m])?);
        }
        Ok(LocalSystem { parts })
    }

    pub fn part(&self, m: usize) -> Option<&CellularSheaf<F>> {
        self.parts.get(&m)
    }

    /// Ranks per dimension.
    pub fn ranks(&self) -> BTreeMap<usize, usize> {
        self.parts
            .iter()
            .map(|(m, s)| (*m, s.dims().values().copied().max().unwrap_or(0)))
            .collect()
    }
}

/// Checks the local-system conditions for a sheaf on an up-closed domain:
/// invertible restrictions and path independence.
pub fn make_local_system<F: Field>(
    complex: &Arc<SimplicialComplex>,
    domain: &SimplexSet,
    sheaf: &CellularSheaf<F>,
) -> Result<()> {
    if !complex.is_up_closed(domain, None) {
        return Err(Error::LocalSystem("domain is not up-closed".into()));
    }
    if let Some((s, t)) = sheaf.first_non_invertible(domain) {
        return Err(Error::LocalSystem(format!(
            "restriction {} → {} is not invertible",
            complex.name(s),
            complex.name(t)
        )));
    }
    sheaf.check_path_independence()
}
