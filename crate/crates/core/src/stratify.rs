//! Stratifications by even-dimensional strata, their open dense strata, and
//! the open filtrations used by the construction.
//!
//! A stratification is a chain of down-closed levels `X_n ⊇ … ⊇ X_0`
//! indexed by complex dimension. Strata are the components of
//! `X_k ∖ X_{k-1}`. The local cone condition is not checked.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Rational;
use crate::simplicial::{meet, minus, union, SimplexSet, SimplicialComplex, Vertex};

/// On-disk form: generating simplices per complex-dimension level.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StratificationDoc {
    pub levels: BTreeMap<String, Vec<Vec<Vertex>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Complex dimension.
    pub dim: usize,
    pub simplices: SimplexSet,
    /// Up-closed inside the stratified space.
    pub is_open: bool,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    complex: Arc<SimplicialComplex>,
    space: SimplexSet,
    n: usize,
    levels: Vec<SimplexSet>,
    strata: Vec<Stratum>,
    stratum_of: BTreeMap<usize, usize>,
}

impl Stratification {
    /// Builds and validates. `levels[k]` may be absent: a missing top level
    /// means the whole space, a missing lower level repeats the next lower one.
    /// `space` defaults to the whole complex.
    pub fn new(
        complex: Arc<SimplicialComplex>,
        space: Option<SimplexSet>,
        given: BTreeMap<usize, SimplexSet>,
    ) -> Result<Self> {
        let space = space.unwrap_or_else(|| complex.all());
        if space.is_empty() {
            return Err(Error::Stratification("empty space".into()));
        }
        if !complex.is_down_closed(&space, None) {
            return Err(Error::Closure("stratified space must be a subcomplex".into()));
        }
        let real = complex.max_dim(&space).unwrap();
        let n = real.div_ceil(2);
        if let Some((&k, _)) = given.range(n + 1..).next() {
            return Err(Error::Stratification(format!(
                "level {k} exceeds the top complex dimension {n}"
            )));
        }
        let mut levels: Vec<SimplexSet> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let lvl = match given.get(&k) {
                Some(s) => s.clone(),
                None if k == n => space.clone(),
                None => levels.last().cloned().unwrap_or_default(),
            };
            levels.push(lvl);
        }
        Self::validate(complex, space, n, levels)
    }

    /// The trivial stratification `X_n = X`, lower levels empty.
    pub fn trivial(complex: Arc<SimplicialComplex>) -> Result<Self> {
        Self::new(complex, None, BTreeMap::new())
    }

    pub fn from_doc(complex: Arc<SimplicialComplex>, doc: &StratificationDoc) -> Result<Self> {
        let mut given = BTreeMap::new();
        for (key, gens) in &doc.levels {
            let k: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("level key {key:?} is not a nonnegative integer")))?;
            given.insert(k, complex.generate(gens)?);
        }
        Self::new(complex, None, given)
    }

    pub fn load_json(complex: Arc<SimplicialComplex>, text: &str) -> Result<Self> {
        let doc: StratificationDoc = serde_json::from_str(text)?;
        Self::from_doc(complex, &doc)
    }

    /// Levels listed by their maximal simplices.
    pub fn to_doc(&self) -> StratificationDoc {
        let mut levels = BTreeMap::new();
        for (k, lvl) in self.levels.iter().enumerate() {
            let gens = lvl
                .iter()
                .filter(|&&s| self.complex.cofacets(s).iter().all(|t| !lvl.contains(t)))
                .map(|&s| self.complex.labels_of(s))
                .collect();
            levels.insert(k.to_string(), gens);
        }
        StratificationDoc { levels }
    }

    fn validate(complex: Arc<SimplicialComplex>, space: SimplexSet, n: usize, levels: Vec<SimplexSet>) -> Result<Self> {
        let cx = &*complex;
        for (k, lvl) in levels.iter().enumerate() {
            if let Some(s) = lvl.iter().find(|s| !space.contains(s)) {
                return Err(Error::Stratification(format!(
                    "level {k} contains {} outside the space",
                    cx.name(*s)
                )));
            }
            if !cx.is_down_closed(lvl, None) {
                return Err(Error::Stratification(format!("level {k} is not down-closed")));
            }
            if k > 0 {
                if let Some(s) = levels[k - 1].iter().find(|s| !lvl.contains(s)) {
                    return Err(Error::Stratification(format!(
                        "levels not nested: {} is in level {} but not in level {k}",
                        cx.name(*s),
                        k - 1
                    )));
                }
            }
        }
        if levels[n] != space {
            return Err(Error::Stratification(format!("top level {n} must be the whole space")));
        }
        let mut strata = Vec::new();
        let mut stratum_of = BTreeMap::new();
        for k in 0..=n {
            let below = if k == 0 { SimplexSet::new() } else { levels[k - 1].clone() };
            let diff = minus(&levels[k], &below);
            for comp in cx.components_of(&diff) {
                if let Some(&s) = comp.iter().find(|&&s| cx.dim_of(s) > 2 * k) {
                    return Err(Error::Stratification(format!(
                        "dimensional homogeneity: {} has real dimension {} in a stratum of complex dimension {k}",
                        cx.name(s),
                        cx.dim_of(s)
                    )));
                }
                if !comp.iter().any(|&s| cx.dim_of(s) == 2 * k) {
                    let first = *comp.iter().next().unwrap();
                    return Err(Error::Stratification(format!(
                        "dimensional homogeneity: the level-{k} stratum containing {} has no simplex of real dimension {}",
                        cx.name(first),
                        2 * k
                    )));
                }
                let is_open = cx.is_up_closed(&comp, Some(&space));
                if is_open && k == 0 {
                    return Err(Error::Stratification(format!(
                        "open 0-dimensional stratum at {}",
                        cx.name(*comp.iter().next().unwrap())
                    )));
                }
                let id = strata.len();
                for &s in &comp {
                    stratum_of.insert(s, id);
                }
                strata.push(Stratum {
                    dim: k,
                    simplices: comp,
                    is_open,
                });
            }
        }
        for (i, st) in strata.iter().enumerate() {
            let frontier = minus(&cx.down_closure(&st.simplices), &st.simplices);
            for &s in &frontier {
                let j = stratum_of[&s];
                if let Some(&bad) = strata[j].simplices.iter().find(|t| !frontier.contains(t)) {
                    return Err(Error::Stratification(format!(
                        "frontier condition: stratum {i} (complex dim {}) meets stratum {j} at {} but does not contain {}",
                        st.dim,
                        cx.name(s),
                        cx.name(bad)
                    )));
                }
            }
        }
        Ok(Stratification {
            complex,
            space,
            n,
            levels,
            strata,
            stratum_of,
        })
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn space(&self) -> &SimplexSet {
        &self.space
    }

    /// Top complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `X_k`; empty for negative `k`, the whole space above `n`.
    pub fn level(&self, k: i64) -> SimplexSet {
        if k < 0 {
            SimplexSet::new()
        } else if k as usize >= self.n {
            self.space.clone()
        } else {
            self.levels[k as usize].clone()
        }
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum_of(&self, simplex: usize) -> Option<usize> {
        self.stratum_of.get(&simplex).copied()
    }

    /// `U^m`: the union of the open strata of complex dimension `m`.
    pub fn open_part(&self, m: usize) -> SimplexSet {
        let mut out = SimplexSet::new();
        for st in self.strata.iter().filter(|s| s.is_open && s.dim == m) {
            out.extend(st.simplices.iter().copied());
        }
        out
    }

    /// `U^m` and `X^m` for `1 ≤ m ≤ n`, with the density check.
    pub fn open_strata(&self) -> Result<OpenStrata> {
        let mut u = BTreeMap::new();
        let mut x = BTreeMap::new();
        let mut covered = SimplexSet::new();
        for m in 1..=self.n {
            let um = self.open_part(m);
            let xm = self.complex.down_closure(&um);
            covered.extend(xm.iter().copied());
            u.insert(m, um);
            x.insert(m, xm);
        }
        let missing = minus(&self.space, &covered);
        if !missing.is_empty() {
            let names = self.complex.names(&missing);
            return Err(Error::Density(names.join(" ")));
        }
        Ok(OpenStrata { u, x })
    }

    /// Stratification induced on a closed union of strata, e.g. `X^m`.
    pub fn induced(&self, closed: &SimplexSet) -> Result<Stratification> {
        let real = self
            .complex
            .max_dim(closed)
            .ok_or_else(|| Error::Stratification("empty subspace".into()))?;
        let top = real.div_ceil(2);
        let mut given = BTreeMap::new();
        for k in 0..top {
            given.insert(k, meet(&self.level(k as i64), closed));
        }
        Stratification::new(self.complex.clone(), Some(closed.clone()), given)
    }

    /// Adds a closed set `z` to all levels from `k` upward, producing a refinement
    /// in which `z` (minus lower strata) becomes a stratum of complex dimension `k`.
    pub fn with_extra_stratum(&self, z: &SimplexSet, k: usize) -> Result<Stratification> {
        let mut given = BTreeMap::new();
        for j in 0..=self.n {
            let lvl = if j >= k { union(&self.levels[j], z) } else { self.levels[j].clone() };
            given.insert(j, lvl);
        }
        Stratification::new(self.complex.clone(), Some(self.space.clone()), given)
    }

    /// Canonical open filtration `U_1 ⊆ … ⊆ U_{n+1}`.
    pub fn open_filtration(&self) -> Result<OpenFiltration> {
        let os = self.open_strata()?;
        let n = self.n as i64;
        let mut w = Vec::new();
        let mut u = Vec::new();
        for k in 1..=n + 1 {
            let mut wk = SimplexSet::new();
            for m in (n - k + 2).max(1)..=n {
                wk.extend(self.piece(&os, m as usize, m - n + k));
            }
            let mut uk = wk.clone();
            for m in 1..=(n - k + 1).min(n) {
                uk.extend(self.piece(&os, m as usize, 1));
            }
            w.push(wk);
            u.push(uk);
        }
        Ok(OpenFiltration {
            n: self.n,
            strata: os,
            w,
            u,
            canonical: true,
        })
    }

    /// `U^m_j = X^m − X_{m−j}`.
    fn piece(&self, os: &OpenStrata, m: usize, j: i64) -> SimplexSet {
        minus(&os.x[&m], &self.level(m as i64 - j))
    }

    /// The filtration adjoining `X^m − X_{m−k}` for every `m` at step `k`.
    /// Not the canonical filtration: strata of different dimensions enter together.
    pub fn naive_filtration(&self) -> Result<OpenFiltration> {
        let os = self.open_strata()?;
        let n = self.n as i64;
        let mut u = Vec::new();
        for k in 1..=n + 1 {
            let mut uk = SimplexSet::new();
            for m in 1..=n {
                uk.extend(self.piece(&os, m as usize, k));
            }
            u.push(uk);
        }
        Ok(OpenFiltration {
            n: self.n,
            strata: os,
            w: vec![SimplexSet::new(); u.len()],
            u,
            canonical: false,
        })
    }

    /// Whether every stratum of `coarse` is a union of strata of `self`.
    pub fn refines(&self, coarse: &Stratification) -> Result<Refinement> {
        if self.complex != coarse.complex || self.space != coarse.space {
            return Err(Error::Domain("stratifications live on different spaces".into()));
        }
        let mut correspondence: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut holds = true;
        for (i, st) in self.strata.iter().enumerate() {
            let targets: std::collections::BTreeSet<usize> =
                st.simplices.iter().map(|s| coarse.stratum_of[s]).collect();
            if targets.len() == 1 {
                correspondence.entry(*targets.iter().next().unwrap()).or_default().push(i);
            } else {
                holds = false;
            }
        }
        Ok(Refinement {
            holds,
            correspondence: if holds { correspondence } else { BTreeMap::new() },
        })
    }

    /// Checks that the complement of `U_k` inside a level is a union of strata.
    pub fn is_union_of_strata(&self, set: &SimplexSet) -> bool {
        set.iter().all(|s| {
            self.strata[self.stratum_of[s]]
                .simplices
                .iter()
                .all(|t| set.contains(t))
        })
    }

    /// Advisory link heuristic. For every simplex σ of a stratum of complex
    /// dimension `k`, the link of σ inside the closure of that stratum should
    /// have the rational homology of `S^{2k − dim σ − 1}`. Passing is necessary,
    /// not sufficient, for the strata to be manifolds. Returns the offenders.
    pub fn check_links(&self) -> Result<Vec<LinkIssue>> {
        let mut issues = Vec::new();
        for st in &self.strata {
            let closure = self.complex.down_closure(&st.simplices);
            let sub = self.complex.subcomplex(&closure)?;
            for &sigma in &st.simplices {
                let expected = 2 * st.dim as i64 - self.complex.dim_of(sigma) as i64 - 1;
                let local = sub.find(&self.complex.labels_of(sigma))?;
                let betti = match sub.link_of(local)? {
                    Some(link) => link.reduced_betti::<Rational>(),
                    None => Vec::new(),
                };
                let sphere = if expected < 0 {
                    expected == -1 && betti.is_empty()
                } else {
                    betti.iter().enumerate().all(|(d, &b)| b == usize::from(d as i64 == expected))
                        && betti.len() as i64 > expected
                };
                if !sphere {
                    issues.push(LinkIssue { simplex: self.complex.name(sigma), stratum_dim: st.dim, expected, reduced_betti: betti });
                }
            }
        }
        Ok(issues)
    }
}

/// A simplex whose link fails the sphere test of [`Stratification::check_links`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkIssue {
    pub simplex: String,
    pub stratum_dim: usize,
    /// Expected sphere dimension, `-1` meaning an empty link.
    pub expected: i64,
    pub reduced_betti: Vec<usize>,
}

/// Result of a refinement test: the strata of the finer stratification grouped
/// by the coarser stratum containing them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub holds: bool,
    pub correspondence: BTreeMap<usize, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenStrata {
    /// `U^m`.
    pub u: BTreeMap<usize, SimplexSet>,
    /// `X^m`.
    pub x: BTreeMap<usize, SimplexSet>,
}

impl OpenStrata {
    /// Dimensions `m` with `U^m` nonempty.
    pub fn dims(&self) -> Vec<usize> {
        self.u.iter().filter(|(_, s)| !s.is_empty()).map(|(m, _)| *m).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenFiltration {
    pub n: usize,
    pub strata: OpenStrata,
    w: Vec<SimplexSet>,
    u: Vec<SimplexSet>,
    /// False for the naive filtration.
    pub canonical: bool,
}

impl OpenFiltration {
    /// `U_k` for `1 ≤ k ≤ n+1`.
    pub fn u(&self, k: usize) -> &SimplexSet {
        &self.u[k - 1]
    }

    /// `W_k` for `1 ≤ k ≤ n+1`.
    pub fn w(&self, k: usize) -> &SimplexSet {
        &self.w[k - 1]
    }

    pub fn steps(&self) -> usize {
        self.u.len()
    }
}

/// Verdicts of the five filtration identities, with the first counterexample found.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub openness: bool,
    pub density: bool,
    pub strata_content: bool,
    pub closedness: bool,
    pub w_difference: bool,
    pub failures: Vec<String>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.openness && self.density && self.strata_content && self.closedness && self.w_difference
    }
}

/// Re-verifies the structural identities of the canonical open filtration.
pub fn verify_lemmas(strat: &Stratification, filt: &OpenFiltration) -> LemmaReport {
    let cx = strat.complex();
    let n = strat.n();
    let mut r = LemmaReport {
        openness: true,
        density: true,
        strata_content: true,
        closedness: true,
        w_difference: true,
        failures: Vec::new(),
    };
    if filt.u(n + 1) != strat.space() {
        r.openness = false;
        r.failures.push(format!("U_{} is not the whole space", n + 1));
    }
    for k in 1..=n {
        let (uk, uk1) = (filt.u(k), filt.u(k + 1));
        if !uk.is_subset(uk1) || !cx.is_up_closed(uk, Some(uk1)) {
            r.openness = false;
            r.failures.push(format!("U_{k} is not open in U_{}", k + 1));
        }
    }
    if cx.down_closure(filt.u(1)) != *strat.space() {
        r.density = false;
        r.failures.push("closure of U_1 is not the whole space".into());
    }
    let os = &filt.strata;
    for k in 1..=n {
        let diff = minus(filt.u(k + 1), filt.u(k));
        let mut expected = SimplexSet::new();
        for st in strat.strata().iter().filter(|s| !s.is_open && s.dim == n - k) {
            expected.extend(st.simplices.iter().copied());
        }
        if diff != expected {
            r.strata_content = false;
            r.failures.push(format!(
                "U_{} − U_{k} differs from the non-open strata of dimension {}",
                k + 1,
                n - k
            ));
        }
        for m in (n - k + 1)..=n {
            let lhs = meet(&os.x[&m], filt.u(k));
            let rhs = minus(&os.x[&m], &strat.level(n as i64 - k as i64));
            if lhs != rhs {
                r.closedness = false;
                r.failures.push(format!("X^{m} ∩ U_{k} ≠ U^{m}_{}", m + k - n));
            }
        }
        let rhs = minus(
            &minus(filt.w(k + 1), filt.w(k)),
            &minus(&os.x[&(n - k + 1)], &strat.level(n as i64 - k as i64)),
        );
        if diff != rhs {
            r.w_difference = false;
            r.failures.push(format!("U_{} − U_{k} ≠ (W_{} − W_{k}) − U^{}_1", k + 1, k + 1, n - k + 1));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Vertex> {
        xs.iter().map(|&x| Vertex::Int(x)).collect()
    }

    fn faces_of(verts: &[i64]) -> Vec<Vec<Vertex>> {
        verts
            .iter()
            .map(|skip| v(&verts.iter().copied().filter(|x| x != skip).collect::<Vec<_>>()))
            .collect()
    }

    /// ∂Δ⁵ on 0..5 wedged with ∂Δ³ on {0,6,7,8}.
    fn wedge() -> Arc<SimplicialComplex> {
        let mut maximal = faces_of(&[0, 1, 2, 3, 4, 5]);
        maximal.extend(faces_of(&[0, 6, 7, 8]));
        Arc::new(SimplicialComplex::from_maximal(&v(&[0, 1, 2, 3, 4, 5, 6, 7, 8]), &maximal).unwrap())
    }

    fn wedge_strat(cx: &Arc<SimplicialComplex>, fake: bool) -> Stratification {
        let mut l1 = faces_of(&[0, 6, 7, 8]);
        if fake {
            l1.extend(faces_of(&[1, 2, 3, 4]));
        }
        let mut doc = StratificationDoc::default();
        doc.levels.insert("1".into(), l1);
        doc.levels.insert("0".into(), vec![v(&[0])]);
        Stratification::from_doc(cx.clone(), &doc).unwrap()
    }

    #[test]
    fn trivial_on_sphere() {
        let cx = Arc::new(SimplicialComplex::from_maximal(&v(&[0, 1, 2, 3, 4, 5]), &faces_of(&[0, 1, 2, 3, 4, 5])).unwrap());
        let s = Stratification::trivial(cx.clone()).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.strata().len(), 1);
        assert!(s.strata()[0].is_open);
        let f = s.open_filtration().unwrap();
        assert_eq!(f.u(1), &cx.all());
        assert!(verify_lemmas(&s, &f).all_hold());
        assert_eq!(s.naive_filtration().unwrap().u(1), f.u(1));
    }

    #[test]
    fn wedge_strata_and_filtration() {
        let cx = wedge();
        let s = wedge_strat(&cx, false);
        assert_eq!(s.strata().len(), 3);
        let os = s.open_strata().unwrap();
        let p = cx.vertex_id(&Vertex::Int(0)).unwrap();
        assert!(!os.u[&2].contains(&p) && !os.u[&1].contains(&p));
        assert!(os.x[&2].contains(&p) && os.x[&1].contains(&p));
        let f = s.open_filtration().unwrap();
        assert_eq!(f.w(2), &os.u[&2]);
        assert_eq!(f.u(2), f.u(1));
        assert_eq!(minus(f.u(3), f.u(2)), SimplexSet::from([p]));
        assert!(verify_lemmas(&s, &f).all_hold());
    }

    #[test]
    fn fake_surface_naive_differs() {
        let cx = wedge();
        let s = wedge_strat(&cx, true);
        let canon = s.open_filtration().unwrap();
        let naive = s.naive_filtration().unwrap();
        assert!(verify_lemmas(&s, &canon).all_hold());
        assert!(canon.u(2).is_subset(naive.u(2)) && canon.u(2) != naive.u(2));
        assert_eq!(naive.u(2), &cx.all());
        let p = cx.vertex_id(&Vertex::Int(0)).unwrap();
        assert_eq!(minus(&cx.all(), canon.u(2)), SimplexSet::from([p]));
    }

    #[test]
    fn validation_errors() {
        let cx = wedge();
        let mut doc = StratificationDoc::default();
        doc.levels.insert("1".into(), vec![v(&[6, 7])]);
        let e = Stratification::from_doc(cx.clone(), &doc).unwrap_err();
        assert!(e.to_string().contains("dimensional homogeneity"), "{e}");
        let mut doc = StratificationDoc::default();
        doc.levels.insert("1".into(), faces_of(&[0, 6, 7, 8]));
        doc.levels.insert("0".into(), vec![v(&[1])]);
        let e = Stratification::from_doc(cx.clone(), &doc).unwrap_err();
        assert!(e.to_string().contains("nested"), "{e}");
        let lone = Arc::new(SimplicialComplex::from_maximal(&v(&[0, 1, 2, 9]), &[v(&[0, 1, 2]), v(&[9])]).unwrap());
        let e = Stratification::trivial(lone).unwrap_err();
        assert!(e.to_string().contains("homogeneity"), "{e}");
    }

    #[test]
    fn refinement() {
        let cx = wedge();
        let s = wedge_strat(&cx, false);
        assert!(s.refines(&s).unwrap().holds);
        let q = cx.vertex_id(&Vertex::Int(3)).unwrap();
        let a = s.with_extra_stratum(&SimplexSet::from([q]), 0).unwrap();
        assert!(a.refines(&s).unwrap().holds);
        assert!(!s.refines(&a).unwrap().holds);
        let r = cx.vertex_id(&Vertex::Int(4)).unwrap();
        let b = s.with_extra_stratum(&SimplexSet::from([r]), 0).unwrap();
        assert!(!a.refines(&b).unwrap().holds && !b.refines(&a).unwrap().holds);
    }

    #[test]
    fn induced_on_closures() {
        let cx = wedge();
        let s = wedge_strat(&cx, true);
        let os = s.open_strata().unwrap();
        let s2 = s.induced(&os.x[&2]).unwrap();
        assert_eq!(s2.n(), 2);
        assert_eq!(s2.open_part(2), os.u[&2]);
        let s1 = s.induced(&os.x[&1]).unwrap();
        assert_eq!(s1.n(), 1);
        assert_eq!(s1.open_part(1), os.u[&1]);
    }

    #[test]
    fn link_heuristic() {
        let cx = wedge();
        assert!(wedge_strat(&cx, false).check_links().unwrap().is_empty());
        assert!(wedge_strat(&cx, true).check_links().unwrap().is_empty());
        let (torus, strat) = crate::demos::load("pinched-torus").unwrap();
        assert!(strat.check_links().unwrap().is_empty());
        let flat = Stratification::trivial(torus).unwrap();
        let issues = flat.check_links().unwrap();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].reduced_betti, vec![1, 2]);
    }
}
