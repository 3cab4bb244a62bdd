//! Deligne's construction over the open filtration, its pure special case,
//! the direct-sum decomposition check, clc coarsening and comparison of
//! stratifications.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cochain::DimTable;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sheaf::LocalSystem;
use crate::sheafcx::{first_difference, SheafComplex, StalkTable};
use crate::simplicial::{minus, SimplexSet};
use crate::stratify::{OpenFiltration, Stratification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BuildOptions {
    /// Cancel contractible summands after each truncation.
    pub cleanup: bool,
    /// Re-check stalk tables across each cleanup.
    pub verify_cleanup: bool,
    /// Use the naive filtration and a common cutoff, no re-adding.
    pub naive: bool,
    /// Added to every truncation degree; nonzero values give deliberately wrong complexes.
    pub cutoff_shift: i32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            cleanup: true,
            verify_cleanup: true,
            naive: false,
            cutoff_shift: 0,
        }
    }
}

/// One step `I_k ↦ I_{k+1}` of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub k: usize,
    pub cutoff: i32,
    /// Simplices in `U_{k+1}`.
    pub domain: usize,
    /// Injective summands after pushforward and truncation, before cleanup.
    pub truncated: usize,
    /// Summands of `I_{k+1}`.
    pub size: usize,
    /// Dimensions `m` whose `L^m[m]` is added back at this step.
    pub readded: Vec<usize>,
}

/// Post-hoc checks of the bundle invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BundleChecks {
    /// `I_1` has the stalks of `⊕ L^m[m]`.
    pub normalized: bool,
    /// `I_{k+1}|_{U_k}` has the stalk table of `I_k`, per step.
    pub restriction: Vec<bool>,
    /// Cleanup kept every stalk table.
    pub cleanup_neutral: bool,
    /// First (degree, face, coface) where a cohomology sheaf fails to be locally constant on a stratum.
    pub clc_violation: Option<(i32, usize, usize)>,
}

impl BundleChecks {
    pub fn all_hold(&self) -> bool {
        self.normalized && self.restriction.iter().all(|&b| b) && self.cleanup_neutral && self.clc_violation.is_none()
    }
}

pub struct ICBundle<F> {
    pub stratification: Stratification,
    pub filtration: OpenFiltration,
    pub local: LocalSystem<F>,
    pub options: BuildOptions,
    /// `I_1, …, I_{n+1}`.
    pub stages: Vec<SheafComplex<F>>,
    pub log: Vec<StepRecord>,
    pub checks: BundleChecks,
}

impl<F: Field> ICBundle<F> {
    /// The intersection complex `I_{n+1}`.
    pub fn ic(&self) -> &SheafComplex<F> {
        self.stages.last().expect("at least one stage")
    }

    pub fn into_ic(mut self) -> SheafComplex<F> {
        self.stages.pop().expect("at least one stage")
    }
}

/// `⊕ L^m[m]` on `U_1`, resolved.
fn initial<F: Field>(filt: &OpenFiltration, local: &LocalSystem<F>, u1: &SimplexSet) -> Result<SheafComplex<F>> {
    let cx = local
        .parts
        .values()
        .next()
        .map(|s| s.complex().clone())
        .ok_or_else(|| Error::LocalSystem("empty local system".into()))?;
    let mut out = SheafComplex::zero(cx, u1.clone());
    for m in filt.strata.dims() {
        out = out.direct_sum(&summand(local, m, u1)?)?;
    }
    Ok(out)
}

/// `L^m[m]` extended by zero to the open set `target ⊇ U^m`, in which `U^m` is closed.
fn summand<F: Field>(local: &LocalSystem<F>, m: usize, target: &SimplexSet) -> Result<SheafComplex<F>> {
    let part = local
        .part(m)
        .ok_or_else(|| Error::LocalSystem(format!("no local system on U^{m}")))?;
    SheafComplex::resolve_sheaf(part, -(m as i32)).extend_by_zero(target)
}

fn check_local<F: Field>(filt: &OpenFiltration, local: &LocalSystem<F>) -> Result<()> {
    let dims = filt.strata.dims();
    let have: Vec<usize> = local.parts.keys().copied().collect();
    if dims != have {
        return Err(Error::LocalSystem(format!(
            "local system given on dimensions {have:?}, open strata have dimensions {dims:?}"
        )));
    }
    for m in dims {
        if local.parts[&m].domain() != &filt.strata.u[&m] {
            return Err(Error::LocalSystem(format!("local system part {m} is not defined on U^{m}")));
        }
    }
    Ok(())
}

/// Builds `IC(𝔛, L)` by `I_1 = ⊕ L^m[m]` on `U_1` and
/// `I_{k+1} = τ_{≤k−1−n} Rj_{k*} I_k ⊕ ⊕_{m ≤ n−k} L^m[m]` on `U_{k+1}`.
pub fn build_ic<F: Field>(strat: &Stratification, local: &LocalSystem<F>, opts: BuildOptions) -> Result<ICBundle<F>> {
    let filt = if opts.naive {
        strat.naive_filtration()?
    } else {
        strat.open_filtration()?
    };
    check_local(&filt, local)?;
    let n = strat.n();
    let min_m = filt.strata.dims().into_iter().min().unwrap_or(n) as i32;
    let mut stages = vec![initial(&filt, local, filt.u(1))?];
    let mut log = Vec::new();
    let mut cleanup_neutral = true;
    for k in 1..=n {
        let prev = stages.last().unwrap();
        let target = filt.u(k + 1);
        let base = k as i32 - 1 - n as i32;
        let cutoff = if opts.naive { base.max(-min_m) } else { base } + opts.cutoff_shift;
        let truncated = prev.pushforward_open(target)?.truncate_le(cutoff);
        let size_truncated = truncated.size();
        let mut next = if opts.cleanup {
            let c = truncated.cleanup();
            if opts.verify_cleanup && c.stalk_table() != truncated.stalk_table() {
                cleanup_neutral = false;
            }
            c
        } else {
            truncated
        };
        let mut readded = Vec::new();
        if !opts.naive {
            for m in filt.strata.dims().into_iter().filter(|&m| m <= n - k) {
                next = next.direct_sum(&summand(local, m, target)?)?;
                readded.push(m);
            }
        }
        log.push(StepRecord {
            k,
            cutoff,
            domain: target.len(),
            truncated: size_truncated,
            size: next.size(),
            readded,
        });
        stages.push(next);
    }
    let checks = BundleChecks {
        normalized: normalized(&stages[0], &filt, local),
        restriction: (1..=n)
            .map(|k| {
                stages[k]
                    .restrict_open(filt.u(k))
                    .map(|r| r.stalk_table() == stages[k - 1].stalk_table())
                    .unwrap_or(false)
            })
            .collect(),
        cleanup_neutral,
        clc_violation: stages.last().unwrap().clc_violation(strat),
    };
    Ok(ICBundle {
        stratification: strat.clone(),
        filtration: filt,
        local: local.clone(),
        options: opts,
        stages,
        log,
        checks,
    })
}

fn normalized<F: Field>(i1: &SheafComplex<F>, filt: &OpenFiltration, local: &LocalSystem<F>) -> bool {
    let ranks = local.ranks();
    let table = i1.stalk_table();
    filt.strata.dims().into_iter().all(|m| {
        let want: DimTable = if ranks[&m] > 0 {
            DimTable::from([(-(m as i32), ranks[&m])])
        } else {
            DimTable::new()
        };
        filt.strata.u[&m].iter().all(|s| table[s] == want)
    })
}

/// The classical construction on a pure closure `X^m` with its induced
/// stratification: `I_1 = L^m[m]`, `I_{k+1} = τ_{≤k−1−m} Rj_{k*} I_k`,
/// over `U_k = X^m − X_{m−k}`.
pub fn build_ic_pure<F: Field>(strat: &Stratification, local: &LocalSystem<F>, m: usize, cleanup: bool) -> Result<SheafComplex<F>> {
    let os = strat.open_strata()?;
    let xm = os
        .x
        .get(&m)
        .filter(|x| !x.is_empty())
        .ok_or_else(|| Error::Stratification(format!("no open stratum of dimension {m}")))?;
    let sub = strat.induced(xm)?;
    let sub_os = sub.open_strata()?;
    if sub.n() != m || sub_os.dims() != vec![m] {
        return Err(Error::Stratification(format!(
            "X^{m} is not pure of complex dimension {m}: open strata of dimensions {:?}",
            sub_os.dims()
        )));
    }
    let part = local
        .part(m)
        .ok_or_else(|| Error::LocalSystem(format!("no local system on U^{m}")))?;
    let mut cur = SheafComplex::resolve_sheaf(part, -(m as i32));
    for k in 1..=m {
        let uk1 = minus(xm, &sub.level(m as i64 - k as i64 - 1));
        let t = cur.pushforward_open(&uk1)?.truncate_le(k as i32 - 1 - m as i32);
        cur = if cleanup { t.cleanup() } else { t };
    }
    Ok(cur)
}

/// The local system a complex carries on the open strata: `L^m = H^{−m}(S|_{U^m})`.
/// Pairs with [`build_ic`]: a complex satisfying the first axiom set is
/// `IC(𝔛, local_system_of(S))`. Parts may be zero.
pub fn local_system_of<F: Field>(s: &SheafComplex<F>, strat: &Stratification) -> Result<LocalSystem<F>> {
    let os = strat.open_strata()?;
    let mut parts = BTreeMap::new();
    for m in os.dims() {
        parts.insert(m, s.cohomology_sheaf(-(m as i32)).restrict(&os.u[&m])?);
    }
    LocalSystem::new(strat.complex(), &os, parts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub equal: bool,
    pub first_difference: Option<(usize, i32)>,
    /// Hypercohomology of each `a^m_* IC(𝔛^m, L^m)`.
    pub summands: BTreeMap<usize, DimTable>,
    pub total: DimTable,
}

/// Compares `IC(𝔛, L)` with `⊕ a^m_* IC(𝔛^m, L^m)` stalk by stalk.
pub fn check_decomposition<F: Field>(bundle: &ICBundle<F>) -> Result<DecompositionReport> {
    let strat = &bundle.stratification;
    let ic = bundle.ic();
    let space = strat.space().clone();
    let mut sum = SheafComplex::zero(ic.complex().clone(), space.clone());
    let mut summands = BTreeMap::new();
    for m in bundle.filtration.strata.dims() {
        let part = build_ic_pure(strat, &bundle.local, m, bundle.options.cleanup)?.extend_by_zero(&space)?;
        summands.insert(m, part.hypercohomology(None)?);
        sum = sum.direct_sum(&part)?;
    }
    let diff = first_difference(&ic.stalk_table(), &sum.stalk_table());
    Ok(DecompositionReport {
        equal: diff.is_none(),
        first_difference: diff,
        summands,
        total: ic.hypercohomology(None)?,
    })
}

/// A stratum absorbed by a neighbouring higher-dimensional stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Merge {
    pub simplices: Vec<String>,
    pub dim: usize,
    pub into_dim: usize,
    /// Covering pairs checked invertible, all degrees.
    pub checked_pairs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoarseningState {
    /// Coarse levels `X^can_k`, as simplex names.
    pub levels: BTreeMap<usize, Vec<String>>,
    pub merges: Vec<Merge>,
    /// Per level, simplices removed from the given level.
    pub removed: BTreeMap<usize, Vec<String>>,
    pub note: String,
    #[serde(skip)]
    pub coarse: Option<Stratification>,
}

/// Merges given strata into adjacent higher strata, top down, whenever every
/// cohomology sheaf of `s` has invertible restrictions from the stratum into
/// its neighbour. The result is a coarsening of `strat` for which `s` is still clc.
pub fn clc_coarsen<F: Field>(strat: &Stratification, s: &SheafComplex<F>) -> Result<CoarseningState> {
    let cx = strat.complex().clone();
    if let Some((a, f, c)) = s.clc_violation(strat) {
        return Err(Error::NotClc(format!(
            "H^{a} restriction {} → {} is not invertible inside a stratum",
            cx.name(f),
            cx.name(c)
        )));
    }
    let sheaves: Vec<_> = s.cohomology_degrees().into_iter().map(|a| s.cohomology_sheaf(a)).collect();
    let n = strat.n();
    // Current assignment of simplices to (coarse) strata, as (dim, members).
    let mut pieces: Vec<(usize, SimplexSet)> = strat.strata().iter().map(|st| (st.dim, st.simplices.clone())).collect();
    let mut merges = Vec::new();
    for d in (0..n).rev() {
        let mut i = 0;
        while i < pieces.len() {
            if pieces[i].0 != d {
                i += 1;
                continue;
            }
            let members = pieces[i].1.clone();
            let mut above = SimplexSet::new();
            for &sg in &members {
                above.extend(cx.open_star(sg)?.into_iter().filter(|t| !members.contains(t)));
            }
            let owners: Vec<usize> = (0..pieces.len())
                .filter(|&j| j != i && pieces[j].1.iter().any(|t| above.contains(t)))
                .collect();
            let target = match owners.as_slice() {
                [j] if pieces[*j].0 > d && above.is_subset(&pieces[*j].1) => Some(*j),
                _ => None,
            };
            let Some(j) = target else {
                i += 1;
                continue;
            };
            let mut pairs = 0;
            let ok = members.iter().all(|&sg| {
                cx.cofacets(sg).iter().all(|&t| {
                    if !members.contains(&t) && !pieces[j].1.contains(&t) {
                        return true;
                    }
                    sheaves.iter().all(|h| {
                        pairs += 1;
                        let m = h.cover_map(sg, t);
                        m.nrows() == m.ncols() && m.rank() == m.ncols()
                    })
                })
            });
            if !ok {
                i += 1;
                continue;
            }
            let into_dim = pieces[j].0;
            merges.push(Merge {
                simplices: cx.names(&members),
                dim: d,
                into_dim,
                checked_pairs: pairs,
            });
            pieces[j].1.extend(members.iter().copied());
            pieces.remove(i);
        }
    }
    let mut given = BTreeMap::new();
    for k in 0..n {
        let mut lvl = SimplexSet::new();
        for (d, set) in &pieces {
            if *d <= k {
                lvl.extend(set.iter().copied());
            }
        }
        given.insert(k, lvl);
    }
    let coarse = Stratification::new(cx.clone(), Some(strat.space().clone()), given)?;
    let mut levels = BTreeMap::new();
    let mut removed = BTreeMap::new();
    for k in 0..=n {
        let lvl = coarse.level(k as i64);
        let gone = minus(&strat.level(k as i64), &lvl);
        levels.insert(k, cx.names(&lvl));
        if !gone.is_empty() {
            removed.insert(k, cx.names(&gone));
        }
    }
    Ok(CoarseningState {
        levels,
        merges,
        removed,
        note: "merging only along the given strata; manifold points are not recognized".into(),
        coarse: Some(coarse),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub stalks_equal: bool,
    pub first_stalk_difference: Option<(usize, i32)>,
    pub costalks_equal: bool,
    pub first_costalk_difference: Option<(usize, i32)>,
    pub hyperco: (DimTable, DimTable),
    pub sample_size: usize,
    pub pass: bool,
}

/// Builds both complexes and compares stalks everywhere, costalks on `sample`
/// (everything if `None`) and hypercohomology.
pub fn compare_stratifications<F: Field>(
    first: (&Stratification, &LocalSystem<F>),
    second: (&Stratification, &LocalSystem<F>),
    sample: Option<&SimplexSet>,
    opts: BuildOptions,
) -> Result<ComparisonReport> {
    let (s1, l1) = first;
    let (s2, l2) = second;
    if s1.complex() != s2.complex() || s1.space() != s2.space() {
        return Err(Error::Domain("stratifications live on different spaces".into()));
    }
    let a = build_ic(s1, l1, opts)?;
    let b = build_ic(s2, l2, opts)?;
    let common: SimplexSet = a.filtration.u(1).intersection(b.filtration.u(1)).copied().collect();
    let (t1, t2) = (a.stages[0].stalk_table(), b.stages[0].stalk_table());
    if let Some(s) = common.iter().find(|s| t1[s] != t2[s]) {
        return Err(Error::LocalSystem(format!(
            "local systems disagree at {}",
            s1.complex().name(*s)
        )));
    }
    let (ia, ib) = (a.ic(), b.ic());
    let st = first_difference(&ia.stalk_table(), &ib.stalk_table());
    let ct = first_difference(&ia.costalk_table(sample), &ib.costalk_table(sample));
    let hyperco = (ia.hypercohomology(None)?, ib.hypercohomology(None)?);
    let pass = st.is_none() && ct.is_none() && hyperco.0 == hyperco.1;
    Ok(ComparisonReport {
        stalks_equal: st.is_none(),
        first_stalk_difference: st,
        costalks_equal: ct.is_none(),
        first_costalk_difference: ct,
        sample_size: sample.map_or(s1.space().len(), |s| s.len()),
        hyperco,
        pass,
    })
}

/// Stalk table restricted to a set of simplices.
pub fn table_on(table: &StalkTable, set: &SimplexSet) -> StalkTable {
    table.iter().filter(|(s, _)| set.contains(s)).map(|(s, t)| (*s, t.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos;
    use crate::field::Rational;
    use crate::simplicial::Vertex;

    type Q = Rational;

    fn ic(name: &str, opts: BuildOptions) -> (ICBundle<Q>, usize) {
        let (cx, st) = demos::load(name).unwrap();
        let local = LocalSystem::constant(&cx, &st.open_strata().unwrap());
        let glue = cx.vertex_id(&Vertex::Int(0)).unwrap();
        (build_ic(&st, &local, opts).unwrap(), glue)
    }

    fn t(pairs: &[(i32, usize)]) -> DimTable {
        pairs.iter().copied().collect()
    }

    #[test]
    fn local_system_round_trip() {
        let (b, _) = ic("nonpure-wedge", BuildOptions::default());
        let l = local_system_of(b.ic(), &b.stratification).unwrap();
        assert_eq!(l.ranks(), b.local.ranks());
        let again = build_ic(&b.stratification, &l, BuildOptions::default()).unwrap();
        assert_eq!(again.ic().stalk_table(), b.ic().stalk_table());
        // the zero local system gives the zero complex
        let zero = SheafComplex::<Q>::zero(b.ic().complex().clone(), b.stratification.space().clone());
        let l0 = local_system_of(&zero, &b.stratification).unwrap();
        assert!(l0.parts.values().all(|p| p.is_zero()));
        assert!(build_ic(&b.stratification, &l0, BuildOptions::default()).unwrap().ic().is_zero());
    }

    #[test]
    fn wedge_values() {
        let (b, p) = ic("wedge", BuildOptions::default());
        assert!(b.checks.all_hold(), "{:?}", b.checks);
        let ic = b.ic();
        assert_eq!(ic.stalk_cohomology(p), t(&[(-2, 1), (-1, 1)]));
        assert_eq!(ic.cell_costalk(p), t(&[(1, 1), (2, 1)]));
        assert_eq!(ic.hypercohomology(None).unwrap(), t(&[(-2, 1), (-1, 1), (1, 1), (2, 1)]));
        assert_eq!(b.log.iter().map(|r| r.cutoff).collect::<Vec<_>>(), vec![-2, -1]);
        assert!(check_decomposition(&b).unwrap().equal);
    }

    #[test]
    fn pinched_torus_values() {
        let (b, p) = ic("pinched-torus", BuildOptions::default());
        assert!(b.checks.all_hold());
        assert_eq!(b.ic().stalk_cohomology(p), t(&[(-1, 2)]));
        assert_eq!(b.ic().hypercohomology(None).unwrap(), t(&[(-1, 1), (1, 1)]));
        let pure = build_ic_pure(&b.stratification, &b.local, 1, true).unwrap();
        assert_eq!(pure.stalk_table(), b.ic().stalk_table());
    }

    #[test]
    fn cleanup_off_agrees() {
        let (a, _) = ic("wedge", BuildOptions::default());
        let (b, _) = ic("wedge", BuildOptions { cleanup: false, ..Default::default() });
        assert_eq!(a.ic().stalk_table(), b.ic().stalk_table());
        assert!(a.ic().size() <= b.ic().size());
    }

    #[test]
    fn naive_build_on_fake_surface() {
        let (b, _) = ic("fake-surface", BuildOptions { naive: true, ..Default::default() });
        assert!(!b.filtration.canonical);
        assert_eq!(b.log[0].cutoff, -1);
        let cx = b.ic().complex().clone();
        let fake = cx.find(&[Vertex::Int(1), Vertex::Int(2), Vertex::Int(3)]).unwrap();
        assert_eq!(b.ic().stalk_cohomology(fake).get(&-1), Some(&1));
        let (good, _) = ic("fake-surface", BuildOptions::default());
        assert_eq!(good.ic().stalk_cohomology(fake), t(&[(-2, 1)]));
    }

    #[test]
    fn coarsening() {
        let (cx, st) = demos::load("wedge").unwrap();
        let fine = demos::refine(&st, "extra-point").unwrap();
        let local = LocalSystem::<Q>::constant(&cx, &fine.open_strata().unwrap());
        let b = build_ic(&fine, &local, BuildOptions::default()).unwrap();
        let c = clc_coarsen(&fine, b.ic()).unwrap();
        assert_eq!(c.merges.len(), 1);
        let coarse = c.coarse.unwrap();
        assert!(fine.refines(&coarse).unwrap().holds);
        assert_eq!(coarse.strata().len(), st.strata().len());

        let (b, _) = ic("pinched-torus", BuildOptions::default());
        assert!(clc_coarsen(&b.stratification, b.ic()).unwrap().merges.is_empty());
    }

    #[test]
    fn compare_with_refinement() {
        let (cx, st) = demos::load("wedge").unwrap();
        let fine = demos::refine(&st, "extra-point").unwrap();
        let l1 = LocalSystem::<Q>::constant(&cx, &st.open_strata().unwrap());
        let l2 = l1.restrict_to(&fine.open_strata().unwrap()).unwrap();
        let r = compare_stratifications((&st, &l1), (&fine, &l2), None, BuildOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
