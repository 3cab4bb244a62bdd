//! Checkers for the stratified axioms `[AX1′]`, the stratification-free
//! axioms `[AX2′]`, and the classical pure-dimensional `[AX2]`.
//!
//! Stalks are values at simplices and costalks are [`SheafComplex::cell_costalk`],
//! so every locus is a union of open simplices. Complex dimension of a locus
//! is half the top dimension of its closure.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::sheafcx::{SheafComplex, StalkTable};
use crate::simplicial::{minus, SimplexSet, SimplicialComplex};
use crate::stratify::Stratification;

pub const CONE_NOTE: &str = "local cone condition of the stratification is not checked";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Stalk,
    Costalk,
}

/// A union of open simplices with the dimension of its closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locus {
    pub simplices: SimplexSet,
    /// `None` for the empty locus.
    pub real_dim: Option<usize>,
}

impl Locus {
    fn new(cx: &SimplicialComplex, simplices: SimplexSet) -> Self {
        let real_dim = cx.max_dim(&simplices);
        Locus { simplices, real_dim }
    }

    /// Complex dimension; odd real dimension is an error.
    pub fn complex_dim(&self, degree: i32) -> Result<Option<usize>> {
        match self.real_dim {
            None => Ok(None),
            Some(d) if d % 2 == 1 => Err(Error::OddLocus { degree, dim: d }),
            Some(d) => Ok(Some(d / 2)),
        }
    }
}

/// `{σ ∈ within : H^a ≠ 0}` for stalks or costalks.
pub fn support_locus<F: Field>(s: &SheafComplex<F>, a: i32, mode: Mode, within: Option<&SimplexSet>) -> Locus {
    let table = match mode {
        Mode::Stalk => s.stalk_table(),
        Mode::Costalk => s.costalk_table(within),
    };
    locus_from(s.complex(), &table, a, within)
}

fn locus_from(cx: &SimplicialComplex, table: &StalkTable, a: i32, within: Option<&SimplexSet>) -> Locus {
    let set = table
        .iter()
        .filter(|(sg, t)| within.is_none_or(|w| w.contains(sg)) && t.get(&a).is_some_and(|&h| h > 0))
        .map(|(sg, _)| *sg)
        .collect();
    Locus::new(cx, set)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub clause: String,
    /// The open stratum dimension `m` (for `[AX2′]`) or the filtration step `k` (for `[AX1′]`).
    pub index: Option<usize>,
    pub degree: i32,
    pub locus: Vec<String>,
    pub real_dim: Option<usize>,
    pub complex_dim: Option<usize>,
    /// Human-readable requirement, e.g. `"dim < 1"` or `"H^a = 0"`.
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub pass: bool,
    /// Number of (simplex, degree) or (index, degree) conditions examined.
    pub checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub pass: bool,
    pub clauses: Vec<ClauseResult>,
    pub witnesses: Vec<Witness>,
    pub trust_notes: Vec<String>,
}

impl AxiomReport {
    fn new(axiom: &str) -> Self {
        AxiomReport {
            axiom: axiom.into(),
            pass: true,
            clauses: Vec::new(),
            witnesses: Vec::new(),
            trust_notes: vec![CONE_NOTE.into()],
        }
    }

    fn clause(&mut self, name: &str, checked: usize, witnesses: Vec<Witness>) {
        let pass = witnesses.is_empty();
        self.pass &= pass;
        self.clauses.push(ClauseResult {
            clause: name.into(),
            pass,
            checked,
        });
        self.witnesses.extend(witnesses);
    }

    pub fn clause_passes(&self, name: &str) -> Option<bool> {
        self.clauses.iter().find(|c| c.clause == name).map(|c| c.pass)
    }

    /// Exit status: 0 on PASS, 2 on FAIL.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}

fn degrees(table: &StalkTable) -> BTreeSet<i32> {
    table.values().flat_map(|t| t.keys().copied()).collect()
}

fn witness(cx: &SimplicialComplex, clause: &str, index: Option<usize>, degree: i32, set: SimplexSet, bound: String) -> Witness {
    let real_dim = cx.max_dim(&set);
    Witness {
        clause: clause.into(),
        index,
        degree,
        locus: cx.names(&set),
        real_dim,
        complex_dim: real_dim.map(|d| d.div_ceil(2)),
        bound,
    }
}

/// Normalization on the open pieces `pieces[m]`: stalks concentrated in
/// degree `−m` with invertible restrictions of `H^{−m}`.
fn normalization<F: Field>(s: &SheafComplex<F>, table: &StalkTable, pieces: &BTreeMap<usize, SimplexSet>, clause: &str) -> (usize, Vec<Witness>) {
    let cx = s.complex();
    let mut checked = 0;
    let mut out = Vec::new();
    for (&m, piece) in pieces {
        let want = -(m as i32);
        let mut bad: BTreeMap<i32, SimplexSet> = BTreeMap::new();
        for sg in piece {
            checked += 1;
            for (&q, _) in table[sg].iter().filter(|(q, _)| **q != want) {
                bad.entry(q).or_default().insert(*sg);
            }
        }
        for (q, set) in bad {
            out.push(witness(cx, clause, Some(m), q, set, format!("H^a = 0 for a ≠ {want} on the dimension-{m} part")));
        }
        if let Some((f, t)) = s.cohomology_sheaf(want).first_non_invertible(piece) {
            out.push(witness(
                cx,
                clause,
                Some(m),
                want,
                SimplexSet::from([f, t]),
                format!("H^{want} locally constant on the dimension-{m} part"),
            ));
        }
    }
    (checked, out)
}

/// `[AX1′]` with respect to `strat`: normalization on `U_1`, vanishing on
/// `W_{k+1}` above `k−1−n`, and attaching through point costalks vanishing
/// in degrees `≤ n−k` on `U_{k+1} ∖ U_k`.
pub fn check_ax1<F: Field>(s: &SheafComplex<F>, strat: &Stratification) -> Result<AxiomReport> {
    let cx = s.complex();
    if s.domain() != strat.space() {
        return Err(Error::Domain("the complex must be defined on the whole stratified space".into()));
    }
    let filt = strat.open_filtration()?;
    let n = strat.n();
    let stalks = s.stalk_table();
    let mut rep = AxiomReport::new("AX1'");

    let pieces: BTreeMap<usize, SimplexSet> = filt.strata.dims().into_iter().map(|m| (m, filt.strata.u[&m].clone())).collect();
    let (checked, w) = normalization(s, &stalks, &pieces, "a");
    rep.clause("a", checked, w);

    let mut checked = 0;
    let mut w = Vec::new();
    for k in 1..=n {
        let cut = k as i32 - 1 - n as i32;
        let mut bad: BTreeMap<i32, SimplexSet> = BTreeMap::new();
        for sg in filt.w(k + 1) {
            checked += 1;
            for (&a, _) in stalks[sg].range(cut + 1..) {
                bad.entry(a).or_default().insert(*sg);
            }
        }
        for (a, set) in bad {
            w.push(witness(cx, "b", Some(k), a, set, format!("H^a = 0 on W_{} for a > {cut}", k + 1)));
        }
    }
    rep.clause("b", checked, w);

    let mut checked = 0;
    let mut w = Vec::new();
    for k in 1..=n {
        let z = minus(filt.u(k + 1), filt.u(k));
        let cut = n as i32 - k as i32;
        let costalks = s.costalk_table(Some(&z));
        let mut bad: BTreeMap<i32, SimplexSet> = BTreeMap::new();
        for (sg, t) in &costalks {
            checked += 1;
            for (&a, _) in t.range(..=cut) {
                bad.entry(a).or_default().insert(*sg);
            }
        }
        for (a, set) in bad {
            w.push(witness(
                cx,
                "c",
                Some(k),
                a,
                set,
                format!("costalk H^a = 0 on U_{} − U_{k} for a ≤ {cut}", k + 1),
            ));
        }
    }
    rep.clause("c", checked, w);
    Ok(rep)
}

/// `[AX2′]`. `v` gives the manifold pieces `V^m`; by default the open strata `U^m`.
/// Requires `s` to be clc for `strat`.
pub fn check_ax2<F: Field>(s: &SheafComplex<F>, strat: &Stratification, v: Option<&BTreeMap<usize, SimplexSet>>) -> Result<AxiomReport> {
    let cx = s.complex();
    if s.domain() != strat.space() {
        return Err(Error::Domain("the complex must be defined on the whole stratified space".into()));
    }
    if let Some((a, f, t)) = s.clc_violation(strat) {
        return Err(Error::NotClc(format!(
            "H^{a} restriction {} → {} is not invertible inside a stratum",
            cx.name(f),
            cx.name(t)
        )));
    }
    let pieces: BTreeMap<usize, SimplexSet> = match v {
        Some(v) => v.iter().filter(|(_, p)| !p.is_empty()).map(|(m, p)| (*m, p.clone())).collect(),
        None => {
            let os = strat.open_strata()?;
            os.dims().into_iter().map(|m| (m, os.u[&m].clone())).collect()
        }
    };
    for (m, p) in &pieces {
        if !cx.is_up_closed(p, Some(strat.space())) {
            return Err(Error::Closure(format!("V^{m} is not open")));
        }
    }
    let stalks = s.stalk_table();
    let costalks = s.costalk_table(None);
    let mut rep = AxiomReport::new("AX2'");
    let (checked, w) = normalization(s, &stalks, &pieces, "a");
    rep.clause("a", checked, w);

    let closures: BTreeMap<usize, SimplexSet> = pieces.iter().map(|(m, p)| (*m, cx.down_closure(p))).collect();
    let mut checked = 0;
    let mut w = Vec::new();
    for (&m, xm) in &closures {
        for a in degrees(&stalks).into_iter().filter(|&a| a > -(m as i32)) {
            checked += 1;
            w.extend(violations(cx, &stalks, a, xm, "b", m, -a)?);
        }
    }
    rep.clause("b", checked, w);

    let mut checked = 0;
    let mut w = Vec::new();
    for (&m, xm) in &closures {
        for a in degrees(&costalks).into_iter().filter(|&a| a < m as i32) {
            checked += 1;
            w.extend(violations(cx, &costalks, a, xm, "c", m, a)?);
        }
    }
    rep.clause("c", checked, w);
    Ok(rep)
}

/// Components of the degree-`a` locus inside `within` whose complex dimension is not `< bound`.
fn violations(cx: &SimplicialComplex, table: &StalkTable, a: i32, within: &SimplexSet, clause: &str, index: usize, bound: i32) -> Result<Vec<Witness>> {
    let locus = locus_from(cx, table, a, Some(within));
    locus.complex_dim(a)?;
    let mut out = Vec::new();
    for comp in cx.components_of(&locus.simplices) {
        let l = Locus::new(cx, comp);
        let d = l.complex_dim(a)?.expect("nonempty component") as i32;
        if d >= bound {
            let mut wit = witness(cx, clause, Some(index), a, l.simplices, format!("dim < {bound}"));
            wit.complex_dim = Some(d as usize);
            out.push(wit);
        }
    }
    Ok(out)
}

/// Classical `[AX2]` with `n` the top complex dimension, applied to the whole space
/// whether or not it is pure. Odd-dimensional loci are rounded up.
pub fn check_classic_ax2<F: Field>(s: &SheafComplex<F>, strat: &Stratification) -> Result<AxiomReport> {
    let cx = s.complex();
    let n = strat.n() as i32;
    let space = strat.space();
    let stalks = s.stalk_table();
    let costalks = s.costalk_table(None);
    let mut rep = AxiomReport::new("AX2");

    let top = BTreeMap::from([(n as usize, strat.open_part(n as usize))]);
    let (checked, w) = normalization(s, &stalks, &top, "a");
    rep.clause("a", checked, w);

    let mut bad: BTreeMap<i32, SimplexSet> = BTreeMap::new();
    for (sg, t) in &stalks {
        for (&a, _) in t.range(..-n) {
            bad.entry(a).or_default().insert(*sg);
        }
    }
    let w = bad
        .into_iter()
        .map(|(a, set)| witness(cx, "b", None, a, set, format!("H^a = 0 for a < {}", -n)))
        .collect();
    rep.clause("b", stalks.len(), w);

    let mut checked = 0;
    let mut w = Vec::new();
    for a in degrees(&stalks).into_iter().filter(|&a| a > -n) {
        checked += 1;
        w.extend(classic_violations(cx, &stalks, a, space, "c", -a));
    }
    rep.clause("c", checked, w);

    let mut checked = 0;
    let mut w = Vec::new();
    for a in degrees(&costalks).into_iter().filter(|&a| a < n) {
        checked += 1;
        w.extend(classic_violations(cx, &costalks, a, space, "d", a));
    }
    rep.clause("d", checked, w);
    rep.trust_notes.push("classical axioms assume a pure-dimensional space".into());
    Ok(rep)
}

fn classic_violations(cx: &SimplicialComplex, table: &StalkTable, a: i32, within: &SimplexSet, clause: &str, bound: i32) -> Vec<Witness> {
    let locus = locus_from(cx, table, a, Some(within));
    cx.components_of(&locus.simplices)
        .into_iter()
        .filter_map(|comp| {
            let wit = witness(cx, clause, None, a, comp, format!("dim < {bound}"));
            (wit.complex_dim.unwrap() as i32 >= bound).then_some(wit)
        })
        .collect()
}
