//! Serializable reports: named stalk tables, complex dumps and run manifests.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cochain::DimTable;
use crate::deligne::{build_ic_pure, ICBundle, StepRecord};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::SparseMatrix;
use crate::sheaf::LocalSystem;
use crate::sheafcx::{SheafComplex, StalkTable};
use crate::simplicial::{SimplexSet, SimplicialComplex, Vertex};
use crate::stratify::Stratification;

pub const MANIFEST_FORMAT: &str = "icx-manifest/1";
pub const DUMP_FORMAT: &str = "icx-complex/1";
/// IC restricts to `⊕ L^m[m]` on the open part.
pub const CONVENTION: &str = "paper-shifted";

/// `{simplex name: {degree: dim}}`.
pub type NamedTable = BTreeMap<String, DimTable>;

pub fn named_table(complex: &SimplicialComplex, table: &StalkTable) -> NamedTable {
    table.iter().map(|(&s, t)| (complex.name(s), t.clone())).collect()
}

/// SHA-256 over the canonical JSON of the complex and stratification documents.
pub fn stratification_hash(strat: &Stratification) -> String {
    let doc = (strat.complex().to_doc(), strat.to_doc());
    let bytes = serde_json::to_vec(&doc).expect("documents serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Options that change what a run computes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub cleanup: bool,
    pub check_links: bool,
    pub naive: bool,
    /// Costalk scans restricted to this many simplices, if set.
    pub sample: Option<usize>,
    pub refine: Option<String>,
    /// Add the Borel-indexed stalk column.
    pub borel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub command: String,
    /// Role (`space`, `strat`, `local`, ...) to path or `demo:<name>`.
    pub inputs: BTreeMap<String, String>,
    pub field: String,
    pub options: RunOptions,
    pub convention: String,
    pub stratification_hash: String,
}

impl RunManifest {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, field: String, options: RunOptions, strat: &Stratification) -> Self {
        RunManifest {
            format: MANIFEST_FORMAT.into(),
            command: command.into(),
            inputs,
            field,
            options,
            convention: CONVENTION.into(),
            stratification_hash: stratification_hash(strat),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: RunManifest = serde_json::from_str(text).map_err(|e| Error::Input(format!("manifest: {e}")))?;
        if m.format != MANIFEST_FORMAT {
            return Err(Error::Input(format!("unsupported manifest format {}", m.format)));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDump {
    pub degree: i32,
    /// Support simplex of each basis injective.
    pub supports: Vec<Vec<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffDump {
    /// Source degree.
    pub degree: i32,
    /// `(row, column, value)` with exact scalars as text.
    pub entries: Vec<(usize, usize, String)>,
}

/// Text form of a [`SheafComplex`], loadable back over the same complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDump {
    pub format: String,
    pub field: String,
    pub domain: Vec<Vec<Vertex>>,
    pub terms: Vec<TermDump>,
    pub differentials: Vec<DiffDump>,
}

impl ComplexDump {
    pub fn of<F: Field>(s: &SheafComplex<F>) -> Self {
        let cx = s.complex();
        let terms = (s.lo()..=s.hi())
            .map(|q| TermDump { degree: q, supports: s.term(q).iter().map(|&t| cx.labels_of(t)).collect() })
            .collect();
        let differentials = (s.lo()..s.hi())
            .map(|q| {
                let mut entries: Vec<(usize, usize, String)> = s
                    .diff(q)
                    .map(|d| d.entries().map(|(r, c, v)| (r, c, v.to_text())).collect())
                    .unwrap_or_default();
                entries.sort();
                DiffDump { degree: q, entries }
            })
            .collect();
        ComplexDump {
            format: DUMP_FORMAT.into(),
            field: F::tag(),
            domain: s.domain().iter().map(|&t| cx.labels_of(t)).collect(),
            terms,
            differentials,
        }
    }

    pub fn load<F: Field>(&self, complex: Arc<SimplicialComplex>) -> Result<SheafComplex<F>> {
        if self.field != F::tag() {
            return Err(Error::Input(format!("dump over {} read as {}", self.field, F::tag())));
        }
        let find_all = |xs: &[Vec<Vertex>]| -> Result<Vec<usize>> { xs.iter().map(|l| complex.find(l)).collect() };
        let domain: SimplexSet = find_all(&self.domain)?.into_iter().collect();
        if self.terms.is_empty() {
            return Ok(SheafComplex::zero(complex, domain));
        }
        let lo = self.terms[0].degree;
        let supports = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if t.degree != lo + i as i32 {
                    return Err(Error::Input("dump degrees must be consecutive".into()));
                }
                find_all(&t.supports)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut diffs = Vec::new();
        for (i, d) in self.differentials.iter().enumerate() {
            if d.degree != lo + i as i32 || i + 1 >= supports.len() {
                return Err(Error::Input(format!("unexpected differential in degree {}", d.degree)));
            }
            let (rows, cols) = (supports[i + 1].len(), supports[i].len());
            let mut dense = vec![vec![F::zero(); cols]; rows];
            for (r, c, v) in &d.entries {
                if *r >= rows || *c >= cols {
                    return Err(Error::Input(format!("entry ({r}, {c}) out of range in degree {}", d.degree)));
                }
                dense[*r][*c] = F::parse_text(v)?;
            }
            diffs.push(SparseMatrix::from_dense(rows, cols, &dense));
        }
        SheafComplex::from_parts(complex, domain, lo, supports, diffs)
    }
}

/// Deterministic sample of `size` simplices of `space` (all of them if fewer).
pub fn sample_simplices(space: &SimplexSet, size: usize, seed: u64) -> SimplexSet {
    let all: Vec<usize> = space.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    all.choose_multiple(&mut rng, size.min(all.len())).copied().collect()
}

/// Everything `build` writes: the IC, its stalks, the construction log and checks.
#[derive(Clone, Debug, Serialize)]
pub struct BundleReport {
    pub convention: String,
    pub field: String,
    pub stratification_hash: String,
    pub log: Vec<StepRecord>,
    pub checks: crate::deligne::BundleChecks,
    pub stalks: NamedTable,
    /// Each summand `a^m_* IC(𝔛^m, L^m)` shifted by `+m`, summed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub borel_stalks: Option<NamedTable>,
    pub ic: ComplexDump,
}

impl BundleReport {
    pub fn of<F: Field>(bundle: &ICBundle<F>, borel: bool) -> Result<Self> {
        let cx = bundle.stratification.complex();
        let borel_stalks = if borel {
            Some(named_table(cx, &borel_table(&bundle.stratification, &bundle.local, bundle.options.cleanup)?))
        } else {
            None
        };
        Ok(BundleReport {
            convention: CONVENTION.into(),
            field: F::tag(),
            stratification_hash: stratification_hash(&bundle.stratification),
            log: bundle.log.clone(),
            checks: bundle.checks.clone(),
            stalks: named_table(cx, &bundle.ic().stalk_table()),
            borel_stalks,
            ic: ComplexDump::of(bundle.ic()),
        })
    }
}

/// Stalk dimensions in the Borel indexing: every pure piece is built on its
/// closure `X^m`, then shifted so that `L^m` sits in degree 0.
pub fn borel_table<F: Field>(strat: &Stratification, local: &LocalSystem<F>, cleanup: bool) -> Result<StalkTable> {
    let mut out: StalkTable = BTreeMap::new();
    for m in strat.open_strata()?.dims() {
        let pure = build_ic_pure(strat, local, m, cleanup)?;
        for (s, t) in pure.stalk_table() {
            let row = out.entry(s).or_default();
            for (a, d) in t {
                *row.entry(a + m as i32).or_default() += d;
            }
        }
    }
    out.retain(|_, t| {
        t.retain(|_, d| *d > 0);
        true
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::{build_ic, BuildOptions};
    use crate::field::{Fp, Rational};

    #[test]
    fn dump_round_trip() {
        let (cx, strat) = crate::demos::load("pinched-torus").unwrap();
        let local = LocalSystem::<Rational>::constant(&cx, &strat.open_strata().unwrap());
        let b = build_ic(&strat, &local, BuildOptions::default()).unwrap();
        let dump = ComplexDump::of(b.ic());
        let text = serde_json::to_string(&dump).unwrap();
        let back: ComplexDump = serde_json::from_str(&text).unwrap();
        let again = back.load::<Rational>(cx.clone()).unwrap();
        assert_eq!(again.stalk_table(), b.ic().stalk_table());
        assert_eq!(ComplexDump::of(&again), dump);
        assert!(back.load::<Fp<3>>(cx).is_err());
    }

    #[test]
    fn manifest_round_trip_and_hash() {
        let (_, strat) = crate::demos::load("wedge").unwrap();
        let (_, fake) = crate::demos::load("fake-surface").unwrap();
        assert_ne!(stratification_hash(&strat), stratification_hash(&fake));
        let opts = RunOptions { cleanup: true, sample: Some(5), ..Default::default() };
        let inputs = BTreeMap::from([("space".to_string(), "demo:wedge".to_string())]);
        let m = RunManifest::new("build", inputs, "q".into(), opts, &strat);
        let text = m.to_json();
        let back = RunManifest::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
        assert!(RunManifest::from_json(&text.replace("icx-manifest/1", "icx-manifest/9")).is_err());
    }

    #[test]
    fn borel_shift_on_wedge() {
        let (cx, strat) = crate::demos::load("wedge").unwrap();
        let local = LocalSystem::<Rational>::constant(&cx, &strat.open_strata().unwrap());
        let t = borel_table(&strat, &local, true).unwrap();
        let glue = cx.find(&[Vertex::Int(0)]).unwrap();
        // both pieces put Q in degree 0 at the glue point
        assert_eq!(t[&glue], BTreeMap::from([(0, 2)]));
        let smooth = cx.find(&[Vertex::Int(1)]).unwrap();
        assert_eq!(t[&smooth], BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn samples_are_deterministic() {
        let space: SimplexSet = (0..40).collect();
        let a = sample_simplices(&space, 7, 0);
        assert_eq!(a.len(), 7);
        assert_eq!(a, sample_simplices(&space, 7, 0));
        assert!(a.is_subset(&space));
        assert_eq!(sample_simplices(&space, 99, 0), space);
    }
}
