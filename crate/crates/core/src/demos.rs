//! Bundled example spaces and admissible refinements of their stratifications.
//!
//! | name | space | singular strata |
//! |------|-------|-----------------|
//! | `wedge` | `∂Δ⁵ ∨ ∂Δ³` glued at vertex 0 | the 2-sphere, the glue point |
//! | `fake-surface` | same | as `wedge`, plus `∂Δ³` on `{1,2,3,4}` inside the 4-sphere |
//! | `pinched-torus` | a 2-sphere with two points identified | the pinch point 0 |
//! | `susp-s1xs2` | suspension of `S¹ × S²` | the two suspension points 12, 13 |
//! | `nonpure-wedge` | `susp-s1xs2 ∨ ∂Δ³` glued at 12 | the 2-sphere, 12, 13 |
//!
//! The generated files are committed under `data/demos`; [`load`] reads those.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simplicial::{ComplexDoc, SimplexSet, SimplicialComplex, Vertex};
use crate::stratify::{Stratification, StratificationDoc};

pub const NAMES: [&str; 5] = ["wedge", "fake-surface", "pinched-torus", "susp-s1xs2", "nonpure-wedge"];

fn verts(xs: &[i64]) -> Vec<Vertex> {
    xs.iter().map(|&x| Vertex::Int(x)).collect()
}

/// Facets of the boundary of the simplex on `vs`.
fn boundary(vs: &[i64]) -> Vec<Vec<Vertex>> {
    (0..vs.len())
        .map(|skip| {
            let face: Vec<i64> = vs.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
            verts(&face)
        })
        .collect()
}

fn doc(vertices: &[i64], maximal: Vec<Vec<Vertex>>) -> ComplexDoc {
    ComplexDoc {
        vertices: verts(vertices),
        maximal_simplices: maximal,
    }
}

fn levels(pairs: Vec<(usize, Vec<Vec<Vertex>>)>) -> StratificationDoc {
    StratificationDoc {
        levels: pairs.into_iter().map(|(k, g)| (k.to_string(), g)).collect(),
    }
}

fn wedge() -> (ComplexDoc, StratificationDoc) {
    let mut tops = boundary(&[0, 1, 2, 3, 4, 5]);
    let s2 = boundary(&[0, 6, 7, 8]);
    tops.extend(s2.iter().cloned());
    let vs: Vec<i64> = (0..9).collect();
    (doc(&vs, tops), levels(vec![(1, s2), (0, vec![verts(&[0])])]))
}

fn fake_surface() -> (ComplexDoc, StratificationDoc) {
    let (cx, _) = wedge();
    let mut one = boundary(&[0, 6, 7, 8]);
    one.extend(boundary(&[1, 2, 3, 4]));
    (cx, levels(vec![(1, one), (0, vec![verts(&[0])])]))
}

fn pinched_torus() -> (ComplexDoc, StratificationDoc) {
    let a = |i: usize| 1 + (i % 3) as i64;
    let b = |i: usize| 4 + (i % 3) as i64;
    let mut tops = Vec::new();
    for i in 0..3 {
        tops.push(verts(&[0, a(i), a(i + 1)]));
        tops.push(verts(&[a(i), a(i + 1), b(i)]));
        tops.push(verts(&[a(i + 1), b(i), b(i + 1)]));
        tops.push(verts(&[0, b(i), b(i + 1)]));
    }
    let vs: Vec<i64> = (0..7).collect();
    (doc(&vs, tops), levels(vec![(0, vec![verts(&[0])])]))
}

/// Staircase triangulation of `S¹ × S²`: the 3-cycle on `{0,1,2}` times `∂Δ³`,
/// vertex `(i, j)` numbered `4i + j`. Returns the 36 tetrahedra.
fn s1xs2() -> Vec<Vec<i64>> {
    let edges = [[0, 1], [1, 2], [0, 2]];
    let tris = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut out = Vec::new();
    for e in &edges {
        for t in &tris {
            // Monotone lattice paths from (0,0) to (1,2): the i-step comes at position p.
            for p in 0..3 {
                let mut chain = Vec::new();
                let (mut i, mut j) = (0, 0);
                chain.push(e[i] * 4 + t[j]);
                for step in 0..3 {
                    if step == p {
                        i += 1;
                    } else {
                        j += 1;
                    }
                    chain.push(e[i] * 4 + t[j]);
                }
                chain.sort_unstable();
                out.push(chain);
            }
        }
    }
    out
}

fn susp_s1xs2() -> (ComplexDoc, StratificationDoc) {
    let mut tops = Vec::new();
    for apex in [12, 13] {
        for t in s1xs2() {
            let mut s = t.clone();
            s.push(apex);
            tops.push(verts(&s));
        }
    }
    let vs: Vec<i64> = (0..14).collect();
    let points = vec![verts(&[12]), verts(&[13])];
    (doc(&vs, tops), levels(vec![(1, points.clone()), (0, points)]))
}

fn nonpure_wedge() -> (ComplexDoc, StratificationDoc) {
    let (mut cx, _) = susp_s1xs2();
    let s2 = boundary(&[12, 14, 15, 16]);
    cx.maximal_simplices.extend(s2.iter().cloned());
    cx.vertices = verts(&(0..17).collect::<Vec<_>>());
    let mut one = vec![verts(&[13])];
    one.extend(s2);
    (cx, levels(vec![(1, one), (0, vec![verts(&[12]), verts(&[13])])]))
}

/// Generates a bundled space from scratch.
pub fn generate(name: &str) -> Result<(ComplexDoc, StratificationDoc)> {
    Ok(match name {
        "wedge" => wedge(),
        "fake-surface" => fake_surface(),
        "pinched-torus" => pinched_torus(),
        "susp-s1xs2" => susp_s1xs2(),
        "nonpure-wedge" => nonpure_wedge(),
        _ => return Err(unknown(name)),
    })
}

fn unknown(name: &str) -> Error {
    Error::Input(format!("unknown demo {name:?}; known: {}", NAMES.join(", ")))
}

/// The committed complex and stratification files.
pub fn bundled(name: &str) -> Result<(&'static str, &'static str)> {
    macro_rules! files {
        ($n:literal) => {
            (
                include_str!(concat!("../data/demos/", $n, ".complex.json")),
                include_str!(concat!("../data/demos/", $n, ".strat.json")),
            )
        };
    }
    Ok(match name {
        "wedge" => files!("wedge"),
        "fake-surface" => files!("fake-surface"),
        "pinched-torus" => files!("pinched-torus"),
        "susp-s1xs2" => files!("susp-s1xs2"),
        "nonpure-wedge" => files!("nonpure-wedge"),
        _ => return Err(unknown(name)),
    })
}

/// Pretty JSON for a generated space, as committed.
pub fn render(name: &str) -> Result<(String, String)> {
    let (cx, st) = generate(name)?;
    Ok((
        serde_json::to_string_pretty(&cx)? + "\n",
        serde_json::to_string_pretty(&st)? + "\n",
    ))
}

pub fn load(name: &str) -> Result<(Arc<SimplicialComplex>, Stratification)> {
    let (c, s) = bundled(name)?;
    let cx = Arc::new(SimplicialComplex::load_json(c)?);
    let st = Stratification::load_json(cx.clone(), s)?;
    Ok((cx, st))
}

/// Vertices lying in an open stratum of positive dimension.
fn point_candidates(strat: &Stratification) -> Vec<usize> {
    let cx = strat.complex();
    strat
        .space()
        .iter()
        .copied()
        .filter(|&s| cx.dim_of(s) == 0)
        .filter(|&s| {
            let st = &strat.strata()[strat.stratum_of(s).unwrap()];
            st.is_open && st.dim >= 1
        })
        .collect()
}

/// Tetrahedra all of whose faces lie in one open stratum of dimension ≥ 2;
/// their boundaries are 2-spheres that can be declared a stratum.
fn sphere_candidates(strat: &Stratification) -> Vec<usize> {
    let cx = strat.complex();
    strat
        .space()
        .iter()
        .copied()
        .filter(|&s| cx.dim_of(s) == 3)
        .filter(|&s| {
            let home = strat.stratum_of(s).unwrap();
            let st = &strat.strata()[home];
            st.is_open
                && st.dim >= 2
                && cx
                    .down_closure(&SimplexSet::from([s]))
                    .iter()
                    .all(|f| strat.stratum_of(*f) == Some(home))
        })
        .collect()
}

fn add_point(strat: &Stratification, v: usize) -> Result<Stratification> {
    strat.with_extra_stratum(&SimplexSet::from([v]), 0)
}

fn add_sphere(strat: &Stratification, tet: usize) -> Result<Stratification> {
    let cx = strat.complex();
    let mut bd = cx.down_closure(&SimplexSet::from([tet]));
    bd.remove(&tet);
    strat.with_extra_stratum(&bd, 1)
}

/// Applies a refinement recipe: `extra-point`, `fake-sphere` or `random:<seed>`.
pub fn refine(strat: &Stratification, recipe: &str) -> Result<Stratification> {
    match recipe {
        "extra-point" => {
            let v = *point_candidates(strat)
                .first()
                .ok_or_else(|| Error::Input("no vertex in an open stratum of positive dimension".into()))?;
            add_point(strat, v)
        }
        "fake-sphere" => {
            let t = *sphere_candidates(strat)
                .first()
                .ok_or_else(|| Error::Input("no tetrahedron inside an open stratum of dimension ≥ 2".into()))?;
            add_sphere(strat, t)
        }
        r => match r.strip_prefix("random:").map(str::parse::<u64>) {
            Some(Ok(seed)) => random_refinement(strat, seed),
            _ => Err(Error::Parse(format!(
                "unknown refinement {recipe:?}; expected extra-point, fake-sphere or random:<seed>"
            ))),
        },
    }
}

/// Adds one to three fake strata (points, and 2-spheres where the space allows),
/// chosen by a seeded generator. Candidates that would break validity are skipped.
pub fn random_refinement(strat: &Stratification, seed: u64) -> Result<Stratification> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let want = rng.gen_range(1..=3);
    let mut cur = strat.clone();
    let mut added = 0;
    for _ in 0..20 {
        if added == want {
            break;
        }
        let spheres = sphere_candidates(&cur);
        let next = if !spheres.is_empty() && rng.gen_bool(0.5) {
            add_sphere(&cur, *spheres.choose(&mut rng).unwrap())
        } else {
            match point_candidates(&cur).choose(&mut rng) {
                Some(&v) => add_point(&cur, v),
                None => break,
            }
        };
        if let Ok(s) = next {
            cur = s;
            added += 1;
        }
    }
    if added == 0 {
        return Err(Error::Input("no admissible refinement found".into()));
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rewrites the committed files; run with `ICSHEAF_WRITE_DEMOS=1`.
    #[test]
    fn write_files_on_request() {
        if std::env::var_os("ICSHEAF_WRITE_DEMOS").is_none() {
            return;
        }
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demos");
        std::fs::create_dir_all(&dir).unwrap();
        for name in NAMES {
            let (c, s) = render(name).unwrap();
            std::fs::write(dir.join(format!("{name}.complex.json")), c).unwrap();
            std::fs::write(dir.join(format!("{name}.strat.json")), s).unwrap();
        }
    }

    #[test]
    fn committed_files_match_generation() {
        for name in NAMES {
            let (c, s) = render(name).unwrap();
            let (bc, bs) = bundled(name).unwrap();
            assert_eq!(c, bc, "{name} complex");
            assert_eq!(s, bs, "{name} stratification");
        }
    }

    #[test]
    fn shapes() {
        let (cx, st) = load("wedge").unwrap();
        assert_eq!(cx.f_vector()[0], 9);
        assert_eq!(st.n(), 2);
        let (cx, _) = load("susp-s1xs2").unwrap();
        assert_eq!(cx.dim(), 4);
        assert_eq!(cx.of_dim(4).count(), 72);
        let (cx, st) = load("pinched-torus").unwrap();
        assert_eq!(cx.f_vector(), vec![7, 18, 12]);
        assert_eq!(st.n(), 1);
        assert_eq!(st.open_strata().unwrap().dims(), vec![1]);
    }

    #[test]
    fn refinements_are_valid_refinements() {
        for name in NAMES {
            let (_, st) = load(name).unwrap();
            let r = refine(&st, "extra-point").unwrap();
            assert!(r.refines(&st).unwrap().holds);
            for seed in 0..4 {
                let r = refine(&st, &format!("random:{seed}")).unwrap();
                assert!(r.refines(&st).unwrap().holds, "{name} seed {seed}");
                assert!(r.strata().len() > st.strata().len());
            }
        }
        let (_, st) = load("wedge").unwrap();
        assert!(refine(&st, "fake-sphere").unwrap().refines(&st).unwrap().holds);
        assert!(refine(&st, "bogus").is_err());
    }
}
