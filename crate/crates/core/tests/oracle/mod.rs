//! Reference computations for the test suites, written against plain vertex
//! lists so they share no code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Facets = Vec<Vec<i64>>;

/// Rank by dense Gaussian elimination over exact rationals.
pub fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() * inv.clone();
                for j in c..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Every face of every facet, grouped by dimension.
pub fn faces(facets: &[Vec<i64>]) -> Vec<Vec<Vec<i64>>> {
    let mut all = BTreeSet::new();
    for f in facets {
        let mut f = f.clone();
        f.sort();
        for mask in 1u32..(1 << f.len()) {
            all.insert(f.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect::<Vec<_>>());
        }
    }
    let top = all.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut by_dim = vec![Vec::new(); top];
    for s in all {
        by_dim[s.len() - 1].push(s);
    }
    by_dim
}

/// Rational Betti numbers `b_0, …, b_dim`.
pub fn betti(facets: &[Vec<i64>]) -> Vec<usize> {
    let by_dim = faces(facets);
    let mut ranks = vec![0usize; by_dim.len() + 1];
    for d in 1..by_dim.len() {
        let index: BTreeMap<&Vec<i64>, usize> = by_dim[d - 1].iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut m = vec![vec![BigRational::zero(); by_dim[d].len()]; by_dim[d - 1].len()];
        for (c, s) in by_dim[d].iter().enumerate() {
            for skip in 0..s.len() {
                let mut f = s.clone();
                f.remove(skip);
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                m[index[&f]][c] = BigRational::from_integer(sign.into());
            }
        }
        ranks[d] = rank(m);
    }
    (0..by_dim.len()).map(|d| by_dim[d].len() - ranks[d] - ranks[d + 1]).collect()
}

/// Facets of the link of `v`.
pub fn link(facets: &[Vec<i64>], v: i64) -> Facets {
    facets
        .iter()
        .filter(|f| f.contains(&v))
        .map(|f| f.iter().copied().filter(|&x| x != v).collect())
        .collect()
}

/// Vertex sets of the connected components.
pub fn components(facets: &[Vec<i64>]) -> Vec<BTreeSet<i64>> {
    let mut comps: Vec<BTreeSet<i64>> = Vec::new();
    for f in facets {
        let set: BTreeSet<i64> = f.iter().copied().collect();
        let (touching, rest): (Vec<_>, Vec<_>) = comps.into_iter().partition(|c| !c.is_disjoint(&set));
        let mut merged = set;
        for c in touching {
            merged.extend(c);
        }
        comps = rest;
        comps.push(merged);
    }
    comps
}

/// Splits `v` into one new vertex per component of its link.
pub fn normalize_at(facets: &[Vec<i64>], v: i64) -> Facets {
    let comps = components(&link(facets, v));
    let fresh = facets.iter().flatten().copied().max().unwrap_or(0) + 1;
    facets
        .iter()
        .map(|f| {
            if !f.contains(&v) {
                return f.clone();
            }
            let other = f.iter().find(|&&x| x != v).copied().unwrap();
            let which = comps.iter().position(|c| c.contains(&other)).unwrap() as i64;
            f.iter().map(|&x| if x == v { fresh + which } else { x }).collect()
        })
        .collect()
}

/// IC hypercohomology of the suspension of a closed `(2n−1)`-dimensional
/// homology manifold `Y`, stratified by the two cone points, by Mayer–Vietoris
/// over the two cones with stalks `τ_{≤−1}(RΓ(Y)[n])` at the apexes.
pub fn suspension_ic(betti_y: &[usize], n: i32) -> BTreeMap<i32, usize> {
    let b = |i: i32| if i < 0 { 0 } else { betti_y.get(i as usize).copied().unwrap_or(0) };
    (-n..=n).map(|a| (a, if a <= -1 { b(a + n) } else if a == 0 { 0 } else { b(a + n - 1) })).collect()
}

/// Cohomology of a space with Betti numbers `b`, placed from degree `-shift`.
pub fn shifted(b: &[usize], shift: i32) -> BTreeMap<i32, usize> {
    b.iter().enumerate().map(|(i, &d)| (i as i32 - shift, d)).collect()
}

pub fn add(a: &BTreeMap<i32, usize>, b: &BTreeMap<i32, usize>) -> BTreeMap<i32, usize> {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_default() += v;
    }
    out
}

/// Drops zero entries so tables compare regardless of padding.
pub fn nonzero(t: &BTreeMap<i32, usize>) -> BTreeMap<i32, usize> {
    t.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
}
