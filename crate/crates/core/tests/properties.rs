//! Property tests for the structural invariants, over the bundled spaces and
//! seeded refinements of their stratifications.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use icsheaf::axioms::{check_ax1, check_ax2};
use icsheaf::deligne::check_decomposition;
use icsheaf::linalg::SparseMatrix;
use icsheaf::report::sample_simplices;
use icsheaf::simplicial::{minus, union};
use icsheaf::stratify::verify_lemmas;
use icsheaf::{
    build_ic, demos, BuildOptions, DimTable, Fp, ICBundle, LocalSystem, Rational, SheafComplex, SimplexSet,
    SimplicialComplex, Stratification,
};
use proptest::prelude::*;

type Q = Rational;

struct Fixture {
    cx: Arc<SimplicialComplex>,
    strat: Stratification,
    bundle: ICBundle<Q>,
}

fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        demos::NAMES
            .iter()
            .map(|name| {
                let (cx, strat) = demos::load(name).unwrap();
                let local = LocalSystem::constant(&cx, &strat.open_strata().unwrap());
                let bundle = build_ic(&strat, &local, BuildOptions::default()).unwrap();
                Fixture { cx, strat, bundle }
            })
            .collect()
    })
}

fn nz(t: &DimTable) -> DimTable {
    t.iter().filter(|(_, &h)| h > 0).map(|(&a, &h)| (a, h)).collect()
}

fn h(t: &DimTable, a: i32) -> usize {
    t.get(&a).copied().unwrap_or(0)
}

fn euler(t: &DimTable) -> i64 {
    t.iter().map(|(&a, &d)| if a.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// The summands of an injective complex supported in a closed set `z`:
/// `i^! S` on `z`, read off the representation directly.
fn supported_in(s: &SheafComplex<Q>, z: &SimplexSet) -> SheafComplex<Q> {
    if s.is_zero() {
        return SheafComplex::zero(s.complex().clone(), z.clone());
    }
    let keep: Vec<Vec<usize>> = (s.lo()..=s.hi())
        .map(|q| (0..s.term(q).len()).filter(|&i| z.contains(&s.term(q)[i])).collect())
        .collect();
    let supports = keep
        .iter()
        .enumerate()
        .map(|(i, k)| k.iter().map(|&j| s.term(s.lo() + i as i32)[j]).collect())
        .collect();
    let diffs = (0..keep.len() - 1)
        .map(|i| {
            let d = s.diff(s.lo() + i as i32).unwrap();
            let dense: Vec<Vec<Q>> = keep[i + 1].iter().map(|&r| keep[i].iter().map(|&c| d.get(r, c)).collect()).collect();
            SparseMatrix::from_dense(keep[i + 1].len(), keep[i].len(), &dense)
        })
        .collect();
    SheafComplex::from_parts(s.complex().clone(), z.clone(), s.lo(), supports, diffs).unwrap()
}

fn random_closed(cx: &SimplicialComplex, space: &SimplexSet, seed: u64, k: usize) -> SimplexSet {
    cx.down_closure(&sample_simplices(space, k, seed))
}

fn space_index() -> impl Strategy<Value = usize> {
    0..demos::NAMES.len()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn alexandrov_calculus(i in space_index(), seed in any::<u64>(), k in 1usize..6) {
        let cx = &fixtures()[i].cx;
        let all = cx.all();
        let picked = sample_simplices(&all, k, seed);
        let down = cx.down_closure(&picked);
        let up = cx.up_closure(&picked);
        prop_assert!(cx.is_down_closed(&down, None));
        prop_assert_eq!(cx.down_closure(&down), down.clone());
        prop_assert!(cx.is_up_closed(&up, None));
        prop_assert_eq!(cx.up_closure(&up), up.clone());
        prop_assert!(cx.is_up_closed(&minus(&all, &down), None));
        prop_assert!(cx.is_down_closed(&minus(&all, &up), None));
        for &s in &picked {
            let star = cx.open_star(s).unwrap();
            prop_assert!(cx.is_up_closed(&star, None));
        }
        // maximality of components: no two are joined by a face relation
        let comps = cx.components_of(&down);
        prop_assert_eq!(comps.iter().map(|c| c.len()).sum::<usize>(), down.len());
        for (x, a) in comps.iter().enumerate() {
            for b in &comps[x + 1..] {
                prop_assert_eq!(cx.components_of(&union(a, b)).len(), 2);
            }
        }
    }

    #[test]
    fn incidence_signs_cancel(i in space_index(), seed in any::<u64>()) {
        let cx = &fixtures()[i].cx;
        for tau in sample_simplices(&cx.all(), 30, seed) {
            let mut paths: HashMap<usize, i32> = HashMap::new();
            for &(mid, s1) in cx.facets(tau) {
                for &(low, s2) in cx.facets(mid) {
                    *paths.entry(low).or_default() += (s1 * s2) as i32;
                }
            }
            prop_assert!(paths.values().all(|&v| v == 0));
        }
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>()) {
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 33) % 5) as i64 - 2
        };
        let dense: Vec<Vec<Q>> = (0..rows).map(|_| (0..cols).map(|_| Q::from_integer(next().into())).collect()).collect();
        let m = SparseMatrix::from_dense(rows, cols, &dense);
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).is_empty());
        }
        let mp = SparseMatrix::from_dense(rows, cols, &dense.iter().map(|r| r.iter().map(|q| {
            let n: i64 = (q.numer() % 7i64).try_into().unwrap();
            Fp::<7>::new(n)
        }).collect()).collect::<Vec<Vec<_>>>());
        prop_assert_eq!(mp.rank() + mp.kernel().len(), cols);
    }

    #[test]
    fn filtration_identities_on_refinements(i in space_index(), seed in any::<u64>()) {
        let f = &fixtures()[i];
        let fine = demos::random_refinement(&f.strat, seed).unwrap();
        prop_assert!(fine.refines(&f.strat).unwrap().holds);
        let filt = fine.open_filtration().unwrap();
        let r = verify_lemmas(&fine, &filt);
        prop_assert!(r.all_hold(), "{:?}", r);
        prop_assert_eq!(f.cx.down_closure(filt.u(1)), fine.space().clone());
    }

    #[test]
    fn truncation_contract(i in space_index(), seed in any::<u64>(), k in 1usize..4) {
        let f = &fixtures()[i];
        let x = f.strat.space();
        let z = random_closed(&f.cx, x, seed, k);
        let u = minus(x, &z);
        let s = f.bundle.ic().restrict_open(&u).unwrap().pushforward_open(x).unwrap();
        for a in s.lo() - 1..=s.hi() {
            let t = s.truncate_le(a);
            for &sigma in x {
                let want: DimTable = nz(&s.stalk_cohomology(sigma)).into_iter().filter(|&(b, _)| b <= a).collect();
                prop_assert_eq!(nz(&t.stalk_cohomology(sigma)), want);
            }
        }
    }

    #[test]
    fn adjunction_sequence_at_each_cell(i in space_index(), seed in any::<u64>(), k in 1usize..4) {
        let f = &fixtures()[i];
        let x = f.strat.space();
        let z = random_closed(&f.cx, x, seed, k);
        let u = minus(x, &z);
        let s = f.bundle.ic();
        let shriek = supported_in(s, &z);
        let push = s.restrict_open(&u).unwrap().pushforward_open(x).unwrap();
        for &sigma in &z {
            let (g, st, p) = (shriek.stalk_cohomology(sigma), s.stalk_cohomology(sigma), push.stalk_cohomology(sigma));
            prop_assert_eq!(euler(&g) - euler(&st) + euler(&p), 0);
            for a in s.lo() - 2..=s.hi() + 2 {
                // exactness of … → H^a(Γ_Z) → H^a(S) → H^a(Rj_*j^*S) → H^{a+1}(Γ_Z) → …
                prop_assert!(h(&st, a) <= h(&g, a) + h(&p, a));
                prop_assert!(h(&p, a) <= h(&st, a) + h(&g, a + 1));
                prop_assert!(h(&g, a) <= h(&p, a - 1) + h(&st, a));
            }
        }
    }

    #[test]
    fn attaching_forms_agree(i in space_index(), seed in any::<u64>()) {
        // costalk at a point of the (n−k)-stratum part is the stalk of i_k^! shifted by its real dimension
        let f = &fixtures()[i];
        let n = f.strat.n();
        let filt = f.bundle.filtration.clone();
        for k in 1..=n {
            let uk1 = filt.u(k + 1);
            let z = minus(uk1, filt.u(k));
            if z.is_empty() {
                continue;
            }
            let s = f.bundle.ic().restrict_open(uk1).unwrap();
            let shriek = supported_in(&s, &z);
            let shift = 2 * (n - k) as i32;
            for sigma in sample_simplices(&z, 6, seed) {
                let via_stratum: DimTable = nz(&shriek.stalk_cohomology(sigma)).into_iter().map(|(a, d)| (a + shift, d)).collect();
                prop_assert_eq!(nz(&s.cell_costalk(sigma)), via_stratum.clone());
                prop_assert!(via_stratum.keys().all(|&a| a > (n - k) as i32));
                prop_assert!(nz(&shriek.stalk_cohomology(sigma)).keys().all(|&a| a > k as i32 - n as i32));
            }
        }
    }

    #[test]
    fn refinements_keep_the_construction_invariants(i in space_index(), seed in any::<u64>()) {
        let f = &fixtures()[i];
        let fine = demos::random_refinement(&f.strat, seed).unwrap();
        let local = f.bundle.local.restrict_to(&fine.open_strata().unwrap()).unwrap();
        let b = build_ic(&fine, &local, BuildOptions::default()).unwrap();
        prop_assert!(b.checks.all_hold(), "{:?}", b.checks);
        prop_assert!(b.ic().is_clc(&fine));
        prop_assert!(check_decomposition(&b).unwrap().equal);
        let n = fine.n();
        let stalks = b.ic().stalk_table();
        for k in 1..=n {
            let cut = k as i32 - 1 - n as i32;
            for sigma in b.filtration.w(k + 1) {
                prop_assert!(stalks[sigma].range(cut + 1..).all(|(_, &d)| d == 0));
            }
            let restricted = b.stages[k].restrict_open(b.filtration.u(k)).unwrap();
            prop_assert_eq!(restricted.stalk_table(), b.stages[k - 1].stalk_table());
        }
        prop_assert_eq!(stalks, f.bundle.ic().stalk_table());
    }

    #[test]
    fn direct_sums_add(i in space_index(), j in space_index(), shift in -2i32..3) {
        let f = &fixtures()[i];
        let a = f.bundle.ic();
        let b = SheafComplex::<Q>::constant(f.cx.clone(), f.strat.space().clone(), 1, 0).shift(shift);
        let _ = j;
        let sum = a.direct_sum(&b).unwrap();
        let (ha, hb, hs) = (a.hypercohomology(None).unwrap(), b.hypercohomology(None).unwrap(), sum.hypercohomology(None).unwrap());
        for d in -6..=6 {
            prop_assert_eq!(h(&hs, d), h(&ha, d) + h(&hb, d));
        }
        let sigma = *sample_simplices(f.strat.space(), 1, shift as u64).iter().next().unwrap();
        let (sa, sb, ss) = (a.stalk_cohomology(sigma), b.stalk_cohomology(sigma), sum.stalk_cohomology(sigma));
        for d in -6..=6 {
            prop_assert_eq!(h(&ss, d), h(&sa, d) + h(&sb, d));
        }
    }

    #[test]
    fn witnesses_recheck_from_scratch(i in space_index(), shift in -1i32..=1, naive in any::<bool>()) {
        let f = &fixtures()[i];
        let opts = BuildOptions { naive, cutoff_shift: shift, ..BuildOptions::default() };
        let s = build_ic(&f.strat, &f.bundle.local, opts).unwrap().into_ic();
        prop_assume!(s.is_clc(&f.strat));
        let ids: BTreeMap<String, usize> = f.cx.all().into_iter().map(|t| (f.cx.name(t), t)).collect();
        let r2 = check_ax2(&s, &f.strat, None).unwrap();
        prop_assert_eq!(r2.pass, check_ax1(&s, &f.strat).unwrap().pass);
        prop_assert_eq!(r2.pass, r2.witnesses.is_empty());
        let stalks = s.stalk_table();
        for w in &r2.witnesses {
            let locus: Vec<usize> = w.locus.iter().map(|n| ids[n]).collect();
            let real = locus.iter().map(|&t| f.cx.dim_of(t)).max().unwrap();
            prop_assert_eq!(Some(real), w.real_dim);
            let c = (real / 2) as i32;
            match w.clause.as_str() {
                "b" => {
                    prop_assert!(c >= -w.degree);
                    prop_assert!(locus.iter().all(|t| h(&stalks[t], w.degree) > 0));
                }
                "c" => {
                    prop_assert!(c >= w.degree);
                    prop_assert!(locus.iter().all(|&t| h(&s.cell_costalk(t), w.degree) > 0));
                }
                other => prop_assert!(other == "a"),
            }
        }
    }
}

#[test]
fn constant_costalks_on_closed_manifolds() {
    // ∂Δ⁵, the 4-sphere of the wedge, as a standalone complex
    let cx = Arc::new(fixtures()[0].cx.subcomplex(&fixtures()[0].strat.complex().down_closure(&fixtures()[0].strat.open_part(2))).unwrap());
    let s = SheafComplex::<Q>::constant(cx.clone(), cx.all(), 1, 0);
    for sigma in cx.all() {
        assert_eq!(nz(&s.cell_costalk(sigma)), DimTable::from([(4, 1)]), "{}", cx.name(sigma));
    }
}
