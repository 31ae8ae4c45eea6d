use horosphere::circulant::CirculantGraph;
use horosphere::experiments::{psi_samples, torus_character_average};
use horosphere::hecke::gamma0_member;
use horosphere::lattices::{covering_radius_l1, dist_l1, sublattice_from_residue, unimodular_from_residue, SublatticeBasis};
use horosphere::numtheory::{
    ext_gcd, factorize, kloosterman, ramanujan_sum, rq_exceeds_zeta_bound, ExpSumTable,
};
use horosphere::residues::{
    complete_to_sl, coset_label, count_coset_solutions, sample_rq, ResidueVector,
};
use horosphere::{hermite_normal_form, IntMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn kloosterman_symmetry_and_ramanujan_exhaustive() {
    for q in 1..=80u64 {
        let fq = factorize(q).unwrap();
        let t = ExpSumTable::new(q).unwrap();
        for a in 0..q as i64 {
            for b in 0..q as i64 {
                let s = t.kloosterman(a, b);
                let r = t.kloosterman(b, a);
                assert!((s.re - r.re).abs() <= 2.0 * s.abs_err && (s.im - r.im).abs() <= 2.0 * s.abs_err);
                if a == 0 {
                    assert!((s.re - ramanujan_sum(b, &fq) as f64).abs() <= s.abs_err, "q={q} b={b}");
                }
                let w = horosphere::numtheory::weil_report(s, a, b, &fq);
                assert!(w.holds, "q={q} a={a} b={b}");
            }
        }
    }
}

#[test]
fn rq_zeta_lower_bound() {
    for q in 1..=10_000u64 {
        let fq = factorize(q).unwrap();
        for d in [2usize, 3] {
            assert_eq!(rq_exceeds_zeta_bound(&fq, d), Some(true), "q={q} d={d}");
        }
    }
}

/// Generators of `Gamma_{0,d}(q)`: elementary matrices off the last row,
/// `q`-multiples in the last row, and a unit block in the bottom corner.
fn gamma0_generators(q: u64, d: usize) -> Vec<IntMatrix> {
    let mut out = Vec::new();
    let m = q as i128;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let mut e = IntMatrix::identity(d).to_rows();
            e[i][j] = if i == d - 1 { m } else { 1 };
            out.push(IntMatrix::from_rows(&e).unwrap());
        }
    }
    if d >= 2 {
        for u in 2..m.max(2) {
            let (g, x, y) = ext_gcd(u, m);
            if g != 1 {
                continue;
            }
            let mut e = IntMatrix::identity(d).to_rows();
            e[d - 2][d - 2] = x;
            e[d - 2][d - 1] = -y;
            e[d - 1][d - 2] = m;
            e[d - 1][d - 1] = u;
            out.push(IntMatrix::from_rows(&e).unwrap());
            break;
        }
    }
    out
}

#[test]
fn coset_label_is_gamma0_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let q = rng.gen_range(2..=30u64);
        let d = rng.gen_range(2..=3usize);
        let v: Vec<i128> = loop {
            let v: Vec<i128> = (0..d).map(|_| rng.gen_range(-20..=20)).collect();
            if horosphere::numtheory::gcd_slice(&v) == 1 {
                break v;
            }
        };
        let gamma = complete_to_sl(&v).unwrap();
        let label = coset_label(&gamma, q).unwrap();
        for tau in gamma0_generators(q, d) {
            assert!(gamma0_member(&tau, q).unwrap());
            assert_eq!(coset_label(&(&tau * &gamma), q).unwrap(), label);
        }
    }
}

#[test]
fn coset_solutions_within_bound() {
    let cases: Vec<(u64, usize)> = (1..=8).map(|q| (q, 2)).chain([(2, 3), (3, 3)]).collect();
    for (q, d) in cases {
        let divisors = factorize(q).unwrap().divisors();
        let side: Vec<i128> = (-3..=3).collect();
        let mut xs: Vec<Vec<i128>> = vec![vec![]];
        for _ in 0..d {
            xs = xs.into_iter().flat_map(|x| side.iter().map(move |&c| [x.clone(), vec![c]].concat())).collect();
        }
        for x in xs.iter().filter(|x| x.iter().any(|&c| c != 0)) {
            for &ell in &divisors {
                let c = count_coset_solutions(x, ell, q, d).unwrap();
                assert!(c.count <= c.bound, "q={q} d={d} ell={ell} x={x:?}: {c:?}");
            }
        }
    }
}

/// Max over an `n^d` grid of cell centres of the fundamental box, plus the
/// l1 radius of a grid cell.
fn grid_estimate(lat: &SublatticeBasis, n: usize) -> (f64, f64) {
    let pivots = lat.pivots();
    let d = lat.dim();
    let steps: Vec<f64> = pivots.iter().map(|&h| lat.scale() * h as f64 / n as f64).collect();
    let mut best = 0.0f64;
    let total = n.pow(d as u32);
    for idx in 0..total {
        let mut k = idx;
        let x: Vec<f64> = steps
            .iter()
            .map(|&s| {
                let c = k % n;
                k /= n;
                (c as f64 + 0.5) * s
            })
            .collect();
        best = best.max(dist_l1(lat, &x).unwrap());
    }
    (best, steps.iter().sum::<f64>() / 2.0)
}

#[test]
fn covering_interval_contains_grid_estimate() {
    for seed in 0..8 {
        let q = 20 + 7 * seed;
        let a = sample_rq(q, 2, seed).unwrap();
        let lat = unimodular_from_residue(&a).unwrap();
        let r = covering_radius_l1(&lat, 1e-3).unwrap();
        let (grid, slack) = grid_estimate(&lat, 200);
        assert!(grid <= r.hi + 1e-12, "grid {grid} above {r:?}");
        assert!(r.lo <= grid + slack + 1e-12, "grid {grid} too far below {r:?}");
    }
}

#[test]
fn psi_samples_ignore_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| psi_samples(211, 3, 64, 5, 1e-3).unwrap())
    };
    assert_eq!(run(1), run(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kloosterman_matches_table(q in 1u64..500, a in -1000i64..1000, b in -1000i64..1000) {
        let s = kloosterman(a, b, q).unwrap();
        let t = ExpSumTable::new(q).unwrap().kloosterman(a, b);
        prop_assert!((s.re - t.re).abs() <= s.abs_err + t.abs_err);
        prop_assert!((s.im - t.im).abs() <= s.abs_err + t.abs_err);
        let r = kloosterman(b, a, q).unwrap();
        prop_assert!((s.re - r.re).abs() <= 2.0 * s.abs_err);
    }

    #[test]
    fn kernel_hnf_is_row_order_independent(q in 2u64..400, d in 1usize..4, seed in any::<u64>(), rot in 0usize..4) {
        let a = sample_rq(q, d, seed).unwrap();
        let lat = sublattice_from_residue(&a).unwrap();
        prop_assert_eq!(lat.index(), q as i128);
        prop_assert_eq!(lat.basis().det().unwrap().abs(), q as i128);
        let mut rows = lat.basis().to_rows();
        rows.rotate_left(rot % d);
        rows.reverse();
        let again = hermite_normal_form(&IntMatrix::from_rows(&rows).unwrap()).unwrap();
        prop_assert_eq!(&again, lat.basis());
    }

    #[test]
    fn covering_radius_is_homogeneous(q in 2u64..300, d in 1usize..4, seed in any::<u64>(), c in 0.5f64..2.0) {
        let eps = 1e-3;
        let a = sample_rq(q, d, seed).unwrap();
        let lat = unimodular_from_residue(&a).unwrap();
        let base = covering_radius_l1(&lat, eps).unwrap();
        let scaled = covering_radius_l1(&lat.with_scale(lat.scale() * c).unwrap(), eps).unwrap();
        prop_assert!((scaled.midpoint() - c * base.midpoint()).abs() <= 2.0 * eps);
    }

    #[test]
    fn torus_average_bounded(q in 1u64..3000, n in prop::collection::vec(-5000i64..5000, 1..4)) {
        let e = torus_character_average(q, &n).unwrap();
        prop_assert!(e.abs() <= 1.0 + 1e-15);
        let trivial = n.iter().all(|&x| x.rem_euclid(q as i64) == 0);
        prop_assert_eq!(e.re == 1.0, trivial);
    }

    #[test]
    fn diameter_bounded_by_sandwich(q in 2u64..500, seed in any::<u64>()) {
        let a = sample_rq(q, 2, seed).unwrap();
        let r = horosphere::circulant::check_sandwich(&a, 1e-3).unwrap();
        prop_assert!(r.ok, "{:?}", r);
        let g = CirculantGraph::from_residue(&ResidueVector::new(q, &a.to_i128()).unwrap());
        prop_assert_eq!(g.diameter().unwrap(), r.diam);
    }
}
