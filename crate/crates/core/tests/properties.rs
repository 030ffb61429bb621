mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;
use szkit::exact_field::{exact_kernel, exact_rank, qext_sign, ExactMatrix};
use szkit::extremal::{kronecker_torus, lp_solve, IncrementalLp, LpProblem, LpStatus, SampleCloud};
use szkit::lattice_algebra::{parallelepiped_points, parallelepiped_points_by_box, parallelepiped_reduce};
use szkit::{
    construct_l, siciak_m, smith_normal_form, verify_map, ConvexBody, Execution, IntMatrix, QuadExt, Rational,
    SiciakOptions, SparsePolynomial, WeightSpec, WeightedSampleSet,
};

use common::*;

fn qext() -> impl Strategy<Value = QuadExt> {
    (-20i64..=20, 1i64..=5, -20i64..=20, 1i64..=5).prop_map(|(a, b, c, d)| {
        QuadExt::new(Rational::new(a.into(), b.into()), Rational::new(c.into(), d.into()), 2).unwrap()
    })
}

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![3 => (-4i64..=4).prop_map(QuadExt::from_int), 1 => qext()], r * c)
            .prop_map(move |data| ExactMatrix::new(r, c, data).unwrap())
    })
}

fn int_matrix(max: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c)
            .prop_map(move |d| IntMatrix::new(r, c, d.into_iter().map(BigInt::from).collect()).unwrap())
    })
}

fn body_from_seed(seed: u64, max_entry: i64, max_den: i64) -> ConvexBody {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=3);
    let ell = rng.gen_range(1..=n);
    random_rational_body(&mut rng, n, ell, max_entry, max_den)
}

fn low_dim_body(seed: u64) -> ConvexBody {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=4);
    let ell = rng.gen_range(1..n.min(4));
    random_rational_body(&mut rng, n, ell, 9, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quad_ext_field_laws(x in qext(), y in qext(), z in qext()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inv().unwrap(), QuadExt::one());
        }
        prop_assert!(matches!(qext_sign(&x) * qext_sign(&-&x), 0 | -1));
    }

    #[test]
    fn kernel_vectors_are_exact(m in small_matrix(4, 5)) {
        for v in exact_kernel(&m) {
            prop_assert!(m.mul_vec(&v).iter().all(QuadExt::is_zero));
        }
    }

    #[test]
    fn rank_of_transpose(m in small_matrix(6, 6)) {
        prop_assert_eq!(exact_rank(&m), exact_rank(&m.transpose()));
    }

    #[test]
    fn support_is_sublinear_and_homogeneous(
        seed in any::<u64>(),
        xi in prop::collection::vec(-5.0f64..5.0, 3),
        eta in prop::collection::vec(-5.0f64..5.0, 3),
        lambda in 0.0f64..10.0,
    ) {
        let s = body_from_seed(seed, 9, 3);
        let n = s.dim_ambient();
        let (xi, eta) = (&xi[..n], &eta[..n]);
        let sum: Vec<f64> = xi.iter().zip(eta).map(|(a, b)| a + b).collect();
        prop_assert!(s.support_value(&sum) <= s.support_value(xi) + s.support_value(eta) + 1e-12);
        let scaled: Vec<f64> = xi.iter().map(|a| lambda * a).collect();
        let (lhs, rhs) = (s.support_value(&scaled), lambda * s.support_value(xi));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE));
        prop_assert!(s.support_value(xi) >= 0.0);
        let torus: Vec<Complex64> = xi.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        prop_assert_eq!(s.log_support(&torus).unwrap(), 0.0);
    }

    #[test]
    fn lattice_points_are_graded(seed in any::<u64>(), m in 0u32..=3, m2 in 0u32..=2, k in 1u32..=3) {
        let s = body_from_seed(seed, 3, 2);
        let pm = s.lattice_points(m);
        let next = s.lattice_points(m + 1);
        prop_assert!(pm.points.contains(&vec![0; s.dim_ambient()]));
        prop_assert!(pm.points.iter().all(|a| next.contains(a)));
        let other = s.lattice_points(m2);
        let sum = s.lattice_points(m + m2);
        for a in &pm.points {
            for b in &other.points {
                let c: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                prop_assert!(sum.contains(&c));
            }
        }
        prop_assert_eq!(s.scaled(k).lattice_points(m).points, s.lattice_points(k * m).points);
        prop_assert!(s.is_rationally_dense().dense);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_reconstructs(a in int_matrix(4, 9)) {
        let r = smith_normal_form(&a);
        prop_assert!(r.u.det().abs().is_one() && r.v.det().abs().is_one());
        prop_assert_eq!(r.u.mul(&a).mul(&r.v), r.d.clone());
        let diag = r.diagonal();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                prop_assert!(i == j || r.d[(i, j)].is_zero());
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative() && !w[1].is_negative());
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            prop_assert!(divides);
        }
    }

    #[test]
    fn lattice_maps_certify(seed in any::<u64>()) {
        let s = low_dim_body(seed);
        let map = construct_l(&s).unwrap();
        let cert = verify_map(&map, &s);
        prop_assert!(cert.all_pass(), "{:?}", cert);
    }
}

fn nonsingular(ell: usize) -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, ell), ell)
        .prop_map(|g| g.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect::<Vec<Vec<BigInt>>>())
        .prop_filter("singular", |g| !IntMatrix::from_columns(g).unwrap().det().is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduction_shrinks_inside_the_cone(gens in (1usize..=3).prop_flat_map(nonsingular)) {
        let red = parallelepiped_reduce(&gens).unwrap();
        prop_assert!(red.abs_dets.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(red.abs_dets.last().unwrap().is_one());
        let cols: Vec<Vec<QuadExt>> = gens.iter().map(|g| g.iter().map(QuadExt::from).collect()).collect();
        let a = ExactMatrix::from_columns(&cols).unwrap();
        for v in &red.basis {
            let x: Vec<QuadExt> = v.iter().map(QuadExt::from).collect();
            let lambda = a.solve(&x).unwrap();
            prop_assert!(lambda.iter().all(|l| qext_sign(l) >= 0), "{:?} leaves the cone", v);
        }
    }

    #[test]
    fn parallelepiped_count_is_det(gens in (1usize..=3).prop_flat_map(nonsingular)) {
        let det = IntMatrix::from_columns(&gens).unwrap().det().abs();
        prop_assume!(det <= BigInt::from(30));
        let pts = parallelepiped_points(&gens).unwrap();
        prop_assert_eq!(BigInt::from(pts.len()), det);
        prop_assert_eq!(pts, parallelepiped_points_by_box(&gens).unwrap());
    }

    #[test]
    fn pullback_is_a_bijection_of_exponents(seed in any::<u64>(), m in 1u32..=2) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=3);
        let ell = 1 + usize::from(n == 3 && rng.gen_bool(0.5));
        let s = random_rational_body(&mut rng, n, ell, 3, 2);
        let map = construct_l(&s).unwrap();
        let t = s.preimage_body(&map).unwrap();
        let (ps, pt) = (s.lattice_points(m), t.lattice_points(m));
        prop_assert_eq!(ps.len(), pt.len());
        let images: BTreeSet<Vec<u32>> = pt
            .points
            .iter()
            .map(|b| map.map_exponent(b).iter().map(|&a| u32::try_from(a).unwrap()).collect())
            .collect();
        prop_assert_eq!(images, ps.points.into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn products_stay_graded(seed in any::<u64>(), m in 0u32..=2, m2 in 0u32..=2) {
        let mut rng = rng(seed);
        let s = Arc::new(body_from_seed(seed, 3, 2));
        let mut poly = |deg: u32| {
            let pts = s.lattice_points(deg).points;
            let mut terms = Vec::new();
            for a in pts {
                if rng.gen_bool(0.6) {
                    terms.push((a, random_coefficient(&mut rng)));
                }
            }
            SparsePolynomial::new(s.clone(), deg, terms).unwrap()
        };
        let (p, q) = (poly(m), poly(m2));
        let pq = p.multiply(&q).unwrap();
        prop_assert_eq!(pq.degree(), m + m2);
        let graded = s.lattice_points(m + m2);
        prop_assert!(pq.terms().keys().all(|a| graded.contains(a)));
    }

    #[test]
    fn evaluation_is_bounded_by_support(seed in any::<u64>(), m in 1u32..=3) {
        let mut rng = rng(seed);
        let s = Arc::new(body_from_seed(seed, 3, 2));
        let n = s.dim_ambient();
        let pts = s.lattice_points(m).points;
        let count = pts.len();
        let p = SparsePolynomial::new(s.clone(), m, pts.into_iter().map(|a| (a, random_coefficient(&mut rng)))).unwrap();
        // a grid finer than the degree in every variable sees every coefficient
        let top = s.vertices_f64().iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        let per_axis = (f64::from(m) * top).floor() as usize + 1;
        let grid = WeightedSampleSet::torus(n, per_axis, WeightSpec::Constant(0.0)).unwrap();
        let norm = p.weighted_sup_norm(grid.cloud());
        let z: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(rng.gen_range(0.0f64..3.0).exp(), rng.gen_range(0.0..6.0))).collect();
        let lhs = (p.evaluate(&z).norm() / norm).ln() / f64::from(m);
        let rhs = s.log_support(&z).unwrap() + (count as f64).ln() / f64::from(m);
        prop_assert!(lhs <= rhs + 1e-9, "{} > {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_weight_shift(seed in any::<u64>(), c in -2.0f64..2.0, m in 1u32..=3) {
        let mut rng = rng(seed);
        let ell = rng.gen_range(1..=2);
        let s = Arc::new(random_rational_body(&mut rng, 2, ell, 2, 1));
        let k = kronecker_torus(2, 64, 128, 0.0).unwrap();
        let z = random_point(&mut rng, 2, 1.5);
        let opts = SiciakOptions::default();
        let a = siciak_m(&s, &k, m, &z, &opts).unwrap();
        let b = siciak_m(&s, &k.with_weight_shift(c), m, &z, &opts).unwrap();
        prop_assert!((b.log_phi_raw - a.log_phi_raw - c).abs() <= 1e-6);
        prop_assert!((b.log_phi_certified - a.log_phi_certified - c).abs() <= 1e-6);
    }

    #[test]
    fn certified_optimizer_is_normalized(seed in any::<u64>(), m in 1u32..=3) {
        let mut rng = rng(seed);
        let ell = rng.gen_range(1..=2);
        let s = Arc::new(random_rational_body(&mut rng, 2, ell, 2, 1));
        let pts = kronecker_torus(2, 48, 48, 0.0).unwrap().cloud().points.clone();
        let weights: Vec<f64> = (0..48).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let k = WeightedSampleSet::explicit(pts, weights).unwrap();
        let z = random_point(&mut rng, 2, 1.5);
        let r = siciak_m(&s, &k, m, &z, &SiciakOptions::default()).unwrap();
        let cert: &SampleCloud = k.certification_cloud();
        prop_assert!(r.optimizer.weighted_sup_norm(cert) <= 1.0 + 1e-12);
        prop_assert!(r.log_phi_certified <= r.log_phi_raw);
    }

    #[test]
    fn execution_modes_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let s = Arc::new(random_rational_body(&mut rng, 2, 2, 2, 1));
        let k = kronecker_torus(2, 64, 128, 0.0).unwrap();
        let z = random_point(&mut rng, 2, 1.0);
        let seq = SiciakOptions { exec: Execution::Sequential, ..SiciakOptions::default() };
        let a = siciak_m(&s, &k, 2, &z, &seq).unwrap();
        let b = siciak_m(&s, &k, 2, &z, &SiciakOptions::default()).unwrap();
        prop_assert_eq!(a.log_phi_raw, b.log_phi_raw);
        prop_assert_eq!(a.log_phi_certified, b.log_phi_certified);
    }

    #[test]
    fn incremental_lp_matches_fresh(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=6);
        let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut inc = IncrementalLp::new(objective.clone(), Execution::Sequential);
        for _ in 0..6 {
            for _ in 0..rng.gen_range(1..=8) {
                let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                inc.add_constraint(&row, rng.gen_range(0.5..2.0));
            }
            let a = inc.solve().unwrap();
            let b = lp_solve(inc.problem()).unwrap();
            prop_assert_eq!(a.status, b.status);
            if a.status == LpStatus::Optimal {
                prop_assert!((a.objective - b.objective).abs() <= 1e-9 * b.objective.abs().max(1.0));
            }
        }
        let fresh: LpProblem = inc.problem().clone();
        prop_assert_eq!(fresh.num_constraints(), inc.problem().num_constraints());
    }
}
