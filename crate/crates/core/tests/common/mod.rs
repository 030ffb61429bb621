//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use szkit::exact_field::ExactMatrix;
use szkit::{ConvexBody, QuadExt, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> QuadExt {
    QuadExt::rational(Rational::new(num.into(), den.into()))
}

fn has_rank(vs: &[Vec<QuadExt>], r: usize) -> bool {
    ExactMatrix::from_rows(vs.to_vec()).unwrap().rank() == r
}

/// `ℓ` independent nonnegative rational generators in `Qⁿ` with numerators
/// up to `max_entry` and denominators up to `max_den`.
pub fn random_generators(rng: &mut ChaCha8Rng, n: usize, ell: usize, max_entry: i64, max_den: i64) -> Vec<Vec<QuadExt>> {
    loop {
        let gens: Vec<Vec<QuadExt>> = (0..ell)
            .map(|_| (0..n).map(|_| q(rng.gen_range(0..=max_entry), rng.gen_range(1..=max_den))).collect())
            .collect();
        if has_rank(&gens, ell) {
            return gens;
        }
    }
}

/// `conv{0, g₁, …, g_ℓ}` plus, sometimes, the sum of the first two generators.
pub fn random_rational_body(rng: &mut ChaCha8Rng, n: usize, ell: usize, max_entry: i64, max_den: i64) -> ConvexBody {
    let gens = random_generators(rng, n, ell, max_entry, max_den);
    let mut verts = vec![vec![QuadExt::zero(); n]];
    if ell >= 2 && rng.gen_bool(0.5) {
        verts.push(gens[0].iter().zip(&gens[1]).map(|(a, b)| a + b).collect());
    }
    verts.extend(gens);
    ConvexBody::new(n, 2, verts).unwrap()
}

/// Modulus log-uniform in `[e^{-r}, e^{r}]`, uniform phase.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(-r..=r).exp(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}

pub fn random_coefficient(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Vec<Vec<BigInt>> {
    (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect()
}

pub fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm())
}
