//! Monomial maps `F_L(z) = (z^{η₁}, …, z^{η_ℓ})` and what they do to
//! polynomials, weights and fibers.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::convex_body::ConvexBody;
use crate::error::{Error, Result};
use crate::exact_field::ExactMatrix;
use crate::extremal::{SampleCloud, WeightedSampleSet};
use crate::lattice_algebra::{integer_kernel, IntMatrix};
use crate::sparse_poly::SparsePolynomial;

/// Relative per-coordinate tolerance for merging images in
/// [`LatticeMap::pushforward_weight`].
pub const IMAGE_MERGE_TOL: f64 = 1e-9;

/// An injective integer map `L: Rℓ → Rⁿ` (columns `η_k = L(e_k)`) together
/// with integer rows `η_{ℓ+1}, …, η_n` spanning the orthogonal complement of
/// its image. `B` is the `n × n` matrix with rows `η₁, …, η_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    eta: IntMatrix,
    kernel_rows: Vec<Vec<BigInt>>,
    b: IntMatrix,
    eta_rows: Vec<Vec<i64>>,
    b_rows: Vec<Vec<i64>>,
}

impl LatticeMap {
    /// Checks that the `η` columns are independent and orthogonal to the
    /// kernel rows, and that `B` is nonsingular.
    pub fn new(eta: IntMatrix, kernel_rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let (n, ell) = (eta.rows(), eta.cols());
        if ell > n {
            return Err(Error::InvalidLatticeMap(format!("{ell} columns in dimension {n}")));
        }
        if kernel_rows.len() != n - ell || kernel_rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLatticeMap(format!("need {} kernel rows of length {n}", n - ell)));
        }
        let cols = eta.columns();
        for (k, c) in cols.iter().enumerate() {
            for (j, r) in kernel_rows.iter().enumerate() {
                let dot: BigInt = c.iter().zip(r).map(|(a, b)| a * b).sum();
                if !dot.is_zero() {
                    return Err(Error::InvalidLatticeMap(format!("η_{} not orthogonal to kernel row {j}", k + 1)));
                }
            }
        }
        let mut rows = cols;
        rows.extend(kernel_rows.iter().cloned());
        let b = IntMatrix::from_rows(&rows)?;
        if b.det().is_zero() {
            return Err(Error::InvalidLatticeMap("η₁…η_n are linearly dependent".into()));
        }
        let b_rows = b
            .to_i64_rows()
            .ok_or_else(|| Error::InvalidLatticeMap("exponents do not fit in 64 bits".into()))?;
        let eta_rows = b_rows[..ell].to_vec();
        Ok(Self { eta, kernel_rows, b, eta_rows, b_rows })
    }

    /// Completes `η` with a Hermite-normalized integer basis of
    /// `(image L)^⊥ ∩ Zⁿ`.
    pub fn with_complement(eta: IntMatrix) -> Result<Self> {
        let kernel_rows = match integer_kernel(&eta.transpose()) {
            Some(k) => k.columns(),
            None => Vec::new(),
        };
        Self::new(eta, kernel_rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(IntMatrix::identity(n), Vec::new()).expect("identity is a lattice map")
    }

    pub fn n(&self) -> usize {
        self.eta.rows()
    }

    pub fn ell(&self) -> usize {
        self.eta.cols()
    }

    /// The `n × ℓ` matrix of `L`.
    pub fn eta(&self) -> &IntMatrix {
        &self.eta
    }

    pub fn eta_exact(&self) -> ExactMatrix {
        self.eta.to_exact()
    }

    pub fn kernel_rows(&self) -> &[Vec<BigInt>] {
        &self.kernel_rows
    }

    pub fn b_matrix(&self) -> &IntMatrix {
        &self.b
    }

    /// `L(β) = Σ β_k η_k`.
    pub fn map_exponent(&self, beta: &[u32]) -> Vec<i64> {
        assert_eq!(beta.len(), self.ell(), "exponent has wrong length");
        (0..self.n())
            .map(|j| self.eta_rows.iter().zip(beta).map(|(eta, &b)| eta[j] * i64::from(b)).sum())
            .collect()
    }

    /// `F_L(z)_k = Π_j z_j^{η_{k,j}}`.
    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        check_torus(z, self.n())?;
        Ok(self.eta_rows.iter().map(|eta| monomial_signed(z, eta)).collect())
    }

    /// `F_L^* p`, sending the coefficient of `w^β` to `z^{L(β)}`. The result is
    /// graded by `target` in the same degree.
    pub fn pullback_poly(&self, p: &SparsePolynomial, target: &Arc<ConvexBody>) -> Result<SparsePolynomial> {
        if p.n() != self.ell() {
            return Err(Error::DimensionMismatch { expected: self.ell(), got: p.n() });
        }
        if target.dim_ambient() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: target.dim_ambient() });
        }
        let mut terms = BTreeMap::new();
        for (beta, c) in p.terms() {
            let alpha = self.map_exponent(beta);
            if alpha.iter().any(|&a| a < 0) {
                return Err(Error::NegativeExponent(alpha));
            }
            let alpha: Vec<u32> = alpha
                .iter()
                .map(|&a| u32::try_from(a).map_err(|_| Error::NegativeExponent(alpha.clone())))
                .collect::<Result<_>>()?;
            terms.insert(alpha, *c);
        }
        Ok(SparsePolynomial::from_trusted(target.clone(), p.degree(), terms))
    }

    /// Discrete `F_*q`: images of the samples, merged when they coincide up to
    /// [`IMAGE_MERGE_TOL`], each carrying the smallest weight of its fiber.
    /// The certification cloud is pushed forward the same way.
    pub fn pushforward_weight(&self, samples: &WeightedSampleSet) -> Result<WeightedSampleSet> {
        let cloud = self.pushforward_cloud(samples.cloud())?;
        let cert = self.pushforward_cloud(samples.certification_cloud())?;
        WeightedSampleSet::explicit(cloud.points, cloud.weights)?.with_certification(cert)
    }

    fn pushforward_cloud(&self, cloud: &SampleCloud) -> Result<SampleCloud> {
        let images: Vec<Vec<Complex64>> = cloud.points.iter().map(|z| self.apply(z)).collect::<Result<_>>()?;
        let groups = group_images(&images);
        let points = groups.iter().map(|g| images[g[0]].clone()).collect();
        let weights = groups
            .iter()
            .map(|g| g.iter().map(|&i| cloud.weights[i]).fold(f64::INFINITY, f64::min))
            .collect();
        SampleCloud::new(points, weights)
    }

    /// A point `z` with `F_L(z) = w`: `z = exp(c)` for the minimal-norm
    /// solution `c` of `A c = Log w`, `A` having rows `η₁…η_ℓ`.
    pub fn solve_preimage(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        check_torus(w, self.ell())?;
        let (n, ell) = (self.n(), self.ell());
        // Aᵀ = QR, c = Q R⁻ᵀ b
        let at = DMatrix::from_fn(n, ell, |j, k| self.eta_rows[k][j] as f64);
        let qr = at.qr();
        let (q, r) = (qr.q(), qr.r());
        let rt = r.transpose();
        let solve = |b: Vec<f64>| -> Vec<f64> {
            let y = rt
                .solve_lower_triangular(&nalgebra::DVector::from_vec(b))
                .expect("A has full row rank");
            (&q * y).iter().copied().collect()
        };
        let logs: Vec<Complex64> = w.iter().map(|x| x.ln()).collect();
        let re = solve(logs.iter().map(|l| l.re).collect());
        let im = solve(logs.iter().map(|l| l.im).collect());
        Ok(re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b).exp()).collect())
    }

    /// `Υ_z(t'') = (z_1 t^{B_1}, …, z_n t^{B_n})` with `t = (1,…,1, t'')`:
    /// a point on the fiber of `F_L` through `z`.
    pub fn fiber_point(&self, z: &[Complex64], t_pp: &[Complex64]) -> Result<Vec<Complex64>> {
        check_torus(z, self.n())?;
        check_torus(t_pp, self.n() - self.ell())?;
        let ell = self.ell();
        Ok((0..self.n())
            .map(|j| {
                let factors = t_pp.iter().zip(&self.b_rows[ell..]).map(|(t, row)| (*t, row[j]));
                power_product(std::iter::once((z[j], 1)).chain(factors))
            })
            .collect())
    }
}

fn check_torus(z: &[Complex64], n: usize) -> Result<()> {
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    match z.iter().position(|c| c.re == 0.0 && c.im == 0.0) {
        Some(j) => Err(Error::ZeroCoordinate(j)),
        None => Ok(()),
    }
}

/// `z^e` for a signed integer exponent, by repeated squaring.
pub fn pow_signed(z: Complex64, e: i64) -> Complex64 {
    let mut base = if e < 0 { z.inv() } else { z };
    let mut k = e.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

fn monomial_signed(z: &[Complex64], e: &[i64]) -> Complex64 {
    power_product(z.iter().copied().zip(e.iter().copied()))
}

/// `Π z_j^{k_j}`. Repeated squaring while every partial product stays within
/// `e^{±600}`; past that, through `exp(Σ k_j Log z_j)` so that huge and tiny
/// factors cancel instead of overflowing.
pub(crate) fn power_product<I>(factors: I) -> Complex64
where
    I: Iterator<Item = (Complex64, i64)> + Clone,
{
    let mut span = 0.0;
    for (z, k) in factors.clone() {
        if k == 0 {
            continue;
        }
        if k > 0 && z.re == 0.0 && z.im == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        span += (k as f64 * z.norm().ln()).abs();
    }
    if span < 600.0 {
        factors.filter(|&(_, k)| k != 0).fold(Complex64::new(1.0, 0.0), |acc, (z, k)| acc * pow_signed(z, k))
    } else {
        factors.filter(|&(_, k)| k != 0).fold(Complex64::new(0.0, 0.0), |acc, (z, k)| acc + z.ln() * k as f64).exp()
    }
}

fn close(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).norm() <= IMAGE_MERGE_TOL * x.norm().max(y.norm()))
}

/// Groups of indices with coinciding images, ordered by first occurrence.
fn group_images(images: &[Vec<Complex64>]) -> Vec<Vec<usize>> {
    // sweep in order of the first coordinate's real part; only groups whose
    // representative lies within the tolerance window can match
    let mut order: Vec<usize> = (0..images.len()).collect();
    order.sort_by(|&a, &b| images[a][0].re.total_cmp(&images[b][0].re).then(a.cmp(&b)));
    let mut reps: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut window_start = 0;
    for &i in &order {
        let x = images[i][0];
        while window_start < reps.len() {
            let r = images[reps[window_start]][0];
            let slack = 2.0 * IMAGE_MERGE_TOL * (x.norm().max(r.norm()) + 1e-300);
            if x.re - r.re > slack {
                window_start += 1;
            } else {
                break;
            }
        }
        match (window_start..reps.len()).find(|&g| close(&images[reps[g]], &images[i])) {
            Some(g) => members[g].push(i),
            None => {
                reps.push(i);
                members.push(vec![i]);
            }
        }
    }
    for g in &mut members {
        g.sort_unstable();
    }
    members.sort_by_key(|g| g[0]);
    members
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn segment_map() -> LatticeMap {
        let eta = IntMatrix::from_i64_rows(&[&[1], &[2]]).unwrap();
        LatticeMap::with_complement(eta).unwrap()
    }

    #[test]
    fn apply_examples() {
        let f = segment_map();
        assert_eq!(f.apply(&[c(2.0), c(3.0)]).unwrap(), vec![c(18.0)]);
        assert_eq!(f.apply(&[c(1.0), c(1.0)]).unwrap(), vec![c(1.0)]);
        let id = LatticeMap::identity(3);
        let z = [Complex64::new(0.3, 1.0), c(-2.0), Complex64::new(0.0, 5.0)];
        assert_eq!(id.apply(&z).unwrap(), z.to_vec());
        assert!(matches!(f.apply(&[c(0.0), c(1.0)]), Err(Error::ZeroCoordinate(0))));
    }

    #[test]
    fn invalid_maps_rejected() {
        let eta = IntMatrix::from_i64_rows(&[&[1], &[2]]).unwrap();
        assert!(LatticeMap::new(eta.clone(), vec![vec![BigInt::from(1), BigInt::from(1)]]).is_err());
        assert!(LatticeMap::new(eta, vec![]).is_err());
    }

    #[test]
    fn pullback_examples() {
        let f = segment_map();
        let t = Arc::new(ConvexBody::simplex(1));
        let s = Arc::new(ConvexBody::from_i64(2, &[&[0, 0], &[1, 2]]).unwrap());
        let p = SparsePolynomial::new(t.clone(), 3, [(vec![3], c(1.0))]).unwrap();
        let q = f.pullback_poly(&p, &s).unwrap();
        assert_eq!(q.terms().keys().collect::<Vec<_>>(), vec![&vec![3, 6]]);

        let one = SparsePolynomial::constant(t.clone(), c(1.0));
        let q = f.pullback_poly(&one, &s).unwrap();
        assert_eq!(q.coefficient(&[0, 0]), c(1.0));
        assert_eq!(q.terms().len(), 1);

        let p = SparsePolynomial::new(t.clone(), 1, [(vec![0], c(2.0)), (vec![1], c(5.0))]).unwrap();
        let q = f.pullback_poly(&p, &s).unwrap();
        assert_eq!(q.coefficient(&[0, 0]), c(2.0));
        assert_eq!(q.coefficient(&[1, 2]), c(5.0));

        let neg = LatticeMap::with_complement(IntMatrix::from_i64_rows(&[&[1], &[-1]]).unwrap()).unwrap();
        assert!(matches!(neg.pullback_poly(&p, &s), Err(Error::NegativeExponent(_))));
    }

    #[test]
    fn pushforward_takes_fiber_minimum() {
        let f = segment_map();
        let z = vec![c(1.0), c(1.0)];
        let z2 = f.fiber_point(&z, &[c(2.0)]).unwrap();
        let set = WeightedSampleSet::explicit(vec![z, z2, vec![c(2.0), c(1.0)]], vec![1.0, 0.25, 3.0]).unwrap();
        let pushed = f.pushforward_weight(&set).unwrap();
        assert_eq!(pushed.cloud().points.len(), 2);
        assert_eq!(pushed.cloud().weights, vec![0.25, 3.0]);

        let circle = WeightedSampleSet::torus(2, 4, crate::extremal::WeightSpec::Constant(0.5)).unwrap();
        let pushed = f.pushforward_weight(&circle).unwrap();
        assert!(pushed.cloud().weights.iter().all(|&w| w == 0.5));

        let id = LatticeMap::identity(2);
        let pushed = id.pushforward_weight(&set).unwrap();
        assert_eq!(pushed.cloud().weights, vec![1.0, 0.25, 3.0]);
    }

    #[test]
    fn preimage_examples() {
        let f = segment_map();
        let z = f.solve_preimage(&[c(1.0)]).unwrap();
        assert!(z.iter().all(|x| (x - c(1.0)).norm() < 1e-15));
        let z = f.solve_preimage(&[c(4.0)]).unwrap();
        let l4 = 4f64.ln();
        assert!((z[0].re - (l4 / 5.0).exp()).abs() < 1e-14);
        assert!((z[1].re - (2.0 * l4 / 5.0).exp()).abs() < 1e-14);
        let w = f.apply(&z).unwrap();
        assert!((w[0] - c(4.0)).norm() < 1e-13);
    }

    #[test]
    fn fiber_examples() {
        let f = segment_map();
        let z = [c(1.0), c(1.0)];
        assert_eq!(f.fiber_point(&z, &[c(1.0)]).unwrap(), z.to_vec());
        let y = f.fiber_point(&z, &[c(2.0)]).unwrap();
        assert_eq!(y, vec![c(4.0), c(0.5)]);
        assert_eq!(f.apply(&y).unwrap(), vec![c(1.0)]);
    }

    #[test]
    fn signed_powers() {
        let z = Complex64::new(0.6, -0.8);
        assert!((pow_signed(z, -3) * pow_signed(z, 3) - c(1.0)).norm() < 1e-15);
        assert_eq!(pow_signed(c(2.0), 10), c(1024.0));
    }
}
