//! Polynomials supported in a dilate `mS`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::convex_body::ConvexBody;
use crate::error::{Error, Result};
use crate::extremal::SampleCloud;

/// `p(z) = Σ a_α z^α` with every `α` in `mS ∩ Nⁿ`. Terms are kept in
/// lexicographic exponent order.
#[derive(Clone, Debug)]
pub struct SparsePolynomial {
    m: u32,
    terms: BTreeMap<Vec<u32>, Complex64>,
    body: Arc<ConvexBody>,
}

impl SparsePolynomial {
    /// Validates every exponent with a nonzero coefficient against `mS`.
    pub fn new(
        body: Arc<ConvexBody>,
        m: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>,
    ) -> Result<Self> {
        let n = body.dim_ambient();
        let mut map = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: alpha.len() });
            }
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !body.contains_lattice_point(&alpha, m) {
                return Err(Error::OutsideGrading(alpha.iter().map(|&a| u64::from(a)).collect()));
            }
            *map.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self { m, terms: map, body })
    }

    /// Caller guarantees every exponent lies in `mS`.
    pub(crate) fn from_trusted(body: Arc<ConvexBody>, m: u32, terms: BTreeMap<Vec<u32>, Complex64>) -> Self {
        Self { m, terms, body }
    }

    pub fn constant(body: Arc<ConvexBody>, c: Complex64) -> Self {
        let n = body.dim_ambient();
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert(vec![0; n], c);
        }
        Self { m: 0, terms, body }
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.body.dim_ambient()
    }

    pub fn body(&self) -> &Arc<ConvexBody> {
        &self.body
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    /// Same polynomial viewed in a higher grade `m' ≥ m` (`mS ⊆ m'S`).
    pub fn regraded(&self, m: u32) -> Self {
        assert!(m >= self.m, "cannot lower the grading degree");
        Self { m, terms: self.terms.clone(), body: self.body.clone() }
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.n(), "point has wrong length");
        self.terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, (alpha, c)| acc + c * monomial(z, alpha))
    }

    /// Product, graded in degree `m + m'`.
    pub fn multiply(&self, other: &SparsePolynomial) -> Result<SparsePolynomial> {
        if !Arc::ptr_eq(&self.body, &other.body) && *self.body != *other.body {
            return Err(Error::BodyMismatch);
        }
        let mut terms: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { m: self.m + other.m, terms, body: self.body.clone() })
    }

    /// `max_w |p(w)|·e^{−m·q(w)}` over the cloud; points with infinite weight
    /// contribute nothing.
    pub fn weighted_sup_norm(&self, samples: &SampleCloud) -> f64 {
        let m = f64::from(self.m);
        samples
            .points
            .iter()
            .zip(&samples.weights)
            .filter(|(_, q)| q.is_finite())
            .map(|(w, q)| self.evaluate(w).norm() * (-m * q).exp())
            .fold(0.0, f64::max)
    }
}

/// `z^α` with `0⁰ = 1`.
pub fn monomial(z: &[Complex64], alpha: &[u32]) -> Complex64 {
    crate::monomial_map::power_product(z.iter().copied().zip(alpha.iter().map(|&a| i64::from(a))))
}
