//! Polytopes `S ⊂ Rⁿ₊` with `0 ∈ S`, given by exact generators over `Q(√d)`.

mod membership;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::exact_field::{ExactMatrix, QuadExt, Rational};
use crate::error::{Error, Result};
use crate::monomial_map::LatticeMap;
use crate::par::{self, Execution};

pub(crate) use membership::nonneg_combination;

/// Exponents `α ∈ Nⁿ ∩ mS`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePointSet {
    pub m: u32,
    pub points: Vec<Vec<u32>>,
}

impl LatticePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(alpha)).is_ok()
    }
}

/// Outcome of the rational density test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityWitness {
    /// Rational basis of `span(S) ∩ Qⁿ`; it spans `span(S)`.
    RationalBasis(Vec<Vec<Rational>>),
    /// Orthogonality constraint `⟨c + e√d, x⟩ = 0` whose rational and surd
    /// parts cut the rational solutions below `dim span(S)`.
    SeparatingConstraint { index: usize, rational_part: Vec<Rational>, surd_part: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub dense: bool,
    /// Dimension over `Q` of the rational points of `span(S)`.
    pub rational_dim: usize,
    pub span_dim: usize,
    pub witness: DensityWitness,
}

/// Compact convex `S ⊂ Rⁿ₊` given as the hull of finitely many generators,
/// one of which is the origin.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    n: usize,
    radicand: u32,
    vertices: Vec<Vec<QuadExt>>,
    vertices_f64: Vec<Vec<f64>>,
    span_basis: Vec<Vec<QuadExt>>,
    orthogonal: Vec<Vec<QuadExt>>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.radicand == other.radicand && self.vertices == other.vertices
    }
}

impl ConvexBody {
    pub fn new(n: usize, radicand: u32, vertices: Vec<Vec<QuadExt>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBody("ambient dimension must be positive".into()));
        }
        if !crate::exact_field::is_square_free(radicand) {
            return Err(Error::InvalidRadicand(radicand));
        }
        if vertices.is_empty() {
            return Err(Error::InvalidBody("no generators".into()));
        }
        let mut tagged = Vec::with_capacity(vertices.len());
        for (k, v) in vertices.into_iter().enumerate() {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            let mut row = Vec::with_capacity(n);
            for x in v {
                if let Some(d) = x.radicand() {
                    if d != radicand && !x.is_rational() {
                        return Err(Error::InvalidBody(format!(
                            "generator {k} uses radicand {d}, body uses {radicand}"
                        )));
                    }
                }
                if x.sign() < 0 {
                    return Err(Error::InvalidBody(format!("generator {k} has a negative coordinate")));
                }
                row.push(if x.is_rational() { x } else { x.with_radicand(radicand) });
            }
            tagged.push(row);
        }
        if !tagged.iter().any(|v| v.iter().all(QuadExt::is_zero)) {
            return Err(Error::InvalidBody("the origin must be one of the generators".into()));
        }
        let vertices_f64 = tagged.iter().map(|v| v.iter().map(QuadExt::to_f64).collect()).collect();
        let as_rows = ExactMatrix::from_rows(tagged.clone())?;
        let ech = as_rows.echelon();
        let span_basis = (0..ech.pivots.len()).map(|r| ech.reduced.row(r).to_vec()).collect();
        let orthogonal = as_rows.kernel();
        Ok(Self { n, radicand, vertices: tagged, vertices_f64, span_basis, orthogonal })
    }

    pub fn from_i64(n: usize, vertices: &[&[i64]]) -> Result<Self> {
        Self::new(n, 2, vertices.iter().map(|v| v.iter().map(|&x| QuadExt::from_int(x)).collect()).collect())
    }

    /// Unit simplex `conv{0, e₁, …, eₙ}`.
    pub fn simplex(n: usize) -> Self {
        let mut verts = vec![vec![QuadExt::zero(); n]];
        for i in 0..n {
            let mut e = vec![QuadExt::zero(); n];
            e[i] = QuadExt::one();
            verts.push(e);
        }
        Self::new(n, 2, verts).expect("simplex is a valid body")
    }

    /// The segment `[0, σ] ⊂ R`.
    pub fn interval(sigma: Rational) -> Result<Self> {
        Self::new(1, 2, vec![vec![QuadExt::zero()], vec![QuadExt::rational(sigma)]])
    }

    pub fn dim_ambient(&self) -> usize {
        self.n
    }

    pub fn radicand(&self) -> u32 {
        self.radicand
    }

    pub fn vertices(&self) -> &[Vec<QuadExt>] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> &[Vec<f64>] {
        &self.vertices_f64
    }

    /// `ℓ = dim span(S)`.
    pub fn affine_dim(&self) -> usize {
        self.span_basis.len()
    }

    pub fn span_basis(&self) -> &[Vec<QuadExt>] {
        &self.span_basis
    }

    /// Basis of `span(S)^⊥`.
    pub fn orthogonal_basis(&self) -> &[Vec<QuadExt>] {
        &self.orthogonal
    }

    pub fn is_rational(&self) -> bool {
        self.vertices.iter().flatten().all(QuadExt::is_rational)
    }

    /// `kS`, generators scaled by `k`.
    pub fn scaled(&self, k: u32) -> Self {
        let f = QuadExt::from_int(i64::from(k));
        let verts = self.vertices.iter().map(|v| v.iter().map(|x| x * &f).collect()).collect();
        Self::new(self.n, self.radicand, verts).expect("scaling preserves validity")
    }

    /// `φ_S(ξ) = max_v ⟨v, ξ⟩`.
    pub fn support_value(&self, xi: &[f64]) -> f64 {
        assert_eq!(xi.len(), self.n, "direction has wrong length");
        self.vertices_f64
            .iter()
            .map(|v| v.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `H_S(z) = φ_S(log|z₁|, …, log|zₙ|)` on the complex torus.
    pub fn log_support(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.len() });
        }
        if let Some(j) = z.iter().position(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroCoordinate(j));
        }
        let xi: Vec<f64> = z.iter().map(|c| c.norm().ln()).collect();
        Ok(self.support_value(&xi))
    }

    /// Exact test `x ∈ S`.
    pub fn contains(&self, x: &[QuadExt]) -> bool {
        assert_eq!(x.len(), self.n, "point has wrong length");
        if !self.in_span(x) {
            return false;
        }
        nonneg_combination(&self.nonzero_vertices(1), x, true)
    }

    /// Exact test `α ∈ mS`.
    pub fn contains_lattice_point(&self, alpha: &[u32], m: u32) -> bool {
        let x: Vec<QuadExt> = alpha.iter().map(|&a| QuadExt::from_int(i64::from(a))).collect();
        self.contains_in_dilate(&x, &self.nonzero_vertices(m))
    }

    fn contains_in_dilate(&self, x: &[QuadExt], gens: &[Vec<QuadExt>]) -> bool {
        if x.iter().all(QuadExt::is_zero) {
            return true;
        }
        self.in_span(x) && nonneg_combination(gens, x, true)
    }

    fn in_span(&self, x: &[QuadExt]) -> bool {
        self.orthogonal.iter().all(|w| {
            w.iter()
                .zip(x)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(QuadExt::zero(), |acc, (a, b)| &acc + &(a * b))
                .is_zero()
        })
    }

    fn nonzero_vertices(&self, m: u32) -> Vec<Vec<QuadExt>> {
        let f = QuadExt::from_int(i64::from(m));
        self.vertices
            .iter()
            .filter(|v| !v.iter().all(QuadExt::is_zero))
            .map(|v| v.iter().map(|x| x * &f).collect())
            .collect()
    }

    /// Smallest integer box `[0, hi_i]` containing `mS`, per coordinate.
    fn box_bounds(&self, m: u32) -> Vec<u32> {
        let f = QuadExt::from_int(i64::from(m));
        (0..self.n)
            .map(|i| {
                let top = self.vertices.iter().map(|v| &v[i] * &f).max().unwrap_or_else(QuadExt::zero);
                ceil_qext(&top).to_u32().expect("dilate fits in u32 exponents")
            })
            .collect()
    }

    pub fn lattice_points(&self, m: u32) -> LatticePointSet {
        self.lattice_points_with(m, Execution::default())
    }

    pub fn lattice_points_with(&self, m: u32, exec: Execution) -> LatticePointSet {
        if m == 0 {
            return LatticePointSet { m, points: vec![vec![0; self.n]] };
        }
        let hi = self.box_bounds(m);
        let gens = self.nonzero_vertices(m);
        let total: usize = hi.iter().map(|&h| h as usize + 1).product();
        // enumerate the box in lexicographic order, block by block
        const BLOCK: usize = 1 << 14;
        let mut points = Vec::new();
        let mut start = 0;
        while start < total {
            let end = (start + BLOCK).min(total);
            let block: Vec<Vec<u32>> = (start..end).map(|idx| unrank(idx, &hi)).collect();
            let kept = par::filter(exec, block, |alpha| {
                let x: Vec<QuadExt> = alpha.iter().map(|&a| QuadExt::from_int(i64::from(a))).collect();
                self.contains_in_dilate(&x, &gens)
            });
            points.extend(kept);
            start = end;
        }
        LatticePointSet { m, points }
    }

    /// Decides whether `S ∩ Qⁿ` is dense in `S`.
    ///
    /// Writes each vector of `span(S)^⊥` as `c + e√d` with rational `c, e`; a
    /// rational `x` lies in `span(S)` iff `⟨c, x⟩ = ⟨e, x⟩ = 0` for all of
    /// them. Density holds iff those rational solutions span a space of the
    /// same dimension as `span(S)`.
    pub fn is_rationally_dense(&self) -> DensityReport {
        let span_dim = self.affine_dim();
        let mut doubled: Vec<Vec<QuadExt>> = Vec::new();
        let mut separating = None;
        for (j, w) in self.orthogonal.iter().enumerate() {
            let c: Vec<QuadExt> = w.iter().map(|x| QuadExt::rational(x.rat_part().clone())).collect();
            let e: Vec<QuadExt> = w.iter().map(|x| QuadExt::rational(x.surd_part().clone())).collect();
            doubled.push(c);
            doubled.push(e);
            if separating.is_none() {
                let rank = ExactMatrix::from_rows(doubled.clone()).expect("nonempty").rank();
                if rank > j + 1 {
                    separating = Some(j);
                }
            }
        }
        let rational_basis: Vec<Vec<QuadExt>> = if doubled.is_empty() {
            (0..self.n)
                .map(|i| (0..self.n).map(|k| QuadExt::from_int(i64::from(i == k))).collect())
                .collect()
        } else {
            ExactMatrix::from_rows(doubled.clone()).expect("nonempty").kernel()
        };
        let rational_dim = rational_basis.len();
        let dense = rational_dim == span_dim;
        let witness = match separating {
            Some(j) if !dense => DensityWitness::SeparatingConstraint {
                index: j,
                rational_part: self.orthogonal[j].iter().map(|x| x.rat_part().clone()).collect(),
                surd_part: self.orthogonal[j].iter().map(|x| x.surd_part().clone()).collect(),
            },
            _ => DensityWitness::RationalBasis(
                rational_basis.iter().map(|v| v.iter().map(|x| x.rat_part().clone()).collect()).collect(),
            ),
        };
        DensityReport { dense, rational_dim, span_dim, witness }
    }

    /// `T = L⁻¹(S) ⊂ R^ℓ₊`, computed vertex by vertex.
    pub fn preimage_body(&self, map: &LatticeMap) -> Result<ConvexBody> {
        if map.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: map.n() });
        }
        let l = map.eta_exact();
        let mut verts = Vec::with_capacity(self.vertices.len());
        for (k, v) in self.vertices.iter().enumerate() {
            let t = l.solve(v).ok_or(Error::NoPreimage(k))?;
            if t.iter().any(|x| x.sign() < 0) {
                return Err(Error::NegativePreimage(k));
            }
            verts.push(t);
        }
        ConvexBody::new(map.ell(), self.radicand, verts)
    }
}

/// Smallest integer `>= x`.
pub fn ceil_qext(x: &QuadExt) -> BigInt {
    let mut c = BigInt::from(x.to_f64().ceil() as i64);
    while QuadExt::from(&c) < *x {
        c += 1;
    }
    while QuadExt::from(&(&c - 1)) >= *x {
        c -= 1;
    }
    c
}

fn unrank(mut idx: usize, hi: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; hi.len()];
    for i in (0..hi.len()).rev() {
        let base = hi[i] as usize + 1;
        out[i] = (idx % base) as u32;
        idx /= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_field::rational_from_int;

    fn irrational_segment() -> ConvexBody {
        let r2 = QuadExt::sqrt(2).unwrap();
        ConvexBody::new(2, 2, vec![vec![QuadExt::zero(), QuadExt::zero()], vec![QuadExt::one(), r2]]).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(ConvexBody::from_i64(2, &[&[1, 0], &[0, 1]]).is_err(), "origin missing");
        assert!(ConvexBody::from_i64(2, &[&[0, 0], &[-1, 0]]).is_err(), "negative coordinate");
        assert!(ConvexBody::from_i64(2, &[&[0, 0], &[1]]).is_err());
        let r3 = QuadExt::sqrt(3).unwrap();
        let mixed = ConvexBody::new(1, 2, vec![vec![QuadExt::zero()], vec![r3]]);
        assert!(mixed.is_err());
    }

    #[test]
    fn support_values() {
        let sigma = ConvexBody::simplex(2);
        assert_eq!(sigma.support_value(&[1.0, -1.0]), 1.0);
        assert_eq!(sigma.support_value(&[0.0, 0.0]), 0.0);
        let seg = ConvexBody::from_i64(2, &[&[0, 0], &[1, 2]]).unwrap();
        assert_eq!(seg.support_value(&[3.0, 1.0]), 5.0);
    }

    #[test]
    fn log_support_values() {
        let sigma = ConvexBody::simplex(2);
        let h = sigma.log_support(&[Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);
        let torus = [Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -2.0)];
        assert_eq!(sigma.log_support(&torus).unwrap(), 0.0);
        let seg = ConvexBody::from_i64(2, &[&[0, 0], &[1, 2]]).unwrap();
        let e = std::f64::consts::E;
        let h = seg.log_support(&[Complex64::new(e, 0.0), Complex64::new(e, 0.0)]).unwrap();
        assert!((h - 3.0).abs() < 1e-15);
        assert!(matches!(
            seg.log_support(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
            Err(Error::ZeroCoordinate(0))
        ));
    }

    #[test]
    fn lattice_point_examples() {
        let seg = ConvexBody::from_i64(2, &[&[0, 0], &[1, 2]]).unwrap();
        assert_eq!(seg.lattice_points(3).points, vec![vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 6]]);
        assert_eq!(seg.lattice_points(0).points, vec![vec![0, 0]]);
        let sigma = ConvexBody::simplex(2);
        assert_eq!(
            sigma.lattice_points(2).points,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]]
        );
        assert_eq!(irrational_segment().lattice_points(5).points, vec![vec![0, 0]]);
    }

    #[test]
    fn density_examples() {
        let seg = ConvexBody::from_i64(2, &[&[0, 0], &[1, 2]]).unwrap();
        assert!(seg.is_rationally_dense().dense);

        let report = irrational_segment().is_rationally_dense();
        assert!(!report.dense);
        assert_eq!((report.rational_dim, report.span_dim), (0, 1));
        match report.witness {
            DensityWitness::SeparatingConstraint { index, rational_part, surd_part } => {
                assert_eq!(index, 0);
                // the constraint is a multiple of (√2, -1)
                let zero = rational_from_int(0);
                assert!(rational_part[0] == zero && surd_part[1] == zero);
                assert!(surd_part[0] != zero && rational_part[1] != zero);
            }
            w => panic!("unexpected witness {w:?}"),
        }

        let r2 = QuadExt::sqrt(2).unwrap();
        let diag = ConvexBody::new(2, 2, vec![vec![QuadExt::zero(), QuadExt::zero()], vec![r2.clone(), r2]]).unwrap();
        let report = diag.is_rationally_dense();
        assert!(report.dense);
        match report.witness {
            DensityWitness::RationalBasis(b) => {
                assert_eq!(b.len(), 1);
                assert_eq!(b[0][0], b[0][1]);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn contains_points() {
        let sigma = ConvexBody::simplex(2);
        let half = QuadExt::rational(Rational::new(1.into(), 2.into()));
        assert!(sigma.contains(&[half.clone(), half.clone()]));
        assert!(!sigma.contains(&[half.clone(), QuadExt::one()]));
        assert!(sigma.contains_lattice_point(&[1, 1], 2));
        assert!(!sigma.contains_lattice_point(&[2, 1], 2));
    }

    #[test]
    fn ceil_of_surds() {
        let r2 = QuadExt::sqrt(2).unwrap();
        assert_eq!(ceil_qext(&r2), BigInt::from(2));
        assert_eq!(ceil_qext(&QuadExt::from_int(3)), BigInt::from(3));
        let x = &QuadExt::from_int(64) * &r2;
        assert_eq!(ceil_qext(&x), BigInt::from(91));
    }
}
