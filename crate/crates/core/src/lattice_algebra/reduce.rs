//! Shrinking a lattice basis until its half-open parallelepiped contains no
//! nonzero lattice point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::int_matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// Output of [`parallelepiped_reduce`] plus the determinant sequence of the
/// working bases (first entry: input, last entry: ±1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub basis: Vec<Vec<BigInt>>,
    pub abs_dets: Vec<BigInt>,
}

fn basis_matrix(gens: &[Vec<BigInt>]) -> Result<IntMatrix> {
    let l = gens.len();
    if l == 0 || gens.iter().any(|g| g.len() != l) {
        return Err(Error::Shape(format!("need {l} vectors of length {l}")));
    }
    IntMatrix::from_columns(gens)
}

fn adjugate(a: &IntMatrix) -> IntMatrix {
    let n = a.rows();
    if n == 1 {
        return IntMatrix::identity(1);
    }
    let mut adj = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<Vec<BigInt>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[(r, c)].clone()).collect())
                .collect();
            let minor = IntMatrix::from_rows(&rows).expect("square minor").det();
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

/// Coefficients `λ` with `x = Σ λ_k a_k`, as numerators over `det`.
struct Coordinates {
    adj: IntMatrix,
    det: BigInt,
}

impl Coordinates {
    fn new(a: &IntMatrix) -> Self {
        Self { adj: adjugate(a), det: a.det() }
    }

    fn numerators(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.adj.mul_vec(x)
    }

    /// `λ_k ∈ [0, 1)` for all k.
    fn in_half_open_cell(&self, nums: &[BigInt]) -> bool {
        let d = self.det.abs();
        nums.iter().all(|v| {
            let v = if self.det.is_negative() { -v } else { v.clone() };
            !v.is_negative() && v < d
        })
    }
}

/// All lattice points of the half-open parallelepiped `P(a₁…a_ℓ)`, in
/// lexicographic order.
///
/// Every class of `Zℓ / A·Zℓ` has exactly one representative in `P`, namely
/// `x − A⌊A⁻¹x⌋`; the classes are read off the Smith form of `A`.
pub fn parallelepiped_points(gens: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let a = basis_matrix(gens)?;
    let coords = Coordinates::new(&a);
    if coords.det.is_zero() {
        return Err(Error::DependentGenerators);
    }
    let snf = smith_normal_form(&a);
    // U·A·V = D, so Zℓ/AZℓ ≅ ⊕ Z/d_i via y = U·x
    let u_inv = {
        let adj_u = adjugate(&snf.u);
        let det_u = snf.u.det();
        let mut inv = adj_u;
        for i in 0..inv.rows() {
            for j in 0..inv.cols() {
                inv[(i, j)] = &inv[(i, j)] * &det_u;
            }
        }
        inv
    };
    let diag = snf.diagonal();
    let l = gens.len();
    let mut y = vec![BigInt::zero(); l];
    let mut out = Vec::new();
    loop {
        let x = u_inv.mul_vec(&y);
        let nums = coords.numerators(&x);
        let floors: Vec<BigInt> = nums.iter().map(|v| v.div_floor(&coords.det)).collect();
        let shift = a.mul_vec(&floors);
        let rep: Vec<BigInt> = x.iter().zip(&shift).map(|(p, s)| p - s).collect();
        out.push(rep);
        // odometer over 0 ≤ y_i < d_i
        let mut i = l;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            y[i] += 1;
            if y[i] < diag[i] {
                break;
            }
            y[i] = BigInt::zero();
        }
    }
}

/// Brute-force count of `P(a₁…a_ℓ) ∩ Zℓ` over the integer bounding box.
/// Independent of the coset enumeration used by the reduction loop.
pub fn parallelepiped_points_by_box(gens: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let a = basis_matrix(gens)?;
    let coords = Coordinates::new(&a);
    if coords.det.is_zero() {
        return Err(Error::DependentGenerators);
    }
    let l = gens.len();
    let lo: Vec<BigInt> =
        (0..l).map(|i| gens.iter().map(|g| g[i].clone().min(BigInt::zero())).sum()).collect();
    let hi: Vec<BigInt> =
        (0..l).map(|i| gens.iter().map(|g| g[i].clone().max(BigInt::zero())).sum()).collect();
    let mut x = lo.clone();
    let mut out = Vec::new();
    loop {
        if coords.in_half_open_cell(&coords.numerators(&x)) {
            out.push(x.clone());
        }
        let mut i = l;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i].clone();
        }
    }
}

/// Replaces generators by lattice points of their parallelepiped until the
/// parallelepiped holds only the origin, i.e. until `|det| = 1`.
///
/// Each round takes the lexicographically smallest nonzero point
/// `x = Σ λ_k a_k` and substitutes it for `a_m`, `m` the first index with
/// `λ_m ≠ 0`; the determinant shrinks by the factor `λ_m`, and the new
/// generators stay in the closed cone of the inputs.
pub fn parallelepiped_reduce(gens: &[Vec<BigInt>]) -> Result<Reduction> {
    let mut basis = gens.to_vec();
    let mut abs_dets = Vec::new();
    loop {
        let a = basis_matrix(&basis)?;
        let coords = Coordinates::new(&a);
        if coords.det.is_zero() {
            return Err(Error::DependentGenerators);
        }
        abs_dets.push(coords.det.abs());
        let points = parallelepiped_points(&basis)?;
        let Some(x) = points.into_iter().find(|p| p.iter().any(|v| !v.is_zero())) else {
            debug_assert!(coords.det.abs().is_one());
            return Ok(Reduction { basis, abs_dets });
        };
        let nums = coords.numerators(&x);
        let m = nums.iter().position(|v| !v.is_zero()).expect("nonzero point has a nonzero coordinate");
        basis[m] = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn det_of(b: &[Vec<BigInt>]) -> BigInt {
        IntMatrix::from_columns(b).unwrap().det().abs()
    }

    #[test]
    fn unimodular_input_unchanged() {
        let gens = vec![v(&[1, 1]), v(&[0, 1])];
        let r = parallelepiped_reduce(&gens).unwrap();
        assert_eq!(r.basis, gens);
        assert_eq!(r.abs_dets, vec![BigInt::one()]);
    }

    #[test]
    fn one_replacement() {
        let r = parallelepiped_reduce(&[v(&[2, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(r.basis, vec![v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(r.abs_dets, vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn determinant_six() {
        let r = parallelepiped_reduce(&[v(&[2, 1]), v(&[0, 3])]).unwrap();
        assert_eq!(det_of(&r.basis), BigInt::one());
        assert!(r.abs_dets.windows(2).all(|w| w[1] < w[0]));
        assert!(r.abs_dets.len() <= 6);
    }

    #[test]
    fn coset_and_box_enumerations_agree() {
        let cases = [
            vec![v(&[2, 1]), v(&[0, 3])],
            vec![v(&[3, -1]), v(&[1, 4])],
            vec![v(&[2, 0, 1]), v(&[1, 3, 0]), v(&[0, 1, 2])],
        ];
        for gens in cases {
            let a = parallelepiped_points(&gens).unwrap();
            let b = parallelepiped_points_by_box(&gens).unwrap();
            assert_eq!(a, b);
            assert_eq!(BigInt::from(a.len()), det_of(&gens));
        }
    }

    #[test]
    fn dependent_rejected() {
        assert!(matches!(parallelepiped_reduce(&[v(&[1, 2]), v(&[2, 4])]), Err(Error::DependentGenerators)));
    }
}
