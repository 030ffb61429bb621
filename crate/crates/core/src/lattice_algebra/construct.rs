use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::int_matrix::IntMatrix;
use super::reduce::parallelepiped_reduce;
use super::snf::{integer_kernel, smith_normal_form};
use crate::convex_body::{ConvexBody, DensityWitness};
use crate::error::{Error, Result};
use crate::exact_field::{common_denominator, ExactMatrix, QuadExt, Rational};
use crate::monomial_map::LatticeMap;

/// Integer basis (columns) of `W ∩ Zⁿ` for the subspace `W` spanned by the
/// rational columns of `generators`.
///
/// Clears denominators of a rational basis of `W^⊥` into an integer constraint
/// matrix and reads its integer kernel off the Smith form.
pub fn saturate(generators: &ExactMatrix) -> Result<IntMatrix> {
    if !generators.is_rational() {
        return Err(Error::IrrationalGenerators);
    }
    let n = generators.rows();
    let rank = generators.rank();
    if rank == 0 {
        return Err(Error::DependentGenerators);
    }
    let orth = generators.transpose().kernel();
    if orth.is_empty() {
        return Ok(IntMatrix::identity(n));
    }
    let constraints: Vec<Vec<BigInt>> = orth.iter().map(|w| clear_denominators(w)).collect();
    let c = IntMatrix::from_rows(&constraints)?;
    integer_kernel(&c).ok_or(Error::DependentGenerators)
}

fn clear_denominators(w: &[QuadExt]) -> Vec<BigInt> {
    let den = common_denominator(w.iter().map(QuadExt::rat_part));
    w.iter()
        .map(|x| {
            let scaled = x.rat_part() * Rational::from_integer(den.clone());
            scaled.to_integer()
        })
        .collect()
}

/// Builds `L` with `L(Rℓ) = span S`, `L(Zℓ) = span S ∩ Zⁿ`, `L⁻¹(Zⁿ) = Zℓ`
/// and `L⁻¹(Rⁿ₊) ⊆ Rℓ₊`, together with an integer basis of `(span S)^⊥ ∩ Zⁿ`.
pub fn construct_l(body: &ConvexBody) -> Result<LatticeMap> {
    let report = body.is_rationally_dense();
    if !report.dense {
        return Err(Error::NotRationallyDense);
    }
    let DensityWitness::RationalBasis(basis) = report.witness else {
        return Err(Error::NotRationallyDense);
    };
    if basis.is_empty() {
        return Err(Error::InvalidBody("the body is the single point 0".into()));
    }
    let cols: Vec<Vec<QuadExt>> =
        basis.iter().map(|v| v.iter().cloned().map(QuadExt::rational).collect()).collect();
    let m = saturate(&ExactMatrix::from_columns(&cols)?)?;
    let ell = m.cols();

    // a_k = M*(e_{j_k}) for the first independent rows j_1 < … < j_ℓ
    let rows = first_independent_rows(&m);
    let a: Vec<Vec<BigInt>> = rows.iter().map(|&j| m.row(j)).collect();
    let xi = parallelepiped_reduce(&a)?.basis;

    // L = M·B⁻¹ with B the matrix whose rows are ξ_k
    let b = IntMatrix::from_rows(&xi)?.to_exact();
    let m_exact = m.to_exact();
    let mut l_entries = vec![BigInt::zero(); m.rows() * ell];
    for i in 0..m.rows() {
        // row i of L solves y·B = row i of M, i.e. Bᵀ yᵀ = (row i of M)ᵀ
        let rhs: Vec<QuadExt> = m_exact.row(i).to_vec();
        let y = b.transpose().solve(&rhs).ok_or_else(|| Error::Certificate("B is singular".into()))?;
        for (k, v) in y.iter().enumerate() {
            if !v.is_rational() || !v.rat_part().is_integer() {
                return Err(Error::Certificate(format!("L has non-integer entry {v}")));
            }
            l_entries[i * ell + k] = v.rat_part().to_integer();
        }
    }
    let eta = IntMatrix::new(m.rows(), ell, l_entries)?;
    let map = LatticeMap::with_complement(eta)?;
    let cert = verify_map(&map, body);
    if !cert.all_pass() {
        return Err(Error::Certificate(format!("{cert:?}")));
    }
    Ok(map)
}

/// Lexicographically first set of `cols()` linearly independent rows.
pub fn first_independent_rows(m: &IntMatrix) -> Vec<usize> {
    let exact = m.to_exact();
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..m.rows() {
        if chosen.len() == m.cols() {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        let sub = ExactMatrix::from_rows(trial.iter().map(|&r| exact.row(r).to_vec()).collect())
            .expect("nonempty");
        if sub.rank() == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

/// Per-check results of [`verify_map`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCertificate {
    /// (a) entries of L are integers.
    pub integer_entries: bool,
    /// (b) columns of L generate `span S ∩ Zⁿ`.
    pub generates_saturation: bool,
    /// (c) every Smith diagonal entry of L is ±1.
    pub unimodular_snf: bool,
    /// (d) every vertex of `L⁻¹(S)` is nonnegative.
    pub preimage_nonnegative: bool,
    pub snf_diagonal: Vec<BigInt>,
}

impl MapCertificate {
    pub fn all_pass(&self) -> bool {
        self.integer_entries && self.generates_saturation && self.unimodular_snf && self.preimage_nonnegative
    }

    pub fn rows(&self) -> [(&'static str, bool); 4] {
        [
            ("integer entries", self.integer_entries),
            ("generates saturated lattice", self.generates_saturation),
            ("unimodular Smith diagonal", self.unimodular_snf),
            ("nonnegative preimage body", self.preimage_nonnegative),
        ]
    }
}

pub fn verify_map(map: &LatticeMap, body: &ConvexBody) -> MapCertificate {
    let eta = map.eta();
    // entries are BigInt by construction
    let integer_entries = true;
    let snf = smith_normal_form(eta);
    let snf_diagonal = snf.diagonal();
    let unimodular_snf = snf_diagonal.len() == eta.cols() && snf_diagonal.iter().all(|d| d.abs().is_one());
    let generates_saturation = generates_saturation(eta, body);
    let preimage_nonnegative = body.preimage_body(map).is_ok();
    MapCertificate { integer_entries, generates_saturation, unimodular_snf, preimage_nonnegative, snf_diagonal }
}

fn generates_saturation(eta: &IntMatrix, body: &ConvexBody) -> bool {
    let report = body.is_rationally_dense();
    let DensityWitness::RationalBasis(basis) = report.witness else {
        return false;
    };
    if !report.dense || basis.len() != eta.cols() {
        return false;
    }
    let cols: Vec<Vec<QuadExt>> =
        basis.iter().map(|v| v.iter().cloned().map(QuadExt::rational).collect()).collect();
    let Ok(gens) = ExactMatrix::from_columns(&cols) else {
        return false;
    };
    let Ok(sat) = saturate(&gens) else {
        return false;
    };
    in_lattice(&sat, eta) && in_lattice(eta, &sat)
}

/// Every column of `vectors` is an integer combination of the columns of
/// `lattice` (which must have full column rank).
fn in_lattice(lattice: &IntMatrix, vectors: &IntMatrix) -> bool {
    let lat = lattice.to_exact();
    vectors.columns().iter().all(|v| {
        let rhs: Vec<QuadExt> = v.iter().map(QuadExt::from).collect();
        match lat.solve(&rhs) {
            Some(x) => {
                let recon = lat.mul_vec(&x);
                recon == rhs && x.iter().all(|c| c.is_rational() && c.rat_part().is_integer())
            }
            None => false,
        }
    })
}
