//! Closed-form weighted extremal functions for a few `(S, K, q)`.

use num_complex::Complex64;

use super::samples::{SampleDescriptor, WeightSpec, WeightedSampleSet};
use crate::convex_body::ConvexBody;
use crate::error::{Error, Result};

/// Which closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Torus,
    Circle,
}

impl std::str::FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(OracleKind::Torus),
            "circle" => Ok(OracleKind::Circle),
            other => Err(Error::Parse(format!("unknown oracle {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleCase {
    /// `K = Tⁿ`, `q = 0`: `V = H_S` on `{|z_j| ≥ 1}`.
    TorusUnweighted,
    /// `n = 1`, `S = [0, σ]`, `K = ∂D`, `q ≡ c`: `V = σ·log⁺|z| + c`.
    CircleSigmaConstant { c: f64 },
}

impl OracleCase {
    /// The case matching a sample set, checked against its descriptor.
    pub fn for_samples(kind: OracleKind, samples: &WeightedSampleSet) -> Result<Self> {
        match (kind, samples.descriptor(), samples.weight()) {
            (OracleKind::Torus, SampleDescriptor::Torus { radius, .. }, WeightSpec::Constant(c))
                if *radius == 1.0 && *c == 0.0 =>
            {
                Ok(OracleCase::TorusUnweighted)
            }
            (OracleKind::Circle, SampleDescriptor::Circle { radius, .. }, WeightSpec::Constant(c)) if *radius == 1.0 => {
                Ok(OracleCase::CircleSigmaConstant { c: *c })
            }
            (OracleKind::Torus, ..) => {
                Err(Error::OracleDomain("torus oracle needs unit-torus samples with weight 0".into()))
            }
            (OracleKind::Circle, ..) => {
                Err(Error::OracleDomain("circle oracle needs unit-circle samples with constant weight".into()))
            }
        }
    }
}

/// `V^S_{K,q}(z)` for a registry case.
pub fn oracle_v(case: OracleCase, body: &ConvexBody, z: &[Complex64]) -> Result<f64> {
    if z.len() != body.dim_ambient() {
        return Err(Error::DimensionMismatch { expected: body.dim_ambient(), got: z.len() });
    }
    match case {
        OracleCase::TorusUnweighted => {
            if let Some(j) = z.iter().position(|c| c.norm() < 1.0) {
                return Err(Error::OracleDomain(format!("coordinate {j} has modulus below 1")));
            }
            body.log_support(z)
        }
        OracleCase::CircleSigmaConstant { c } => {
            if body.dim_ambient() != 1 {
                return Err(Error::OracleDomain("circle oracle is one-dimensional".into()));
            }
            let sigma = body.vertices_f64().iter().map(|v| v[0]).fold(0.0, f64::max);
            Ok(sigma * z[0].norm().ln().max(0.0) + c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn examples() {
        let sigma = ConvexBody::simplex(2);
        let v = oracle_v(OracleCase::TorusUnweighted, &sigma, &[c(2.0), c(3.0)]).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-15);
        let i = ConvexBody::simplex(1);
        let v = oracle_v(OracleCase::CircleSigmaConstant { c: 0.0 }, &i, &[c(2.0)]).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let v = oracle_v(OracleCase::CircleSigmaConstant { c: 0.7 }, &i, &[c(1.0)]).unwrap();
        assert_eq!(v, 0.7);
        let v = oracle_v(OracleCase::CircleSigmaConstant { c: 0.0 }, &i, &[c(0.3)]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn domain_errors() {
        let sigma = ConvexBody::simplex(2);
        assert!(matches!(
            oracle_v(OracleCase::TorusUnweighted, &sigma, &[c(0.5), c(3.0)]),
            Err(Error::OracleDomain(_))
        ));
        assert!(oracle_v(OracleCase::CircleSigmaConstant { c: 0.0 }, &sigma, &[c(2.0), c(2.0)]).is_err());
        let k = WeightedSampleSet::torus(2, 4, WeightSpec::Constant(0.3)).unwrap();
        assert!(OracleCase::for_samples(OracleKind::Torus, &k).is_err());
        assert!(OracleCase::for_samples(OracleKind::Circle, &k).is_err());
        assert!("sphere".parse::<OracleKind>().is_err());
    }
}
