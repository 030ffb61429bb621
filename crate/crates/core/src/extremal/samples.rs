use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Density of the default certification resampling relative to the samples.
pub const CERTIFICATION_FACTOR: usize = 4;

/// Points of `C^{*n}` with a weight `q(w) ∈ R ∪ {+∞}` each.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl SampleCloud {
    /// Rejects empty clouds, ragged or zero coordinates, NaN or `−∞` weights,
    /// and clouds where every weight is `+∞`.
    pub fn new(points: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSamples("no sample points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidSamples(format!("{} points but {} weights", points.len(), weights.len())));
        }
        let n = points[0].len();
        if n == 0 {
            return Err(Error::InvalidSamples("points have no coordinates".into()));
        }
        for (k, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::InvalidSamples(format!("point {k} has {} coordinates, expected {n}", p.len())));
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidSamples(format!("point {k} is not finite")));
            }
            if p.iter().any(|c| c.norm() == 0.0) {
                return Err(Error::InvalidSamples(format!("point {k} has a zero coordinate")));
            }
        }
        if let Some(k) = weights.iter().position(|q| q.is_nan() || *q == f64::NEG_INFINITY) {
            return Err(Error::InvalidSamples(format!("weight {k} is not in R ∪ {{+∞}}")));
        }
        if weights.iter().all(|q| q.is_infinite()) {
            return Err(Error::InvalidSamples("every weight is +∞".into()));
        }
        Ok(Self { points, weights })
    }

    pub fn n(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn shifted(&self, c: f64) -> Self {
        Self { points: self.points.clone(), weights: self.weights.iter().map(|q| q + c).collect() }
    }
}

/// How the sample points were generated.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleDescriptor {
    /// `per_axis` equally spaced angles on each circle `|z_j| = radius`.
    Torus { n: usize, per_axis: usize, radius: f64 },
    /// `count` equally spaced points on `|z| = radius` in `C`.
    Circle { count: usize, radius: f64 },
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Constant(f64),
    /// One value per sample point.
    Table(Vec<f64>),
}

/// A discretized compact set `K` with weight `q`, plus the (possibly denser)
/// cloud used to certify sup-norms after the fact.
#[derive(Clone, Debug)]
pub struct WeightedSampleSet {
    descriptor: SampleDescriptor,
    weight: WeightSpec,
    cloud: SampleCloud,
    certification: OnceLock<SampleCloud>,
    explicit_certification: bool,
}

impl PartialEq for WeightedSampleSet {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
            && self.weight == other.weight
            && self.cloud == other.cloud
            && self.explicit_certification == other.explicit_certification
            && (!self.explicit_certification || self.certification.get() == other.certification.get())
    }
}

fn torus_points(n: usize, per_axis: usize, radius: f64) -> Vec<Vec<Complex64>> {
    let axis: Vec<Complex64> =
        (0..per_axis).map(|k| Complex64::from_polar(radius, TAU * k as f64 / per_axis as f64)).collect();
    let total = per_axis.checked_pow(n as u32).expect("torus grid too large");
    (0..total)
        .map(|mut idx| {
            let mut z = vec![Complex64::new(0.0, 0.0); n];
            for j in (0..n).rev() {
                z[j] = axis[idx % per_axis];
                idx /= per_axis;
            }
            z
        })
        .collect()
}

fn weights_for(weight: &WeightSpec, len: usize) -> Result<Vec<f64>> {
    match weight {
        WeightSpec::Constant(c) => Ok(vec![*c; len]),
        WeightSpec::Table(v) if v.len() == len => Ok(v.clone()),
        WeightSpec::Table(v) => Err(Error::InvalidSamples(format!("{} weights for {len} points", v.len()))),
    }
}

impl WeightedSampleSet {
    fn build(descriptor: SampleDescriptor, weight: WeightSpec, points: Vec<Vec<Complex64>>) -> Result<Self> {
        let weights = weights_for(&weight, points.len())?;
        let cloud = SampleCloud::new(points, weights)?;
        Ok(Self { descriptor, weight, cloud, certification: OnceLock::new(), explicit_certification: false })
    }

    /// Product grid on the unit torus `Tⁿ`, ordered lexicographically in the
    /// angle indices.
    pub fn torus(n: usize, per_axis: usize, weight: WeightSpec) -> Result<Self> {
        Self::torus_with_radius(n, per_axis, 1.0, weight)
    }

    pub fn torus_with_radius(n: usize, per_axis: usize, radius: f64, weight: WeightSpec) -> Result<Self> {
        if n == 0 || per_axis == 0 || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSamples("torus needs n ≥ 1, count ≥ 1 and a positive radius".into()));
        }
        Self::build(SampleDescriptor::Torus { n, per_axis, radius }, weight, torus_points(n, per_axis, radius))
    }

    pub fn circle(count: usize, radius: f64, weight: WeightSpec) -> Result<Self> {
        if count == 0 || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSamples("circle needs count ≥ 1 and a positive radius".into()));
        }
        Self::build(SampleDescriptor::Circle { count, radius }, weight, torus_points(1, count, radius))
    }

    pub fn explicit(points: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        Self::build(SampleDescriptor::Explicit, WeightSpec::Table(weights), points)
    }

    /// Replaces the default certification cloud.
    pub fn with_certification(self, cloud: SampleCloud) -> Result<Self> {
        if cloud.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: cloud.n() });
        }
        let certification = OnceLock::new();
        let _ = certification.set(cloud);
        Ok(Self { certification, explicit_certification: true, ..self })
    }

    /// The same set with `q` replaced by `q + c`, certification cloud included.
    pub fn with_weight_shift(&self, c: f64) -> Self {
        let weight = match &self.weight {
            WeightSpec::Constant(v) => WeightSpec::Constant(v + c),
            WeightSpec::Table(v) => WeightSpec::Table(v.iter().map(|q| q + c).collect()),
        };
        let certification = OnceLock::new();
        if self.explicit_certification {
            let _ = certification.set(self.certification_cloud().shifted(c));
        }
        Self {
            descriptor: self.descriptor.clone(),
            weight,
            cloud: self.cloud.shifted(c),
            certification,
            explicit_certification: self.explicit_certification,
        }
    }

    pub fn n(&self) -> usize {
        self.cloud.n()
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn descriptor(&self) -> &SampleDescriptor {
        &self.descriptor
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn cloud(&self) -> &SampleCloud {
        &self.cloud
    }

    pub fn has_explicit_certification(&self) -> bool {
        self.explicit_certification
    }

    /// Points used to measure the true weighted sup-norm of an LP optimizer:
    /// an explicitly attached cloud, else the descriptor resampled
    /// [`CERTIFICATION_FACTOR`] times denser (constant weights only), else the
    /// samples themselves.
    pub fn certification_cloud(&self) -> &SampleCloud {
        self.certification.get_or_init(|| {
            let WeightSpec::Constant(c) = self.weight else {
                return self.cloud.clone();
            };
            let points = match self.descriptor {
                SampleDescriptor::Torus { n, per_axis, radius } => {
                    torus_points(n, per_axis * CERTIFICATION_FACTOR, radius)
                }
                SampleDescriptor::Circle { count, radius } => torus_points(1, count * CERTIFICATION_FACTOR, radius),
                SampleDescriptor::Explicit => return self.cloud.clone(),
            };
            let weights = vec![c; points.len()];
            SampleCloud { points, weights }
        })
    }

    /// Certification points per coordinate axis when the certification cloud
    /// is a product grid, `None` otherwise.
    pub fn certification_per_axis(&self) -> Option<usize> {
        if self.explicit_certification || !matches!(self.weight, WeightSpec::Constant(_)) {
            return None;
        }
        match self.descriptor {
            SampleDescriptor::Torus { per_axis, .. } => Some(per_axis * CERTIFICATION_FACTOR),
            SampleDescriptor::Circle { count, .. } => Some(count * CERTIFICATION_FACTOR),
            SampleDescriptor::Explicit => None,
        }
    }
}

/// The first `count` points of the Kronecker sequence
/// `k ↦ (e^{2πi·frac(k√p₁)}, …, e^{2πi·frac(k√p_n)})` on the unit torus,
/// with the first `certification` points (a superset) as certification cloud.
///
/// Unlike a product grid, such a set is not contained in the zero set of any
/// low-degree binomial, so the sampled sup-norm controls every coefficient.
pub fn kronecker_torus(n: usize, count: usize, certification: usize, weight: f64) -> Result<WeightedSampleSet> {
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    if n == 0 || n > PRIMES.len() {
        return Err(Error::InvalidSamples(format!("Kronecker sets support 1 ≤ n ≤ {}", PRIMES.len())));
    }
    if count == 0 || certification < count {
        return Err(Error::InvalidSamples("need 1 ≤ count ≤ certification".into()));
    }
    let point = |k: usize| -> Vec<Complex64> {
        PRIMES[..n]
            .iter()
            .map(|p| {
                let t = (k as f64 * p.sqrt()).fract();
                Complex64::from_polar(1.0, TAU * t)
            })
            .collect()
    };
    let all: Vec<Vec<Complex64>> = (1..=certification).map(point).collect();
    let cert = SampleCloud::new(all.clone(), vec![weight; certification])?;
    WeightedSampleSet::explicit(all[..count].to_vec(), vec![weight; count])?.with_certification(cert)
}
