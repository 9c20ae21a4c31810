//! Multivariate Gaussian predictive densities and the random test-density
//! generators used by the comparison studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cholesky, sample_wishart, Matrix, RngStream, SymMatrix};

/// Off-diagonal magnitude below which a covariance counts as diagonal.
pub const INDEPENDENCE_TOL: f64 = 1e-12;

/// `N(mean, covariance)` with a validated, positive-definite covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRecord", into = "DensityRecord")]
pub struct GaussianDensity {
    mean: Vec<f64>,
    covariance: SymMatrix,
    independent: bool,
    factor: Matrix,
}

impl GaussianDensity {
    pub fn new(mean: Vec<f64>, covariance: SymMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::DimensionMismatch {
                expected: covariance.dim(),
                got: mean.len(),
            });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("mean must be finite".into()));
        }
        let factor = cholesky(&covariance)?;
        let independent = covariance.is_diagonal(INDEPENDENCE_TOL);
        Ok(GaussianDensity {
            mean,
            covariance,
            independent,
            factor,
        })
    }

    /// Independent density from per-objective variances.
    pub fn independent(mean: Vec<f64>, variances: &[f64]) -> Result<Self> {
        GaussianDensity::new(mean, SymMatrix::diagonal(variances))
    }

    /// `N(0, I)` in `dim` dimensions.
    pub fn standard(dim: usize) -> Self {
        GaussianDensity::new(vec![0.0; dim], SymMatrix::identity(dim))
            .expect("identity covariance is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.covariance
    }

    pub fn is_independent(&self) -> bool {
        self.independent
    }

    pub fn variances(&self) -> Vec<f64> {
        self.covariance.diag()
    }

    /// Lower Cholesky factor of the covariance.
    pub fn cholesky_factor(&self) -> &Matrix {
        &self.factor
    }

    /// Drops every correlation, keeping the marginal variances.
    pub fn diag_only(&self) -> GaussianDensity {
        if self.independent {
            return self.clone();
        }
        GaussianDensity::new(self.mean.clone(), self.covariance.diagonal_part())
            .expect("diagonal of a positive-definite matrix is positive")
    }

    /// Writes one draw `mu + L z` into `out`; `z` is scratch space.
    pub fn sample_into(&self, rng: &mut RngStream, z: &mut [f64], out: &mut [f64]) {
        rng.fill_normal(z);
        self.factor.mul_vec_into(z, out);
        for (o, mu) in out.iter_mut().zip(&self.mean) {
            *o += mu;
        }
    }

    pub fn sample(&self, rng: &mut RngStream, count: usize) -> Vec<Vec<f64>> {
        let m = self.dim();
        let mut z = vec![0.0; m];
        (0..count)
            .map(|_| {
                let mut x = vec![0.0; m];
                self.sample_into(rng, &mut z, &mut x);
                x
            })
            .collect()
    }
}

/// Serialised form: mean vector and row-major covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub mean: Vec<f64>,
    pub covariance: Vec<f64>,
    pub independent: bool,
}

impl From<GaussianDensity> for DensityRecord {
    fn from(g: GaussianDensity) -> Self {
        DensityRecord {
            covariance: g.covariance.as_matrix().as_slice().to_vec(),
            mean: g.mean,
            independent: g.independent,
        }
    }
}

impl TryFrom<DensityRecord> for GaussianDensity {
    type Error = Error;
    fn try_from(rec: DensityRecord) -> Result<Self> {
        let m = rec.mean.len();
        if rec.covariance.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                got: rec.covariance.len(),
            });
        }
        let rows: Vec<Vec<f64>> = rec
            .covariance
            .chunks(m.max(1))
            .map(|c| c.to_vec())
            .collect();
        GaussianDensity::new(rec.mean, SymMatrix::from_rows(&rows)?)
    }
}

/// Axis-aligned box `[lower, upper]` around a front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl FrontBox {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| u - l)
            .collect()
    }
}

/// Margin added on both sides of each objective's span.
pub const BOX_MARGIN: f64 = 0.3;

/// Per objective, the span `s` of the front extended by `0.3 s` on both sides.
pub fn bounding_box(points: &[Vec<f64>]) -> Result<FrontBox> {
    let first = points.first().ok_or(Error::EmptyFront)?;
    let m = first.len();
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    for i in 0..m {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in points {
            if p.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: p.len(),
                });
            }
            lo = lo.min(p[i]);
            hi = hi.max(p[i]);
        }
        let span = hi - lo;
        if !(span > 0.0) {
            return Err(Error::DegenerateSpan(i));
        }
        lower.push(lo - BOX_MARGIN * span);
        upper.push(hi + BOX_MARGIN * span);
    }
    Ok(FrontBox { lower, upper })
}

/// Relative floor on generated variances; keeps the covariance invertible.
pub const VARIANCE_FLOOR: f64 = 1e-9;

fn uniform_mean(bx: &FrontBox, rng: &mut RngStream) -> Vec<f64> {
    bx.lower
        .iter()
        .zip(&bx.upper)
        .map(|(l, u)| rng.uniform_range(*l, *u))
        .collect()
}

/// Mean uniform in the front's box, diagonal covariance with variance `i`
/// uniform in `[1e-9 w_i, w_i]` where `w_i` is the box width.
pub fn random_independent(points: &[Vec<f64>], rng: &mut RngStream) -> Result<GaussianDensity> {
    let bx = bounding_box(points)?;
    let mean = uniform_mean(&bx, rng);
    let variances: Vec<f64> = bx
        .widths()
        .iter()
        .map(|w| rng.uniform_range(VARIANCE_FLOOR * w, *w))
        .collect();
    GaussianDensity::independent(mean, &variances)
}

/// Wishart degrees of freedom used by [`random_correlated`] for dimension `m`.
pub fn default_wishart_dof(m: usize) -> usize {
    m + 2
}

/// Mean uniform in the front's box, covariance `(1/dof) D W D` with
/// `W ~ Wishart(I, dof)` and `D = diag(sqrt(w_i))`, so that the expected
/// variances equal the box widths.
pub fn random_correlated(points: &[Vec<f64>], rng: &mut RngStream) -> Result<GaussianDensity> {
    let m = points.first().map_or(0, |p| p.len());
    random_correlated_with_dof(points, rng, default_wishart_dof(m))
}

pub fn random_correlated_with_dof(
    points: &[Vec<f64>],
    rng: &mut RngStream,
    dof: usize,
) -> Result<GaussianDensity> {
    let bx = bounding_box(points)?;
    let mean = uniform_mean(&bx, rng);
    let w = sample_wishart(rng, bx.dim(), dof)?;
    let d: Vec<f64> = bx.widths().iter().map(|w| w.sqrt()).collect();
    let cov = w.scale_both(&d).scaled(1.0 / dof as f64);
    let mut g = GaussianDensity::new(mean, cov)?;
    g.independent = false;
    Ok(g)
}
