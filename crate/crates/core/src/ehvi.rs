//! Expected hypervolume improvement of a Gaussian density over a front.
//!
//! `EHVI(g, P) = E[I(Y, P)]` for `Y ~ g`, where `I` is the hypervolume
//! improvement. Four estimators are provided: Monte Carlo, Gauss-Hermite
//! quadrature, the closed form for independent bivariate densities and a
//! dense midpoint rule that serves as the reference at `m <= 3`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gaussians::GaussianDensity;
use crate::hypervolume::{improvement_unchecked, ParetoFront};
use crate::numerics::RngStream;
use crate::quadrature::{gh_grid_with, principal_axes, GhOptions, QuadratureGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MC")]
    Mc,
    #[serde(rename = "GH")]
    Gh,
    #[serde(rename = "EXACT2D")]
    Exact2d,
    #[serde(rename = "REFERENCE")]
    Reference,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mc => "MC",
            Method::Gh => "GH",
            Method::Exact2d => "EXACT2D",
            Method::Reference => "REFERENCE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhviEstimate {
    pub value: f64,
    pub method: Method,
    /// Number of hypervolume-improvement evaluations spent.
    pub evaluations: u64,
    /// Standard error `s / sqrt(c)`; Monte Carlo only.
    pub mc_std_error: Option<f64>,
}

fn check_dims(g: &GaussianDensity, front: &ParetoFront) -> Result<()> {
    if g.dim() != front.dim() {
        return Err(Error::DimensionMismatch {
            expected: front.dim(),
            got: g.dim(),
        });
    }
    Ok(())
}

/// Monte Carlo estimate from `samples` draws of `g`.
pub fn ehvi_mc(
    g: &GaussianDensity,
    front: &ParetoFront,
    samples: usize,
    rng: &mut RngStream,
) -> Result<EhviEstimate> {
    check_dims(g, front)?;
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let m = g.dim();
    let mut z = vec![0.0; m];
    let mut x = vec![0.0; m];
    // Welford running mean and sum of squared deviations.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        g.sample_into(rng, &mut z, &mut x);
        let v = improvement_unchecked(&x, front);
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let c = samples as f64;
    let std = if samples > 1 {
        (m2 / (c - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(EhviEstimate {
        value: mean.max(0.0),
        method: Method::Mc,
        evaluations: samples as u64,
        mc_std_error: Some(std / c.sqrt()),
    })
}

/// Gauss-Hermite estimate with `n` nodes per dimension and prune rate `r`.
pub fn ehvi_gh(g: &GaussianDensity, front: &ParetoFront, n: usize, r: f64) -> Result<EhviEstimate> {
    ehvi_gh_with(g, front, n, r, &GhOptions::default())
}

pub fn ehvi_gh_with(
    g: &GaussianDensity,
    front: &ParetoFront,
    n: usize,
    r: f64,
    options: &GhOptions,
) -> Result<EhviEstimate> {
    check_dims(g, front)?;
    let grid = gh_grid_with(g, n, r, options)?;
    ehvi_on_grid(&grid, front)
}

/// Weighted sum of improvements over an already transformed grid.
pub fn ehvi_on_grid(grid: &QuadratureGrid, front: &ParetoFront) -> Result<EhviEstimate> {
    if grid.dim() != front.dim() {
        return Err(Error::DimensionMismatch {
            expected: front.dim(),
            got: grid.dim(),
        });
    }
    if !grid.is_transformed() {
        return Err(Error::InvalidArgument(
            "grid has not been transformed".into(),
        ));
    }
    let value = grid.integrate(|x| improvement_unchecked(x, front));
    Ok(EhviEstimate {
        value: value.max(0.0),
        method: Method::Gh,
        evaluations: grid.len() as u64,
        mc_std_error: None,
    })
}

/// Variances below this are raised to it before the closed form.
pub const MIN_VARIANCE: f64 = 1e-15;

fn std_normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

fn std_normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t * FRAC_1_SQRT_2)
}

/// Partial moment `int_{-inf}^{b} (a - y) pdf(y) dy` for `y ~ N(mu, sigma^2)`.
pub fn psi(a: f64, b: f64, mu: f64, sigma: f64) -> f64 {
    let t = (b - mu) / sigma;
    sigma * std_normal_pdf(t) + (a - mu) * std_normal_cdf(t)
}

/// Closed-form EHVI for an independent bivariate density.
///
/// The nondominated region below the reference is cut into vertical strips
/// at the front's first coordinates. Over a strip `[a, b)` with ceiling `c`
/// the improvement of `y` is `(b - max(y1, a))^+ (c - y2)^+`, and by
/// independence its expectation factorises into
/// `(psi(b, b) - psi(a, a)) * psi(c, c)`.
pub fn ehvi_exact_2d(g: &GaussianDensity, front: &ParetoFront) -> Result<EhviEstimate> {
    if g.dim() != 2 {
        return Err(Error::NotBivariate(g.dim()));
    }
    check_dims(g, front)?;
    if !g.is_independent() {
        return Err(Error::NotIndependent);
    }
    let mu = g.mean();
    let sigma: Vec<f64> = g
        .variances()
        .into_iter()
        .map(|v| {
            if v < MIN_VARIANCE {
                log::warn!("variance {v:e} raised to {MIN_VARIANCE:e} for the closed form");
                MIN_VARIANCE.sqrt()
            } else {
                v.sqrt()
            }
        })
        .collect();
    let r = front.reference();
    let mut pts: Vec<(f64, f64)> = front.points().iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let lower_moment = |b: f64| psi(b, b, mu[0], sigma[0]);
    let mut value = 0.0;
    let mut left: Option<f64> = None;
    let mut ceiling = r[1];
    for k in 0..=pts.len() {
        let right = pts.get(k).map_or(r[0], |p| p.0);
        let width_term = lower_moment(right) - left.map_or(0.0, lower_moment);
        value += width_term * psi(ceiling, ceiling, mu[1], sigma[1]);
        if let Some(&(x, y)) = pts.get(k) {
            left = Some(x);
            ceiling = y;
        }
    }
    Ok(EhviEstimate {
        value: value.max(0.0),
        method: Method::Exact2d,
        evaluations: 0,
        mc_std_error: None,
    })
}

/// Half-width of the integration box, in standard deviations per principal axis.
pub const REFERENCE_HALF_WIDTH: f64 = 6.0;
pub const MIN_REFERENCE_CELLS: usize = 50;
/// Largest relative change tolerated when the resolution is doubled.
pub const REFERENCE_REFINEMENT_TOL: f64 = 5e-3;

/// Dense midpoint-rule EHVI for `m <= 3`.
///
/// Integrates over `mu + E diag(sqrt(lambda)) z` for `z` in `[-6, 6]^m`
/// with `cells_per_dim` cells per axis, then repeats with twice as many
/// cells. The finer value is returned if it differs from the coarse one by
/// less than 0.5 %; otherwise [`Error::ResolutionTooLow`].
pub fn ehvi_reference(
    g: &GaussianDensity,
    front: &ParetoFront,
    cells_per_dim: usize,
) -> Result<EhviEstimate> {
    check_dims(g, front)?;
    let m = g.dim();
    if m > 3 {
        return Err(Error::InvalidArgument(format!(
            "reference quadrature supports at most 3 objectives, got {m}"
        )));
    }
    if cells_per_dim < MIN_REFERENCE_CELLS {
        return Err(Error::InvalidArgument(format!(
            "reference quadrature needs at least {MIN_REFERENCE_CELLS} cells per dimension"
        )));
    }
    let coarse = midpoint_ehvi(g, front, cells_per_dim)?;
    let fine = midpoint_ehvi(g, front, 2 * cells_per_dim)?;
    let change = (fine - coarse).abs();
    let negligible = 1e-12 * front.box_volume();
    if change > REFERENCE_REFINEMENT_TOL * fine.abs() && change > negligible {
        return Err(Error::ResolutionTooLow {
            cells: cells_per_dim,
            coarse,
            fine,
        });
    }
    let evaluations =
        (cells_per_dim as u64).pow(m as u32) + (2 * cells_per_dim as u64).pow(m as u32);
    Ok(EhviEstimate {
        value: fine.max(0.0),
        method: Method::Reference,
        evaluations,
        mc_std_error: None,
    })
}

fn midpoint_ehvi(g: &GaussianDensity, front: &ParetoFront, cells: usize) -> Result<f64> {
    let m = g.dim();
    let axes = principal_axes(g.covariance())?;
    let h = 2.0 * REFERENCE_HALF_WIDTH / cells as f64;
    let z: Vec<f64> = (0..cells)
        .map(|k| -REFERENCE_HALF_WIDTH + (k as f64 + 0.5) * h)
        .collect();
    let w: Vec<f64> = z.iter().map(|&t| std_normal_pdf(t) * h).collect();
    // offsets[j][k] = column j of the axis map scaled by z_k.
    let offsets: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            z.iter()
                .flat_map(|&t| (0..m).map(move |i| (i, t)))
                .map(|(i, t)| axes[(i, j)] * t)
                .collect()
        })
        .collect();
    let mean = g.mean();
    let mut x = vec![0.0; m];
    let mut total = 0.0;
    let mut idx = vec![0usize; m];
    loop {
        let mut weight = 1.0;
        x[..m].copy_from_slice(&mean[..m]);
        for (j, &k) in idx.iter().enumerate() {
            weight *= w[k];
            let off = &offsets[j][k * m..(k + 1) * m];
            for i in 0..m {
                x[i] += off[i];
            }
        }
        total += weight * improvement_unchecked(&x, front);

        let mut d = m;
        loop {
            if d == 0 {
                return Ok(total);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < cells {
                break;
            }
            idx[d] = 0;
        }
    }
}
