//! Sampled Pareto-front surfaces, CSV ingestion and reference-point policy.
//!
//! The shapes mirror the families of the DTLZ/WFG suites: linear (DTLZ1,
//! WFG3), concave (DTLZ2, WFG4), convex, and disconnected (DTLZ7, WFG2).
//! For two objectives the surfaces are sampled at evenly spaced parameters;
//! for three or more they are sampled at random from the supplied stream.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussians::bounding_box;
use crate::hypervolume::{dominates_unchecked, ParetoFront};
use crate::numerics::RngStream;

pub const DEFAULT_FRONT_SIZE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrontShape {
    /// `sum f_i = 0.5`, `f >= 0`.
    Linear,
    /// `||f||_2 = 1`, `f >= 0`.
    ConcaveSphere,
    /// `sum (f_i / (2 i))^2 = 1`, `f >= 0`.
    ConcaveEllipsoid,
    /// `f_i = 1 - g_i` with `g` on the unit sphere.
    Convex,
    /// DTLZ7 surface at its optimal distance function, nondominated part.
    Disconnected,
}

impl FrontShape {
    pub const ALL: [FrontShape; 5] = [
        FrontShape::Linear,
        FrontShape::ConcaveSphere,
        FrontShape::ConcaveEllipsoid,
        FrontShape::Convex,
        FrontShape::Disconnected,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FrontShape::Linear => "linear",
            FrontShape::ConcaveSphere => "concave-sphere",
            FrontShape::ConcaveEllipsoid => "concave-ellipsoid",
            FrontShape::Convex => "convex",
            FrontShape::Disconnected => "disconnected",
        }
    }
}

impl fmt::Display for FrontShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrontShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "linear" | "dtlz1" | "wfg3" => FrontShape::Linear,
            "concave" | "concave-sphere" | "sphere" | "dtlz2" => FrontShape::ConcaveSphere,
            "concave-ellipsoid" | "ellipsoid" | "wfg4" => FrontShape::ConcaveEllipsoid,
            "convex" => FrontShape::Convex,
            "disconnected" | "dtlz7" | "wfg2" => FrontShape::Disconnected,
            _ => return Err(Error::InvalidSpec(format!("unknown front shape '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSpec {
    pub shape: FrontShape,
    pub m: usize,
    /// Surface samples drawn before nondominated filtering.
    pub count: usize,
    /// Per-objective radii for the sphere-based shapes.
    pub radii: Vec<f64>,
}

impl FrontSpec {
    /// Spec with the default radii: `2 i` for the ellipsoid, ones otherwise.
    pub fn new(shape: FrontShape, m: usize, count: usize) -> Self {
        let radii = match shape {
            FrontShape::ConcaveEllipsoid => (1..=m).map(|i| 2.0 * i as f64).collect(),
            _ => vec![1.0; m],
        };
        FrontSpec {
            shape,
            m,
            count,
            radii,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidSpec(
                "fronts need at least two objectives".into(),
            ));
        }
        if self.count == 0 {
            return Err(Error::InvalidSpec("front size must be positive".into()));
        }
        if self.radii.len() != self.m || self.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::InvalidSpec(
                "radii must be positive, one per objective".into(),
            ));
        }
        Ok(())
    }
}

/// Samples the surface described by `spec` without filtering.
pub fn sample_surface(spec: &FrontSpec, rng: &mut RngStream) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let m = spec.m;
    let points = (0..spec.count)
        .map(|k| {
            let t = if spec.count == 1 {
                0.5
            } else {
                k as f64 / (spec.count - 1) as f64
            };
            match spec.shape {
                FrontShape::Linear => {
                    if m == 2 {
                        vec![0.5 * t, 0.5 * (1.0 - t)]
                    } else {
                        let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.uniform()).ln()).collect();
                        let s: f64 = e.iter().sum();
                        e.iter().map(|x| 0.5 * x / s).collect()
                    }
                }
                FrontShape::ConcaveSphere | FrontShape::ConcaveEllipsoid => sphere_point(m, t, rng)
                    .iter()
                    .zip(&spec.radii)
                    .map(|(g, r)| g * r)
                    .collect(),
                FrontShape::Convex => sphere_point(m, t, rng).iter().map(|g| 1.0 - g).collect(),
                FrontShape::Disconnected => {
                    let mut f: Vec<f64> = if m == 2 {
                        vec![t]
                    } else {
                        (0..m - 1).map(|_| rng.uniform()).collect()
                    };
                    let h: f64 = f
                        .iter()
                        .map(|x| x / 2.0 * (1.0 + (3.0 * PI * x).sin()))
                        .sum();
                    f.push(2.0 * (m as f64 - h));
                    f
                }
            }
        })
        .collect();
    Ok(points)
}

/// Point of the positive orthant of the unit sphere: at angle `t * pi / 2`
/// for two objectives, uniformly random otherwise.
fn sphere_point(m: usize, t: f64, rng: &mut RngStream) -> Vec<f64> {
    if m == 2 {
        let theta = t * FRAC_PI_2;
        return vec![theta.cos(), theta.sin()];
    }
    loop {
        let z: Vec<f64> = (0..m).map(|_| rng.normal().abs()).collect();
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return z.iter().map(|x| x / norm).collect();
        }
    }
}

/// Sampled, filtered front points for `spec`.
pub fn generate_points(spec: &FrontSpec, rng: &mut RngStream) -> Result<Vec<Vec<f64>>> {
    Ok(nondominated_filter(&sample_surface(spec, rng)?))
}

/// Generated front with its reference point chosen by `policy`.
pub fn generate_front(
    spec: &FrontSpec,
    policy: ReferencePolicy,
    rng: &mut RngStream,
) -> Result<ParetoFront> {
    let points = generate_points(spec, rng)?;
    let reference = reference_point(&points, policy)?;
    ParetoFront::new(points, reference)
}

/// Largest mutually nondominated subset, in input order. Of several equal
/// points the first is kept.
pub fn nondominated_filter(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            !points
                .iter()
                .enumerate()
                .any(|(j, q)| dominates_unchecked(q, p) || (j < *i && q == *p))
        })
        .map(|(_, p)| p.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReferencePolicy {
    /// Upper corner of the front's bounding box (span plus 30 %).
    #[default]
    BoxUpper,
    /// Nadir point plus an absolute margin in every objective.
    NadirPlusMargin(f64),
}

impl fmt::Display for ReferencePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferencePolicy::BoxUpper => f.write_str("box-upper"),
            ReferencePolicy::NadirPlusMargin(d) => write!(f, "nadir+{d}"),
        }
    }
}

impl FromStr for ReferencePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        if key == "box-upper" || key == "box_upper" {
            return Ok(ReferencePolicy::BoxUpper);
        }
        if let Some(margin) = key.strip_prefix("nadir+") {
            let d: f64 = margin
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad margin in '{s}'")))?;
            return Ok(ReferencePolicy::NadirPlusMargin(d));
        }
        Err(Error::InvalidSpec(format!(
            "unknown reference policy '{s}' (expected box-upper or nadir+<margin>)"
        )))
    }
}

pub fn reference_point(points: &[Vec<f64>], policy: ReferencePolicy) -> Result<Vec<f64>> {
    let first = points.first().ok_or(Error::EmptyFront)?;
    let reference = match policy {
        ReferencePolicy::BoxUpper => bounding_box(points)?.upper,
        ReferencePolicy::NadirPlusMargin(d) => (0..first.len())
            .map(|i| {
                points
                    .iter()
                    .map(|p| p[i])
                    .fold(f64::NEG_INFINITY, f64::max)
                    + d
            })
            .collect(),
    };
    let dominated = points
        .iter()
        .all(|p| p.iter().zip(&reference).all(|(a, r)| a < r));
    if !dominated {
        return Err(Error::ReferenceNotDominated);
    }
    Ok(reference)
}

/// Parses CSV front text: one point per line, comma-separated values. A
/// first line that does not parse as numbers is treated as a header; blank
/// lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if points.is_empty() && lineno == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: e.to_string(),
                })
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "non-finite value".into(),
            });
        }
        if let Some(first) = points.first() {
            if first.len() != values.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {} values, found {}", first.len(), values.len()),
                });
            }
        }
        points.push(values);
    }
    if points.is_empty() {
        return Err(Error::EmptyFront);
    }
    Ok(points)
}

pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_points(&fs::read_to_string(path)?)
}

/// Loads a CSV front and attaches a reference point chosen by `policy`.
pub fn load_front(path: &Path, policy: ReferencePolicy) -> Result<ParetoFront> {
    let points = read_points(path)?;
    let reference = reference_point(&points, policy)?;
    ParetoFront::new(points, reference)
}

/// Writes points as CSV using the shortest round-trip representation.
pub fn format_points(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn save_points(path: &Path, points: &[Vec<f64>]) -> Result<()> {
    fs::write(path, format_points(points))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_three_points() {
        let spec = FrontSpec::new(FrontShape::Linear, 2, 3);
        let pts = generate_points(&spec, &mut RngStream::new(0)).unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.5], vec![0.25, 0.25], vec![0.5, 0.0]]);
    }

    fn residual(shape: FrontShape, radii: &[f64], p: &[f64]) -> f64 {
        let m = p.len();
        match shape {
            FrontShape::Linear => p.iter().sum::<f64>() - 0.5,
            FrontShape::ConcaveSphere | FrontShape::ConcaveEllipsoid => {
                p.iter()
                    .zip(radii)
                    .map(|(x, r)| (x / r).powi(2))
                    .sum::<f64>()
                    - 1.0
            }
            FrontShape::Convex => p.iter().map(|x| (1.0 - x).powi(2)).sum::<f64>() - 1.0,
            FrontShape::Disconnected => {
                let h: f64 = p[..m - 1]
                    .iter()
                    .map(|x| x / 2.0 * (1.0 + (3.0 * PI * x).sin()))
                    .sum();
                p[m - 1] - 2.0 * (m as f64 - h)
            }
        }
    }

    #[test]
    fn shape_residuals_and_front_invariants() {
        let mut rng = RngStream::new(12);
        for shape in FrontShape::ALL {
            for m in 2..=4 {
                let spec = FrontSpec::new(shape, m, 60);
                let raw = sample_surface(&spec, &mut rng).unwrap();
                for p in &raw {
                    assert!(
                        residual(shape, &spec.radii, p).abs() <= 1e-10,
                        "{shape} {p:?}"
                    );
                    assert!(p.iter().all(|x| *x >= -1e-15));
                }
                let front = generate_front(&spec, ReferencePolicy::BoxUpper, &mut rng).unwrap();
                assert!(!front.is_empty());
            }
        }
    }

    #[test]
    fn sphere_points_on_unit_circle() {
        let spec = FrontSpec::new(FrontShape::ConcaveSphere, 2, 50);
        for p in generate_points(&spec, &mut RngStream::new(1)).unwrap() {
            assert_abs_diff_eq!(p[0] * p[0] + p[1] * p[1], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ellipsoid_default_radii() {
        assert_eq!(
            FrontSpec::new(FrontShape::ConcaveEllipsoid, 3, 5).radii,
            vec![2.0, 4.0, 6.0]
        );
    }

    #[test]
    fn disconnected_has_clusters() {
        let spec = FrontSpec::new(FrontShape::Disconnected, 2, 200);
        let mut f1: Vec<f64> = generate_points(&spec, &mut RngStream::new(1))
            .unwrap()
            .iter()
            .map(|p| p[0])
            .collect();
        f1.sort_by(f64::total_cmp);
        let gaps = f1.windows(2).filter(|w| w[1] - w[0] > 0.1).count();
        assert!(gaps >= 1, "expected at least two clusters");
    }

    #[test]
    fn filter_cases() {
        let pts = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(
            nondominated_filter(&pts),
            vec![vec![1.0, 2.0], vec![2.0, 1.0]]
        );
        let nd = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(nondominated_filter(&nd), nd);
        let same = vec![vec![1.0, 1.0]; 4];
        assert_eq!(nondominated_filter(&same), vec![vec![1.0, 1.0]]);
    }

    #[test]
    fn invalid_specs() {
        let mut rng = RngStream::new(0);
        assert!(sample_surface(&FrontSpec::new(FrontShape::Linear, 1, 5), &mut rng).is_err());
        assert!(sample_surface(&FrontSpec::new(FrontShape::Linear, 2, 0), &mut rng).is_err());
        let mut bad = FrontSpec::new(FrontShape::ConcaveSphere, 2, 5);
        bad.radii = vec![1.0, -1.0];
        assert!(matches!(
            sample_surface(&bad, &mut rng),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn csv_parsing() {
        let pts = parse_points("0.0,1.0\n1.0,0.0").unwrap();
        assert_eq!(pts, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let with_header = parse_points("f1,f2\n0.0,1.0\n\n1.0,0.0\n").unwrap();
        assert_eq!(with_header, pts);
        assert!(matches!(
            parse_points("0,1\n1,x"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("0,1\n1,2,3"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_points(""), Err(Error::EmptyFront)));
    }

    #[test]
    fn reference_policies() {
        let pts = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = reference_point(&pts, ReferencePolicy::NadirPlusMargin(0.1)).unwrap();
        assert_abs_diff_eq!(r[0], 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 1.1, epsilon = 1e-15);
        let r = reference_point(&pts, ReferencePolicy::BoxUpper).unwrap();
        assert_abs_diff_eq!(r[0], 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 1.3, epsilon = 1e-15);
        assert!(matches!(
            reference_point(&pts, ReferencePolicy::NadirPlusMargin(0.0)),
            Err(Error::ReferenceNotDominated)
        ));
        assert_eq!(
            "nadir+0.25".parse::<ReferencePolicy>().unwrap(),
            ReferencePolicy::NadirPlusMargin(0.25)
        );
        assert_eq!(
            "box-upper".parse::<ReferencePolicy>().unwrap(),
            ReferencePolicy::BoxUpper
        );
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("front.csv");
        let spec = FrontSpec::new(FrontShape::ConcaveSphere, 3, 30);
        let pts = generate_points(&spec, &mut RngStream::new(4)).unwrap();
        save_points(&path, &pts).unwrap();
        assert_eq!(read_points(&path).unwrap(), pts);
        let front = load_front(&path, ReferencePolicy::BoxUpper).unwrap();
        assert_eq!(front.points(), pts.as_slice());
    }
}
