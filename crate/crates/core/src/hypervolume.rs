//! Exact hypervolume indicator, contribution and improvement (minimisation).
//!
//! Volumes are computed by sweeping along the last objective: two
//! dimensions use a sorted staircase, three dimensions maintain a 2-D
//! staircase incrementally, four and more slice recursively. Intended for
//! desk-scale fronts of at most a few hundred points.

use crate::error::{Error, Result};

/// `a` dominates `b`: no worse in every objective and better in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    check_dim(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Mutually nondominated points that all strictly dominate a reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    points: Vec<Vec<f64>>,
    reference: Vec<f64>,
    /// Points sorted ascending by the last objective (ties by the others).
    by_last: Vec<Vec<f64>>,
}

impl ParetoFront {
    pub fn new(points: Vec<Vec<f64>>, reference: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyFront);
        }
        let m = reference.len();
        if m == 0 {
            return Err(Error::InvalidFront(
                "zero-dimensional objective space".into(),
            ));
        }
        if reference.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFront("reference point is not finite".into()));
        }
        for p in &points {
            check_dim(m, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidFront(format!("non-finite point {p:?}")));
            }
            if p.iter().zip(&reference).any(|(a, r)| a >= r) {
                return Err(Error::ReferenceNotDominated);
            }
        }
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if a == b {
                    return Err(Error::InvalidFront(format!("duplicate point {a:?}")));
                }
                if dominates_unchecked(a, b) || dominates_unchecked(b, a) {
                    return Err(Error::InvalidFront(format!(
                        "{a:?} and {b:?} are comparable"
                    )));
                }
            }
        }
        let mut by_last = points.clone();
        by_last.sort_by(|a, b| {
            a.iter()
                .rev()
                .zip(b.iter().rev())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(ParetoFront {
            points,
            reference,
            by_last,
        })
    }

    pub fn dim(&self) -> usize {
        self.reference.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    /// Volume of the box spanned by the ideal point and the reference.
    pub fn box_volume(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let lo = self
                    .points
                    .iter()
                    .map(|p| p[i])
                    .fold(f64::INFINITY, f64::min);
                self.reference[i] - lo
            })
            .product()
    }
}

/// Hypervolume indicator of the front.
pub fn hv(front: &ParetoFront) -> f64 {
    match front.dim() {
        2 => sweep2(front.by_last.iter().map(|p| (p[0], p[1])), &front.reference),
        3 => sweep3(
            front.by_last.iter().map(|p| (p[0], p[1], p[2])),
            &front.reference,
        ),
        _ => volume(front.points.clone(), &front.reference),
    }
}

/// `hv(P) - hv(P \ {p})`.
pub fn hv_contribution(front: &ParetoFront, p: &[f64]) -> Result<f64> {
    check_dim(front.dim(), p.len())?;
    let pos = front
        .points
        .iter()
        .position(|q| q.as_slice() == p)
        .ok_or(Error::PointNotInSet)?;
    let rest: Vec<Vec<f64>> = front
        .points
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, q)| q.clone())
        .collect();
    let without = volume(rest, &front.reference);
    Ok((hv(front) - without).max(0.0))
}

/// Hypervolume gained by adding `p` to the front: `hv(P + {p}) - hv(P)`.
///
/// Zero when `p` is weakly dominated by a member or does not strictly
/// dominate the reference point. Otherwise evaluated through the clipping
/// identity `prod(r - p) - hv({max(q, p) : q in P})`.
pub fn hv_improvement(p: &[f64], front: &ParetoFront) -> Result<f64> {
    check_dim(front.dim(), p.len())?;
    Ok(improvement_unchecked(p, front))
}

pub(crate) fn improvement_unchecked(p: &[f64], front: &ParetoFront) -> f64 {
    let r = &front.reference;
    if p.iter().zip(r).any(|(a, b)| !(a < b)) {
        return 0.0;
    }
    if front.points.iter().any(|q| weakly_dominates(q, p)) {
        return 0.0;
    }
    let own: f64 = p.iter().zip(r).map(|(a, b)| b - a).product();
    // Clipping preserves the ordering along the last objective, so the
    // presorted copy can be swept without re-sorting.
    let covered = match front.dim() {
        2 => sweep2(
            front
                .by_last
                .iter()
                .map(|q| (q[0].max(p[0]), q[1].max(p[1]))),
            r,
        ),
        3 => sweep3(
            front
                .by_last
                .iter()
                .map(|q| (q[0].max(p[0]), q[1].max(p[1]), q[2].max(p[2]))),
            r,
        ),
        _ => volume(
            front
                .points
                .iter()
                .map(|q| q.iter().zip(p).map(|(a, b)| a.max(*b)).collect())
                .collect(),
            r,
        ),
    };
    (own - covered).max(0.0)
}

/// Definitional form `hv(P + {p}) - hv(P)`; kept as an oracle for the
/// clipping identity.
pub fn hv_improvement_definitional(p: &[f64], front: &ParetoFront) -> Result<f64> {
    check_dim(front.dim(), p.len())?;
    let mut with = front.points.clone();
    with.push(p.to_vec());
    let gained = volume(with, &front.reference) - volume(front.points.clone(), &front.reference);
    Ok(gained.max(0.0))
}

/// Measure of the union of boxes `[p, r]` for arbitrary points (dominated
/// points and points outside the reference box are allowed).
pub fn volume(mut points: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    points.retain(|p| p.iter().zip(r).all(|(a, b)| a < b));
    if points.is_empty() {
        return 0.0;
    }
    let m = r.len();
    if m == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return r[0] - lo;
    }
    points.sort_by(|a, b| a[m - 1].total_cmp(&b[m - 1]));
    match m {
        2 => sweep2(points.iter().map(|p| (p[0], p[1])), r),
        3 => sweep3(points.iter().map(|p| (p[0], p[1], p[2])), r),
        _ => slice(&points, r),
    }
}

/// Slices along the last objective; `points` sorted ascending on it.
fn slice(points: &[Vec<f64>], r: &[f64]) -> f64 {
    let m = r.len();
    let mut total = 0.0;
    for k in 0..points.len() {
        let lower = points[k][m - 1];
        let upper = points.get(k + 1).map_or(r[m - 1], |p| p[m - 1]);
        let height = upper - lower;
        if height <= 0.0 {
            continue;
        }
        let projected: Vec<Vec<f64>> = points[..=k].iter().map(|p| p[..m - 1].to_vec()).collect();
        total += height * volume(projected, &r[..m - 1]);
    }
    total
}

/// Two-objective sweep; points arrive in ascending order of the second
/// objective.
fn sweep2(points: impl Iterator<Item = (f64, f64)>, r: &[f64]) -> f64 {
    let mut area = 0.0;
    let mut left = r[0];
    for (x, y) in points {
        if y >= r[1] {
            break;
        }
        if x < left {
            area += (left - x) * (r[1] - y);
            left = x;
        }
    }
    area
}

/// Three-objective sweep; points arrive in ascending order of the third
/// objective.
fn sweep3(points: impl Iterator<Item = (f64, f64, f64)>, r: &[f64]) -> f64 {
    let mut stair = Staircase::new(r[0], r[1]);
    let mut volume = 0.0;
    let mut last_z = f64::NAN;
    for (x, y, z) in points {
        if z >= r[2] {
            break;
        }
        if !last_z.is_nan() && z > last_z {
            volume += stair.area * (z - last_z);
        }
        last_z = z;
        if x < r[0] && y < r[1] {
            stair.insert(x, y);
        }
    }
    if !last_z.is_nan() {
        volume += stair.area * (r[2] - last_z);
    }
    volume
}

/// 2-D nondominated set kept sorted by ascending `x` (so descending `y`),
/// with the area it dominates up to `(rx, ry)`.
struct Staircase {
    steps: Vec<(f64, f64)>,
    area: f64,
    rx: f64,
    ry: f64,
}

impl Staircase {
    fn new(rx: f64, ry: f64) -> Self {
        Staircase {
            steps: Vec::new(),
            area: 0.0,
            rx,
            ry,
        }
    }

    fn insert(&mut self, x: f64, y: f64) {
        let i = self.steps.partition_point(|s| s.0 < x);
        if let Some(&(sx, sy)) = self.steps.get(i) {
            if sx == x && sy <= y {
                return;
            }
        }
        let ceiling = if i > 0 {
            let (_, yl) = self.steps[i - 1];
            if yl <= y {
                return;
            }
            yl
        } else {
            self.ry
        };

        // Newly covered area: strip by strip to the right of x, the old
        // boundary is the y of the step on the left.
        let mut gained = 0.0;
        let mut strip_left = x;
        let mut strip_top = ceiling;
        let mut j = i;
        while j < self.steps.len() {
            let (sx, sy) = self.steps[j];
            gained += (sx - strip_left) * (strip_top - y);
            if sy <= y {
                break;
            }
            strip_left = sx;
            strip_top = sy;
            j += 1;
        }
        if j == self.steps.len() {
            gained += (self.rx - strip_left) * (strip_top - y);
        }
        self.area += gained;
        self.steps.splice(i..j, std::iter::once((x, y)));
    }
}
