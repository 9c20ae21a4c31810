//! Dense linear algebra and reproducible random numbers.
//!
//! Everything here works on small square matrices (the objective-space
//! dimension, rarely above ten), so the routines favour accuracy and
//! determinism over speed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square dense matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Writes `self * x` into `out`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = self.data[i * n..(i + 1) * n]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.dim).map(|i| self.row(i)))
            .finish()
    }
}

/// Symmetric matrix; `entries[i][j] == entries[j][i]` holds bit-for-bit.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be positive".into(),
            ));
        }
        for i in 0..m.dim {
            for j in (i + 1)..m.dim {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(SymMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(Matrix::identity(dim))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        SymMatrix(m)
    }

    /// Builds a symmetric matrix from the lower triangle of `m`.
    pub fn from_lower(m: &Matrix) -> Self {
        let mut s = m.clone();
        for i in 0..m.dim {
            for j in (i + 1)..m.dim {
                s[(i, j)] = s[(j, i)];
            }
        }
        SymMatrix(s)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).abs() <= tol))
    }

    /// Same diagonal, off-diagonal entries set to zero.
    pub fn diagonal_part(&self) -> SymMatrix {
        SymMatrix::diagonal(&self.diag())
    }

    /// `D * self * D` for the diagonal matrix `D = diag(d)`.
    pub fn scale_both(&self, d: &[f64]) -> SymMatrix {
        let n = self.dim();
        let mut m = self.0.clone();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= d[i] * d[j];
            }
        }
        SymMatrix(m)
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        let mut m = self.0.clone();
        m.data.iter_mut().for_each(|v| *v *= factor);
        SymMatrix(m)
    }
}

impl TryFrom<Matrix> for SymMatrix {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        SymMatrix::new(m)
    }
}

impl From<SymMatrix> for Matrix {
    fn from(s: SymMatrix) -> Matrix {
        s.0
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Relative pivot floor: a pivot at or below `PIVOT_FLOOR * max|a_ii|` is
/// treated as loss of positive definiteness.
const PIVOT_FLOOR: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `L * L^T == a`.
pub fn cholesky(a: &SymMatrix) -> Result<Matrix> {
    let n = a.dim();
    let scale = a.diag().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let floor = PIVOT_FLOOR * scale;
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut pivot = a.get(j, j);
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > floor) || pivot <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Eigenvalues (descending) and orthonormal eigenvectors (columns) of a
/// symmetric matrix. Each column is sign-normalised so that its first
/// non-negligible component is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `E * diag(lambda) * E^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let e = &self.eigenvectors;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|k| e[(i, k)] * self.eigenvalues[k] * e[(j, k)])
                    .sum();
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn eigen_sym(a: &SymMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut w = a.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = w.max_abs();

    if scale > 0.0 {
        let tol = f64::EPSILON * scale * 1e-3;
        let mut converged = false;
        for sweep in 0..JACOBI_MAX_SWEEPS {
            let off = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .fold(0.0_f64, |acc, (p, q)| acc.max(w[(p, q)].abs()));
            if off <= tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = w[(p, q)];
                    if apq.abs() <= tol {
                        continue;
                    }
                    // Once the diagonal dominates, an entry below its rounding
                    // level is flushed instead of rotated.
                    let g = 100.0 * apq.abs();
                    if sweep > 3
                        && w[(p, p)].abs() + g == w[(p, p)].abs()
                        && w[(q, q)].abs() + g == w[(q, q)].abs()
                    {
                        w[(p, q)] = 0.0;
                        w[(q, p)] = 0.0;
                        continue;
                    }
                    rotate(&mut w, &mut v, p, q);
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]).then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| w[(k, k)]).collect();
    let mut eigenvectors = Matrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let first = (0..n).map(|i| v[(i, k)]).find(|x| x.abs() > 1e-12);
        let sign = match first {
            Some(x) if x < 0.0 => -1.0,
            _ => 1.0,
        };
        for i in 0..n {
            eigenvectors[(i, col)] = sign * v[(i, k)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let n = w.dim;
    let apq = w[(p, q)];
    let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    w[(p, p)] -= t * apq;
    w[(q, q)] += t * apq;
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = w[(r, p)];
        let arq = w[(r, q)];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        w[(r, p)] = new_rp;
        w[(p, r)] = new_rp;
        w[(r, q)] = new_rq;
        w[(q, r)] = new_rq;
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = c * vrp - s * vrq;
        v[(r, q)] = s * vrp + c * vrq;
    }
}

/// Counter-based pseudo-random stream.
///
/// Output `k` is the SplitMix64 finaliser applied to
/// `seed + (k + 1) * 0x9E3779B97F4A7C15` (wrapping), so the sequence is fully
/// determined by the seed on every platform. Normal deviates use the
/// Box-Muller transform and are produced in pairs; the second value of each
/// pair is buffered.
///
/// A stream is single-owner state. Independent streams for parallel tasks are
/// derived with [`RngStream::for_task`], which uses `base_seed ^ task_index`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            counter: 0,
            spare_normal: None,
        }
    }

    pub fn for_task(base_seed: u64, task_index: u64) -> Self {
        RngStream::new(base_seed ^ task_index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        let mut z = self
            .seed
            .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`.
    fn uniform_open_zero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform_open_zero();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.normal();
        }
    }
}

pub fn standard_normal(rng: &mut RngStream, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.normal()).collect()
}

/// Wishart(identity, dof) draw via the Bartlett decomposition.
///
/// `W = A * A^T` with `A` lower triangular, `A_ii^2 ~ chi2(dof - i)` and
/// standard normal entries below the diagonal. Chi-square variates are sums
/// of squared normals, which restricts `dof` to integers.
pub fn sample_wishart(rng: &mut RngStream, dim: usize, dof: usize) -> Result<SymMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "Wishart dimension must be positive".into(),
        ));
    }
    if dof < dim {
        return Err(Error::DofTooSmall { dim, dof });
    }
    let mut a = Matrix::zeros(dim);
    for i in 0..dim {
        let k = dof - i;
        let chi2: f64 = (0..k).map(|_| rng.normal().powi(2)).sum();
        a[(i, i)] = chi2.sqrt();
        for j in 0..i {
            a[(i, j)] = rng.normal();
        }
    }
    let mut w = Matrix::zeros(dim);
    for i in 0..dim {
        for j in 0..=i {
            let s: f64 = (0..=j).map(|k| a[(i, k)] * a[(j, k)]).sum();
            w[(i, j)] = s;
            w[(j, i)] = s;
        }
    }
    SymMatrix::new(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn reconstruct_lower(l: &Matrix) -> Matrix {
        l.matmul(&l.transpose())
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky(&SymMatrix::identity(2)).unwrap();
        assert_eq!(l, Matrix::identity(2));
    }

    #[test]
    fn cholesky_two_by_two() {
        let a = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        let expected = Matrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(l, expected);
        let back = reconstruct_lower(&l);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(back[(i, j)], a.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_indefinite() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn cholesky_tiny_scale_is_fine() {
        let a = SymMatrix::diagonal(&[1e-18, 1e-18]);
        let l = cholesky(&a).unwrap();
        assert_abs_diff_eq!(l[(0, 0)], 1e-9, epsilon = 1e-20);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap();
        assert!(matches!(SymMatrix::new(m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn eigen_diagonal() {
        let e = eigen_sym(&SymMatrix::diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(e.eigenvectors, Matrix::identity(2));
    }

    #[test]
    fn eigen_diagonal_reorders() {
        let e = eigen_sym(&SymMatrix::diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(e.eigenvectors[(1, 0)], 1.0);
        assert_eq!(e.eigenvectors[(0, 1)], 1.0);
    }

    #[test]
    fn eigen_correlated_pair() {
        let a = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let e = eigen_sym(&a).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 0.5, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e.eigenvectors[(0, 0)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvectors[(1, 0)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvectors[(0, 1)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvectors[(1, 1)], -h, epsilon = 1e-14);
    }

    #[test]
    fn eigen_degenerate_spectrum() {
        let a = SymMatrix::identity(3);
        let e = eigen_sym(&a).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        let back = e.reconstruct();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(back[(i, j)], a.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eigen_zero_matrix() {
        let e = eigen_sym(&SymMatrix::diagonal(&[0.0, 0.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0, 0.0]);
    }

    #[test]
    fn standard_normal_moments() {
        let mut rng = RngStream::new(1);
        let xs = standard_normal(&mut rng, 100_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn rng_is_reproducible() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(42);
            (0..1000).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(42);
            (0..1000).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let mut r1 = RngStream::new(7);
        let mut r2 = RngStream::new(7);
        assert_eq!(standard_normal(&mut r1, 17), standard_normal(&mut r2, 17));
    }

    #[test]
    fn rng_known_first_output() {
        // SplitMix64 reference value for seed 0.
        let mut r = RngStream::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn single_normal_is_finite() {
        let mut r = RngStream::new(3);
        let v = standard_normal(&mut r, 1);
        assert_eq!(v.len(), 1);
        assert!(v[0].is_finite());
    }

    #[test]
    fn task_streams_xor_seed() {
        assert_eq!(RngStream::for_task(0b1100, 0b0101).seed(), 0b1001);
    }

    #[test]
    fn wishart_one_dim_is_chi_square() {
        let mut rng = RngStream::new(11);
        let dof = 4;
        let draws = 100_000;
        let mean: f64 = (0..draws)
            .map(|_| sample_wishart(&mut rng, 1, dof).unwrap().get(0, 0))
            .sum::<f64>()
            / draws as f64;
        assert!((mean - dof as f64).abs() < 0.03 * dof as f64, "mean {mean}");
    }

    #[test]
    fn wishart_mean_is_dof_identity() {
        let mut rng = RngStream::new(5);
        let draws = 100_000;
        let mut acc = [0.0; 4];
        for _ in 0..draws {
            let w = sample_wishart(&mut rng, 2, 5).unwrap();
            acc[0] += w.get(0, 0);
            acc[1] += w.get(0, 1);
            acc[2] += w.get(1, 0);
            acc[3] += w.get(1, 1);
        }
        let mean: Vec<f64> = acc.iter().map(|a| a / draws as f64).collect();
        assert!((mean[0] - 5.0).abs() < 0.25);
        assert!((mean[3] - 5.0).abs() < 0.25);
        assert!(mean[1].abs() < 0.25);
        assert!(mean[2].abs() < 0.25);
    }

    #[test]
    fn wishart_dof_too_small() {
        let mut rng = RngStream::new(1);
        assert!(matches!(
            sample_wishart(&mut rng, 3, 2),
            Err(Error::DofTooSmall { dim: 3, dof: 2 })
        ));
    }

    #[test]
    fn wishart_always_positive_definite() {
        let mut rng = RngStream::new(99);
        for i in 0..10_000 {
            let dim = 2 + i % 4;
            let w = sample_wishart(&mut rng, dim, dim).unwrap();
            cholesky(&w).unwrap();
        }
    }

    fn random_sym(rng: &mut RngStream, n: usize) -> SymMatrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.uniform_range(-2.0, 2.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix::new(m).unwrap()
    }

    #[test]
    fn eigen_random_reconstruction_and_orthonormality() {
        let mut rng = RngStream::new(2024);
        for trial in 0..1000 {
            let n = 1 + trial % 6;
            let a = random_sym(&mut rng, n);
            let e = eigen_sym(&a).unwrap();
            let back = e.reconstruct();
            let ev = &e.eigenvectors;
            for i in 0..n {
                for j in 0..n {
                    assert!((back[(i, j)] - a.get(i, j)).abs() <= 1e-10);
                    let dot: f64 = (0..n).map(|k| ev[(k, i)] * ev[(k, j)]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() <= 1e-10);
                }
            }
            for w in e.eigenvalues.windows(2) {
                assert!(w[0] >= w[1]);
            }
            // E^T a E is diagonal.
            let d = ev.transpose().matmul(a.as_matrix()).matmul(ev);
            let bound = 1e-11 * a.as_matrix().max_abs();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(d[(i, j)].abs() <= bound, "off-diagonal {}", d[(i, j)]);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn cholesky_reconstructs_spd(seed in any::<u64>(), n in 2usize..=6) {
            let mut rng = RngStream::new(seed);
            let b = random_sym(&mut rng, n);
            // b * b + n I is SPD.
            let mut spd = b.as_matrix().matmul(b.as_matrix());
            for i in 0..n {
                spd[(i, i)] += n as f64;
            }
            let a = SymMatrix::from_lower(&spd);
            let l = cholesky(&a).unwrap();
            let back = reconstruct_lower(&l);
            for i in 0..n {
                prop_assert!(l[(i, i)] > 0.0);
                for j in 0..n {
                    prop_assert!((back[(i, j)] - a.get(i, j)).abs() <= 1e-10);
                }
            }
        }
    }
}
