//! Gauss-Hermite rules for the standard normal kernel and their expansion
//! into pruned, eigen-transformed multivariate grids.
//!
//! The pipeline for a density `N(mu, Sigma)` is
//!
//! 1. a one-dimensional rule with `n` nodes ([`hermite_rule`]),
//! 2. its `n^m` tensor product ([`tensor_grid`]),
//! 3. removal of the lowest-weight nodes so that `floor(n^m (1 - r))`
//!    remain ([`prune`]),
//! 4. the map `z -> mu + E diag(sqrt(lambda)) z` built from the
//!    eigendecomposition of `Sigma` ([`transform`]).

use crate::error::{Error, Result};
use crate::gaussians::GaussianDensity;
use crate::numerics::{eigen_sym, Matrix, SymMatrix};

pub const MAX_ORDER: usize = 100;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// One-dimensional rule: `E[f(Z)] ~ sum w_i f(x_i)` for `Z ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule1D {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Gauss-Hermite rule with `n` nodes for the standard normal density.
///
/// Nodes are the eigenvalues of the probabilists' Hermite Jacobi matrix
/// (zero diagonal, `sqrt(i)` off the diagonal), polished by Newton steps on
/// the orthonormal recurrence. Each weight is the squared first component
/// of the normalised eigenvector, evaluated in closed form as
/// `1 / sum_k p_k(x)^2` with `p_k = He_k / sqrt(k!)`.
pub fn hermite_rule(n: usize) -> Result<QuadratureRule1D> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::OrderOutOfRange(n));
    }
    let mut jacobi = Matrix::zeros(n);
    for i in 1..n {
        let b = (i as f64).sqrt();
        jacobi[(i - 1, i)] = b;
        jacobi[(i, i - 1)] = b;
    }
    let eig = eigen_sym(&SymMatrix::new(jacobi)?)?;
    let mut nodes = eig.eigenvalues;
    nodes.reverse();

    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (pn, pn1, _) = orthonormal_hermite(*x, n);
            let deriv = (n as f64).sqrt() * pn1;
            if deriv != 0.0 {
                *x -= pn / deriv;
            }
        }
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| 1.0 / orthonormal_hermite(x, n).2)
        .collect();

    // Enforce exact mirror symmetry; an odd rule gets a node at exactly zero.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    Ok(QuadratureRule1D { nodes, weights })
}

/// Returns `(p_n(x), p_{n-1}(x), sum_{k<n} p_k(x)^2)` for the orthonormal
/// probabilists' Hermite polynomials.
fn orthonormal_hermite(x: f64, n: usize) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}

/// Number of nodes kept by pruning `total` nodes at rate `r`:
/// `floor(total * (1 - r))`, but never fewer than one node while `r < 1`.
pub fn pruned_count(total: u128, r: f64) -> u128 {
    // The epsilon absorbs representation error in `1 - r` (225 * 0.8 must
    // give 180, not 179).
    let kept = (total as f64 * (1.0 - r) + 1e-7).floor();
    let kept = (kept.max(0.0) as u128).min(total);
    // Below one node the rule degenerates; keep the heaviest node unless
    // everything was asked to go.
    if kept == 0 && r < 1.0 {
        total.min(1)
    } else {
        kept
    }
}

/// Nodes kept for an `n`-point rule in `m` dimensions at prune rate `r`.
pub fn node_count(n: usize, m: usize, r: f64) -> u128 {
    match (n as u128).checked_pow(m as u32) {
        Some(total) => pruned_count(total, r),
        None => u128::MAX,
    }
}

/// Weighted nodes in `m` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    dim: usize,
    order: usize,
    prune_rate: f64,
    transformed: bool,
    renormalized: bool,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per dimension of the originating rule.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prune_rate(&self) -> f64 {
        self.prune_rate
    }

    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    pub fn is_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Rescales the weights to sum to one.
    pub fn renormalize(mut self) -> Self {
        let total = self.total_weight();
        if total > 0.0 {
            self.weights.iter_mut().for_each(|w| *w /= total);
        }
        self.renormalized = true;
        self
    }
}

/// Full tensor product of `rule` in `m` dimensions with the default budget.
pub fn tensor_grid(rule: &QuadratureRule1D, m: usize) -> Result<QuadratureGrid> {
    tensor_grid_with_budget(rule, m, DEFAULT_NODE_BUDGET)
}

/// Full tensor product of `rule` in `m` dimensions.
///
/// Nodes are enumerated in lexicographic multi-index order (first coordinate
/// slowest). Each weight is the product of the one-dimensional weights,
/// multiplied in a canonical order so that mirror-image nodes carry
/// bit-identical weights.
pub fn tensor_grid_with_budget(
    rule: &QuadratureRule1D,
    m: usize,
    budget: u64,
) -> Result<QuadratureGrid> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "grid dimension must be positive".into(),
        ));
    }
    let n = rule.order();
    let total = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::NodeBudgetExceeded {
            requested: total,
            after_pruning: total,
            budget,
        });
    }
    let total = total as usize;
    let mut nodes = Vec::with_capacity(total * m);
    let mut weights = Vec::with_capacity(total);
    let mut index = vec![0usize; m];
    let mut canon = vec![0usize; m];
    for _ in 0..total {
        for (c, &i) in canon.iter_mut().zip(&index) {
            *c = i.min(n - 1 - i);
        }
        canon.sort_unstable();
        weights.push(canon.iter().map(|&c| rule.weights[c]).product());
        nodes.extend(index.iter().map(|&i| rule.nodes[i]));

        for d in (0..m).rev() {
            index[d] += 1;
            if index[d] < n {
                break;
            }
            index[d] = 0;
        }
    }
    Ok(QuadratureGrid {
        dim: m,
        order: n,
        prune_rate: 0.0,
        transformed: false,
        renormalized: false,
        nodes,
        weights,
    })
}

/// Keeps the `floor(K (1 - r))` highest-weight nodes of an untransformed
/// grid. Ties go to the node earlier in multi-index order; kept nodes stay
/// in their original order. Weights are left as they are.
pub fn prune(grid: QuadratureGrid, r: f64) -> Result<QuadratureGrid> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidPruneRate(r));
    }
    if grid.transformed {
        return Err(Error::InvalidArgument(
            "pruning applies to untransformed grids".into(),
        ));
    }
    let kept = pruned_count(grid.len() as u128, r) as usize;
    if kept == 0 {
        return Err(Error::EmptyGrid);
    }
    if kept == grid.len() {
        return Ok(QuadratureGrid {
            prune_rate: r,
            ..grid
        });
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid.weights[b].total_cmp(&grid.weights[a]).then(a.cmp(&b)));
    let mut keep = order[..kept].to_vec();
    keep.sort_unstable();

    let m = grid.dim;
    let mut nodes = Vec::with_capacity(kept * m);
    let mut weights = Vec::with_capacity(kept);
    for &i in &keep {
        nodes.extend_from_slice(grid.node(i));
        weights.push(grid.weights[i]);
    }
    Ok(QuadratureGrid {
        prune_rate: r,
        nodes,
        weights,
        ..grid
    })
}

/// Maps each node `z` to `mu + E diag(sqrt(lambda)) z`.
pub fn transform(grid: QuadratureGrid, density: &GaussianDensity) -> Result<QuadratureGrid> {
    if grid.dim != density.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim,
            got: density.dim(),
        });
    }
    let map = principal_axes(density.covariance())?;
    let mean = density.mean();
    let m = grid.dim;
    let mut nodes = Vec::with_capacity(grid.nodes.len());
    let mut out = vec![0.0; m];
    for z in grid.nodes.chunks_exact(m) {
        map.mul_vec_into(z, &mut out);
        nodes.extend(out.iter().zip(mean).map(|(a, mu)| mu + a));
    }
    Ok(QuadratureGrid {
        nodes,
        transformed: true,
        ..grid
    })
}

/// `E diag(sqrt(lambda))` for a covariance matrix; fails unless every
/// eigenvalue is positive.
pub(crate) fn principal_axes(cov: &SymMatrix) -> Result<Matrix> {
    let eig = eigen_sym(cov)?;
    let m = cov.dim();
    if let Some((index, &pivot)) = eig.eigenvalues.iter().enumerate().find(|(_, l)| **l <= 0.0) {
        return Err(Error::NotPositiveDefinite { index, pivot });
    }
    let mut map = eig.eigenvectors;
    for j in 0..m {
        let s = eig.eigenvalues[j].sqrt();
        for i in 0..m {
            map[(i, j)] *= s;
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhOptions {
    /// Upper bound on the unpruned node count `n^m`.
    pub node_budget: u64,
    /// Rescale pruned weights to sum to one. Off by default.
    pub renormalize: bool,
}

impl Default for GhOptions {
    fn default() -> Self {
        GhOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            renormalize: false,
        }
    }
}

/// Gauss-Hermite grid for `density`: rule, tensor product, pruning and
/// transform with default options.
pub fn gh_grid(density: &GaussianDensity, n: usize, r: f64) -> Result<QuadratureGrid> {
    gh_grid_with(density, n, r, &GhOptions::default())
}

pub fn gh_grid_with(
    density: &GaussianDensity,
    n: usize,
    r: f64,
    options: &GhOptions,
) -> Result<QuadratureGrid> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidPruneRate(r));
    }
    let m = density.dim();
    let rule = hermite_rule(n)?;
    let total = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > options.node_budget as u128 {
        return Err(Error::NodeBudgetExceeded {
            requested: total,
            after_pruning: pruned_count(total, r),
            budget: options.node_budget,
        });
    }
    let grid = prune(tensor_grid_with_budget(&rule, m, options.node_budget)?, r)?;
    let grid = if options.renormalize {
        grid.renormalize()
    } else {
        grid
    };
    transform(grid, density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn normal_moment(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            (1..k).step_by(2).map(|j| j as f64).product()
        }
    }

    #[test]
    fn one_node_rule() {
        let rule = hermite_rule(1).unwrap();
        assert_eq!(rule.nodes(), &[0.0]);
        assert_eq!(rule.weights(), &[1.0]);
    }

    #[test]
    fn two_node_rule() {
        let rule = hermite_rule(2).unwrap();
        assert_abs_diff_eq!(rule.nodes()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.nodes()[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights()[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn three_node_rule() {
        let rule = hermite_rule(3).unwrap();
        let s3 = 3f64.sqrt();
        let want_x = [-s3, 0.0, s3];
        let want_w = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        for i in 0..3 {
            assert_abs_diff_eq!(rule.nodes()[i], want_x[i], epsilon = 1e-14);
            assert_abs_diff_eq!(rule.weights()[i], want_w[i], epsilon = 1e-14);
        }
        assert_eq!(rule.nodes()[1], 0.0);
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(hermite_rule(0), Err(Error::OrderOutOfRange(0))));
        assert!(matches!(
            hermite_rule(101),
            Err(Error::OrderOutOfRange(101))
        ));
        assert!(hermite_rule(100).is_ok());
    }

    #[test]
    fn rule_invariants() {
        for n in 1..=100 {
            let rule = hermite_rule(n).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "n={n} sum={sum}");
            for i in 0..n {
                assert!(rule.weights()[i] > 0.0);
                assert!((rule.nodes()[i] + rule.nodes()[n - 1 - i]).abs() <= 1e-12);
                assert!((rule.weights()[i] - rule.weights()[n - 1 - i]).abs() <= 1e-12);
            }
            for w in rule.nodes().windows(2) {
                assert!(w[0] < w[1], "n={n} nodes not ascending");
            }
        }
    }

    #[test]
    fn moments_exact_up_to_degree_2n_minus_1() {
        for n in 1..=30 {
            let rule = hermite_rule(n).unwrap();
            for k in 0..2 * n {
                let got = rule.integrate(|x| x.powi(k as i32));
                let want = normal_moment(k);
                let scale = rule.integrate(|x| x.abs().powi(k as i32)).max(1.0);
                assert!(
                    (got - want).abs() <= 1e-9 * scale,
                    "n={n} k={k} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn tensor_two_by_two() {
        let grid = tensor_grid(&hermite_rule(2).unwrap(), 2).unwrap();
        assert_eq!(grid.len(), 4);
        for (x, w) in grid.iter() {
            assert!(x.iter().all(|v| (v.abs() - 1.0).abs() < 1e-14));
            assert_abs_diff_eq!(w, 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn tensor_three_by_three_center_weight() {
        let grid = tensor_grid(&hermite_rule(3).unwrap(), 2).unwrap();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid.node(4), &[0.0, 0.0]);
        assert_abs_diff_eq!(grid.weights()[4], 4.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(grid.total_weight(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn budget_guard() {
        let rule = hermite_rule(5).unwrap();
        let err = tensor_grid_with_budget(&rule, 10, 1_000_000).unwrap_err();
        assert!(matches!(
            err,
            Error::NodeBudgetExceeded {
                requested: 9_765_625,
                ..
            }
        ));

        let g = GaussianDensity::standard(10);
        let options = GhOptions {
            node_budget: 1_000_000,
            ..GhOptions::default()
        };
        match gh_grid_with(&g, 5, 0.2, &options) {
            Err(Error::NodeBudgetExceeded { after_pruning, .. }) => {
                assert_eq!(after_pruning, 7_812_500)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn prune_counts() {
        let g8 = tensor_grid(&hermite_rule(8).unwrap(), 2).unwrap();
        assert_eq!(prune(g8, 0.2).unwrap().len(), 51);
        let g15 = tensor_grid(&hermite_rule(15).unwrap(), 2).unwrap();
        assert_eq!(prune(g15, 0.2).unwrap().len(), 180);
        assert_eq!(node_count(5, 10, 0.2), 7_812_500);
    }

    #[test]
    fn prune_zero_is_noop() {
        let g = tensor_grid(&hermite_rule(6).unwrap(), 2).unwrap();
        let p = prune(g.clone(), 0.0).unwrap();
        assert_eq!(p.weights(), g.weights());
        assert_eq!(p.len(), 36);
    }

    #[test]
    fn prune_everything_is_error() {
        let g = tensor_grid(&hermite_rule(3).unwrap(), 2).unwrap();
        assert!(matches!(prune(g, 1.0), Err(Error::EmptyGrid)));
    }

    #[test]
    fn prune_keeps_heaviest_and_breaks_ties_by_index() {
        // n=3, m=2: weights 4/9 (centre), 1/9 (edges), 1/36 (corners).
        // r=0.2 keeps 7 nodes and drops the last two corners.
        let g = tensor_grid(&hermite_rule(3).unwrap(), 2).unwrap();
        let p = prune(g.clone(), 0.2).unwrap();
        assert_eq!(p.len(), 7);
        let corners: Vec<&[f64]> = p
            .iter()
            .filter(|(_, w)| (*w - 1.0 / 36.0).abs() < 1e-15)
            .map(|(x, _)| x)
            .collect();
        assert_eq!(corners.len(), 2);
        assert_eq!(corners[0], g.node(0));
        assert_eq!(corners[1], g.node(2));
    }

    #[test]
    fn prune_order_property_and_counts() {
        for n in 1..=15 {
            let rule = hermite_rule(n).unwrap();
            for m in 1..=5usize {
                if (n as u64).pow(m as u32) > 1_000_000 {
                    continue;
                }
                let full = tensor_grid(&rule, m).unwrap();
                for &r in &[0.0, 0.1, 0.2, 0.5] {
                    let floor = ((n.pow(m as u32)) as f64 * (1.0 - r) + 1e-9).floor() as usize;
                    let want = floor.max(1);
                    let p = match prune(full.clone(), r) {
                        Ok(p) => p,
                        Err(Error::EmptyGrid) => {
                            assert_eq!(want, 0);
                            continue;
                        }
                        Err(e) => panic!("{e}"),
                    };
                    assert_eq!(p.len(), want);
                    let min_kept = p.weights().iter().cloned().fold(f64::INFINITY, f64::min);
                    let kept_sum = p.total_weight();
                    let dropped_max = if want < full.len() {
                        let mut ws = full.weights().to_vec();
                        ws.sort_by(|a, b| b.total_cmp(a));
                        ws[want]
                    } else {
                        0.0
                    };
                    assert!(min_kept >= dropped_max);
                    assert!(kept_sum <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn transform_identity() {
        let g = GaussianDensity::standard(2);
        let grid = gh_grid(&g, 4, 0.0).unwrap();
        let raw = tensor_grid(&hermite_rule(4).unwrap(), 2).unwrap();
        for i in 0..grid.len() {
            assert_eq!(grid.node(i), raw.node(i));
        }
        assert!(grid.is_transformed());
    }

    #[test]
    fn transform_scalar() {
        let g = GaussianDensity::new(vec![2.0], SymMatrix::diagonal(&[4.0])).unwrap();
        let rule = hermite_rule(5).unwrap();
        let grid = gh_grid(&g, 5, 0.0).unwrap();
        for (i, (x, _)) in grid.iter().enumerate() {
            assert_abs_diff_eq!(x[0], 2.0 + 2.0 * rule.nodes()[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn transform_correlated_cloud() {
        let cov = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let g = GaussianDensity::new(vec![0.0, 0.0], cov).unwrap();
        let grid = gh_grid(&g, 8, 0.2).unwrap();
        assert_eq!(grid.len(), 51);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let raw = prune(tensor_grid(&hermite_rule(8).unwrap(), 2).unwrap(), 0.2).unwrap();
        for i in 0..grid.len() {
            let x = grid.node(i);
            let z = raw.node(i);
            let major = h * (x[0] + x[1]);
            let minor = h * (x[0] - x[1]);
            assert_abs_diff_eq!(major, 1.5f64.sqrt() * z[0], epsilon = 1e-12);
            assert_abs_diff_eq!(minor, 0.5f64.sqrt() * z[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn transform_dimension_mismatch() {
        let grid = tensor_grid(&hermite_rule(3).unwrap(), 2).unwrap();
        assert!(matches!(
            transform(grid, &GaussianDensity::standard(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_node_sits_at_mean() {
        let cov = SymMatrix::from_rows(&[vec![0.16, -0.15], vec![-0.15, 1.01]]).unwrap();
        let g = GaussianDensity::new(vec![1.5, 1.5], cov).unwrap();
        let grid = gh_grid(&g, 1, 0.2).unwrap();
        assert_eq!(grid.len(), 1);
        assert_abs_diff_eq!(grid.node(0)[0], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(grid.node(0)[1], 1.5, epsilon = 1e-15);
        assert_eq!(grid.weights(), &[1.0]);
    }

    #[test]
    fn odd_order_contains_mean() {
        let cov = SymMatrix::from_rows(&[vec![0.16, -0.15], vec![-0.15, 1.01]]).unwrap();
        let g = GaussianDensity::new(vec![1.5, 1.5], cov).unwrap();
        let at_mean = |grid: &QuadratureGrid| {
            grid.iter()
                .any(|(x, _)| (x[0] - 1.5).abs() < 1e-12 && (x[1] - 1.5).abs() < 1e-12)
        };
        assert!(at_mean(&gh_grid(&g, 5, 0.0).unwrap()));
        assert!(!at_mean(&gh_grid(&g, 4, 0.0).unwrap()));
    }

    #[test]
    fn renormalize_option() {
        let g = GaussianDensity::standard(2);
        let plain = gh_grid(&g, 5, 0.2).unwrap();
        assert!(plain.total_weight() < 1.0);
        let options = GhOptions {
            renormalize: true,
            ..GhOptions::default()
        };
        let norm = gh_grid_with(&g, 5, 0.2, &options).unwrap();
        assert!(norm.is_renormalized());
        assert_abs_diff_eq!(norm.total_weight(), 1.0, epsilon = 1e-12);
    }
}
