//! Classical kernels, convex solvers for the probability-simplex and dual SVM
//! forms, and a brute-force grid oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::feature_map::FeatureMapSpec;
use crate::params::Hyperparams;

pub const PSD_TOL: f64 = 1e-8;
const SYM_TOL: f64 = 1e-10;
pub const SIMPLEX_REL_TOL: f64 = 1e-10;
pub const DUAL_REL_TOL: f64 = 1e-13;
pub const MAX_ITER: usize = 100_000;
const DIVERGENCE_BOUND: f64 = 1e12;
const STEP_REL_TOL: f64 = 1e-9;

/// Symmetric M x M kernel matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<KernelMatrix> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidInput("kernel matrix must be square".into()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite kernel entry".into()));
        }
        let k = KernelMatrix { size, entries };
        for i in 0..size {
            for j in 0..i {
                if (k.get(i, j) - k.get(j, i)).abs() > SYM_TOL {
                    return Err(Error::InvalidInput(format!("kernel not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(k)
    }

    /// Kernel of an arbitrary function over `points`.
    pub fn from_fn<F: Fn(&[f64], &[f64]) -> f64>(points: &[Vec<f64>], f: F) -> Result<KernelMatrix> {
        let rows = points.iter().map(|x| points.iter().map(|z| f(x, z)).collect()).collect();
        KernelMatrix::from_rows(rows)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Smallest eigenvalue of K + shift * (all-ones).
    pub fn min_eigenvalue(&self, shift: f64) -> f64 {
        let n = self.size;
        let m = DMatrix::from_fn(n, n, |i, j| self.get(i, j) + shift);
        SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn has_unit_diagonal(&self, tol: f64) -> bool {
        (0..self.size).all(|i| (self.get(i, i) - 1.0).abs() <= tol)
    }
}

/// Quantum kernel k(x_i, x_j) = |<phi(x_i)|phi(x_j)>|^2 over the training set.
pub fn kernel_matrix(set: &TrainingSet, fmap: &FeatureMapSpec) -> Result<KernelMatrix> {
    let states = set
        .points()
        .par_iter()
        .map(|x| fmap.state(x))
        .collect::<Result<Vec<_>>>()?;
    let rows = states
        .par_iter()
        .map(|a| states.iter().map(|b| a.fidelity(b)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    KernelMatrix::from_rows(rows)
}

/// (<x, z> + c)^d
pub fn poly_kernel(x: &[f64], z: &[f64], c: f64, d: i32) -> f64 {
    (x.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + c).powi(d)
}

/// exp(-gamma/2 |x - z|^2)
pub fn rbf_kernel(x: &[f64], z: &[f64], gamma: f64) -> f64 {
    (-0.5 * gamma * x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).exp()
}

fn check_problem(k: &KernelMatrix, y: &[i8], hp: &Hyperparams) -> Result<()> {
    hp.validate()?;
    if y.len() != k.size() {
        return Err(Error::DimensionMismatch { expected: k.size(), found: y.len() });
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let min_eig = k.min_eigenvalue(hp.inv_lambda());
    if min_eig < -PSD_TOL {
        return Err(Error::NonPsd(min_eig));
    }
    Ok(())
}

/// Q_ij = y_i y_j (K_ij + 1/lambda)
fn signed_gram(k: &KernelMatrix, y: &[i8], inv_lambda: f64) -> Vec<f64> {
    let n = k.size();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = (y[i] * y[j]) as f64 * (k.get(i, j) + inv_lambda);
        }
    }
    q
}

/// W(alpha) = sum_ij alpha_i alpha_j y_i y_j [K_ij + 1/lambda] + (1/C) sum_i alpha_i^2
pub fn simplex_objective(k: &KernelMatrix, y: &[i8], hp: &Hyperparams, alpha: &[f64]) -> f64 {
    let n = k.size();
    let mut w = 0.0;
    for i in 0..n {
        for j in 0..n {
            w += alpha[i] * alpha[j] * (y[i] * y[j]) as f64 * (k.get(i, j) + hp.inv_lambda());
        }
    }
    w + hp.inv_c() * alpha.iter().map(|a| a * a).sum::<f64>()
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            tau = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

fn project_orthant(v: &mut [f64]) {
    for x in v.iter_mut() {
        *x = x.max(0.0);
    }
}

/// Projection onto {beta >= 0, sum_i beta_i y_i = 0} by bisection on the
/// multiplier of the equality constraint.
fn project_balanced(v: &mut [f64], y: &[i8]) {
    if !y.iter().any(|&l| l > 0) || !y.iter().any(|&l| l < 0) {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let h = |mu: f64| -> f64 {
        v.iter()
            .zip(y)
            .map(|(&x, &l)| l as f64 * (x - mu * l as f64).max(0.0))
            .sum()
    };
    let bound = v.iter().fold(0.0f64, |a, x| a.max(x.abs())) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    for (x, &l) in v.iter_mut().zip(y) {
        *x = (*x - mu * l as f64).max(0.0);
    }
}

struct PgOutcome {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Projected gradient for f(x) = 1/2 x^T A x - b^T x with Barzilai-Borwein
/// trial steps and backtracking. Stops when the relative objective change
/// drops below `rel_tol` and the step is below `STEP_REL_TOL` relative to x;
/// BB steps can stall for one iteration, which the step guard filters out.
fn pg_minimize<P: Fn(&mut [f64])>(
    a: &[f64],
    b: &[f64],
    x0: Vec<f64>,
    project: P,
    rel_tol: f64,
    max_iter: usize,
) -> Result<PgOutcome> {
    let n = b.len();
    let f = |x: &[f64]| -> f64 {
        let mut v = 0.0;
        for i in 0..n {
            let ax: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
            v += 0.5 * x[i] * ax - b[i] * x[i];
        }
        v
    };
    let grad = |x: &[f64]| -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum::<f64>() - b[i]).collect()
    };
    let mut x = x0;
    project(&mut x);
    let mut fx = f(&x);
    let mut g = grad(&x);
    let diag_max = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let mut step = 1.0 / diag_max.max(1e-12);
    for it in 1..=max_iter {
        let mut t = step;
        let (x_new, f_new) = loop {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            project(&mut cand);
            let d: Vec<f64> = cand.iter().zip(&x).map(|(c, xi)| c - xi).collect();
            let fc = f(&cand);
            let gd: f64 = g.iter().zip(&d).map(|(gi, di)| gi * di).sum();
            let dd: f64 = d.iter().map(|v| v * v).sum();
            if fc <= fx + gd + dd / (2.0 * t) + 1e-15 * fx.abs() || t < 1e-30 {
                break (cand, fc);
            }
            t *= 0.5;
        };
        if x_new.iter().any(|v| v.abs() > DIVERGENCE_BOUND) || !f_new.is_finite() {
            return Err(Error::NonConvergence { solver: "projected gradient (diverging)", iterations: it });
        }
        let g_new = grad(&x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(p, q)| p - q).collect();
        let r: Vec<f64> = g_new.iter().zip(&g).map(|(p, q)| p - q).collect();
        let sr: f64 = s.iter().zip(&r).map(|(p, q)| p * q).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        step = if sr > 0.0 { (ss / sr).clamp(1e-12, 1e12) } else { (2.0 * t).min(1e12) };
        let change = (fx - f_new).abs();
        let scale = fx.abs().max(f_new.abs()).max(1e-300);
        let xx: f64 = x_new.iter().map(|v| v * v).sum();
        x = x_new;
        fx = f_new;
        g = g_new;
        if (change <= rel_tol * scale && ss <= STEP_REL_TOL * STEP_REL_TOL * xx.max(1e-300)) || ss == 0.0 {
            return Ok(PgOutcome { x, value: fx, iterations: it, converged: true });
        }
    }
    Ok(PgOutcome { x, value: fx, iterations: max_iter, converged: false })
}

/// Simplex-QP optimum and the recovered dual quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub alpha: Vec<f64>,
    /// Optimal W, written d-tilde*.
    pub objective: f64,
    pub beta: Vec<f64>,
    /// B = 1/W
    pub b_total: f64,
    /// b* = (1/lambda) sum_i alpha_i y_i
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimise W(alpha) over the probability simplex.
pub fn solve_probability_simplex_qp(k: &KernelMatrix, y: &[i8], hp: &Hyperparams) -> Result<SolverResult> {
    check_problem(k, y, hp)?;
    let n = k.size();
    let mut a = signed_gram(k, y, hp.inv_lambda());
    for (idx, v) in a.iter_mut().enumerate() {
        *v *= 2.0;
        if idx % (n + 1) == 0 {
            *v += 2.0 * hp.inv_c();
        }
    }
    let x0 = vec![1.0 / n as f64; n];
    let out = pg_minimize(&a, &vec![0.0; n], x0, project_simplex, SIMPLEX_REL_TOL, MAX_ITER)?;
    let alpha = out.x;
    let w = simplex_objective(k, y, hp, &alpha);
    let b_total = 1.0 / w;
    Ok(SolverResult {
        beta: alpha.iter().map(|a| a * b_total).collect(),
        bias: hp.inv_lambda() * alpha.iter().zip(y).map(|(a, &l)| a * l as f64).sum::<f64>(),
        objective: w,
        b_total,
        alpha,
        iterations: out.iterations,
        converged: out.converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualResult {
    pub beta: Vec<f64>,
    /// d*
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// max_{beta >= 0} sum beta - 1/2 beta^T Q beta - 1/(2C) |beta|^2 with
/// Q_ij = y_i y_j (K_ij + 1/lambda), by projected gradient ascent.
pub fn solve_dual_svm(k: &KernelMatrix, y: &[i8], hp: &Hyperparams) -> Result<DualResult> {
    check_problem(k, y, hp)?;
    let n = k.size();
    let mut a = signed_gram(k, y, hp.inv_lambda());
    for i in 0..n {
        a[i * (n + 1)] += hp.inv_c();
    }
    let out = pg_minimize(&a, &vec![1.0; n], vec![0.0; n], project_orthant, DUAL_REL_TOL, MAX_ITER)?;
    Ok(DualResult { beta: out.x, value: -out.value, iterations: out.iterations, converged: out.converged })
}

/// Standard kernel SVM with the equality constraint sum beta_i y_i = 0 and
/// an explicit bias, used as a classical baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSvm {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub value: f64,
    pub support: Vec<usize>,
    /// True when no support vector existed and the median estimate was used.
    pub median_bias: bool,
}

impl ClassicalSvm {
    /// sum_i beta_i y_i k(x_i, x) + b for a precomputed kernel row.
    pub fn decision(&self, y: &[i8], kernel_row: &[f64]) -> f64 {
        self.beta.iter().zip(y).zip(kernel_row).map(|((b, &l), k)| b * l as f64 * k).sum::<f64>() + self.bias
    }
}

/// Solve the constrained dual (ignoring lambda) and recover the bias from
/// `b = y_q (1 - beta_q / C) - sum_i beta_i y_i k(x_q, x_i)` averaged over
/// support vectors, or the median of `y_i - <w, x_i>` when there are none.
pub fn solve_constrained_dual(k: &KernelMatrix, y: &[i8], c: f64) -> Result<ClassicalSvm> {
    let hp = Hyperparams { lambda: f64::MAX, c };
    check_problem(k, y, &hp)?;
    let n = k.size();
    let mut a = signed_gram(k, y, 0.0);
    for i in 0..n {
        a[i * (n + 1)] += hp.inv_c();
    }
    let out = pg_minimize(&a, &vec![1.0; n], vec![0.0; n], |v: &mut [f64]| project_balanced(v, y), DUAL_REL_TOL, MAX_ITER)?;
    let beta = out.x;
    let bmax = beta.iter().copied().fold(0.0, f64::max);
    let support: Vec<usize> = (0..n).filter(|&q| bmax > 0.0 && beta[q] > 1e-6 * bmax).collect();
    let margin = |q: usize| -> f64 { (0..n).map(|i| beta[i] * y[i] as f64 * k.get(q, i)).sum() };
    let (bias, median_bias) = if support.is_empty() {
        let mut r: Vec<f64> = (0..n).map(|i| y[i] as f64 - margin(i)).collect();
        r.sort_by(f64::total_cmp);
        let mid = r.len() / 2;
        let med = if r.len() % 2 == 1 { r[mid] } else { 0.5 * (r[mid - 1] + r[mid]) };
        (med, true)
    } else {
        let sum: f64 = support
            .iter()
            .map(|&q| y[q] as f64 * (1.0 - hp.inv_c() * beta[q]) - margin(q))
            .sum();
        (sum / support.len() as f64, false)
    };
    Ok(ClassicalSvm { beta, bias, value: -out.value, support, median_bias })
}

/// Exhaustive search over the simplex grid {alpha : alpha_i in res * Z}.
pub fn brute_force_simplex_oracle(
    k: &KernelMatrix,
    y: &[i8],
    hp: &Hyperparams,
    resolution: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = k.size();
    if n > 4 {
        return Err(Error::TooLarge(format!("grid oracle supports M <= 4, got {n}")));
    }
    if y.len() != n || n == 0 {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidInput(format!("grid resolution {resolution} outside (0, 1]")));
    }
    let steps = (1.0 / resolution).round() as usize;
    let eval = |counts: &[usize]| -> f64 {
        let alpha: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
        simplex_objective(k, y, hp, &alpha)
    };
    // Parallel over the first coordinate; ties resolve to the smallest grid index.
    let best = (0..=steps)
        .into_par_iter()
        .map(|c0| {
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut counts = vec![0usize; n];
            counts[0] = c0;
            enumerate(&mut counts, 1, steps - c0, &mut |cs| {
                let v = eval(cs);
                if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                    best = Some((v, cs.to_vec()));
                }
            });
            best.expect("non-empty grid slice")
        })
        .reduce_with(|p, q| if q.0 < p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p })
        .expect("non-empty grid");
    let alpha = best.1.iter().map(|&c| c as f64 / steps as f64).collect();
    Ok((alpha, best.0))
}

fn enumerate<F: FnMut(&[usize])>(counts: &mut Vec<usize>, pos: usize, remaining: usize, visit: &mut F) {
    if pos == counts.len() {
        if remaining == 0 {
            visit(counts);
        }
        return;
    }
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        enumerate(counts, pos + 1, remaining - c, visit);
    }
}

/// f(x) = sum_i alpha_i y_i [k(x_i, x) + 1/lambda]
pub fn classical_decision(
    xhat: &[f64],
    alpha: &[f64],
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    lambda: f64,
) -> Result<f64> {
    if alpha.len() != set.len() {
        return Err(Error::DimensionMismatch { expected: set.len(), found: alpha.len() });
    }
    let target = fmap.state(xhat)?;
    let mut f = 0.0;
    for (i, x) in set.points().iter().enumerate() {
        f += alpha[i] * set.label(i) * (fmap.state(x)?.fidelity(&target)? + 1.0 / lambda);
    }
    Ok(f)
}

/// Decision value from a precomputed kernel row k(x_i, x).
pub fn decision_from_kernel_row(alpha: &[f64], y: &[i8], row: &[f64], lambda: f64) -> f64 {
    alpha.iter().zip(y).zip(row).map(|((a, &l), k)| a * l as f64 * (k + 1.0 / lambda)).sum()
}
