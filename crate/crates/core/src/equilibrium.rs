//! Vector equilibrium problem for a symmetric positive definite interaction
//! matrix on a family of intervals.
//!
//! Each measure is discretised on cells that are uniform in the angle `θ` of
//! `x = c - r cos θ` (Chebyshev spacing in `x`), with a density that is
//! constant in `θ` on each cell. The arcsine law is therefore represented
//! exactly and endpoint square-root singularities cost nothing. Log-kernel
//! integrals use the factorisation
//! `cos φ - cos θ = 2 sin((θ-φ)/2) sin((θ+φ)/2)`, whose singular parts have
//! closed-form antiderivatives; the smooth remainders go to Gauss rules.
//!
//! This module works in double precision: the problem is a well-conditioned
//! convex quadratic program and its outputs feed limits compared at the
//! percent level.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use nalgebra::{Cholesky, Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ext::{ExtComplex, ExtReal};
use crate::measures::{gauss_jacobi, Interval};
use crate::polyzeros::MomentSource;

/// Symmetric positive definite interaction matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionMatrix {
    entries: Vec<Vec<f64>>,
}

impl InteractionMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let m = entries.len();
        if m == 0 || entries.iter().any(|r| r.len() != m) {
            return Err(Error::Invalid("interaction matrix must be square and nonempty".into()));
        }
        for j in 0..m {
            for k in 0..j {
                if (entries[j][k] - entries[k][j]).abs() > 1e-14 * (1.0 + entries[j][k].abs()) {
                    return Err(Error::Invalid(format!("interaction matrix is not symmetric at ({j}, {k})")));
                }
            }
        }
        let dm = DMatrix::from_fn(m, m, |i, j| entries[i][j]);
        if Cholesky::new(dm).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(InteractionMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j][k]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.dim();
        let dm = DMatrix::from_fn(m, m, |i, j| self.entries[i][j]);
        let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// Tridiagonal matrix with unit diagonal and `-1/2` next to it.
pub fn nikishin_matrix(m: usize) -> Result<InteractionMatrix> {
    if m < 1 {
        return Err(Error::Invalid("the interaction matrix needs m ≥ 1".into()));
    }
    let entries = (0..m)
        .map(|j| {
            (0..m)
                .map(|k| match j.abs_diff(k) {
                    0 => 1.0,
                    1 => -0.5,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    InteractionMatrix::new(entries)
}

fn gauss(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static G8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static G6: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let cell = if n == 8 { &G8 } else { &G6 };
    cell.get_or_init(|| {
        let z = ExtReal::zero(128);
        let (x, w) = gauss_jacobi(&z, &z, n, 128).expect("Gauss–Legendre rule");
        (x.iter().map(|v| v.to_f64()).collect(), w.iter().map(|v| v.to_f64()).collect())
    })
}

/// `∫∫ log|s| ` antiderivative in one variable: `G'' = log|u|`.
fn big_f(u: f64) -> f64 {
    let a = u.abs();
    if a == 0.0 {
        0.0
    } else {
        0.5 * a * a * a.ln() - 0.75 * a * a
    }
}

/// `G' = log|t|`.
fn small_g(t: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        0.0
    } else {
        t * a.ln() - t
    }
}

/// `log(sin u / u)`, smooth on `(-π, π)`.
fn s1(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        -u * u / 6.0
    } else {
        (u.sin() / u).ln()
    }
}

/// `log(sin v / (v (π - v)))`, smooth on `[0, π]`.
fn s2(v: f64) -> f64 {
    if v < 1e-4 || PI - v < 1e-4 {
        let e = v.min(PI - v);
        -PI.ln() - e * e / 6.0 + e / PI
    } else {
        (v.sin() / (v * (PI - v))).ln()
    }
}

/// `∬ log|s - t|` over `[a0, a1] × [b0, b1]`.
fn rect_log_diff(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    big_f(a1 - b0) + big_f(a0 - b1) - big_f(a1 - b1) - big_f(a0 - b0)
}

fn rect_log_sum(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    rect_log_diff(a0, a1, -b1, -b0)
}

/// `∬ log|cos θ - cos φ| dθ dφ` over a pair of angle cells.
fn angle_pair(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let area = (a1 - a0) * (b1 - b0);
    let mut v = rect_log_diff(a0, a1, b0, b1) + rect_log_sum(a0, a1, b0, b1)
        + rect_log_sum(PI - a1, PI - a0, PI - b1, PI - b0)
        - 2.0 * LN_2 * area;
    let (gx, gw) = gauss(6);
    let (ta, ha, tb, hb) = (0.5 * (a0 + a1), 0.5 * (a1 - a0), 0.5 * (b0 + b1), 0.5 * (b1 - b0));
    let mut s = 0.0;
    for (xi, wi) in gx.iter().zip(gw) {
        let t = ta + ha * xi;
        for (xk, wk) in gx.iter().zip(gw) {
            let p = tb + hb * xk;
            s += wi * wk * (s1(0.5 * (t - p)) + s2(0.5 * (t + p)));
        }
    }
    v += s * ha * hb;
    v
}

/// `∫_{θ0}^{θ1} log|cos θ - cos φ| dθ` for `φ ∈ [0, π]`.
fn angle_line(t0: f64, t1: f64, phi: f64) -> f64 {
    let mut v = small_g(t1 - phi) - small_g(t0 - phi) + small_g(t1 + phi) - small_g(t0 + phi)
        - (small_g(2.0 * PI - t1 - phi) - small_g(2.0 * PI - t0 - phi))
        - 2.0 * LN_2 * (t1 - t0);
    let (gx, gw) = gauss(8);
    let (tc, h) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
    let mut s = 0.0;
    for (x, w) in gx.iter().zip(gw) {
        let t = tc + h * x;
        s += w * (s1(0.5 * (t - phi)) + s2(0.5 * (t + phi)));
    }
    v += s * h;
    v
}

/// One interval with its angle cells.
#[derive(Clone, Copy, Debug)]
struct Frame {
    c: f64,
    r: f64,
}

impl Frame {
    fn x(&self, theta: f64) -> f64 {
        self.c - self.r * theta.cos()
    }
}

/// `∫_{θ0}^{θ1} log|z - x(θ)| dθ` by adaptive Gauss when `z` is off the cell.
fn line_adaptive(f: Frame, t0: f64, t1: f64, z: Complex<f64>, depth: u32) -> f64 {
    let (x0, x1) = (f.x(t0), f.x(t1));
    let len = (x1 - x0).abs();
    let dx = if z.re < x0 {
        x0 - z.re
    } else if z.re > x1 {
        z.re - x1
    } else {
        0.0
    };
    let dist = dx.hypot(z.im);
    if dist > len || depth > 48 {
        let (gx, gw) = gauss(8);
        let (tc, h) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
        let mut s = 0.0;
        for (x, w) in gx.iter().zip(gw) {
            let xv = f.x(tc + h * x);
            s += w * 0.5 * ((z.re - xv).powi(2) + z.im * z.im).ln();
        }
        return s * h;
    }
    let tm = 0.5 * (t0 + t1);
    line_adaptive(f, t0, tm, z, depth + 1) + line_adaptive(f, tm, t1, z, depth + 1)
}

/// `∬ log|x(θ) - y(φ)|` for cells on two different intervals.
fn cross_adaptive(f: Frame, a0: f64, a1: f64, g: Frame, b0: f64, b1: f64, depth: u32) -> f64 {
    let (xa0, xa1) = (f.x(a0), f.x(a1));
    let (yb0, yb1) = (g.x(b0), g.x(b1));
    let (la, lb) = (xa1 - xa0, yb1 - yb0);
    let gap = (yb0 - xa1).max(xa0 - yb1).max(0.0);
    if gap > la.max(lb) || depth > 40 {
        let (gx, gw) = gauss(6);
        let (ta, ha, tb, hb) = (0.5 * (a0 + a1), 0.5 * (a1 - a0), 0.5 * (b0 + b1), 0.5 * (b1 - b0));
        let mut s = 0.0;
        for (xi, wi) in gx.iter().zip(gw) {
            let x = f.x(ta + ha * xi);
            for (xk, wk) in gx.iter().zip(gw) {
                s += wi * wk * (x - g.x(tb + hb * xk)).abs().ln();
            }
        }
        return s * ha * hb;
    }
    if la >= lb {
        let m = 0.5 * (a0 + a1);
        cross_adaptive(f, a0, m, g, b0, b1, depth + 1) + cross_adaptive(f, m, a1, g, b0, b1, depth + 1)
    } else {
        let m = 0.5 * (b0 + b1);
        cross_adaptive(f, a0, a1, g, b0, m, depth + 1) + cross_adaptive(f, a0, a1, g, m, b1, depth + 1)
    }
}

/// A probability measure on an interval with piecewise-constant density in
/// the Chebyshev angle.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMeasure {
    a: f64,
    b: f64,
    // angle boundaries 0 = θ_0 < … < θ_N = π
    theta: Vec<f64>,
    masses: Vec<f64>,
}

impl CellMeasure {
    /// Uniform angle cells; masses must be nonnegative.
    pub fn new(a: f64, b: f64, masses: Vec<f64>) -> Result<Self> {
        if !(a < b) || masses.is_empty() || masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::Invalid("cell measure needs a < b and nonnegative masses".into()));
        }
        let n = masses.len();
        let theta = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
        Ok(CellMeasure { a, b, theta, masses })
    }

    /// The arcsine (equilibrium) law of `[a, b]`.
    pub fn arcsine(a: f64, b: f64, cells: usize) -> Result<Self> {
        CellMeasure::new(a, b, vec![1.0 / cells as f64; cells])
    }

    fn frame(&self) -> Frame {
        Frame { c: 0.5 * (self.a + self.b), r: 0.5 * (self.b - self.a) }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn cell_count(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Cell boundaries in `x`.
    pub fn boundaries(&self) -> Vec<f64> {
        let f = self.frame();
        self.theta.iter().map(|t| f.x(*t)).collect()
    }

    /// Density with respect to `dx` at an interior point.
    pub fn density(&self, x: f64) -> f64 {
        let f = self.frame();
        let ct = ((f.c - x) / f.r).clamp(-1.0, 1.0);
        let th = ct.acos();
        let n = self.masses.len();
        let i = ((th / PI * n as f64) as usize).min(n - 1);
        let dth = self.theta[i + 1] - self.theta[i];
        self.masses[i] / (dth * f.r * th.sin().max(1e-300))
    }

    /// Logarithmic potential `∫ log(1/|z - x|) dλ(x)`.
    pub fn potential(&self, z: Complex<f64>) -> f64 {
        let f = self.frame();
        let on_support = z.im == 0.0 && z.re >= self.a && z.re <= self.b;
        let phi = if on_support { ((f.c - z.re) / f.r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        let mut v = 0.0;
        for (i, m) in self.masses.iter().enumerate() {
            if *m == 0.0 {
                continue;
            }
            let (t0, t1) = (self.theta[i], self.theta[i + 1]);
            let integral = if on_support {
                angle_line(t0, t1, phi) + f.r.ln() * (t1 - t0)
            } else {
                line_adaptive(f, t0, t1, z, 0)
            };
            v -= m * integral / (t1 - t0);
        }
        v
    }
}

impl MomentSource for CellMeasure {
    fn hull(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn rescaled_moments(&self, c: f64, h: f64, k: usize) -> Vec<f64> {
        let f = self.frame();
        let (gx, gw) = gauss(8);
        let mut out = vec![0.0; k + 1];
        for (i, m) in self.masses.iter().enumerate() {
            let (t0, t1) = (self.theta[i], self.theta[i + 1]);
            let (tc, hh) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
            for (x, w) in gx.iter().zip(gw) {
                let t = (f.x(tc + hh * x) - c) / h;
                let mut p = m * w * hh / (t1 - t0);
                for slot in out.iter_mut() {
                    *slot += p;
                    p *= t;
                }
            }
        }
        out
    }
}

/// How the solver's starting point is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Initialization {
    /// Mass proportional to the `x`-length of each cell.
    Uniform,
    /// Equal mass per angle cell, i.e. the arcsine law of each interval.
    #[default]
    Arcsine,
}

/// Solved equilibrium problem.
#[derive(Clone, Debug)]
pub struct EquilibriumSolution {
    pub lambdas: Vec<CellMeasure>,
    /// Equilibrium constant of each component.
    pub omega_prime: Vec<f64>,
    /// Tail sums `ω_j = Σ_{k ≥ j} ω'_k`.
    pub omega_cum: Vec<f64>,
    pub residual: f64,
    pub energy_log: Vec<f64>,
    pub interaction: InteractionMatrix,
}

/// Assembled quadratic form: `E(μ) = μᵀ M μ` with `M = [c_{jk} G_{jk}]`,
/// `G_{jk}[i][l]` the mean of `log 1/|x - y|` over cell `i` of interval `j`
/// and cell `l` of interval `k`.
struct Problem {
    m: usize,
    n: usize,
    mat: DMatrix<f64>,
}

fn assemble(frames: &[Frame], c: &InteractionMatrix, n: usize, exec: Exec) -> Problem {
    let m = frames.len();
    let th: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
    let dth = PI / n as f64;
    let rows = exec.map(m * n, |row| {
        let (j, i) = (row / n, row % n);
        let mut out = vec![0.0; m * n];
        for k in 0..m {
            let cjk = c.get(j, k);
            if cjk == 0.0 {
                continue;
            }
            for l in 0..n {
                let ll = if j == k {
                    angle_pair(th[i], th[i + 1], th[l], th[l + 1]) + frames[j].r.ln() * dth * dth
                } else {
                    cross_adaptive(frames[j], th[i], th[i + 1], frames[k], th[l], th[l + 1], 0)
                };
                out[k * n + l] = -cjk * ll / (dth * dth);
            }
        }
        out
    });
    let mut mat = DMatrix::from_fn(m * n, m * n, |r, s| rows[r][s]);
    // enforce exact symmetry
    let t = mat.transpose();
    mat = (mat + t) * 0.5;
    Problem { m, n, mat }
}

impl Problem {
    fn energy(&self, mu: &DVector<f64>) -> f64 {
        mu.dot(&(&self.mat * mu))
    }

    /// Block constants and the optimality residual.
    fn kkt(&self, mu: &DVector<f64>, w: &DVector<f64>) -> (Vec<f64>, f64) {
        let mut omegas = Vec::with_capacity(self.m);
        let mut worst = 0.0f64;
        for j in 0..self.m {
            let r = j * self.n..(j + 1) * self.n;
            let mass: f64 = mu.rows(r.start, self.n).sum();
            let om: f64 = r.clone().map(|i| mu[i] * w[i]).sum::<f64>() / mass;
            let thr = 1e-13 * mass / self.n as f64;
            let mut dev = 0.0f64;
            let mut viol = 0.0f64;
            for i in r {
                if mu[i] > thr {
                    dev = dev.max((w[i] - om).abs());
                } else {
                    viol = viol.max(om - w[i]);
                }
            }
            worst = worst.max(dev + viol.max(0.0));
            omegas.push(om);
        }
        (omegas, worst)
    }

    fn line_search(&self, mu: &DVector<f64>, g: &DVector<f64>, d: &DVector<f64>) -> f64 {
        let slope = g.dot(d);
        if slope >= 0.0 {
            return 0.0;
        }
        let curv = d.dot(&(&self.mat * d));
        if curv <= 0.0 {
            return 1.0;
        }
        let _ = mu;
        (-slope / (2.0 * curv)).clamp(0.0, 1.0)
    }

    fn project(&self, y: &mut DVector<f64>) {
        for j in 0..self.m {
            let r = j * self.n;
            let mut v: Vec<f64> = (0..self.n).map(|i| y[r + i]).collect();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let mut cum = 0.0;
            let mut tau = 0.0;
            for (k, vk) in v.iter().enumerate() {
                cum += vk;
                let t = (cum - 1.0) / (k + 1) as f64;
                if vk - t > 0.0 {
                    tau = t;
                }
            }
            for i in 0..self.n {
                y[r + i] = (y[r + i] - tau).max(0.0);
            }
        }
    }

    /// Primal active-set method for the equality-constrained subproblems,
    /// started from a feasible point. Monotone in energy.
    fn polish(&self, mu: &mut DVector<f64>, tol: f64, log: &mut Vec<f64>) {
        let total = self.m * self.n;
        let mut active: Vec<bool> = vec![true; total];
        for _ in 0..4 * total {
            let idx: Vec<usize> = (0..total).filter(|&i| active[i]).collect();
            let na = idx.len();
            let dim = na + self.m;
            let mut a = DMatrix::<f64>::zeros(dim, dim);
            let mut rhs = DVector::<f64>::zeros(dim);
            for (p, &i) in idx.iter().enumerate() {
                for (q, &l) in idx.iter().enumerate() {
                    a[(p, q)] = self.mat[(i, l)];
                }
                let blk = i / self.n;
                a[(p, na + blk)] = -1.0;
                a[(na + blk, p)] = 1.0;
            }
            for j in 0..self.m {
                rhs[na + j] = 1.0;
            }
            let Some(sol) = a.lu().solve(&rhs) else { return };
            let mut target = DVector::<f64>::zeros(total);
            for (p, &i) in idx.iter().enumerate() {
                target[i] = sol[p];
            }
            // step toward the subproblem minimiser, stopping at the first bound
            let mut t = 1.0f64;
            for &i in &idx {
                if target[i] < 0.0 {
                    t = t.min(mu[i] / (mu[i] - target[i]));
                }
            }
            let next = &*mu + (&target - &*mu) * t;
            if t < 1.0 {
                *mu = next.map(|v| v.max(0.0));
                for &i in &idx {
                    if mu[i] <= 1e-15 {
                        mu[i] = 0.0;
                        active[i] = false;
                    }
                }
                log.push(self.energy(mu));
                continue;
            }
            *mu = next;
            log.push(self.energy(mu));
            let w = &self.mat * &*mu;
            let omegas: Vec<f64> = (0..self.m).map(|j| sol[na + j]).collect();
            let worst = (0..total)
                .filter(|&i| !active[i])
                .map(|i| (i, omegas[i / self.n] - w[i]))
                .fold((usize::MAX, tol), |best, cand| if cand.1 > best.1 { cand } else { best });
            if worst.0 == usize::MAX {
                return;
            }
            active[worst.0] = true;
        }
    }
}

fn frames_of(intervals: &[Interval], c: &InteractionMatrix) -> Result<Vec<Frame>> {
    let m = intervals.len();
    if c.dim() != m {
        return Err(Error::Invalid(format!("{m} intervals for a {0}×{0} interaction matrix", c.dim())));
    }
    for j in 0..m {
        for k in j + 1..m {
            if c.get(j, k) != 0.0 && intervals[j].gap(&intervals[k]).is_none() {
                return Err(Error::Overlap {
                    first: j + 1,
                    second: k + 1,
                    detail: format!("{} vs {}", intervals[j], intervals[k]),
                });
            }
        }
    }
    Ok(intervals
        .iter()
        .map(|iv| {
            let (a, b) = iv.bounds_f64();
            Frame { c: 0.5 * (a + b), r: 0.5 * (b - a) }
        })
        .collect())
}

/// Solves with the arcsine starting point.
pub fn solve_equilibrium(
    intervals: &[Interval],
    c: &InteractionMatrix,
    cells: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumSolution> {
    solve_equilibrium_from(intervals, c, cells, tol, max_iter, Initialization::Arcsine)
}

/// Frank–Wolfe steps, then projected gradient with exact line search, then an
/// active-set polish. Every stage is monotone in the discrete energy.
pub fn solve_equilibrium_from(
    intervals: &[Interval],
    c: &InteractionMatrix,
    cells: usize,
    tol: f64,
    max_iter: usize,
    init: Initialization,
) -> Result<EquilibriumSolution> {
    solve_equilibrium_with(intervals, c, cells, tol, max_iter, init, Exec::default())
}

/// As [`solve_equilibrium_from`], with the assembly of the interaction blocks
/// run under `exec`.
pub fn solve_equilibrium_with(
    intervals: &[Interval],
    c: &InteractionMatrix,
    cells: usize,
    tol: f64,
    max_iter: usize,
    init: Initialization,
    exec: Exec,
) -> Result<EquilibriumSolution> {
    if cells < 2 {
        return Err(Error::Invalid("at least two cells per interval are required".into()));
    }
    let frames = frames_of(intervals, c)?;
    let prob = assemble(&frames, c, cells, exec);
    let (m, n) = (prob.m, prob.n);
    let total = m * n;
    let mut mu = DVector::<f64>::zeros(total);
    for j in 0..m {
        for i in 0..n {
            mu[j * n + i] = match init {
                Initialization::Arcsine => 1.0 / n as f64,
                Initialization::Uniform => {
                    let t0 = PI * i as f64 / n as f64;
                    let t1 = PI * (i + 1) as f64 / n as f64;
                    0.5 * (t0.cos() - t1.cos())
                }
            };
        }
    }
    let mut log = vec![prob.energy(&mu)];
    let lip = (0..total).map(|i| prob.mat.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / (2.0 * lip.max(1e-300));
    let fw_iters = max_iter.min(50);
    let mut iters = 0;
    let mut residual = f64::INFINITY;
    while iters < max_iter {
        let w = &prob.mat * &mu;
        residual = prob.kkt(&mu, &w).1;
        if residual <= tol {
            break;
        }
        let g = &w * 2.0;
        let d = if iters < fw_iters {
            let mut s = DVector::<f64>::zeros(total);
            for j in 0..m {
                let r = j * n;
                let best = (0..n).min_by(|&a, &b| g[r + a].partial_cmp(&g[r + b]).unwrap()).unwrap();
                s[r + best] = 1.0;
            }
            s - &mu
        } else {
            let mut y = &mu - &g * step;
            prob.project(&mut y);
            y - &mu
        };
        let t = prob.line_search(&mu, &g, &d);
        mu += d * t;
        log.push(prob.energy(&mu));
        iters += 1;
        if iters >= fw_iters + 200 {
            break;
        }
    }
    if residual > tol {
        prob.polish(&mut mu, tol * 0.1, &mut log);
    }
    let w = &prob.mat * &mu;
    let (omega_prime, residual) = prob.kkt(&mu, &w);
    if residual > tol {
        return Err(Error::NoConvergence { iterations: log.len(), residual });
    }
    let lambdas = intervals
        .iter()
        .enumerate()
        .map(|(j, iv)| {
            let (a, b) = iv.bounds_f64();
            let blk: Vec<f64> = (0..n).map(|i| mu[j * n + i].max(0.0)).collect();
            let s: f64 = blk.iter().sum();
            CellMeasure::new(a, b, blk.iter().map(|v| v / s).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let omega_cum = tail_sums(&omega_prime);
    Ok(EquilibriumSolution { lambdas, omega_prime, omega_cum, residual, energy_log: log, interaction: c.clone() })
}

fn tail_sums(w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    let mut acc = 0.0;
    for j in (0..w.len()).rev() {
        acc += w[j];
        out[j] = acc;
    }
    out
}

fn to_c64(z: &ExtComplex) -> Complex<f64> {
    let (re, im) = z.to_f64_pair();
    Complex::new(re, im)
}

impl EquilibriumSolution {
    pub fn m(&self) -> usize {
        self.lambdas.len()
    }

    /// `V^{λ_j}(z)` for 1-based `j`.
    pub fn potential(&self, j: usize, z: &ExtComplex) -> f64 {
        self.lambdas[j - 1].potential(to_c64(z))
    }

    /// Potentials of all components at `z`.
    pub fn potentials(&self, z: &ExtComplex) -> Vec<f64> {
        let zc = to_c64(z);
        self.lambdas.iter().map(|l| l.potential(zc)).collect()
    }

    /// The reversed-order system's solution read off this one.
    pub fn reversed(&self) -> EquilibriumSolution {
        let m = self.m();
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        let entries = (0..m).map(|j| (0..m).map(|k| self.interaction.get(m - 1 - j, m - 1 - k)).collect()).collect();
        let omega_prime = rev(&self.omega_prime);
        EquilibriumSolution {
            lambdas: self.lambdas.iter().rev().cloned().collect(),
            omega_cum: tail_sums(&omega_prime),
            omega_prime,
            residual: self.residual,
            energy_log: self.energy_log.clone(),
            interaction: InteractionMatrix { entries },
        }
    }

    pub fn to_document(&self) -> EquilibriumDocument {
        EquilibriumDocument {
            intervals: self.lambdas.iter().map(|l| [l.a, l.b]).collect(),
            cells: self.lambdas.first().map(|l| l.cell_count()).unwrap_or(0),
            boundaries: self.lambdas.iter().map(|l| l.boundaries()).collect(),
            masses: self.lambdas.iter().map(|l| l.masses.clone()).collect(),
            omega_prime: self.omega_prime.clone(),
            omega_cum: self.omega_cum.clone(),
            residual: self.residual,
            energy_log: self.energy_log.clone(),
            interaction: self.interaction.entries.clone(),
        }
    }

    pub fn from_document(doc: &EquilibriumDocument) -> Result<EquilibriumSolution> {
        let interaction = InteractionMatrix::new(doc.interaction.clone())?;
        let lambdas = doc
            .intervals
            .iter()
            .zip(&doc.masses)
            .map(|(iv, ms)| CellMeasure::new(iv[0], iv[1], ms.clone()))
            .collect::<Result<Vec<_>>>()?;
        if lambdas.len() != interaction.dim() || doc.omega_prime.len() != lambdas.len() {
            return Err(Error::Invalid("equilibrium document sizes disagree".into()));
        }
        Ok(EquilibriumSolution {
            lambdas,
            omega_cum: tail_sums(&doc.omega_prime),
            omega_prime: doc.omega_prime.clone(),
            residual: doc.residual,
            energy_log: doc.energy_log.clone(),
            interaction,
        })
    }
}

/// `(ω'_j, ω_j)` with `ω_j = Σ_{k ≥ j} ω'_k`.
pub fn equilibrium_constants(sol: &EquilibriumSolution) -> (Vec<f64>, Vec<f64>) {
    (sol.omega_prime.clone(), tail_sums(&sol.omega_prime))
}

/// `W_j(z) = Σ_k c_{jk} V^{λ_k}(z)` for 1-based `j`.
pub fn combined_potential(sol: &EquilibriumSolution, c: &InteractionMatrix, j: usize, z: &ExtComplex) -> f64 {
    let zc = to_c64(z);
    (0..sol.m())
        .filter(|&k| c.get(j - 1, k) != 0.0)
        .map(|k| c.get(j - 1, k) * sol.lambdas[k].potential(zc))
        .sum()
}

/// JSON form of an equilibrium solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDocument {
    pub intervals: Vec<[f64; 2]>,
    pub cells: usize,
    pub boundaries: Vec<Vec<f64>>,
    pub masses: Vec<Vec<f64>>,
    pub omega_prime: Vec<f64>,
    pub omega_cum: Vec<f64>,
    pub residual: f64,
    pub energy_log: Vec<f64>,
    pub interaction: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyzeros::moment_distance;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::from_f64(a, b, 64).unwrap()
    }

    fn real(x: f64) -> ExtComplex {
        ExtComplex::from_f64(x, 0.0, 64)
    }

    #[test]
    fn interaction_matrices() {
        assert_eq!(nikishin_matrix(1).unwrap().entries(), &[vec![1.0]]);
        assert_eq!(nikishin_matrix(2).unwrap().entries(), &[vec![1.0, -0.5], vec![-0.5, 1.0]]);
        assert!(nikishin_matrix(3).unwrap().eigenvalues().iter().all(|e| *e > 0.0));
        assert!(nikishin_matrix(0).is_err());
        assert!(matches!(
            InteractionMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn self_cell_closed_form() {
        // For a tiny angle cell near the middle x ≈ c - r cos θ is nearly
        // linear, so the cell against itself approaches h²(3/2 - log h) in x.
        let n = 4000;
        let (t0, t1) = (PI / 2.0, PI / 2.0 + PI / n as f64);
        let h = (t1.cos() - t0.cos()).abs();
        let exact_x = h * h * (1.5 - h.ln());
        let v = -angle_pair(t0, t1, t0, t1) * (h / (t1 - t0)).powi(2);
        assert!((v - exact_x).abs() < 1e-6 * exact_x, "{v} vs {exact_x}");
    }

    #[test]
    fn single_interval_equilibrium() {
        let c = nikishin_matrix(1).unwrap();
        for init in [Initialization::Uniform, Initialization::Arcsine] {
            let sol = solve_equilibrium_from(&[iv(-1.0, 1.0)], &c, 64, 1e-9, 500, init).unwrap();
            assert!((sol.omega_prime[0] - LN_2).abs() < 1e-8, "{:?}", sol.omega_prime);
            for x in [-0.999, -0.3, 0.0, 0.77] {
                assert!((sol.potential(1, &real(x)) - LN_2).abs() < 1e-8);
            }
            assert!(sol.potential(1, &real(10.0)) < LN_2);
            assert!(sol.energy_log.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
        let sol = solve_equilibrium(&[iv(0.0, 0.5)], &c, 32, 1e-9, 500).unwrap();
        assert!((sol.omega_prime[0] - 8f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn two_intervals_and_reversal() {
        let c = nikishin_matrix(2).unwrap();
        let ivs = [iv(0.0, 1.0), iv(2.0, 3.0)];
        let a = solve_equilibrium_from(&ivs, &c, 64, 1e-9, 500, Initialization::Uniform).unwrap();
        let b = solve_equilibrium_from(&ivs, &c, 64, 1e-9, 500, Initialization::Arcsine).unwrap();
        for j in 0..2 {
            assert!((a.lambdas[j].mass() - 1.0).abs() < 1e-12);
            assert!(moment_distance(&a.lambdas[j], &b.lambdas[j], 12) < 1e-9);
        }
        assert!((a.omega_prime[0] - 1.7071).abs() < 1e-3, "{:?}", a.omega_prime);
        let r = solve_equilibrium(&[iv(2.0, 3.0), iv(0.0, 1.0)], &c, 64, 1e-9, 500).unwrap();
        assert!(moment_distance(&r.lambdas[0], &a.lambdas[1], 12) < 1e-9);
        for x in [0.1, 0.5, 0.93] {
            let w = combined_potential(&a, &c, 1, &real(x));
            // pointwise values carry the O(h²) cell discretisation error
            assert!((w - a.omega_prime[0]).abs() < 2e-5, "{w} {:?}", a.omega_prime);
        }
        let (w1, cum) = equilibrium_constants(&a);
        assert_eq!(cum[1], w1[1]);
        assert!((cum[0] - w1[0] - w1[1]).abs() < 1e-15);
    }
}
