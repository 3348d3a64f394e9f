//! Real roots of polynomials (and of real functions known to have only simple
//! real zeros), zero-counting measures, interlacing, logarithmic potentials
//! and moment distances between probability measures.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ext::{tolerance, ExtComplex, ExtReal};
use crate::measures::Interval;
use crate::poly::Polynomial;

/// Initial scan density (points per expected root) and the doubling cap.
pub const GRID_PER_ROOT: usize = 8;
pub const MAX_DOUBLINGS: usize = 6;

/// Chebyshev–Lobatto abscissae `c - h cos(π i / g)`, `i = 0..=g`.
fn chebyshev_grid(iv: &Interval, g: usize) -> Vec<ExtReal> {
    let prec = iv.a().prec();
    let c = iv.center();
    let h = iv.half_width();
    let pi = ExtReal::pi(prec);
    let mut pts: Vec<ExtReal> = (0..=g)
        .map(|i| {
            let th = &(&pi * i as i64) / g as i64;
            &c - &(&h * &th.cos())
        })
        .collect();
    pts[0] = iv.a().clone();
    pts[g] = iv.b().clone();
    pts
}

/// Isolates sign changes of `f` on `iv` until exactly `count` are found.
/// Returns brackets `(lo, f(lo), hi, f(hi))`; an exact zero on the grid is
/// returned as a degenerate bracket.
pub fn bracket_sign_changes<F>(f: &F, iv: &Interval, count: usize) -> Result<Vec<[ExtReal; 4]>>
where
    F: Fn(&ExtReal) -> ExtReal,
{
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut g = GRID_PER_ROOT * count;
    let mut found = 0;
    for _ in 0..=MAX_DOUBLINGS {
        let pts = chebyshev_grid(iv, g);
        let vals: Vec<ExtReal> = pts.iter().map(f).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i + 1 < pts.len() {
            let (s0, s1) = (vals[i].signum_i(), vals[i + 1].signum_i());
            if s0 == 0 {
                out.push([pts[i].clone(), vals[i].clone(), pts[i].clone(), vals[i].clone()]);
            } else if s1 != 0 && s0 != s1 {
                out.push([pts[i].clone(), vals[i].clone(), pts[i + 1].clone(), vals[i + 1].clone()]);
            }
            i += 1;
        }
        if vals[pts.len() - 1].signum_i() == 0 {
            let l = pts.len() - 1;
            out.push([pts[l].clone(), vals[l].clone(), pts[l].clone(), vals[l].clone()]);
        }
        found = out.len();
        if found == count {
            return Ok(out);
        }
        if found > count {
            break;
        }
        g *= 2;
    }
    Err(Error::CountMismatch { expected: count, found })
}

/// Shrinks a sign-change bracket below `tol` by Illinois false position,
/// falling back to bisection whenever a step fails to halve the bracket.
pub fn refine_root<F>(f: &F, bracket: &[ExtReal; 4], tol: &ExtReal) -> ExtReal
where
    F: Fn(&ExtReal) -> ExtReal,
{
    let [lo0, flo0, hi0, fhi0] = bracket;
    if lo0 == hi0 {
        return lo0.clone();
    }
    let (mut lo, mut flo, mut hi, mut fhi) = (lo0.clone(), flo0.clone(), hi0.clone(), fhi0.clone());
    let mut side = 0i32;
    let mut width = &hi - &lo;
    for _ in 0..4000 {
        if width <= *tol {
            break;
        }
        let mut c = &(&(&lo * &fhi) - &(&hi * &flo)) / &(&fhi - &flo);
        if !(c > lo && c < hi) {
            c = &(&lo + &hi) / 2.0;
        }
        let fc = f(&c);
        match fc.signum_i() {
            0 => return c,
            s if s == fhi.signum_i() => {
                hi = c;
                fhi = fc;
                if side == 1 {
                    flo = &flo / 2.0;
                }
                side = 1;
            }
            _ => {
                lo = c;
                flo = fc;
                if side == -1 {
                    fhi = &fhi / 2.0;
                }
                side = -1;
            }
        }
        let nw = &hi - &lo;
        if nw > &width / 2.0 {
            let mid = &(&lo + &hi) / 2.0;
            let fm = f(&mid);
            match fm.signum_i() {
                0 => return mid,
                s if s == fhi.signum_i() => {
                    hi = mid;
                    fhi = fm;
                }
                _ => {
                    lo = mid;
                    flo = fm;
                }
            }
            side = 0;
        }
        width = &hi - &lo;
    }
    &(&lo + &hi) / 2.0
}

/// All roots of `p` inside `bracket`, which must be exactly `deg p` simple real
/// roots. The polynomial is first re-expanded on `[-1, 1]`.
pub fn real_roots(p: &Polynomial, bracket: &Interval) -> Result<Vec<ExtReal>> {
    if p.is_zero() {
        return Err(Error::Invalid("the zero polynomial has no isolated roots".into()));
    }
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = p.prec().max(bracket.a().prec());
    let c = bracket.center();
    let h = bracket.half_width();
    let q = p.compose_affine(&c, &h).monic();
    let unit = Interval::new(ExtReal::from_i64(-1, prec), ExtReal::one(prec))?;
    let f = |t: &ExtReal| q.eval(t);
    let tol = tolerance(prec, 1, 3);
    let roots_t = match bracket_sign_changes(&f, &unit, n) {
        Ok(br) => br.iter().map(|b| refine_root(&f, b, &tol)).collect(),
        Err(_) => companion_roots(&q, prec)?,
    };
    let mut roots: Vec<ExtReal> = roots_t.iter().map(|t| &c + &(&h * t)).collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Real roots anywhere on the line, bracketed by the Cauchy bound.
pub fn real_roots_unbounded(p: &Polynomial) -> Result<Vec<ExtReal>> {
    let prec = p.prec();
    let m = p.monic();
    let bound = m.coeffs()[..m.coeffs().len().saturating_sub(1)]
        .iter()
        .fold(ExtReal::zero(prec), |acc, c| acc.max(&c.abs()));
    let r = &bound + 1.0;
    real_roots(p, &Interval::new(-&r, r)?)
}

/// Companion-matrix fallback on `[-1, 1]`: double-precision eigenvalues
/// polished by Newton's method at twice the working precision.
fn companion_roots(q: &Polynomial, prec: u32) -> Result<Vec<ExtReal>> {
    let n = q.degree();
    let mut cm = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        cm[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        cm[(i, n - 1)] = -q.coeffs()[i].to_f64();
    }
    let eig = cm.complex_eigenvalues();
    let wide = 2 * prec;
    let qw = Polynomial::new(q.coeffs().iter().map(|c| c.with_prec(wide)).collect(), wide);
    let tol = tolerance(wide, 1, 2);
    let mut roots: Vec<ExtReal> = Vec::new();
    for e in eig.iter() {
        if e.im.abs() > 1e-6 * (1.0 + e.re.abs()) || e.re.abs() > 1.0 + 1e-6 {
            continue;
        }
        let mut t = ExtReal::from_f64(e.re, wide);
        for _ in 0..200 {
            let (v, d) = qw.eval_with_derivative(&t);
            if d.is_zero() {
                break;
            }
            let step = &v / &d;
            t -= &step;
            if step.abs() <= tol {
                break;
            }
        }
        if t.abs() <= 1.0 + 1e-12 && qw.eval(&t).abs().to_f64() < 1e-8 {
            roots.push(t.with_prec(prec));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sep = tolerance(prec, 1, 4);
    roots.dedup_by(|a, b| (&*a - &*b).abs() <= sep);
    if roots.len() != n {
        return Err(Error::CountMismatch { expected: n, found: roots.len() });
    }
    Ok(roots)
}

/// Finite positive atomic measure.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    points: Vec<ExtReal>,
    weights: Vec<ExtReal>,
    mass: ExtReal,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<ExtReal>, weights: Vec<ExtReal>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::Invalid("a discrete measure needs matching nonempty points and weights".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Invalid("discrete measure weights must be positive".into()));
        }
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&i, &j| points[i].partial_cmp(&points[j]).unwrap());
        let points: Vec<ExtReal> = idx.iter().map(|&i| points[i].clone()).collect();
        let weights: Vec<ExtReal> = idx.iter().map(|&i| weights[i].clone()).collect();
        let mass = weights.iter().skip(1).fold(weights[0].clone(), |s, w| &s + w);
        Ok(DiscreteMeasure { points, weights, mass })
    }

    pub fn points(&self) -> &[ExtReal] {
        &self.points
    }

    pub fn weights(&self) -> &[ExtReal] {
        &self.weights
    }

    pub fn mass(&self) -> &ExtReal {
        &self.mass
    }

    pub fn is_normalized(&self) -> bool {
        (&self.mass - 1.0).abs().to_f64() < 1e-30
    }

    /// `V(z) = Σ w_i log(1/|z - t_i|)`.
    pub fn log_potential(&self, z: &ExtComplex) -> Result<ExtReal> {
        let prec = self.mass.prec().max(z.prec());
        let mut v = ExtReal::zero(prec);
        for (t, w) in self.points.iter().zip(&self.weights) {
            let d = z.sub_real(t).abs();
            if d.is_zero() {
                return Err(Error::OnSupport { point: format!("{z:?}"), support: "an atom".into() });
            }
            v -= &(w * &d.ln());
        }
        Ok(v)
    }
}

/// Normalised zero-counting measure.
pub fn counting_measure(zeros: &[ExtReal]) -> Result<DiscreteMeasure> {
    if zeros.is_empty() {
        return Err(Error::Invalid("counting measure of an empty zero set".into()));
    }
    let prec = zeros[0].prec();
    let w = ExtReal::ratio(1, zeros.len() as i64, prec);
    DiscreteMeasure::new(zeros.to_vec(), vec![w; zeros.len()])
}

/// Strict interlacing of sorted `za` (length `n`) inside sorted `zb` (length `n + 1`).
pub fn interlaces(za: &[ExtReal], zb: &[ExtReal]) -> Result<bool> {
    if zb.len() != za.len() + 1 {
        return Err(Error::Invalid(format!(
            "interlacing needs sizes n and n+1, got {} and {}",
            za.len(),
            zb.len()
        )));
    }
    Ok(za.iter().enumerate().all(|(i, a)| zb[i] < *a && *a < zb[i + 1]))
}

/// Anything whose moments can be taken after an affine change of variable.
pub trait MomentSource {
    /// Convex hull of the support.
    fn hull(&self) -> (f64, f64);
    /// `∫ ((x - c)/h)^i dμ` for `i = 0..=k`.
    fn rescaled_moments(&self, c: f64, h: f64, k: usize) -> Vec<f64>;
}

impl MomentSource for DiscreteMeasure {
    fn hull(&self) -> (f64, f64) {
        (self.points[0].to_f64(), self.points[self.points.len() - 1].to_f64())
    }

    fn rescaled_moments(&self, c: f64, h: f64, k: usize) -> Vec<f64> {
        let prec = self.mass.prec();
        let ce = ExtReal::from_f64(c, prec);
        let he = ExtReal::from_f64(h, prec);
        let mut out = vec![ExtReal::zero(prec); k + 1];
        for (x, w) in self.points.iter().zip(&self.weights) {
            let t = &(x - &ce) / &he;
            let mut p = w.clone();
            for slot in out.iter_mut() {
                *slot += &p;
                p *= &t;
            }
        }
        out.iter().map(|v| v.to_f64()).collect()
    }
}

/// `max_{k ≤ K} |∫ t^k dμ - ∫ t^k dν|` with the common hull mapped onto `[-1, 1]`.
pub fn moment_distance<A, B>(mu: &A, nu: &B, k: usize) -> f64
where
    A: MomentSource + ?Sized,
    B: MomentSource + ?Sized,
{
    let (a0, b0) = mu.hull();
    let (a1, b1) = nu.hull();
    let (lo, hi) = (a0.min(a1), b0.max(b1));
    let c = 0.5 * (lo + hi);
    let h = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let m1 = mu.rescaled_moments(c, h, k);
    let m2 = nu.rescaled_moments(c, h, k);
    m1.iter().zip(&m2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
