//! Jacobi-type measures on compact intervals and their Gauss quadratures.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::ext::{ExtComplex, ExtReal, MIN_PRECISION};
use crate::poly::Polynomial;

/// Closed bounded interval `[a, b]` with `a < b`.
#[derive(Clone, PartialEq)]
pub struct Interval {
    a: ExtReal,
    b: ExtReal,
}

impl Interval {
    pub fn new(a: ExtReal, b: ExtReal) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Invalid("interval endpoints must be finite".into()));
        }
        if a >= b {
            return Err(Error::Invalid(format!("empty interval [{a:?}, {b:?}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn from_f64(a: f64, b: f64, prec: u32) -> Result<Self> {
        Interval::new(ExtReal::from_f64(a, prec), ExtReal::from_f64(b, prec))
    }

    pub fn a(&self) -> &ExtReal {
        &self.a
    }

    pub fn b(&self) -> &ExtReal {
        &self.b
    }

    pub fn center(&self) -> ExtReal {
        &(&self.a + &self.b) / 2.0
    }

    pub fn half_width(&self) -> ExtReal {
        &(&self.b - &self.a) / 2.0
    }

    pub fn length(&self) -> ExtReal {
        &self.b - &self.a
    }

    pub fn bounds_f64(&self) -> (f64, f64) {
        (self.a.to_f64(), self.b.to_f64())
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: &ExtReal) -> bool {
        *x >= self.a && *x <= self.b
    }

    pub fn contains_open(&self, x: &ExtReal) -> bool {
        *x > self.a && *x < self.b
    }

    /// True when the complex point lies on the closed interval.
    pub fn contains_complex(&self, z: &ExtComplex) -> bool {
        z.im.is_zero() && self.contains(&z.re)
    }

    /// Euclidean distance from `z` to the interval (f64 accuracy).
    pub fn distance(&self, z: &ExtComplex) -> f64 {
        let (a, b) = self.bounds_f64();
        let (x, y) = z.to_f64_pair();
        let dx = if x < a {
            a - x
        } else if x > b {
            x - b
        } else {
            0.0
        };
        dx.hypot(y)
    }

    /// Positive gap between two intervals, or `None` when they overlap or touch.
    pub fn gap(&self, other: &Interval) -> Option<ExtReal> {
        if self.b < other.a {
            Some(&other.a - &self.b)
        } else if other.b < self.a {
            Some(&self.a - &other.b)
        } else {
            None
        }
    }

    /// Maps `x` in the interval to `t` in `[-1, 1]`.
    pub fn to_unit(&self, x: &ExtReal) -> ExtReal {
        &(x - &self.center()) / &self.half_width()
    }

    pub fn from_unit(&self, t: &ExtReal) -> ExtReal {
        &self.center() + &(&self.half_width() * t)
    }

    pub(crate) fn on_support_error(&self, z: &ExtComplex) -> Error {
        Error::OnSupport { point: format!("{:?}", z), support: format!("{self}") }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a.to_decimal(Some(12)), self.b.to_decimal(Some(12)))
    }
}

/// Weight `(x-a)^alpha (b-x)^beta poly(x)` relative to the interval it is attached to.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    pub alpha: ExtReal,
    pub beta: ExtReal,
    pub poly_factor: Polynomial,
}

impl WeightSpec {
    pub fn new(alpha: ExtReal, beta: ExtReal, poly_factor: Polynomial) -> Self {
        WeightSpec { alpha, beta, poly_factor }
    }

    pub fn lebesgue(prec: u32) -> Self {
        WeightSpec::jacobi(0.0, 0.0, prec)
    }

    pub fn jacobi(alpha: f64, beta: f64, prec: u32) -> Self {
        WeightSpec::new(
            ExtReal::from_f64(alpha, prec),
            ExtReal::from_f64(beta, prec),
            Polynomial::one(prec),
        )
    }

    pub fn with_poly(mut self, poly: Polynomial) -> Self {
        self.poly_factor = poly;
        self
    }

    /// Checks exponents and strict positivity of the polynomial factor on the
    /// closed interval (endpoint signs plus Sturm root isolation inside).
    pub fn validate(&self, interval: &Interval) -> Result<()> {
        if self.alpha <= -1.0 || self.beta <= -1.0 {
            return Err(Error::Invalid(format!(
                "Jacobi exponents must exceed -1 (alpha={:?}, beta={:?})",
                self.alpha, self.beta
            )));
        }
        let p = &self.poly_factor;
        if p.is_zero() {
            return Err(Error::Invalid("polynomial factor is identically zero".into()));
        }
        let pa = p.eval(interval.a());
        let pb = p.eval(interval.b());
        if !pa.is_positive() || !pb.is_positive() || p.sturm_count(interval.a(), interval.b()) > 0 {
            return Err(Error::Invalid(format!(
                "polynomial factor is not strictly positive on {interval}"
            )));
        }
        Ok(())
    }

    /// Pointwise weight value on the interval.
    pub fn eval(&self, interval: &Interval, x: &ExtReal) -> ExtReal {
        let l = (x - interval.a()).powf(&self.alpha);
        let r = (interval.b() - x).powf(&self.beta);
        &(&l * &r) * &self.poly_factor.eval(x)
    }
}

/// Nodes and weights of a positive quadrature rule.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub nodes: Vec<ExtReal>,
    pub weights: Vec<ExtReal>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&ExtReal) -> ExtReal>(&self, mut f: F) -> ExtReal {
        let prec = self.weights.first().map_or(MIN_PRECISION, |w| w.prec());
        let mut s = ExtReal::zero(prec);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s.add_mul(w, &f(x));
        }
        s
    }
}

/// Finite positive measure on an interval, carried by its Gauss quadrature.
#[derive(Clone, Debug)]
pub struct IntervalMeasure {
    interval: Interval,
    weight: WeightSpec,
    quad: Quadrature,
    prec: u32,
}

/// Builds the measure and its `node_count`-point Gauss–Jacobi rule.
pub fn make_measure(
    interval: Interval,
    weight: WeightSpec,
    node_count: usize,
    prec: u32,
) -> Result<IntervalMeasure> {
    if node_count == 0 {
        return Err(Error::Invalid("node count must be positive".into()));
    }
    if prec < MIN_PRECISION {
        return Err(Error::Invalid(format!("precision must be at least {MIN_PRECISION} bits")));
    }
    weight.validate(&interval)?;
    let (t, w) = gauss_jacobi(&weight.beta, &weight.alpha, node_count, prec)?;
    let h = interval.half_width();
    let c = interval.center();
    let scale = h.powf(&(&(&weight.alpha + &weight.beta) + 1.0));
    let mut nodes = Vec::with_capacity(node_count);
    let mut weights = Vec::with_capacity(node_count);
    for (ti, wi) in t.iter().zip(&w) {
        let x = &c + &(&h * ti);
        if !interval.contains_open(&x) {
            return Err(Error::Invalid("quadrature node fell on the interval boundary".into()));
        }
        let wx = &(&(wi * &scale) * &weight.poly_factor.eval(&x)).with_prec(prec);
        if !wx.is_positive() {
            return Err(Error::Invalid("non-positive quadrature weight".into()));
        }
        nodes.push(x.with_prec(prec));
        weights.push(wx.clone());
    }
    Ok(IntervalMeasure { interval, weight, quad: Quadrature { nodes, weights }, prec })
}

impl IntervalMeasure {
    /// Lebesgue measure on `[a, b]`.
    pub fn lebesgue(a: f64, b: f64, node_count: usize, prec: u32) -> Result<Self> {
        make_measure(Interval::from_f64(a, b, prec)?, WeightSpec::lebesgue(prec), node_count, prec)
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn nodes(&self) -> &[ExtReal] {
        &self.quad.nodes
    }

    pub fn weights(&self) -> &[ExtReal] {
        &self.quad.weights
    }

    pub fn node_count(&self) -> usize {
        self.quad.len()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mass(&self) -> ExtReal {
        self.moment(0)
    }

    pub fn moment(&self, k: usize) -> ExtReal {
        self.quad.integrate(|x| x.powi(k as i32))
    }

    pub fn integrate<F: FnMut(&ExtReal) -> ExtReal>(&self, f: F) -> ExtReal {
        self.quad.integrate(f)
    }

    /// `∫ dμ(x) / (z - x)`; real for real `z` off the support.
    pub fn cauchy_transform(&self, z: &ExtComplex) -> Result<ExtComplex> {
        if self.interval.contains_complex(z) {
            return Err(self.interval.on_support_error(z));
        }
        Ok(cauchy_sum(self.nodes(), self.weights(), z))
    }
}

/// `Σ w_i / (z - x_i)`.
pub(crate) fn cauchy_sum(nodes: &[ExtReal], weights: &[ExtReal], z: &ExtComplex) -> ExtComplex {
    let prec = z.prec().max(weights.first().map_or(MIN_PRECISION, |w| w.prec()));
    if z.is_real() {
        let mut s = ExtReal::zero(prec);
        for (x, w) in nodes.iter().zip(weights) {
            s.add_div(w, &(&z.re - x));
        }
        return ExtComplex::from_real(s);
    }
    let y2 = &z.im * &z.im;
    let mut re = ExtReal::zero(prec);
    let mut im = ExtReal::zero(prec);
    for (x, w) in nodes.iter().zip(weights) {
        let d = &z.re - x;
        let mut den = &d * &d;
        den += &y2;
        let f = w / &den;
        re.add_mul(&f, &d);
        im.add_mul(&f, &z.im);
    }
    ExtComplex::new(re, -im)
}

/// Three-term recurrence coefficients `(a_k, b_k)` of the monic Jacobi
/// polynomials for the weight `(1-t)^ra (1+t)^la` on `[-1, 1]`, `k < n`.
/// `b_0` holds the total mass.
pub fn jacobi_recurrence(ra: &ExtReal, la: &ExtReal, n: usize, prec: u32) -> (Vec<ExtReal>, Vec<ExtReal>) {
    let one = ExtReal::one(prec);
    let s = ra + la;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let two = ExtReal::from_i64(2, prec);
    let mu0 = &(&two.powf(&(&s + 1.0)) * &(&(ra + 1.0).gamma() * &(la + 1.0).gamma()))
        / &(&s + 2.0).gamma();
    let diff2 = &(la * la) - &(ra * ra);
    for k in 0..n {
        let kk = ExtReal::from_i64(2 * k as i64, prec);
        let t = &kk + &s;
        if k == 0 {
            a.push(&(la - ra) / &(&s + 2.0));
            b.push(mu0.clone());
            continue;
        }
        a.push(&diff2 / &(&t * &(&t + 2.0)));
        let kf = ExtReal::from_i64(k as i64, prec);
        let bk = if k == 1 {
            &(&(&(ra + 1.0) * &(la + 1.0)) * 4.0) / &(&(&(&s + 2.0) * &(&s + 2.0)) * &(&s + 3.0))
        } else {
            let num = &(&(&(&kf * &(&kf + ra)) * &(&kf + la)) * &(&kf + &s)) * 4.0;
            let den = &(&(&t * &t) * &(&t + 1.0)) * &(&t - &one);
            &num / &den
        };
        b.push(bk);
    }
    (a, b)
}

/// Gauss–Jacobi rule on `[-1, 1]` for `(1-t)^ra (1+t)^la`: Golub–Welsch in
/// double precision for starting values, Newton polish and Christoffel
/// weights in extended precision.
pub fn gauss_jacobi(ra: &ExtReal, la: &ExtReal, n: usize, prec: u32) -> Result<(Vec<ExtReal>, Vec<ExtReal>)> {
    let work = prec + 64;
    let (a, b) = jacobi_recurrence(&ra.with_prec(work), &la.with_prec(work), n + 1, work);
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = a[k].to_f64();
        if k + 1 < n {
            let off = b[k + 1].to_f64().sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut guesses: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    guesses.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let sqrt_b: Vec<ExtReal> = b.iter().map(|x| x.sqrt()).collect();
    let eps = crate::ext::tolerance(work, 15, 16);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for g in guesses {
        let mut t = ExtReal::from_f64(g, work);
        let mut converged = false;
        for _ in 0..60 {
            let (p, d) = monic_jacobi_eval(&a, &b, n, &t);
            let step = &p / &d;
            t -= &step;
            if step.abs() <= eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: 60, residual: f64::NAN });
        }
        // Christoffel number: 1 / Σ p̂_k(t)^2 over orthonormal p̂_0..p̂_{n-1}.
        let mut prev = ExtReal::zero(work);
        let mut cur = sqrt_b[0].recip();
        let mut sum = &cur * &cur;
        for k in 0..n.saturating_sub(1) {
            let mut next = &(&t - &a[k]) * &cur;
            if k > 0 {
                next -= &(&sqrt_b[k] * &prev);
            }
            next /= &sqrt_b[k + 1];
            sum.add_mul(&next, &next);
            prev = cur;
            cur = next;
        }
        nodes.push(t.with_prec(prec));
        weights.push(sum.recip().with_prec(prec));
    }
    for w in nodes.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Invalid("Gauss–Jacobi nodes collapsed during refinement".into()));
        }
    }
    Ok((nodes, weights))
}

fn monic_jacobi_eval(a: &[ExtReal], b: &[ExtReal], n: usize, t: &ExtReal) -> (ExtReal, ExtReal) {
    let prec = t.prec();
    let mut p0 = ExtReal::zero(prec);
    let mut p1 = ExtReal::one(prec);
    let mut d0 = ExtReal::zero(prec);
    let mut d1 = ExtReal::zero(prec);
    for k in 0..n {
        let x = t - &a[k];
        let mut p2 = &x * &p1;
        let mut d2 = &(&x * &d1) + &p1;
        if k > 0 {
            p2 -= &(&b[k] * &p0);
            d2 -= &(&b[k] * &d0);
        }
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Closed-form `∫_a^b x^k (x-a)^alpha (b-x)^beta dx`.
pub fn jacobi_moment(interval: &Interval, alpha: &ExtReal, beta: &ExtReal, k: usize, prec: u32) -> ExtReal {
    let a = interval.a().with_prec(prec);
    let l = interval.length().with_prec(prec);
    let beta1 = beta + 1.0;
    let g_beta1 = beta1.gamma();
    let mut sum = ExtReal::zero(prec);
    let mut binom = ExtReal::one(prec);
    for i in 0..=k {
        let x = alpha + (i as i64 + 1);
        let beta_fn = &(&x.gamma() * &g_beta1) / &(&x + &beta1).gamma();
        let term = &(&(&binom * &a.powi((k - i) as i32)) * &l.powi(i as i32)) * &beta_fn;
        sum += &term;
        binom = &(&binom * (k - i) as i64) / (i as i64 + 1);
    }
    &sum * &l.powf(&(&(alpha + beta) + 1.0))
}

/// Closed-form `∫ x^k dσ` for a measure built by [`make_measure`].
pub fn exact_moment(measure: &IntervalMeasure, k: usize, prec: u32) -> ExtReal {
    let w = measure.weight();
    let mut s = ExtReal::zero(prec);
    for (i, c) in w.poly_factor.coeffs().iter().enumerate() {
        s.add_mul(c, &jacobi_moment(measure.interval(), &w.alpha, &w.beta, k + i, prec));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::tolerance;

    const P: u32 = 256;

    fn rel(a: &ExtReal, b: &ExtReal) -> f64 {
        (&(a - b) / b).abs().to_f64()
    }

    #[test]
    fn lebesgue_unit_interval() {
        let m = IntervalMeasure::lebesgue(0.0, 1.0, 64, P).unwrap();
        assert!(rel(&m.mass(), &ExtReal::one(P)) < 1e-70);
        assert!(rel(&m.moment(3), &ExtReal::ratio(1, 4, P)) < 1e-70);
        assert!(m.weights().iter().all(|w| w.is_positive()));
    }

    #[test]
    fn chebyshev_mass_and_second_moment() {
        let m = make_measure(
            Interval::from_f64(-1.0, 1.0, P).unwrap(),
            WeightSpec::jacobi(-0.5, -0.5, P),
            40,
            P,
        )
        .unwrap();
        let pi = ExtReal::pi(P);
        assert!(rel(&m.mass(), &pi) < 1e-70);
        assert!(rel(&m.moment(2), &(&pi / 2.0)) < 1e-70);
    }

    #[test]
    fn rejects_negative_factor() {
        let w = WeightSpec::lebesgue(P).with_poly(Polynomial::from_f64(&[-2.0, 1.0], P));
        assert!(make_measure(Interval::from_f64(0.0, 1.0, P).unwrap(), w, 16, P).is_err());
        let w = WeightSpec::lebesgue(P).with_poly(Polynomial::from_f64(&[0.25, -1.0, 1.0], P));
        assert!(make_measure(Interval::from_f64(0.0, 1.0, P).unwrap(), w, 16, P).is_err());
        let w = WeightSpec::jacobi(-1.0, 0.0, P);
        assert!(make_measure(Interval::from_f64(0.0, 1.0, P).unwrap(), w, 16, P).is_err());
    }

    #[test]
    fn exactness_against_closed_form() {
        let tol = tolerance(P, 1, 2).to_f64();
        let configs = [(-0.5, 0.25, vec![1.0]), (1.5, -0.7, vec![2.0, 1.0, 0.5]), (0.0, 3.0, vec![1.0])];
        for (al, be, poly) in configs {
            let iv = Interval::from_f64(-0.5, 2.0, P).unwrap();
            let w = WeightSpec::jacobi(al, be, P).with_poly(Polynomial::from_f64(&poly, P));
            let nodes = 20;
            let m = make_measure(iv, w, nodes, P).unwrap();
            let d = poly.len() - 1;
            for k in 0..=(2 * nodes - 1 - d) {
                let exact = exact_moment(&m, k, P);
                let scale = exact.abs().max(&(&m.mass() * &ExtReal::from_f64(2.0, P).powi(k as i32)));
                let err = (&(&m.moment(k) - &exact) / &scale).abs().to_f64();
                assert!(err <= tol, "alpha={al} beta={be} k={k}");
            }
        }
    }

    #[test]
    fn cauchy_transform_values() {
        let m = IntervalMeasure::lebesgue(0.0, 1.0, 80, P).unwrap();
        let v = m.cauchy_transform(&ExtComplex::from_f64(2.0, 0.0, P)).unwrap();
        assert!(v.im.is_zero());
        let ln2 = ExtReal::from_i64(2, P).ln();
        assert!(rel(&v.re, &ln2) < 1e-40);
        assert!(m.cauchy_transform(&ExtComplex::from_f64(0.5, 0.0, P)).is_err());
        assert!(m.cauchy_transform(&ExtComplex::from_f64(0.5, 0.1, P)).is_ok());
    }

    #[test]
    fn cauchy_transform_decay() {
        let m = IntervalMeasure::lebesgue(0.0, 1.0, 32, P).unwrap();
        let mass = m.mass();
        let mut errs = Vec::new();
        for r in [10.0, 100.0, 1000.0] {
            let z = ExtComplex::from_f64(r * 0.6, r * 0.8, P);
            let v = m.cauchy_transform(&z).unwrap();
            let zv = &z * &v;
            let e = (&zv - &ExtComplex::from_real(mass.clone())).abs().to_f64();
            errs.push(e);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
        }
    }
}
