//! Dense univariate polynomials with extended-precision coefficients.

use crate::ext::{ExtComplex, ExtReal};

/// Coefficients in ascending degree order, with no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<ExtReal>,
    prec: u32,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ExtReal>, prec: u32) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let prec = coeffs.iter().map(|c| c.prec()).max().unwrap_or(prec).max(prec);
        Polynomial { coeffs, prec }
    }

    pub fn from_f64(coeffs: &[f64], prec: u32) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| ExtReal::from_f64(c, prec)).collect(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Polynomial { coeffs: Vec::new(), prec }
    }

    pub fn constant(c: ExtReal) -> Self {
        let p = c.prec();
        Polynomial::new(vec![c], p)
    }

    pub fn one(prec: u32) -> Self {
        Polynomial::constant(ExtReal::one(prec))
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[ExtReal], prec: u32) -> Self {
        let mut c = vec![ExtReal::one(prec)];
        for r in roots {
            let mut next = vec![ExtReal::zero(prec); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= &(ci * r);
            }
            c = next;
        }
        Polynomial::new(c, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[ExtReal] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ExtReal {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ExtReal::zero(self.prec))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0 (see [`Polynomial::is_zero`]).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> ExtReal {
        self.coeffs.last().cloned().unwrap_or_else(|| ExtReal::zero(self.prec))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == 1.0)
    }

    pub fn monic(&self) -> Polynomial {
        let lead = self.leading();
        if lead.is_zero() {
            return self.clone();
        }
        let mut c: Vec<ExtReal> = self.coeffs.iter().map(|x| x / &lead).collect();
        if let Some(l) = c.last_mut() {
            *l = ExtReal::one(self.prec);
        }
        Polynomial::new(c, self.prec)
    }

    pub fn scale(&self, s: &ExtReal) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect(), self.prec)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect(), self.prec)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        Polynomial::new(c, self.prec.max(other.prec))
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let prec = self.prec.max(other.prec);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(prec);
        }
        let mut c = vec![ExtReal::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j].add_mul(a, b);
            }
        }
        Polynomial::new(c, prec)
    }

    pub fn derivative(&self) -> Polynomial {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as i64)
            .collect();
        Polynomial::new(c, self.prec)
    }

    pub fn eval(&self, x: &ExtReal) -> ExtReal {
        let mut acc = ExtReal::zero(self.prec.max(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Value and derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, x: &ExtReal) -> (ExtReal, ExtReal) {
        let prec = self.prec.max(x.prec());
        let mut p = ExtReal::zero(prec);
        let mut d = ExtReal::zero(prec);
        for c in self.coeffs.iter().rev() {
            d *= x;
            d += &p;
            p *= x;
            p += c;
        }
        (p, d)
    }

    pub fn eval_complex(&self, z: &ExtComplex) -> ExtComplex {
        if z.is_real() {
            return ExtComplex::from_real(self.eval(&z.re));
        }
        let mut acc = ExtComplex::zero(self.prec.max(z.prec()));
        for c in self.coeffs.iter().rev() {
            acc = &acc * z;
            acc.re += c;
        }
        acc
    }

    /// `q(t) = p(c + h t)`.
    pub fn compose_affine(&self, c: &ExtReal, h: &ExtReal) -> Polynomial {
        // Taylor shift by c (synthetic division), then scale powers of t by h.
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &a[j + 1] * c;
                a[j] += &t;
            }
        }
        let mut hp = ExtReal::one(self.prec);
        for coef in a.iter_mut() {
            *coef *= &hp;
            hp *= h;
        }
        Polynomial::new(a, self.prec)
    }

    /// Remainder of division by `d` (leading coefficient of `d` must be nonzero).
    pub fn rem(&self, d: &Polynomial) -> Polynomial {
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        let lead = d.leading();
        while r.len() > dn && !r.is_empty() {
            let k = r.len() - 1;
            let q = &r[k] / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                let t = &q * dc;
                r[k - dn + i] -= &t;
            }
            r.pop();
        }
        Polynomial::new(r, self.prec)
    }

    /// Drops coefficients below `rel` times the largest one; used to tame
    /// rounding residue in Euclidean remainder sequences.
    fn clean(&self, rel: &ExtReal) -> Polynomial {
        let big = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .fold(ExtReal::zero(self.prec), |m, c| m.max(&c));
        let cut = &big * rel;
        let c = self
            .coeffs
            .iter()
            .map(|c| if c.abs() <= cut { ExtReal::zero(self.prec) } else { c.clone() })
            .collect();
        Polynomial::new(c, self.prec)
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`
    /// by a Sturm sequence.
    pub fn sturm_count(&self, a: &ExtReal, b: &ExtReal) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let rel = crate::ext::tolerance(self.prec, 3, 4);
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() || seq[n - 1].degree() == 0 {
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).clean(&rel).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        let changes = |x: &ExtReal| {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| p.eval(x).signum_i())
                .filter(|s| *s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(a).saturating_sub(changes(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    #[test]
    fn roots_roundtrip_and_eval() {
        let r: Vec<ExtReal> = [2.0, 3.0].iter().map(|&x| ExtReal::from_f64(x, P)).collect();
        let p = Polynomial::from_roots(&r, P);
        assert_eq!(p, Polynomial::from_f64(&[6.0, -5.0, 1.0], P));
        assert!(p.eval(&ExtReal::from_f64(2.0, P)).is_zero());
        let (v, d) = p.eval_with_derivative(&ExtReal::from_f64(4.0, P));
        assert_eq!(v.to_f64(), 2.0);
        assert_eq!(d.to_f64(), 3.0);
    }

    #[test]
    fn affine_composition() {
        let p = Polynomial::from_f64(&[1.0, -2.0, 0.5, 3.0], P);
        let c = ExtReal::from_f64(0.75, P);
        let h = ExtReal::from_f64(-1.5, P);
        let q = p.compose_affine(&c, &h);
        for t in [-1.0, -0.3, 0.0, 0.8] {
            let t = ExtReal::from_f64(t, P);
            let x = &c + &(&h * &t);
            assert!((&q.eval(&t) - &p.eval(&x)).abs().to_f64() < 1e-60);
        }
    }

    #[test]
    fn sturm_counts() {
        let p = Polynomial::from_f64(&[6.0, -5.0, 1.0], P);
        let z = |x: f64| ExtReal::from_f64(x, P);
        assert_eq!(p.sturm_count(&z(0.0), &z(10.0)), 2);
        assert_eq!(p.sturm_count(&z(2.5), &z(10.0)), 1);
        assert_eq!(Polynomial::from_f64(&[1.0, 0.0, 1.0], P).sturm_count(&z(-9.0), &z(9.0)), 0);
        assert_eq!(Polynomial::from_f64(&[-2.0, 1.0], P).sturm_count(&z(0.0), &z(1.0)), 0);
    }

    #[test]
    fn complex_eval_matches_real() {
        let p = Polynomial::from_f64(&[1.0, 2.0, 3.0], P);
        let z = ExtComplex::from_f64(0.0, 1.0, P);
        let v = p.eval_complex(&z);
        assert_eq!(v.re.to_f64(), -2.0);
        assert_eq!(v.im.to_f64(), 2.0);
    }
}

/// `Σ c_k T_k((x - center) / half_width)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    pub center: ExtReal,
    pub half_width: ExtReal,
    pub coeffs: Vec<ExtReal>,
}

impl ChebSeries {
    pub fn new(center: ExtReal, half_width: ExtReal, coeffs: Vec<ExtReal>) -> Self {
        ChebSeries { center, half_width, coeffs }
    }

    pub fn prec(&self) -> u32 {
        self.center.prec()
    }

    /// Leading coefficient of `T_n((x - c)/h)` as a polynomial in `x`.
    pub fn chebyshev_leading(n: usize, half_width: &ExtReal) -> ExtReal {
        if n == 0 {
            return ExtReal::one(half_width.prec());
        }
        let two = ExtReal::from_i64(2, half_width.prec());
        &two.powi(n as i32 - 1) / &half_width.powi(n as i32)
    }

    /// `T_0..T_n` at the scaled abscissa of `x`.
    pub fn basis(&self, n: usize, x: &ExtReal) -> Vec<ExtReal> {
        chebyshev_values(n, &(&(x - &self.center) / &self.half_width))
    }

    pub fn eval(&self, x: &ExtReal) -> ExtReal {
        let t = &(x - &self.center) / &self.half_width;
        let prec = self.prec().max(x.prec());
        let mut b1 = ExtReal::zero(prec);
        let mut b2 = ExtReal::zero(prec);
        let t2 = &t * 2.0;
        for c in self.coeffs.iter().skip(1).rev() {
            let mut b0 = &t2 * &b1;
            b0 -= &b2;
            b0 += c;
            b2 = b1;
            b1 = b0;
        }
        let mut out = &t * &b1;
        out -= &b2;
        if let Some(c0) = self.coeffs.first() {
            out += c0;
        }
        out
    }

    pub fn eval_complex(&self, z: &ExtComplex) -> ExtComplex {
        if z.is_real() {
            return ExtComplex::from_real(self.eval(&z.re));
        }
        let t = &z.sub_real(&self.center) / &self.half_width;
        let prec = self.prec().max(z.prec());
        let mut b1 = ExtComplex::zero(prec);
        let mut b2 = ExtComplex::zero(prec);
        let two = ExtReal::from_i64(2, prec);
        let t2 = t.scale(&two);
        for c in self.coeffs.iter().skip(1).rev() {
            let mut b0 = &(&t2 * &b1) - &b2;
            b0.re += c;
            b2 = b1;
            b1 = b0;
        }
        let mut out = &(&t * &b1) - &b2;
        if let Some(c0) = self.coeffs.first() {
            out.re += c0;
        }
        out
    }

    /// Expansion in monomials of `x`.
    pub fn to_polynomial(&self) -> Polynomial {
        let prec = self.prec();
        let inv_h = self.half_width.recip();
        let t = Polynomial::new(vec![-(&self.center * &inv_h), inv_h.clone()], prec);
        let mut acc = Polynomial::zero(prec);
        let mut t_prev = Polynomial::one(prec);
        let mut t_cur = t.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            let tk = match k {
                0 => Polynomial::one(prec),
                1 => t.clone(),
                _ => {
                    let next = t.mul(&t_cur).scale(&ExtReal::from_i64(2, prec)).sub(&t_prev);
                    t_prev = std::mem::replace(&mut t_cur, next);
                    t_cur.clone()
                }
            };
            acc = acc.add(&tk.scale(c));
        }
        acc
    }
}

/// `T_0(t), …, T_n(t)` by the three-term recurrence.
pub fn chebyshev_values(n: usize, t: &ExtReal) -> Vec<ExtReal> {
    let prec = t.prec();
    let mut out = Vec::with_capacity(n + 1);
    out.push(ExtReal::one(prec));
    if n >= 1 {
        out.push(t.clone());
    }
    let t2 = t * 2.0;
    for k in 2..=n {
        let v = &(&t2 * &out[k - 1]) - &out[k - 2];
        out.push(v);
    }
    out
}

#[cfg(test)]
mod cheb_tests {
    use super::*;

    #[test]
    fn series_matches_monomial_expansion() {
        let p = 200;
        let s = ChebSeries::new(
            ExtReal::from_f64(2.5, p),
            ExtReal::from_f64(0.5, p),
            [0.3, -1.0, 0.25, 2.0, 0.125].iter().map(|&c| ExtReal::from_f64(c, p)).collect(),
        );
        let q = s.to_polynomial();
        assert_eq!(q.degree(), 4);
        let lead = &ChebSeries::chebyshev_leading(4, &s.half_width) * &s.coeffs[4];
        assert!((&q.leading() - &lead).abs().to_f64() < 1e-50);
        for x in [2.0, 2.3, 2.9, 4.0] {
            let x = ExtReal::from_f64(x, p);
            assert!((&q.eval(&x) - &s.eval(&x)).abs().to_f64() < 1e-50);
        }
        let z = ExtComplex::from_f64(1.0, 0.7, p);
        let a = q.eval_complex(&z);
        let b = s.eval_complex(&z);
        assert!((&a - &b).abs().to_f64() < 1e-50);
    }
}
