//! Extended-precision real and complex scalars backed by MPFR.
//!
//! Every binary operation rounds to the larger precision of its two operands,
//! so mixing values built at different precisions never silently truncates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Smallest precision (in bits) accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 64;

/// Number of full decimal digits carried by `bits` of binary mantissa.
pub fn decimal_digits(bits: u32) -> u32 {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as u32
}

/// `10^(-p * num / den)` where `p` is the decimal precision of `bits`.
///
/// `tolerance(bits, 1, 2)` is the default "to tolerance" threshold.
pub fn tolerance(bits: u32, num: u32, den: u32) -> ExtReal {
    let p = decimal_digits(bits) as f64 * num as f64 / den as f64;
    let ten = ExtReal::from_i64(10, bits);
    ten.powf(&ExtReal::from_f64(-p, bits))
}

#[derive(Clone)]
pub struct ExtReal(Float);

impl ExtReal {
    pub fn zero(prec: u32) -> Self {
        ExtReal(Float::new(prec.max(MIN_PRECISION)))
    }

    pub fn one(prec: u32) -> Self {
        ExtReal(Float::with_val(prec.max(MIN_PRECISION), 1))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec.max(MIN_PRECISION), x))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec.max(MIN_PRECISION), x))
    }

    /// Exact-as-possible `p / q`.
    pub fn ratio(p: i64, q: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        ExtReal(Float::with_val(prec, p) / Float::with_val(prec, q))
    }

    /// Parses a decimal numeral (e.g. `"-0.125"`, `"3e-2"`) at the given precision.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::Parse(format!("invalid numeral {s:?}: {e}")))?;
        let v = Float::with_val(prec.max(MIN_PRECISION), parsed);
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite numeral {s:?}")));
        }
        Ok(ExtReal(v))
    }

    pub fn pi(prec: u32) -> Self {
        ExtReal(Float::with_val(prec.max(MIN_PRECISION), Constant::Pi))
    }

    pub fn from_float(f: Float) -> Self {
        ExtReal(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Copy rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        ExtReal(Float::with_val(prec.max(MIN_PRECISION), &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum_i(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_sign_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.abs_ref()))
    }

    pub fn sqrt(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn ln(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn exp(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn sin(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.sin_ref()))
    }

    pub fn cos(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.cos_ref()))
    }

    pub fn gamma(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.gamma_ref()))
    }

    pub fn powi(&self, k: i32) -> Self {
        ExtReal(Float::with_val(self.prec(), (&self.0).pow(k)))
    }

    pub fn powf(&self, e: &ExtReal) -> Self {
        let p = self.prec().max(e.prec());
        ExtReal(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    pub fn recip(&self) -> Self {
        ExtReal(Float::with_val(self.prec(), self.0.recip_ref()))
    }

    pub fn max(&self, other: &ExtReal) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &ExtReal) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `self += a * b` with a single rounding.
    pub fn add_mul(&mut self, a: &ExtReal, b: &ExtReal) {
        self.0 += &a.0 * &b.0;
    }

    /// `self += a / b`.
    pub fn add_div(&mut self, a: &ExtReal, b: &ExtReal) {
        self.0 += Float::with_val(self.0.prec(), &a.0 / &b.0);
    }

    pub fn set_zero(&mut self) {
        self.0.assign(0u32);
    }

    /// Scientific-notation decimal string with `digits` significant digits
    /// (full precision when `None`).
    pub fn to_decimal(&self, digits: Option<usize>) -> String {
        let d = digits.unwrap_or(decimal_digits(self.prec()) as usize + 2).max(1);
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(d))
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(Some(24)))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision()))
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl<'a, 'b> $tr<&'b ExtReal> for &'a ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: &'b ExtReal) -> ExtReal {
                let p = self.0.prec().max(rhs.0.prec());
                ExtReal(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: ExtReal) -> ExtReal {
                &self $op &rhs
            }
        }
        impl<'b> $tr<&'b ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: &'b ExtReal) -> ExtReal {
                &self $op rhs
            }
        }
        impl<'a> $tr<ExtReal> for &'a ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: ExtReal) -> ExtReal {
                self $op &rhs
            }
        }
        impl<'a> $tr<f64> for &'a ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: f64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: f64) -> ExtReal {
                &self $op rhs
            }
        }
        impl<'a> $tr<i64> for &'a ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: i64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<i64> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: i64) -> ExtReal {
                &self $op rhs
            }
        }
        impl<'b> $atr<&'b ExtReal> for ExtReal {
            fn $am(&mut self, rhs: &'b ExtReal) {
                if rhs.0.prec() > self.0.prec() {
                    self.0.set_prec(rhs.0.prec());
                }
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<ExtReal> for ExtReal {
            fn $am(&mut self, rhs: ExtReal) {
                self.$am(&rhs);
            }
        }
        impl $atr<f64> for ExtReal {
            fn $am(&mut self, rhs: f64) {
                self.0.$am(rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign, +);
real_binop!(Sub, sub, SubAssign, sub_assign, -);
real_binop!(Mul, mul, MulAssign, mul_assign, *);
real_binop!(Div, div, DivAssign, div_assign, /);

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(Float::with_val(self.0.prec(), -&self.0))
    }
}

/// Complex number with extended-precision parts.
#[derive(Clone, PartialEq)]
pub struct ExtComplex {
    pub re: ExtReal,
    pub im: ExtReal,
}

impl ExtComplex {
    pub fn new(re: ExtReal, im: ExtReal) -> Self {
        ExtComplex { re, im }
    }

    pub fn from_real(re: ExtReal) -> Self {
        let p = re.prec();
        ExtComplex { re, im: ExtReal::zero(p) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ExtComplex::new(ExtReal::from_f64(re, prec), ExtReal::from_f64(im, prec))
    }

    pub fn zero(prec: u32) -> Self {
        ExtComplex::new(ExtReal::zero(prec), ExtReal::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        ExtComplex::new(ExtReal::one(prec), ExtReal::zero(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> ExtReal {
        let mut s = &self.re * &self.re;
        s.add_mul(&self.im, &self.im);
        s
    }

    pub fn abs(&self) -> ExtReal {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        let p = self.prec();
        ExtReal(Float::with_val(p, self.re.0.hypot_ref(&self.im.0)))
    }

    pub fn conj(&self) -> Self {
        ExtComplex::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, s: &ExtReal) -> Self {
        ExtComplex::new(&self.re * s, &self.im * s)
    }

    pub fn recip(&self) -> Self {
        if self.im.is_zero() {
            return ExtComplex::from_real(self.re.recip());
        }
        let d = self.norm_sqr();
        ExtComplex::new(&self.re / &d, -(&self.im / &d))
    }

    /// `z - x` for real `x`.
    pub fn sub_real(&self, x: &ExtReal) -> Self {
        ExtComplex::new(&self.re - x, self.im.clone())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = ExtComplex::one(self.prec());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }
}

impl fmt::Debug for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl<'b> Add<&'b ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn add(self, rhs: &'b ExtComplex) -> ExtComplex {
        ExtComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'b> Sub<&'b ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn sub(self, rhs: &'b ExtComplex) -> ExtComplex {
        ExtComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'b> Mul<&'b ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn mul(self, rhs: &'b ExtComplex) -> ExtComplex {
        if self.im.is_zero() && rhs.im.is_zero() {
            let re = &self.re * &rhs.re;
            let p = re.prec();
            return ExtComplex::new(re, ExtReal::zero(p));
        }
        let mut re = &self.re * &rhs.re;
        re -= &(&self.im * &rhs.im);
        let mut im = &self.re * &rhs.im;
        im.add_mul(&self.im, &rhs.re);
        ExtComplex::new(re, im)
    }
}

impl<'b> Div<&'b ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn div(self, rhs: &'b ExtComplex) -> ExtComplex {
        if rhs.im.is_zero() {
            return ExtComplex::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let d = rhs.norm_sqr();
        let mut re = &self.re * &rhs.re;
        re.add_mul(&self.im, &rhs.im);
        let mut im = &self.im * &rhs.re;
        im -= &(&self.re * &rhs.im);
        ExtComplex::new(&re / &d, &im / &d)
    }
}

impl<'b> Mul<&'b ExtReal> for &ExtComplex {
    type Output = ExtComplex;
    fn mul(self, rhs: &'b ExtReal) -> ExtComplex {
        self.scale(rhs)
    }
}

impl<'b> Div<&'b ExtReal> for &ExtComplex {
    type Output = ExtComplex;
    fn div(self, rhs: &'b ExtReal) -> ExtComplex {
        ExtComplex::new(&self.re / rhs, &self.im / rhs)
    }
}

impl<'b> Add<&'b ExtReal> for &ExtComplex {
    type Output = ExtComplex;
    fn add(self, rhs: &'b ExtReal) -> ExtComplex {
        ExtComplex::new(&self.re + rhs, self.im.clone())
    }
}

impl<'b> AddAssign<&'b ExtComplex> for ExtComplex {
    fn add_assign(&mut self, rhs: &'b ExtComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl<'b> SubAssign<&'b ExtComplex> for ExtComplex {
    fn sub_assign(&mut self, rhs: &'b ExtComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Neg for ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex::new(-self.re, -self.im)
    }
}

impl Neg for &ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex::new(-&self.re, -&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_max_of_operands() {
        let a = ExtReal::one(128);
        let b = ExtReal::one(256);
        assert_eq!((&a + &b).prec(), 256);
        assert_eq!((&b * &a).prec(), 256);
        let mut c = a.clone();
        c += &b;
        assert_eq!(c.prec(), 256);
    }

    #[test]
    fn parse_keeps_decimal_digits() {
        let x = ExtReal::parse("0.1", 256).unwrap();
        let y = ExtReal::ratio(1, 10, 256);
        assert_eq!(x, y);
        assert!(ExtReal::parse("abc", 256).is_err());
    }

    #[test]
    fn tolerance_scale() {
        assert_eq!(decimal_digits(512), 154);
        let t = tolerance(512, 1, 2);
        let l = t.ln().to_f64() / std::f64::consts::LN_10;
        assert!((l + 77.0).abs() < 1e-9);
    }

    #[test]
    fn complex_division_roundtrip() {
        let z = ExtComplex::from_f64(1.5, -2.0, 200);
        let w = ExtComplex::from_f64(-0.25, 3.0, 200);
        let q = &(&z / &w) * &w;
        assert!((&q - &z).abs().to_f64() < 1e-55);
    }

    #[test]
    fn complex_abs_and_powers() {
        let z = ExtComplex::from_f64(3.0, 4.0, 128);
        assert_eq!(z.abs().to_f64(), 5.0);
        let z5 = z.powi(5);
        let direct = &(&(&(&z * &z) * &z) * &z) * &z;
        assert!((&z5 - &direct).abs().to_f64() < 1e-25);
    }
}
