#![allow(dead_code)]

use std::sync::Arc;

use biorth_core::measures::{make_measure, Interval, IntervalMeasure, WeightSpec};
use biorth_core::nikishin::{make_system, NikishinSystem};
use biorth_core::poly::Polynomial;
use biorth_core::ExtComplex;
use proptest::prelude::*;

/// One generation of a random system: width, gap to the previous interval,
/// side relative to the previous interval, Jacobi exponents and a linear factor slope.
#[derive(Clone, Debug)]
pub struct Level {
    pub width: f64,
    pub gap: f64,
    pub left: bool,
    pub alpha: f64,
    pub beta: f64,
    pub slope: f64,
}

#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub start: f64,
    pub levels: Vec<Level>,
}

impl SystemSpec {
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for l in &self.levels {
            let iv = match out.last() {
                None => (self.start, self.start + l.width),
                Some(&(a, _)) if l.left => (a - l.gap - l.width, a - l.gap),
                Some(&(_, b)) => (b + l.gap, b + l.gap + l.width),
            };
            out.push(iv);
        }
        out
    }

    pub fn build(&self, nodes: usize, prec: u32) -> Arc<NikishinSystem> {
        let ms = self
            .intervals()
            .iter()
            .zip(&self.levels)
            .map(|(&(a, b), l)| {
                let iv = Interval::from_f64(a, b, prec).unwrap();
                // 1 + slope·(x - a)/(b - a) stays positive for slope > -1.
                let c1 = l.slope / (b - a);
                let poly = Polynomial::from_f64(&[1.0 - c1 * a, c1], prec);
                let w = WeightSpec::jacobi(l.alpha, l.beta, prec).with_poly(poly);
                make_measure(iv, w, nodes, prec).unwrap()
            })
            .collect::<Vec<IntervalMeasure>>();
        Arc::new(make_system(ms).unwrap())
    }

    /// Points at least `margin` away from every interval.
    pub fn probes(&self, raw: &[(f64, f64)], margin: f64, prec: u32) -> Vec<ExtComplex> {
        let ivs = self.intervals();
        raw.iter()
            .filter(|&&(re, im)| {
                ivs.iter().all(|&(a, b)| {
                    let dx = if re < a { a - re } else if re > b { re - b } else { 0.0 };
                    dx.hypot(im) >= margin
                })
            })
            .map(|&(re, im)| ExtComplex::from_f64(re, im, prec))
            .collect()
    }
}

pub fn level() -> impl Strategy<Value = Level> {
    (0.3f64..2.0, 0.3f64..1.5, any::<bool>(), -0.6f64..1.5, -0.6f64..1.5, -0.5f64..2.0)
        .prop_map(|(width, gap, left, alpha, beta, slope)| Level { width, gap, left, alpha, beta, slope })
}

pub fn system(m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SystemSpec> {
    (-2.0f64..2.0, prop::collection::vec(level(), m)).prop_map(|(start, levels)| SystemSpec { start, levels })
}

pub fn raw_points(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-6.0f64..8.0, -3.0f64..3.0), n)
}
