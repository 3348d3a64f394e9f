//! Limits predicted from the vector equilibrium, and empirical estimators
//! built from sequences of Hermite–Padé solutions.
//!
//! The functions `F_k` are carried by `(λ_k, γ_k)`:
//! `log|F_k(z)| = -V^{λ_k}(z) + γ_k`, with `F_0 = F_{m+1} = 1`. Only moduli
//! are exposed.

use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ext::{ExtComplex, ExtReal};
use crate::hp_solver::HpSolution;
use crate::measures::Interval;

#[derive(Clone, Debug)]
pub struct AsymptoticPredictor {
    eq: EquilibriumSolution,
    intervals: Vec<(f64, f64)>,
    /// `γ_k = log F_k'(∞)`.
    pub gammas: Vec<f64>,
    /// `κ_k = exp(γ_k - (γ_{k-1} + γ_{k+1})/2)`.
    pub kappas: Vec<f64>,
}

/// Solves `2γ_k - γ_{k-1} - γ_{k+1} = 2ω'_k`, `γ_0 = γ_{m+1} = 0` (Thomas algorithm).
fn solve_gammas(omega_prime: &[f64]) -> Vec<f64> {
    let m = omega_prime.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    for k in 0..m {
        let denom = 2.0 + if k > 0 { c[k - 1] } else { 0.0 };
        let prev = if k > 0 { d[k - 1] } else { 0.0 };
        d[k] = (2.0 * omega_prime[k] + prev) / denom;
        c[k] = -1.0 / denom;
    }
    let mut g = vec![0.0; m];
    for k in (0..m).rev() {
        g[k] = d[k] - if k + 1 < m { c[k] * g[k + 1] } else { 0.0 };
    }
    g
}

pub fn make_predictor(eq: EquilibriumSolution) -> Result<AsymptoticPredictor> {
    if eq.m() == 0 || eq.omega_prime.len() != eq.m() {
        return Err(Error::Invalid("predictor needs a solved equilibrium".into()));
    }
    let gammas = solve_gammas(&eq.omega_prime);
    let m = gammas.len();
    let g = |k: isize| if k < 0 || k as usize >= m { 0.0 } else { gammas[k as usize] };
    let kappas = (0..m as isize).map(|k| (g(k) - 0.5 * (g(k - 1) + g(k + 1))).exp()).collect();
    let intervals = eq.lambdas.iter().map(|l| l.interval()).collect();
    Ok(AsymptoticPredictor { eq, intervals, gammas, kappas })
}

fn on_interval(iv: (f64, f64), z: &ExtComplex) -> bool {
    let (re, im) = z.to_f64_pair();
    im == 0.0 && re >= iv.0 && re <= iv.1
}

impl AsymptoticPredictor {
    pub fn m(&self) -> usize {
        self.gammas.len()
    }

    pub fn equilibrium(&self) -> &EquilibriumSolution {
        &self.eq
    }

    /// Predictor of the reversed system.
    pub fn reversed(&self) -> AsymptoticPredictor {
        make_predictor(self.eq.reversed()).expect("reversal keeps the predictor well-formed")
    }

    fn check(&self, j: usize, z: &ExtComplex) -> Result<()> {
        if (1..=self.m()).contains(&j) && on_interval(self.intervals[j - 1], z) {
            let (a, b) = self.intervals[j - 1];
            return Err(Error::OnSupport { point: format!("{z:?}"), support: format!("[{a}, {b}]") });
        }
        Ok(())
    }

    /// `V^{λ_j}(z)`, zero for `j = 0` and `j = m + 1`.
    fn v(&self, j: usize, z: &ExtComplex) -> f64 {
        if j == 0 || j > self.m() {
            0.0
        } else {
            self.eq.potential(j, z)
        }
    }

    fn gamma(&self, j: usize) -> f64 {
        if j == 0 || j > self.m() {
            0.0
        } else {
            self.gammas[j - 1]
        }
    }

    fn omega_tail(&self, j: usize) -> f64 {
        self.eq.omega_prime.iter().skip(j.saturating_sub(1)).sum()
    }

    /// `log|F_k(z)|`, `0 ≤ k ≤ m + 1`.
    pub fn log_abs_f(&self, k: usize, z: &ExtComplex) -> f64 {
        -self.v(k, z) + self.gamma(k)
    }

    /// `|F_k(z) / F_k'(∞)| = exp(-V^{λ_k}(z))`: limit of `|Q_{n+1,k}/Q_{n,k}|`.
    pub fn f_ratio_modulus(&self, k: usize, z: &ExtComplex) -> Result<f64> {
        if k == 0 || k > self.m() {
            return Err(Error::Invalid(format!("index {k} outside 1..={}", self.m())));
        }
        self.check(k, z)?;
        Ok((-self.v(k, z)).exp())
    }

    /// Limit of `|A_{n,j}(z)|^{1/n}`, `0 ≤ j ≤ m`.
    pub fn nth_root_prediction(&self, j: usize, z: &ExtComplex) -> Result<f64> {
        let m = self.m();
        if j > m {
            return Err(Error::Invalid(format!("index {j} outside 0..={m}")));
        }
        self.check(j, z)?;
        self.check(j + 1, z)?;
        Ok((self.v(j + 1, z) - self.v(j, z) - 2.0 * self.omega_tail(j + 1)).exp())
    }

    /// Limit of `|a_{n,j}/a_{n,m} - ŝ_{m,j+1}|^{1/n}`.
    pub fn rate_prediction(&self, z: &ExtComplex) -> Result<f64> {
        let m = self.m();
        if m < 2 {
            return Err(Error::Invalid("the convergence rate needs m ≥ 2".into()));
        }
        self.check(m, z)?;
        self.check(m - 1, z)?;
        Ok((2.0 * self.v(m, z) - self.v(m - 1, z) - 2.0 * self.eq.omega_prime[m - 1]).exp())
    }

    /// Limit of `|A_{n,j}/A_{n,k}|^{1/n}` for `j < k`, with the flag
    /// "value < 1" reported when `k > j + 1`.
    pub fn form_ratio_prediction(&self, j: usize, k: usize, z: &ExtComplex) -> Result<(f64, Option<bool>)> {
        let m = self.m();
        if j >= k || k > m {
            return Err(Error::Invalid(format!("need 0 ≤ j < k ≤ {m}, got ({j}, {k})")));
        }
        for i in [j, j + 1, k, k + 1] {
            self.check(i, z)?;
        }
        let w: f64 = self.eq.omega_prime[j..k].iter().sum();
        let e = -self.v(k + 1, z) + self.v(k, z) + self.v(j + 1, z) - self.v(j, z) - 2.0 * w;
        let value = e.exp();
        Ok((value, (k > j + 1).then_some(value < 1.0)))
    }

    /// Limit of `|A_{n+1,k}(z)/A_{n,k}(z)|`, assembled from `κ`, `γ` and the
    /// potentials as `(F'_{k+1}(∞)/F'_k(∞)) |F_k/F_{k+1}| / (κ_{k+1}² ⋯ κ_m²)`.
    pub fn consecutive_form_ratio_prediction(&self, k: usize, z: &ExtComplex) -> Result<f64> {
        let m = self.m();
        if k >= m {
            return Err(Error::Invalid(format!("index {k} outside 0..{m}")));
        }
        self.check(k, z)?;
        self.check(k + 1, z)?;
        let kap: f64 = self.kappas[k..].iter().map(|x| x * x).product();
        let lead = (self.gamma(k + 1) - self.gamma(k)).exp();
        let fz = (self.log_abs_f(k, z) - self.log_abs_f(k + 1, z)).exp();
        Ok(lead * fz / kap)
    }

    /// Limit of `K_{n+1,k}/K_{n,k}`: `κ_k ⋯ κ_m = exp(ω_k)`.
    pub fn leading_growth_prediction(&self, k: usize) -> f64 {
        self.kappas[k - 1..].iter().product()
    }

    /// Limit of `|P_{n+1,k}/P_{n,k}|` for the reversed system.
    pub fn reversed_predictions(&self, k: usize, z: &ExtComplex) -> Result<f64> {
        let m = self.m();
        if k == 0 || k > m {
            return Err(Error::Invalid(format!("index {k} outside 1..={m}")));
        }
        self.f_ratio_modulus(m - k + 1, z)
    }
}

/// Five real points outside the hull of all intervals and four complex
/// points at distance at least 1/2 from every interval.
pub fn default_probes(intervals: &[Interval], prec: u32) -> Vec<ExtComplex> {
    let (lo, hi) = intervals
        .iter()
        .map(|iv| iv.bounds_f64())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| (l.min(a), h.max(b)));
    let w = hi - lo;
    let h = (0.25 * w).max(0.5);
    let pts = [
        (lo - 0.5 * w, 0.0),
        (lo - w / 6.0, 0.0),
        (hi + w / 6.0, 0.0),
        (hi + 0.5 * w, 0.0),
        (hi + w, 0.0),
        (lo + 0.25 * w, h),
        (lo + 0.75 * w, -h),
        (0.5 * (lo + hi), h),
        (hi + 0.5 * w, h),
    ];
    pts.iter().map(|&(re, im)| ExtComplex::from_f64(re, im, prec)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// `|Q_{n+1,j}/Q_{n,j}|` against `exp(-V^{λ_j})`.
    RatioQ,
    /// `|A_{n+1,j}/A_{n,j}|` against the n-th root limit.
    NthRoot,
    /// Two-point rate of `a_{n,j}/a_{n,m} - ŝ_{m,j+1}`.
    Rate,
    /// Two-point estimator of `|A_{n,j}/A_{n,k}|^{1/n}`.
    FormRatio,
    /// Growth of `κ_{n,k}` and `K_{n,k}`.
    Leading,
}

impl TableKind {
    pub fn all() -> [TableKind; 5] {
        [TableKind::RatioQ, TableKind::NthRoot, TableKind::Rate, TableKind::FormRatio, TableKind::Leading]
    }

    pub fn name(self) -> &'static str {
        match self {
            TableKind::RatioQ => "ratioq",
            TableKind::NthRoot => "nthroot",
            TableKind::Rate => "rate",
            TableKind::FormRatio => "formratio",
            TableKind::Leading => "leading",
        }
    }
}

impl std::str::FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableKind::all()
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown table kind {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct TableRow {
    pub n: usize,
    /// `None` for probe-free quantities (leading constants).
    pub probe: Option<ExtComplex>,
    pub quantity: String,
    pub measured: ExtReal,
    pub predicted: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    /// `|f_n|^{1/n}` where meaningful.
    pub secondary: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub kind: TableKind,
    pub rows: Vec<TableRow>,
}

const DIGITS: usize = 30;

fn dec(v: f64) -> String {
    if v.is_finite() {
        ExtReal::from_f64(v, 128).to_decimal(Some(DIGITS))
    } else {
        format!("{v}")
    }
}

impl Table {
    /// Rows for one quantity at one probe, in increasing `n`.
    pub fn series(&self, quantity: &str, probe: Option<usize>, probes: &[ExtComplex]) -> Vec<&TableRow> {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .filter(|r| match (probe, &r.probe) {
                (None, None) => true,
                (Some(i), Some(z)) => (z - &probes[i]).abs().is_zero(),
                _ => false,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,probe,quantity,measured,predicted,abs_gap,rel_gap,secondary\n");
        for r in &self.rows {
            let probe = match &r.probe {
                Some(z) => {
                    let (re, im) = z.to_f64_pair();
                    format!("{re}{im:+}i")
                }
                None => "-".into(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                probe,
                r.quantity,
                r.measured.to_decimal(Some(DIGITS)),
                dec(r.predicted),
                dec(r.abs_gap),
                dec(r.rel_gap),
                r.secondary.map(dec).unwrap_or_default()
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "n": r.n,
                    "probe": r.probe.as_ref().map(|z| { let (a, b) = z.to_f64_pair(); [a, b] }),
                    "quantity": r.quantity,
                    "measured": r.measured.to_decimal(Some(DIGITS)),
                    "predicted": dec(r.predicted),
                    "abs_gap": dec(r.abs_gap),
                    "rel_gap": dec(r.rel_gap),
                    "secondary": r.secondary.map(dec),
                })
            })
            .collect();
        serde_json::json!({ "kind": self.kind.name(), "rows": rows })
    }
}

fn row(n: usize, probe: Option<&ExtComplex>, quantity: String, measured: ExtReal, predicted: f64, secondary: Option<f64>) -> TableRow {
    let mv = measured.to_f64();
    let abs_gap = (mv - predicted).abs();
    TableRow {
        n,
        probe: probe.cloned(),
        quantity,
        measured,
        predicted,
        abs_gap,
        rel_gap: abs_gap / predicted.abs(),
        secondary,
    }
}

fn nth_root(v: &ExtReal, n: usize) -> Option<f64> {
    (n > 0 && !v.is_zero()).then(|| (v.abs().ln().to_f64() / n as f64).exp())
}

/// `(-1)^j (a_{n,j}/a_{n,m} - ŝ_{m,j+1})` via the form identity, free of cancellation.
pub fn rate_quantity(sol: &HpSolution, j: usize, z: &ExtComplex) -> Result<ExtComplex> {
    let m = sol.m();
    let sys = sol.system();
    let mut s = sol.eval_form(j, z)?;
    for k in j + 1..m {
        let t = &sys.s_hat(k, j + 1, z)? * &sol.eval_form(k, z)?;
        if (k - j) % 2 == 0 {
            s += &t;
        } else {
            s -= &t;
        }
    }
    Ok(&s / &sol.a(m).eval_complex(z))
}

fn pair_rows(
    kind: TableKind,
    pred: &AsymptoticPredictor,
    cur: &HpSolution,
    next: &HpSolution,
    probes: &[ExtComplex],
) -> Result<Vec<TableRow>> {
    let m = cur.m();
    let n = cur.n();
    let mut rows = Vec::new();
    let abs_ratio = |a: ExtComplex, b: ExtComplex| &a.abs() / &b.abs();
    match kind {
        TableKind::RatioQ => {
            for z in probes {
                for j in 1..=m {
                    let Ok(p) = pred.f_ratio_modulus(j, z) else { continue };
                    let r = abs_ratio(next.eval_qnj(j, z), cur.eval_qnj(j, z));
                    rows.push(row(n, Some(z), format!("Q{j}"), r, p, None));
                }
            }
        }
        TableKind::NthRoot => {
            for z in probes {
                for j in 0..=m {
                    let Ok(p) = pred.nth_root_prediction(j, z) else { continue };
                    let (Ok(a1), Ok(a0)) = (next.eval_form(j, z), cur.eval_form(j, z)) else { continue };
                    let sec = nth_root(&a0.abs(), n);
                    rows.push(row(n, Some(z), format!("A{j}"), abs_ratio(a1, a0), p, sec));
                }
            }
        }
        TableKind::Rate => {
            if m < 2 {
                return Ok(rows);
            }
            for z in probes {
                let Ok(p) = pred.rate_prediction(z) else { continue };
                for j in 0..m - 1 {
                    let (Ok(d1), Ok(d0)) = (rate_quantity(next, j, z), rate_quantity(cur, j, z)) else { continue };
                    let sec = nth_root(&d0.abs(), n);
                    rows.push(row(n, Some(z), format!("rate{j}"), abs_ratio(d1, d0), p, sec));
                }
            }
        }
        TableKind::FormRatio => {
            for z in probes {
                for j in 0..m {
                    for k in j + 1..=m {
                        let Ok((p, _)) = pred.form_ratio_prediction(j, k, z) else { continue };
                        let vals = (next.eval_form(j, z), next.eval_form(k, z), cur.eval_form(j, z), cur.eval_form(k, z));
                        let (Ok(a), Ok(b), Ok(c), Ok(d)) = vals else { continue };
                        let r1 = &a.abs() / &b.abs();
                        let r0 = &c.abs() / &d.abs();
                        let sec = nth_root(&r0, n);
                        rows.push(row(n, Some(z), format!("A{j}/A{k}"), &r1 / &r0, p, sec));
                    }
                }
            }
        }
        TableKind::Leading => {
            let (k0, k1) = (cur.leading_constants(), next.leading_constants());
            let (c0, c1) = (cur.kappas(), next.kappas());
            for k in 1..=m {
                rows.push(row(n, None, format!("kappa{k}"), &c1[k - 1] / &c0[k - 1], pred.kappas[k - 1], None));
                rows.push(row(n, None, format!("K{k}"), &k1[k - 1] / &k0[k - 1], pred.leading_growth_prediction(k), None));
            }
        }
    }
    Ok(rows)
}

/// Measured against predicted quantities for every pair `(n, n+1)` present
/// in `solutions`. Pairs are processed concurrently under `exec`.
pub fn empirical_tables(
    solutions: &[HpSolution],
    pred: &AsymptoticPredictor,
    probes: &[ExtComplex],
    kind: TableKind,
    exec: Exec,
) -> Result<Table> {
    let mut sorted: Vec<&HpSolution> = solutions.iter().collect();
    sorted.sort_by_key(|s| s.n());
    let pairs: Vec<(&HpSolution, &HpSolution)> =
        sorted.windows(2).filter(|w| w[1].n() == w[0].n() + 1).map(|w| (w[0], w[1])).collect();
    if pairs.is_empty() {
        return Err(Error::Invalid("tables need solutions for at least two consecutive degrees".into()));
    }
    let chunks = exec.try_map(pairs.len(), |i| pair_rows(kind, pred, pairs[i].0, pairs[i].1, probes))?;
    Ok(Table { kind, rows: chunks.into_iter().flatten().collect() })
}
