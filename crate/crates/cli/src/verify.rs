//! Verification suites over stored results.

use std::collections::BTreeMap;

use biorth_core::asymptotics::{AsymptoticPredictor, Table, TableKind};
use biorth_core::ext::tolerance;
use biorth_core::hp_solver::{biorthogonality_matrix, HpSolution};
use biorth_core::polyzeros::{counting_measure, interlaces, moment_distance};
use serde::Serialize;

use crate::commands::{build_table, ensure_equilibrium, load_solutions, predictor, solve_hp};
use crate::config::{Setup, SUITES};
use crate::error::{Failure, Outcome};
use crate::store::{write_json, Direction, Layout};

const MOMENTS: usize = 12;
const WEAK_THRESHOLD: f64 = 0.05;
const RATIO_THRESHOLD: f64 = 0.02;
const RATE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub passes: usize,
    pub worst_gap: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Running tally for one suite.
struct Tally {
    checks: usize,
    passes: usize,
    worst: f64,
    threshold: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new(threshold: f64) -> Self {
        Tally { checks: 0, passes: 0, worst: 0.0, threshold, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool) {
        self.checks += 1;
        self.passes += ok as usize;
    }

    fn gap(&mut self, g: f64) {
        // NaN must register as a failure, so it wins over any finite value.
        if g.is_nan() || g > self.worst {
            self.worst = g;
        }
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            passed: self.checks > 0 && self.passes == self.checks,
            checks: self.checks,
            passes: self.passes,
            worst_gap: self.worst,
            threshold: self.threshold,
            detail: self.notes.join("; "),
        }
    }
}

struct Data<'a> {
    setup: &'a Setup,
    forward: Vec<HpSolution>,
    reversed: Vec<HpSolution>,
    pred: AsymptoticPredictor,
    tol: f64,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_seq(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" > ")
}

/// `i·top/4` for `i = 1..=4`, deduplicated.
fn checkpoints(top: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=4).map(|i| i * top / 4).filter(|&n| n > 0).collect();
    v.dedup();
    v
}

fn interlacing(d: &Data) -> SuiteReport {
    let mut t = Tally::new(0.0);
    for (label, sols) in [("forward", &d.forward), ("reversed", &d.reversed)] {
        let mut bad = 0;
        for w in sols[1..].windows(2) {
            for j in 1..=w[0].m() {
                let ok = interlaces(w[0].zeros(j), w[1].zeros(j)).unwrap_or(false);
                t.check(ok);
                bad += !ok as usize;
            }
        }
        t.notes.push(format!("{label}: {bad} failures"));
    }
    t.gap((t.checks - t.passes) as f64);
    t.finish("interlacing")
}

fn zero_location(d: &Data) -> SuiteReport {
    let mut t = Tally::new(0.0);
    for (label, sols) in [("forward", &d.forward), ("reversed", &d.reversed)] {
        let mut bad = 0;
        for sol in &sols[1..] {
            for j in 1..=sol.m() {
                let iv = sol.system().interval(j);
                let z = sol.zeros(j);
                let ok = z.len() == sol.n() && z.iter().all(|x| iv.contains_open(x));
                t.check(ok);
                bad += !ok as usize;
            }
        }
        t.notes.push(format!("{label}: {bad} failures"));
    }
    t.gap((t.checks - t.passes) as f64);
    t.finish("zero-location")
}

fn biorthogonality(d: &Data) -> SuiteReport {
    let mut t = Tally::new(d.tol);
    let bm = biorthogonality_matrix(&d.setup.system, &d.reversed, &d.forward);
    let mut min_diag = f64::INFINITY;
    for (k, row) in bm.iter().enumerate() {
        for (n, (v, scale)) in row.iter().enumerate() {
            let q = (&v.abs() / scale).to_f64();
            if k == n {
                t.check(q > d.tol);
                min_diag = min_diag.min(q);
            } else {
                t.check(q <= d.tol);
                t.gap(q);
            }
        }
    }
    t.notes.push(format!("largest off-diagonal {:.1e}, smallest diagonal {min_diag:.1e}", t.worst));
    t.finish("biorthogonality")
}

fn form_identity(d: &Data) -> SuiteReport {
    let mut t = Tally::new(d.tol);
    for sol in &d.forward {
        for z in &d.setup.probes {
            for j in 0..sol.m() {
                let gap = match sol.form_identity_check(j, z) {
                    Ok((res, scale)) => (&res / &scale).to_f64(),
                    Err(_) => f64::NAN,
                };
                t.check(gap <= d.tol);
                t.gap(gap);
            }
        }
    }
    t.notes.push(format!("{} probes", d.setup.probes.len()));
    t.finish("form-identity")
}

fn weak_asymptotics(d: &Data) -> SuiteReport {
    let mut t = Tally::new(WEAK_THRESHOLD);
    let points = checkpoints(d.setup.config.n_max);
    let rp = d.pred.reversed();
    for (label, sols, p) in [("forward", &d.forward, &d.pred), ("reversed", &d.reversed, &rp)] {
        for j in 1..=d.setup.m() {
            let dist: Vec<f64> = points
                .iter()
                .map(|&n| match counting_measure(sols[n].zeros(j)) {
                    Ok(mu) => moment_distance(&mu, &p.equilibrium().lambdas[j - 1], MOMENTS),
                    Err(_) => f64::NAN,
                })
                .collect();
            let last = dist[dist.len() - 1];
            t.check(strictly_decreasing(&dist) && last <= WEAK_THRESHOLD);
            t.gap(last);
            t.notes.push(format!("{label} j={j}: {}", fmt_seq(&dist)));
        }
    }
    t.finish("weak-asymptotics")
}

fn table(d: &Data, kind: TableKind) -> Outcome<Table> {
    build_table(d.setup, &d.forward, &d.pred, kind)
}

fn ratio_asymptotics(d: &Data) -> Outcome<SuiteReport> {
    let mut t = Tally::new(RATIO_THRESHOLD);
    let tab = table(d, TableKind::RatioQ)?;
    let points = checkpoints(d.setup.config.n_max - 1);
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for &n in &points {
        for row in tab.rows.iter().filter(|r| r.n == n) {
            let key = match &row.probe {
                Some(z) => format!("{} @ {:?}", row.quantity, z.to_f64_pair()),
                None => row.quantity.clone(),
            };
            series.entry(key).or_default().push(row.rel_gap);
        }
    }
    for v in series.values() {
        let last = v[v.len() - 1];
        t.check(v.len() == points.len() && strictly_decreasing(v) && last <= RATIO_THRESHOLD);
        t.gap(last);
    }
    t.notes.push(format!("{} series at n = {points:?}", series.len()));
    Ok(t.finish("ratio-asymptotics"))
}

fn rate(d: &Data) -> Outcome<SuiteReport> {
    let mut t = Tally::new(RATE_THRESHOLD);
    let last_n = d.setup.config.n_max - 1;
    let mut kinds = vec![TableKind::NthRoot, TableKind::FormRatio];
    if d.setup.m() >= 2 {
        kinds.push(TableKind::Rate);
    }
    for kind in kinds {
        let tab = table(d, kind)?;
        let mut worst = 0.0f64;
        for row in tab.rows.iter().filter(|r| r.n == last_n) {
            t.check(row.rel_gap <= RATE_THRESHOLD);
            t.gap(row.rel_gap);
            worst = worst.max(row.rel_gap);
        }
        t.notes.push(format!("{}: worst gap {worst:.2e} at n={last_n}", kind.name()));
    }
    // Forms two or more indices apart must decay geometrically.
    let sol = &d.forward[d.setup.config.n_max];
    let m = d.setup.m();
    let mut flags = 0;
    for z in &d.setup.probes {
        for j in 0..m {
            for k in j + 2..=m {
                let predicted = d.pred.form_ratio_prediction(j, k, z).ok().and_then(|(_, f)| f);
                let measured = match (sol.eval_form(j, z), sol.eval_form(k, z)) {
                    (Ok(a), Ok(b)) => (&a.abs() / &b.abs()).to_f64().powf(1.0 / sol.n() as f64),
                    _ => f64::NAN,
                };
                t.check(predicted == Some(true) && measured < 1.0);
                flags += 1;
            }
        }
    }
    if flags > 0 {
        t.notes.push(format!("{flags} decay flags"));
    }
    Ok(t.finish("rate"))
}

fn reversal_symmetry(d: &Data) -> Outcome<SuiteReport> {
    let mut t = Tally::new(10.0 * d.setup.eq_tol);
    let fwd = d.pred.equilibrium();
    let rev = ensure_equilibrium(d.setup, Direction::Reversed, false)?.reversed();
    for j in 0..d.setup.m() {
        let gap = moment_distance(&fwd.lambdas[j], &rev.lambdas[j], MOMENTS);
        t.check(gap <= t.threshold);
        t.gap(gap);
    }
    let omega = fwd.omega_cum.last().zip(rev.omega_cum.last()).map(|(a, b)| (a - b).abs()).unwrap_or(f64::NAN);
    t.notes.push(format!("total constant change {omega:.1e}"));
    Ok(t.finish("reversal-symmetry"))
}

pub fn verify(setup: &Setup, suites: &[String], force: bool) -> Outcome<Report> {
    let selected: Vec<&str> = if suites.is_empty() {
        SUITES.to_vec()
    } else {
        SUITES.iter().copied().filter(|s| suites.iter().any(|x| x == s)).collect()
    };
    solve_hp(setup, force)?;
    let data = Data {
        setup,
        forward: load_solutions(setup, Direction::Forward)?,
        reversed: load_solutions(setup, Direction::Reversed)?,
        pred: predictor(setup, force)?,
        tol: tolerance(setup.prec(), 1, 2).to_f64(),
    };
    let mut reports = Vec::new();
    for suite in selected {
        let r = match suite {
            "interlacing" => interlacing(&data),
            "zero-location" => zero_location(&data),
            "biorthogonality" => biorthogonality(&data),
            "form-identity" => form_identity(&data),
            "weak-asymptotics" => weak_asymptotics(&data),
            "ratio-asymptotics" => ratio_asymptotics(&data)?,
            "rate" => rate(&data)?,
            "reversal-symmetry" => reversal_symmetry(&data)?,
            other => return Err(Failure::Validation(format!("unknown suite {other:?}"))),
        };
        log::info!("{}: {}/{} ({})", r.suite, r.passes, r.checks, r.detail);
        reports.push(r);
    }
    let report = Report { passed: reports.iter().all(|r| r.passed), suites: reports };
    write_json(&Layout::new(&setup.out).report(), &report)?;
    Ok(report)
}
