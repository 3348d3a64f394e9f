//! Nikishin systems: generated measures, their Cauchy transforms, the iterated
//! kernel and bimoments.
//!
//! Measure indices in the public API are 1-based (`j = 1..=m`), matching the
//! usual notation for `s_{j,k}`. Every nested integral is discretised on the
//! Gauss nodes of the measures themselves, so a system of `N`-point rules is an
//! exact discrete Nikishin system and all chains cost `O(m N^2)`.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ext::{ExtComplex, ExtReal};
use crate::measures::{cauchy_sum, Interval, IntervalMeasure};

pub struct NikishinSystem {
    measures: Vec<Arc<IntervalMeasure>>,
    prec: u32,
    exec: Exec,
    // (j, j+1) Cauchy matrices 1/(x^{(j)}_i - x^{(j+1)}_l), row-major, 0-based j.
    cauchy: Vec<OnceLock<Vec<ExtReal>>>,
    // Discrete densities of s_{j,k} on the nodes of σ_j, keyed j*m + k (0-based).
    transforms: Vec<OnceLock<Vec<ExtReal>>>,
}

impl std::fmt::Debug for NikishinSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NikishinSystem")
            .field("intervals", &self.intervals())
            .field("nodes", &self.measures.iter().map(|m| m.node_count()).collect::<Vec<_>>())
            .field("prec", &self.prec)
            .finish()
    }
}

/// Validates consecutive disjointness and builds the system.
pub fn make_system(measures: Vec<IntervalMeasure>) -> Result<NikishinSystem> {
    NikishinSystem::new(measures.into_iter().map(Arc::new).collect())
}

impl NikishinSystem {
    pub fn new(measures: Vec<Arc<IntervalMeasure>>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::Invalid("a Nikishin system needs at least one measure".into()));
        }
        for (j, w) in measures.windows(2).enumerate() {
            if w[0].interval().gap(w[1].interval()).is_none() {
                return Err(Error::Overlap {
                    first: j + 1,
                    second: j + 2,
                    detail: format!("{} vs {}", w[0].interval(), w[1].interval()),
                });
            }
        }
        let prec = measures.iter().map(|m| m.prec()).max().unwrap_or(0);
        let m = measures.len();
        Ok(NikishinSystem {
            measures,
            prec,
            exec: Exec::default(),
            cauchy: (0..m.saturating_sub(1)).map(|_| OnceLock::new()).collect(),
            transforms: (0..m * m).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn m(&self) -> usize {
        self.measures.len()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `measures()[j - 1]` is σ_j.
    pub fn measures(&self) -> &[Arc<IntervalMeasure>] {
        &self.measures
    }

    pub fn measure(&self, j: usize) -> &IntervalMeasure {
        &self.measures[j - 1]
    }

    pub fn interval(&self, j: usize) -> &Interval {
        self.measures[j - 1].interval()
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.measures.iter().map(|m| m.interval().clone()).collect()
    }

    /// The system (σ_m, …, σ_1) sharing the same quadratures.
    pub fn reversed(&self) -> NikishinSystem {
        let mut ms = self.measures.clone();
        ms.reverse();
        NikishinSystem::new(ms).expect("reversal preserves consecutive disjointness").with_exec(self.exec)
    }

    /// Row-major `1/(x^{(j)}_i - x^{(j+1)}_l)` for 0-based `j`.
    pub(crate) fn cauchy_matrix(&self, j: usize) -> &[ExtReal] {
        self.cauchy[j].get_or_init(|| {
            let xs = self.measures[j].nodes();
            let ys = self.measures[j + 1].nodes();
            let rows = self.exec.map(xs.len(), |i| {
                ys.iter().map(|y| (&xs[i] - y).recip()).collect::<Vec<_>>()
            });
            rows.into_iter().flatten().collect()
        })
    }

    /// Discrete density of `s_{j,k}` on the nodes of σ_j (1-based, forward or reversed).
    pub fn transform_weights(&self, j: usize, k: usize) -> &[ExtReal] {
        self.transform0(j - 1, k - 1)
    }

    fn transform0(&self, j: usize, k: usize) -> &[ExtReal] {
        let m = self.m();
        self.transforms[j * m + k].get_or_init(|| {
            let w = self.measures[j].weights();
            if j == k {
                return w.to_vec();
            }
            let nj = w.len();
            if j < k {
                let inner = self.transform0(j + 1, k);
                let c = self.cauchy_matrix(j);
                let nl = inner.len();
                self.exec.map(nj, |i| {
                    let mut s = ExtReal::zero(self.prec);
                    for l in 0..nl {
                        s.add_mul(&inner[l], &c[i * nl + l]);
                    }
                    &s * &w[i]
                })
            } else {
                let inner = self.transform0(j - 1, k);
                let c = self.cauchy_matrix(j - 1);
                let nl = inner.len();
                self.exec.map(nj, |i| {
                    let mut s = ExtReal::zero(self.prec);
                    for l in 0..nl {
                        s.add_mul(&inner[l], &c[l * nj + i]);
                    }
                    -(&s * &w[i])
                })
            }
        })
    }

    /// `ŝ_{j,k}(z) = ∫ ds_{j,k}(x) / (z - x)`, 1-based, either direction.
    pub fn s_hat(&self, j: usize, k: usize, z: &ExtComplex) -> Result<ExtComplex> {
        self.check_index(j)?;
        self.check_index(k)?;
        let iv = self.interval(j);
        if iv.contains_complex(z) {
            return Err(iv.on_support_error(z));
        }
        Ok(cauchy_sum(self.measure(j).nodes(), self.transform_weights(j, k), z))
    }

    /// `∫ x^ν ds_{j,k}(x)` for `ν < count`.
    pub fn moments(&self, j: usize, k: usize, count: usize) -> Vec<ExtReal> {
        let d = self.transform_weights(j, k);
        let xs = self.measure(j).nodes();
        let mut out = vec![ExtReal::zero(self.prec); count];
        let mut pw: Vec<ExtReal> = d.to_vec();
        for slot in out.iter_mut() {
            let mut s = ExtReal::zero(self.prec);
            for p in &pw {
                s += p;
            }
            *slot = s;
            for (p, x) in pw.iter_mut().zip(xs) {
                *p *= x;
            }
        }
        out
    }

    /// Iterated kernel `K(x_1, x_m)` (requires `m >= 2`).
    pub fn kernel_k(&self, x1: &ExtReal, xm: &ExtReal) -> Result<ExtReal> {
        let m = self.m();
        if m < 2 {
            return Err(Error::Invalid("the kernel needs at least two measures".into()));
        }
        let (i1, im) = (self.interval(1), self.interval(m));
        if !i1.contains(x1) {
            return Err(Error::OnSupport { point: format!("{x1:?}"), support: format!("outside {i1}") });
        }
        if !im.contains(xm) {
            return Err(Error::OnSupport { point: format!("{xm:?}"), support: format!("outside {im}") });
        }
        if m == 2 {
            return Ok((x1 - xm).recip());
        }
        // g on the nodes of σ_2, pushed through σ_2..σ_{m-2}, closed at x_m.
        let mut g: Vec<ExtReal> = self.measures[1].nodes().iter().map(|y| (x1 - y).recip()).collect();
        for j in 1..m - 2 {
            let w = self.measures[j].weights();
            let v: Vec<ExtReal> = g.iter().zip(w).map(|(a, b)| a * b).collect();
            g = self.push_once(j, &v);
        }
        let lvl = m - 2;
        let xs = self.measures[lvl].nodes();
        let w = self.measures[lvl].weights();
        let mut k = ExtReal::zero(self.prec);
        for ((gl, wl), xl) in g.iter().zip(w).zip(xs) {
            k.add_div(&(gl * wl), &(xl - xm));
        }
        Ok(k)
    }

    /// `h(y_i) = Σ_l v_l / (x_l - y_i)` from the nodes of σ_{j+1} to those of
    /// σ_{j+2} (0-based `j`), for already weighted values `v`.
    fn push_once(&self, j: usize, v: &[ExtReal]) -> Vec<ExtReal> {
        let c = self.cauchy_matrix(j);
        let ny = self.measures[j + 1].node_count();
        self.exec.map(ny, |i| {
            let mut s = ExtReal::zero(self.prec);
            for (l, vl) in v.iter().enumerate() {
                s.add_mul(vl, &c[l * ny + i]);
            }
            s
        })
    }

    /// Carries a weighted vector `v = w^{(1)} f` on the nodes of σ_1 to the
    /// weighted vector `w^{(m)} h_{m-1}` on the nodes of σ_m, so that
    /// `Σ_i out_i g(x^{(m)}_i) = ∬ f K g dσ_1 dσ_m`.
    pub fn push_forward(&self, v: &[ExtReal]) -> Vec<ExtReal> {
        let mut cur = v.to_vec();
        for j in 0..self.m() - 1 {
            let h = self.push_once(j, &cur);
            let w = self.measures[j + 1].weights();
            cur = h.iter().zip(w).map(|(a, b)| a * b).collect();
        }
        cur
    }

    /// Bimoment matrix `∬ φ_ν(x_1) K(x_1, x_m) ψ_μ(x_m) dσ_1 dσ_m` for row
    /// functions tabulated on the nodes of σ_1 and column functions on σ_m.
    pub fn bimoment_matrix(&self, rows: &[Vec<ExtReal>], cols: &[Vec<ExtReal>]) -> Vec<Vec<ExtReal>> {
        let w1 = self.measures[0].weights();
        let seq = NikishinSystemView { sys: self, exec: Exec::Sequential };
        self.exec.map(rows.len(), |r| {
            let v: Vec<ExtReal> = rows[r].iter().zip(w1).map(|(a, b)| a * b).collect();
            let u = seq.push_forward(&v);
            cols.iter()
                .map(|c| {
                    let mut s = ExtReal::zero(self.prec);
                    for (a, b) in u.iter().zip(c) {
                        s.add_mul(a, b);
                    }
                    s
                })
                .collect()
        })
    }

    /// `I_{ν,μ} = ∬ x_1^ν x_m^μ K dσ_1 dσ_m`.
    pub fn bimoment(&self, nu: usize, mu: usize) -> ExtReal {
        let row: Vec<ExtReal> = self.measures[0].nodes().iter().map(|x| x.powi(nu as i32)).collect();
        let col: Vec<ExtReal> = self.measures[self.m() - 1].nodes().iter().map(|x| x.powi(mu as i32)).collect();
        self.bimoment_matrix(&[row], &[col]).remove(0).remove(0)
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.m() {
            return Err(Error::Invalid(format!("measure index {j} outside 1..={}", self.m())));
        }
        Ok(())
    }
}

/// Borrowed view with its own execution mode, used to avoid nested parallelism.
struct NikishinSystemView<'a> {
    sys: &'a NikishinSystem,
    exec: Exec,
}

impl NikishinSystemView<'_> {
    fn push_forward(&self, v: &[ExtReal]) -> Vec<ExtReal> {
        let sys = self.sys;
        let mut cur = v.to_vec();
        for j in 0..sys.m() - 1 {
            let c = sys.cauchy_matrix(j);
            let ny = sys.measures[j + 1].node_count();
            let w = sys.measures[j + 1].weights();
            cur = self.exec.map(ny, |i| {
                let mut s = ExtReal::zero(sys.prec);
                for (l, vl) in cur.iter().enumerate() {
                    s.add_mul(vl, &c[l * ny + i]);
                }
                &s * &w[i]
            });
        }
        cur
    }
}
