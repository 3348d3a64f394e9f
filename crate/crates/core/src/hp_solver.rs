//! Multi-level Hermite–Padé polynomials of a Nikishin system.
//!
//! The monic biorthogonal polynomial `Q_n` comes from the `n × n` bimoment
//! system written in Chebyshev bases adapted to the first and last interval.
//! The remaining polynomials `a_{n,j}` are polynomial parts of
//! `Σ_k ± a_{n,k} ŝ_{j+1,k}`, and the linear forms `A_{n,j}` are evaluated by
//! the discrete chain `A_{n,j}(z) = ∫ A_{n,j+1}(x) dσ_{j+1}(x) / (z - x)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{tolerance, ExtComplex, ExtReal};
use crate::linalg::solve_refined;
use crate::measures::{cauchy_sum, Interval};
use crate::nikishin::NikishinSystem;
use crate::poly::{chebyshev_values, ChebSeries, Polynomial};
use crate::polyzeros::{bracket_sign_changes, real_roots, refine_root};

/// Per-degree numerical health of a solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// 1-norm condition estimate of the bimoment system.
    pub cond: f64,
    /// Worst relative residual of the `n` orthogonality conditions.
    pub orthogonality: f64,
    /// Relative size of the vanishing `z^{-1}..z^{-n}` coefficients of `A_{n,0}`.
    pub expansion: f64,
    /// Relative size of the first non-vanishing condition (degree `n`).
    pub next_row: f64,
}

/// Caches the Chebyshev bimoment matrix of a system up to a maximal degree.
pub struct HpSolver {
    sys: Arc<NikishinSystem>,
    n_max: usize,
    // rows ν = 0..=n_max+1 (first interval), columns μ = 0..=n_max (last interval)
    matrix: Vec<Vec<ExtReal>>,
}

fn cheb_table(iv: &Interval, nodes: &[ExtReal], deg: usize) -> Vec<Vec<ExtReal>> {
    let vals: Vec<Vec<ExtReal>> = nodes.iter().map(|x| chebyshev_values(deg, &iv.to_unit(x))).collect();
    (0..=deg).map(|k| vals.iter().map(|v| v[k].clone()).collect()).collect()
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

impl HpSolver {
    pub fn new(sys: Arc<NikishinSystem>, n_max: usize) -> Self {
        let m = sys.m();
        let rows = cheb_table(sys.interval(1), sys.measure(1).nodes(), n_max + 1);
        let cols = cheb_table(sys.interval(m), sys.measure(m).nodes(), n_max);
        let matrix = sys.bimoment_matrix(&rows, &cols);
        HpSolver { sys, n_max, matrix }
    }

    /// Solver for the reversed system (σ_m, …, σ_1).
    pub fn reversed(&self) -> HpSolver {
        HpSolver::new(Arc::new(self.sys.reversed()), self.n_max)
    }

    pub fn system(&self) -> &Arc<NikishinSystem> {
        &self.sys
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Bimoments `∬ T_ν K T_μ` of the scaled Chebyshev bases.
    pub fn chebyshev_bimoments(&self) -> &[Vec<ExtReal>] {
        &self.matrix
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::Invalid(format!("degree {n} exceeds the cached maximum {}", self.n_max)));
        }
        Ok(())
    }

    /// Monic `Q_n` as a Chebyshev series on the last interval, with diagnostics.
    pub fn solve_qn_chebyshev(&self, n: usize) -> Result<(ChebSeries, Diagnostics)> {
        self.check_degree(n)?;
        let prec = self.sys.prec();
        let iv = self.sys.interval(self.sys.m());
        let mut coeffs = vec![ExtReal::zero(prec); n + 1];
        coeffs[n] = ExtReal::one(prec);
        let mut diag = Diagnostics { cond: 1.0, ..Default::default() };
        if n > 0 {
            let a: Vec<Vec<ExtReal>> = (0..n).map(|nu| self.matrix[nu][..n].to_vec()).collect();
            let b: Vec<ExtReal> = (0..n).map(|nu| -&self.matrix[nu][n]).collect();
            let rep = solve_refined(&a, &b).map_err(|e| match e {
                Error::Singular { cond, .. } => Error::Singular { n, cond },
                other => other,
            })?;
            diag.cond = rep.cond;
            coeffs[..n].clone_from_slice(&rep.x);
        }
        let row_residual = |nu: usize| {
            let mut s = ExtReal::zero(prec);
            let mut scale = ExtReal::zero(prec);
            for (c, v) in coeffs.iter().zip(&self.matrix[nu]) {
                let t = c * v;
                scale += &t.abs();
                s += &t;
            }
            if scale.is_zero() {
                0.0
            } else {
                (&s.abs() / &scale).to_f64()
            }
        };
        diag.orthogonality = (0..n).map(row_residual).fold(0.0, f64::max);
        diag.next_row = row_residual(n);
        let lead = ChebSeries::chebyshev_leading(n, &iv.half_width());
        let coeffs = coeffs.iter().map(|c| c / &lead).collect();
        Ok((ChebSeries::new(iv.center(), iv.half_width(), coeffs), diag))
    }

    pub fn solve_qn(&self, n: usize) -> Result<Polynomial> {
        Ok(self.solve_qn_chebyshev(n)?.0.to_polynomial().monic())
    }

    /// Full solution of degree `n`.
    pub fn solve(&self, n: usize) -> Result<HpSolution> {
        let (q, mut diag) = self.solve_qn_chebyshev(n)?;
        let sys = self.sys.clone();
        let m = sys.m();
        let prec = sys.prec();
        let qm = if n == 0 { Polynomial::one(prec) } else { q.to_polynomial().monic() };
        let mut a = vec![Polynomial::zero(prec); m + 1];
        a[m] = qm.scale(&ExtReal::from_i64(sign(m), prec));
        for j in (0..m).rev() {
            let mut acc = Polynomial::zero(prec);
            for k in j + 1..=m {
                let pp = polynomial_part(&a[k], &sys.moments(j + 1, k, a[k].degree().max(1)));
                acc = acc.add(&pp.scale(&ExtReal::from_i64(sign(k), prec)));
            }
            a[j] = acc.scale(&ExtReal::from_i64(-sign(j), prec));
        }
        let node_values = form_node_values(&sys, &q);
        let mut sol = HpSolution { sys, n, q, a, node_values, zeros: Vec::new(), diagnostics: Diagnostics::default() };
        diag.expansion = sol.expansion_residual();
        sol.diagnostics = diag;
        sol.zeros = (1..=m).map(|j| sol.compute_zeros(j)).collect::<Result<_>>()?;
        Ok(sol)
    }

    /// Solutions for several degrees, concurrently under the system's execution mode.
    pub fn solve_many(&self, ns: &[usize]) -> Result<Vec<HpSolution>> {
        self.sys.exec().try_map(ns.len(), |i| self.solve(ns[i]))
    }
}

/// Polynomial part of `p(z) ŝ(z)`, i.e. `∫ (p(z) - p(x)) / (z - x) ds(x)`,
/// given the moments `M_k = ∫ x^k ds` for `k < deg p`.
pub fn polynomial_part(p: &Polynomial, moments: &[ExtReal]) -> Polynomial {
    let d = p.degree();
    if p.is_zero() || d == 0 {
        return Polynomial::zero(p.prec());
    }
    let c = p.coeffs();
    let out = (0..d)
        .map(|l| {
            let mut s = ExtReal::zero(p.prec());
            for i in l + 1..=d {
                s.add_mul(&c[i], &moments[i - 1 - l]);
            }
            s
        })
        .collect();
    Polynomial::new(out, p.prec())
}

/// `A_{n,j}` at the nodes of σ_j for `j = 1..=m`, from the monic `Q_n` on σ_m.
fn form_node_values(sys: &NikishinSystem, q: &ChebSeries) -> Vec<Vec<ExtReal>> {
    let m = sys.m();
    let mut out = vec![Vec::new(); m];
    out[m - 1] = sys.measure(m).nodes().iter().map(|x| q.eval(x)).collect();
    for j in (1..m).rev() {
        let next = &out[j];
        let w = sys.measure(j + 1).weights();
        let fw: Vec<ExtReal> = next.iter().zip(w).map(|(a, b)| a * b).collect();
        let c = sys.cauchy_matrix(j - 1);
        let nl = fw.len();
        out[j - 1] = sys.exec().map(sys.measure(j).node_count(), |i| {
            let mut s = ExtReal::zero(sys.prec());
            for (l, f) in fw.iter().enumerate() {
                s.add_mul(f, &c[i * nl + l]);
            }
            s
        });
    }
    out
}

/// One degree of the multi-level Hermite–Padé problem.
///
/// `a_{n,m} = (-1)^m Q_n` with `Q_n` monic; `A_{n,m} = Q_n`.
#[derive(Clone)]
pub struct HpSolution {
    sys: Arc<NikishinSystem>,
    n: usize,
    q: ChebSeries,
    a: Vec<Polynomial>,
    // A_{n,j} on the nodes of σ_j, index j - 1
    node_values: Vec<Vec<ExtReal>>,
    // zeros of Q_{n,j}, index j - 1
    zeros: Vec<Vec<ExtReal>>,
    diagnostics: Diagnostics,
}

impl std::fmt::Debug for HpSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HpSolution")
            .field("n", &self.n)
            .field("m", &self.m())
            .field("diagnostics", &self.diagnostics)
            .finish()
    }
}

impl HpSolution {
    pub fn system(&self) -> &Arc<NikishinSystem> {
        &self.sys
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sys.m()
    }

    pub fn prec(&self) -> u32 {
        self.sys.prec()
    }

    /// `(-1)^m`, the sign relating `a_{n,m}` to the monic `Q_n`.
    pub fn leading_sign(&self) -> i64 {
        sign(self.m())
    }

    /// `a_{n,j}` for `j = 0..=m`.
    pub fn a(&self, j: usize) -> &Polynomial {
        &self.a[j]
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.a
    }

    /// The monic `Q_n` in monomial form.
    pub fn qn(&self) -> Polynomial {
        self.a[self.m()].scale(&ExtReal::from_i64(self.leading_sign(), self.prec()))
    }

    pub fn qn_chebyshev(&self) -> &ChebSeries {
        &self.q
    }

    /// Zeros of `Q_{n,j}`, `1 ≤ j ≤ m`, ascending.
    pub fn zeros(&self, j: usize) -> &[ExtReal] {
        &self.zeros[j - 1]
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// `A_{n,j}` at the nodes of σ_j (`1 ≤ j ≤ m`).
    pub fn node_values(&self, j: usize) -> &[ExtReal] {
        &self.node_values[j - 1]
    }

    /// `w^{(j+1)} A_{n,j+1}` on the nodes of σ_{j+1}, for `0 ≤ j < m`.
    pub fn form_weights(&self, j: usize) -> Vec<ExtReal> {
        let w = self.sys.measure(j + 1).weights();
        self.node_values[j].iter().zip(w).map(|(a, b)| a * b).collect()
    }

    fn check_form_index(&self, j: usize) -> Result<()> {
        if j > self.m() {
            return Err(Error::Invalid(format!("form index {j} outside 0..={}", self.m())));
        }
        Ok(())
    }

    /// `A_{n,j}(z)` by the chain quadrature (`z ∉ Δ_{j+1}` for `j < m`).
    pub fn eval_form(&self, j: usize, z: &ExtComplex) -> Result<ExtComplex> {
        self.check_form_index(j)?;
        let m = self.m();
        if j == m {
            return Ok(self.q.eval_complex(z));
        }
        let iv = self.sys.interval(j + 1);
        if iv.contains_complex(z) {
            return Err(iv.on_support_error(z));
        }
        Ok(cauchy_sum(self.sys.measure(j + 1).nodes(), &self.form_weights(j), z))
    }

    fn form_real_fn(&self, j: usize) -> impl Fn(&ExtReal) -> ExtReal + '_ {
        let fw = self.form_weights(j);
        let ys = self.sys.measure(j + 1).nodes();
        move |x: &ExtReal| {
            let mut s = ExtReal::zero(self.prec());
            for (f, y) in fw.iter().zip(ys) {
                s.add_div(f, &(x - y));
            }
            s
        }
    }

    /// `A_{n,j}(z)` from its defining combination `(-1)^j a_{n,j} + Σ_{k>j} (-1)^k a_{n,k} ŝ_{j+1,k}`.
    pub fn eval_form_direct(&self, j: usize, z: &ExtComplex) -> Result<ExtComplex> {
        self.check_form_index(j)?;
        let m = self.m();
        let prec = self.prec();
        let sj = ExtReal::from_i64(sign(j), prec);
        let mut v = self.a[j].eval_complex(z).scale(&sj);
        for k in j + 1..=m {
            let s = self.sys.s_hat(j + 1, k, z)?;
            let t = &self.a[k].eval_complex(z) * &s;
            v += &t.scale(&ExtReal::from_i64(sign(k), prec));
        }
        Ok(v)
    }

    /// `Q_{n,j}(z)`: 1 for `j = 0`, `Q_n` for `j = m`, otherwise the monic
    /// polynomial with the computed zeros of `A_{n,j}`.
    pub fn eval_qnj(&self, j: usize, z: &ExtComplex) -> ExtComplex {
        let m = self.m();
        if j == 0 {
            return ExtComplex::one(self.prec());
        }
        if j == m {
            return self.q.eval_complex(z);
        }
        self.zeros[j - 1]
            .iter()
            .fold(ExtComplex::one(self.prec()), |acc, r| &acc * &z.sub_real(r))
    }

    pub fn eval_qnj_real(&self, j: usize, x: &ExtReal) -> ExtReal {
        let m = self.m();
        if j == 0 {
            return ExtReal::one(self.prec());
        }
        if j == m {
            return self.q.eval(x);
        }
        self.zeros[j - 1].iter().fold(ExtReal::one(self.prec()), |acc, r| &acc * &(x - r))
    }

    /// Zeros of `Q_{n,j}`: polynomial roots for `j = m`, sign changes of the
    /// real form `A_{n,j}` on `Δ_j` otherwise.
    fn compute_zeros(&self, j: usize) -> Result<Vec<ExtReal>> {
        let n = self.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        let iv = self.sys.interval(j);
        let prec = self.prec();
        if j == self.m() {
            // Expand on [-1, 1] first: the scaled monomial basis is far better
            // conditioned than the raw one on a shifted interval.
            let unit = ChebSeries::new(ExtReal::zero(prec), ExtReal::one(prec), self.q.coeffs.clone());
            let t_roots = real_roots(&unit.to_polynomial(), &Interval::new(ExtReal::from_i64(-1, prec), ExtReal::one(prec))?)?;
            return Ok(t_roots.iter().map(|t| iv.from_unit(t)).collect());
        }
        let f = self.form_real_fn(j);
        let tol = &tolerance(prec, 1, 3) * &iv.length();
        let brackets = bracket_sign_changes(&f, iv, n)?;
        let mut z: Vec<ExtReal> = brackets.iter().map(|b| refine_root(&f, b, &tol)).collect();
        z.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(z)
    }

    /// Public form of the zero search used at construction: sign changes of
    /// `A_{n,j}` on `Δ_j` (or roots of `Q_n` when `j = m`).
    pub fn zeros_of_form(&self, j: usize) -> Result<Vec<ExtReal>> {
        if j == 0 || j > self.m() {
            return Err(Error::Invalid(format!("zeros are defined for 1 ≤ j ≤ {}", self.m())));
        }
        self.compute_zeros(j)
    }

    /// Worst relative coefficient of `z^{-1}..z^{-n}` in `A_{n,0}`, computed
    /// from the polynomials and the densities of `s_{1,k}` on the σ_1 nodes.
    /// Powers use the variable mapped onto `[-1, 1]`. Each coefficient is
    /// measured against the magnitudes of the individual terms, since the
    /// forms cancel strongly on σ_1.
    pub fn expansion_residual(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let m = self.m();
        let prec = self.prec();
        let xs = self.sys.measure(1).nodes();
        let iv = self.sys.interval(1);
        let dens: Vec<&[ExtReal]> = (1..=m).map(|k| self.sys.transform_weights(1, k)).collect();
        // Per node: the signed combination and the sum of its term magnitudes.
        let terms: Vec<(ExtReal, ExtReal)> = self.sys.exec().map(xs.len(), |i| {
            let mut s = ExtReal::zero(prec);
            let mut mag = ExtReal::zero(prec);
            for k in 1..=m {
                let t = &self.a[k].eval(&xs[i]) * &dens[k - 1][i];
                mag += &t.abs();
                if sign(k) > 0 {
                    s += &t;
                } else {
                    s -= &t;
                }
            }
            (s, mag)
        });
        let (mut v, mut mags): (Vec<ExtReal>, Vec<ExtReal>) = terms.into_iter().unzip();
        let ts: Vec<ExtReal> = xs.iter().map(|x| iv.to_unit(x)).collect();
        let mut worst = 0.0f64;
        for _ in 0..n {
            let mut s = ExtReal::zero(prec);
            let mut scale = ExtReal::zero(prec);
            for (p, g) in v.iter().zip(&mags) {
                s += p;
                scale += g;
            }
            if !scale.is_zero() {
                worst = worst.max((&s.abs() / &scale).to_f64());
            }
            for ((p, g), t) in v.iter_mut().zip(mags.iter_mut()).zip(&ts) {
                *p *= t;
                *g *= &t.abs();
            }
        }
        worst
    }

    /// Residual and scale of the identity
    /// `A_{n,j} + Σ_{k=j+1}^{m-1} (-1)^{k-j} ŝ_{k,j+1} A_{n,k} = (-1)^j (a_{n,j} - a_{n,m} ŝ_{m,j+1})`.
    /// The scale sums the magnitudes of all terms, with polynomials bounded by
    /// their absolute-coefficient evaluation at `|z|`.
    pub fn form_identity_check(&self, j: usize, z: &ExtComplex) -> Result<(ExtReal, ExtReal)> {
        let m = self.m();
        if j >= m {
            return Err(Error::Invalid(format!("identity needs 0 ≤ j < {m}")));
        }
        let prec = self.prec();
        let za = z.abs();
        let abs_eval = |p: &Polynomial| {
            Polynomial::new(p.coeffs().iter().map(|c| c.abs()).collect(), prec).eval(&za)
        };
        let mut total = self.eval_form(j, z)?;
        let mut scale = total.abs();
        for k in j + 1..m {
            let t = &self.sys.s_hat(k, j + 1, z)? * &self.eval_form(k, z)?;
            scale += &t.abs();
            if sign(k - j) > 0 {
                total += &t;
            } else {
                total -= &t;
            }
        }
        let smj = self.sys.s_hat(m, j + 1, z)?;
        let rhs = &self.a[j].eval_complex(z) - &(&self.a[m].eval_complex(z) * &smj);
        scale += &abs_eval(&self.a[j]);
        scale += &(&abs_eval(&self.a[m]) * &smj.abs());
        let rhs = rhs.scale(&ExtReal::from_i64(sign(j), prec));
        total -= &rhs;
        Ok((total.abs(), scale))
    }

    pub fn form_identity_residual(&self, j: usize, z: &ExtComplex) -> Result<ExtReal> {
        Ok(self.form_identity_check(j, z)?.0)
    }

    /// `A_{n,j+1}(x) / (Q_{n,j+1}(x) Q_{n,j}(x))` on `Δ_{j+1}` (`0 ≤ j < m`):
    /// the varying weight of the `Q_{n,j+1}` orthogonality, of constant sign.
    pub fn varying_weight(&self, j: usize, x: &ExtReal) -> Result<ExtReal> {
        let m = self.m();
        if j >= m {
            return Err(Error::Invalid(format!("varying weight needs 0 ≤ j < {m}")));
        }
        let a = if j + 1 == m {
            self.q.eval(x)
        } else {
            let iv = self.sys.interval(j + 2);
            if iv.contains(x) {
                return Err(iv.on_support_error(&ExtComplex::from_real(x.clone())));
            }
            self.form_real_fn(j + 1)(x)
        };
        Ok(&a / &(&self.eval_qnj_real(j + 1, x) * &self.eval_qnj_real(j, x)))
    }

    /// `K_{n,j}` for `j = 1..=m`, where
    /// `K_{n,j}^{-2} = ∫ |Q_{n,j} A_{n,j}| / |Q_{n,j-1}| dσ_j`; `K_{n,m+1} = 1`.
    pub fn leading_constants(&self) -> Vec<ExtReal> {
        let m = self.m();
        (1..=m)
            .map(|j| {
                let xs = self.sys.measure(j).nodes();
                let w = self.sys.measure(j).weights();
                let mut s = ExtReal::zero(self.prec());
                for ((x, wi), av) in xs.iter().zip(w).zip(&self.node_values[j - 1]) {
                    let num = &(&self.eval_qnj_real(j, x) * av).abs() * wi;
                    s += &(&num / &self.eval_qnj_real(j - 1, x).abs());
                }
                s.sqrt().recip()
            })
            .collect()
    }

    /// `κ_{n,k} = K_{n,k} / K_{n,k+1}` for `k = 1..=m`.
    pub fn kappas(&self) -> Vec<ExtReal> {
        let k = self.leading_constants();
        let prec = self.prec();
        (0..k.len())
            .map(|i| if i + 1 < k.len() { &k[i] / &k[i + 1] } else { k[i].with_prec(prec) })
            .collect()
    }

    pub fn to_document(&self) -> SolutionDocument {
        let dec = |v: &ExtReal| v.to_decimal(None);
        SolutionDocument {
            n: self.n,
            m: self.m(),
            precision: self.prec(),
            a: self.a.iter().map(|p| p.coeffs().iter().map(dec).collect()).collect(),
            qn_chebyshev: ChebDocument {
                center: dec(&self.q.center),
                half_width: dec(&self.q.half_width),
                coeffs: self.q.coeffs.iter().map(dec).collect(),
            },
            zeros: self.zeros.iter().enumerate().map(|(i, z)| ((i + 1).to_string(), z.iter().map(dec).collect())).collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// Rebuilds a solution from its document against the same system.
    pub fn from_document(sys: Arc<NikishinSystem>, doc: &SolutionDocument) -> Result<HpSolution> {
        if doc.m != sys.m() || doc.a.len() != sys.m() + 1 {
            return Err(Error::Invalid(format!("document has m = {}, system has m = {}", doc.m, sys.m())));
        }
        let prec = sys.prec();
        let parse = |v: &[String]| v.iter().map(|s| ExtReal::parse(s, prec)).collect::<Result<Vec<_>>>();
        let a = doc.a.iter().map(|c| Ok(Polynomial::new(parse(c)?, prec))).collect::<Result<Vec<_>>>()?;
        let q = ChebSeries::new(
            ExtReal::parse(&doc.qn_chebyshev.center, prec)?,
            ExtReal::parse(&doc.qn_chebyshev.half_width, prec)?,
            parse(&doc.qn_chebyshev.coeffs)?,
        );
        let mut zeros = Vec::with_capacity(sys.m());
        for j in 1..=sys.m() {
            let z = doc.zeros.get(&j.to_string()).ok_or_else(|| Error::Invalid(format!("missing zeros for j = {j}")))?;
            if z.len() != doc.n {
                return Err(Error::CountMismatch { expected: doc.n, found: z.len() });
            }
            zeros.push(parse(z)?);
        }
        let node_values = form_node_values(&sys, &q);
        Ok(HpSolution { sys, n: doc.n, q, a, node_values, zeros, diagnostics: doc.diagnostics.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebDocument {
    pub center: String,
    pub half_width: String,
    pub coeffs: Vec<String>,
}

/// JSON form of a solution; numbers are decimal strings at full precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub n: usize,
    pub m: usize,
    pub precision: u32,
    pub a: Vec<Vec<String>>,
    pub qn_chebyshev: ChebDocument,
    pub zeros: BTreeMap<String, Vec<String>>,
    pub diagnostics: Diagnostics,
}

pub fn solve_qn(sys: Arc<NikishinSystem>, n: usize) -> Result<Polynomial> {
    HpSolver::new(sys, n).solve_qn(n)
}

pub fn solve_hp_vector(sys: Arc<NikishinSystem>, n: usize) -> Result<HpSolution> {
    HpSolver::new(sys, n).solve(n)
}

/// Solution for the reversed system; its `Q_n` is the biorthogonal partner `P_n`.
pub fn solve_reversed(sys: &NikishinSystem, n: usize) -> Result<HpSolution> {
    HpSolver::new(Arc::new(sys.reversed()), n).solve(n)
}

fn pair_with_scale(sys: &NikishinSystem, p_vals: &[ExtReal], q_vals: &[ExtReal]) -> (ExtReal, ExtReal) {
    let w1 = sys.measure(1).weights();
    let v: Vec<ExtReal> = p_vals.iter().zip(w1).map(|(a, b)| a * b).collect();
    let va: Vec<ExtReal> = v.iter().map(|x| x.abs()).collect();
    let u = sys.push_forward(&v);
    let ua = sys.push_forward(&va);
    let mut s = ExtReal::zero(sys.prec());
    let mut scale = ExtReal::zero(sys.prec());
    for ((a, b), q) in u.iter().zip(&ua).zip(q_vals) {
        s.add_mul(a, q);
        scale += &(&b.abs() * &q.abs());
    }
    (s, scale)
}

/// `∬ P_k(x_1) K(x_1, x_m) Q_n(x_m) dσ_1 dσ_m`.
pub fn biorthogonality_entry(sys: &NikishinSystem, pk: &Polynomial, qn: &Polynomial) -> ExtReal {
    biorthogonality_scaled(sys, pk, qn).0
}

/// The entry together with `∬ |P_k| |K| |Q_n|`, the natural rounding scale.
pub fn biorthogonality_scaled(sys: &NikishinSystem, pk: &Polynomial, qn: &Polynomial) -> (ExtReal, ExtReal) {
    let pv: Vec<ExtReal> = sys.measure(1).nodes().iter().map(|x| pk.eval(x)).collect();
    let qv: Vec<ExtReal> = sys.measure(sys.m()).nodes().iter().map(|x| qn.eval(x)).collect();
    pair_with_scale(sys, &pv, &qv)
}

/// Entries `(value, scale)` indexed `[k][n]` between reversed-system
/// solutions (the `P_k`) and forward solutions (the `Q_n`).
pub fn biorthogonality_matrix(
    sys: &NikishinSystem,
    reversed: &[HpSolution],
    forward: &[HpSolution],
) -> Vec<Vec<(ExtReal, ExtReal)>> {
    sys.exec().map(reversed.len(), |k| {
        // The reversed system's last measure is σ_1, so its Q values sit on σ_1 nodes.
        let pv = reversed[k].node_values(reversed[k].m());
        forward.iter().map(|f| pair_with_scale(sys, pv, f.node_values(f.m()))).collect()
    })
}
