//! Multi-start maximization of the relaxed rate function over sine-transformed
//! coordinates, with constraints handled by an augmented Lagrangian.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::objective::{
    equalities, f_relaxed, f_total, feasibility, inequalities, objective, FeasibilityOptions,
    FeasibilityReport, Mode, PartitionVector, DIM, EPS0, EQ_COUNT, FLOWS, INEQ_COUNT,
};
use super::scalar::{Dual, Scalar};
use super::special::{sine_transform, sine_transform_inverse};
use crate::error::{Error, Result};

type D = Dual<DIM>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub budget: f64,
    pub eps0: f64,
    pub n_starts: usize,
    pub seed: u64,
    /// Variables are confined to `[m, 1 - m]`.
    pub interior_margin: f64,
    /// ∞-norm radius for merging local optima.
    pub cluster_radius: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub rho_initial: f64,
    pub rho_growth: f64,
    pub rho_max: f64,
    /// Outer loop stops once the largest constraint violation is below this.
    pub target_violation: f64,
    pub eq_tol: f64,
    pub ineq_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            budget: 0.07,
            eps0: EPS0,
            n_starts: 200,
            seed: 11,
            interior_margin: 0.0,
            cluster_radius: 1e-4,
            max_outer: 30,
            max_inner: 1000,
            rho_initial: 10.0,
            rho_growth: 5.0,
            rho_max: 1e7,
            target_violation: 1e-10,
            eq_tol: 1e-9,
            ineq_tol: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::domain("at least one start is required"));
        }
        if !(self.budget > 0.0 && self.budget < 1.0) {
            return Err(Error::domain("yellow budget must lie in (0, 1)"));
        }
        if !(0.0..0.5).contains(&self.interior_margin) {
            return Err(Error::domain("interior margin must lie in [0, 0.5)"));
        }
        if !(self.eps0 > 0.0) {
            return Err(Error::domain("eps0 must be positive"));
        }
        Ok(())
    }

    fn feasibility_options(&self) -> FeasibilityOptions {
        FeasibilityOptions {
            budget: self.budget,
            eps0: self.eps0,
            eq_tol: self.eq_tol,
            ineq_tol: self.ineq_tol,
        }
    }
}

/// Outcome of one local search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalResult {
    pub start: usize,
    /// Exact `f` at the returned point.
    pub value: f64,
    pub relaxed_value: f64,
    pub point: PartitionVector,
    pub max_violation: f64,
    pub feasible: bool,
    pub iterations: usize,
    pub outer_iterations: usize,
    pub report: FeasibilityReport,
}

/// A group of local optima within the clustering radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOptimum {
    pub value: f64,
    pub point: PartitionVector,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultistartReport {
    pub config: OptimizerConfig,
    pub best_value: Option<f64>,
    pub best_point: Option<PartitionVector>,
    /// Clustered feasible optima, best first.
    pub local_optima: Vec<LocalOptimum>,
    pub feasible_starts: usize,
    /// Whether any feasible local optimum has `f ≥ 0`.
    pub nonnegative_found: bool,
    pub starts: Vec<LocalResult>,
}

/// Maps transformed coordinates to `u = m + (1 - 2m) g(x)`.
pub fn to_u(x: &[f64; DIM], m: f64) -> [f64; DIM] {
    let mut u = [0.0; DIM];
    for i in 0..DIM {
        u[i] = m + (1.0 - 2.0 * m) * sine_transform(x[i]);
    }
    u
}

fn from_u(u: &[f64; DIM], m: f64) -> [f64; DIM] {
    let mut x = [0.0; DIM];
    for i in 0..DIM {
        let y = ((u[i] - m) / (1.0 - 2.0 * m)).clamp(0.0, 1.0);
        x[i] = sine_transform_inverse(y).expect("clamped");
    }
    x
}

/// Random start: uniform on `[0.05, 0.95]`, projected onto the simplices
/// and rescaled so that (eq1) and (eq2) hold.
pub fn sample_start<Rn: Rng>(rng: &mut Rn) -> [f64; DIM] {
    let mut u = [0.0; DIM];
    for v in u.iter_mut() {
        *v = rng.gen_range(0.05..0.95);
    }
    let sa: f64 = u[0..4].iter().sum();
    u[0..4].iter_mut().for_each(|a| *a /= sa);
    for i in 0..4 {
        let out: Vec<usize> = (0..13).filter(|&k| FLOWS[k].0 == i).collect();
        let sbg: f64 = out.iter().map(|&k| u[12 + k] + u[25 + k]).sum();
        let sr: f64 = out.iter().map(|&k| u[38 + k]).sum();
        for &k in &out {
            u[12 + k] /= sbg;
            u[25 + k] /= sbg;
            u[38 + k] /= sr;
        }
    }
    u[51] *= 0.5;
    u[52] *= 0.5;
    let e2 = libm::exp(-2.0);
    let ga: f64 = (0..4).map(|i| u[8 + i] * u[i]).sum();
    for i in 0..4 {
        u[8 + i] = (u[8 + i] * 3.0 * e2 / ga).min(0.99);
    }
    let bga: f64 = (0..4).map(|i| u[4 + i] * u[8 + i] * u[i]).sum();
    for i in 0..4 {
        u[4 + i] = (u[4 + i] * e2 / bga).min(0.99);
    }
    u
}

struct Alm<'a> {
    cfg: &'a OptimizerConfig,
    lam: [f64; EQ_COUNT],
    mu: [f64; INEQ_COUNT],
    rho: f64,
}

impl Alm<'_> {
    /// Augmented Lagrangian of `-f` and its gradient in `x`.
    fn eval(&self, x: &[f64; DIM]) -> (f64, [f64; DIM]) {
        let m = self.cfg.interior_margin;
        let u = to_u(x, m);
        let ud: Vec<D> = (0..DIM).map(|i| D::var(u[i], i)).collect();
        let mut l = -objective(&ud, self.cfg.budget, Mode::Relaxed);
        let h = equalities(&ud);
        for k in 0..EQ_COUNT {
            l += h[k] * self.lam[k] + h[k].sqr() * (0.5 * self.rho);
        }
        let gi = inequalities(&ud, self.cfg.budget, self.cfg.eps0);
        for k in 0..INEQ_COUNT {
            let s = -gi[k] * self.rho + self.mu[k];
            if s.re() > 0.0 {
                l += (s.sqr() - self.mu[k] * self.mu[k]) * (0.5 / self.rho);
            } else {
                l += D::cst(-self.mu[k] * self.mu[k] * 0.5 / self.rho);
            }
        }
        let mut g = [0.0; DIM];
        let k = (1.0 - 2.0 * m) * 0.5 * core::f64::consts::PI;
        for i in 0..DIM {
            g[i] = l.d[i] * k * libm::cos(core::f64::consts::PI * (x[i] - 0.5));
        }
        (l.v, g)
    }

    fn violation(&self, u: &[f64; DIM]) -> f64 {
        let h = equalities(&u[..]);
        let gi = inequalities(&u[..], self.cfg.budget, self.cfg.eps0);
        let e = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        gi.iter().fold(e, |a, v| a.max(-v))
    }

    fn update(&mut self, u: &[f64; DIM]) {
        let h = equalities(&u[..]);
        let gi = inequalities(&u[..], self.cfg.budget, self.cfg.eps0);
        for k in 0..EQ_COUNT {
            self.lam[k] += self.rho * h[k];
        }
        for k in 0..INEQ_COUNT {
            self.mu[k] = (self.mu[k] - self.rho * gi[k]).max(0.0);
        }
    }
}

/// Limited-memory BFGS with a strong-Wolfe line search; returns the final
/// point and the number of iterations.
pub fn lbfgs<F>(mut f: F, x0: &[f64], max_iter: usize, gtol: f64) -> (Vec<f64>, usize)
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    const MEM: usize = 10;
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let mut iters = 0;
    let mut stalls = 0;
    while iters < max_iter {
        if g.iter().fold(0.0f64, |a, v| a.max(v.abs())) <= gtol {
            break;
        }
        // Two-loop recursion.
        let mut q = g.clone();
        let mut alpha = vec![0.0; s_hist.len()];
        for i in (0..s_hist.len()).rev() {
            alpha[i] = rho_hist[i] * dot(&s_hist[i], &q);
            q.iter_mut()
                .zip(&y_hist[i])
                .for_each(|(a, b)| *a -= alpha[i] * b);
        }
        let gamma = match s_hist.last() {
            Some(s) => {
                dot(s, y_hist.last().expect("paired"))
                    / dot(
                        y_hist.last().expect("paired"),
                        y_hist.last().expect("paired"),
                    )
            }
            None => 1.0 / g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0),
        };
        q.iter_mut().for_each(|v| *v *= gamma);
        for i in 0..s_hist.len() {
            let beta = rho_hist[i] * dot(&y_hist[i], &q);
            q.iter_mut()
                .zip(&s_hist[i])
                .for_each(|(a, b)| *a += (alpha[i] - beta) * b);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&g, &dir);
        }
        let Some((step, fnew, gnew)) = wolfe_search(&mut f, &x, fx, slope, &dir) else {
            if s_hist.is_empty() {
                break;
            }
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            iters += 1;
            continue;
        };
        let s: Vec<f64> = dir.iter().map(|d| d * step).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        x.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        let improvement = fx - fnew;
        fx = fnew;
        g = gnew;
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if s_hist.len() == MEM {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(y);
            rho_hist.push(1.0 / sy);
        }
        iters += 1;
        if improvement <= 1e-15 * fx.abs().max(1e-300) {
            stalls += 1;
            if stalls >= 5 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    debug_assert_eq!(x.len(), n);
    (x, iters)
}

fn wolfe_search<F>(
    f: &mut F,
    x: &[f64],
    f0: f64,
    slope0: f64,
    dir: &[f64],
) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut eval = |a: f64| {
        let p: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + a * di).collect();
        let (v, g) = f(&p);
        let s = g.iter().zip(dir).map(|(gi, di)| gi * di).sum::<f64>();
        (v, g, s)
    };
    let (mut a_prev, mut f_prev, mut s_prev) = (0.0, f0, slope0);
    let mut a = 1.0;
    for i in 0..30 {
        let (fa, ga, sa) = eval(a);
        if !fa.is_finite() || fa > f0 + C1 * a * slope0 || (i > 0 && fa >= f_prev) {
            return zoom(&mut eval, f0, slope0, (a_prev, f_prev, s_prev), (a, fa, sa));
        }
        if sa.abs() <= -C2 * slope0 {
            return Some((a, fa, ga));
        }
        if sa >= 0.0 {
            return zoom(&mut eval, f0, slope0, (a, fa, sa), (a_prev, f_prev, s_prev));
        }
        a_prev = a;
        f_prev = fa;
        s_prev = sa;
        a *= 2.0;
    }
    None
}

fn zoom<E>(
    eval: &mut E,
    f0: f64,
    slope0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
) -> Option<(f64, f64, Vec<f64>)>
where
    E: FnMut(f64) -> (f64, Vec<f64>, f64),
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for _ in 0..40 {
        let (a0, f0l, s0) = lo;
        let (a1, f1, _) = hi;
        // Quadratic interpolation from the low end, safeguarded to the
        // middle of the bracket.
        let width = a1 - a0;
        let denom = 2.0 * (f1 - f0l - s0 * width);
        let mut a = if f1.is_finite() && denom > 0.0 {
            a0 - s0 * width * width / denom
        } else {
            a0 + 0.5 * width
        };
        let (l, h) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
        if !(a > l + 0.1 * (h - l) && a < h - 0.1 * (h - l)) {
            a = 0.5 * (a0 + a1);
        }
        let (fa, ga, sa) = eval(a);
        if fa.is_finite() && fa < f0 && best.as_ref().is_none_or(|b| fa < b.1) {
            best = Some((a, fa, ga.clone()));
        }
        if !fa.is_finite() || fa > f0 + C1 * a * slope0 || fa >= f0l {
            hi = (a, fa, sa);
        } else {
            if sa.abs() <= -C2 * slope0 {
                return Some((a, fa, ga));
            }
            if sa * (a1 - a0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, sa);
        }
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1e-16) {
            break;
        }
    }
    best
}

/// Solves `A x = b` for a small dense system by Gaussian elimination with
/// partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let k = a[r][c] / a[c][c];
            if k != 0.0 {
                for j in c..n {
                    a[r][j] -= k * a[c][j];
                }
                b[r] -= k * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|j| a[c][j] * x[j]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

/// Gauss-Newton projection onto the equalities and the nearly active
/// inequalities, by minimum-norm corrections in `u`.
fn polish(u: &mut [f64; DIM], cfg: &OptimizerConfig) {
    let (lo, hi) = (cfg.interior_margin, 1.0 - cfg.interior_margin);
    for _ in 0..8 {
        let ud: Vec<D> = (0..DIM).map(|i| D::var(u[i], i)).collect();
        let eq = equalities(&ud);
        let ineq = inequalities(&ud, cfg.budget, cfg.eps0);
        let mut rows: Vec<D> = eq.to_vec();
        rows.extend(ineq.iter().copied().filter(|c| c.v < 1e-7));
        let resid = rows.iter().map(|r| r.v.abs()).fold(0.0, f64::max);
        if resid < 1e-14 {
            break;
        }
        let k = rows.len();
        let mut jjt = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                jjt[i][j] = rows[i].d.iter().zip(&rows[j].d).map(|(a, b)| a * b).sum();
            }
            jjt[i][i] += 1e-14;
        }
        let rhs: Vec<f64> = rows.iter().map(|r| -r.v).collect();
        let Some(w) = solve_dense(jjt, rhs) else {
            break;
        };
        let mut next = *u;
        for (i, r) in rows.iter().enumerate() {
            for (nj, dj) in next.iter_mut().zip(r.d.iter()) {
                *nj += w[i] * dj;
            }
        }
        if next.iter().any(|v| !(lo..=hi).contains(v)) {
            break;
        }
        *u = next;
    }
}

fn max_violation(u: &[f64; DIM], cfg: &OptimizerConfig) -> f64 {
    let h = equalities(&u[..]);
    let gi = inequalities(&u[..], cfg.budget, cfg.eps0);
    let e = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    gi.iter().fold(e, |a, v| a.max(-v))
}

/// One augmented-Lagrangian local search from the point `start`.
pub fn local_solve(
    cfg: &OptimizerConfig,
    start: &PartitionVector,
    index: usize,
) -> Result<LocalResult> {
    cfg.validate()?;
    let m = cfg.interior_margin;
    let mut x = from_u(&start.to_array(), m);
    let mut alm = Alm {
        cfg,
        lam: [0.0; EQ_COUNT],
        mu: [0.0; INEQ_COUNT],
        rho: cfg.rho_initial,
    };
    let mut iterations = 0;
    let mut outer = 0;
    while outer < cfg.max_outer {
        outer += 1;
        let (xn, it) = lbfgs(
            |z| {
                let mut a = [0.0; DIM];
                a.copy_from_slice(z);
                let (v, g) = alm.eval(&a);
                (v, g.to_vec())
            },
            &x,
            cfg.max_inner,
            1e-10,
        );
        x.copy_from_slice(&xn);
        iterations += it;
        let u = to_u(&x, m);
        let viol = alm.violation(&u);
        alm.update(&u);
        if viol < cfg.target_violation {
            break;
        }
        alm.rho = (alm.rho * cfg.rho_growth).min(cfg.rho_max);
    }
    let mut u = to_u(&x, m);
    polish(&mut u, cfg);
    for v in u.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    if u[51] + u[52] > 1.0 {
        let s = u[51] + u[52];
        u[51] /= s;
        u[52] /= s;
    }
    let point = PartitionVector::from_slice(&u)?;
    let report = feasibility(&point, &cfg.feasibility_options())?;
    Ok(LocalResult {
        start: index,
        value: f_total(&point, cfg.budget)?,
        relaxed_value: f_relaxed(&point, cfg.budget),
        max_violation: max_violation(&u, cfg),
        feasible: report.feasible,
        point,
        iterations,
        outer_iterations: outer,
        report,
    })
}

/// Local search from the `index`-th random start of `cfg.seed`.
pub fn run_start(cfg: &OptimizerConfig, index: usize) -> Result<LocalResult> {
    let mut rng = crate::rng::stream(cfg.seed, index as u64);
    let start = PartitionVector::from_slice(&sample_start(&mut rng))?;
    local_solve(cfg, &start, index)
}

/// Merges per-start results into clustered optima.
pub fn summarize(cfg: &OptimizerConfig, mut starts: Vec<LocalResult>) -> Result<MultistartReport> {
    starts.sort_by_key(|s| s.start);
    let mut feasible: Vec<&LocalResult> = starts
        .iter()
        .filter(|s| s.feasible && s.value.is_finite())
        .collect();
    if feasible.is_empty() {
        return Err(Error::state("no feasible point found from any start"));
    }
    feasible.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut optima: Vec<LocalOptimum> = Vec::new();
    for s in &feasible {
        let p = s.point.to_array();
        let near = optima.iter_mut().find(|o| {
            let q = o.point.to_array();
            p.iter()
                .zip(q.iter())
                .all(|(a, b)| (a - b).abs() <= cfg.cluster_radius)
        });
        match near {
            Some(o) => o.count += 1,
            None => optima.push(LocalOptimum {
                value: s.value,
                point: s.point.clone(),
                count: 1,
            }),
        }
    }
    let best = &optima[0];
    Ok(MultistartReport {
        config: cfg.clone(),
        best_value: Some(best.value),
        best_point: Some(best.point.clone()),
        feasible_starts: feasible.len(),
        nonnegative_found: feasible.iter().any(|s| s.value >= 0.0),
        local_optima: optima,
        starts,
    })
}

/// Sequential multi-start search.
pub fn multistart_optimize(cfg: &OptimizerConfig) -> Result<MultistartReport> {
    cfg.validate()?;
    let starts = (0..cfg.n_starts)
        .map(|i| run_start(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    summarize(cfg, starts)
}
