//! The rate function `f(u)` and its constraint system.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use super::special::{relax_xlnx_d, t_exponent, t_extended, RELAX_X0};
use crate::error::{Error, Result};

pub const S: usize = 0;
pub const T: usize = 1;
pub const U: usize = 2;
pub const R: usize = 3;
pub const PART_NAMES: [&str; 4] = ["S", "T", "U", "R"];

/// Admissible ordered pairs `(source, target)` of parts. `SS`, `TR` and `RT`
/// are absent by construction.
pub const FLOWS: [(usize, usize); 13] = [
    (S, U),
    (S, T),
    (S, R),
    (T, S),
    (T, T),
    (T, U),
    (U, S),
    (U, T),
    (U, U),
    (U, R),
    (R, S),
    (R, U),
    (R, R),
];

pub const DIM: usize = 53;
pub const EQ_COUNT: usize = 15;
pub const INEQ_COUNT: usize = 9;

/// `ε0 = 2^-32`.
pub const EPS0: f64 = 1.0 / 4_294_967_296.0;
pub const DEFAULT_BUDGET: f64 = 0.07;

pub fn e2() -> f64 {
    libm::exp(-2.0)
}

/// Index of the flow `(i, j)` in [`FLOWS`].
pub fn flow_index(i: usize, j: usize) -> Option<usize> {
    FLOWS.iter().position(|&f| f == (i, j))
}

/// The 53 scalars `(α, β, γ, b, g, r, y1, y2)`; flow vectors follow [`FLOWS`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionVector {
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
    pub gamma: [f64; 4],
    pub b: [f64; 13],
    pub g: [f64; 13],
    pub r: [f64; 13],
    pub y1: f64,
    pub y2: f64,
}

impl PartitionVector {
    /// Flat layout: `α, β, γ, b, g, r, y1, y2`.
    pub fn to_array(&self) -> [f64; DIM] {
        let mut x = [0.0; DIM];
        x[0..4].copy_from_slice(&self.alpha);
        x[4..8].copy_from_slice(&self.beta);
        x[8..12].copy_from_slice(&self.gamma);
        x[12..25].copy_from_slice(&self.b);
        x[25..38].copy_from_slice(&self.g);
        x[38..51].copy_from_slice(&self.r);
        x[51] = self.y1;
        x[52] = self.y2;
        x
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != DIM {
            return Err(Error::domain("a partition vector has 53 components"));
        }
        let mut p = PartitionVector {
            alpha: [0.0; 4],
            beta: [0.0; 4],
            gamma: [0.0; 4],
            b: [0.0; 13],
            g: [0.0; 13],
            r: [0.0; 13],
            y1: x[51],
            y2: x[52],
        };
        p.alpha.copy_from_slice(&x[0..4]);
        p.beta.copy_from_slice(&x[4..8]);
        p.gamma.copy_from_slice(&x[8..12]);
        p.b.copy_from_slice(&x[12..25]);
        p.g.copy_from_slice(&x[25..38]);
        p.r.copy_from_slice(&x[38..51]);
        Ok(p)
    }

    /// Rejects NaN, components outside `[0, 1]` and `y1 + y2 > 1`.
    pub fn check_structure(&self) -> Result<()> {
        let x = self.to_array();
        if let Some(i) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::domain(alloc::format!(
                "component {} = {} outside [0, 1]",
                variable_name(i),
                x[i]
            )));
        }
        if self.y1 + self.y2 > 1.0 + 1e-12 {
            return Err(Error::domain("y1 + y2 exceeds 1"));
        }
        Ok(())
    }
}

/// Human-readable name of flat component `i`, e.g. `b_SU`.
pub fn variable_name(i: usize) -> String {
    let part = |k: usize| PART_NAMES[k];
    match i {
        0..=3 => alloc::format!("alpha_{}", part(i)),
        4..=7 => alloc::format!("beta_{}", part(i - 4)),
        8..=11 => alloc::format!("gamma_{}", part(i - 8)),
        12..=50 => {
            let (name, k) = [("b", 12), ("g", 25), ("r", 38)][(i - 12) / 13];
            let (s, t) = FLOWS[i - k];
            alloc::format!("{name}_{}{}", part(s), part(t))
        }
        51 => "y1".into(),
        _ => "y2".into(),
    }
}

/// Which form of the objective to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The rate function itself, with `0 ln 0 = 0` and `a ln 0 = -∞`.
    Exact,
    /// Smooth surrogate: relaxed `x ln x`, tangent-continued `ln` below
    /// `2^-32`, and the quadratic continuation of `t` below `2 + 10^-6`.
    Relaxed,
}

fn xlogx<X: Scalar>(x: X, mode: Mode) -> X {
    match mode {
        Mode::Exact => {
            if x.re() == 0.0 {
                X::cst(0.0)
            } else {
                x * x.ln()
            }
        }
        Mode::Relaxed => {
            let (v, d, _) = relax_xlnx_d(x.re());
            x.chain(v, d)
        }
    }
}

/// `a ln b` with `0 ln b = 0` and `a ln 0 = -∞` in exact mode.
fn mul_ln<X: Scalar>(a: X, b: X, mode: Mode) -> X {
    match mode {
        Mode::Exact => {
            if a.re() == 0.0 {
                X::cst(0.0)
            } else if b.re() <= 0.0 {
                X::cst(f64::NEG_INFINITY)
            } else {
                a * b.ln()
            }
        }
        Mode::Relaxed => {
            let x = b.re();
            if x >= RELAX_X0 {
                a * b.ln()
            } else {
                a * b.chain(
                    libm::log(RELAX_X0) + (x - RELAX_X0) / RELAX_X0,
                    1.0 / RELAX_X0,
                )
            }
        }
    }
}

fn neg_entropy<X: Scalar>(xs: impl IntoIterator<Item = X>, mode: Mode) -> X {
    let mut s = X::cst(0.0);
    for x in xs {
        s += xlogx(x, mode);
    }
    s
}

/// `den · t(inflow / den)`, the blue in-degree term.
fn blue_term<X: Scalar>(inflow: X, den: X, mode: Mode) -> X {
    match mode {
        Mode::Exact => {
            if den.re() == 0.0 {
                return X::cst(if inflow.re() == 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                });
            }
            let d = inflow / den;
            match t_exponent(d.re()) {
                Ok(t) => den * X::cst(t),
                Err(_) => X::cst(f64::NEG_INFINITY),
            }
        }
        Mode::Relaxed => {
            let den = if den.re() < 1e-12 {
                den - den.re() + 1e-12
            } else {
                den
            };
            let d = inflow / den;
            let (t, dt) = t_extended(d.re());
            den * d.chain(t, dt)
        }
    }
}

/// `Σ_j 2 α_j c_ji`, the mass of colour `c` directed into part `i`.
fn inflow<X: Scalar>(alpha: &[X], c: &[X], i: usize) -> X {
    let mut s = X::cst(0.0);
    for (k, &(src, dst)) in FLOWS.iter().enumerate() {
        if dst == i {
            s += alpha[src] * c[k] * 2.0;
        }
    }
    s
}

struct View<'a, X> {
    alpha: &'a [X],
    beta: &'a [X],
    gamma: &'a [X],
    b: &'a [X],
    g: &'a [X],
    r: &'a [X],
    y1: X,
    y2: X,
}

fn view<X: Scalar>(x: &[X]) -> View<'_, X> {
    View {
        alpha: &x[0..4],
        beta: &x[4..8],
        gamma: &x[8..12],
        b: &x[12..25],
        g: &x[25..38],
        r: &x[38..51],
        y1: x[51],
        y2: x[52],
    }
}

/// `f(u)` over the flat layout, generic in the scalar type.
pub fn objective<X: Scalar>(x: &[X], budget: f64, mode: Mode) -> X {
    let u = view(x);
    let one = X::cst(1.0);
    let mut f = -neg_entropy(u.alpha.iter().copied(), mode);
    for i in 0..4 {
        let (a, ga, be) = (u.alpha[i], u.gamma[i], u.beta[i]);
        f += -(a * (xlogx(ga, mode) + xlogx(one - ga, mode)));
        let out: Vec<usize> = (0..13).filter(|&k| FLOWS[k].0 == i).collect();
        // Blue and green out-flows.
        let w = a * 2.0;
        let h_bg = -neg_entropy(out.iter().flat_map(|&k| [u.b[k], u.g[k]]), mode);
        f += w * h_bg;
        for &k in &out {
            let j = FLOWS[k].1;
            f += mul_ln(w * u.b[k], (one - u.gamma[j]) * u.alpha[j], mode);
            f += mul_ln(w * u.g[k], u.gamma[j] * u.alpha[j], mode);
        }
        // Red out-flows.
        let wr = a * ga * (be + 1.0);
        f += wr * -neg_entropy(out.iter().map(|&k| u.r[k]), mode);
        for &k in &out {
            f += mul_ln(wr * u.r[k], u.alpha[FLOWS[k].1], mode);
        }
        // Green in-degrees.
        f += a * ga * (be - 1.0 - xlogx(be, mode));
        // Blue in-degrees.
        f += blue_term(inflow(u.alpha, u.b, i), (one - ga) * a, mode);
    }
    // Yellow edges.
    let c = budget;
    let y3 = one - u.y1 - u.y2;
    let (au, ar, at, as_) = (u.alpha[U], u.alpha[R], u.alpha[T], u.alpha[S]);
    let targets = [
        (u.y1, au.sqr() + au * (one - au) * 2.0 + ar.sqr()),
        (u.y2, at.sqr()),
        (y3, as_ * (at + ar) * 2.0),
    ];
    f += X::cst(c * libm::log(c));
    for (y, area) in targets {
        let cy = y * c;
        f += mul_ln(cy, area, mode) - xlogx(cy, mode);
    }
    f
}

/// Equality residuals, all `= 0` at feasible points: `Σα - 1`, (eq1), (eq2),
/// the four blue+green normalizations, the four red normalizations and the
/// four green balances. (eq3) is implied by the rest and reported separately.
pub fn equalities<X: Scalar>(x: &[X]) -> [X; EQ_COUNT] {
    let u = view(x);
    let mut out = [X::cst(0.0); EQ_COUNT];
    let mut sa = X::cst(-1.0);
    let mut sg = X::cst(-3.0 * e2());
    let mut sb = X::cst(-e2());
    for i in 0..4 {
        sa += u.alpha[i];
        sg += u.gamma[i] * u.alpha[i];
        sb += u.beta[i] * u.gamma[i] * u.alpha[i];
    }
    out[0] = sa;
    out[1] = sg;
    out[2] = sb;
    for i in 0..4 {
        let mut bg = X::cst(-1.0);
        let mut r = X::cst(-1.0);
        for k in (0..13).filter(|&k| FLOWS[k].0 == i) {
            bg += u.b[k] + u.g[k];
            r += u.r[k];
        }
        out[3 + i] = bg;
        out[7 + i] = r;
        out[11 + i] = inflow(u.alpha, u.g, i) - u.alpha[i] * u.gamma[i] * (X::cst(1.0) - u.beta[i]);
    }
    out
}

/// (eq3): `Σ_i 2 α_i Σ_j g_ij - 2e^-2`.
pub fn green_total<X: Scalar>(x: &[X]) -> X {
    let u = view(x);
    let mut s = X::cst(-2.0 * e2());
    for (k, &(src, _)) in FLOWS.iter().enumerate() {
        s += u.alpha[src] * u.g[k] * 2.0;
    }
    s
}

/// Inequality slacks, all `≥ 0` at feasible points: `1 - y1 - y2`,
/// `α_S - α_U`, `0.995 - α_R`, the T-edge cap, (constraint1) and the four
/// blue in-degree bounds.
pub fn inequalities<X: Scalar>(x: &[X], budget: f64, eps0: f64) -> [X; INEQ_COUNT] {
    let u = view(x);
    let k = |i, j| flow_index(i, j).expect("admissible flow");
    let mut out = [X::cst(0.0); INEQ_COUNT];
    out[0] = X::cst(1.0) - u.y1 - u.y2;
    out[1] = u.alpha[S] - u.alpha[U];
    out[2] = X::cst(0.995) - u.alpha[R];
    let (at, bt, gt) = (u.alpha[T], u.beta[T], u.gamma[T]);
    let cap = if at.re() < eps0 { at } else { X::cst(eps0) };
    let tt = k(T, T);
    out[3] = at + cap
        - (at * u.b[tt] * 2.0
            + at * u.g[tt] * 2.0
            + gt * at * (bt + 1.0) * u.r[tt]
            + u.y2 * budget);
    let red = |i: usize, flows: &[usize]| {
        let mut s = X::cst(0.0);
        for &f in flows {
            s += u.r[f];
        }
        u.gamma[i] * u.alpha[i] * s * (u.beta[i] + 1.0)
    };
    let bg = |i: usize, flows: &[usize]| {
        let mut s = X::cst(0.0);
        for &f in flows {
            s += u.b[f] + u.g[f];
        }
        u.alpha[i] * s * 2.0
    };
    let (au, bu, gu) = (u.alpha[U], u.beta[U], u.gamma[U]);
    let lhs = au * 2.0
        + gu * au * (bu + 1.0)
        + bg(S, &[k(S, U)])
        + red(S, &[k(S, U)])
        + bg(T, &[k(T, U)])
        + red(T, &[k(T, U)])
        + bg(R, &[k(R, U), k(R, R)])
        + red(R, &[k(R, U), k(R, R)])
        + u.y1 * budget;
    out[4] = lhs - (au * 4.0 + at + u.alpha[R] * 2.0 + 4.0 * e2() + budget);
    for i in 0..4 {
        out[5 + i] = inflow(u.alpha, u.b, i) - u.alpha[i] * (X::cst(1.0) - u.gamma[i]) * 2.0;
    }
    out
}

/// `f(u)` with the exact conventions; `-∞` where a positive mass meets a
/// zero target or a blue in-degree ratio falls below 2.
pub fn f_total(u: &PartitionVector, budget: f64) -> Result<f64> {
    u.check_structure()?;
    if !(budget > 0.0 && budget < 1.0) {
        return Err(Error::domain("yellow budget must lie in (0, 1)"));
    }
    Ok(objective(&u.to_array(), budget, Mode::Exact))
}

/// The smooth surrogate maximized by the optimizer.
pub fn f_relaxed(u: &PartitionVector, budget: f64) -> f64 {
    objective(&u.to_array(), budget, Mode::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|value| < ε0 + eq_tol`.
    Band,
    /// `|value| ≤ eq_tol`.
    Equality,
    /// `value ≥ -ineq_tol`.
    Inequality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    pub budget: f64,
    pub eps0: f64,
    pub eq_tol: f64,
    pub ineq_tol: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions {
            budget: DEFAULT_BUDGET,
            eps0: EPS0,
            eq_tol: 1e-9,
            ineq_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub checks: Vec<ConstraintCheck>,
    pub feasible: bool,
    pub min_component: f64,
    pub max_component: f64,
}

impl FeasibilityReport {
    pub fn check(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest violation over all checks, measured against the exact
    /// constraint (bands against `ε0`).
    pub fn max_violation(&self, eps0: f64) -> f64 {
        self.checks
            .iter()
            .map(|c| match c.kind {
                CheckKind::Band => (c.value.abs() - eps0).max(0.0),
                CheckKind::Equality => c.value.abs(),
                CheckKind::Inequality => (-c.value).max(0.0),
            })
            .fold(0.0, f64::max)
    }
}

/// Evaluates every constraint at `u`.
pub fn feasibility(u: &PartitionVector, opts: &FeasibilityOptions) -> Result<FeasibilityReport> {
    u.check_structure()?;
    let x = u.to_array();
    let eq = equalities(&x);
    let ineq = inequalities(&x, opts.budget, opts.eps0);
    let mut checks = Vec::new();
    let mut push = |name: String, kind: CheckKind, value: f64| {
        let pass = match kind {
            CheckKind::Band => value.abs() < opts.eps0 + opts.eq_tol,
            CheckKind::Equality => value.abs() <= opts.eq_tol,
            CheckKind::Inequality => value >= -opts.ineq_tol,
        };
        checks.push(ConstraintCheck {
            name,
            kind,
            value,
            pass,
        });
    };
    push("alpha_sum".into(), CheckKind::Equality, eq[0]);
    push("eq1".into(), CheckKind::Band, eq[1]);
    push("eq2".into(), CheckKind::Band, eq[2]);
    push("eq3".into(), CheckKind::Band, green_total(&x));
    for i in 0..4 {
        push(
            alloc::format!("sum1_{}", PART_NAMES[i]),
            CheckKind::Equality,
            eq[3 + i],
        );
    }
    for i in 0..4 {
        push(
            alloc::format!("red_sum_{}", PART_NAMES[i]),
            CheckKind::Equality,
            eq[7 + i],
        );
    }
    for i in 0..4 {
        push(
            alloc::format!("green_balance_{}", PART_NAMES[i]),
            CheckKind::Equality,
            eq[11 + i],
        );
    }
    push("y_sum".into(), CheckKind::Inequality, ineq[0]);
    push("alpha_s_ge_alpha_u".into(), CheckKind::Inequality, ineq[1]);
    push("alpha_r_cap".into(), CheckKind::Inequality, ineq[2]);
    push("t_edge_cap".into(), CheckKind::Inequality, ineq[3]);
    push("constraint1".into(), CheckKind::Inequality, ineq[4]);
    for i in 0..4 {
        push(
            alloc::format!("blue_{}", PART_NAMES[i]),
            CheckKind::Inequality,
            ineq[5 + i],
        );
    }
    let feasible = checks.iter().all(|c| c.pass);
    let min_component = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max_component = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FeasibilityReport {
        checks,
        feasible,
        min_component,
        max_component,
    })
}
