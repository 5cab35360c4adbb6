//! Fixed-step RK4 integration of the density systems of the lower-bound
//! argument.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_STEP: f64 = 1e-4;
pub const DEFAULT_STEP: f64 = 1e-5;

fn rk4<const N: usize>(f: &impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let add = |a: &[f64; N], b: &[f64; N], k: f64| {
        let mut o = *a;
        o.iter_mut().zip(b).for_each(|(x, d)| *x += k * d);
        o
    };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, h / 2.0));
    let k3 = f(&add(y, &k2, h / 2.0));
    let k4 = f(&add(y, &k3, h));
    let mut o = *y;
    for i in 0..N {
        o[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    o
}

/// Integrates over `[0, len]` with steps of at most `step`.
fn integrate<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    mut y: [f64; N],
    len: f64,
    step: f64,
) -> [f64; N] {
    if len <= 0.0 {
        return y;
    }
    let n = libm::ceil(len / step).max(1.0) as usize;
    let h = len / n as f64;
    for _ in 0..n {
        y = rk4(f, &y, h);
    }
    y
}

/// Integrates until `event(y)` first drops to zero, locating the crossing
/// inside the last step by bisection. Returns the elapsed time and state.
fn integrate_until<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    mut y: [f64; N],
    event: impl Fn(&[f64; N]) -> f64,
    step: f64,
    limit: f64,
) -> Option<(f64, [f64; N])> {
    let mut x = 0.0;
    if event(&y) <= 0.0 {
        return Some((0.0, y));
    }
    while x < limit {
        let next = rk4(f, &y, step);
        if event(&next) <= 0.0 {
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if event(&rk4(f, &y, mid)) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some((x + hi, rk4(f, &y, hi)));
        }
        y = next;
        x += step;
    }
    None
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(Error::domain("step must lie in (0, 1e-4]"));
    }
    Ok(())
}

/// Densities of the first-three-in-neighbour types, as fractions of `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub x0: f64,
    pub x00: f64,
    pub x000: f64,
    pub x1: f64,
    pub x10: f64,
    pub x100: f64,
    pub x11: f64,
    pub x110: f64,
    pub x111: f64,
    pub y: f64,
}

impl OdeState {
    fn to_array(self) -> [f64; 10] {
        [
            self.x0, self.x00, self.x000, self.x1, self.x10, self.x100, self.x11, self.x110,
            self.x111, self.y,
        ]
    }

    fn from_array(a: [f64; 10]) -> Self {
        OdeState {
            x0: a[0],
            x00: a[1],
            x000: a[2],
            x1: a[3],
            x10: a[4],
            x100: a[5],
            x11: a[6],
            x110: a[7],
            x111: a[8],
            y: a[9],
        }
    }
}

/// Right-hand side of the problematic-vertex system under greedy play.
pub fn problematic_rhs(s: &OdeState) -> OdeState {
    let total = s.x0 + s.x00 + s.x000 + s.x1 + s.x10 + s.x100 + s.x11 + s.x110 + s.x111 + s.y;
    OdeState {
        x0: 1.0 - total - 2.0 * s.x0,
        x00: s.x0 - 3.0 * s.x00,
        x000: s.x00 - 3.0 * s.x000,
        x1: s.x0 - 2.0 * s.x1,
        x10: 2.0 * s.x00 + s.x1 - 3.0 * s.x10,
        x100: 3.0 * s.x000 + s.x10 - 3.0 * s.x100,
        x11: s.x10 - 3.0 * s.x11,
        x110: 2.0 * s.x100 + s.x11 - 3.0 * s.x110,
        x111: s.x110 - 3.0 * s.x111,
        y: s.x1 + s.x10 + s.x100 + 2.0 * s.x11 + 2.0 * s.x110 + 3.0 * s.x111,
    }
}

/// Integrates the problematic-vertex system from the all-zero state and
/// returns the state at each of the (sorted, nonnegative) `samples`.
pub fn integrate_problematic_system(samples: &[f64], step: f64) -> Result<Vec<(f64, OdeState)>> {
    check_step(step)?;
    if samples.iter().any(|&x| !(x >= 0.0)) || samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(
            "sample points must be nonnegative and sorted",
        ));
    }
    let f = |a: &[f64; 10]| problematic_rhs(&OdeState::from_array(*a)).to_array();
    let mut y = [0.0; 10];
    let mut x = 0.0;
    let mut out = Vec::with_capacity(samples.len());
    for &target in samples {
        y = integrate(&f, y, target - x, step);
        x = target;
        out.push((x, OdeState::from_array(y)));
    }
    Ok(out)
}

/// Closed-form `x111(x)`.
pub fn x111_closed_form(x: f64) -> f64 {
    let e1 = libm::exp(-x);
    let e2 = e1 * e1;
    let e3 = e2 * e1;
    e3 * (x * x * x * x / 4.0
        + 5.0 * x * x * x / 4.0
        + 27.0 * x * x / 8.0
        + 39.0 * x / 8.0
        + 39.0 / 16.0)
        - 3.0 * e2 * x
        - 3.0 * e2
        + 9.0 * e1 / 16.0
}

/// Derivative of [`x111_closed_form`].
pub fn x111_closed_form_derivative(x: f64) -> f64 {
    let e1 = libm::exp(-x);
    let e2 = e1 * e1;
    let e3 = e2 * e1;
    let p = x * x * x * x / 4.0
        + 5.0 * x * x * x / 4.0
        + 27.0 * x * x / 8.0
        + 39.0 * x / 8.0
        + 39.0 / 16.0;
    let dp = x * x * x + 15.0 * x * x / 4.0 + 27.0 * x / 4.0 + 39.0 / 8.0;
    e3 * (dp - 3.0 * p) - 3.0 * e2 + 6.0 * e2 * x + 6.0 * e2 - 9.0 * e1 / 16.0
}

/// Sub-phase player behaviour in the degree-density system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinDegreeMove {
    /// Target a degree-0 vertex.
    Isolated,
    /// Target a degree-1 vertex.
    DegreeOne,
    /// Target any other non-isolated vertex.
    Other,
}

fn min_degree_rhs(mv: MinDegreeMove) -> impl Fn(&[f64; 2]) -> [f64; 2] {
    move |s: &[f64; 2]| {
        let (y, z) = (s[0], s[1]);
        match mv {
            MinDegreeMove::Isolated => [-1.0 - y, 1.0 + y - z],
            MinDegreeMove::DegreeOne => [-y, -1.0 + y - z],
            MinDegreeMove::Other => [-y, y - z],
        }
    }
}

/// One leg of the degree-density integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinDegreeLeg {
    pub mv: MinDegreeMove,
    pub start: f64,
    pub end: f64,
    /// `(y, z)` at the end of the leg.
    pub y: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinDegreeResult {
    pub delta: f64,
    /// Scaled time at which the last degree-1 vertex disappears.
    pub completion: f64,
    pub legs: Vec<MinDegreeLeg>,
}

/// Degree-0 (`y`) and degree-1 (`z`) densities under `F_δ`: greedy for
/// `(1-δ) ln 2`, non-greedy until `ln 2`, then greedy until no isolated
/// vertex is left and finally on degree-1 vertices until none is left.
/// `δ > ½` behaves as `δ = ½`.
pub fn integrate_min_degree_system(delta: f64, step: f64) -> Result<MinDegreeResult> {
    check_step(step)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain("delta must lie in [0, 1]"));
    }
    let d = delta.min(0.5);
    let ln2 = core::f64::consts::LN_2;
    let mut legs = Vec::new();
    let mut s = [1.0, 0.0];
    let mut x = 0.0;
    let mut leg = |mv, start: f64, end: f64, s: [f64; 2]| {
        legs.push(MinDegreeLeg {
            mv,
            start,
            end,
            y: s[0],
            z: s[1],
        })
    };

    let l1 = (1.0 - d) * ln2;
    s = integrate(&min_degree_rhs(MinDegreeMove::Isolated), s, l1, step);
    leg(MinDegreeMove::Isolated, x, l1, s);
    x = l1;

    if ln2 - x > 0.0 {
        match integrate_until(
            &min_degree_rhs(MinDegreeMove::DegreeOne),
            s,
            |v| v[1],
            step,
            ln2 - x,
        ) {
            Some((dt, v)) if x + dt < ln2 => {
                leg(MinDegreeMove::DegreeOne, x, x + dt, v);
                x += dt;
                s = integrate(
                    &min_degree_rhs(MinDegreeMove::Other),
                    [v[0], 0.0],
                    ln2 - x,
                    step,
                );
                leg(MinDegreeMove::Other, x, ln2, s);
            }
            _ => {
                s = integrate(&min_degree_rhs(MinDegreeMove::DegreeOne), s, ln2 - x, step);
                leg(MinDegreeMove::DegreeOne, x, ln2, s);
            }
        }
        x = ln2;
    }

    if s[0] > 1e-14 {
        let (dt, v) = integrate_until(
            &min_degree_rhs(MinDegreeMove::Isolated),
            s,
            |v| v[0],
            step,
            10.0,
        )
        .ok_or_else(|| Error::state("isolated vertices never disappear"))?;
        leg(MinDegreeMove::Isolated, x, x + dt, v);
        x += dt;
        s = v;
    }
    s[0] = 0.0;
    let (dt, v) = integrate_until(
        &min_degree_rhs(MinDegreeMove::DegreeOne),
        s,
        |v| v[1],
        step,
        10.0,
    )
    .ok_or_else(|| Error::state("degree-1 vertices never disappear"))?;
    leg(MinDegreeMove::DegreeOne, x, x + dt, v);
    x += dt;
    Ok(MinDegreeResult {
        delta,
        completion: x,
        legs,
    })
}

/// Time for `y' = -1 - 3y`, `y(0) = tau0`, to reach zero.
pub fn integrate_destroy_problematic(tau0: f64, step: f64) -> Result<f64> {
    check_step(step)?;
    if !(tau0 >= 0.0) {
        return Err(Error::domain("tau0 must be nonnegative"));
    }
    let f = |s: &[f64; 1]| [-1.0 - 3.0 * s[0]];
    integrate_until(&f, [tau0], |v| v[0], step, 10.0)
        .map(|(x, _)| x)
        .ok_or_else(|| Error::state("no zero crossing"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bound::closed_form::{eps1, eps2, tau, xi};

    const LN2: f64 = core::f64::consts::LN_2;

    #[test]
    fn problematic_density_matches_closed_form() {
        let traj = integrate_problematic_system(&[0.0, 0.3, LN2], DEFAULT_STEP).unwrap();
        assert_eq!(traj[0].1, OdeState::default());
        for (x, s) in &traj {
            assert!((s.x111 - x111_closed_form(*x)).abs() < 1e-8, "x = {x}");
        }
        assert!((traj[2].1.x111 - xi()).abs() < 1e-8);
        assert!(integrate_problematic_system(&[LN2], 1e-3).is_err());
        assert!(integrate_problematic_system(&[0.5, 0.2], DEFAULT_STEP).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert!(x111_closed_form(0.0).abs() < 1e-15);
        assert!((x111_closed_form(LN2) - xi()).abs() < 1e-15);
        assert!((xi() - 0.0004035).abs() < 5e-8);
    }

    #[test]
    fn closed_form_solves_the_system() {
        // x111' = x110 - 3 x111 with x110 taken from the integrated system.
        let grid: Vec<f64> = (1..=40).map(|k| k as f64 * 0.05).collect();
        let traj = integrate_problematic_system(&grid, DEFAULT_STEP).unwrap();
        for (x, s) in traj {
            let resid = x111_closed_form_derivative(x) - (s.x110 - 3.0 * x111_closed_form(x));
            assert!(resid.abs() < 1e-10, "x = {x}: {resid}");
        }
        let h = 1e-6;
        for &x in &[0.2, 0.7, 1.5] {
            let fd = (x111_closed_form(x + h) - x111_closed_form(x - h)) / (2.0 * h);
            assert!((fd - x111_closed_form_derivative(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn densities_stay_in_range() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * LN2 / 20.0).collect();
        for (_, s) in integrate_problematic_system(&grid, DEFAULT_STEP).unwrap() {
            let a = s.to_array();
            assert!(a.iter().all(|v| (-1e-15..=1.0).contains(v)));
            assert!(a.iter().sum::<f64>() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn min_degree_completion_times() {
        let base = LN2 + (1.0 + LN2).ln();
        let r0 = integrate_min_degree_system(0.0, DEFAULT_STEP).unwrap();
        assert!((r0.completion - base).abs() < 1e-6, "{}", r0.completion);
        let r3 = integrate_min_degree_system(0.3, DEFAULT_STEP).unwrap();
        assert!(
            (r3.completion - (base + eps1(0.3).unwrap())).abs() < 1e-6,
            "{}",
            r3.completion
        );
        let r5 = integrate_min_degree_system(0.5, DEFAULT_STEP).unwrap();
        let r7 = integrate_min_degree_system(0.7, DEFAULT_STEP).unwrap();
        assert_eq!(r5.completion, r7.completion);
        assert!(integrate_min_degree_system(1.2, DEFAULT_STEP).is_err());
        assert!(r3.legs.windows(2).all(|w| w[0].end == w[1].start));
    }

    #[test]
    fn min_degree_matches_closed_form_on_grid() {
        let base = LN2 + (1.0 + LN2).ln();
        for k in 0..=10 {
            let d = k as f64 * 0.05;
            let r = integrate_min_degree_system(d, DEFAULT_STEP).unwrap();
            assert!(
                (r.completion - (base + eps1(d).unwrap())).abs() < 1e-6,
                "δ = {d}"
            );
        }
    }

    #[test]
    fn destroy_times() {
        assert_eq!(
            integrate_destroy_problematic(0.0, DEFAULT_STEP).unwrap(),
            0.0
        );
        let one = integrate_destroy_problematic(1.0, DEFAULT_STEP).unwrap();
        assert!((one - 4f64.ln() / 3.0).abs() < 1e-10);
        let t0 = tau(0.0).unwrap();
        let e = integrate_destroy_problematic(t0, DEFAULT_STEP).unwrap();
        assert!((e - eps2(0.0).unwrap()).abs() < 1e-8);
        assert!(integrate_destroy_problematic(-1.0, DEFAULT_STEP).is_err());
    }
}
