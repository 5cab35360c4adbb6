//! Scalar special functions of the rate function: entropy, the
//! balls-into-bins exponents, the `x ln x` relaxation and the sine transform.

use alloc::vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Switch point of the `x ln x` relaxation, `2^-32`.
pub const RELAX_X0: f64 = 1.0 / 4_294_967_296.0;

/// `x ln x` with `0 ln 0 = 0`.
pub fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

/// `H(a) = -Σ a_i ln a_i` for a probability vector.
pub fn entropy(a: &[f64]) -> Result<f64> {
    if a.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::domain(
            "entropy of a vector with a negative or NaN component",
        ));
    }
    let s: f64 = a.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::domain("entropy of a vector not summing to 1"));
    }
    Ok(-a.iter().map(|&x| xlnx(x)).sum::<f64>())
}

/// `D(λ) = 1 - e^{-λ}(1 + λ)`, accurate for small `λ`.
pub fn occupancy_d(lam: f64) -> f64 {
    if lam < 0.5 {
        series_d_over_lam2(lam) * lam * lam
    } else {
        -libm::expm1(-lam) - lam * libm::exp(-lam)
    }
}

/// `D(λ) / λ²` by its power series `Σ_{m≥2} (-1)^m (m-1) λ^{m-2} / m!`.
fn series_d_over_lam2(lam: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // λ^{m-2} (-1)^m / m!, starting at m = 2
    let mut m = 2.0;
    term /= 2.0;
    while m < 40.0 {
        sum += (m - 1.0) * term;
        m += 1.0;
        term *= -lam / m;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `F(λ) = λ(1 - e^{-λ}) / D(λ)`, increasing from `F(0+) = 2`.
pub fn occupancy_ratio(lam: f64) -> f64 {
    if lam == 0.0 {
        return 2.0;
    }
    if lam < 0.5 {
        -libm::expm1(-lam) / (lam * series_d_over_lam2(lam))
    } else {
        -lam * libm::expm1(-lam) / occupancy_d(lam)
    }
}

/// The unique `λ ≥ 0` with `F(λ) = d`; `λ(2) = 0`.
pub fn lambda_solve(d: f64) -> Result<f64> {
    if !(d >= 2.0) || !d.is_finite() {
        return Err(Error::domain("lambda_solve needs d >= 2"));
    }
    if d == 2.0 {
        return Ok(0.0);
    }
    // F(λ) > λ, so the root lies below d.
    let (mut lo, mut hi) = (0.0, d);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if occupancy_ratio(mid) < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (occupancy_ratio(lo) - d, occupancy_ratio(hi) - d);
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}

/// `t(d) = λ - d + d ln(d / λ) + ln D(λ)` at `λ = λ(d)`, with `t(2) = ln 2 - 2`.
pub fn t_exponent(d: f64) -> Result<f64> {
    let lam = lambda_solve(d)?;
    Ok(t_at(d, lam))
}

fn t_at(d: f64, lam: f64) -> f64 {
    if lam == 0.0 {
        return -d + xlnx(d) + libm::log(0.5);
    }
    let (ln_ratio, log_term) = if lam < 0.5 {
        (
            (2.0 - d) * libm::log(lam),
            libm::log(series_d_over_lam2(lam)),
        )
    } else {
        (-d * libm::log(lam), libm::log(occupancy_d(lam)))
    };
    lam - d + xlnx(d) + ln_ratio + log_term
}

/// `t'(d) = ln(d / λ(d))`.
pub fn t_derivative(d: f64) -> Result<f64> {
    let lam = lambda_solve(d)?;
    Ok(libm::log(d / lam))
}

/// Lower end of the exact part of the extended `t`.
pub const T_EXTENSION_D0: f64 = 2.0 + 1e-6;

/// `t` for `d ≥ d0`, continued below `d0` by a concave quadratic with
/// matching value and slope. Returns `(value, derivative)`.
pub fn t_extended(d: f64) -> (f64, f64) {
    if d >= T_EXTENSION_D0 {
        let lam = lambda_solve(d).expect("d >= 2");
        (t_at(d, lam), libm::log(d / lam))
    } else {
        let lam0 = lambda_solve(T_EXTENSION_D0).expect("d0 >= 2");
        let t0 = t_at(T_EXTENSION_D0, lam0);
        let slope = libm::log(T_EXTENSION_D0 / lam0);
        let h = d - T_EXTENSION_D0;
        (t0 + slope * h - h * h, slope - 2.0 * h)
    }
}

/// `κ(a) = -a - (1 - a) ln(1 - a)` on `[0, 1]`.
pub fn kappa_exponent(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::domain("kappa_exponent needs 0 <= a <= 1"));
    }
    Ok(-a - xlnx(1.0 - a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinsMode {
    /// Every bin receives at least two balls.
    AtLeast2,
    /// No bin receives more than one ball.
    AtMost1,
}

pub const BINS_LIMIT: usize = 80;
pub const BALLS_LIMIT: usize = 4000;

fn ln_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Exact `ln P` for `n_balls` balls thrown uniformly into `n_bins` bins, by
/// a log-space dynamic program over bins with multinomial weights.
pub fn balls_bins_exact(n_bins: usize, n_balls: usize, mode: BinsMode) -> Result<f64> {
    if n_bins > BINS_LIMIT {
        return Err(Error::TooLarge {
            what: "bins",
            limit: BINS_LIMIT,
            got: n_bins,
        });
    }
    if n_balls > BALLS_LIMIT {
        return Err(Error::TooLarge {
            what: "balls",
            limit: BALLS_LIMIT,
            got: n_balls,
        });
    }
    if n_bins == 0 {
        return Err(Error::domain("need at least one bin"));
    }
    let (lo, hi) = match mode {
        BinsMode::AtLeast2 => (2, n_balls),
        BinsMode::AtMost1 => (0, 1),
    };
    // a[s] = ln Σ Π 1/j_i! over the bins processed so far holding s balls.
    let mut a = vec![f64::NEG_INFINITY; n_balls + 1];
    a[0] = 0.0;
    let mut b = a.clone();
    for _ in 0..n_bins {
        b.iter_mut().for_each(|x| *x = f64::NEG_INFINITY);
        for s in 0..=n_balls {
            if a[s] == f64::NEG_INFINITY {
                continue;
            }
            for j in lo..=hi.min(n_balls - s) {
                b[s + j] = log_add(b[s + j], a[s] - ln_factorial(j));
            }
        }
        core::mem::swap(&mut a, &mut b);
    }
    Ok(ln_factorial(n_balls) - n_balls as f64 * libm::log(n_bins as f64) + a[n_balls])
}

/// `2^31 x² + ln(2^-32) x - 2^-33` below `2^-32`, `x ln x` above. It lies
/// below `x ln x` and matches it to second order at the switch point.
pub fn relax_xlnx(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("relax_xlnx needs x >= 0"));
    }
    Ok(relax_xlnx_d(x).0)
}

/// Value, first and second derivative of the relaxation; no domain check.
pub fn relax_xlnx_d(x: f64) -> (f64, f64, f64) {
    if x < RELAX_X0 {
        let a = 2_147_483_648.0;
        let l = libm::log(RELAX_X0);
        let q = a * x * x + l * x - RELAX_X0 / 2.0;
        // Near the switch the gap to x ln x is below rounding.
        let q = if x > 0.0 { q.min(x * libm::log(x)) } else { q };
        (q, 2.0 * a * x + l, 2.0 * a)
    } else {
        let l = libm::log(x);
        (x * l, l + 1.0, 1.0 / x)
    }
}

/// `g(x) = (sin(π(x - ½)) + 1) / 2`.
pub fn sine_transform(x: f64) -> f64 {
    0.5 * (libm::sin(core::f64::consts::PI * (x - 0.5)) + 1.0)
}

/// Inverse of `g` on `[0, 1]`, with values in `[0, 1]`.
pub fn sine_transform_inverse(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain("inverse sine transform needs 0 <= y <= 1"));
    }
    Ok(libm::asin(2.0 * y - 1.0) / core::f64::consts::PI + 0.5)
}
