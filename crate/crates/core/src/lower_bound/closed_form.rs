//! Closed forms for the lower-bound constants.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN2: f64 = core::f64::consts::LN_2;

/// Limiting density of problematic vertices after `n ln 2` greedy rounds.
pub fn xi() -> f64 {
    let l = LN2;
    (4.0 * l * l * l * l + 20.0 * l * l * l + 54.0 * l * l - 18.0 * l - 21.0) / 128.0
}

/// Largest `δ` for which the problematic-vertex bound is positive.
pub fn delta_star() -> f64 {
    xi() / (2.0 * LN2)
}

/// Extra time to reach minimum degree 2 when a `δ` fraction of the first
/// phase is played non-greedily.
pub fn eps1(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain("delta must lie in [0, 1]"));
    }
    let d = delta.min(0.5);
    let p = libm::exp2(1.0 + d);
    let inner = (p - 1.0) * libm::log(p - 1.0) - p * d * LN2 + (1.0 + LN2) * libm::exp2(d);
    Ok(libm::log(inner) - d * LN2 - libm::log1p(LN2))
}

/// Density of problematic vertices left once minimum degree 2 is reached.
pub fn tau(delta: f64) -> Result<f64> {
    if !(0.0..=delta_star()).contains(&delta) {
        return Err(Error::domain("delta must lie in [0, xi / (2 ln 2)]"));
    }
    let e1 = eps1(delta)?;
    Ok((xi() - 2.0 * delta * LN2) * libm::exp(-3.0 * libm::log1p(LN2) - 3.0 * e1))
}

/// Extra time to destroy the remaining problematic vertices; zero past
/// `xi / (2 ln 2)`.
pub fn eps2(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain("delta must lie in [0, 1]"));
    }
    if delta >= delta_star() {
        return Ok(0.0);
    }
    Ok(libm::log1p(3.0 * tau(delta)?) / 3.0)
}

/// The improvement over `ln 2 + ln(1 + ln 2)`.
pub fn eps_final() -> f64 {
    eps1(delta_star()).expect("delta_star lies in [0, 1]")
}

/// Baseline time for the minimum-degree-2 process.
pub fn min_degree_baseline() -> f64 {
    LN2 + libm::log1p(LN2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta: f64,
    pub eps1: f64,
    /// `None` outside the range where `tau` is defined.
    pub tau: Option<f64>,
    pub eps2: f64,
    pub total: f64,
}

/// Tabulates the constants on `points` evenly spaced values of `δ` in
/// `[lo, hi]`.
pub fn delta_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<DeltaRow>> {
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) || points == 0 {
        return Err(Error::domain(
            "need 0 <= lo <= hi <= 1 and at least one point",
        ));
    }
    (0..points)
        .map(|k| {
            let delta = if points == 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (points - 1) as f64
            };
            let e1 = eps1(delta)?;
            let e2 = eps2(delta)?;
            Ok(DeltaRow {
                delta,
                eps1: e1,
                tau: tau(delta).ok(),
                eps2: e2,
                total: e1 + e2,
            })
        })
        .collect()
}
