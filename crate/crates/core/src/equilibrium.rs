//! The customers' game.
//!
//! In period `t` customer `i` chooses `q_i >= 0` to maximize
//!
//! ```text
//!     -1/2 a_i q_i^2 + b_i(t) q_i + sum_l w_il q_l q_i - phi_i q_i
//! ```
//!
//! Under strict diagonal dominance of `A - W` the game has the unique
//! equilibrium `q* = (A - W)^-1 (B(t) - phi)` whenever that point is
//! nonnegative. The projected best-response iteration gives the same point
//! and remains well defined when prices push some customers to zero.

use nalgebra::{DMatrix, DVector};

use crate::model::CustomerNetwork;
use crate::{Error, Result};

/// Default tolerance of [`nash_iterative`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Default sweep limit of [`nash_iterative`].
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Largest best-response residual accepted from the closed form, scaled by
/// `max(1, |q|_inf)`.
pub const CLOSED_FORM_RESIDUAL: f64 = 1e-8;
/// Components of the closed form below `-NEGATIVE_SLACK` mean the prices are
/// outside the region where it is valid.
pub const NEGATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub q: DVector<f64>,
    /// Sweeps used; 0 for the closed form.
    pub iterations: usize,
    /// `max_i |q_i - best_response_i(q)|`.
    pub residual: f64,
}

/// One-period utility of customer `i` at consumption profile `q`.
pub fn customer_utility(net: &CustomerNetwork, i: usize, t: usize, q: &[f64], phi_i: f64) -> Result<f64> {
    net.check_customer(i)?;
    net.check_period(t)?;
    check_len(net, q.len())?;
    let qi = q[i];
    if qi < 0.0 {
        return Err(Error::Domain { what: "q_i", value: qi });
    }
    let spill: f64 = net.w().row(i).iter().zip(q).map(|(w, ql)| w * ql).sum();
    Ok(-0.5 * net.a()[i] * qi * qi + net.b()[(i, t)] * qi + spill * qi - phi_i * qi)
}

/// Utility-maximizing `q_i >= 0` given the other customers' consumption.
/// Entry `i` of `q_others` is ignored.
pub fn best_response(net: &CustomerNetwork, i: usize, t: usize, q_others: &[f64], phi_i: f64) -> Result<f64> {
    net.check_customer(i)?;
    net.check_period(t)?;
    check_len(net, q_others.len())?;
    let ai = net.a()[i];
    if ai <= 0.0 {
        return Err(Error::UnboundedResponse { customer: i });
    }
    Ok(response(net, i, t, q_others, phi_i, ai))
}

fn response(net: &CustomerNetwork, i: usize, t: usize, q: &[f64], phi_i: f64, ai: f64) -> f64 {
    let spill: f64 = net
        .w()
        .row(i)
        .iter()
        .zip(q)
        .enumerate()
        .filter(|(l, _)| *l != i)
        .map(|(_, (w, ql))| w * ql)
        .sum();
    ((net.b()[(i, t)] - phi_i + spill) / ai).max(0.0)
}

/// Largest deviation between `q` and the best responses to it.
pub fn best_response_residual(net: &CustomerNetwork, t: usize, phi: &DVector<f64>, q: &DVector<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..net.n() {
        let br = best_response(net, i, t, q.as_slice(), phi[i])?;
        worst = worst.max((q[i] - br).abs());
    }
    Ok(worst)
}

/// Equilibrium `(A - W)^-1 (B(t) - phi)`.
pub fn nash_closed_form(net: &CustomerNetwork, t: usize, phi: &DVector<f64>) -> Result<EquilibriumResult> {
    let r = net.response_matrix()?;
    nash_closed_form_with(net, &r, t, phi)
}

/// [`nash_closed_form`] with a precomputed `R = (A - W)^-1`.
pub fn nash_closed_form_with(
    net: &CustomerNetwork,
    r: &DMatrix<f64>,
    t: usize,
    phi: &DVector<f64>,
) -> Result<EquilibriumResult> {
    check_len(net, phi.len())?;
    let b = net.b_at(t)?;
    let mut q = r * (b - phi);
    for (i, qi) in q.iter_mut().enumerate() {
        if *qi < -NEGATIVE_SLACK {
            return Err(Error::InfeasiblePrice { customer: i, q: *qi });
        }
        *qi = qi.max(0.0);
    }
    let residual = best_response_residual(net, t, phi, &q)?;
    if residual > CLOSED_FORM_RESIDUAL * crate::linalg::max_abs(&q).max(1.0) {
        return Err(Error::Residual { residual });
    }
    Ok(EquilibriumResult { q, iterations: 0, residual })
}

/// Fixed point of synchronous (Jacobi) projected best-response sweeps,
/// starting from zero consumption.
pub fn nash_iterative(
    net: &CustomerNetwork,
    t: usize,
    phi: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumResult> {
    nash_iterative_from(net, t, phi, DVector::zeros(net.n()), tol, max_iter)
}

/// [`nash_iterative`] from an arbitrary nonnegative starting profile.
pub fn nash_iterative_from(
    net: &CustomerNetwork,
    t: usize,
    phi: &DVector<f64>,
    start: DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumResult> {
    check_len(net, phi.len())?;
    check_len(net, start.len())?;
    net.check_period(t)?;
    if !(tol > 0.0) {
        return Err(Error::Domain { what: "tolerance", value: tol });
    }
    for i in 0..net.n() {
        if net.a()[i] <= 0.0 {
            return Err(Error::UnboundedResponse { customer: i });
        }
    }
    let mut q = start.map(|v| v.max(0.0));
    let mut next = q.clone();
    let mut residual = f64::INFINITY;
    for sweep in 1..=max_iter {
        residual = 0.0;
        for i in 0..net.n() {
            next[i] = response(net, i, t, q.as_slice(), phi[i], net.a()[i]);
            residual = residual.max((next[i] - q[i]).abs());
        }
        core::mem::swap(&mut q, &mut next);
        if residual <= tol {
            let residual = best_response_residual(net, t, phi, &q)?;
            return Ok(EquilibriumResult { q, iterations: sweep, residual });
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual })
}

fn check_len(net: &CustomerNetwork, len: usize) -> Result<()> {
    if len != net.n() {
        return Err(Error::DimensionMismatch { what: "customer vector", expected: net.n(), found: len });
    }
    Ok(())
}
