//! The confluent Heun equation
//!
//! ```text
//! u'' + (γ/z + δ/(z−1) + ε) u' + (αz − q)/(z(z−1)) u = 0
//! ```
//!
//! with its residual operator, the Frobenius power series analytic at
//! `z = 0` (the reference solution for the expansion families), and the
//! `z → 1−z` parameter map.

use thiserror::Error;

use crate::numeric::as_nonpositive_integer;
use crate::C64;

/// Points closer than this to `z = 0` or `z = 1` are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Tail threshold above which a Frobenius evaluation is reported as truncated.
pub const FROBENIUS_TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheError {
    #[error("z = {z} is a singular point of the equation")]
    SingularPoint { z: C64 },
    #[error("gamma = {gamma} is zero or a negative integer; no analytic solution at z = 0")]
    PoleAtGamma { gamma: C64 },
    #[error("Frobenius series truncated: tail estimate {tail:e} exceeds {FROBENIUS_TAIL_LIMIT:e}")]
    TruncationWarning { tail: f64, value: LocalValue },
    #[error("Frobenius order must be positive")]
    EmptySeries,
}

/// The five parameters `(γ, δ, ε; α, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheParams {
    pub gamma: C64,
    pub delta: C64,
    pub epsilon: C64,
    pub alpha: C64,
    pub q: C64,
}

impl CheParams {
    pub fn new(gamma: C64, delta: C64, epsilon: C64, alpha: C64, q: C64) -> Self {
        Self {
            gamma,
            delta,
            epsilon,
            alpha,
            q,
        }
    }

    pub fn real(gamma: f64, delta: f64, epsilon: f64, alpha: f64, q: f64) -> Self {
        let r = |v| C64::new(v, 0.0);
        Self::new(r(gamma), r(delta), r(epsilon), r(alpha), r(q))
    }

    pub fn with_q(self, q: C64) -> Self {
        Self { q, ..self }
    }

    /// `α/ε`, the upper parameter most families are built around.
    pub fn alpha_over_epsilon(&self) -> C64 {
        self.alpha / self.epsilon
    }

    /// Coefficients `(p, r)` of `u'' + p u' + r u = 0` at `z`.
    pub fn coefficients_at(&self, z: C64) -> Result<(C64, C64), CheError> {
        check_regular(z)?;
        let zm1 = z - 1.0;
        let p = self.gamma / z + self.delta / zm1 + self.epsilon;
        let r = (self.alpha * z - self.q) / (z * zm1);
        Ok((p, r))
    }

    /// Second derivative of any local solution with value `u` and slope `u1` at `z`.
    pub fn second_derivative(&self, u: C64, u1: C64, z: C64) -> Result<C64, CheError> {
        let (p, r) = self.coefficients_at(z)?;
        Ok(-(p * u1 + r * u))
    }
}

fn check_regular(z: C64) -> Result<(), CheError> {
    if z.norm() <= SINGULAR_TOL || (z - 1.0).norm() <= SINGULAR_TOL {
        return Err(CheError::SingularPoint { z });
    }
    Ok(())
}

/// `u2 + (γ/z + δ/(z−1) + ε)·u1 + (αz − q)/(z(z−1))·u`.
pub fn residual(params: &CheParams, u: C64, u1: C64, u2: C64, z: C64) -> Result<C64, CheError> {
    let (p, r) = params.coefficients_at(z)?;
    Ok(u2 + p * u1 + r * u)
}

/// [`residual`] divided by `max(1, |u|, |u1|, |u2|)`.
pub fn scaled_residual(params: &CheParams, u: C64, u1: C64, u2: C64, z: C64) -> Result<f64, CheError> {
    let res = residual(params, u, u1, u2, z)?;
    Ok(res.norm() / 1f64.max(u.norm()).max(u1.norm()).max(u2.norm()))
}

/// Truncated power series `Σ cₖ zᵏ` (c₀ = 1) of the solution analytic at
/// `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSeries {
    pub params: CheParams,
    pub coefficients: Vec<C64>,
}

/// Value and first two derivatives of a local series at a point, with the
/// relative size of the last retained terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalValue {
    pub u: C64,
    pub du: C64,
    pub d2u: C64,
    pub tail: f64,
}

/// Coefficients `c₀..c_K` from the recurrence obtained by inserting
/// `Σ cₖ zᵏ` into `z(z−1)` times the equation:
///
/// ```text
/// (k+1)(k+γ) c_{k+1} = [k(k−1) + k(γ+δ−ε) − q] cₖ + [ε(k−1) + α] c_{k−1}
/// ```
pub fn frobenius_coefficients(params: &CheParams, order: usize) -> Result<LocalSeries, CheError> {
    if order == 0 {
        return Err(CheError::EmptySeries);
    }
    if as_nonpositive_integer(params.gamma).is_some() {
        return Err(CheError::PoleAtGamma { gamma: params.gamma });
    }
    let CheParams {
        gamma,
        delta,
        epsilon,
        alpha,
        q,
    } = *params;
    let mut coefficients = Vec::with_capacity(order + 1);
    coefficients.push(C64::new(1.0, 0.0));
    let mut previous = C64::new(0.0, 0.0);
    for k in 0..order {
        let kf = k as f64;
        let current = coefficients[k];
        let diagonal = kf * (kf - 1.0) + kf * (gamma + delta - epsilon) - q;
        let lower = epsilon * (kf - 1.0) + alpha;
        let next = (diagonal * current + lower * previous) / ((kf + 1.0) * (gamma + kf));
        coefficients.push(next);
        previous = current;
    }
    Ok(LocalSeries {
        params: *params,
        coefficients,
    })
}

/// Partial sum and term-wise derivatives. The tail estimate is the size of
/// the last two terms relative to the sum.
pub fn frobenius_eval(series: &LocalSeries, z: C64) -> Result<LocalValue, CheError> {
    let value = frobenius_partial_sum(series, z);
    if value.tail > FROBENIUS_TAIL_LIMIT {
        return Err(CheError::TruncationWarning { tail: value.tail, value });
    }
    Ok(value)
}

/// [`frobenius_eval`] without the tail gate.
pub fn frobenius_partial_sum(series: &LocalSeries, z: C64) -> LocalValue {
    let mut u = C64::new(0.0, 0.0);
    let mut du = C64::new(0.0, 0.0);
    let mut d2u = C64::new(0.0, 0.0);
    // Horner from the top for all three sums.
    for (k, &ck) in series.coefficients.iter().enumerate().rev() {
        let kf = k as f64;
        u = u * z + ck;
        if k >= 1 {
            du = du * z + ck * kf;
        }
        if k >= 2 {
            d2u = d2u * z + ck * kf * (kf - 1.0);
        }
    }
    let k_last = series.coefficients.len() - 1;
    let zn = z.norm();
    let last_terms: f64 = series.coefficients[k_last.saturating_sub(1)..]
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm() * zn.powi((k_last.saturating_sub(1) + j) as i32))
        .sum();
    let tail = if k_last == 0 {
        0.0
    } else {
        last_terms / u.norm().max(f64::MIN_POSITIVE)
    };
    LocalValue { u, du, d2u, tail }
}

/// Parameters of the equation satisfied by `v(w) = u(1 − w)`:
/// `(γ, δ, ε, α, q) → (δ, γ, −ε, −α, q − α)`.
pub fn transform_1_minus_z(params: &CheParams) -> CheParams {
    CheParams {
        gamma: params.delta,
        delta: params.gamma,
        epsilon: -params.epsilon,
        alpha: -params.alpha,
        q: params.q - params.alpha,
    }
}
