//! Kummer confluent hypergeometric function `₁F₁(a; c; x)` by direct power
//! series, and the contiguous relations used by the expansion families.
//!
//! The series is summed term by term,
//!
//! ```text
//! ₁F₁(a; c; x) = Σₖ (a)ₖ/(c)ₖ · xᵏ/k!,    tₖ₊₁ = tₖ · (a+k) x / ((c+k)(k+1))
//! ```
//!
//! and truncated once a geometric bound on the remaining tail drops below the
//! requested relative tolerance. No asymptotic branch is used: accuracy
//! degrades through cancellation once `|x|` grows, and evaluations with
//! `|x| > 30` log a warning.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numeric::as_nonpositive_integer;
use crate::C64;

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// Above this `|x|` the direct series loses digits to cancellation.
pub const LARGE_ARGUMENT: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KummerError {
    #[error("series did not converge within {terms} terms (tail estimate {tail:e})")]
    NonConvergence { terms: usize, tail: f64 },
    #[error("lower parameter c = {c} is a non-positive integer")]
    PoleAtLowerParameter { c: C64 },
    #[error("invalid series control: tol = {tol}, max_terms = {max_terms}")]
    InvalidControl { tol: f64, max_terms: usize },
}

/// Arguments of `₁F₁(a; c; x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerArgs {
    pub a: C64,
    pub c: C64,
    pub x: C64,
}

impl KummerArgs {
    pub fn new(a: C64, c: C64, x: C64) -> Self {
        Self { a, c, x }
    }

    pub fn real(a: f64, c: f64, x: f64) -> Self {
        Self::new(C64::new(a, 0.0), C64::new(c, 0.0), C64::new(x, 0.0))
    }

    /// Checks the lower parameter. A non-positive integer `c = −m` is allowed
    /// only when `a = −m'` with `m' ≤ m`, so the series ends before the pole.
    pub fn validate(&self) -> Result<(), KummerError> {
        if let Some(m) = as_nonpositive_integer(self.c) {
            match as_nonpositive_integer(self.a) {
                Some(ma) if ma <= m => {}
                _ => return Err(KummerError::PoleAtLowerParameter { c: self.c }),
            }
        }
        Ok(())
    }
}

/// Truncation controls for the power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl SeriesControl {
    pub fn new(tol: f64, max_terms: usize) -> Self {
        Self { tol, max_terms }
    }

    fn validate(&self) -> Result<(), KummerError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) || self.max_terms == 0 {
            return Err(KummerError::InvalidControl {
                tol: self.tol,
                max_terms: self.max_terms,
            });
        }
        Ok(())
    }
}

/// Result of a series summation: the value, its x-derivative from the
/// term-wise differentiated series, the number of terms used and the
/// relative tail estimate (zero for terminating polynomials).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerSum {
    pub value: C64,
    pub derivative: C64,
    pub terms: usize,
    pub tail: f64,
}

/// Sums the power series of `₁F₁(a; c; x)` together with its term-wise
/// derivative.
pub fn sum_series(args: KummerArgs, ctl: SeriesControl) -> Result<KummerSum, KummerError> {
    ctl.validate()?;
    args.validate()?;
    let KummerArgs { a, c, x } = args;
    if x.norm() > LARGE_ARGUMENT {
        log::warn!(
            "1F1 evaluated at |x| = {:.3} > {}; direct series may lose accuracy",
            x.norm(),
            LARGE_ARGUMENT
        );
    }

    let one = C64::new(1.0, 0.0);
    let mut term = one;
    let mut sum = one;
    // Σ k tₖ; the derivative is this divided by x.
    let mut weighted = C64::new(0.0, 0.0);
    let mut largest = 1.0f64;

    let finish = |sum: C64, weighted: C64, terms: usize, tail: f64| {
        let derivative = if x == C64::new(0.0, 0.0) { a / c } else { weighted / x };
        KummerSum {
            value: sum,
            derivative,
            terms,
            tail,
        }
    };

    if let Some(m) = as_nonpositive_integer(a) {
        // Degree-m polynomial: (a)ₖ vanishes for k > m.
        for k in 0..m as usize {
            let kf = k as f64;
            term *= (a + kf) * x / ((c + kf) * (kf + 1.0));
            sum += term;
            weighted += term * (kf + 1.0);
        }
        return Ok(finish(sum, weighted, m as usize + 1, 0.0));
    }

    let past_parameters = a.norm() + c.norm();
    let mut satisfied = 0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        let ratio = (a + kf) * x / ((c + kf) * (kf + 1.0));
        let next = term * ratio;
        let r = ratio.norm();
        let scale = sum.norm().max(largest * f64::EPSILON);
        if kf + 1.0 > x.norm() && kf >= past_parameters && r < 0.5 {
            let bound = next.norm() / (1.0 - r);
            if bound <= ctl.tol * scale {
                satisfied += 1;
                if satisfied >= 2 || bound == 0.0 {
                    return Ok(finish(sum, weighted, k + 1, bound / scale));
                }
            } else {
                satisfied = 0;
            }
        }
        term = next;
        sum += term;
        weighted += term * (kf + 1.0);
        largest = largest.max(term.norm());
    }
    let tail = term.norm() / sum.norm().max(f64::MIN_POSITIVE);
    Err(KummerError::NonConvergence {
        terms: ctl.max_terms,
        tail,
    })
}

/// `₁F₁(a; c; x)`.
pub fn eval_1f1(args: KummerArgs, ctl: SeriesControl) -> Result<C64, KummerError> {
    sum_series(args, ctl).map(|s| s.value)
}

/// x-derivative of `₁F₁(a; c; x)` via the differentiation rule
/// `(a/c)·₁F₁(a+1; c+1; x)`.
pub fn eval_1f1_derivative(args: KummerArgs, ctl: SeriesControl) -> Result<C64, KummerError> {
    args.validate()?;
    let KummerArgs { a, c, x } = args;
    if a == C64::new(0.0, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    let shifted = KummerArgs::new(a + 1.0, c + 1.0, x);
    Ok(a / c * eval_1f1(shifted, ctl)?)
}

/// The contiguous relations checked by [`identity_residual`]. Each is stated
/// for `u(z) = ₁F₁(a; c; s₀z)` and evaluated at `s₀ = 1`, `z = x`, which is
/// equivalent after rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `u′ = s₀ (a/c) ₁F₁(a+1; c+1)`
    D6,
    /// `z(u′ − s₀u) = (c−1)(₁F₁(a−1; c−1) − u)`
    R14,
    /// `z u′ = a(₁F₁(a+1; c) − u)`
    R27,
    /// `s₀ z u = (a−c) ₁F₁(a−1; c) + (c−2a) u + a ₁F₁(a+1; c)`
    R28,
    /// `s₀ z² u′ = a((a+1)₁F₁(a+2) + (c−3a−2)₁F₁(a+1) + (3a−2c+1)u + (c−a)₁F₁(a−1))`
    R29,
    /// `z u′ = (c−1)(₁F₁(a; c−1) − u)`
    R46,
    /// `u′ = s₀(u − (1 − a/c) ₁F₁(a; c+1))`
    R47,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::D6,
        Identity::R14,
        Identity::R27,
        Identity::R28,
        Identity::R29,
        Identity::R46,
        Identity::R47,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::D6 => "D6",
            Identity::R14 => "R14",
            Identity::R27 => "R27",
            Identity::R28 => "R28",
            Identity::R29 => "R29",
            Identity::R46 => "R46",
            Identity::R47 => "R47",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identity::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown identity `{s}` (expected one of D6, R14, R27, R28, R29, R46, R47)"))
    }
}

/// `|LHS − RHS| / max(1, |LHS|, |RHS|)` for the named identity at `(a, c, x)`.
///
/// The left-hand sides use the term-wise differentiated series for `u′`, so
/// the check is independent of the shifted evaluations on the right.
pub fn identity_residual(id: Identity, a: C64, c: C64, x: C64, ctl: SeriesControl) -> Result<f64, KummerError> {
    let m = |da: f64, dc: f64| eval_1f1(KummerArgs::new(a + da, c + dc, x), ctl);
    let base = sum_series(KummerArgs::new(a, c, x), ctl)?;
    let (u, du) = (base.value, base.derivative);
    let (lhs, rhs) = match id {
        Identity::D6 => (du, a / c * m(1.0, 1.0)?),
        Identity::R14 => (x * (du - u), (c - 1.0) * (m(-1.0, -1.0)? - u)),
        Identity::R27 => (x * du, a * (m(1.0, 0.0)? - u)),
        Identity::R28 => (x * u, (a - c) * m(-1.0, 0.0)? + (c - 2.0 * a) * u + a * m(1.0, 0.0)?),
        Identity::R29 => (
            x * x * du,
            a * ((a + 1.0) * m(2.0, 0.0)? + (c - 3.0 * a - 2.0) * m(1.0, 0.0)? + (3.0 * a - 2.0 * c + 1.0) * u + (c - a) * m(-1.0, 0.0)?),
        ),
        Identity::R46 => (x * du, (c - 1.0) * (m(0.0, -1.0)? - u)),
        Identity::R47 => (du, u - (C64::new(1.0, 0.0) - a / c) * m(0.0, 1.0)?),
    };
    Ok((lhs - rhs).norm() / 1f64.max(lhs.norm()).max(rhs.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn value_at_origin_is_one() {
        let v = eval_1f1(KummerArgs::real(2.3, 1.7, 0.0), ctl()).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn exponential_case() {
        let v = eval_1f1(KummerArgs::real(1.0, 1.0, 1.0), ctl()).unwrap();
        assert_relative_eq!(v.re, std::f64::consts::E, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn degree_one_polynomial() {
        let s = sum_series(KummerArgs::real(-1.0, 2.0, 1.0), ctl()).unwrap();
        assert_eq!(s.value, c(0.5, 0.0));
        assert_eq!(s.tail, 0.0);
        assert_eq!(s.terms, 2);
    }

    #[test]
    fn complex_value_is_self_consistent() {
        let args = KummerArgs::new(c(0.5, 0.5), c(2.0, 0.0), c(0.0, 1.5));
        let v = eval_1f1(args, ctl()).unwrap();
        let tight = eval_1f1(args, SeriesControl::new(DEFAULT_TOL / 100.0, 2 * DEFAULT_MAX_TERMS)).unwrap();
        assert!((v - tight).norm() <= 1e-14 * tight.norm());
    }

    #[test]
    fn derivative_examples() {
        let d = eval_1f1_derivative(KummerArgs::real(1.0, 1.0, 0.7), ctl()).unwrap();
        assert_relative_eq!(d.re, 0.7f64.exp(), max_relative = 1e-14);
        for x in [-3.0, 0.0, 0.4, 11.0] {
            let d = eval_1f1_derivative(KummerArgs::real(-1.0, 2.0, x), ctl()).unwrap();
            assert_eq!(d, c(-0.5, 0.0));
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let (a, cc, x, h) = (1.2, 2.4, 0.9, 1e-6);
        let f = |x: f64| eval_1f1(KummerArgs::real(a, cc, x), ctl()).unwrap();
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let d = eval_1f1_derivative(KummerArgs::real(a, cc, x), ctl()).unwrap();
        assert!((d - fd).norm() <= 1e-8 * d.norm(), "{d} vs {fd}");
    }

    #[test]
    fn termwise_derivative_agrees_with_shift_rule() {
        let args = KummerArgs::new(c(0.7, 0.2), c(1.9, -0.3), c(-2.5, 1.0));
        let s = sum_series(args, ctl()).unwrap();
        let d = eval_1f1_derivative(args, ctl()).unwrap();
        assert!((s.derivative - d).norm() <= 1e-13 * d.norm().max(1.0));
    }

    #[test]
    fn pole_at_lower_parameter() {
        let err = eval_1f1(KummerArgs::real(0.5, -2.0, 1.0), ctl()).unwrap_err();
        assert!(matches!(err, KummerError::PoleAtLowerParameter { .. }));
        // a = −1 terminates before (c)ₖ reaches zero
        let v = eval_1f1(KummerArgs::real(-1.0, -2.0, 1.0), ctl()).unwrap();
        assert_eq!(v, c(1.5, 0.0));
        assert!(eval_1f1(KummerArgs::real(-3.0, -2.0, 1.0), ctl()).is_err());
    }

    #[test]
    fn non_convergence_reported() {
        let err = eval_1f1(KummerArgs::real(1.5, 2.0, 20.0), SeriesControl::new(1e-14, 10)).unwrap_err();
        assert!(matches!(err, KummerError::NonConvergence { terms: 10, .. }));
    }

    #[test]
    fn invalid_control_rejected() {
        assert!(eval_1f1(KummerArgs::real(1.0, 1.0, 1.0), SeriesControl::new(0.0, 10)).is_err());
        assert!(eval_1f1(KummerArgs::real(1.0, 1.0, 1.0), SeriesControl::new(1e-10, 0)).is_err());
    }

    #[test]
    fn identity_examples() {
        let r = identity_residual(Identity::D6, c(1.0, 0.0), c(1.0, 0.0), c(0.3, 0.0), ctl()).unwrap();
        assert!(r <= 4.0 * f64::EPSILON, "{r}");
        let r = identity_residual(Identity::R28, c(2.0, 0.0), c(3.0, 0.0), c(1.1, 0.0), ctl()).unwrap();
        assert!(r <= 1e-12, "{r}");
        let r = identity_residual(Identity::R47, c(1.5, 0.0), c(2.5, 0.0), c(-0.8, 0.0), ctl()).unwrap();
        assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn r14_shifts_both_parameters() {
        // Shifting only the lower parameter does not satisfy the relation.
        let (a, cc, x) = (c(1.3, 0.2), c(2.1, -0.1), c(0.7, 0.3));
        let base = sum_series(KummerArgs::new(a, cc, x), ctl()).unwrap();
        let lhs = x * (base.derivative - base.value);
        let lower_only = (cc - 1.0) * (eval_1f1(KummerArgs::new(a, cc - 1.0, x), ctl()).unwrap() - base.value);
        assert!((lhs - lower_only).norm() > 0.1);
        assert!(identity_residual(Identity::R14, a, cc, x, ctl()).unwrap() <= 1e-13);
    }

    #[test]
    fn identity_names_round_trip() {
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
        assert!("R99".parse::<Identity>().is_err());
    }
}
