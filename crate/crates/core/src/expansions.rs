//! Expansions `u(z) = Σₙ aₙ ₁F₁(αₙ; γₙ; s₀z)` of confluent Heun solutions.
//!
//! Five families are supported, distinguished by how the Kummer parameters
//! move with the summation index:
//!
//! | family | αₙ        | γₙ        | s₀   | recurrence |
//! |--------|-----------|-----------|------|------------|
//! | A1     | α₀ ± n    | γ₀ ± n    | −ε   | two-term, needs `q = α − δε` |
//! | A2     | α/ε + n   | γ+δ + n   | −ε   | three-term |
//! | B4     | α₀ + n    | γ         | free | four-term  |
//! | B3     | α₀ + n    | γ         | −ε   | three-term |
//! | C      | α/ε       | γ+δ + n   | −ε   | three-term |
//!
//! All series are left-terminated (`a₋₁ = a₋₂ = … = 0`, `a₀ = 1`) and built
//! by forward recurrence. For A1 the default form runs downward from the
//! right-terminated point `α₀ = 0`, with basis functions `₁F₁(−n; γ₀−n; −εz)`.
//!
//! Forward recurrence carries no minimal-solution safeguard. For generic `q`
//! the left-terminated coefficient sequences decay only algebraically and
//! their sums do not solve the equation; convergent, exact results come from
//! terminating series (see [`crate::termination`]). [`eval_series`] reports a
//! tail estimate and callers gate on it.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::che::{self, CheError, CheParams};
use crate::kummer::{self, KummerArgs, KummerError, SeriesControl};
use crate::numeric::{as_nonpositive_integer, is_zero, near};
use crate::C64;

/// Relative size below which trailing coefficients count as vanished.
pub const TERMINATION_TOL: f64 = 1e-9;

/// Tolerance for the agreement of recursive and Pochhammer A1 coefficients.
pub const A1_CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A1TwoTerm,
    A2ThreeTerm,
    B4FourTerm,
    B3ThreeTerm,
    CThreeTerm,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::A1TwoTerm,
        Family::A2ThreeTerm,
        Family::B4FourTerm,
        Family::B3ThreeTerm,
        Family::CThreeTerm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::A1TwoTerm => "a1",
            Family::A2ThreeTerm => "a2",
            Family::B4FourTerm => "b4",
            Family::B3ThreeTerm => "b3",
            Family::CThreeTerm => "c",
        }
    }

    /// Number of previous coefficients each recurrence step looks back.
    pub fn order(self) -> usize {
        match self {
            Family::A1TwoTerm => 1,
            Family::B4FourTerm => 3,
            _ => 2,
        }
    }

    fn has_fixed_s0(self) -> bool {
        self != Family::B4FourTerm
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown family `{s}` (expected a1, a2, b4, b3 or c)"))
    }
}

/// Choice of the starting upper parameter `α₀`.
///
/// The B families admit `α/ε` or `γ` (the roots of `R₀ = 0`). For A1 an
/// explicit value selects the ascending series `₁F₁(α₀+n; γ₀+n; −εz)`; with
/// no choice A1 uses the descending form from `α₀ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha0 {
    AlphaOverEpsilon,
    Gamma,
    Value(C64),
}

impl fmt::Display for Alpha0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha0::AlphaOverEpsilon => f.write_str("alpha-over-eps"),
            Alpha0::Gamma => f.write_str("gamma"),
            Alpha0::Value(v) => write!(f, "{v}"),
        }
    }
}

/// A failed applicability condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    EpsilonZero,
    /// A1 requires `q = α − δε`.
    QConstraintViolated {
        required: C64,
    },
    /// `γ + δ ∈ {0, −1, −2, …}`.
    GammaDeltaNonPositiveInteger,
    /// `γ ∈ {0, −1, −2, …}`.
    GammaNonPositiveInteger,
    AlphaZero,
    /// `γ₀ = γ + δ = 1` makes the `n = −1` basis function singular.
    GammaZeroIsOne,
    /// A1: `γ₀ ∈ {0, −1, −2, …}`.
    Gamma0NonPositiveInteger,
    /// Descending A1: `γ₀ ∈ {1, 2, …}` puts a zero in the lower parameter
    /// `γ₀ − n` and leaves a boundary term the finite sum cannot cancel.
    /// Raised by [`build_series`], not listed by [`applicability`].
    Gamma0PositiveInteger,
    /// The ascending A1 series only solves the equation when the boundary
    /// term at `n = 0` vanishes, i.e. `α₀ = α/ε` and `δ = 0`.
    AscendingLeftBoundary,
}

impl Violation {
    /// `GammaZeroIsOne` only breaks the `n = −1` coefficient, which a
    /// left-terminated series never uses; it is reported but not enforced.
    pub fn blocks_build(self) -> bool {
        self != Violation::GammaZeroIsOne
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EpsilonZero => f.write_str("EpsilonZero"),
            Violation::QConstraintViolated { required } => write!(f, "QConstraintViolated (q must be {required})"),
            Violation::GammaDeltaNonPositiveInteger => f.write_str("GammaDeltaNonPositiveInteger"),
            Violation::GammaNonPositiveInteger => f.write_str("GammaNonPositiveInteger"),
            Violation::AlphaZero => f.write_str("AlphaZero"),
            Violation::GammaZeroIsOne => f.write_str("GammaZeroIsOne"),
            Violation::Gamma0NonPositiveInteger => f.write_str("Gamma0NonPositiveInteger"),
            Violation::Gamma0PositiveInteger => f.write_str("Gamma0PositiveInteger"),
            Violation::AscendingLeftBoundary => f.write_str("AscendingLeftBoundary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("family {family} not applicable: {}", list(.violations))]
    Inapplicable { family: Family, violations: Vec<Violation> },
    #[error("alpha0 choice `{choice}` not valid for family {family}")]
    InvalidAlpha0 { family: Family, choice: Alpha0 },
    #[error("family b4 needs an explicit s0")]
    MissingS0,
    #[error("family {family} fixes s0 = -epsilon")]
    FixedS0 { family: Family },
    #[error("division by zero in {what} at n = {n}")]
    DivisionByZero { what: &'static str, n: i64 },
    #[error("leading recurrence coefficient R_{n} vanishes")]
    LeadingCoefficientVanishes { n: usize },
    #[error("A1 coefficient {n}: recursive and Pochhammer forms differ by {gap:e}")]
    ClosedFormMismatch { n: usize, gap: f64 },
    #[error("series tail estimate {tail:e} exceeds tolerance {tol:e}")]
    TailTooLarge { tail: f64, tol: f64, value: SeriesValue },
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error(transparent)]
    Che(#[from] CheError),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// How the Kummer parameters of `uₙ` depend on `n`:
/// `αₙ = α₀ + upper_step·n`, `γₙ = γ₀ + lower_step·n`, argument `s₀z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    pub alpha0: C64,
    pub gamma0: C64,
    pub s0: C64,
    pub upper_step: f64,
    pub lower_step: f64,
}

impl Basis {
    pub fn alpha_n(&self, n: i64) -> C64 {
        self.alpha0 + self.upper_step * n as f64
    }

    pub fn gamma_n(&self, n: i64) -> C64 {
        self.gamma0 + self.lower_step * n as f64
    }

    pub fn descending(&self) -> bool {
        self.upper_step < 0.0
    }
}

/// The Kummer basis for a family. Validates the α₀ choice and `s₀`.
pub fn basis(params: &CheParams, family: Family, alpha0: Option<Alpha0>, s0: Option<C64>) -> Result<Basis, ExpansionError> {
    let CheParams { gamma, delta, epsilon, .. } = *params;
    let aoe = params.alpha_over_epsilon();
    let s0 = match (family.has_fixed_s0(), s0) {
        (false, Some(s)) => s,
        (false, None) => return Err(ExpansionError::MissingS0),
        (true, Some(s)) if !near(s, -epsilon) => return Err(ExpansionError::FixedS0 { family }),
        (true, _) => -epsilon,
    };
    let invalid = |choice| ExpansionError::InvalidAlpha0 { family, choice };
    let b = match family {
        Family::A1TwoTerm => match alpha0 {
            None => Basis {
                alpha0: C64::new(0.0, 0.0),
                gamma0: 1.0 + gamma + delta - aoe,
                s0,
                upper_step: -1.0,
                lower_step: -1.0,
            },
            Some(choice @ Alpha0::Gamma) => return Err(invalid(choice)),
            Some(choice) => {
                let a0 = if let Alpha0::Value(v) = choice { v } else { aoe };
                Basis {
                    alpha0: a0,
                    gamma0: 1.0 + a0 + gamma + delta - aoe,
                    s0,
                    upper_step: 1.0,
                    lower_step: 1.0,
                }
            }
        },
        Family::A2ThreeTerm | Family::CThreeTerm => {
            match alpha0 {
                None | Some(Alpha0::AlphaOverEpsilon) => {}
                Some(Alpha0::Value(v)) if near(v, aoe) => {}
                Some(choice) => return Err(invalid(choice)),
            }
            let upper_step = if family == Family::A2ThreeTerm { 1.0 } else { 0.0 };
            Basis {
                alpha0: aoe,
                gamma0: gamma + delta,
                s0,
                upper_step,
                lower_step: 1.0,
            }
        }
        Family::B3ThreeTerm | Family::B4FourTerm => {
            let a0 = match alpha0 {
                None | Some(Alpha0::AlphaOverEpsilon) => aoe,
                Some(Alpha0::Gamma) => gamma,
                Some(Alpha0::Value(v)) if near(v, aoe) || near(v, gamma) => v,
                Some(choice) => return Err(invalid(choice)),
            };
            Basis {
                alpha0: a0,
                gamma0: gamma,
                s0,
                upper_step: 1.0,
                lower_step: 0.0,
            }
        }
    };
    Ok(b)
}

/// Violated applicability conditions with the family's default α₀.
pub fn applicability(params: &CheParams, family: Family) -> Vec<Violation> {
    applicability_with(params, family, None)
}

/// Violated applicability conditions for an explicit α₀ choice.
pub fn applicability_with(params: &CheParams, family: Family, alpha0: Option<Alpha0>) -> Vec<Violation> {
    let CheParams {
        gamma,
        delta,
        epsilon,
        alpha,
        q,
    } = *params;
    let mut v = Vec::new();
    let eps_zero = is_zero(epsilon);
    if eps_zero {
        v.push(Violation::EpsilonZero);
    }
    let gd = gamma + delta;
    match family {
        Family::A1TwoTerm => {
            let required = alpha - delta * epsilon;
            if (q - required).norm() > crate::numeric::INTEGER_TOL * 1f64.max(q.norm()).max(required.norm()) {
                v.push(Violation::QConstraintViolated { required });
            }
            if !eps_zero {
                if let Ok(b) = basis(params, family, alpha0, None) {
                    if as_nonpositive_integer(b.gamma0).is_some() {
                        v.push(Violation::Gamma0NonPositiveInteger);
                    }
                    if !b.descending() && !(near(b.alpha0, params.alpha_over_epsilon()) && is_zero(delta)) {
                        v.push(Violation::AscendingLeftBoundary);
                    }
                }
            }
        }
        Family::A2ThreeTerm | Family::CThreeTerm => {
            if family == Family::CThreeTerm && is_zero(alpha) {
                v.push(Violation::AlphaZero);
            }
            if as_nonpositive_integer(gd).is_some() {
                v.push(Violation::GammaDeltaNonPositiveInteger);
            }
            if near(gd, C64::new(1.0, 0.0)) {
                v.push(Violation::GammaZeroIsOne);
            }
        }
        Family::B3ThreeTerm | Family::B4FourTerm => {
            if as_nonpositive_integer(gamma).is_some() {
                v.push(Violation::GammaNonPositiveInteger);
            }
        }
    }
    v
}

/// Coefficients of `Rₙaₙ + Qₙ₋₁aₙ₋₁ + Pₙ₋₂aₙ₋₂ + Sₙ₋₃aₙ₋₃ = 0` at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recurrence {
    pub r: C64,
    pub q: C64,
    pub p: C64,
    pub s: Option<C64>,
}

/// Coefficients for a family with an explicit α₀ (A1: the ascending form)
/// and `s₀` (used by B4 only).
pub fn recurrence_coeffs(params: &CheParams, family: Family, alpha0: C64, s0: C64, n: i64) -> Result<Recurrence, ExpansionError> {
    let aoe = params.alpha_over_epsilon();
    let b = match family {
        Family::A1TwoTerm => Basis {
            alpha0,
            gamma0: 1.0 + alpha0 + params.gamma + params.delta - aoe,
            s0: -params.epsilon,
            upper_step: 1.0,
            lower_step: 1.0,
        },
        Family::A2ThreeTerm => Basis {
            alpha0,
            gamma0: alpha0 + params.gamma + params.delta - aoe,
            s0: -params.epsilon,
            upper_step: 1.0,
            lower_step: 1.0,
        },
        Family::CThreeTerm => Basis {
            alpha0: aoe,
            gamma0: params.gamma + params.delta,
            s0: -params.epsilon,
            upper_step: 0.0,
            lower_step: 1.0,
        },
        Family::B3ThreeTerm => Basis {
            alpha0,
            gamma0: params.gamma,
            s0: -params.epsilon,
            upper_step: 1.0,
            lower_step: 0.0,
        },
        Family::B4FourTerm => Basis {
            alpha0,
            gamma0: params.gamma,
            s0,
            upper_step: 1.0,
            lower_step: 0.0,
        },
    };
    coefficients_for(params, family, &b, n)
}

/// Recurrence coefficients in terms of the basis parameters `αₙ`, `γₙ`.
pub fn coefficients_for(params: &CheParams, family: Family, b: &Basis, n: i64) -> Result<Recurrence, ExpansionError> {
    let CheParams {
        gamma,
        delta,
        epsilon,
        alpha,
        q,
    } = *params;
    let an = b.alpha_n(n);
    let gn = b.gamma_n(n);
    let zero = C64::new(0.0, 0.0);
    let divide = |num: C64, den: C64, what| {
        if den == zero {
            Err(ExpansionError::DivisionByZero { what, n })
        } else {
            Ok(num / den)
        }
    };
    let rec = match family {
        Family::A1TwoTerm if b.descending() => {
            // bₙ = −Qₙ₋₁ bₙ₋₁ with bₙ/bₙ₋₁ = γ_{n}/α_{n} in the descending basis.
            let next = n + 1;
            let q = divide(-b.gamma_n(next), b.alpha_n(next), "A1 descending ratio")?;
            Recurrence {
                r: C64::new(1.0, 0.0),
                q,
                p: zero,
                s: None,
            }
        }
        Family::A1TwoTerm => {
            let q = divide(-an, gn, "A1 ratio alpha_n/gamma_n")?;
            Recurrence {
                r: C64::new(1.0, 0.0),
                q,
                p: zero,
                s: None,
            }
        }
        Family::A2ThreeTerm => {
            let r = (gamma + delta - gn) * (gn - 1.0);
            let qn = -r + epsilon * an - q;
            let p = epsilon * divide(an, gn, "A2 P_n (gamma_n)")? * (gamma - gn);
            Recurrence { r, q: qn, p, s: None }
        }
        Family::B4FourTerm => {
            let s0 = b.s0;
            let sigma = epsilon + s0;
            let r = (an - gamma) * (an * epsilon - alpha);
            let qn = (an * epsilon - alpha) * (gamma - 2.0 * an) - s0 * (an * (epsilon - delta) - q) + an * (gamma - 1.0 - an) * sigma;
            let p = an * ((an + delta) * epsilon - alpha + (2.0 * an + 2.0 - gamma - delta - epsilon) * sigma + sigma * sigma);
            let s = -an * (1.0 + an) * sigma;
            Recurrence { r, q: qn, p, s: Some(s) }
        }
        Family::B3ThreeTerm => {
            let aoe = divide(alpha, epsilon, "alpha/epsilon")?;
            let r = (an - gamma) * (an - aoe);
            let qn = (an - aoe) * (gamma - 2.0 * an) + an * (epsilon - delta) - q;
            let p = an * (an + delta - aoe);
            Recurrence { r, q: qn, p, s: None }
        }
        Family::CThreeTerm => {
            let r = (gamma + delta - gn) * (gn - 1.0);
            let qn = (gamma + delta - gn) * (1.0 - gn) + epsilon * (gamma - gn) + alpha - q;
            let p = (gn - gamma) * (epsilon - divide(alpha, gn, "C P_n (gamma_n)")?);
            Recurrence { r, q: qn, p, s: None }
        }
    };
    Ok(rec)
}

/// Coefficient of `q` in `Qₙ` (the other recurrence coefficients are q-free).
pub fn q_slope(family: Family, s0: C64) -> C64 {
    match family {
        Family::A1TwoTerm => C64::new(0.0, 0.0),
        Family::B4FourTerm => s0,
        _ => C64::new(-1.0, 0.0),
    }
}

/// A built expansion: basis, coefficients `a₀..a_K` and, when the series
/// ends, the last nonzero index.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub params: CheParams,
    pub family: Family,
    pub basis: Basis,
    pub coefficients: Vec<C64>,
    pub terminated: Option<usize>,
}

impl SeriesSolution {
    pub fn alpha0(&self) -> C64 {
        self.basis.alpha0
    }

    pub fn gamma0(&self) -> C64 {
        self.basis.gamma0
    }

    pub fn s0(&self) -> C64 {
        self.basis.s0
    }

    pub fn recurrence(&self, n: i64) -> Result<Recurrence, ExpansionError> {
        coefficients_for(&self.params, self.family, &self.basis, n)
    }

    /// Coefficients that enter the sum.
    pub fn active_coefficients(&self) -> &[C64] {
        match self.terminated {
            Some(n) => &self.coefficients[..=n],
            None => &self.coefficients,
        }
    }

    /// Kummer arguments of `uₙ` at `z`.
    pub fn basis_args(&self, n: usize, z: C64) -> KummerArgs {
        let n = n as i64;
        KummerArgs::new(self.basis.alpha_n(n), self.basis.gamma_n(n), self.basis.s0 * z)
    }

    /// `maxₖ |term k|` of the recurrence at index `n`, used to scale
    /// re-substitution residuals.
    pub fn recurrence_residual(&self, n: usize) -> Result<(C64, f64), ExpansionError> {
        let a = |k: i64| if k < 0 { C64::new(0.0, 0.0) } else { self.coefficients[k as usize] };
        let n = n as i64;
        let mut terms = vec![self.recurrence(n)?.r * a(n)];
        if n >= 1 {
            terms.push(self.recurrence(n - 1)?.q * a(n - 1));
        }
        if n >= 2 {
            terms.push(self.recurrence(n - 2)?.p * a(n - 2));
        }
        if n >= 3 {
            if let Some(s) = self.recurrence(n - 3)?.s {
                terms.push(s * a(n - 3));
            }
        }
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.norm()));
        Ok((terms.iter().sum(), scale))
    }
}

/// Builds `a₀ = 1, a₁, …, a_N` by forward recurrence and marks the series
/// terminated at the smallest index `M` whose following `order` coefficients
/// vanish relative to `max_{n≤M}|aₙ|`.
pub fn build_series(
    params: &CheParams,
    family: Family,
    n_terms: usize,
    alpha0: Option<Alpha0>,
    s0: Option<C64>,
) -> Result<SeriesSolution, ExpansionError> {
    let violations: Vec<_> = applicability_with(params, family, alpha0)
        .into_iter()
        .filter(|v| v.blocks_build())
        .collect();
    if !violations.is_empty() {
        return Err(ExpansionError::Inapplicable { family, violations });
    }
    let basis = basis(params, family, alpha0, s0)?;
    if family == Family::A1TwoTerm && basis.descending() && crate::numeric::as_integer(basis.gamma0).is_some_and(|m| m >= 1) {
        return Err(ExpansionError::Inapplicable {
            family,
            violations: vec![Violation::Gamma0PositiveInteger],
        });
    }
    let mut sol = SeriesSolution {
        params: *params,
        family,
        basis,
        coefficients: vec![C64::new(1.0, 0.0)],
        terminated: None,
    };
    let zero = C64::new(0.0, 0.0);
    for n in 1..=n_terms {
        let ni = n as i64;
        let lead = sol.recurrence(ni)?;
        let mut terms = vec![(sol.recurrence(ni - 1)?.q, sol.coefficients[n - 1])];
        if n >= 2 && family.order() >= 2 {
            terms.push((sol.recurrence(ni - 2)?.p, sol.coefficients[n - 2]));
        }
        if n >= 3 {
            if let Some(s) = sol.recurrence(ni - 3)?.s {
                terms.push((s, sol.coefficients[n - 3]));
            }
        }
        let acc: C64 = terms.iter().map(|(m, a)| m * a).sum();
        if lead.r == zero {
            // Rₙaₙ = 0 with only vanished coefficients on the right leaves aₙ
            // free; zero keeps the finite solution.
            let max = sol.coefficients.iter().fold(0.0f64, |m, a| m.max(a.norm()));
            if terms.iter().all(|(m, a)| *m == zero || a.norm() <= TERMINATION_TOL * max) {
                sol.coefficients.push(zero);
                continue;
            }
            return Err(ExpansionError::LeadingCoefficientVanishes { n });
        }
        sol.coefficients.push(-acc / lead.r);
    }
    if family == Family::A1TwoTerm {
        check_a1_closed_form(&sol)?;
    }
    sol.terminated = if family == Family::A1TwoTerm {
        // Two-term coefficients decay algebraically; only a vanishing ratio ends the series.
        (0..sol.coefficients.len() - 1).find(|&m| sol.coefficients[m + 1].norm() <= TERMINATION_TOL * sol.coefficients[m].norm())
    } else {
        detect_vanishing_tail(&sol.coefficients, family.order())
    };
    Ok(sol)
}

/// A1 coefficients in closed form: `(α₀)ₙ/(γ₀)ₙ` ascending, `(1−γ₀)ₙ/n!`
/// descending.
pub fn a1_closed_form(basis: &Basis, n: usize) -> C64 {
    // Ratio by ratio: the separate products overflow long before the quotient.
    let one = C64::new(1.0, 0.0);
    (0..n).fold(one, |acc, k| {
        let k = k as f64;
        if basis.descending() {
            acc * (1.0 - basis.gamma0 + k) / (one + k)
        } else {
            acc * (basis.alpha0 + k) / (basis.gamma0 + k)
        }
    })
}

fn check_a1_closed_form(sol: &SeriesSolution) -> Result<(), ExpansionError> {
    for (n, &a) in sol.coefficients.iter().enumerate() {
        let exact = a1_closed_form(&sol.basis, n);
        let gap = (a - exact).norm() / exact.norm().max(f64::MIN_POSITIVE);
        if exact.norm() == 0.0 {
            if a.norm() != 0.0 {
                return Err(ExpansionError::ClosedFormMismatch { n, gap: a.norm() });
            }
        } else if gap > A1_CLOSED_FORM_TOL {
            return Err(ExpansionError::ClosedFormMismatch { n, gap });
        }
    }
    Ok(())
}

fn detect_vanishing_tail(a: &[C64], order: usize) -> Option<usize> {
    let mut running_max = 0.0f64;
    for m in 0..a.len() {
        running_max = running_max.max(a[m].norm());
        if m + order >= a.len() {
            break;
        }
        if a[m + 1..=m + order].iter().all(|c| c.norm() <= TERMINATION_TOL * running_max) {
            return Some(m);
        }
    }
    None
}

/// Value and first two z-derivatives of an expansion at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub derivative: C64,
    pub second_derivative: C64,
    /// `|last included term| / |sum|`; zero for terminated series.
    pub tail: f64,
    pub terms: usize,
}

/// Sums the series without the tail gate. Derivatives use the
/// differentiation rule on each basis function.
pub fn sum_series(sol: &SeriesSolution, z: C64, ctl: SeriesControl) -> Result<SeriesValue, ExpansionError> {
    let coeffs = sol.active_coefficients();
    if coeffs.is_empty() {
        return Err(ExpansionError::LeadingCoefficientVanishes { n: 0 });
    }
    let s0 = sol.basis.s0;
    let zero = C64::new(0.0, 0.0);
    let (mut value, mut d1, mut d2) = (zero, zero, zero);
    let mut last = zero;
    for (n, &an) in coeffs.iter().enumerate() {
        if an == zero {
            last = zero;
            continue;
        }
        let args = sol.basis_args(n, z);
        let KummerArgs { a, c, x } = args;
        let u = kummer::eval_1f1(args, ctl)?;
        let (du, d2u) = if a == zero {
            (zero, zero)
        } else {
            let u1 = kummer::eval_1f1(KummerArgs::new(a + 1.0, c + 1.0, x), ctl)?;
            let first = s0 * a / c * u1;
            let second = if a + 1.0 == zero {
                zero
            } else {
                s0 * s0 * a * (a + 1.0) / (c * (c + 1.0)) * kummer::eval_1f1(KummerArgs::new(a + 2.0, c + 2.0, x), ctl)?
            };
            (first, second)
        };
        last = an * u;
        value += last;
        d1 += an * du;
        d2 += an * d2u;
    }
    let tail = if sol.terminated.is_some() {
        0.0
    } else {
        last.norm() / value.norm().max(f64::MIN_POSITIVE)
    };
    Ok(SeriesValue {
        value,
        derivative: d1,
        second_derivative: d2,
        tail,
        terms: coeffs.len(),
    })
}

/// `Σₙ aₙ ₁F₁(αₙ; γₙ; s₀z)`; fails with `TailTooLarge` when the series is
/// not terminated and its tail estimate exceeds `tol`.
pub fn eval_series(sol: &SeriesSolution, z: C64, tol: f64) -> Result<SeriesValue, ExpansionError> {
    let v = sum_series(sol, z, SeriesControl::default())?;
    if sol.terminated.is_none() && v.tail > tol {
        return Err(ExpansionError::TailTooLarge {
            tail: v.tail,
            tol,
            value: v,
        });
    }
    Ok(v)
}

/// Scaled equation residual of the evaluated series at `z`.
pub fn series_residual(sol: &SeriesSolution, z: C64, tol: f64) -> Result<f64, ExpansionError> {
    let v = eval_series(sol, z, tol)?;
    Ok(che::scaled_residual(&sol.params, v.value, v.derivative, v.second_derivative, z)?)
}
