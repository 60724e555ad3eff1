//! Right-side termination of the expansions and the accessory-parameter
//! spectrum that makes a series finite.
//!
//! A left-terminated series stops at index `N` when `P_N = 0` (a parameter
//! coincidence, see [`TerminationKind`]) and `a_{N+1} = 0`. The second
//! condition is a polynomial of degree `N+1` in `q`; its roots form the
//! spectrum.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::che::{self, CheParams};
use crate::expansions::{self, Alpha0, Basis, ExpansionError, Family, SeriesSolution};
use crate::numeric::as_nonpositive_integer;
use crate::C64;

/// Relative size below which a coefficient counts as zero.
pub const VANISH_TOL: f64 = 1e-9;

/// Maximum `|a_{N+1}(root)|` after polishing, relative to the polynomial scale.
pub const ROOT_TOL: f64 = 1e-8;

/// Roots closer than this (relative) are reported as one multiple root.
pub const MULTIPLICITY_TOL: f64 = 1e-6;

/// Sample points for residual checks of finite sums.
pub const CHECK_POINTS: [(f64, f64); 5] = [(0.1, 0.0), (0.25, 0.0), (0.4, 0.0), (0.2, 0.2), (-0.3, 0.1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationKind {
    /// `α/ε = −N`
    AlphaOverEps,
    /// `δ = −N`
    DeltaInt,
    /// `γ + δ − α/ε = −N`
    GammaDeltaAlpha,
}

impl TerminationKind {
    pub const ALL: [TerminationKind; 3] = [
        TerminationKind::AlphaOverEps,
        TerminationKind::DeltaInt,
        TerminationKind::GammaDeltaAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TerminationKind::AlphaOverEps => "alpha-over-eps",
            TerminationKind::DeltaInt => "delta-int",
            TerminationKind::GammaDeltaAlpha => "gamma-delta-alpha",
        }
    }

    /// The parameter combination that must equal `−N`.
    pub fn value(self, params: &CheParams) -> C64 {
        let aoe = params.alpha_over_epsilon();
        match self {
            TerminationKind::AlphaOverEps => aoe,
            TerminationKind::DeltaInt => params.delta,
            TerminationKind::GammaDeltaAlpha => params.gamma + params.delta - aoe,
        }
    }
}

impl fmt::Display for TerminationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kinds that make `P_N` vanish for a family and α₀ branch.
///
/// B4 only ends through `α/ε = −N`, where `P_N`, `S_N` and `S_{N−1}` all
/// vanish; A1 has no q-dependent termination.
pub fn admissible_kinds(family: Family, alpha0: Option<Alpha0>) -> &'static [TerminationKind] {
    use TerminationKind::*;
    let gamma_branch = matches!(alpha0, Some(Alpha0::Gamma));
    match family {
        Family::A1TwoTerm => &[],
        Family::A2ThreeTerm => &[AlphaOverEps, DeltaInt],
        Family::B3ThreeTerm if gamma_branch => &[GammaDeltaAlpha],
        Family::B3ThreeTerm => &[AlphaOverEps, DeltaInt],
        Family::B4FourTerm if gamma_branch => &[],
        Family::B4FourTerm => &[AlphaOverEps],
        Family::CThreeTerm => &[GammaDeltaAlpha, DeltaInt],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TerminationCondition {
    pub family: Family,
    pub kind: TerminationKind,
    pub n: usize,
}

impl TerminationCondition {
    /// The α₀ branch this condition belongs to.
    pub fn alpha0(&self) -> Option<Alpha0> {
        match (self.family, self.kind) {
            (Family::B3ThreeTerm, TerminationKind::GammaDeltaAlpha) => Some(Alpha0::Gamma),
            _ => None,
        }
    }
}

impl fmt::Display for TerminationCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} N={}", self.family, self.kind, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TerminationError {
    #[error("condition {0} does not hold for these parameters")]
    ConditionNotMet(TerminationCondition),
    #[error("kind {kind} is not admissible for family {family}")]
    KindNotAdmissible { family: Family, kind: TerminationKind },
    #[error("a_(N+1)(q) has vanishing leading coefficient")]
    DegeneratePolynomial,
    #[error("root {root} leaves |a_(N+1)| = {residual:e} (scale {scale:e})")]
    IllConditionedRoots { root: C64, residual: f64, scale: f64 },
    #[error("companion matrix eigenvalue iteration failed")]
    EigenFailure,
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

/// Every admissible condition, smallest `N` first.
pub fn detect_all(params: &CheParams, family: Family, alpha0: Option<Alpha0>) -> Vec<TerminationCondition> {
    let mut found: Vec<_> = admissible_kinds(family, alpha0)
        .iter()
        .filter_map(|&kind| {
            as_nonpositive_integer(kind.value(params)).map(|m| TerminationCondition {
                family,
                kind,
                n: m as usize,
            })
        })
        .collect();
    found.sort_by_key(|c| c.n);
    found
}

/// The admissible condition with the smallest `N`, if any.
pub fn detect_termination(params: &CheParams, family: Family, alpha0: Option<Alpha0>) -> Option<TerminationCondition> {
    detect_all(params, family, alpha0).into_iter().next()
}

/// Roots of `a_{N+1}(q) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSpectrum {
    pub condition: TerminationCondition,
    /// Monomial coefficients of `a_{N+1}(q)`, constant term first.
    pub polynomial: Vec<C64>,
    pub roots: Vec<C64>,
    /// `|a_{N+1}(root)|` from the recurrence, after polishing.
    pub root_residuals: Vec<f64>,
    /// Number of roots (including itself) each root coincides with.
    pub multiplicities: Vec<usize>,
    pub s0: C64,
}

impl QSpectrum {
    /// `max(1, max|root|)`, the normalization for distances to the spectrum.
    pub fn scale(&self) -> f64 {
        self.roots.iter().fold(1.0f64, |m, r| m.max(r.norm()))
    }

    /// Evaluates the stored polynomial at `q`.
    pub fn eval_polynomial(&self, q: C64) -> C64 {
        horner(&self.polynomial, q)
    }
}

fn horner(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `Σ|cₖ| max(1,|x|)ᵏ`.
fn poly_scale(coeffs: &[C64], x: C64) -> f64 {
    let r = x.norm().max(1.0);
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// q-free recurrence data for computing `aₙ(q)` with `Qₙ(q) = Qₙ(0) + slope·q`.
struct QRecurrence {
    r: Vec<C64>,
    q0: Vec<C64>,
    p: Vec<C64>,
    s: Vec<C64>,
    slope: C64,
}

impl QRecurrence {
    fn new(params: &CheParams, family: Family, basis: &Basis, top: usize) -> Result<Self, ExpansionError> {
        let p0 = params.with_q(C64::new(0.0, 0.0));
        let mut out = QRecurrence {
            r: Vec::with_capacity(top + 1),
            q0: Vec::with_capacity(top + 1),
            p: Vec::with_capacity(top + 1),
            s: Vec::with_capacity(top + 1),
            slope: expansions::q_slope(family, basis.s0),
        };
        for n in 0..=top {
            let c = expansions::coefficients_for(&p0, family, basis, n as i64)?;
            out.r.push(c.r);
            out.q0.push(c.q);
            out.p.push(c.p);
            out.s.push(c.s.unwrap_or_default());
        }
        for n in 1..=top {
            if out.r[n] == C64::new(0.0, 0.0) {
                return Err(ExpansionError::LeadingCoefficientVanishes { n });
            }
        }
        Ok(out)
    }

    /// `a_top(q)` as monomial coefficients.
    fn polynomials(&self, top: usize) -> Vec<Vec<C64>> {
        let mut a: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
        for n in 1..=top {
            let mut next = vec![C64::new(0.0, 0.0); n + 1];
            for (k, &c) in a[n - 1].iter().enumerate() {
                next[k] += self.q0[n - 1] * c;
                next[k + 1] += self.slope * c;
            }
            if n >= 2 {
                for (k, &c) in a[n - 2].iter().enumerate() {
                    next[k] += self.p[n - 2] * c;
                }
            }
            if n >= 3 {
                for (k, &c) in a[n - 3].iter().enumerate() {
                    next[k] += self.s[n - 3] * c;
                }
            }
            for c in next.iter_mut() {
                *c = -*c / self.r[n];
            }
            a.push(next);
        }
        a
    }

    /// `(a_top(q), d a_top/dq)` by forward recurrence.
    fn eval(&self, top: usize, q: C64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let mut a = vec![C64::new(1.0, 0.0)];
        let mut da = vec![zero];
        for n in 1..=top {
            let qn = self.q0[n - 1] + self.slope * q;
            let mut v = qn * a[n - 1];
            let mut dv = qn * da[n - 1] + self.slope * a[n - 1];
            if n >= 2 {
                v += self.p[n - 2] * a[n - 2];
                dv += self.p[n - 2] * da[n - 2];
            }
            if n >= 3 {
                v += self.s[n - 3] * a[n - 3];
                dv += self.s[n - 3] * da[n - 3];
            }
            a.push(-v / self.r[n]);
            da.push(-dv / self.r[n]);
        }
        (a[top], da[top])
    }
}

/// `a_{N+1}(q)` at a fixed `q` through the numeric recurrence.
pub fn terminal_coefficient(
    params: &CheParams,
    condition: &TerminationCondition,
    s0: Option<C64>,
    q: C64,
) -> Result<C64, TerminationError> {
    let basis = expansions::basis(params, condition.family, condition.alpha0(), s0)?;
    let rec = QRecurrence::new(params, condition.family, &basis, condition.n + 1)?;
    Ok(rec.eval(condition.n + 1, q).0)
}

/// Spectrum for families with `s₀ = −ε`.
pub fn q_spectrum(params: &CheParams, family: Family, condition: TerminationCondition) -> Result<QSpectrum, TerminationError> {
    q_spectrum_with_s0(params, family, condition, None)
}

/// Spectrum with an explicit `s₀` (required for B4).
pub fn q_spectrum_with_s0(
    params: &CheParams,
    family: Family,
    condition: TerminationCondition,
    s0: Option<C64>,
) -> Result<QSpectrum, TerminationError> {
    if family != condition.family || !admissible_kinds(family, condition.alpha0()).contains(&condition.kind) {
        return Err(TerminationError::KindNotAdmissible {
            family,
            kind: condition.kind,
        });
    }
    if as_nonpositive_integer(condition.kind.value(params)) != Some(condition.n as u32) {
        return Err(TerminationError::ConditionNotMet(condition));
    }
    let basis = expansions::basis(params, family, condition.alpha0(), s0)?;
    let top = condition.n + 1;
    let rec = QRecurrence::new(params, family, &basis, top)?;
    let polynomial = rec.polynomials(top).pop().unwrap_or_default();
    let lead = polynomial[top];
    if lead.norm() <= f64::EPSILON * polynomial.iter().fold(0.0f64, |m, c| m.max(c.norm())) {
        return Err(TerminationError::DegeneratePolynomial);
    }
    let raw = companion_roots(&polynomial)?;
    let mut roots = Vec::with_capacity(raw.len());
    let mut root_residuals = Vec::with_capacity(raw.len());
    for q in raw {
        let (f, df) = rec.eval(top, q);
        let polished = if df.norm() > 0.0 { q - f / df } else { q };
        let (fp, _) = rec.eval(top, polished);
        // Keep whichever is better; Newton can overshoot at clustered roots.
        let (root, value) = if fp.norm() <= f.norm() { (polished, fp) } else { (q, f) };
        let scale = poly_scale(&polynomial, root);
        if value.norm() > ROOT_TOL * scale {
            return Err(TerminationError::IllConditionedRoots {
                root,
                residual: value.norm(),
                scale,
            });
        }
        roots.push(root);
        root_residuals.push(value.norm());
    }
    let multiplicities = multiplicities(&roots);
    Ok(QSpectrum {
        condition,
        polynomial,
        roots,
        root_residuals,
        multiplicities,
        s0: basis.s0,
    })
}

fn companion_roots(poly: &[C64]) -> Result<Vec<C64>, TerminationError> {
    let deg = poly.len() - 1;
    let lead = poly[deg];
    if deg == 1 {
        return Ok(vec![-poly[0] / lead]);
    }
    let m = DMatrix::<C64>::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -poly[deg - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let schur = m.try_schur(f64::EPSILON, 10_000).ok_or(TerminationError::EigenFailure)?;
    let eig = schur.eigenvalues().ok_or(TerminationError::EigenFailure)?;
    let mut roots: Vec<C64> = eig.iter().copied().collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn multiplicities(roots: &[C64]) -> Vec<usize> {
    roots
        .iter()
        .map(|r| {
            roots
                .iter()
                .filter(|s| (*r - **s).norm() <= MULTIPLICITY_TOL * 1f64.max(r.norm()))
                .count()
        })
        .collect()
}

/// True when `a_{N+1}` through `a_{N+order}` (at least two of them) vanish
/// relative to `max_{n≤N}|aₙ|`, and the following coefficients up to
/// `N+5` are also negligible.
pub fn verify_termination(sol: &SeriesSolution, n: usize) -> bool {
    let a = &sol.coefficients;
    let needed = sol.family.order().max(2);
    if a.len() < n + needed + 1 {
        return false;
    }
    let max = a[..=n].iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let small = |c: &C64| c.norm() <= VANISH_TOL * max;
    a[n + 1..=n + needed].iter().all(small) && a[n + 1..a.len().min(n + 6)].iter().all(small)
}

/// Outcome of rebuilding the series at one spectrum root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCheck {
    pub root: C64,
    pub terminated: bool,
    /// Largest scaled equation residual over [`CHECK_POINTS`].
    pub max_residual: f64,
    pub solution: SeriesSolution,
}

/// Rebuilds `u` with `q = root` for every root and checks termination and
/// the equation residual.
pub fn verify_spectrum(params: &CheParams, spectrum: &QSpectrum) -> Result<Vec<RootCheck>, TerminationError> {
    let cond = spectrum.condition;
    let s0 = (cond.family == Family::B4FourTerm).then_some(spectrum.s0);
    spectrum
        .roots
        .iter()
        .map(|&root| {
            let p = params.with_q(root);
            let mut sol = expansions::build_series(&p, cond.family, cond.n + 6, cond.alpha0(), s0)?;
            let terminated = verify_termination(&sol, cond.n);
            if terminated {
                sol.terminated = Some(sol.terminated.map_or(cond.n, |m| m.min(cond.n)));
            }
            let mut max_residual = 0.0f64;
            for (re, im) in CHECK_POINTS {
                let z = C64::new(re, im);
                let v = expansions::sum_series(&sol, z, Default::default())?;
                let r = che::scaled_residual(&p, v.value, v.derivative, v.second_derivative, z).map_err(ExpansionError::from)?;
                max_residual = max_residual.max(r);
            }
            Ok(RootCheck {
                root,
                terminated,
                max_residual,
                solution: sol,
            })
        })
        .collect()
}

/// Interpolates the finite sum at `degree+1` points and returns the relative
/// error of the interpolant at a further point. Near zero certifies a
/// polynomial of at most that degree.
pub fn polynomial_defect(sol: &SeriesSolution, degree: usize) -> Result<f64, ExpansionError> {
    let node = |k: usize| C64::new(-0.4 + 0.8 * k as f64 / (degree.max(1)) as f64, 0.05);
    let xs: Vec<C64> = (0..=degree).map(node).collect();
    let ys = xs
        .iter()
        .map(|&z| expansions::sum_series(sol, z, Default::default()).map(|v| v.value))
        .collect::<Result<Vec<_>, _>>()?;
    let probe = C64::new(0.13, -0.21);
    let lagrange: C64 = (0..xs.len())
        .map(|i| {
            let basis: C64 = (0..xs.len())
                .filter(|&j| j != i)
                .map(|j| (probe - xs[j]) / (xs[i] - xs[j]))
                .product();
            ys[i] * basis
        })
        .sum();
    let exact = expansions::sum_series(sol, probe, Default::default())?.value;
    Ok((lagrange - exact).norm() / 1f64.max(exact.norm()))
}
