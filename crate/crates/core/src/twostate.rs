//! Two-state quantum dynamics with Lorentzian coupling and detuning.
//!
//! The amplitudes obey
//!
//! ```text
//! i ȧ₁ = U(t) e^{−iδ(t)} a₂,   i ȧ₂ = U(t) e^{+iδ(t)} a₁,
//! U = U₀/(1+t²),   δ̇ = Δ₀ + Δ₁/(1+t²),
//! ```
//!
//! equivalently `ä₂ − (U̇/U + iδ̇) ȧ₂ + U² a₂ = 0`. With `z = (1+it)/2` and
//! `a₂ = z^{α₁}(z−1)^{α₂} u(z)` the second-order form becomes a confluent
//! Heun equation for `u` with
//!
//! ```text
//! R = √(U₀² + Δ₁²/4),   α₁ = (Δ₁ + 2R)/4 = −α₂,
//! (γ, δ, ε, α, q) = (1+R, 1−R, −2Δ₀, 0, −(R + Δ₁/2)Δ₀).
//! ```
//!
//! For natural `R = N+1` the B3 expansion can end, and the parameter sets
//! where it does trace out curves in `(U₀, Δ₀, Δ₁)`.

use std::f64::consts::PI;

use log::warn;
use thiserror::Error;

use crate::che::{CheError, CheParams};
use crate::expansions::{self, ExpansionError, Family, SeriesSolution};
use crate::numeric::{as_integer, INTEGER_TOL};
use crate::termination::{self, TerminationCondition, TerminationError, TerminationKind};
use crate::C64;

/// Default RK4 step count over a trajectory.
pub const DEFAULT_STEPS: usize = 10_000;

/// Largest endpoint change allowed when the RK step is halved.
pub const STEP_HALVING_TOL: f64 = 1e-8;

/// Largest one-sided jump at `t = 0` before a branch warning is logged.
pub const BRANCH_TOL: f64 = 1e-8;

/// Series tail gate for closed-form evaluation.
pub const SERIES_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwoStateError {
    #[error("effective Rabi frequency {r} is not the natural number {expected}")]
    ConditionNotMet { r: f64, expected: usize },
    #[error("halving the step changed the endpoint by {change:e}")]
    StepTooCoarse { change: f64 },
    #[error("at least 100 steps required, got {steps}")]
    InvalidSteps { steps: usize },
    #[error("coupling vanishes at t = {t}; a1 cannot be recovered from a2")]
    ZeroCoupling { t: f64 },
    #[error("no admissible detuning in the scan range")]
    EmptyScan,
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Termination(#[from] TerminationError),
    #[error(transparent)]
    Che(#[from] CheError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianModel {
    pub u0: f64,
    pub delta0: f64,
    pub delta1: f64,
}

impl LorentzianModel {
    pub fn new(u0: f64, delta0: f64, delta1: f64) -> Self {
        Self { u0, delta0, delta1 }
    }

    pub fn coupling(&self, t: f64) -> f64 {
        self.u0 / (1.0 + t * t)
    }

    pub fn detuning(&self, t: f64) -> f64 {
        self.delta0 + self.delta1 / (1.0 + t * t)
    }

    /// `δ(t) = Δ₀t + Δ₁ arctan t`.
    pub fn phase(&self, t: f64) -> f64 {
        self.delta0 * t + self.delta1 * t.atan()
    }

    /// `R = √(U₀² + Δ₁²/4)`.
    pub fn rabi_frequency(&self) -> f64 {
        (self.u0 * self.u0 + 0.25 * self.delta1 * self.delta1).sqrt()
    }

    /// Residual of `ä₂ − (U̇/U + iδ̇)ȧ₂ + U²a₂`, relative to its largest term.
    pub fn second_order_residual(&self, t: f64, a2: C64, da2: C64, d2a2: C64) -> f64 {
        let u = self.coupling(t);
        let log_du = -2.0 * t / (1.0 + t * t);
        let damping = C64::new(log_du, self.detuning(t)) * da2;
        let restoring = u * u * a2;
        let res = d2a2 - damping + restoring;
        res.norm() / d2a2.norm().max(damping.norm()).max(restoring.norm()).max(f64::MIN_POSITIVE)
    }
}

/// `z(t) = (1 + it)/2`.
pub fn z_of_t(t: f64) -> C64 {
    C64::new(0.5, 0.5 * t)
}

/// `dz/dt`.
pub const DZ_DT: C64 = C64::new(0.0, 0.5);

/// Equation parameters and prefactor `e^{α₀z} z^{α₁} (z−1)^{α₂}` of the
/// reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateReduction {
    pub model: LorentzianModel,
    pub che: CheParams,
    pub exp_alpha0: C64,
    pub exp_alpha1: C64,
    pub exp_alpha2: C64,
    pub r: C64,
}

/// Reduction with `R = √(U₀² + Δ₁²/4)`, snapped to an integer within 1e−9.
pub fn reduce_to_che(model: LorentzianModel) -> TwoStateReduction {
    let mut r = model.rabi_frequency();
    if let Some(m) = as_integer(C64::new(r, 0.0)) {
        r = m as f64;
    }
    reduction_with_r(model, r)
}

/// Reduction using `R = √(U₀² + Δ₁²)/4`, the literal reading of the formula
/// as usually typeset. It does not solve the second-order equation; kept for
/// comparison.
pub fn printed_reduction(model: LorentzianModel) -> TwoStateReduction {
    reduction_with_r(model, (model.u0 * model.u0 + model.delta1 * model.delta1).sqrt() / 4.0)
}

fn reduction_with_r(model: LorentzianModel, r: f64) -> TwoStateReduction {
    let LorentzianModel { delta0, delta1, .. } = model;
    let c = |x: f64| C64::new(x, 0.0);
    let alpha1 = (delta1 + 2.0 * r) / 4.0;
    TwoStateReduction {
        model,
        che: CheParams::real(1.0 + r, 1.0 - r, -2.0 * delta0, 0.0, -(r + delta1 / 2.0) * delta0),
        exp_alpha0: c(0.0),
        exp_alpha1: c(alpha1),
        exp_alpha2: c(-alpha1),
        r: c(r),
    }
}

impl TwoStateReduction {
    /// `e^{α₀z} z^{α₁} (z−1)^{α₂}` with `(z−1)^{α₂}` continued as
    /// `e^{iπα₂}(1−z)^{α₂}`. On `Re z = 1/2` this equals the principal
    /// branch for `t ≥ 0` and stays continuous through `t = 0`.
    pub fn prefactor(&self, z: C64) -> C64 {
        let branch = (C64::new(0.0, PI) * self.exp_alpha2).exp();
        (self.exp_alpha0 * z).exp() * z.powc(self.exp_alpha1) * branch * (1.0 - z).powc(self.exp_alpha2)
    }

    /// Principal-branch prefactor, discontinuous across `t = 0`.
    pub fn principal_prefactor(&self, z: C64) -> C64 {
        (self.exp_alpha0 * z).exp() * z.powc(self.exp_alpha1) * (z - 1.0).powc(self.exp_alpha2)
    }

    /// Logarithmic derivative of the prefactor and its z-derivative.
    fn log_prefactor_derivs(&self, z: C64) -> (C64, C64) {
        let zm1 = z - 1.0;
        let l = self.exp_alpha0 + self.exp_alpha1 / z + self.exp_alpha2 / zm1;
        let dl = -self.exp_alpha1 / (z * z) - self.exp_alpha2 / (zm1 * zm1);
        (l, dl)
    }

    /// `(a₂, ȧ₂, ä₂)` at `t` from `(u, u', u'')` at `z(t)`.
    pub fn amplitude_from(&self, t: f64, u: C64, du: C64, d2u: C64) -> (C64, C64, C64) {
        let z = z_of_t(t);
        let p = self.prefactor(z);
        let (l, dl) = self.log_prefactor_derivs(z);
        let a = p * u;
        let dz = p * (du + l * u);
        let d2z = p * (d2u + 2.0 * l * du + (l * l + dl) * u);
        (a, DZ_DT * dz, DZ_DT * DZ_DT * d2z)
    }

    /// Largest second-order-equation residual when arbitrary `(u, u')` are
    /// completed with `u''` from the Heun equation and mapped to `a₂`. A
    /// correct reduction gives round-off; a wrong one fails at every point.
    pub fn verify(&self, times: &[f64]) -> Result<f64, TwoStateError> {
        let mut worst = 0.0f64;
        for (k, &t) in times.iter().enumerate() {
            let z = z_of_t(t);
            for (u, du) in probe_values(k) {
                let d2u = self.che.second_derivative(u, du, z)?;
                let (a, da, d2a) = self.amplitude_from(t, u, du, d2u);
                worst = worst.max(self.model.second_order_residual(t, a, da, d2a));
            }
        }
        Ok(worst)
    }
}

fn probe_values(k: usize) -> [(C64, C64); 2] {
    let s = 0.37 * k as f64;
    [
        (C64::new(1.0, 0.3 + s.sin()), C64::new(-0.4 + s.cos(), 0.8)),
        (C64::new(0.2, -1.1), C64::new(1.3, 0.5 * s.sin())),
    ]
}

/// One value of the closed form and its time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub a2: C64,
    pub da2: C64,
    pub d2a2: C64,
    pub tail: f64,
}

impl ClosedFormValue {
    /// `a₁ = i ȧ₂ e^{−iδ}/U`.
    pub fn a1(&self, model: &LorentzianModel, t: f64) -> Result<C64, TwoStateError> {
        let u = model.coupling(t);
        if u == 0.0 {
            return Err(TwoStateError::ZeroCoupling { t });
        }
        Ok(C64::new(0.0, 1.0) * self.da2 * C64::from_polar(1.0, -model.phase(t)) / u)
    }
}

/// `a₂(t) = z^{α₁}(z−1)^{α₂} u(z)` with `u` an expansion of the reduced
/// equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub reduction: TwoStateReduction,
    pub series: SeriesSolution,
}

impl ClosedForm {
    pub fn new(model: LorentzianModel, family: Family, n_terms: usize) -> Result<Self, TwoStateError> {
        let reduction = reduce_to_che(model);
        let series = expansions::build_series(&reduction.che, family, n_terms, None, None)?;
        Ok(Self { reduction, series })
    }

    pub fn eval(&self, t: f64) -> Result<ClosedFormValue, TwoStateError> {
        let v = expansions::eval_series(&self.series, z_of_t(t), SERIES_TOL)?;
        let (a2, da2, d2a2) = self.reduction.amplitude_from(t, v.value, v.derivative, v.second_derivative);
        if t == 0.0 {
            let jump = self.branch_jump()?;
            if jump > BRANCH_TOL * a2.norm().max(1.0) {
                warn!("closed form jumps by {jump:e} across t = 0");
            }
        }
        Ok(ClosedFormValue {
            a2,
            da2,
            d2a2,
            tail: v.tail,
        })
    }

    /// `|a₂(0⁺) − a₂(0⁻)|` approximated at `t = ±1e−9`.
    pub fn branch_jump(&self) -> Result<f64, TwoStateError> {
        let side = |t: f64| -> Result<C64, TwoStateError> {
            let v = expansions::eval_series(&self.series, z_of_t(t), SERIES_TOL)?;
            Ok(self.reduction.prefactor(z_of_t(t)) * v.value)
        };
        Ok((side(1e-9)? - side(-1e-9)?).norm())
    }
}

/// `a₂(t)` from the closed form.
pub fn closed_form_a2(model: LorentzianModel, t: f64, family: Family, n_terms: usize) -> Result<C64, TwoStateError> {
    Ok(ClosedForm::new(model, family, n_terms)?.eval(t)?.a2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectorySource {
    ClosedForm,
    RungeKutta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub a1: Vec<C64>,
    pub a2: Vec<C64>,
    pub source: TrajectorySource,
}

impl Trajectory {
    pub fn norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.a1.iter().zip(&self.a2).map(|(a, b)| a.norm_sqr() + b.norm_sqr())
    }

    /// `max_t | |a₁|²+|a₂|² − initial |`.
    pub fn norm_deviation(&self) -> f64 {
        let mut it = self.norms();
        let first = it.next().unwrap_or(0.0);
        it.fold(0.0, |m, n| m.max((n - first).abs()))
    }
}

fn rk4_run(
    coupling: &dyn Fn(f64) -> f64,
    phase: &dyn Fn(f64) -> f64,
    t_start: f64,
    t_end: f64,
    steps: usize,
    init: (C64, C64),
) -> Trajectory {
    let i = C64::new(0.0, 1.0);
    let rhs = |t: f64, y: (C64, C64)| {
        let u = coupling(t);
        let e = C64::from_polar(1.0, phase(t));
        (-i * u * e.conj() * y.1, -i * u * e * y.0)
    };
    let h = (t_end - t_start) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut a1 = Vec::with_capacity(steps + 1);
    let mut a2 = Vec::with_capacity(steps + 1);
    let mut y = init;
    times.push(t_start);
    a1.push(y.0);
    a2.push(y.1);
    for k in 0..steps {
        let t = t_start + k as f64 * h;
        let k1 = rhs(t, y);
        let k2 = rhs(t + 0.5 * h, (y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1));
        let k3 = rhs(t + 0.5 * h, (y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1));
        let k4 = rhs(t + h, (y.0 + h * k3.0, y.1 + h * k3.1));
        y = (
            y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        times.push(t_start + (k + 1) as f64 * h);
        a1.push(y.0);
        a2.push(y.1);
    }
    Trajectory {
        times,
        a1,
        a2,
        source: TrajectorySource::RungeKutta,
    }
}

/// Fixed-step RK4 for arbitrary coupling `U(t)` and phase `δ(t)`, with the
/// step-halving check on the endpoint.
pub fn integrate_system(
    coupling: impl Fn(f64) -> f64,
    phase: impl Fn(f64) -> f64,
    t_start: f64,
    t_end: f64,
    steps: usize,
    init: (C64, C64),
) -> Result<Trajectory, TwoStateError> {
    if steps < 100 {
        return Err(TwoStateError::InvalidSteps { steps });
    }
    let coarse = rk4_run(&coupling, &phase, t_start, t_end, steps, init);
    let fine = rk4_run(&coupling, &phase, t_start, t_end, 2 * steps, init);
    let end = |tr: &Trajectory| (tr.a1[tr.a1.len() - 1], tr.a2[tr.a2.len() - 1]);
    let (c, f) = (end(&coarse), end(&fine));
    let change = (c.0 - f.0).norm().max((c.1 - f.1).norm());
    if change > STEP_HALVING_TOL {
        return Err(TwoStateError::StepTooCoarse { change });
    }
    Ok(coarse)
}

/// RK4 trajectory of the Lorentzian model.
pub fn integrate_rk(model: LorentzianModel, t_start: f64, t_end: f64, steps: usize, init: (C64, C64)) -> Result<Trajectory, TwoStateError> {
    integrate_system(|t| model.coupling(t), |t| model.phase(t), t_start, t_end, steps, init)
}

/// Closed-form trajectory normalized to unit norm at `times[0]`.
pub fn closed_form_trajectory(form: &ClosedForm, times: &[f64]) -> Result<Trajectory, TwoStateError> {
    let model = form.reduction.model;
    let mut a1 = Vec::with_capacity(times.len());
    let mut a2 = Vec::with_capacity(times.len());
    for &t in times {
        let v = form.eval(t)?;
        a1.push(v.a1(&model, t)?);
        a2.push(v.a2);
    }
    let norm = (a1.first().map_or(0.0, |a| a.norm_sqr()) + a2.first().map_or(0.0, |a| a.norm_sqr())).sqrt();
    if norm > 0.0 {
        a1.iter_mut().chain(a2.iter_mut()).for_each(|a| *a /= norm);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        a1,
        a2,
        source: TrajectorySource::ClosedForm,
    })
}

/// Closed form and RK oracle started from the closed-form state at the
/// anchor time.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub closed: Trajectory,
    pub rk: Trajectory,
    /// `max_t |a₂ closed − a₂ RK|`.
    pub max_abs_diff: f64,
}

/// Integrates from the closed-form `(a₁, a₂)` at `t_start` (value and
/// derivative of `a₂` fix the state) and compares `a₂` over the window.
pub fn compare_with_rk(form: &ClosedForm, t_start: f64, t_end: f64, steps: usize) -> Result<OracleComparison, TwoStateError> {
    let model = form.reduction.model;
    let h = (t_end - t_start) / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| t_start + k as f64 * h).collect();
    let closed = closed_form_trajectory(form, &times)?;
    let rk = integrate_rk(model, t_start, t_end, steps, (closed.a1[0], closed.a2[0]))?;
    let max_abs_diff = closed.a2.iter().zip(&rk.a2).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    Ok(OracleComparison { closed, rk, max_abs_diff })
}

/// Distance from the model's `q` to the B3 `δ = −N` spectrum of the reduced
/// equation, relative to the spectrum scale.
pub fn return_spectrum_relation(model: LorentzianModel, n: usize) -> Result<f64, TwoStateError> {
    let red = reduce_to_che(model);
    let r = red.r.re;
    if (r - (n + 1) as f64).abs() > INTEGER_TOL {
        return Err(TwoStateError::ConditionNotMet { r, expected: n + 1 });
    }
    let params = red.che.with_q(C64::new(0.0, 0.0));
    let cond = TerminationCondition {
        family: Family::B3ThreeTerm,
        kind: TerminationKind::DeltaInt,
        n,
    };
    let violations = expansions::applicability(&params, Family::B3ThreeTerm);
    if !violations.is_empty() {
        return Err(ExpansionError::Inapplicable {
            family: Family::B3ThreeTerm,
            violations,
        }
        .into());
    }
    let sp = termination::q_spectrum(&params, Family::B3ThreeTerm, cond)?;
    let q = red.che.q;
    let dist = sp.roots.iter().fold(f64::INFINITY, |m, root| m.min((q - root).norm()));
    Ok(dist / sp.scale())
}

/// Smallest `|Δ₀|` kept in scans; `ε = −2Δ₀` must not vanish.
pub const MIN_DETUNING: f64 = 1e-6;

/// Scans `Δ₀` over `[lo, hi]` at fixed `(U₀, Δ₁)` and refines the best grid
/// point by golden-section search. Returns `(Δ₀, residual)`.
pub fn locate_delta0(u0: f64, delta1: f64, n: usize, lo: f64, hi: f64, points: usize) -> Result<(f64, f64), TwoStateError> {
    let f = |d0: f64| return_spectrum_relation(LorentzianModel::new(u0, d0, delta1), n);
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let mut best: Option<(usize, f64)> = None;
    let grid: Vec<f64> = (0..points).map(|k| lo + k as f64 * step).collect();
    for (k, &d0) in grid.iter().enumerate() {
        if d0.abs() < MIN_DETUNING {
            continue;
        }
        let r = f(d0)?;
        if best.is_none_or(|(_, b)| r < b) {
            best = Some((k, r));
        }
    }
    let (k, _) = best.ok_or(TwoStateError::EmptyScan)?;
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(points - 1)]);
    // Keep the bracket on one side of Δ₀ = 0.
    if grid[k] < 0.0 {
        b = b.min(-MIN_DETUNING);
    } else {
        a = a.max(MIN_DETUNING);
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * 1f64.max(a.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    let candidates = [(x1, f1), (x2, f2), (grid[k], f(grid[k])?)];
    Ok(candidates.into_iter().fold((x1, f1), |acc, c| if c.1 < acc.1 { c } else { acc }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_times() -> Vec<f64> {
        (0..20).map(|k| -3.0 + 6.0 * k as f64 / 19.0).collect()
    }

    #[test]
    fn printed_slots() {
        let red = reduce_to_che(LorentzianModel::new(2.0, 0.5, 1.0));
        assert_eq!(red.che.alpha, C64::new(0.0, 0.0));
        assert!((red.che.gamma + red.che.delta - 2.0).norm() < 1e-15);
        assert_eq!(red.exp_alpha2, -red.exp_alpha1);
    }

    #[test]
    fn reduction_solves_second_order_equation() {
        let model = LorentzianModel::new(2.0, 0.5, 1.0);
        assert!(reduce_to_che(model).verify(&sample_times()).unwrap() <= 1e-12);
        assert!(printed_reduction(model).verify(&sample_times()).unwrap() > 1e-3);
    }

    #[test]
    fn prefactor_is_continuous_at_zero() {
        let red = reduce_to_che(LorentzianModel::new(2.0, 0.5, 1.0));
        let jump = (red.prefactor(z_of_t(1e-12)) - red.prefactor(z_of_t(-1e-12))).norm();
        assert!(jump < 1e-10);
        let z = z_of_t(0.7);
        assert!((red.prefactor(z) - red.principal_prefactor(z)).norm() < 1e-14);
    }

    #[test]
    fn decoupled_system_stays_put() {
        let tr = integrate_rk(
            LorentzianModel::new(0.0, 0.5, 1.0),
            -5.0,
            5.0,
            1000,
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        )
        .unwrap();
        assert!(tr.a1.iter().all(|a| (a - 1.0).norm() == 0.0));
        assert!(tr.a2.iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn resonant_rabi_oscillation() {
        let (u, t0) = (0.8, -2.0);
        let tr = integrate_system(|_| u, |_| 0.0, t0, 3.0, 5000, (C64::new(1.0, 0.0), C64::new(0.0, 0.0))).unwrap();
        for (t, a2) in tr.times.iter().zip(&tr.a2) {
            assert!((a2.norm_sqr() - (u * (t - t0)).sin().powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_is_conserved() {
        let tr = integrate_rk(
            LorentzianModel::new(2.0, 0.5, 1.0),
            -5.0,
            5.0,
            DEFAULT_STEPS,
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        )
        .unwrap();
        assert!(tr.norm_deviation() <= 1e-10);
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let err = integrate_rk(
            LorentzianModel::new(20.0, 3.0, 1.0),
            -5.0,
            5.0,
            100,
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        );
        assert!(matches!(err, Err(TwoStateError::StepTooCoarse { .. })));
        assert!(matches!(
            integrate_rk(
                LorentzianModel::new(1.0, 0.0, 0.0),
                0.0,
                1.0,
                10,
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            ),
            Err(TwoStateError::InvalidSteps { steps: 10 })
        ));
    }

    #[test]
    fn condition_requires_natural_r() {
        assert!(matches!(
            return_spectrum_relation(LorentzianModel::new(1.3, 0.5, 0.2), 0),
            Err(TwoStateError::ConditionNotMet { .. })
        ));
    }

    fn r2_model() -> LorentzianModel {
        LorentzianModel::new(3f64.sqrt(), -2.0, 2.0)
    }

    #[test]
    fn r2_point_is_on_the_spectrum() {
        assert!(return_spectrum_relation(r2_model(), 1).unwrap() < 1e-12);
        let generic = return_spectrum_relation(LorentzianModel::new(3f64.sqrt(), -0.7, 2.0), 1).unwrap();
        assert!(generic > 1e-2);
        let (d0, res) = locate_delta0(3f64.sqrt(), 2.0, 1, -3.0, -0.5, 26).unwrap();
        assert!((d0 + 2.0).abs() < 1e-8 && res < 1e-8, "{d0} {res}");
    }

    #[test]
    fn r2_closed_form_matches_rk() {
        let form = ClosedForm::new(r2_model(), Family::B3ThreeTerm, 8).unwrap();
        assert_eq!(form.series.terminated, Some(1));
        let cmp = compare_with_rk(&form, -5.0, 5.0, DEFAULT_STEPS).unwrap();
        assert!(cmp.max_abs_diff <= 1e-6, "{}", cmp.max_abs_diff);
        assert!(cmp.rk.norm_deviation() <= 1e-10);
        for &t in &sample_times() {
            let v = form.eval(t).unwrap();
            assert!(r2_model().second_order_residual(t, v.a2, v.da2, v.d2a2) <= 1e-7);
        }
    }
}
