//! Existence verdicts, threshold searches, matching conditions and sweeps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grids, LineSymmetry};
use crate::params::Params;
use crate::scalar::{Cx, Real};
use crate::solver::{
    existence_slack, solve_ground_state, Initialization, Outcome, SolveConfig, SolveReport,
    Suppress,
};
use crate::special::{energy_exponent, soliton_energy};
use crate::state::HybridState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    CriterionMet,
    RunawayDetected,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceVerdict<T> {
    pub exists: bool,
    pub witness_energy: T,
    pub soliton_reference: T,
    /// `soliton_reference − witness_energy`.
    pub margin: T,
    pub mechanism: Mechanism,
}

/// Compares a solver witness with the soliton escape level.
pub fn existence_criterion<T: Real>(
    report: &SolveReport<T>,
    params: &Params<T>,
) -> Result<ExistenceVerdict<T>> {
    if report.params != *params {
        return Err(Error::Mismatch(format!(
            "report was computed for {:?}, verdict requested for {:?}",
            report.params, params
        )));
    }
    let reference = soliton_energy(params.p(), params.mu())?;
    let margin = reference - report.energy;
    let slack = existence_slack(report.tolerance, reference);
    let (exists, mechanism) = match report.outcome {
        Outcome::Converged if -margin <= slack => (true, Mechanism::CriterionMet),
        Outcome::RunawayLine => (false, Mechanism::RunawayDetected),
        _ => (false, Mechanism::Inconclusive),
    };
    Ok(ExistenceVerdict {
        exists,
        witness_energy: report.energy,
        soliton_reference: reference,
        margin,
        mechanism,
    })
}

/// Mass regime in which the plane level lies below the line level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassRegime {
    Small,
    Large,
    /// Equal exponents: the comparison does not depend on the mass scale.
    Neither,
}

/// Threshold value or the statement that the inequality holds on the whole bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold<T> {
    Value(T),
    AlwaysBelow,
}

impl<T: Real> std::fmt::Display for Threshold<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Value(v) => write!(f, "{v}"),
            Threshold::AlwaysBelow => f.write_str("none (always below)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdCondition<T> {
    /// Names the search that decides the condition.
    Requires(&'static str),
    Computed { threshold: Threshold<T>, holds: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryConditions<T> {
    /// `α ≤ 0`.
    pub line_non_repulsive: bool,
    /// `(p+2)/(6−p)`.
    pub line_exponent: T,
    /// `2/(4−r)`.
    pub plane_exponent: T,
    pub plane_favored: MassRegime,
    pub sigma_condition: ThresholdCondition<T>,
    pub beta_condition: ThresholdCondition<T>,
}

impl<T: Real> CorollaryConditions<T> {
    /// Whether any sufficient condition is known to hold.
    pub fn any_holds(&self) -> bool {
        let holds = |c: &ThresholdCondition<T>| matches!(c, ThresholdCondition::Computed { holds: true, .. });
        self.line_non_repulsive || holds(&self.sigma_condition) || holds(&self.beta_condition)
    }
}

pub fn corollary_conditions<T: Real>(params: &Params<T>) -> CorollaryConditions<T> {
    let line_exponent = energy_exponent(params.p());
    let plane_exponent = T::lit(2.0) / (T::lit(4.0) - params.r());
    let plane_favored = if plane_exponent > line_exponent {
        MassRegime::Large
    } else if plane_exponent < line_exponent {
        MassRegime::Small
    } else {
        MassRegime::Neither
    };
    CorollaryConditions {
        line_non_repulsive: params.alpha() <= T::zero(),
        line_exponent,
        plane_exponent,
        plane_favored,
        sigma_condition: ThresholdCondition::Requires("find_sigma_star"),
        beta_condition: ThresholdCondition::Requires("find_beta_star"),
    }
}

/// Fills in the threshold-based conditions from computed thresholds.
pub fn corollary_with_thresholds<T: Real>(
    params: &Params<T>,
    sigma_star: Option<Threshold<T>>,
    beta_star: Option<Threshold<T>>,
) -> CorollaryConditions<T> {
    let mut c = corollary_conditions(params);
    if let Some(t) = sigma_star {
        let holds = match t {
            Threshold::AlwaysBelow => true,
            Threshold::Value(s) => params.sigma() < s,
        };
        c.sigma_condition = ThresholdCondition::Computed { threshold: t, holds };
    }
    if let Some(t) = beta_star {
        let holds = match t {
            Threshold::AlwaysBelow => true,
            Threshold::Value(b) => params.beta() >= b,
        };
        c.beta_condition = ThresholdCondition::Computed { threshold: t, holds };
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Alpha,
    Sigma,
    Beta,
    Mu,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::Sigma => "sigma",
            Axis::Beta => "beta",
            Axis::Mu => "mu",
        }
    }

    pub fn apply<T: Real>(self, params: &Params<T>, value: T) -> Result<Params<T>> {
        match self {
            Axis::Alpha => params.with_alpha(value),
            Axis::Sigma => params.with_sigma(value),
            Axis::Beta => params.with_beta(value),
            Axis::Mu => params.with_mu(value),
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Axis::Alpha),
            "sigma" => Ok(Axis::Sigma),
            "beta" => Ok(Axis::Beta),
            "mu" => Ok(Axis::Mu),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep axis {s:?}; expected alpha, sigma, beta or mu"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub value: T,
    pub energy: T,
    pub outcome: Outcome,
    pub exists: bool,
    pub margin: T,
    pub residual: T,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<T> {
    pub axis: &'static str,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepTable<T> {
    pub fn new(axis: &'static str) -> Self {
        Self { axis, rows: Vec::new() }
    }

    pub fn values(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn energies(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// Inserts a row keeping the values strictly increasing; a repeated
    /// value replaces the earlier row.
    pub fn insert(&mut self, row: SweepRow<T>) {
        match self.rows.iter().position(|r| r.value >= row.value) {
            Some(i) if self.rows[i].value == row.value => self.rows[i] = row,
            Some(i) => self.rows.insert(i, row),
            None => self.rows.push(row),
        }
    }

    /// Largest increase of the energy between consecutive rows.
    pub fn max_increase(&self) -> T {
        self.rows
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(T::neg_infinity(), T::max)
    }

    /// Largest decrease of the energy between consecutive rows.
    pub fn max_decrease(&self) -> T {
        self.rows
            .windows(2)
            .map(|w| w[0].energy - w[1].energy)
            .fold(T::neg_infinity(), T::max)
    }
}

fn row_of<T: Real>(value: T, report: &SolveReport<T>) -> Result<SweepRow<T>> {
    let verdict = existence_criterion(report, &report.params)?;
    Ok(SweepRow {
        value,
        energy: report.energy,
        outcome: report.outcome,
        exists: verdict.exists,
        margin: verdict.margin,
        residual: report.grad_residual,
        iterations: report.iterations,
    })
}

/// How consecutive sweep points are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Each point starts from the previous minimizer.
    Continuation,
    /// Points are solved concurrently from the configured initialization.
    Independent,
}

/// Solves along `values` of one parameter axis.
pub fn sweep<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
    axis: Axis,
    values: &[T],
    mode: SweepMode,
) -> Result<SweepTable<T>> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter("a sweep needs at least 2 values".into()));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sweep values must be strictly increasing".into()));
    }
    let mut table = SweepTable::new(axis.name());
    match mode {
        SweepMode::Continuation => {
            let mut warm: Option<HybridState<T>> = None;
            for &v in values {
                let p = axis.apply(params, v)?;
                let report = solve_warm(&p, grids, config, warm.take())?;
                table.insert(row_of(v, &report)?);
                if axis != Axis::Mu {
                    warm = Some(report.state);
                }
            }
        }
        SweepMode::Independent => {
            let rows: Result<Vec<SweepRow<T>>> = values
                .par_iter()
                .map(|&v| {
                    let p = axis.apply(params, v)?;
                    row_of(v, &solve_ground_state(&p, grids, config)?)
                })
                .collect();
            for r in rows? {
                table.insert(r);
            }
        }
    }
    Ok(table)
}

fn solve_warm<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
    warm: Option<HybridState<T>>,
) -> Result<SolveReport<T>> {
    match warm {
        Some(s) => {
            let cfg = SolveConfig {
                init: Initialization::Explicit(s),
                ..config.clone()
            };
            solve_ground_state(params, grids, &cfg)
        }
        None => solve_ground_state(params, grids, config),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSearch<T> {
    pub threshold: Threshold<T>,
    /// Margin `ℰ − ℰ_{0,ℓ}(μ)` at the returned threshold; zero for
    /// [`Threshold::AlwaysBelow`].
    pub gap: T,
    /// Every solve performed by the search.
    pub table: SweepTable<T>,
}

const MAX_BISECTIONS: usize = 200;

/// Bisection on a monotone gap function whose sign marks the inequality.
///
/// `below(x)` is true when the tested level lies below the soliton level.
/// `holds_low` states on which side of the bracket the inequality holds.
fn bisect<T: Real, F>(
    lo: T,
    hi: T,
    tol: T,
    holds_low: bool,
    mut gap: F,
) -> Result<(Threshold<T>, T)>
where
    F: FnMut(T) -> Result<T>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Bracket(format!("bracket [{lo}, {hi}] must be finite and increasing")));
    }
    let g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    let (g_in, g_out, inside, outside) = if holds_low {
        (g_lo, g_hi, lo, hi)
    } else {
        (g_hi, g_lo, hi, lo)
    };
    if g_out < T::zero() {
        return Ok((Threshold::AlwaysBelow, T::zero()));
    }
    if g_in >= T::zero() {
        return Err(Error::Bracket(format!(
            "inequality fails at both ends ({inside}: gap {g_in}, {outside}: gap {g_out})"
        )));
    }
    let (mut a, mut b) = (inside, outside);
    let mut last = (b, g_out);
    for _ in 0..MAX_BISECTIONS {
        let mid = T::lit(0.5) * (a + b);
        let g = gap(mid)?;
        last = (mid, g);
        if g.abs() < tol || (b - a).abs() <= T::epsilon() * (a.abs() + b.abs()) {
            break;
        }
        if g < T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((Threshold::Value(last.0), last.1))
}

/// Plane-only minimum `ℰ_{σ,Π}(μ)`.
pub fn plane_level<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
) -> Result<SolveReport<T>> {
    let cfg = SolveConfig {
        suppress: Suppress::Line,
        ..config.clone()
    };
    solve_ground_state(params, grids, &cfg)
}

/// Threshold `σ*` below which the plane alone beats the soliton level.
pub fn find_sigma_star<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
    bracket: (T, T),
    tol: T,
) -> Result<ThresholdSearch<T>> {
    let reference = soliton_energy(params.p(), params.mu())?;
    let mut table = SweepTable::new("sigma");
    let (threshold, gap) = bisect(bracket.0, bracket.1, tol, true, |s| {
        let report = plane_level(&params.with_sigma(s)?, grids, config)?;
        table.insert(row_of(s, &report)?);
        Ok(report.energy - reference)
    })?;
    Ok(ThresholdSearch { threshold, gap, table })
}

/// Threshold `β*` above which the coupled minimum beats the soliton level.
pub fn find_beta_star<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
    bracket: (T, T),
    tol: T,
) -> Result<ThresholdSearch<T>> {
    let reference = soliton_energy(params.p(), params.mu())?;
    let mut table = SweepTable::new("beta");
    let (threshold, gap) = bisect(bracket.0, bracket.1, tol, false, |b| {
        let report = solve_ground_state(&params.with_beta(b)?, grids, config)?;
        table.insert(row_of(b, &report)?);
        Ok(report.energy - reference)
    })?;
    Ok(ThresholdSearch { threshold, gap, table })
}

/// Mass `μ*` at which the plane level crosses the soliton level.
///
/// The gap is `ℰ_{σ,Π}(μ) − ℰ_{0,ℓ}(μ)`; the side of the bracket on which the
/// plane wins follows from the exponent comparison.
pub fn find_mu_star<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
    bracket: (T, T),
    tol: T,
) -> Result<ThresholdSearch<T>> {
    if !(bracket.0 > T::zero()) {
        return Err(Error::Bracket("mass bracket must be positive".into()));
    }
    let regime = corollary_conditions(params).plane_favored;
    let holds_low = regime != MassRegime::Large;
    let mut table = SweepTable::new("mu");
    let (threshold, gap) = bisect(bracket.0, bracket.1, tol, holds_low, |m| {
        let report = plane_level(&params.with_mu(m)?, grids, config)?;
        table.insert(row_of(m, &report)?);
        Ok(report.energy - soliton_energy(params.p(), m)?)
    })?;
    Ok(ThresholdSearch { threshold, gap, table })
}

/// Residuals of the junction matching conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingResiduals<T> {
    /// `|u'(0+) − u'(0−) − (α u(0) − β q)|`.
    pub line_jump: T,
    /// `|φ(0) − (σ q − β u(0))|` with the fixed-scale regular part.
    pub plane_fixed: T,
    /// Same with the `|q|`-scaled regular part; `None` when `q = 0`.
    pub plane_scaled: Option<T>,
    /// Extrapolated `φ(0)`.
    pub phi_at_origin: Cx<T>,
}

impl<T: Real> MatchingResiduals<T> {
    /// Which form of the regular part satisfies the plane condition better.
    pub fn fixed_scale_preferred(&self) -> bool {
        self.plane_scaled.is_none_or(|s| self.plane_fixed <= s)
    }
}

/// Lagrange extrapolation to zero through three samples.
fn extrapolate_to_origin<T: Real>(x: [T; 3], y: [Cx<T>; 3]) -> Cx<T> {
    let mut out = Cx::default();
    for i in 0..3 {
        let mut l = T::one();
        for j in 0..3 {
            if i != j {
                l *= x[j] / (x[j] - x[i]);
            }
        }
        out += y[i] * l;
    }
    out
}

pub fn verify_matching<T: Real>(
    state: &HybridState<T>,
    params: &Params<T>,
    grids: &Grids<T>,
) -> Result<MatchingResiduals<T>> {
    state.check(grids)?;
    let line = &grids.line;
    if line.n_half() < 3 || grids.radial.len() < 3 {
        return Err(Error::Domain("matching needs at least three samples per component".into()));
    }
    let h = line.spacing();
    let j = line.junction();
    let u = &state.u;
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let right = (u[j] * (-three) + u[j + 1] * four - u[j + 2]) / (T::lit(2.0) * h);
    let jump = match line.symmetry() {
        LineSymmetry::Even => right * T::lit(2.0),
        LineSymmetry::Full => {
            let left = (u[j] * three - u[j - 1] * four + u[j - 2]) / (T::lit(2.0) * h);
            right - left
        }
    };
    let u0 = u[j];
    let q = state.q;
    let line_jump = (jump - (u0 * params.alpha() - q * params.beta())).norm();

    let nodes = grids.radial.nodes();
    let x = [nodes[0], nodes[1], nodes[2]];
    let target = q * params.sigma() - u0 * params.beta();
    let phi0 = extrapolate_to_origin(x, [state.phi[0], state.phi[1], state.phi[2]]);
    let plane_fixed = (phi0 - target).norm();
    let plane_scaled = (q.norm() > T::zero()).then(|| {
        // φ_q(0) = φ(0) + (q/2π) log|q|
        let phi_q0 = phi0 + q * (q.norm().ln() / (T::lit(2.0) * T::PI()));
        (phi_q0 - target).norm()
    });
    Ok(MatchingResiduals {
        line_jump,
        plane_fixed,
        plane_scaled,
        phi_at_origin: phi0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingAudit<T> {
    pub p: T,
    /// `(p+2)/(6−p)`.
    pub exponent: T,
    /// `θ_p` fitted from the first mass.
    pub theta: T,
    pub masses: Vec<T>,
    pub energies: Vec<T>,
    pub max_relative_deviation: T,
}

impl<T: Real> ScalingAudit<T> {
    /// `energies[i] / energies[0]`.
    pub fn ratios(&self) -> Vec<T> {
        self.energies.iter().map(|&e| e / self.energies[0]).collect()
    }
}

/// Line-only ground energies against `−θ_p μ^{(p+2)/(6−p)}`.
pub fn scaling_audit<T: Real>(
    p: T,
    masses: &[T],
    grids: &Grids<T>,
    config: &SolveConfig<T>,
) -> Result<ScalingAudit<T>> {
    if masses.is_empty() || masses.iter().any(|&m| !(m > T::zero())) {
        return Err(Error::InvalidParameter("scaling audit needs positive masses".into()));
    }
    let cfg = SolveConfig {
        suppress: Suppress::Plane,
        ..config.clone()
    };
    let exponent = energy_exponent(p);
    let energies: Result<Vec<T>> = masses
        .par_iter()
        .map(|&m| {
            let params = Params::new(T::zero(), T::zero(), T::zero(), p, T::lit(3.0), m)?;
            Ok(solve_ground_state(&params, grids, &cfg)?.energy)
        })
        .collect();
    let energies = energies?;
    let theta = -energies[0] / masses[0].powf(exponent);
    let max_relative_deviation = masses
        .iter()
        .zip(&energies)
        .map(|(&m, &e)| {
            let law = -theta * m.powf(exponent);
            ((e - law) / law).abs()
        })
        .fold(T::zero(), T::max);
    Ok(ScalingAudit {
        p,
        exponent,
        theta,
        masses: masses.to_vec(),
        energies,
        max_relative_deviation,
    })
}
