//! Mass-constrained minimization by preconditioned normalized gradient flow.

use crate::energy::{EnergyBreakdown, Functional};
use crate::error::{Error, Result};
use crate::grid::{Grids, LineGrid, RadialGrid};
use crate::linalg::Tridiagonal;
use crate::params::Params;
use crate::scalar::{cx, Cx, Real};
use crate::special::{soliton_energy, soliton_profile};
use crate::state::{line_mass, mass, normalize, plane_mass, HybridState};

/// Starting point of the flow.
#[derive(Debug, Clone, PartialEq)]
pub enum Initialization<T> {
    /// Gaussian bumps on both components plus a small charge seed.
    GaussianBump,
    /// Minimizer of the quadratic part at the same mass.
    LinearGroundState,
    /// Closed-form line soliton, plane empty.
    SolitonSeed,
    Explicit(HybridState<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonlinearity {
    Full,
    LinearOnly,
}

/// Component held at zero throughout the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suppress {
    None,
    Plane,
    Line,
}

/// Signature of translation along the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunawayThresholds<T> {
    /// Fraction of the line mass in the outer quarter of the grid.
    pub boundary_fraction: T,
    /// Centroid `∫|x||u|²/∫|u|²` as a fraction of the half-length.
    pub centroid_fraction: T,
    /// Consecutive iterations the signature must persist.
    pub patience: usize,
    /// Admissible energy excess over the soliton level, relative to it.
    pub energy_above: T,
    /// Admissible energy deficit below the soliton level, relative to it.
    /// Covers the discretization error of the soliton itself.
    pub energy_below: T,
}

impl<T: Real> Default for RunawayThresholds<T> {
    fn default() -> Self {
        Self {
            boundary_fraction: T::lit(0.5),
            centroid_fraction: T::lit(0.1),
            patience: 50,
            energy_above: T::lit(1e-5),
            energy_below: T::lit(1e-4),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig<T> {
    pub max_iterations: usize,
    pub initial_step: T,
    /// Step reduction factor of the backtracking search, in `(0, 1)`.
    pub backtracking: T,
    /// Bound on the relative projected-gradient residual.
    pub tolerance: T,
    /// Relative energy change below which a non-converging flow is stopped.
    pub energy_tolerance: T,
    pub runaway: RunawayThresholds<T>,
    pub init: Initialization<T>,
    pub nonlinearity: Nonlinearity,
    pub suppress: Suppress,
    /// Shift of the initial line profile away from the junction.
    pub seed_offset: T,
    /// Polak–Ribière acceleration of the preconditioned gradient.
    pub conjugate: bool,
    /// Keep one record per accepted step.
    pub record_history: bool,
    /// After convergence, continue the line ends by tails decaying like
    /// `e^{−√ω|x|}` and solve again; ignored if the grid already has a tail.
    pub adapt_exterior: bool,
}

impl<T: Real> Default for SolveConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            initial_step: T::one(),
            backtracking: T::lit(0.5),
            tolerance: T::lit(1e-6),
            energy_tolerance: T::lit(1e-15),
            runaway: RunawayThresholds::default(),
            init: Initialization::GaussianBump,
            nonlinearity: Nonlinearity::Full,
            suppress: Suppress::None,
            seed_offset: T::zero(),
            conjugate: true,
            record_history: true,
            adapt_exterior: true,
        }
    }
}

impl<T: Real> SolveConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let unit = |x: T| x > T::zero() && x < T::one();
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.initial_step > T::zero()) || !self.initial_step.is_finite() {
            return bad(format!("initial step must be positive (got {})", self.initial_step));
        }
        if !unit(self.backtracking) {
            return bad(format!("backtracking factor must lie in (0, 1) (got {})", self.backtracking));
        }
        if !(self.tolerance > T::zero()) || !(self.energy_tolerance > T::zero()) {
            return bad("tolerances must be positive".into());
        }
        let r = &self.runaway;
        if !unit(r.boundary_fraction) || !unit(r.centroid_fraction) {
            return bad(format!(
                "runaway thresholds must lie in (0, 1) (got boundary {}, centroid {})",
                r.boundary_fraction, r.centroid_fraction
            ));
        }
        if r.patience == 0 || !(r.energy_above >= T::zero()) || !(r.energy_below >= T::zero()) {
            return bad("runaway patience must be positive and energy bands nonnegative".into());
        }
        if !self.seed_offset.is_finite() {
            return bad("seed offset must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRecord<T> {
    pub energy: T,
    /// Mass of the trial state before renormalization.
    pub mass: T,
    /// Mass of the accepted state.
    pub normalized_mass: T,
    pub residual: T,
    /// `∫|x||u|²/∫|u|²`.
    pub centroid: T,
    pub boundary_fraction: T,
    pub charge: T,
    /// First record after the exterior tails were changed.
    pub restart: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowHistory<T> {
    pub records: Vec<FlowRecord<T>>,
    /// Energy of the line soliton carrying the whole mass.
    pub soliton_reference: T,
    pub half_length: T,
}

impl<T: Real> FlowHistory<T> {
    /// Largest energy increase between consecutive records of one pass.
    pub fn max_energy_increase(&self) -> T {
        self.records
            .windows(2)
            .filter(|w| !w[1].restart)
            .map(|w| w[1].energy - w[0].energy)
            .fold(T::neg_infinity(), T::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    RunawayLine,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveFlag {
    /// The quadratic form is nonnegative on the mass sphere.
    NoNegativeLinearLevel,
    /// The mass is so small that the linear problem dominates.
    TinyMass,
    /// The line profile is not negligible at the grid boundary.
    BoundaryNotDecayed,
    /// The line search could not decrease the energy any further.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub state: HybridState<T>,
    pub energy: T,
    pub breakdown: EnergyBreakdown<T>,
    pub omega: T,
    pub grad_residual: T,
    pub iterations: usize,
    pub outcome: Outcome,
    pub soliton_reference: T,
    pub exists_flag: bool,
    pub history: FlowHistory<T>,
    pub flags: Vec<SolveFlag>,
    pub tolerance: T,
    pub params: Params<T>,
    /// Decay rate of the line tails the final state was computed with.
    pub exterior_rate: T,
}

impl<T: Real> SolveReport<T> {
    /// `base` with the line tails of the final pass.
    pub fn grids(&self, base: &Grids<T>) -> Grids<T> {
        if base.line.exterior_rate() == self.exterior_rate {
            return base.clone();
        }
        let line = base
            .line
            .clone()
            .with_exterior_rate(self.exterior_rate)
            .expect("rate validated by the solver");
        Grids::new(line, base.radial.clone())
    }

    pub fn line_mass(&self, grids: &Grids<T>) -> T {
        line_mass(&self.state, &self.grids(grids))
    }

    pub fn plane_mass(&self, grids: &Grids<T>) -> T {
        plane_mass(&self.state, grids)
    }
}

/// Slack of the non-strict comparison with the soliton level.
pub(crate) fn existence_slack<T: Real>(tolerance: T, reference: T) -> T {
    tolerance * (T::one() + reference.abs())
}

/// Shifted `H¹`-type preconditioner `K + s·M` with the exact mass coupling
/// between `φ` and `q`, solved through the Schur complement in `q`.
struct Preconditioner<T> {
    shift: T,
    line: Tridiagonal<T>,
    plane: Tridiagonal<T>,
    /// `T⁻¹ (s·b)` with `b` the `φ`–`q` mass coupling.
    border: Vec<T>,
    coupling: Vec<T>,
    schur: T,
}

impl<T: Real> Preconditioner<T> {
    fn new(params: &Params<T>, grids: &Grids<T>, flux: &[T], shift: T) -> Self {
        let rg = &grids.radial;
        let tp = T::lit(2.0) * T::PI();
        let per = rg.sub_per_cell();
        let mut coupling = vec![T::zero(); rg.len()];
        let mut mqq = T::zero();
        for (i, (&w, &g)) in rg.sub_weights().iter().zip(rg.green()).enumerate() {
            coupling[i / per] += tp * w * g;
            mqq += tp * w * g * g;
        }
        let plane = plane_operator(rg, flux, shift);
        let rhs: Vec<_> = coupling.iter().map(|&b| cx(shift * b)).collect();
        let border: Vec<T> = plane.solve(&rhs).iter().map(|z| z.re).collect();
        let bty: T = coupling.iter().zip(&border).map(|(&b, &y)| b * y).sum();
        let diag_q = shift * mqq + params.sigma().abs() + params.beta();
        Self {
            shift,
            line: line_operator(&grids.line, params.alpha(), shift),
            plane,
            border,
            schur: diag_q - shift * bty,
            coupling,
        }
    }

    fn apply(&self, g: &HybridState<T>) -> HybridState<T> {
        let x = self.plane.solve(&g.phi);
        let bx = x
            .iter()
            .zip(&self.coupling)
            .fold(Cx::default(), |acc: Cx<T>, (z, &b)| acc + z * b);
        let q = (g.q - bx * self.shift) / self.schur;
        HybridState {
            u: self.line.solve(&g.u),
            phi: x.iter().zip(&self.border).map(|(z, &y)| z - q * y).collect(),
            q,
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn line_operator<T: Real>(grid: &LineGrid<T>, alpha: T, shift: T) -> Tridiagonal<T> {
    let n = grid.len();
    let c = grid.edge_multiplicity() / grid.spacing();
    let mut diag: Vec<T> = grid.weights().iter().map(|&w| shift * w).collect();
    for i in 0..n {
        if i > 0 {
            diag[i] += c;
        }
        if i + 1 < n {
            diag[i] += c;
        }
    }
    diag[grid.junction()] += alpha.max(T::zero());
    for (i, f) in grid.ends() {
        diag[i] += T::lit(0.5) * f * grid.exterior_rate();
    }
    Tridiagonal::factor(&diag, &vec![-c; n.saturating_sub(1)])
}

fn plane_operator<T: Real>(grid: &RadialGrid<T>, flux: &[T], shift: T) -> Tridiagonal<T> {
    let tp = T::lit(2.0) * T::PI();
    let m = grid.len();
    let mut diag: Vec<T> = (0..m).map(|j| shift * tp * grid.cell_moment(j)).collect();
    for (k, &f) in flux.iter().enumerate() {
        diag[k] += f;
        diag[k + 1] += f;
    }
    let off: Vec<T> = flux.iter().map(|&f| -f).collect();
    Tridiagonal::factor(&diag, &off)
}

fn mask<T: Real>(s: &mut HybridState<T>, suppress: Suppress) {
    let zero = Default::default();
    match suppress {
        Suppress::None => {}
        Suppress::Plane => {
            s.phi.iter_mut().for_each(|z| *z = zero);
            s.q = zero;
        }
        Suppress::Line => s.u.iter_mut().for_each(|z| *z = zero),
    }
}

/// Line diagnostics `(∫|x||u|²/∫|u|², outer-quarter fraction)`; zeros for an
/// empty line.
pub fn line_diagnostics<T: Real>(s: &HybridState<T>, grid: &LineGrid<T>) -> (T, T) {
    let (mut m, mut first, mut outer) = (T::zero(), T::zero(), T::zero());
    for (i, (z, &w)) in s.u.iter().zip(grid.weights()).enumerate() {
        let d = w * z.norm_sqr();
        m += d;
        first += d * grid.coordinate(i).abs();
        if grid.is_outer_quarter(i) {
            outer += d;
        }
    }
    if m > T::zero() {
        (first / m, outer / m)
    } else {
        (T::zero(), T::zero())
    }
}

fn runaway_signature<T: Real>(
    rec: &FlowRecord<T>,
    reference: T,
    half_length: T,
    th: &RunawayThresholds<T>,
) -> bool {
    let moved = rec.boundary_fraction > th.boundary_fraction
        || rec.centroid > th.centroid_fraction * half_length;
    let scale = reference.abs();
    let near = rec.energy >= reference - th.energy_below * scale
        && rec.energy <= reference + th.energy_above * scale;
    moved && near
}

/// Whether the last `patience` records show the line profile escaping
/// along the line at the soliton level.
pub fn detect_runaway<T: Real>(history: &FlowHistory<T>, config: &SolveConfig<T>) -> bool {
    let th = &config.runaway;
    let n = history.records.len();
    if n < th.patience {
        return false;
    }
    history.records[n - th.patience..].iter().all(|r| {
        runaway_signature(r, history.soliton_reference, history.half_length, th)
    })
}

fn gaussian_bump<T: Real>(grids: &Grids<T>, mu: T, offset: T) -> HybridState<T> {
    let half = T::lit(0.5);
    let width = T::lit(2.0);
    let u: Vec<T> = (0..grids.line.len())
        .map(|i| {
            let y = (grids.line.coordinate(i) - offset) / width;
            (-half * y * y).exp()
        })
        .collect();
    let phi: Vec<T> = grids
        .radial
        .nodes()
        .iter()
        .map(|&r| {
            let y = r / width;
            (-half * y * y).exp()
        })
        .collect();
    let line = HybridState::from_real(&u, &vec![T::zero(); phi.len()], T::zero());
    let plane = HybridState::from_real(&vec![T::zero(); u.len()], &phi, T::zero());
    let half_mu = half * mu;
    let a = (half_mu / mass(&line, grids).expect("sized")).sqrt();
    let b = (half_mu / mass(&plane, grids).expect("sized")).sqrt();
    let mut s = line.scaled(a).add_scaled(b, &plane);
    s.q = cx(T::lit(0.1) * mu.sqrt());
    s
}

fn soliton_seed<T: Real>(params: &Params<T>, grids: &Grids<T>, offset: T) -> Result<HybridState<T>> {
    let sol = soliton_profile(params.p(), params.mu())?;
    let u: Vec<T> = (0..grids.line.len())
        .map(|i| sol.eval(grids.line.coordinate(i) - offset))
        .collect();
    Ok(HybridState::from_real(
        &u,
        &vec![T::zero(); grids.radial.len()],
        T::zero(),
    ))
}

fn initial_state<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
) -> Result<HybridState<T>> {
    let mut s = match &config.init {
        Initialization::GaussianBump => gaussian_bump(grids, params.mu(), config.seed_offset),
        Initialization::SolitonSeed => soliton_seed(params, grids, config.seed_offset)?,
        Initialization::LinearGroundState => {
            let inner = SolveConfig {
                init: Initialization::GaussianBump,
                record_history: false,
                ..config.clone()
            };
            solve_linear(params, grids, &inner)?.state
        }
        Initialization::Explicit(s) => {
            s.check(grids)?;
            s.clone()
        }
    };
    mask(&mut s, config.suppress);
    normalize(&s, params.mu(), grids)
}

/// Chemical potential and relative residual of `∇E + ω∇(M/2)`.
fn stationarity<T: Real>(
    f: &Functional<'_, T>,
    s: &HybridState<T>,
    g: &HybridState<T>,
    m: &HybridState<T>,
    suppress: Suppress,
) -> (T, T) {
    let mu = s.coord_dot(m);
    let omega = -s.coord_dot(g) / mu;
    let mut r = g.add_scaled(omega, m);
    mask(&mut r, suppress);
    (omega, f.dual_norm(&r) / mu.sqrt())
}

/// Minimizes the energy on the mass sphere.
pub fn solve_ground_state<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
) -> Result<SolveReport<T>> {
    config.validate()?;
    let start = initial_state(params, grids, config)?;
    let mut report = flow_on(params, grids, config, start)?;
    if !config.adapt_exterior || grids.line.exterior_rate() > T::zero() {
        return Ok(report);
    }
    for _ in 0..3 {
        if report.outcome != Outcome::Converged
            || config.suppress == Suppress::Line
            || !(report.omega > T::zero())
        {
            break;
        }
        let rate = report.omega.sqrt();
        let old = report.exterior_rate;
        if old > T::zero() && ((rate - old) / old).abs() < T::lit(1e-3) {
            break;
        }
        let tailed = report.grids(grids);
        let tailed = Grids::new(tailed.line.with_exterior_rate(rate)?, tailed.radial);
        let start = normalize(&report.state, params.mu(), &tailed)?;
        let mut next = flow_on(params, &tailed, config, start)?;
        if let Some(first) = next.history.records.first_mut() {
            first.restart = true;
        }
        let mut records = std::mem::take(&mut report.history.records);
        records.append(&mut next.history.records);
        next.history.records = records;
        next.iterations += report.iterations;
        report = next;
    }
    Ok(report)
}

fn flow_on<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
    start: HybridState<T>,
) -> Result<SolveReport<T>> {
    let mut f = Functional::new(params, grids);
    if config.nonlinearity == Nonlinearity::LinearOnly {
        f = f.linear();
    }
    run_flow(&f, start, config)
}

/// Minimizes the quadratic part of the energy on the mass sphere.
pub fn solve_linear<T: Real>(
    params: &Params<T>,
    grids: &Grids<T>,
    config: &SolveConfig<T>,
) -> Result<SolveReport<T>> {
    let config = SolveConfig {
        nonlinearity: Nonlinearity::LinearOnly,
        init: match config.init {
            Initialization::LinearGroundState => Initialization::GaussianBump,
            ref other => other.clone(),
        },
        ..config.clone()
    };
    let mut report = solve_ground_state(params, grids, &config)?;
    if report.energy >= T::zero() {
        report.flags.push(SolveFlag::NoNegativeLinearLevel);
    }
    Ok(report)
}

/// Previous projected gradient, preconditioned gradient, their product and direction.
type CgMemory<T> = (HybridState<T>, HybridState<T>, T, HybridState<T>);

fn run_flow<T: Real>(
    f: &Functional<'_, T>,
    start: HybridState<T>,
    config: &SolveConfig<T>,
) -> Result<SolveReport<T>> {
    let params = f.params;
    let grids = f.grids;
    let mu = params.mu();
    let reference = soliton_energy(params.p(), mu)?;
    let mut pre = Preconditioner::new(&params, grids, f.flux(), T::one());
    let runaway_possible = f.is_nonlinear()
        && params.alpha() > T::zero()
        && config.suppress != Suppress::Line;
    let mut history = FlowHistory {
        records: Vec::new(),
        soliton_reference: reference,
        half_length: grids.line.half_length(),
    };
    let mut streak = 0usize;

    let mut s = start;
    let mut energy = f.energy(&s);
    if !energy.is_finite() {
        return Err(Error::NonFinite {
            iteration: 0,
            detail: "initial state".into(),
        });
    }
    let mut step = config.initial_step;
    let max_step = config.initial_step * T::lit(1e4);
    let min_step = config.initial_step * T::lit(1e-14);
    let growth = T::one() / config.backtracking.sqrt();
    let slack = T::lit(1e-12);
    let mut prev: Option<CgMemory<T>> = None;
    let mut outcome = Outcome::MaxIterations;
    let mut stalled = false;
    let mut iterations = 0;
    let mut calm = 0usize;
    let (mut omega, mut residual);

    loop {
        let g = f.coord_gradient(&s);
        let m = f.mass_coord_gradient(&s);
        (omega, residual) = stationarity(f, &s, &g, &m, config.suppress);
        if residual < config.tolerance {
            outcome = Outcome::Converged;
            break;
        }
        let shift = omega.max(T::one());
        if (shift / pre.shift).ln().abs() > T::lit(0.1) {
            pre = Preconditioner::new(&params, grids, f.flux(), shift);
            prev = None;
        }
        if iterations >= config.max_iterations || stalled {
            break;
        }
        iterations += 1;

        // tangent projection in the preconditioned metric
        let mut pg = pre.apply(&g);
        let mut pm = pre.apply(&m);
        mask(&mut pg, config.suppress);
        mask(&mut pm, config.suppress);
        let lambda = m.coord_dot(&pg) / m.coord_dot(&pm);
        let r = g.add_scaled(-lambda, &m);
        let z = pg.add_scaled(-lambda, &pm);
        let rz = r.coord_dot(&z);
        let mut dir = z.scaled(-T::one());
        if let (true, Some((_, z_old, rz_old, d_old))) = (config.conjugate, &prev) {
            let b = ((rz - r.coord_dot(z_old)) / *rz_old).max(T::zero());
            let cand = dir.add_scaled(b, d_old);
            // keep the direction tangent and downhill
            let t = m.coord_dot(&cand) / m.coord_dot(&pm);
            let cand = cand.add_scaled(-t, &pm);
            if g.coord_dot(&cand) < T::zero() {
                dir = cand;
            }
        }

        let mut t = step;
        let mut accepted = None;
        let ulp = T::lit(8.0) * T::epsilon() * energy.abs();
        while t >= min_step {
            let trial = s.add_scaled(t, &dir);
            let trial_mass = mass(&trial, grids)?;
            let next = normalize(&trial, mu, grids)?;
            let e = f.energy(&next);
            if !e.is_finite() {
                return Err(Error::NonFinite {
                    iteration: iterations,
                    detail: format!("trial step {t}"),
                });
            }
            if e < energy - ulp {
                accepted = Some((next, e, trial_mass));
                break;
            }
            t *= config.backtracking;
        }
        if accepted.is_none() {
            // energy differences are at rounding level here: fall back to
            // residual decrease within the descent slack
            let bound = energy + slack * energy.abs().max(T::one());
            let mut t_fine = step;
            while t_fine >= min_step && accepted.is_none() {
                let trial = s.add_scaled(t_fine, &dir);
                let trial_mass = mass(&trial, grids)?;
                let next = normalize(&trial, mu, grids)?;
                let e = f.energy(&next);
                if e <= bound {
                    let (_, res) = stationarity(
                        f,
                        &next,
                        &f.coord_gradient(&next),
                        &f.mass_coord_gradient(&next),
                        config.suppress,
                    );
                    if res < residual {
                        accepted = Some((next, e, trial_mass));
                        t = t_fine;
                    }
                }
                t_fine *= config.backtracking;
            }
        }
        let Some((next, e, trial_mass)) = accepted else {
            if prev.is_some() {
                // retry once along the plain preconditioned gradient
                prev = None;
                iterations -= 1;
                step = config.initial_step;
                continue;
            }
            stalled = true;
            continue;
        };

        let change = (energy - e).abs() / energy.abs().max(T::lit(1e-300));
        calm = if change < config.energy_tolerance { calm + 1 } else { 0 };
        if calm >= 100 {
            stalled = true;
        }
        step = (t * growth).min(max_step);
        s = next;
        energy = e;
        prev = Some((r, z, rz, dir));

        let (centroid, boundary_fraction) = line_diagnostics(&s, &grids.line);
        let rec = FlowRecord {
            energy,
            mass: trial_mass,
            normalized_mass: mass(&s, grids)?,
            residual,
            centroid,
            boundary_fraction,
            charge: s.q.norm(),
            restart: false,
        };
        if runaway_possible
            && runaway_signature(&rec, reference, history.half_length, &config.runaway)
        {
            streak += 1;
        } else {
            streak = 0;
        }
        if config.record_history {
            history.records.push(rec);
        }
        if runaway_possible && streak >= config.runaway.patience {
            outcome = Outcome::RunawayLine;
            break;
        }
    }

    // a stationary point sitting away from the junction at the soliton level
    // is the discrete remnant of an escaping sequence
    if outcome != Outcome::RunawayLine && runaway_possible {
        let (centroid, boundary_fraction) = line_diagnostics(&s, &grids.line);
        let rec = FlowRecord {
            energy,
            mass: mu,
            normalized_mass: mu,
            residual,
            centroid,
            boundary_fraction,
            charge: s.q.norm(),
            restart: false,
        };
        if runaway_signature(&rec, reference, history.half_length, &config.runaway) {
            outcome = Outcome::RunawayLine;
        }
    }

    let mut flags = Vec::new();
    if stalled && outcome == Outcome::MaxIterations {
        flags.push(SolveFlag::Stalled);
    }
    if mu < T::lit(1e-3) {
        flags.push(SolveFlag::TinyMass);
    }
    let peak = s.u.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let edge = grids
        .line
        .ends()
        .into_iter()
        .map(|(i, _)| s.u[i].norm())
        .fold(T::zero(), T::max);
    if edge > T::lit(1e-8) * peak {
        flags.push(SolveFlag::BoundaryNotDecayed);
    }
    let exists_flag = outcome == Outcome::Converged
        && energy <= reference + existence_slack(config.tolerance, reference);
    Ok(SolveReport {
        breakdown: f.breakdown(&s),
        state: s,
        energy,
        omega,
        grad_residual: residual,
        iterations,
        outcome,
        soliton_reference: reference,
        exists_flag,
        history,
        flags,
        tolerance: config.tolerance,
        params,
        exterior_rate: grids.line.exterior_rate(),
    })
}
