//! The hybrid energy, its two plane forms, first variation and
//! Gagliardo–Nirenberg quotients.
//!
//! Line: `½‖u'‖² + (α/2)|u(0)|² − (1/p)‖u‖_p^p` with forward differences and
//! trapezoid weights. Plane: `½‖φ‖²_{H¹} − ½‖v‖² + (σ/2)|q|² − (1/r)‖v‖_r^r`
//! with `φ` constant on each radial cell, the `K₀` part kept exact inside the
//! cell and the gradient term in conservative flux form. Junction:
//! `−β Re(q̄ u(0))`. The gradient below is the exact gradient of this
//! discrete energy.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Grids, LineGrid, RadialGrid};
use crate::params::Params;
use crate::scalar::{Cx, Real};
use crate::special::k0_unchecked;
use crate::state::HybridState;

/// Itemized energy terms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown<T> {
    pub kin_line: T,
    pub delta_line: T,
    pub nl_line: T,
    pub h1_plane: T,
    pub l2_plane: T,
    pub charge_term: T,
    pub nl_plane: T,
    pub junction: T,
    pub total: T,
}

impl<T: Real> EnergyBreakdown<T> {
    fn summed(mut self) -> Self {
        self.total = self.line() + self.plane() + self.junction;
        self
    }

    pub fn line(&self) -> T {
        self.kin_line + self.delta_line + self.nl_line
    }

    pub fn plane(&self) -> T {
        self.h1_plane + self.l2_plane + self.charge_term + self.nl_plane
    }

    /// Part of the energy that is quadratic in the state.
    pub fn quadratic(&self) -> T {
        self.total - self.nl_line - self.nl_plane
    }
}

/// Plane component written with the `|q|`-scaled singular part:
/// `v = φ_q + q K₀(|q|ρ)/(2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDecomposition<T> {
    pub phi_q: Vec<Cx<T>>,
    pub q: Cx<T>,
}

fn two_pi<T: Real>() -> T {
    T::lit(2.0) * T::PI()
}

fn line_kinetic<T: Real>(u: &[Cx<T>], grid: &LineGrid<T>) -> T {
    let s: T = u.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum();
    let tails: T = grid
        .ends()
        .into_iter()
        .map(|(i, f)| f * u[i].norm_sqr())
        .sum();
    T::lit(0.5) * grid.edge_multiplicity() * s / grid.spacing()
        + T::lit(0.25) * grid.exterior_rate() * tails
}

fn power_integral<T: Real>(values: &[Cx<T>], weights: &[T], power: T) -> T {
    values
        .iter()
        .zip(weights)
        .map(|(z, &w)| w * z.norm().powf(power))
        .sum()
}

/// Line energy `½‖u'‖² + (α/2)|u(0)|² − (1/p)‖u‖_p^p` over the whole line.
pub fn line_energy<T: Real>(u: &[Cx<T>], alpha: T, p: T, grid: &LineGrid<T>) -> Result<T> {
    check_len("line component", u.len(), grid.len())?;
    let kin = line_kinetic(u, grid);
    let delta = T::lit(0.5) * alpha * u[grid.junction()].norm_sqr();
    let nl = -power_integral(u, &grid.power_weights(p), p) / p;
    Ok(kin + delta + nl)
}

fn check_len(what: &'static str, got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, got, expected })
    }
}

fn radial_gradient_sq<T: Real>(phi: &[Cx<T>], flux: &[T]) -> T {
    phi.windows(2)
        .zip(flux)
        .map(|(w, &a)| a * (w[1] - w[0]).norm_sqr())
        .sum()
}

fn radial_l2_sq<T: Real>(phi: &[Cx<T>], grid: &RadialGrid<T>) -> T {
    let s: T = phi
        .iter()
        .enumerate()
        .map(|(j, z)| grid.cell_moment(j) * z.norm_sqr())
        .sum();
    two_pi::<T>() * s
}

/// `v` at the sub-points for a cellwise `φ` and a singular part `q·green`.
fn sub_values<T: Real>(phi: &[Cx<T>], q: Cx<T>, green: &[T], per_cell: usize) -> Vec<Cx<T>> {
    green
        .iter()
        .enumerate()
        .map(|(i, &g)| phi[i / per_cell] + q * g)
        .collect()
}

fn sub_integral<T: Real>(v: &[Cx<T>], grid: &RadialGrid<T>, power: Option<T>) -> T {
    let w = grid.sub_weights();
    let s: T = match power {
        None => v.iter().zip(w).map(|(z, &w)| w * z.norm_sqr()).sum(),
        Some(r) => power_integral(v, w, r),
    };
    two_pi::<T>() * s
}

/// Plane energy in the fixed-scale form
/// `½‖φ‖²_{H¹} − ½‖v‖² + (σ/2)|q|² − (1/r)‖v‖_r^r`, `v = φ + q K₀/(2π)`.
pub fn plane_energy_fixed<T: Real>(
    phi: &[Cx<T>],
    q: Cx<T>,
    sigma: T,
    r: T,
    grid: &RadialGrid<T>,
) -> Result<T> {
    check_len("regular part", phi.len(), grid.len())?;
    let b = plane_terms(phi, q, sigma, r, grid, &grid.flux_coefficients(), true);
    Ok(b.0 + b.1 + b.2 + b.3)
}

fn plane_terms<T: Real>(
    phi: &[Cx<T>],
    q: Cx<T>,
    sigma: T,
    r: T,
    grid: &RadialGrid<T>,
    flux: &[T],
    nonlinear: bool,
) -> (T, T, T, T) {
    let half = T::lit(0.5);
    let h1 = half * (radial_gradient_sq(phi, flux) + radial_l2_sq(phi, grid));
    let v = sub_values(phi, q, grid.green(), grid.sub_per_cell());
    let l2 = -half * sub_integral(&v, grid, None);
    let charge = half * sigma * q.norm_sqr();
    let nl = if nonlinear {
        -sub_integral(&v, grid, Some(r)) / r
    } else {
        T::zero()
    };
    (h1, l2, charge, nl)
}

/// `φ_q = φ + (q/2π)(K₀(ρ) − K₀(|q|ρ))` at the radial nodes.
pub fn rescale_regular_part<T: Real>(
    phi: &[Cx<T>],
    q: Cx<T>,
    grid: &RadialGrid<T>,
) -> Result<ScaledDecomposition<T>> {
    check_len("regular part", phi.len(), grid.len())?;
    let aq = q.norm();
    if !(aq > T::zero()) {
        return Err(Error::Domain("the |q|-scaled decomposition needs q != 0".into()));
    }
    let phi_q = phi
        .iter()
        .zip(grid.nodes())
        .map(|(&f, &rho)| f + q * (k0_unchecked(rho) - k0_unchecked(aq * rho)) / two_pi::<T>())
        .collect();
    Ok(ScaledDecomposition { phi_q, q })
}

impl<T: Real> ScaledDecomposition<T> {
    /// `φ_q + q K₀(|q|ρ)/(2π)` at the radial nodes.
    pub fn reconstruct(&self, grid: &RadialGrid<T>) -> Vec<Cx<T>> {
        let aq = self.q.norm();
        self.phi_q
            .iter()
            .zip(grid.nodes())
            .map(|(&f, &rho)| f + self.q * k0_unchecked(aq * rho) / two_pi::<T>())
            .collect()
    }

    fn sub_values(&self, grid: &RadialGrid<T>) -> Vec<Cx<T>> {
        let aq = self.q.norm();
        let green: Vec<T> = grid
            .sub_points()
            .iter()
            .map(|&r| k0_unchecked(aq * r) / two_pi::<T>())
            .collect();
        sub_values(&self.phi_q, self.q, &green, grid.sub_per_cell())
    }
}

/// Plane energy in the `|q|`-scaled form
/// `½‖∇φ_q‖² + (|q|²/2)‖φ_q‖² − (|q|²/2)‖v‖² + (σ/2 + log|q|/(4π))|q|² − (1/r)‖v‖_r^r`.
pub fn plane_energy_scaled<T: Real>(
    dec: &ScaledDecomposition<T>,
    sigma: T,
    r: T,
    grid: &RadialGrid<T>,
) -> Result<T> {
    check_len("scaled regular part", dec.phi_q.len(), grid.len())?;
    let q2 = dec.q.norm_sqr();
    if !(q2 > T::zero()) {
        return Err(Error::Domain("the |q|-scaled energy needs q != 0".into()));
    }
    let half = T::lit(0.5);
    let grad = half * radial_gradient_sq(&dec.phi_q, &grid.flux_coefficients());
    let reg = half * q2 * radial_l2_sq(&dec.phi_q, grid);
    let v = dec.sub_values(grid);
    let l2 = -half * q2 * sub_integral(&v, grid, None);
    let log_term = (half * sigma + q2.sqrt().ln() / (T::lit(4.0) * T::PI())) * q2;
    let nl = -sub_integral(&v, grid, Some(r)) / r;
    Ok(grad + reg + l2 + log_term + nl)
}

/// Junction coupling `−β Re(q̄ u(0))`.
pub fn junction_energy<T: Real>(q: Cx<T>, u0: Cx<T>, beta: T) -> T {
    -beta * (q.conj() * u0).re
}

/// Total energy with itemized terms.
pub fn total_energy<T: Real>(
    state: &HybridState<T>,
    params: &Params<T>,
    grids: &Grids<T>,
) -> Result<EnergyBreakdown<T>> {
    state.check(grids)?;
    Ok(Functional::new(params, grids).breakdown(state))
}

/// First variation of the discrete energy, as a state-shaped object.
///
/// Components are Riesz representatives for the quadrature inner product
/// [`inner`]: `δE/δu`, `δE/δφ` and `∂E/∂q`, each packed as
/// `∂/∂Re + i ∂/∂Im`.
pub fn gradient<T: Real>(
    state: &HybridState<T>,
    params: &Params<T>,
    grids: &Grids<T>,
) -> Result<HybridState<T>> {
    state.check(grids)?;
    let f = Functional::new(params, grids);
    Ok(f.riesz(&f.coord_gradient(state)))
}

/// Quadrature inner product matching [`gradient`]:
/// `Re[∫_ℓ ā b + ∫_{ℝ²} ā_φ b_φ + ā_q b_q]`.
pub fn inner<T: Real>(a: &HybridState<T>, b: &HybridState<T>, grids: &Grids<T>) -> T {
    let line: T = a
        .u
        .iter()
        .zip(&b.u)
        .zip(grids.line.weights())
        .map(|((x, y), &w)| w * (x.conj() * y).re)
        .sum();
    let plane: T = a
        .phi
        .iter()
        .zip(&b.phi)
        .enumerate()
        .map(|(j, (x, y))| grids.radial.cell_moment(j) * (x.conj() * y).re)
        .sum();
    line + two_pi::<T>() * plane + (a.q.conj() * b.q).re
}

/// Evaluator of the discrete energy for fixed parameters and grids.
#[derive(Debug, Clone)]
pub struct Functional<'a, T> {
    pub params: Params<T>,
    pub grids: &'a Grids<T>,
    flux: Vec<T>,
    line_power: Vec<T>,
    nonlinear: bool,
}

impl<'a, T: Real> Functional<'a, T> {
    pub fn new(params: &Params<T>, grids: &'a Grids<T>) -> Self {
        Self {
            params: *params,
            grids,
            flux: grids.radial.flux_coefficients(),
            line_power: grids.line.power_weights(params.p()),
            nonlinear: true,
        }
    }

    /// Drops both power nonlinearities (quadratic part `E_lin`).
    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub(crate) fn flux(&self) -> &[T] {
        &self.flux
    }

    pub fn breakdown(&self, s: &HybridState<T>) -> EnergyBreakdown<T> {
        let p = &self.params;
        let line = &self.grids.line;
        let half = T::lit(0.5);
        let u0 = s.u[line.junction()];
        let (h1_plane, l2_plane, charge_term, nl_plane) = plane_terms(
            &s.phi,
            s.q,
            p.sigma(),
            p.r(),
            &self.grids.radial,
            &self.flux,
            self.nonlinear,
        );
        EnergyBreakdown {
            kin_line: line_kinetic(&s.u, line),
            delta_line: half * p.alpha() * u0.norm_sqr(),
            nl_line: if self.nonlinear {
                -power_integral(&s.u, &self.line_power, p.p()) / p.p()
            } else {
                T::zero()
            },
            h1_plane,
            l2_plane,
            charge_term,
            nl_plane,
            junction: junction_energy(s.q, u0, p.beta()),
            total: T::zero(),
        }
        .summed()
    }

    pub fn energy(&self, s: &HybridState<T>) -> T {
        self.breakdown(s).total
    }

    /// Partial derivatives with respect to the stored coordinates.
    #[allow(clippy::needless_range_loop)]
    pub fn coord_gradient(&self, s: &HybridState<T>) -> HybridState<T> {
        let p = &self.params;
        let line = &self.grids.line;
        let rg = &self.grids.radial;
        let tp = two_pi::<T>();
        let n = s.u.len();
        let c = line.edge_multiplicity() / line.spacing();
        let j = line.junction();

        let mut gu = vec![Complex::default(); n];
        for i in 0..n {
            let mut g = Complex::default();
            if i > 0 {
                g += (s.u[i] - s.u[i - 1]) * c;
            }
            if i + 1 < n {
                g += (s.u[i] - s.u[i + 1]) * c;
            }
            if self.nonlinear {
                g -= s.u[i] * (self.line_power[i] * s.u[i].norm().powf(p.p() - T::lit(2.0)));
            }
            gu[i] = g;
        }
        for (i, f) in line.ends() {
            gu[i] += s.u[i] * (T::lit(0.5) * f * line.exterior_rate());
        }
        gu[j] += s.u[j] * p.alpha() - s.q * p.beta();

        let m = s.phi.len();
        let per = rg.sub_per_cell();
        let v = sub_values(&s.phi, s.q, rg.green(), per);
        let mut gphi = vec![Complex::default(); m];
        for k in 0..m {
            let mut g = s.phi[k] * (tp * rg.cell_moment(k));
            if k > 0 {
                g += (s.phi[k] - s.phi[k - 1]) * self.flux[k - 1];
            }
            if k + 1 < m {
                g += (s.phi[k] - s.phi[k + 1]) * self.flux[k];
            }
            gphi[k] = g;
        }
        let mut gq = s.q * p.sigma() - s.u[j] * p.beta();
        let rm2 = p.r() - T::lit(2.0);
        for (i, (&z, (&w, &green))) in v
            .iter()
            .zip(rg.sub_weights().iter().zip(rg.green()))
            .enumerate()
        {
            let mut f = z;
            if self.nonlinear {
                f += z * z.norm().powf(rm2);
            }
            let f = f * (tp * w);
            gphi[i / per] -= f;
            gq -= f * green;
        }
        HybridState {
            u: gu,
            phi: gphi,
            q: gq,
        }
    }

    /// Coordinate gradient of half the mass.
    pub fn mass_coord_gradient(&self, s: &HybridState<T>) -> HybridState<T> {
        let rg = &self.grids.radial;
        let tp = two_pi::<T>();
        let per = rg.sub_per_cell();
        let gu = s
            .u
            .iter()
            .zip(self.grids.line.weights())
            .map(|(z, &w)| z * w)
            .collect();
        let v = sub_values(&s.phi, s.q, rg.green(), per);
        let mut gphi = vec![Complex::default(); s.phi.len()];
        let mut gq = Complex::default();
        for (i, (&z, (&w, &green))) in v
            .iter()
            .zip(rg.sub_weights().iter().zip(rg.green()))
            .enumerate()
        {
            let f = z * (tp * w);
            gphi[i / per] += f;
            gq += f * green;
        }
        HybridState {
            u: gu,
            phi: gphi,
            q: gq,
        }
    }

    /// Converts coordinate derivatives into Riesz representatives.
    pub fn riesz(&self, g: &HybridState<T>) -> HybridState<T> {
        let tp = two_pi::<T>();
        HybridState {
            u: g
                .u
                .iter()
                .zip(self.grids.line.weights())
                .map(|(z, &w)| z / w)
                .collect(),
            phi: g
                .phi
                .iter()
                .enumerate()
                .map(|(j, z)| z / (tp * self.grids.radial.cell_moment(j)))
                .collect(),
            q: g.q,
        }
    }

    /// Norm of a coordinate-space covector measured in the Riesz inner product.
    pub fn dual_norm(&self, g: &HybridState<T>) -> T {
        let tp = two_pi::<T>();
        let line: T = g
            .u
            .iter()
            .zip(self.grids.line.weights())
            .map(|(z, &w)| z.norm_sqr() / w)
            .sum();
        let plane: T = g
            .phi
            .iter()
            .enumerate()
            .map(|(j, z)| z.norm_sqr() / (tp * self.grids.radial.cell_moment(j)))
            .sum();
        (line + plane + g.q.norm_sqr()).sqrt()
    }
}

/// Gagliardo–Nirenberg quotients of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnRatios<T> {
    /// `‖u‖_p^p / (‖u'‖^{p/2−1} ‖u‖^{p/2+1})`; `None` when a norm vanishes.
    pub line: Option<T>,
    /// `‖v‖_r^r / (‖∇φ_q‖^{r−2} + |q|^{r−2})`; `None` when the denominator vanishes.
    pub plane: Option<T>,
}

pub fn gn_functionals<T: Real>(
    state: &HybridState<T>,
    params: &Params<T>,
    grids: &Grids<T>,
) -> Result<GnRatios<T>> {
    state.check(grids)?;
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (p, r) = (params.p(), params.r());
    let line = &grids.line;
    let lp = power_integral(&state.u, &line.power_weights(p), p);
    let du = (two * line_kinetic(&state.u, line)).sqrt();
    let l2 = crate::state::line_mass(state, grids).sqrt();
    let denom = du.powf(p * half - T::one()) * l2.powf(p * half + T::one());
    let line_ratio = (denom > T::zero() && denom.is_finite()).then(|| lp / denom);

    let rg = &grids.radial;
    let flux = rg.flux_coefficients();
    let v = state.plane_values(grids);
    let vr = sub_integral(&v, rg, Some(r));
    let (grad, aq) = if state.q.norm_sqr() > T::zero() {
        let dec = rescale_regular_part(&state.phi, state.q, rg)?;
        (radial_gradient_sq(&dec.phi_q, &flux).sqrt(), state.q.norm())
    } else {
        (radial_gradient_sq(&state.phi, &flux).sqrt(), T::zero())
    };
    let denom = grad.powf(r - two) + aq.powf(r - two);
    let plane_ratio = (denom > T::zero() && denom.is_finite()).then(|| vr / denom);
    Ok(GnRatios {
        line: line_ratio,
        plane: plane_ratio,
    })
}
