//! Model parameters of the hybrid energy.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical parameters of the line/plane energy.
///
/// `sigma` enters the plane energy as `(σ/2)|q|²` with the regular part measured
/// against `K₀(ρ)/(2π)`. Another common convention uses `ρ` with
/// `σ = ρ + (γ − log 2)/(2π)`; see [`Params::sigma_from_shifted`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    alpha: T,
    sigma: T,
    beta: T,
    p: T,
    r: T,
    mu: T,
}

impl<T: Real> Params<T> {
    pub fn new(alpha: T, sigma: T, beta: T, p: T, r: T, mu: T) -> Result<Self> {
        check_line_power(p)?;
        check_plane_power(r)?;
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if !sigma.is_finite() {
            return Err(Error::InvalidParameter("sigma must be finite".into()));
        }
        if !(beta >= T::zero()) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must satisfy beta >= 0 (got {beta})"
            )));
        }
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must satisfy mu > 0 (got {mu})"
            )));
        }
        Ok(Self { alpha, sigma, beta, p, r, mu })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn sigma(&self) -> T {
        self.sigma
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn p(&self) -> T {
        self.p
    }
    pub fn r(&self) -> T {
        self.r
    }
    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn with_alpha(self, alpha: T) -> Result<Self> {
        Self::new(alpha, self.sigma, self.beta, self.p, self.r, self.mu)
    }
    pub fn with_sigma(self, sigma: T) -> Result<Self> {
        Self::new(self.alpha, sigma, self.beta, self.p, self.r, self.mu)
    }
    pub fn with_beta(self, beta: T) -> Result<Self> {
        Self::new(self.alpha, self.sigma, beta, self.p, self.r, self.mu)
    }
    pub fn with_mu(self, mu: T) -> Result<Self> {
        Self::new(self.alpha, self.sigma, self.beta, self.p, self.r, mu)
    }

    /// Converts a plane interaction strength given in the shifted convention
    /// into the `σ` used here.
    pub fn sigma_from_shifted(rho: T) -> T {
        rho + (T::euler_gamma() - T::LN_2()) / (T::lit(2.0) * T::PI())
    }
}

pub(crate) fn check_line_power<T: Real>(p: T) -> Result<()> {
    if p > T::lit(2.0) && p < T::lit(6.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "line power must satisfy 2 < p < 6 (got p = {p})"
        )))
    }
}

pub(crate) fn check_plane_power<T: Real>(r: T) -> Result<()> {
    if r > T::lit(2.0) && r < T::lit(4.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "plane power must satisfy 2 < r < 4 (got r = {r})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_critical_powers() {
        let e = Params::new(0.0, 0.0, 0.0, 6.0, 3.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("2 < p < 6"));
        let e = Params::new(0.0, 0.0, 0.0, 4.0, 4.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("2 < r < 4"));
        assert!(Params::new(0.0, 0.0, 0.0, 2.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn rejects_negative_beta_and_mass() {
        assert!(Params::new(0.0, 0.0, -0.1, 4.0, 3.0, 1.0).is_err());
        assert!(Params::new(0.0, 0.0, 0.0, 4.0, 3.0, 0.0).is_err());
        assert!(Params::new(0.0, 0.0, 0.0, 4.0, 3.0, f64::NAN).is_err());
    }

    #[test]
    fn shifted_sigma_uses_euler_gamma() {
        let s = Params::<f64>::sigma_from_shifted(0.0);
        assert!((s - (0.577_215_664_901_532_9 - 2f64.ln()) / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }
}
