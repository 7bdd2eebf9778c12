//! The discretized two-component state and its mass algebra.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grids;
use crate::scalar::{cx, Cx, Real};

/// Two-component state `U = (u, v)` with `v = φ + q K₀/(2π)`.
///
/// `u` lives on the line grid (half-line samples in the even representation),
/// `phi` holds one value per radial cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState<T> {
    pub u: Vec<Cx<T>>,
    pub phi: Vec<Cx<T>>,
    pub q: Cx<T>,
}

impl<T: Real> HybridState<T> {
    pub fn zeros(grids: &Grids<T>) -> Self {
        Self {
            u: vec![Complex::default(); grids.line.len()],
            phi: vec![Complex::default(); grids.radial.len()],
            q: Complex::default(),
        }
    }

    /// Real-valued state from samples.
    pub fn from_real(u: &[T], phi: &[T], q: T) -> Self {
        Self {
            u: u.iter().map(|&x| cx(x)).collect(),
            phi: phi.iter().map(|&x| cx(x)).collect(),
            q: cx(q),
        }
    }

    pub fn check(&self, grids: &Grids<T>) -> Result<()> {
        if self.u.len() != grids.line.len() {
            return Err(Error::DimensionMismatch {
                what: "line component",
                got: self.u.len(),
                expected: grids.line.len(),
            });
        }
        if self.phi.len() != grids.radial.len() {
            return Err(Error::DimensionMismatch {
                what: "regular part",
                got: self.phi.len(),
                expected: grids.radial.len(),
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        let ok = |z: &Cx<T>| z.re.is_finite() && z.im.is_finite();
        self.u.iter().all(ok) && self.phi.iter().all(ok) && ok(&self.q)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            u: self.u.iter().map(|z| z * s).collect(),
            phi: self.phi.iter().map(|z| z * s).collect(),
            q: self.q * s,
        }
    }

    /// `self + t·dir`.
    pub fn add_scaled(&self, t: T, dir: &Self) -> Self {
        Self {
            u: self.u.iter().zip(&dir.u).map(|(a, b)| a + b * t).collect(),
            phi: self.phi.iter().zip(&dir.phi).map(|(a, b)| a + b * t).collect(),
            q: self.q + dir.q * t,
        }
    }

    /// Multiplies the line and plane components by independent phases.
    pub fn rotated(&self, line_phase: T, plane_phase: T) -> Self {
        let a = Complex::from_polar(T::one(), line_phase);
        let b = Complex::from_polar(T::one(), plane_phase);
        Self {
            u: self.u.iter().map(|z| z * a).collect(),
            phi: self.phi.iter().map(|z| z * b).collect(),
            q: self.q * b,
        }
    }

    /// Euclidean inner product `Re Σ conj(a)·b` over all stored coordinates.
    pub(crate) fn coord_dot(&self, other: &Self) -> T {
        let d = |a: &[Cx<T>], b: &[Cx<T>]| -> T {
            a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
        };
        d(&self.u, &other.u) + d(&self.phi, &other.phi) + self.q.re * other.q.re + self.q.im * other.q.im
    }

    /// Value of the junction sample `u(0)`.
    pub fn junction_value(&self, grids: &Grids<T>) -> Cx<T> {
        self.u[grids.line.junction()]
    }

    /// Plane component `v = φ_j + q K₀(ρ)/(2π)` at every sub-point of the radial grid.
    pub fn plane_values(&self, grids: &Grids<T>) -> Vec<Cx<T>> {
        let rg = &grids.radial;
        let n = rg.sub_per_cell();
        rg.green()
            .iter()
            .enumerate()
            .map(|(i, &g)| self.phi[i / n] + self.q * g)
            .collect()
    }

    /// Plane component at the cell nodes, `K₀` part evaluated at the node.
    pub fn plane_at_nodes(&self, grids: &Grids<T>) -> Vec<Cx<T>> {
        let two_pi = T::lit(2.0) * T::PI();
        grids
            .radial
            .nodes()
            .iter()
            .zip(&self.phi)
            .map(|(&r, &p)| p + self.q * crate::special::k0_unchecked(r) / two_pi)
            .collect()
    }
}

/// `∫_ℓ |u|²`.
pub fn line_mass<T: Real>(state: &HybridState<T>, grids: &Grids<T>) -> T {
    state
        .u
        .iter()
        .zip(grids.line.weights())
        .map(|(z, &w)| w * z.norm_sqr())
        .sum()
}

/// `‖φ + q K₀/(2π)‖²_{L²(ℝ²)}`.
pub fn plane_mass<T: Real>(state: &HybridState<T>, grids: &Grids<T>) -> T {
    let v = state.plane_values(grids);
    let s: T = v
        .iter()
        .zip(grids.radial.sub_weights())
        .map(|(z, &w)| w * z.norm_sqr())
        .sum();
    T::lit(2.0) * T::PI() * s
}

/// Total mass `∫_ℓ |u|² + ∫_Π |v|²`.
pub fn mass<T: Real>(state: &HybridState<T>, grids: &Grids<T>) -> Result<T> {
    state.check(grids)?;
    Ok(line_mass(state, grids) + plane_mass(state, grids))
}

/// Rescales `state` onto the mass sphere of radius `mu`.
pub fn normalize<T: Real>(state: &HybridState<T>, mu: T, grids: &Grids<T>) -> Result<HybridState<T>> {
    let m = mass(state, grids)?;
    if !(m > T::zero()) {
        return Err(Error::NullState);
    }
    Ok(state.scaled((mu / m).sqrt()))
}

/// Rotates the line and plane components so that `u(0) ≥ 0` and `q ≥ 0`.
///
/// A component whose junction datum vanishes is rotated by the phase of its
/// largest sample instead, which makes real-up-to-phase states real.
pub fn canonical_gauge<T: Real>(state: &HybridState<T>, grids: &Grids<T>) -> HybridState<T> {
    let anchor = |pivot: Cx<T>, samples: &[Cx<T>]| -> T {
        if pivot.norm_sqr() > T::zero() {
            pivot.arg()
        } else {
            samples
                .iter()
                .copied()
                .fold(Complex::default(), |best: Cx<T>, z| {
                    if z.norm_sqr() > best.norm_sqr() {
                        z
                    } else {
                        best
                    }
                })
                .arg()
        }
    };
    let line = anchor(state.junction_value(grids), &state.u);
    let plane = anchor(state.q, &state.phi);
    let mut out = state.rotated(-line, -plane);
    // remove rounding residue so canonical states are exactly real at the anchors
    let j = grids.line.junction();
    out.u[j] = cx(out.u[j].norm());
    out.q = cx(out.q.norm());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{LineGrid, LineSymmetry, RadialGrading, RadialGrid};

    fn grids() -> Grids<f64> {
        Grids::new(
            LineGrid::new(20.0, 2001, LineSymmetry::Even).unwrap(),
            RadialGrid::new(20.0, 1000, RadialGrading::default()).unwrap(),
        )
    }

    #[test]
    fn zero_state_has_zero_mass() {
        let g = grids();
        assert_eq!(mass(&HybridState::zeros(&g), &g).unwrap(), 0.0);
    }

    #[test]
    fn exponential_line_mass() {
        let g = grids();
        let mut s = HybridState::zeros(&g);
        for (i, z) in s.u.iter_mut().enumerate() {
            *z = cx((-g.line.coordinate(i)).exp());
        }
        let m = mass(&s, &g).unwrap();
        // trapezoid on a kinked integrand: O(h²) error
        assert!((m - 1.0).abs() < 1e-4, "{m}");
    }

    #[test]
    fn gaussian_plane_mass() {
        let g = grids();
        let mut s = HybridState::zeros(&g);
        let c = std::f64::consts::PI.powf(-0.5);
        for (j, z) in s.phi.iter_mut().enumerate() {
            let r = g.radial.nodes()[j];
            *z = cx(c * (-r * r / 2.0).exp());
        }
        // cellwise-constant φ carries an O(h²) quadrature error
        let m = mass(&s, &g).unwrap();
        assert!((m - 1.0).abs() < 1e-4, "{m}");
    }

    #[test]
    fn normalize_rejects_null() {
        let g = grids();
        assert_eq!(
            normalize(&HybridState::zeros(&g), 1.0, &g).unwrap_err(),
            Error::NullState
        );
    }

    #[test]
    fn normalize_scales_by_half() {
        let g = grids();
        let mut s = HybridState::zeros(&g);
        s.u[0] = cx(1.0);
        s.phi[3] = cx(0.5);
        s.q = cx(0.2);
        let m = mass(&s, &g).unwrap();
        let s = s.scaled((4.0 / m).sqrt());
        let n = normalize(&s, 1.0, &g).unwrap();
        assert!((n.u[0].re - s.u[0].re / 2.0).abs() < 1e-14);
        assert!((n.q.re - s.q.re / 2.0).abs() < 1e-14);
        assert!((mass(&n, &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = grids();
        let mut s = HybridState::zeros(&g);
        s.u.pop();
        assert!(matches!(mass(&s, &g), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gauge_makes_charge_real() {
        let g = grids();
        let mut s = HybridState::zeros(&g);
        s.u[0] = cx(0.3);
        s.u[1] = cx(0.2);
        s.q = Complex::new(0.0, 1.0);
        let c = canonical_gauge(&s, &g);
        assert!((c.q.re - 1.0).abs() < 1e-15 && c.q.im == 0.0);
        assert_eq!(c.u[0], cx(0.3));
        let again = canonical_gauge(&c, &g);
        assert_eq!(again, c);
    }
}
