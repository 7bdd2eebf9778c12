//! MacDonald function `K₀` and the closed-form line soliton.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::check_line_power;
use crate::scalar::Real;

/// Modified Bessel function of the second kind of order zero.
///
/// Ascending series below a switch point, Hankel asymptotic expansion above it.
/// In `f64` the absolute error is below `1e-12` on `(0, 50]`.
pub fn eval_k0<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("K0 requires x > 0 (got {x})")));
    }
    Ok(k0_unchecked(x))
}

pub(crate) fn k0_unchecked<T: Real>(x: T) -> T {
    let switch = if T::epsilon() < T::lit(1e-10) {
        T::lit(9.0)
    } else {
        T::lit(5.0)
    };
    if x <= switch {
        k0_series(x)
    } else {
        k0_asymptotic(x)
    }
}

fn k0_series<T: Real>(x: T) -> T {
    let y = x * x / T::lit(4.0);
    let mut term = T::one(); // (y^k / k!^2)
    let mut harmonic = T::zero();
    let mut i0 = T::one();
    let mut tail = T::zero();
    let mut k = 1;
    loop {
        let kf = T::from_usize(k).unwrap();
        term = term * y / (kf * kf);
        harmonic += T::one() / kf;
        i0 += term;
        let contrib = term * harmonic;
        tail += contrib;
        if contrib <= T::epsilon() * tail.abs() && term <= T::epsilon() * i0 {
            break;
        }
        k += 1;
        if k > 500 {
            break;
        }
    }
    -((x / T::lit(2.0)).ln() + T::euler_gamma()) * i0 + tail
}

fn k0_asymptotic<T: Real>(x: T) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    let eight_x = T::lit(8.0) * x;
    for k in 1..60 {
        let odd = T::from_usize(2 * k - 1).unwrap();
        let next = -term * odd * odd / (T::from_usize(k).unwrap() * eight_x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < T::epsilon() * sum.abs() {
            break;
        }
    }
    (T::FRAC_PI_2() / x).sqrt() * (-x).exp() * sum
}

/// Closed-form data of the positive even soliton of `−u'' + ωu = u^{p−1}`
/// at prescribed mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams<T> {
    pub p: T,
    pub mu: T,
    pub amplitude: T,
    pub width: T,
    pub omega: T,
}

impl<T: Real> SolitonParams<T> {
    /// Exponent `2/(p−2)` of the sech power.
    pub fn sech_power(&self) -> T {
        T::lit(2.0) / (self.p - T::lit(2.0))
    }

    /// Profile value `A sech^{2/(p−2)}(k x)`.
    pub fn eval(&self, x: T) -> T {
        let s = self.sech_power();
        let kx = (self.width * x).abs();
        // sech(y) = 2e^{-y}/(1+e^{-2y}) stays finite for large y
        let e = (-kx).exp();
        let sech = T::lit(2.0) * e / (T::one() + e * e);
        self.amplitude * sech.powf(s)
    }

    /// First derivative of the profile.
    pub fn derivative(&self, x: T) -> T {
        let s = self.sech_power();
        -s * self.width * (self.width * x).tanh() * self.eval(x)
    }

    /// Second derivative of the profile.
    pub fn second_derivative(&self, x: T) -> T {
        let s = self.sech_power();
        let t = (self.width * x).tanh();
        let k2 = self.width * self.width;
        // u'' = k² s² u − k² s (s+1) sech² u
        let sech2 = T::one() - t * t;
        k2 * s * (s * self.eval(x) - (s + T::one()) * sech2 * self.eval(x))
    }

    /// Energy `½‖u'‖² − (1/p)‖u‖_p^p` on the whole line, in closed form.
    pub fn energy(&self) -> T {
        self.omega * self.mu * (self.p - T::lit(6.0)) / (T::lit(2.0) * (self.p + T::lit(2.0)))
    }

    /// `θ_p` in `E = −θ_p μ^{(p+2)/(6−p)}`.
    pub fn theta(&self) -> T {
        -self.energy() / self.mu.powf(energy_exponent(self.p))
    }
}

/// Exponent `(p+2)/(6−p)` of the soliton energy scaling law.
pub fn energy_exponent<T: Real>(p: T) -> T {
    (p + T::lit(2.0)) / (T::lit(6.0) - p)
}

/// Soliton of mass `mu` for the line power `p`.
pub fn soliton_profile<T: Real>(p: T, mu: T) -> Result<SolitonParams<T>> {
    check_line_power(p)?;
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(Error::Domain(format!("soliton mass must be positive (got {mu})")));
    }
    let s = T::lit(2.0) / (p - T::lit(2.0));
    // ∫ sech^{2s} = √π Γ(s)/Γ(s+½)
    let s64 = s.as_f64();
    let sech_integral =
        T::lit(std::f64::consts::PI.sqrt() * (ln_gamma(s64) - ln_gamma(s64 + 0.5)).exp());
    let base = s * (s + T::one());
    // μ = k^{2s−1} (s(s+1))^s ∫sech^{2s}
    let width = (mu / (base.powf(s) * sech_integral)).powf(T::one() / (T::lit(2.0) * s - T::one()));
    let amplitude = (width * width * base).powf(T::one() / (p - T::lit(2.0)));
    let omega = width * width * s * s;
    Ok(SolitonParams {
        p,
        mu,
        amplitude,
        width,
        omega,
    })
}

/// Soliton level `ℰ_{0,ℓ}(μ)`, the escape level along the line.
pub fn soliton_energy<T: Real>(p: T, mu: T) -> Result<T> {
    Ok(soliton_profile(p, mu)?.energy())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k0_domain() {
        assert!(eval_k0(0.0f64).is_err());
        assert!(eval_k0(-1.0f64).is_err());
        assert!(eval_k0(f64::NAN).is_err());
    }

    #[test]
    fn k0_reference_values() {
        assert!((eval_k0(0.1f64).unwrap() - 2.427_069_024_702_017).abs() < 1e-12);
        assert!((eval_k0(1.0f64).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-12);
        assert!((eval_k0(5.0f64).unwrap() - 0.003_691_098_334_042_594).abs() < 1e-13);
    }

    #[test]
    fn k0_continuous_at_switch() {
        let a = k0_series(9.0f64);
        let b = k0_asymptotic(9.0f64);
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn k0_f32_is_usable() {
        let v = eval_k0(1.0f32).unwrap();
        assert!((v - 0.421_024_44).abs() < 1e-5);
    }

    #[test]
    fn soliton_p4_constants() {
        let s = soliton_profile(4.0f64, 1.0).unwrap();
        assert!((s.amplitude - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!((s.width - 0.25).abs() < 1e-14);
        assert!((s.omega - 1.0 / 16.0).abs() < 1e-14);
        assert!((s.energy() + 1.0 / 96.0).abs() < 1e-15);
        let s2 = soliton_profile(4.0f64, 2.0).unwrap();
        assert!((s2.width / s.width - 2.0).abs() < 1e-13);
        assert!((s2.amplitude / s.amplitude - 2.0).abs() < 1e-13);
    }

    #[test]
    fn soliton_rejects_critical_power() {
        assert!(soliton_profile(6.0f64, 1.0).is_err());
        assert!(soliton_profile(4.0f64, -1.0).is_err());
    }

    #[test]
    fn scaling_ratios() {
        let r4 = soliton_energy(4.0f64, 2.0).unwrap() / soliton_energy(4.0, 1.0).unwrap();
        assert!((r4 - 8.0).abs() < 1e-12);
        let r3 = soliton_energy(3.0f64, 2.0).unwrap() / soliton_energy(3.0, 1.0).unwrap();
        assert!((r3 - 2f64.powf(5.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn profile_even_positive_peaked() {
        for &p in &[2.5, 3.0, 4.0, 5.5] {
            let s = soliton_profile(p, 1.3f64).unwrap();
            for i in 1..200 {
                let x = i as f64 * 0.1;
                assert!(s.eval(x) > 0.0);
                assert_eq!(s.eval(x), s.eval(-x));
                assert!(s.eval(x) < s.eval(0.0));
            }
        }
    }
}
