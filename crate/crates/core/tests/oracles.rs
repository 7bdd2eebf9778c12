//! Closed-form and quadrature oracles, computed independently of the library.

use hybrid_nls::energy::{line_energy, plane_energy_fixed, plane_energy_scaled, total_energy, ScaledDecomposition};
use hybrid_nls::grid::{Grids, LineGrid, LineSymmetry, RadialGrading, RadialGrid};
use hybrid_nls::params::Params;
use hybrid_nls::solver::{solve_ground_state, Initialization, Nonlinearity, SolveConfig, Suppress};
use hybrid_nls::special::{eval_k0, soliton_energy, soliton_profile};
use hybrid_nls::state::{line_mass, HybridState};
use num_complex::Complex;
use std::f64::consts::PI;

/// `∫₀^∞ e^{−x cosh t} dt`, trapezoid rule with step 1/128.
fn k0_integral(x: f64) -> f64 {
    let h = 1.0 / 128.0;
    let mut s = 0.5 * (-x).exp();
    for i in 1..20_000 {
        let v = (-x * (i as f64 * h).cosh()).exp();
        if v == 0.0 {
            break;
        }
        s += v;
    }
    s * h
}

/// `∫₀^∞ K₀(ρ)^m ρ dρ` by the substitution `ρ = e^s`.
fn k0_moment(m: i32) -> f64 {
    let h = 1.0 / 64.0;
    let (a, b) = (-40.0_f64, 4.0_f64);
    let n = ((b - a) / h) as usize;
    (0..=n)
        .map(|i| {
            let s = a + i as f64 * h;
            let rho = s.exp();
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * k0_integral(rho).powi(m) * rho * rho
        })
        .sum::<f64>()
        * h
}

fn fine_radial() -> RadialGrid<f64> {
    RadialGrid::new(25.0, 8000, RadialGrading { first_edge: 1e-6, ratio: 1.03 }).unwrap()
}

#[test]
fn k0_matches_integral_representation() {
    for &x in &[0.01, 0.05, 0.3, 1.0, 2.5, 7.0, 9.5, 12.0, 30.0] {
        let (a, b) = (eval_k0(x).unwrap(), k0_integral(x));
        assert!((a - b).abs() < 1e-12 * b.max(1.0), "x = {x}: {a} vs {b}");
    }
    assert!(eval_k0(0.0).is_err());
    assert!(eval_k0(-1.0).is_err());
}

#[test]
fn k0_moment_oracle_reproduces_known_integral() {
    // ∫ K₀² ρ dρ = 1/2
    assert!((k0_moment(2) - 0.5).abs() < 1e-10);
}

#[test]
fn pure_singular_plane_energy() {
    let g = fine_radial();
    let phi = vec![Complex::default(); g.len()];
    let (m2, m3) = (k0_moment(2), k0_moment(3));
    // ‖K₀/2π‖₂² = m2/(2π), ‖K₀/2π‖₃³ = m3/(2π)²
    let expected = -0.5 * m2 / (2.0 * PI) - m3 / (3.0 * 4.0 * PI * PI);
    let e = plane_energy_fixed(&phi, Complex::new(1.0, 0.0), 0.0, 3.0, &g).unwrap();
    assert!((e - expected).abs() < 1e-6, "{e} vs {expected}");

    let dec = ScaledDecomposition { phi_q: phi.clone(), q: Complex::new(1.0, 0.0) };
    let e = plane_energy_scaled(&dec, 2.0, 3.0, &g).unwrap();
    let expected = 1.0 - 0.5 * m2 / (2.0 * PI) - m3 / (3.0 * 4.0 * PI * PI);
    assert!((e - expected).abs() < 1e-6, "{e} vs {expected}");
}

#[test]
fn gaussian_closed_forms() {
    // line: u = e^{-x²/2}: ½‖u'‖² = √π/4, ‖u‖⁴₄ = √(π/2)
    let line = LineGrid::<f64>::new(12.0, 4001, LineSymmetry::Even).unwrap();
    let u: Vec<Complex<f64>> = (0..line.len())
        .map(|i| Complex::new((-line.coordinate(i).powi(2) / 2.0).exp(), 0.0))
        .collect();
    let e = hybrid_nls::energy::line_energy(&u, 0.0, 4.0, &line).unwrap();
    let expected = PI.sqrt() / 4.0 - (PI / 2.0).sqrt() / 4.0;
    assert!((e - expected).abs() < 1e-5, "{e} vs {expected}");

    // plane: φ = π^{-1/2} e^{-ρ²/2}, q = 0, σ irrelevant, r = 3:
    // ½‖∇φ‖² = 1/2, ‖φ‖³₃ = (2/3)π^{-1/2}
    let g = fine_radial();
    let phi: Vec<Complex<f64>> = g
        .nodes()
        .iter()
        .map(|&r| Complex::new((-r * r / 2.0).exp() / PI.sqrt(), 0.0))
        .collect();
    let e = plane_energy_fixed(&phi, Complex::default(), 0.3, 3.0, &g).unwrap();
    let expected = 0.5 - 2.0 / (9.0 * PI.sqrt());
    assert!((e - expected).abs() < 1e-5, "{e} vs {expected}");
}

#[test]
fn soliton_constants_p4() {
    let s = soliton_profile(4.0_f64, 1.0).unwrap();
    assert!((s.amplitude - 1.0 / 8f64.sqrt()).abs() < 1e-14);
    assert!((s.width - 0.25).abs() < 1e-14);
    assert!((s.omega - 0.0625).abs() < 1e-14);
    assert!((soliton_energy(4.0_f64, 1.0).unwrap() + 1.0 / 96.0).abs() < 1e-15);
    assert!(soliton_profile(6.0_f64, 1.0).is_err());
    assert!(soliton_profile(2.0_f64, 1.0).is_err());
}

#[test]
fn soliton_profile_solves_the_ode() {
    for &p in &[2.5f64, 3.0, 4.0, 5.5] {
        let s = soliton_profile(p, 1.3).unwrap();
        for &x in &[-3.0, -0.7, 0.0, 0.4, 2.0, 6.0] {
            let u = s.eval(x);
            let res = -s.second_derivative(x) + s.omega * u - u.powf(p - 1.0);
            assert!(res.abs() < 1e-12 * (1.0 + s.omega * u), "p = {p}, x = {x}: {res}");
        }
        // mass by fine trapezoid over ±60 widths
        let h = 1e-3 / s.width;
        let m: f64 = (-60_000..=60_000).map(|i| s.eval(i as f64 * h).powi(2)).sum::<f64>() * h;
        assert!((m - 1.3).abs() < 1e-8, "p = {p}: mass {m}");
    }
}

#[test]
fn soliton_state_total_energy() {
    let g = Grids::new(
        LineGrid::new(40.0, 4001, LineSymmetry::Even).unwrap(),
        RadialGrid::new(10.0, 100, RadialGrading::default()).unwrap(),
    );
    let s = soliton_profile(4.0, 1.0).unwrap();
    let u: Vec<f64> = (0..g.line.len()).map(|i| s.eval(g.line.coordinate(i))).collect();
    let state = HybridState::from_real(&u, &vec![0.0; g.radial.len()], 0.0);
    for &(sigma, beta) in &[(0.0, 0.0), (2.0, 1.5), (-1.0, 0.3)] {
        let params = Params::new(0.0, sigma, beta, 4.0, 3.0, 1.0).unwrap();
        let e = total_energy(&state, &params, &g).unwrap().total;
        assert!((e + 1.0 / 96.0).abs() < 1e-4, "{e}");
    }
}

fn line_only(alpha: f64, nonlinear: bool) -> (f64, HybridState<f64>, Grids<f64>) {
    let g = Grids::new(
        LineGrid::new(30.0, 3001, LineSymmetry::Even).unwrap(),
        RadialGrid::new(5.0, 50, RadialGrading::default()).unwrap(),
    );
    let params = Params::new(alpha, 0.0, 0.0, 4.0, 3.0, 1.0).unwrap();
    let cfg = SolveConfig {
        suppress: Suppress::Plane,
        init: Initialization::SolitonSeed,
        nonlinearity: if nonlinear { Nonlinearity::Full } else { Nonlinearity::LinearOnly },
        ..Default::default()
    };
    let r = solve_ground_state(&params, &g, &cfg).unwrap();
    (r.energy, r.state, g)
}

#[test]
fn attractive_delta_linear_bound_state() {
    // e^{-|x|/2}, energy −α²μ/8
    let (e, s, g) = line_only(-1.0, false);
    assert!((e + 0.125).abs() < 1e-4, "{e}");
    let u0 = s.u[0].norm();
    for i in [100, 500, 1000] {
        let x = g.line.coordinate(i);
        assert!((s.u[i].norm() - u0 * (-x / 2.0).exp()).abs() < 1e-3);
    }
}

#[test]
fn attractive_delta_nonlinear_ground_state() {
    // u = √2 k sech(k|x| + c), tanh c = 1/(2k), mass 4k − 2 = 1
    let k: f64 = 0.75;
    let t: f64 = 2.0 / 3.0;
    let c = t.atanh();
    let alpha = -1.0;
    let energy = 2.0 * k.powi(3) * (1.0 - t.powi(3)) / 3.0 + alpha * k * k * (1.0 - t * t)
        - 2.0 * k.powi(3) * (2.0 / 3.0 - t + t.powi(3) / 3.0);
    let (e, s, g) = line_only(alpha, true);
    assert!((e - energy).abs() < 1e-4, "{e} vs {energy}");
    assert!((line_mass(&s, &g) - 1.0).abs() < 1e-12);
    let err = (0..g.line.len())
        .map(|i| {
            let x = g.line.coordinate(i);
            (s.u[i].norm() - 2f64.sqrt() * k / (k * x + c).cosh()).abs()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn exponential_tail_completes_the_line_integrals() {
    // u = e^{−κ|x|}: mass 1/κ, kinetic κ/2, ∫|u|³ = 2/(3κ)
    let kappa: f64 = 0.5;
    for symmetry in [LineSymmetry::Even, LineSymmetry::Full] {
        let line = LineGrid::<f64>::new(6.0, 6001, symmetry).unwrap();
        let u: Vec<Complex<f64>> = line
            .coordinates()
            .iter()
            .map(|x| Complex::new((-kappa * x.abs()).exp(), 0.0))
            .collect();
        let energy = |g: &LineGrid<f64>| line_energy(&u, 0.0, 3.0, g).unwrap();
        let mass = |g: &LineGrid<f64>| -> f64 {
            u.iter().zip(g.weights()).map(|(z, w)| w * z.norm_sqr()).sum()
        };
        let exact_energy = kappa / 2.0 - 2.0 / (9.0 * kappa);
        let tailed = line.clone().with_exterior_rate(kappa).unwrap();
        assert!((mass(&tailed) - 1.0 / kappa).abs() < 1e-6, "{}", mass(&tailed));
        assert!((energy(&tailed) - exact_energy).abs() < 1e-6, "{}", energy(&tailed));
        assert!((mass(&line) - 1.0 / kappa).abs() > 1e-3);
    }
}
