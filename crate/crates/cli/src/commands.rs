use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use hybrid_nls::analysis::{
    corollary_with_thresholds, existence_criterion, find_beta_star, find_mu_star, find_sigma_star,
    sweep, verify_matching, CorollaryConditions, ThresholdCondition, ThresholdSearch,
};
use hybrid_nls::checks::{check_e2q, check_gn, check_gradient, check_k0, library_k0, CheckResult};
use hybrid_nls::solver::{solve_ground_state, Outcome, SolveFlag};
use hybrid_nls::special::{eval_k0, soliton_profile};
use hybrid_nls::state::canonical_gauge;
use hybrid_nls::{Grids64, SolveReport64};
use serde::Serialize;
use serde_json::json;

use crate::config::{Resolved, RunConfig};

/// Process exit status for each outcome class.
pub mod exit {
    pub const CONVERGED: u8 = 0;
    pub const ERROR: u8 = 1;
    pub const RUNAWAY_LINE: u8 = 2;
    pub const MAX_ITERATIONS: u8 = 3;
    pub const CHECK_FAILED: u8 = 4;
}

pub fn outcome_status(o: Outcome) -> u8 {
    match o {
        Outcome::Converged => exit::CONVERGED,
        Outcome::RunawayLine => exit::RUNAWAY_LINE,
        Outcome::MaxIterations => exit::MAX_ITERATIONS,
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Converged => "converged",
        Outcome::RunawayLine => "runaway_line",
        Outcome::MaxIterations => "max_iterations",
    }
}

fn flag_name(f: SolveFlag) -> &'static str {
    match f {
        SolveFlag::NoNegativeLinearLevel => "no_negative_linear_level",
        SolveFlag::TinyMass => "tiny_mass",
        SolveFlag::BoundaryNotDecayed => "boundary_not_decayed",
        SolveFlag::Stalled => "stalled",
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn json_f64(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

#[derive(Serialize)]
struct Complex64 {
    re: f64,
    im: f64,
}

fn report_json(config: &RunConfig, r: &SolveReport64, grids: &Grids64) -> Result<serde_json::Value> {
    let p = &r.params;
    let b = &r.breakdown;
    let verdict = existence_criterion(r, p)?;
    let tailed = r.grids(grids);
    let matching = verify_matching(&r.state, p, &tailed)?;
    let records = &r.history.records;
    Ok(json!({
        "config": config,
        "outcome": outcome_name(r.outcome),
        "energy": r.energy,
        "omega": json_f64(r.omega),
        "grad_residual": r.grad_residual,
        "iterations": r.iterations,
        "soliton_reference": r.soliton_reference,
        "exists_flag": r.exists_flag,
        "tolerance": r.tolerance,
        "exterior_rate": r.exterior_rate,
        "flags": r.flags.iter().map(|&f| flag_name(f)).collect::<Vec<_>>(),
        "params": {
            "alpha": p.alpha(), "sigma": p.sigma(), "beta": p.beta(),
            "p": p.p(), "r": p.r(), "mu": p.mu(),
        },
        "charge": Complex64 { re: r.state.q.re, im: r.state.q.im },
        "line_mass": r.line_mass(grids),
        "plane_mass": r.plane_mass(grids),
        "breakdown": {
            "kin_line": b.kin_line, "delta_line": b.delta_line, "nl_line": b.nl_line,
            "h1_plane": b.h1_plane, "l2_plane": b.l2_plane, "charge_term": b.charge_term,
            "nl_plane": b.nl_plane, "junction": b.junction, "total": b.total,
        },
        "verdict": {
            "exists": verdict.exists,
            "witness_energy": verdict.witness_energy,
            "soliton_reference": verdict.soliton_reference,
            "margin": verdict.margin,
            "mechanism": format!("{:?}", verdict.mechanism),
        },
        "matching": {
            "line_jump": matching.line_jump,
            "plane_fixed": matching.plane_fixed,
            "plane_scaled": matching.plane_scaled,
            "phi_at_origin": Complex64 { re: matching.phi_at_origin.re, im: matching.phi_at_origin.im },
            "fixed_scale_preferred": matching.fixed_scale_preferred(),
        },
        "history": {
            "records": records.len(),
            "max_energy_increase": records.len().ge(&2).then(|| r.history.max_energy_increase()),
            "soliton_reference": r.history.soliton_reference,
            "half_length": r.history.half_length,
        },
    }))
}

/// Line and plane sections of the final state, one header row each.
pub fn profiles_table(r: &SolveReport64, grids: &Grids64) -> String {
    let s = canonical_gauge(&r.state, &r.grids(grids));
    let mut out = String::from("# line\nx u_re u_im\n");
    for (i, z) in s.u.iter().enumerate() {
        let x = grids.line.coordinate(i);
        let _ = writeln!(out, "{x:.16e} {:.16e} {:.16e}", z.re, z.im);
    }
    out.push_str("\n# plane\nrho phi_re phi_im K0_part_re K0_part_im v_re v_im\n");
    let two_pi = 2.0 * std::f64::consts::PI;
    for (&rho, phi) in grids.radial.nodes().iter().zip(&s.phi) {
        let k = s.q * (eval_k0(rho).unwrap_or(f64::NAN) / two_pi);
        let v = phi + k;
        let _ = writeln!(
            out,
            "{rho:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            phi.re, phi.im, k.re, k.im, v.re, v.im
        );
    }
    out
}

fn history_table(r: &SolveReport64) -> String {
    let mut out = String::from(
        "step energy mass normalized_mass residual centroid boundary_fraction charge restart\n",
    );
    for (i, rec) in r.history.records.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {}",
            i + 1,
            rec.energy,
            rec.mass,
            rec.normalized_mass,
            rec.residual,
            rec.centroid,
            rec.boundary_fraction,
            rec.charge,
            u8::from(rec.restart)
        );
    }
    out
}

pub fn cmd_solve(config: &RunConfig, res: &Resolved) -> Result<u8> {
    let r = solve_ground_state(&res.params, &res.grids, &res.solve)?;
    let dir = &config.output.dir;
    let report = report_json(config, &r, &res.grids)?;
    write_file(dir, "report.json", &serde_json::to_string_pretty(&report)?)?;
    write_file(dir, "profiles.txt", &profiles_table(&r, &res.grids))?;
    write_file(dir, "history.txt", &history_table(&r))?;
    println!("outcome            {}", outcome_name(r.outcome));
    println!("energy             {:.12e}", r.energy);
    println!("soliton_reference  {:.12e}", r.soliton_reference);
    println!("exists             {}", r.exists_flag);
    println!("iterations         {}", r.iterations);
    println!("grad_residual      {:.3e}", r.grad_residual);
    println!("output             {}", dir.display());
    Ok(outcome_status(r.outcome))
}

pub fn sweep_table(axis: &str, table: &hybrid_nls::analysis::SweepTable<f64>) -> String {
    let mut out = format!("{axis}\tenergy\toutcome\texists\tmargin\tresidual\titerations\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{:.16e}\t{:.16e}\t{}\t{}\t{:.16e}\t{:.16e}\t{}",
            row.value,
            row.energy,
            outcome_name(row.outcome),
            row.exists,
            row.margin,
            row.residual,
            row.iterations
        );
    }
    out
}

pub fn cmd_sweep(config: &RunConfig, res: &Resolved) -> Result<u8> {
    let values = config.sweep_values();
    let table = sweep(&res.params, &res.grids, &res.solve, res.axis, &values, res.mode)?;
    let text = sweep_table(table.axis, &table);
    let path = write_file(&config.output.dir, &format!("sweep_{}.tsv", table.axis), &text)?;
    print!("{text}");
    println!("# written to {}", path.display());
    println!(
        "# max increase {:.3e}, max decrease {:.3e}",
        table.max_increase(),
        table.max_decrease()
    );
    Ok(exit::CONVERGED)
}

/// `K₀` perturbed by one part in a million, for exercising the checks.
fn corrupted_k0(x: f64) -> f64 {
    library_k0(x) * (1.0 + 1e-6)
}

pub fn cmd_verify(config: &RunConfig, corrupt_k0: bool) -> Result<u8> {
    let k0: &dyn Fn(f64) -> f64 = if corrupt_k0 { &corrupted_k0 } else { &library_k0 };
    let v = &config.verify;
    let seed = u64::from(config.seed);
    let results: Vec<CheckResult> = vec![
        check_k0(k0),
        check_e2q(seed, v.e2q_tolerance, v.e2q_cells),
        check_gradient(seed),
        check_gn(seed),
    ];
    let mut text = format!("# seed {}\ncheck\tstatus\ttolerance\tmeasured\tnote\n", config.seed);
    for c in &results {
        let _ = writeln!(
            text,
            "{}\t{}\t{:.3e}\t{:.6e}\t{}",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.tolerance,
            c.measured,
            c.note
        );
    }
    write_file(&config.output.dir, "verify.txt", &text)?;
    print!("{text}");
    Ok(if results.iter().all(|c| c.passed) {
        exit::CONVERGED
    } else {
        exit::CHECK_FAILED
    })
}

pub fn cmd_oracle_soliton(config: &RunConfig) -> Result<u8> {
    let p = &config.params;
    let s = soliton_profile(p.p, p.mu)?;
    println!("p          {}", s.p);
    println!("mu         {}", s.mu);
    println!("A          {:.16e}", s.amplitude);
    println!("k          {:.16e}", s.width);
    println!("omega      {:.16e}", s.omega);
    println!("energy     {:.16e}", s.energy());
    println!("theta      {:.16e}", s.theta());
    Ok(exit::CONVERGED)
}

pub fn cmd_oracle_k0(xs: &[f64]) -> Result<u8> {
    if xs.is_empty() {
        return Err(anyhow!("usage: oracle k0 --x <X> [--x <X> ...]"));
    }
    for &x in xs {
        println!("{x} {:.16e}", eval_k0(x)?);
    }
    Ok(exit::CONVERGED)
}

fn search_json(name: &str, s: &Result<ThresholdSearch<f64>, hybrid_nls::Error>) -> serde_json::Value {
    match s {
        Ok(s) => json!({
            "threshold": s.threshold.to_string(),
            "gap": s.gap,
            "solves": s.table.rows.len(),
        }),
        Err(e) => json!({ "error": format!("{name}: {e}") }),
    }
}

fn condition_json(c: &ThresholdCondition<f64>) -> serde_json::Value {
    match c {
        ThresholdCondition::Requires(what) => json!({ "requires": what }),
        ThresholdCondition::Computed { threshold, holds } => {
            json!({ "threshold": threshold.to_string(), "holds": holds })
        }
    }
}

fn conditions_json(c: &CorollaryConditions<f64>) -> serde_json::Value {
    json!({
        "line_non_repulsive": c.line_non_repulsive,
        "line_exponent": c.line_exponent,
        "plane_exponent": c.plane_exponent,
        "plane_favored": format!("{:?}", c.plane_favored),
        "sigma_condition": condition_json(&c.sigma_condition),
        "beta_condition": condition_json(&c.beta_condition),
        "any_holds": c.any_holds(),
    })
}

pub fn cmd_thresholds(config: &RunConfig, res: &Resolved) -> Result<u8> {
    let t = &config.thresholds;
    let (p, g, s) = (&res.params, &res.grids, &res.solve);
    let bracket = |b: [f64; 2]| (b[0], b[1]);
    let sigma = t.sigma.then(|| find_sigma_star(p, g, s, bracket(t.sigma_bracket), t.tolerance));
    let beta = t.beta.then(|| find_beta_star(p, g, s, bracket(t.beta_bracket), t.tolerance));
    let mu = t.mu.then(|| find_mu_star(p, g, s, bracket(t.mu_bracket), t.tolerance));
    let found = |x: &Option<Result<ThresholdSearch<f64>, _>>| match x {
        Some(Ok(s)) => Some(s.threshold),
        _ => None,
    };
    let conditions = corollary_with_thresholds(p, found(&sigma), found(&beta));
    let mut out = json!({ "conditions": conditions_json(&conditions) });
    for (name, search) in [("sigma_star", &sigma), ("beta_star", &beta), ("mu_star", &mu)] {
        if let Some(s) = search {
            out[name] = search_json(name, s);
        }
    }
    let text = serde_json::to_string_pretty(&out)?;
    write_file(&config.output.dir, "thresholds.json", &text)?;
    println!("{text}");
    Ok(exit::CONVERGED)
}
