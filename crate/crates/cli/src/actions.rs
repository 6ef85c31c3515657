//! One function per subcommand.

use std::fmt::Write as _;
use std::path::Path;

use helmscat_core::continuation::{
    blowup_probe, continue_branch, BlowupDiagnosis, ContinuationError, Termination,
};
use helmscat_core::fields::{ComplexField, RegimeTag};
use helmscat_core::quadrature::SphereRule;
use helmscat_core::resolvent::{estimate_kappa, far_field, ResolventError};
use helmscat_core::solver::{
    contraction_certificate, linear_bound_check, picard_solve, SolveReport, SolverError,
};
use helmscat_core::specfun::{first_y_zero, BesselOrder};
use helmscat_core::verify::{
    default_frequencies, defocusing_inequalities, energy_identity, fit_power_bound,
    fourier_positivity, sturm_check, EnergyOptions, VerifyError,
};
use num_complex::Complex64;
use serde_json::json;

use crate::config::{RunConfig, Setup};
use crate::error::CliError;
use crate::output::{num, OutputDir};
use crate::{fieldio, internal, Command, ConstantsCommand, VerifyCommand};

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cmd: &Command, cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    match cmd {
        Command::Solve => solve(cfg, out),
        Command::Continue => continuation(cfg, out),
        Command::Kappa => kappa(cfg, out),
        Command::Farfield => farfield(cfg, out),
        Command::Verify { check } => match check {
            VerifyCommand::Sturm => sturm(cfg, out),
            VerifyCommand::Fourier => fourier(cfg, out),
            VerifyCommand::Energy { field } => energy(cfg, field.as_deref(), out),
            VerifyCommand::Defocusing => defocusing(cfg, out),
        },
        Command::Constants { which } => match which {
            ConstantsCommand::Zn { dim } => zn(*dim, out),
        },
        Command::Animate { field } => animate(cfg, field.as_deref(), out),
    }
}

fn solver_err(e: SolverError) -> CliError {
    match e {
        SolverError::InvalidConfig(_)
        | SolverError::RegimeViolation(_)
        | SolverError::Fields(_) => CliError::Config(e.to_string()),
        SolverError::Resolvent(ResolventError::Specfun(_)) => CliError::Config(e.to_string()),
        SolverError::NonFinite { .. } => CliError::Diverged(e.to_string()),
        SolverError::Resolvent(_) => internal(e),
    }
}

fn verify_err(e: VerifyError) -> CliError {
    match e {
        VerifyError::InvalidArgument(_) | VerifyError::RegimeViolation(_) => {
            CliError::Config(e.to_string())
        }
        _ => internal(e),
    }
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    cfg.problem()?.setup(&cfg.resolvent)
}

fn solve_setup(cfg: &RunConfig, s: &Setup) -> Result<(ComplexField, SolveReport)> {
    picard_solve(&s.nonlinearity, &s.phi, s.k, &cfg.solver, &s.rcfg).map_err(solver_err)
}

fn residual_csv(report: &SolveReport) -> String {
    let mut s = String::from("iteration,residual\n");
    for (i, r) in report.residual_history.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, num(*r));
    }
    s
}

fn not_converged(report: &SolveReport) -> CliError {
    CliError::Diverged(format!(
        "{:?} after {} iterations, residual {:e}",
        report.outcome, report.iterations, report.final_residual
    ))
}

fn solve(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let s = setup(cfg)?;
    let (u, mut report) = solve_setup(cfg, &s)?;
    if s.nonlinearity.has_tag(RegimeTag::F2) {
        let kappa = estimate_kappa(s.nonlinearity.alpha(), &s.rcfg, s.k).map_err(internal)?;
        report
            .bound_checks
            .push(linear_bound_check(&s.nonlinearity, &s.phi, &u, &kappa).map_err(solver_err)?);
    }
    out.write_json("report.json", &report)?;
    out.write("residuals.csv", residual_csv(&report).as_bytes())?;
    out.write("field.nlh", &fieldio::encode(&u, s.k))?;
    let axis = s.eval.dim() - 1;
    out.write(
        "slice.csv",
        fieldio::slice_csv(&u, axis, None)
            .map_err(CliError::Config)?
            .as_bytes(),
    )?;
    if !report.converged {
        return Err(not_converged(&report));
    }
    Ok(())
}

fn continuation(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let s = setup(cfg)?;
    let settings = &cfg.continuation;
    let branch = continue_branch(
        &s.nonlinearity,
        &s.phi,
        s.k,
        settings.lambda_max,
        &settings.step(),
        &cfg.solver,
        &s.rcfg,
    )
    .map_err(|e| match e {
        ContinuationError::Solver(e) => solver_err(e),
        ContinuationError::InvalidSpec(_) => CliError::Config(e.to_string()),
        ContinuationError::InsufficientPoints { .. } => internal(e),
    })?;
    let mut csv = String::from("lambda,sup_norm,residual,iterations,status\n");
    for p in &branch.points {
        let status = serde_json::to_value(p.status)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            num(p.lambda),
            num(p.sup_norm),
            num(p.residual),
            p.iterations,
            status.as_str().unwrap_or("")
        );
        if let Some(field) = &p.field {
            out.write(
                &format!("field_lambda_{}.nlh", num(p.lambda)),
                &fieldio::encode(field, s.k),
            )?;
        }
    }
    out.write("branch.csv", csv.as_bytes())?;
    let (blowup, note) = match blowup_probe(&branch) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    out.write_json(
        "branch.json",
        &json!({
            "branch": branch,
            "blowup": blowup,
            "blowup_note": note,
        }),
    )?;
    if branch.terminated_reason != Termination::ReachedLambdaMax {
        let detail = match blowup {
            Some(BlowupDiagnosis::Estimate { lambda_star, .. }) => {
                format!(", estimated blow-up at λ* ≈ {lambda_star:.6}")
            }
            _ => String::new(),
        };
        return Err(CliError::Diverged(format!(
            "branch stopped at λ = {} ({:?}){detail}",
            branch.last_converged_lambda(),
            branch.terminated_reason
        )));
    }
    Ok(())
}

fn default_cap(phi: &ComplexField) -> f64 {
    (2.0 * phi.sup_norm()).max(1.0)
}

fn kappa(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let s = setup(cfg)?;
    let mut f = s.nonlinearity;
    let alpha = cfg.kappa.alpha.unwrap_or(f.alpha());
    let kappa = estimate_kappa(alpha, &s.rcfg, s.k).map_err(|e| match e {
        ResolventError::Fields(_) => CliError::Config(e.to_string()),
        _ => internal(e),
    })?;
    let certificate = if (alpha - f.alpha()).abs() > 1e-12 * alpha.abs() {
        None
    } else {
        let cap = cfg
            .kappa
            .lipschitz_cap
            .unwrap_or_else(|| default_cap(&s.phi));
        Some(
            contraction_certificate(
                &mut f,
                &kappa,
                cap,
                cfg.kappa.lipschitz_samples,
                cfg.seed.unwrap_or(0),
            )
            .map_err(solver_err)?,
        )
    };
    out.write_json(
        "kappa.json",
        &json!({
            "kappa": kappa,
            "kappa_with_tail": kappa.with_tail(),
            "contraction_certificate": certificate,
        }),
    )?;
    Ok(())
}

fn directions(dim: usize, order: usize) -> SphereRule {
    if order == 0 {
        SphereRule::default_for(dim)
    } else {
        SphereRule::with_order(dim, order)
    }
}

fn farfield(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let s = setup(cfg)?;
    let (u, report) = solve_setup(cfg, &s)?;
    out.write_json("report.json", &report)?;
    if !report.converged {
        return Err(not_converged(&report));
    }
    let usc = u.zip_map(&s.phi, |a, b| a - b).map_err(internal)?;
    let radius = cfg
        .farfield
        .radius
        .unwrap_or(0.85 * s.eval.half_width() / 1.1);
    let dirs = directions(s.eval.dim(), cfg.farfield.directions_order);
    let ff = far_field(&usc, s.k, &dirs, radius).map_err(|e| match e {
        ResolventError::RadiusOutOfRange { .. } | ResolventError::GridMismatch(_) => {
            CliError::Config(e.to_string())
        }
        _ => internal(e),
    })?;
    let dim = s.eval.dim();
    let mut csv = String::new();
    for a in ["theta_x", "theta_y", "theta_z"].iter().take(dim) {
        csv.push_str(a);
        csv.push(',');
    }
    csv.push_str("re,im,abs,convergence\n");
    for ((d, g), c) in ff
        .directions
        .iter()
        .zip(&ff.amplitude)
        .zip(&ff.convergence_indicator)
    {
        for x in d {
            let _ = write!(csv, "{},", num(*x));
        }
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            num(g.re),
            num(g.im),
            num(g.norm()),
            num(*c)
        );
    }
    out.write("farfield.csv", csv.as_bytes())?;
    out.write_json("farfield.json", &ff)?;
    Ok(())
}

fn sturm(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let v = &cfg.verify;
    let nu = BesselOrder::new(v.nu).map_err(|e| CliError::Config(e.to_string()))?;
    let results = sturm_check(nu, v.pairs).map_err(verify_err)?;
    let mut csv = String::from("pair,left,right,margin,quadrature_error\n");
    for r in &results {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.pair_index,
            num(r.left_integral),
            num(r.right_integral),
            num(r.margin),
            num(r.quadrature_error)
        );
    }
    out.write("sturm.csv", csv.as_bytes())?;
    out.write_json(
        "sturm.json",
        &json!({"tolerance": v.sturm_tolerance, "pairs": results}),
    )?;
    if let Some(r) = results.iter().find(|r| r.margin < -v.sturm_tolerance) {
        return Err(CliError::Breach(format!(
            "pair {} has margin {:e}",
            r.pair_index, r.margin
        )));
    }
    Ok(())
}

fn fourier(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let v = &cfg.verify;
    let order = BesselOrder::for_dimension(v.dim).map_err(|e| CliError::Config(e.to_string()))?;
    let z = first_y_zero(order).map_err(internal)?;
    let delta = v.delta.unwrap_or(z / v.k);
    let freqs = default_frequencies(delta, v.frequencies);
    let res = fourier_positivity(v.dim, v.k, delta, &freqs).map_err(verify_err)?;
    let mut csv = String::from("rho,transform\n");
    for (r, t) in res.frequencies.iter().zip(&res.transform_values) {
        let _ = writeln!(csv, "{},{}", num(*r), num(*t));
    }
    out.write("fourier.csv", csv.as_bytes())?;
    // The sign is only claimed for kδ ≤ z_N.
    let in_regime = v.k * delta <= z * (1.0 + 1e-12);
    out.write_json(
        "fourier.json",
        &json!({
            "dim": res.dim,
            "k": res.k,
            "delta": res.delta,
            "z_n": z,
            "in_regime": in_regime,
            "tolerance": v.fourier_tolerance,
            "min_value": res.min_value,
        }),
    )?;
    if in_regime && res.min_value < -v.fourier_tolerance {
        return Err(CliError::Breach(format!(
            "transform reaches {:e}",
            res.min_value
        )));
    }
    Ok(())
}

fn load_field(path: &Path, out: &mut OutputDir) -> Result<(ComplexField, f64)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    out.record_input("field", &bytes);
    fieldio::decode(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Field from `--field`, otherwise a converged solve of the configured problem.
fn obtain_field(
    cfg: &RunConfig,
    field: Option<&Path>,
    out: &mut OutputDir,
) -> Result<(ComplexField, f64)> {
    if let Some(p) = field {
        return load_field(p, out);
    }
    let s = setup(cfg)?;
    let (u, report) = solve_setup(cfg, &s)?;
    out.write_json("report.json", &report)?;
    if !report.converged {
        return Err(not_converged(&report));
    }
    Ok((u, s.k))
}

/// Allowed flux as a multiple of the quadrature tolerance.
const ENERGY_FACTOR: f64 = 10.0;

fn energy(cfg: &RunConfig, field: Option<&Path>, out: &mut OutputDir) -> Result<()> {
    let v = &cfg.verify;
    let (u, _) = obtain_field(cfg, field, out)?;
    let l = u.grid().half_width();
    let radii = v
        .radii
        .clone()
        .unwrap_or_else(|| vec![0.25 * l, 0.5 * l, 0.75 * l]);
    let opts = EnergyOptions {
        tolerance: v.energy_tolerance,
        directions: None,
    };
    let res = energy_identity(&u, &radii, &opts).map_err(verify_err)?;
    let mut csv = String::from("radius,flux_imag,quadrature_error\n");
    for ((r, f), q) in res
        .radii
        .iter()
        .zip(&res.flux_imag)
        .zip(&res.quadrature_error)
    {
        let _ = writeln!(csv, "{},{},{}", num(*r), num(*f), num(*q));
    }
    out.write("energy.csv", csv.as_bytes())?;
    out.write_json(
        "energy.json",
        &json!({"result": res, "limit": ENERGY_FACTOR * res.tolerance}),
    )?;
    let limit = ENERGY_FACTOR * res.tolerance;
    if !(res.max_abs_flux() <= limit) {
        return Err(CliError::Breach(format!(
            "flux {:e} exceeds {:e}",
            res.max_abs_flux(),
            limit
        )));
    }
    Ok(())
}

fn defocusing(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let v = &cfg.verify;
    let s = setup(cfg)?;
    let p = s
        .nonlinearity
        .exponent()
        .ok_or_else(|| CliError::Config("defocusing checks need a power nonlinearity".into()))?;
    if v.scales.is_empty() {
        return Err(CliError::Config("verify.scales must not be empty".into()));
    }
    let mut reports = Vec::new();
    let mut samples = Vec::new();
    let mut csv = String::from("scale,check,lhs,rhs,margin\n");
    for &scale in &v.scales {
        let phi = s.phi.scaled(Complex64::new(scale, 0.0));
        let (u, report) =
            picard_solve(&s.nonlinearity, &phi, s.k, &cfg.solver, &s.rcfg).map_err(solver_err)?;
        if !report.converged {
            return Err(not_converged(&report));
        }
        let d = defocusing_inequalities(&u, &phi, &s.nonlinearity).map_err(verify_err)?;
        for c in &d.checks {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                num(scale),
                c.name,
                num(c.lhs),
                num(c.rhs),
                num(c.margin)
            );
        }
        samples.push((phi.sup_norm(), u.sup_norm()));
        reports.push(json!({"scale": scale, "sup_norm": u.sup_norm(), "report": d}));
    }
    let fit = if p > 2.0 {
        fit_power_bound(&samples, p, 4).ok()
    } else {
        None
    };
    out.write("defocusing.csv", csv.as_bytes())?;
    out.write_json(
        "defocusing.json",
        &json!({"tolerance": v.margin_tolerance, "runs": reports, "power_bound_fit": fit}),
    )?;
    for r in &reports {
        let checks = r["report"]["checks"]
            .as_array()
            .cloned()
            .unwrap_or_default();
        for c in checks {
            let margin = c["margin"].as_f64().unwrap_or(f64::NAN);
            if !(margin >= -v.margin_tolerance) {
                return Err(CliError::Breach(format!(
                    "{} at scale {} has margin {margin:e}",
                    c["name"].as_str().unwrap_or("?"),
                    r["scale"]
                )));
            }
        }
    }
    Ok(())
}

fn zn(dim: usize, out: &mut OutputDir) -> Result<()> {
    let order = BesselOrder::for_dimension(dim).map_err(|e| CliError::Config(e.to_string()))?;
    let z = first_y_zero(order).map_err(internal)?;
    let value = json!({"dim": dim, "nu": order.value(), "z": z});
    println!(
        "{}",
        serde_json::to_string(&crate::output::round_json(value.clone()))?
    );
    out.write_json("constants.json", &value)?;
    Ok(())
}

fn animate(cfg: &RunConfig, field: Option<&Path>, out: &mut OutputDir) -> Result<()> {
    let (u, k) = obtain_field(cfg, field, out)?;
    let a = &cfg.animate;
    let times = if a.times.is_empty() {
        let period = 2.0 * std::f64::consts::PI / k;
        (0..8).map(|i| period * i as f64 / 8.0).collect()
    } else {
        a.times.clone()
    };
    let mut index = String::from("frame,time,file\n");
    for (i, &t) in times.iter().enumerate() {
        let name = format!("frame_{i:04}.csv");
        let csv = fieldio::time_frame_csv(&u, k, t, a.axis, a.index).map_err(CliError::Config)?;
        out.write(&name, csv.as_bytes())?;
        let _ = writeln!(index, "{i},{},{name}", num(t));
    }
    out.write("frames.csv", index.as_bytes())?;
    Ok(())
}
