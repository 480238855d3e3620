//! `plap` — command-line driver for the p-Laplacian eigenvalue toolkit.
//!
//! Subcommands map onto the library's experiments: `gamma` (radial
//! spectrum), `lambda1` (FEM first eigenvalue on a domain), `certify`
//! (tau_1 < gamma_2 gap certificates), `obstacle-sweep` (moving-obstacle
//! eigenvalue curve), `reflect` (odd-reflection eigenfunctions), and
//! `nodal-radius` (interior zero of the second radial eigenfunction).
//!
//! Every file written through `--out` gets a sibling `<out>.manifest.json`
//! recording the resolved configuration and the SHA-256 of each output, so
//! reruns are verifiable. Exit codes: 0 success, 2 configuration error,
//! 3 solver non-convergence. `PLAP_LOG` controls log verbosity.

mod manifest;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use plap_core::eigensolver::{
    certify_nonradial, first_eigenpair, lambda1_extrapolated, obstacle_sweep, LevelResult,
};
use plap_core::radial::nodal_radius_report;
use plap_core::reflect::{count_nodal_domains, reflect_odd, reflection_plan, weak_residual};
use plap_core::{build_mesh, DomainSpec, SolverConfig};

use manifest::ManifestWriter;

const EXIT_CONFIG: i32 = 2;
const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "plap",
    version,
    about = "Dirichlet eigenvalues of the p-Laplacian on the unit disk and related domains"
)]
struct Cli {
    /// JSON file with solver defaults (tol_eig, tol_grad, max_iter, mesh_h,
    /// seed, regularization_eps, p). Explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for sweep commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radial eigenvalues gamma_1..gamma_n of the unit ball, as CSV.
    Gamma {
        /// Exponent of the p-Laplacian.
        #[arg(long)]
        p: Option<f64>,
        /// Space dimension N >= 1.
        #[arg(long)]
        dim: u32,
        /// Largest index n to compute.
        #[arg(long = "n-max")]
        n_max: usize,
        /// Relative bracket tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First Dirichlet eigenvalue of a meshed domain, as JSON.
    Lambda1 {
        /// Domain as inline JSON (e.g. '{"type":"ball","dim":2,"radius":1.0}')
        /// or a path to a JSON file.
        #[arg(long)]
        domain: String,
        #[arg(long)]
        p: Option<f64>,
        /// Number of uniform refinements (>= 1 enables Richardson
        /// extrapolation).
        #[arg(long, default_value_t = 0)]
        refine: usize,
        /// Target mesh edge length for the coarsest level.
        #[arg(long = "mesh-h")]
        mesh_h: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificates for the gap tau_1 < gamma_2, one per exponent, as JSON.
    Certify {
        /// Comma-separated exponents, e.g. 1.5,2,3.
        #[arg(long = "p-list", value_delimiter = ',', required = true)]
        p_list: Vec<f64>,
        #[arg(long = "mesh-h")]
        mesh_h: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// lambda_1 of the unit disk minus a moving obstacle, as CSV.
    ObstacleSweep {
        /// Obstacle radius.
        #[arg(long)]
        r: f64,
        /// Offsets: a comma list (0,0.2,0.4) or a range a:step:b.
        #[arg(long)]
        t: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "mesh-h")]
        mesh_h: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Odd-reflection eigenfunction Psi_n: VTK field plus a JSON summary.
    Reflect {
        /// Number of reflection lines; Psi_n has 2n nodal domains.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "mesh-h")]
        mesh_h: Option<f64>,
        /// Write the disk mesh and field as legacy VTK here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interior zero of the second radial eigenfunction, as JSON.
    NodalRadius {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Partial solver configuration from `--config`; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    p: Option<f64>,
    tol_eig: Option<f64>,
    tol_grad: Option<f64>,
    max_iter: Option<usize>,
    mesh_h: Option<f64>,
    seed: Option<u64>,
    regularization_eps: Option<f64>,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<plap_core::Error> for CliError {
    fn from(e: plap_core::Error) -> Self {
        let code = match e {
            plap_core::Error::NonConvergence(_)
            | plap_core::Error::Bracket { .. }
            | plap_core::Error::StepUnderflow { .. }
            | plap_core::Error::SignChanging { .. } => EXIT_NO_CONVERGENCE,
            _ => EXIT_CONFIG,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLAP_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("plap: cannot size worker pool: {e}");
            std::process::exit(EXIT_CONFIG);
        }
    }
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("plap: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file_cfg = load_file_config(cli.config.as_deref())?;

    match &cli.command {
        Command::Gamma {
            p,
            dim,
            n_max,
            tol,
            out,
        } => {
            let p = resolve_p(*p, &file_cfg)?;
            let cfg = resolve_config(Some(p), &file_cfg, None);
            cfg.validate().map_err(CliError::from)?;
            if *n_max < 1 {
                return Err(CliError::config("--n-max must be >= 1"));
            }
            let mut csv = String::from("n,gamma_n,residual\n");
            let mut all_converged = true;
            for n in 1..=*n_max {
                let pair = plap_core::radial_eigenvalue(p, *dim, n, *tol)?;
                all_converged &= pair.converged;
                csv.push_str(&format!("{n},{},{:.6e}\n", pair.lambda, pair.residual));
            }
            let mut writer = ManifestWriter::new(
                "gamma",
                json!({"p": p, "dim": dim, "n_max": n_max, "tol": tol, "solver": cfg}),
                cli.config.as_deref(),
            )?;
            emit(&mut writer, out.as_deref(), csv.as_bytes())?;
            writer.finish(out.is_some())?;
            if !all_converged {
                return Err(CliError {
                    code: EXIT_NO_CONVERGENCE,
                    message: "one or more radial eigenvalues did not converge".into(),
                });
            }
            Ok(())
        }

        Command::Lambda1 {
            domain,
            p,
            refine,
            mesh_h,
            out,
        } => {
            let p = resolve_p(*p, &file_cfg)?;
            let cfg = resolve_config(Some(p), &file_cfg, *mesh_h);
            cfg.validate().map_err(CliError::from)?;
            let (spec, domain_path) = parse_domain(domain)?;
            let report = if *refine == 0 {
                let mesh = Arc::new(build_mesh(&spec, cfg.mesh_h)?);
                let pair = first_eigenpair(&mesh, p, &cfg)?;
                Lambda1Report {
                    domain: spec.clone(),
                    p,
                    lambda1: pair.lambda,
                    error_bar: None,
                    rate: None,
                    converged: pair.converged,
                    levels: vec![LevelResult {
                        h: mesh.h,
                        lambda: pair.lambda,
                        iterations: pair.iterations,
                        stationarity: pair.residual,
                        converged: pair.converged,
                    }],
                }
            } else {
                let res = lambda1_extrapolated(&spec, p, &cfg, *refine)?;
                Lambda1Report {
                    domain: spec.clone(),
                    p,
                    lambda1: res.lambda,
                    error_bar: Some(res.error_bar),
                    rate: Some(res.rate),
                    converged: res.levels.iter().all(|l| l.converged),
                    levels: res.levels,
                }
            };
            let mut writer = ManifestWriter::new(
                "lambda1",
                json!({"domain": spec, "p": p, "refine": refine, "solver": cfg}),
                cli.config.as_deref(),
            )?;
            if let Some(path) = domain_path {
                writer.add_input(&path)?;
            }
            emit(&mut writer, out.as_deref(), &to_pretty_json(&report))?;
            writer.finish(out.is_some())?;
            if !report.converged {
                return Err(CliError {
                    code: EXIT_NO_CONVERGENCE,
                    message: "eigenvalue solve did not converge".into(),
                });
            }
            Ok(())
        }

        Command::Certify { p_list, mesh_h, out } => {
            if p_list.is_empty() {
                return Err(CliError::config("--p-list must name at least one exponent"));
            }
            let cfg = resolve_config(None, &file_cfg, *mesh_h);
            let mut certificates = Vec::new();
            for &p in p_list {
                let cfg_p = SolverConfig { p, ..cfg.clone() };
                cfg_p.validate().map_err(CliError::from)?;
                certificates.push(certify_nonradial(p, &cfg_p)?);
            }
            let mut writer = ManifestWriter::new(
                "certify",
                json!({"p_list": p_list, "solver": cfg}),
                cli.config.as_deref(),
            )?;
            emit(&mut writer, out.as_deref(), &to_pretty_json(&certificates))?;
            writer.finish(out.is_some())?;
            Ok(())
        }

        Command::ObstacleSweep {
            r,
            t,
            p,
            mesh_h,
            out,
        } => {
            let p = resolve_p(*p, &file_cfg)?;
            let cfg = resolve_config(Some(p), &file_cfg, *mesh_h);
            cfg.validate().map_err(CliError::from)?;
            let offsets = parse_offsets(t)?;
            let points = obstacle_sweep(*r, &offsets, p, &cfg)?;
            let mut csv = String::from("t,lambda1,status\n");
            let mut failures = 0usize;
            for pt in &points {
                match (pt.lambda1, &pt.error) {
                    (Some(lam), _) if pt.converged => {
                        csv.push_str(&format!("{},{lam},ok\n", pt.t));
                    }
                    (Some(lam), _) => {
                        failures += 1;
                        csv.push_str(&format!("{},{lam},not-converged\n", pt.t));
                    }
                    (None, err) => {
                        failures += 1;
                        let msg = err.as_deref().unwrap_or("unknown").replace(',', ";");
                        csv.push_str(&format!("{},,error: {msg}\n", pt.t));
                    }
                }
            }
            let mut writer = ManifestWriter::new(
                "obstacle-sweep",
                json!({"r": r, "t": offsets, "p": p, "solver": cfg}),
                cli.config.as_deref(),
            )?;
            emit(&mut writer, out.as_deref(), csv.as_bytes())?;
            writer.finish(out.is_some())?;
            if failures > 0 {
                return Err(CliError {
                    code: EXIT_NO_CONVERGENCE,
                    message: format!("{failures} sweep point(s) failed or did not converge"),
                });
            }
            Ok(())
        }

        Command::Reflect { n, p, mesh_h, out } => {
            let p = resolve_p(*p, &file_cfg)?;
            let cfg = resolve_config(Some(p), &file_cfg, *mesh_h);
            cfg.validate().map_err(CliError::from)?;
            let plan = reflection_plan(*n, cfg.mesh_h)?;
            let pair = first_eigenpair(&plan.sector_mesh, p, &cfg)?;
            let psi = reflect_odd(
                pair.mesh_field().expect("FEM pair carries a field"),
                &plan,
            )?;
            let report = json!({
                "n": n,
                "tau_n": pair.lambda,
                "nodal_domains": count_nodal_domains(&psi, 1e-10 * psi.max_abs()),
                "weak_residual": weak_residual(&psi, pair.lambda, p),
            });
            let mut writer = ManifestWriter::new(
                "reflect",
                json!({"n": n, "p": p, "solver": cfg}),
                cli.config.as_deref(),
            )?;
            if let Some(path) = out {
                let mut bytes = Vec::new();
                plan.disk_mesh
                    .write_vtk(&mut bytes, &[("psi", &psi.values)])
                    .map_err(CliError::from)?;
                writer.write_output(path, &bytes)?;
            }
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            writer.finish(out.is_some())?;
            if !pair.converged {
                return Err(CliError {
                    code: EXIT_NO_CONVERGENCE,
                    message: "sector eigenvalue solve did not converge".into(),
                });
            }
            Ok(())
        }

        Command::NodalRadius { p, dim, tol, out } => {
            let p = resolve_p(*p, &file_cfg)?;
            let report = nodal_radius_report(p, *dim, *tol)?;
            let mut writer = ManifestWriter::new(
                "nodal-radius",
                json!({"p": p, "dim": dim, "tol": tol}),
                cli.config.as_deref(),
            )?;
            emit(&mut writer, out.as_deref(), &to_pretty_json(&report))?;
            writer.finish(out.is_some())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Lambda1Report {
    domain: DomainSpec,
    p: f64,
    lambda1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    converged: bool,
    levels: Vec<LevelResult>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
}

fn resolve_p(flag: Option<f64>, file: &FileConfig) -> Result<f64, CliError> {
    flag.or(file.p)
        .ok_or_else(|| CliError::config("exponent p missing: pass --p or set it in --config"))
}

/// Defaults, overridden by the config file, overridden by explicit flags.
fn resolve_config(p: Option<f64>, file: &FileConfig, mesh_h_flag: Option<f64>) -> SolverConfig {
    let d = SolverConfig::default();
    SolverConfig {
        p: p.unwrap_or(d.p),
        tol_eig: file.tol_eig.unwrap_or(d.tol_eig),
        tol_grad: file.tol_grad.unwrap_or(d.tol_grad),
        max_iter: file.max_iter.unwrap_or(d.max_iter),
        mesh_h: mesh_h_flag.or(file.mesh_h).unwrap_or(d.mesh_h),
        seed: file.seed.unwrap_or(d.seed),
        regularization_eps: file.regularization_eps.unwrap_or(d.regularization_eps),
    }
}

fn parse_domain(arg: &str) -> Result<(DomainSpec, Option<PathBuf>), CliError> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        return Ok((
            DomainSpec::from_json(trimmed).map_err(CliError::from)?,
            None,
        ));
    }
    let path = PathBuf::from(trimmed);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        CliError::config(format!(
            "--domain is neither inline JSON nor a readable file ({}: {e})",
            path.display()
        ))
    })?;
    Ok((DomainSpec::from_json(&text)?, Some(path)))
}

/// Offsets given either as a comma list or as an inclusive `a:step:b` range.
fn parse_offsets(arg: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::config(format!("invalid --t '{arg}': {msg}"));
    let parts: Vec<&str> = arg.split(':').collect();
    match parts.len() {
        1 => arg
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect(),
        3 => {
            let a: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
            let step: f64 = parts[1].parse().map_err(|_| bad("bad step"))?;
            let b: f64 = parts[2].parse().map_err(|_| bad("bad end"))?;
            if !(step > 0.0) || b < a {
                return Err(bad("need step > 0 and end >= start"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| a + step * k as f64).collect())
        }
        _ => Err(bad("expected a comma list or a:step:b")),
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes `bytes` to `out` (tracked in the manifest) or to stdout.
fn emit(writer: &mut ManifestWriter, out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => writer.write_output(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::config(format!("cannot write to stdout: {e}")))
        }
    }
}
