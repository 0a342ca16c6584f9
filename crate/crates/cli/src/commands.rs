//! Subcommand implementations.

use nalgebra::{DMatrix, DVector};
use std::path::Path;

use pwacert_core::certify::{
    self, Certificate, CertifyConfig, CertifyError, StabilityVerdict, UubVerdict,
};
use pwacert_core::geometry::{HPolyhedron, TemplateDirections};
use pwacert_core::milp::{self, SolverConfig};
use pwacert_core::reach::{self, ReachOptions};
use pwacert_core::sim::{self, DisturbanceSampler};
use pwacert_core::sysmodel::{MaxoutNet, PwaSystem};
use pwacert_core::{approx, presets};

use crate::formats::{
    self, CertificateFile, DynamicsFile, FormatError, NetworkFile, SystemFile,
};
use crate::{Command, CommonOpts};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Geometry(#[from] pwacert_core::geometry::GeomError),
    #[error(transparent)]
    Model(#[from] pwacert_core::sysmodel::ModelError),
    #[error(transparent)]
    Reach(#[from] pwacert_core::reach::ReachError),
    #[error(transparent)]
    Sim(#[from] pwacert_core::sim::SimError),
    #[error(transparent)]
    Approx(#[from] pwacert_core::approx::ApproxError),
    #[error(transparent)]
    Encode(#[from] pwacert_core::encode::EncodeError),
    #[error("certification error: {0}")]
    Certify(#[from] CertifyError),
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_NOT_CERTIFIED: u8 = 1;

pub fn dispatch(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Certify {
            system,
            network,
            opts,
        } => run_certify(&system, &network, &opts),
        Command::ApproxCertify {
            dynamics,
            network,
            chessboard,
            guards,
            fit_grid,
            val_grid,
            inflation,
            per_region,
            analytic_bound,
            traj_start,
            opts,
        } => run_approx_certify(
            &dynamics,
            &network,
            chessboard.as_deref(),
            guards.as_deref(),
            &fit_grid,
            &val_grid,
            inflation,
            per_region,
            analytic_bound,
            traj_start.as_deref(),
            &opts,
        ),
        Command::CheckRpi {
            system,
            network,
            set,
            opts,
        } => run_check_rpi(&system, &network, &set, &opts),
        Command::Fmax {
            system,
            network,
            opts,
        } => run_fmax(&system, &network, &opts),
        Command::Rmin {
            system,
            network,
            fmax_file,
            opts,
        } => run_rmin(&system, &network, fmax_file.as_deref(), &opts),
        Command::Support {
            system,
            network,
            set,
            k,
            dir,
            opts,
        } => run_support(&system, &network, &set, k, &dir, &opts),
        Command::Simulate {
            system,
            network,
            x0,
            steps,
            sampler,
            trials,
            opts,
        } => run_simulate(&system, &network, &x0, steps, &sampler, trials, &opts),
        Command::ExportMps {
            system,
            network,
            set,
            k,
            dir,
            opts,
        } => run_export_mps(&system, &network, &set, k, &dir, &opts),
        Command::VerifyInputConstraints {
            system,
            network,
            opts,
        } => run_verify_inputs(&system, &network, &opts),
        Command::Recheck { certificate } => run_recheck(&certificate),
        Command::GenExamples { out_dir } => run_gen_examples(&out_dir),
    }
}

fn load_system(path: &Path) -> Result<PwaSystem, CliError> {
    let file: SystemFile = formats::read_json(path)?;
    Ok(file.into_system()?)
}

fn load_net(path: &Path) -> Result<MaxoutNet, CliError> {
    let file: NetworkFile = formats::read_json(path)?;
    Ok(file.into_net()?)
}

fn parse_vector(text: &str) -> Result<DVector<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    values
        .map(DVector::from_vec)
        .map_err(|e| CliError::BadArgument(format!("vector '{text}': {e}")))
}

fn template_for(opts: &CommonOpts, n: usize) -> Result<TemplateDirections, CliError> {
    match opts.template.as_str() {
        "auto" => Ok(if n == 2 {
            TemplateDirections::octagon()
        } else {
            TemplateDirections::axis_box(n)
        }),
        "octagon" => {
            if n != 2 {
                return Err(CliError::BadArgument(
                    "octagon template requires a planar system".to_string(),
                ));
            }
            Ok(TemplateDirections::octagon())
        }
        "box" => Ok(TemplateDirections::axis_box(n)),
        path => {
            let rows: Vec<Vec<f64>> = formats::read_json(Path::new(path))?;
            let nrows = rows.len();
            let ncols = rows.first().map_or(0, |r| r.len());
            if rows.iter().any(|r| r.len() != ncols) {
                return Err(CliError::BadArgument("ragged template file".to_string()));
            }
            let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
            Ok(TemplateDirections::new(m)?)
        }
    }
}

fn reach_opts(opts: &CommonOpts, n: usize) -> Result<ReachOptions, CliError> {
    Ok(ReachOptions {
        template: template_for(opts, n)?,
        solver: SolverConfig {
            int_tol: opts.int_tol,
            gap_abs: opts.gap_abs,
            lp_tol: opts.lp_tol,
            max_nodes: opts.max_nodes,
            time_limit: opts.time_limit,
            ..Default::default()
        },
        containment_tol: opts.containment_tol,
    })
}

fn certify_config(opts: &CommonOpts) -> CertifyConfig {
    CertifyConfig {
        eps_bar: opts.eps_bar,
        check_stride: opts.check_stride,
        max_iters: opts.max_iters,
        alpha_tol: opts.alpha_tol,
    }
}

fn ensure_out_dir(opts: &CommonOpts) -> Result<(), CliError> {
    std::fs::create_dir_all(&opts.out).map_err(|source| CliError::Io {
        path: opts.out.display().to_string(),
        source,
    })
}

fn write_certificate(dir: &Path, cert: &Certificate) -> Result<(), CliError> {
    let file = CertificateFile {
        timestamp: formats::timestamp(),
        certificate: cert.clone(),
    };
    formats::write_json(&dir.join("certificate.json"), &file)?;
    formats::write_json(&dir.join("fmax.json"), &cert.f_max)?;
    if let Some(r_min) = &cert.r_min {
        formats::write_json(&dir.join("rmin.json"), r_min)?;
    }
    formats::write_support_csv(&dir.join("rmin_supports.csv"), &cert.r_iteration_supports)?;
    Ok(())
}

fn run_certify(system: &Path, network: &Path, opts: &CommonOpts) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    ensure_out_dir(opts)?;
    let ropts = reach_opts(opts, sys.state_dim())?;
    let config = certify_config(opts);
    match certify::assemble_certificate(&sys, &net, &ropts, &config) {
        Ok(cert) => {
            write_certificate(&opts.out, &cert)?;
            println!(
                "verdict: {:?} (f_max iterations {}, k_bar {:?}, alpha {:?}, delta_max {:?})",
                cert.stability_verdict,
                cert.f_max_iterations,
                cert.k_bar,
                cert.alpha,
                cert.delta_max
            );
            Ok(if cert.stability_verdict == StabilityVerdict::AsymptoticallyStable {
                EXIT_OK
            } else {
                EXIT_NOT_CERTIFIED
            })
        }
        Err(CertifyError::NotConverged { max_iters, .. }) => {
            eprintln!("not certified: iteration cap {max_iters} reached");
            Ok(EXIT_NOT_CERTIFIED)
        }
        Err(other) => Err(other.into()),
    }
}

fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::BadArgument(format!(
            "grid '{text}' must be 'points_per_x_axis,points_per_u_axis'"
        )));
    }
    let nx = parts[0]
        .trim()
        .parse()
        .map_err(|e| CliError::BadArgument(format!("grid '{text}': {e}")))?;
    let nu = parts[1]
        .trim()
        .parse()
        .map_err(|e| CliError::BadArgument(format!("grid '{text}': {e}")))?;
    Ok((nx, nu))
}

fn parse_chessboard(text: &str, input_dim: usize) -> Result<Vec<HPolyhedron>, CliError> {
    let (centers, half) = text.split_once(':').ok_or_else(|| {
        CliError::BadArgument("chessboard spec must be 'c1,c2,..:half_side'".to_string())
    })?;
    let centers: Result<Vec<f64>, _> = centers.split(',').map(|t| t.trim().parse()).collect();
    let centers = centers.map_err(|e| CliError::BadArgument(format!("chessboard centers: {e}")))?;
    let half: f64 = half
        .trim()
        .parse()
        .map_err(|e| CliError::BadArgument(format!("chessboard half side: {e}")))?;
    Ok(approx::chessboard_guards(&centers, half, input_dim))
}

#[allow(clippy::too_many_arguments)]
fn run_approx_certify(
    dynamics: &Path,
    network: &Path,
    chessboard: Option<&str>,
    guards_file: Option<&Path>,
    fit_grid: &str,
    val_grid: &str,
    inflation: f64,
    per_region: bool,
    analytic_bound: Option<f64>,
    traj_start: Option<&str>,
    opts: &CommonOpts,
) -> Result<u8, CliError> {
    let dyn_file: DynamicsFile = formats::read_json(dynamics)?;
    let net = load_net(network)?;
    ensure_out_dir(opts)?;

    let generator = dyn_file
        .generator
        .as_deref()
        .and_then(approx::NamedDynamics::parse);
    let base = dyn_file.into_dynamics();

    let (fit_data, val_data) = match generator {
        Some(named) => {
            let f = move |x: &DVector<f64>, u: &DVector<f64>| named.eval(x, u);
            let (fx, fu) = parse_grid(fit_grid)?;
            let (vx, vu) = parse_grid(val_grid)?;
            let fit =
                approx::SampledDynamics::from_grid(&f, &base.domain_x, &base.domain_u, fx, fu)?;
            let val =
                approx::SampledDynamics::from_grid(&f, &base.domain_x, &base.domain_u, vx, vu)?;
            (fit, val)
        }
        None => {
            if base.records.is_empty() {
                return Err(CliError::BadArgument(
                    "dynamics file has no records and no known generator".to_string(),
                ));
            }
            // Without a generator the same records serve fit and validation.
            (base.clone(), base.clone())
        }
    };

    let input_dim = fit_data.domain_u.dim();
    let guards = match (chessboard, guards_file) {
        (Some(spec), None) => parse_chessboard(spec, input_dim)?,
        (None, Some(path)) => formats::read_json::<Vec<HPolyhedron>>(path)?,
        (None, None) => parse_chessboard("-4,0,4:2", input_dim)?,
        (Some(_), Some(_)) => {
            return Err(CliError::BadArgument(
                "--chessboard and --guards are mutually exclusive".to_string(),
            ))
        }
    };

    let fit = approx::fit_least_squares(&fit_data, &guards)?;
    let bounded = match analytic_bound {
        Some(b) => approx::with_analytic_bound(&fit, b)?,
        None => approx::error_bound(&fit, &val_data, inflation, per_region)?,
    };
    println!(
        "residual bound: {:.6} (inflation {inflation}), rms per region: {:?}",
        bounded.region_bounds.iter().cloned().fold(0.0, f64::max),
        bounded
            .fit_rms
            .iter()
            .map(|r| (r * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );
    formats::write_json(
        &opts.out.join("fitted_system.json"),
        &SystemFile::from_system(&bounded.base),
    )?;

    let ropts = reach_opts(opts, bounded.base.state_dim())?;
    let config = certify_config(opts);
    let cert = match approx::uub_certify(&bounded, &net, &ropts, &config) {
        Ok(cert) => cert,
        Err(approx::ApproxError::Certify(CertifyError::NotConverged { max_iters, .. })) => {
            eprintln!("not certified: iteration cap {max_iters} reached");
            return Ok(EXIT_NOT_CERTIFIED);
        }
        Err(other) => return Err(other.into()),
    };
    write_certificate(&opts.out, &cert)?;
    println!(
        "uub verdict: {:?} (f_max iterations {}, k_bar {:?})",
        cert.uub_verdict, cert.f_max_iterations, cert.k_bar
    );

    if let (Some(start), Some(k_bar)) = (traj_start, cert.k_bar) {
        let x0 = parse_vector(start)?;
        emit_reach_tube(&bounded, &net, generator, &x0, k_bar, &ropts, opts)?;
    }

    Ok(if cert.uub_verdict == UubVerdict::UubCertified {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    })
}

/// Per-step reach boxes around a sample trajectory (figure data): the set
/// sequence from the singleton start plus the nonlinear sample trajectory.
fn emit_reach_tube(
    fit: &approx::PwaFit,
    net: &MaxoutNet,
    generator: Option<approx::NamedDynamics>,
    x0: &DVector<f64>,
    k_bar: usize,
    ropts: &ReachOptions,
    opts: &CommonOpts,
) -> Result<(), CliError> {
    let n = x0.len();
    let mut eye = DMatrix::zeros(2 * n, n);
    let mut rhs = DVector::zeros(2 * n);
    for i in 0..n {
        eye[(i, i)] = 1.0;
        rhs[i] = x0[i];
        eye[(n + i, i)] = -1.0;
        rhs[n + i] = -x0[i];
    }
    let point = HPolyhedron::new(eye, rhs)?;
    let tube = reach::overapprox_k(&fit.base, net, &point, k_bar, ropts)?;
    formats::write_json(&opts.out.join("reach_tube.json"), &tube)?;

    if let Some(named) = generator {
        let mut states = vec![x0.clone()];
        for k in 0..k_bar {
            let u = pwacert_core::sysmodel::eval_nn(net, &states[k])?;
            states.push(named.eval(&states[k], &u));
        }
        let rows: Vec<Vec<f64>> = states.iter().map(|x| x.iter().copied().collect()).collect();
        formats::write_json(&opts.out.join("sample_trajectory.json"), &rows)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct RpiReport {
    rpi: bool,
    supports: Vec<f64>,
    facet_offsets: Vec<f64>,
}

fn run_check_rpi(
    system: &Path,
    network: &Path,
    set: &Path,
    opts: &CommonOpts,
) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    let candidate: HPolyhedron = formats::read_json(set)?;
    ensure_out_dir(opts)?;
    let ropts = reach_opts(opts, sys.state_dim())?;
    let (ok, supports) = reach::check_rpi(&sys, &net, &candidate, &ropts)?;
    let report = RpiReport {
        rpi: ok,
        supports: supports.iter().copied().collect(),
        facet_offsets: candidate.b().iter().copied().collect(),
    };
    formats::write_json(&opts.out.join("check_rpi.json"), &report)?;
    println!("rpi: {ok}");
    Ok(if ok { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

fn run_fmax(system: &Path, network: &Path, opts: &CommonOpts) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    ensure_out_dir(opts)?;
    let ropts = reach_opts(opts, sys.state_dim())?;
    match certify::compute_f_max(&sys, &net, &ropts, opts.max_iters) {
        Ok((f_max, iterations, logs)) => {
            formats::write_json(&opts.out.join("fmax.json"), &f_max)?;
            formats::write_support_csv(&opts.out.join("fmax_supports.csv"), &logs)?;
            println!("f_max computed in {iterations} iterations, {} facets", f_max.num_facets());
            Ok(EXIT_OK)
        }
        Err(CertifyError::NotConverged { max_iters, .. }) => {
            eprintln!("no RPI iterate within {max_iters} iterations");
            Ok(EXIT_NOT_CERTIFIED)
        }
        Err(other) => Err(other.into()),
    }
}

fn run_rmin(
    system: &Path,
    network: &Path,
    fmax_file: Option<&Path>,
    opts: &CommonOpts,
) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    ensure_out_dir(opts)?;
    let ropts = reach_opts(opts, sys.state_dim())?;
    let config = certify_config(opts);
    let f_max = match fmax_file {
        Some(path) => formats::read_json(path)?,
        None => certify::compute_f_max(&sys, &net, &ropts, opts.max_iters)?.0,
    };
    match certify::compute_r_min(&sys, &net, &f_max, &config, &ropts) {
        Ok((r_min, k_bar, seq)) => {
            formats::write_json(&opts.out.join("rmin.json"), &r_min)?;
            formats::write_json(&opts.out.join("rmin_sequence.json"), &seq)?;
            let supports: Vec<Vec<f64>> =
                seq.iter().map(|s| s.b().iter().copied().collect()).collect();
            formats::write_support_csv(&opts.out.join("rmin_supports.csv"), &supports)?;
            println!("r_min reached at k_bar = {k_bar}");
            Ok(EXIT_OK)
        }
        Err(CertifyError::NotConverged { max_iters, .. }) => {
            eprintln!("terminal set did not converge within {max_iters} iterations");
            Ok(EXIT_NOT_CERTIFIED)
        }
        Err(other) => Err(other.into()),
    }
}

#[derive(serde::Serialize)]
struct SupportReport {
    k: usize,
    direction: Vec<f64>,
    value: f64,
}

fn run_support(
    system: &Path,
    network: &Path,
    set: &Path,
    k: usize,
    dir: &str,
    opts: &CommonOpts,
) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    let f: HPolyhedron = formats::read_json(set)?;
    ensure_out_dir(opts)?;
    let ropts = reach_opts(opts, sys.state_dim())?;
    let v = parse_vector(dir)?;
    let value = reach::support_reach(&sys, &net, &f, k, &v, &ropts)?;
    println!("{value:.12}");
    formats::write_json(
        &opts.out.join("support.json"),
        &SupportReport {
            k,
            direction: v.iter().copied().collect(),
            value,
        },
    )?;
    Ok(EXIT_OK)
}

fn run_simulate(
    system: &Path,
    network: &Path,
    x0: &str,
    steps: usize,
    sampler: &str,
    trials: usize,
    opts: &CommonOpts,
) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    let x0 = parse_vector(x0)?;
    ensure_out_dir(opts)?;
    let sampler = match sampler {
        "zero" => DisturbanceSampler::Zero,
        "uniform" => DisturbanceSampler::UniformBox,
        "vertices" => DisturbanceSampler::Vertices,
        other => {
            return Err(CliError::BadArgument(format!(
                "unknown sampler '{other}' (zero | uniform | vertices)"
            )))
        }
    };
    if !sys.state_set().contains_point(&x0, 1e-9) {
        return Err(CliError::BadArgument(
            "initial state lies outside the state set".to_string(),
        ));
    }
    for trial in 0..trials {
        let t = sim::simulate(&sys, &net, &x0, steps, sampler, opts.seed + trial as u64)?;
        formats::write_trajectory_csv(&opts.out.join(format!("traj_{trial:03}.csv")), &t)?;
    }
    let nominal = sim::simulate(&sys, &net, &x0, steps, DisturbanceSampler::Zero, opts.seed)?;
    formats::write_trajectory_csv(&opts.out.join("traj_nominal.csv"), &nominal)?;
    println!("wrote {trials} disturbed trajectories + nominal");
    Ok(EXIT_OK)
}

fn run_export_mps(
    system: &Path,
    network: &Path,
    set: &Path,
    k: usize,
    dir: &str,
    opts: &CommonOpts,
) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    let f: HPolyhedron = formats::read_json(set)?;
    ensure_out_dir(opts)?;
    let v = parse_vector(dir)?;
    let enc = pwacert_core::encode::encode_closed_loop(&sys, &net, &f, k)?;
    let mut model = enc.model;
    let terms: Vec<_> = (0..v.len())
        .filter(|&c| v[c] != 0.0)
        .map(|c| (enc.x_vars[k][c], v[c]))
        .collect();
    model.set_objective(terms, milp::Direction::Maximize);
    let text = milp::export_mps(&model, "SUPPORT");
    let path = opts.out.join("model.mps");
    std::fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn run_verify_inputs(system: &Path, network: &Path, opts: &CommonOpts) -> Result<u8, CliError> {
    let sys = load_system(system)?;
    let net = load_net(network)?;
    let ropts = reach_opts(opts, sys.state_dim())?;
    let ok = certify::verify_nn_input_constraints(&net, sys.state_set(), sys.input_set(), &ropts)?;
    println!("input constraints hold on X: {ok}");
    Ok(if ok { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

fn run_recheck(path: &Path) -> Result<u8, CliError> {
    let file: CertificateFile = formats::read_json(path)?;
    let cert = file.certificate;
    let tol = cert.containment_tol;
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("{}: {name}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };

    // Safe-set iterate supports never increase.
    let nested = cert
        .f_iteration_supports
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b <= &(a + tol)));
    check("safe-set iteration supports are nested", nested);

    // Terminal-set sequence shrinks and matches the stored set.
    let r_nested = cert
        .r_iteration_supports
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b <= &(a + tol)));
    check("terminal-set iteration supports are nested", r_nested);

    if let (Some(r_min), Some(last)) = (&cert.r_min, cert.r_iteration_supports.last()) {
        let same = r_min
            .b()
            .iter()
            .zip(last)
            .all(|(a, b)| (a - b).abs() <= 1e-12);
        check("terminal set equals the last iterate", same);

        if let Some(eps_supports) = &cert.eps_check_supports {
            let scale = 1.0 / (1.0 + cert.eps_bar);
            let converged = r_min
                .b()
                .iter()
                .zip(eps_supports)
                .all(|(c, img)| c * scale <= img + tol);
            check("epsilon-convergence condition re-verified", converged);
        }

        if cert.r_iteration_supports.len() >= 2 {
            let prev = &cert.r_iteration_supports[cert.r_iteration_supports.len() - 2];
            let last = &cert.r_iteration_supports[cert.r_iteration_supports.len() - 1];
            let mut alpha_offline = 10.0f64;
            for (p, l) in prev.iter().zip(last) {
                if *l > 0.0 {
                    alpha_offline = alpha_offline.min(p / l);
                }
            }
            if let Some(alpha) = cert.alpha {
                check(
                    "stored alpha matches the support ratios",
                    (alpha - alpha_offline).abs() <= 1e-6 * alpha_offline.max(1.0),
                );
                if let Some(delta) = cert.delta_max {
                    let min_c = last.iter().cloned().fold(f64::INFINITY, f64::min);
                    check(
                        "stability radius matches (alpha - 1) * min support",
                        (delta - (alpha - 1.0) * min_c).abs() <= 1e-9,
                    );
                }
            }
        }
    }

    let verdict_consistent = match cert.stability_verdict {
        StabilityVerdict::AsymptoticallyStable => {
            cert.alpha.is_some_and(|a| a > 1.0 + cert.config.alpha_tol)
        }
        StabilityVerdict::AlphaConditionFailed => {
            cert.alpha.is_some_and(|a| a <= 1.0 + cert.config.alpha_tol)
        }
        StabilityVerdict::NotComputed => cert.alpha.is_none(),
    };
    check("verdict consistent with alpha", verdict_consistent);

    Ok(if ok { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

fn run_gen_examples(out_dir: &Path) -> Result<u8, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let write_sys = |name: &str, sys: &PwaSystem| -> Result<(), CliError> {
        formats::write_json(&out_dir.join(name), &SystemFile::from_system(sys))?;
        Ok(())
    };
    let write_net = |name: &str, net: &MaxoutNet| -> Result<(), CliError> {
        formats::write_json(&out_dir.join(name), &NetworkFile::from_net(net))?;
        Ok(())
    };

    write_sys("scalar.sys.json", &presets::scalar_system()?)?;
    write_net("zero1.net.json", &presets::zero_net(1, 1))?;
    write_sys("quadrant.sys.json", &presets::quadrant_system(0.15)?)?;
    write_net("quadrant_satlqr.net.json", &presets::quadrant_controller()?)?;
    write_net("relu.net.json", &presets::relu_net())?;
    write_net(
        "di_satlqr.net.json",
        &presets::double_integrator_controller()?,
    )?;

    let (dx, du) = presets::double_integrator_domain();
    let dynamics = DynamicsFile {
        domain_x: dx,
        domain_u: du,
        generator: Some("nonlinear_double_integrator".to_string()),
        records: Vec::new(),
    };
    formats::write_json(&out_dir.join("di_dynamics.json"), &dynamics)?;

    // The scalar fixed-point set, handy for check-rpi demos.
    formats::write_json(
        &out_dir.join("scalar_rpi.poly.json"),
        &presets::interval(-0.2, 0.2),
    )?;
    formats::write_json(
        &out_dir.join("scalar_not_rpi.poly.json"),
        &presets::interval(-0.15, 0.15),
    )?;

    println!("wrote example inputs to {}", out_dir.display());
    Ok(EXIT_OK)
}
