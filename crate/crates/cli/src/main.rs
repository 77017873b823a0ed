//! Command-line diagnostics for static charged-field configurations.
//!
//! Every command prints a provenance header (`# ...` lines recording the
//! effective settings) followed by `key=value` report lines, and exits with
//! 0 on pass, 1 on a verified negative, 2 on numerical failure, 64 on usage
//! errors, and 65 on malformed data.

mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use formats::DataError;
use staticmd_core::axisym::{
    coulomb_extract, electric_charge, magnetic_charge, monopole_ledger, MonopoleLedger,
};
use staticmd_core::spherical::{neutrality_flux, solve_spherical, ShootingConfig, SphericalError};
use staticmd_core::spinor::reality_residuals;
use staticmd_core::weighted::{
    decay_exponent_fit, weighted_sobolev_norm, ExteriorDomain, RadialField, SigmaWeight,
    WeightedError, WeightedNormSpec,
};
use staticmd_core::{fd, fit};

const EXIT_PASS: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "staticmd", version, about = "Static field diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the reduced radial system and report the tail fits.
    SolveSpherical {
        #[arg(long)]
        m: f64,
        #[arg(long, allow_negative_numbers = true)]
        e: f64,
        #[arg(long, default_value_t = 1)]
        winding: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        epsilon: i8,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_outer: Option<f64>,
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        /// Where to write the solution CSV.
        #[arg(long, default_value = "radial.csv")]
        out: PathBuf,
        /// Optional Q(r) plot CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check that the enclosed charge of a solution decays away.
    VerifyNeutrality {
        #[arg(long)]
        input: PathBuf,
        /// Required decay: log-log slope of |Q| must be <= -slope_tol.
        #[arg(long, default_value_t = 0.8)]
        slope_tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Electric flux charge of a potential grid.
    FluxElectric {
        #[arg(long)]
        input: PathBuf,
        /// Evaluation radius (defaults to the outermost node).
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Magnetic charge of a potential grid.
    FluxMagnetic {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Coulomb coefficient extraction from the scalar potential.
    CoulombExtract {
        #[arg(long)]
        input: PathBuf,
        /// Ball radius for the fit (defaults to the outermost node).
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Multi-monopole sign arithmetic.
    Ledger {
        /// Comma-separated signs, e.g. `+,+,-`.
        #[arg(long)]
        signs: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        eps: i8,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        e: f64,
    },
    /// Fit the decay exponent of `r,value` samples.
    DecayFit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the reality-condition residuals of a field grid.
    CheckReality {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Weighted norm of `r,value` samples.
    Wnorm {
        #[arg(long)]
        input: PathBuf,
        /// Integrability exponent, a number or `inf`.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        rmax: Option<f64>,
        /// Weight: `r` or `sqrt1r2`.
        #[arg(long, default_value = "r")]
        sigma: String,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
    fn numerical(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            msg: msg.into(),
        }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure {
            code: EXIT_DATA,
            msg: e.to_string(),
        }
    }
}

fn threads() -> usize {
    std::env::var("STATICMD_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn header(cmd: &str, settings: &[(&str, String)]) {
    let mut line = format!("# staticmd {cmd} threads={}", threads());
    for (k, v) in settings {
        line.push_str(&format!(" {k}={v}"));
    }
    println!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::from(EXIT_PASS)
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::SolveSpherical {
            m,
            e,
            winding,
            epsilon,
            r_min,
            r_outer,
            nodes,
            out,
            csv,
        } => cmd_solve(m, e, winding, epsilon, r_min, r_outer, nodes, &out, csv.as_deref()),
        Cmd::VerifyNeutrality {
            input,
            slope_tol,
            csv,
        } => cmd_neutrality(&input, slope_tol, csv.as_deref()),
        Cmd::FluxElectric { input, r, csv } => cmd_flux_electric(&input, r, csv.as_deref()),
        Cmd::FluxMagnetic { input, r, csv } => cmd_flux_magnetic(&input, r, csv.as_deref()),
        Cmd::CoulombExtract { input, rho } => cmd_coulomb(&input, rho),
        Cmd::Ledger { signs, eps, e } => cmd_ledger(&signs, eps, e),
        Cmd::DecayFit { input } => cmd_decay_fit(&input),
        Cmd::CheckReality { input, tol } => cmd_check_reality(&input, tol),
        Cmd::Wnorm {
            input,
            p,
            delta,
            k,
            rho,
            rmax,
            sigma,
        } => cmd_wnorm(&input, &p, delta, k, rho, rmax, &sigma),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    m: f64,
    e: f64,
    winding: u32,
    epsilon: i8,
    r_min: Option<f64>,
    r_outer: Option<f64>,
    nodes: usize,
    out: &std::path::Path,
    csv: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    if m <= 0.0 || e == 0.0 {
        return Err(Failure::usage("need m > 0 and e != 0"));
    }
    let mut config = ShootingConfig::new(staticmd_core::spinor::PhysicalConstants::new(m, e));
    config.winding = winding;
    config.epsilon_sign = epsilon;
    if let Some(v) = r_min {
        config.r_min = v;
    }
    if let Some(v) = r_outer {
        config.r_outer = v;
    }
    config.n_nodes = nodes;
    if !(config.r_min > 0.0 && config.r_min < config.r_outer) || nodes < 16 {
        return Err(Failure::usage("need 0 < r_min < r_outer and >= 16 nodes"));
    }

    header(
        "solve-spherical",
        &[
            ("m", m.to_string()),
            ("e", e.to_string()),
            ("winding", winding.to_string()),
            ("epsilon", epsilon.to_string()),
            ("r_min", config.r_min.to_string()),
            ("r_outer", config.r_outer.to_string()),
            ("nodes", nodes.to_string()),
            ("tail_tol", "0.01/m".into()),
        ],
    );

    let sol = solve_spherical(&config).map_err(|err| match err {
        SphericalError::Config { why } => Failure::usage(why),
        other => Failure::numerical(other.to_string()),
    })?;
    formats::write_radial(out, &sol)?;

    // Tail fits over the outer window, in the same basis the expansion
    // prescribes.
    let lo = 20.0 / m;
    let hi = 100.0 / m;
    let idx: Vec<usize> = (0..sol.r.len())
        .filter(|&i| sol.r[i] >= lo && sol.r[i] <= hi)
        .collect();
    if idx.len() < 8 {
        return Err(Failure::numerical("too few nodes in the tail window"));
    }
    let npi = winding as f64 * std::f64::consts::PI;
    let chi_y: Vec<f64> = idx.iter().map(|&i| sol.chi[i] - npi).collect();
    let inv1: Vec<f64> = idx.iter().map(|&i| sol.r[i].powi(-1)).collect();
    let inv3: Vec<f64> = idx.iter().map(|&i| sol.r[i].powi(-3)).collect();
    let c_chi = fit::linear_least_squares(&[&inv1, &inv3], &chi_y);
    let a0_y: Vec<f64> = idx.iter().map(|&i| sol.a0[i] + m / e).collect();
    let inv2: Vec<f64> = idx.iter().map(|&i| sol.r[i].powi(-2)).collect();
    let inv4: Vec<f64> = idx.iter().map(|&i| sol.r[i].powi(-4)).collect();
    let c_a0 = fit::linear_least_squares(&[&inv2, &inv4], &a0_y);

    let flux = neutrality_flux(&sol);
    if let Some(path) = csv {
        formats::write_series(path, "r,Q", &flux.r, &flux.charge)?;
    }

    println!("chi_tail_coeff={}", c_chi[0]);
    println!("chi_r3_coeff={}", c_chi[1]);
    println!("a0_r2_coeff={}", c_a0[0]);
    println!("a0_r4_coeff={}", c_a0[1]);
    println!("flux_slope={}", flux.slope);
    println!("flux_outer_Q={}", flux.outer_charge);
    println!("xi={}", sol.xi);
    println!("solution_file={}", out.display());

    let ok = (c_chi[0] + 1.0 / m).abs() <= 0.01 / m && (c_a0[0] - 1.0 / (e * m)).abs() <= 0.02 / (e * m).abs();
    println!("verdict={}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { EXIT_PASS } else { EXIT_NEGATIVE })
}

fn charge_series(input: &std::path::Path) -> Result<(Vec<f64>, Vec<f64>, f64), Failure> {
    // Accepts either a radial solution or a potential grid.
    match formats::kind_of(input)?.as_str() {
        "radial" => {
            let f = formats::read_radial(input)?;
            let da0 = fd::derivative(&f.r, &f.a0);
            let q: Vec<f64> = f
                .r
                .iter()
                .zip(&da0)
                .map(|(&r, &d)| r * r * d)
                .collect();
            let scale = f.a0.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            Ok((f.r, q, scale))
        }
        "axipot" => {
            let grid = formats::read_axipot(input)?;
            let mut q = Vec::with_capacity(grid.r_nodes.len());
            for &r in &grid.r_nodes {
                q.push(
                    electric_charge(&grid, r)
                        .map_err(|e| Failure::numerical(e.to_string()))?,
                );
            }
            let scale = grid.a0.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            Ok((grid.r_nodes, q, scale))
        }
        other => Err(DataError(format!("cannot compute flux from a `{other}` file")).into()),
    }
}

fn cmd_neutrality(
    input: &std::path::Path,
    slope_tol: f64,
    csv: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    if slope_tol <= 0.0 {
        return Err(Failure::usage("slope tolerance must be positive"));
    }
    header(
        "verify-neutrality",
        &[
            ("input", input.display().to_string()),
            ("slope_tol", slope_tol.to_string()),
        ],
    );
    let (r, q, scale) = charge_series(input)?;
    if let Some(path) = csv {
        formats::write_series(path, "r,Q", &r, &q)?;
    }
    let q_outer = *q.last().unwrap();
    let q_max = q.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    println!("Q_outer={q_outer}");
    println!("Q_max={q_max}");

    // A potential carrying no flux anywhere is trivially neutral.
    if q_max <= 1e-10 * scale.max(1.0) {
        println!("flux_slope=n/a");
        println!("verdict=PASS");
        return Ok(EXIT_PASS);
    }
    let half = r.len() / 2;
    let lx: Vec<f64> = r[half..].iter().map(|&v| v.ln()).collect();
    let ly: Vec<f64> = q[half..].iter().map(|&v| v.abs().max(1e-300).ln()).collect();
    let slope = fit::line(&lx, &ly).slope;
    println!("flux_slope={slope}");
    let ok = slope <= -slope_tol;
    println!("verdict={}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { EXIT_PASS } else { EXIT_NEGATIVE })
}

fn cmd_flux_electric(
    input: &std::path::Path,
    r: Option<f64>,
    csv: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    let grid = formats::read_axipot(input)?;
    let at = r.unwrap_or(*grid.r_nodes.last().unwrap());
    header(
        "flux-electric",
        &[
            ("input", input.display().to_string()),
            ("r", at.to_string()),
        ],
    );
    let q = electric_charge(&grid, at).map_err(|e| Failure::numerical(e.to_string()))?;
    if let Some(path) = csv {
        let mut series = Vec::with_capacity(grid.r_nodes.len());
        for &ri in &grid.r_nodes {
            series.push(electric_charge(&grid, ri).map_err(|e| Failure::numerical(e.to_string()))?);
        }
        formats::write_series(path, "r,Q", &grid.r_nodes, &series)?;
    }
    println!("electric_Q={q}");
    println!("physical_charge={}", -q);
    Ok(EXIT_PASS)
}

fn cmd_flux_magnetic(
    input: &std::path::Path,
    r: Option<f64>,
    csv: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    let grid = formats::read_axipot(input)?;
    let at = r.unwrap_or(*grid.r_nodes.last().unwrap());
    header(
        "flux-magnetic",
        &[
            ("input", input.display().to_string()),
            ("r", at.to_string()),
        ],
    );
    let b = magnetic_charge(&grid, at).map_err(|e| Failure::numerical(e.to_string()))?;
    if let Some(path) = csv {
        let mut series = Vec::with_capacity(grid.r_nodes.len());
        for &ri in &grid.r_nodes {
            series.push(
                magnetic_charge(&grid, ri)
                    .map_err(|e| Failure::numerical(e.to_string()))?
                    .value(),
            );
        }
        formats::write_series(path, "r,b", &grid.r_nodes, &series)?;
    }
    println!("magnetic_b={}", b.value());
    println!("route_gap={}", b.gap);
    Ok(EXIT_PASS)
}

fn cmd_coulomb(input: &std::path::Path, rho: Option<f64>) -> Result<u8, Failure> {
    let grid = formats::read_axipot(input)?;
    let rho = rho.unwrap_or(*grid.r_nodes.last().unwrap());
    header(
        "coulomb-extract",
        &[
            ("input", input.display().to_string()),
            ("rho", rho.to_string()),
        ],
    );
    let fit = coulomb_extract(&grid, rho).map_err(|e| Failure::numerical(e.to_string()))?;
    println!("coulomb_q={}", fit.q);
    println!("h_sup={}", fit.h_sup);
    println!("fit_rms={}", fit.rms);
    Ok(EXIT_PASS)
}

fn cmd_ledger(signs: &str, eps: i8, e: f64) -> Result<u8, Failure> {
    if eps != 1 && eps != -1 {
        return Err(Failure::usage("eps must be +1 or -1"));
    }
    if e == 0.0 {
        return Err(Failure::usage("e must be nonzero"));
    }
    let parsed: Result<Vec<i8>, _> = signs
        .split(',')
        .map(|t| match t.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(Failure::usage(format!("bad sign token `{other}`"))),
        })
        .collect();
    let parsed = parsed?;
    header(
        "ledger",
        &[
            ("signs", signs.to_string()),
            ("eps", eps.to_string()),
            ("e", e.to_string()),
        ],
    );
    let rep = monopole_ledger(&MonopoleLedger::new(parsed, eps), e);
    println!("ledger_total={} feasible={}", rep.b_total, rep.feasible);
    println!("n={}", rep.n);
    println!("sum={}", rep.sum);
    println!(
        "parity={}",
        match rep.parity {
            staticmd_core::axisym::Parity::EvenForcesZero => "even_forces_zero",
            staticmd_core::axisym::Parity::OddForcesUnit => "odd_forces_unit",
        }
    );
    Ok(if rep.feasible { EXIT_PASS } else { EXIT_NEGATIVE })
}

fn cmd_decay_fit(input: &std::path::Path) -> Result<u8, Failure> {
    header("decay-fit", &[("input", input.display().to_string())]);
    let (r, v) = formats::read_samples(input)?;
    let field = RadialField::new(r, v);
    let fit = decay_exponent_fit(&field).map_err(|e| match e {
        WeightedError::TooFewSamples { .. } => Failure {
            code: EXIT_DATA,
            msg: e.to_string(),
        },
        other => Failure::numerical(other.to_string()),
    })?;
    println!("exponent={}", fit.exponent);
    println!("stderr={}", fit.stderr);
    println!("band={}", fit.band);
    Ok(EXIT_PASS)
}

fn cmd_check_reality(input: &std::path::Path, tol: f64) -> Result<u8, Failure> {
    if tol <= 0.0 {
        return Err(Failure::usage("tolerance must be positive"));
    }
    header(
        "check-reality",
        &[
            ("input", input.display().to_string()),
            ("tol", tol.to_string()),
        ],
    );
    let grid = formats::read_grid(input)?;
    let res = reality_residuals(&grid).map_err(|e| Failure::numerical(e.to_string()))?;
    println!("divergence_max={}", res.divergence_max);
    println!("divergence_l2={}", res.divergence_l2);
    println!("curl_max={}", res.curl_max);
    println!("curl_l2={}", res.curl_l2);
    let ok = res.divergence_max <= tol && res.curl_max <= tol;
    println!("verdict={}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { EXIT_PASS } else { EXIT_NEGATIVE })
}

fn cmd_wnorm(
    input: &std::path::Path,
    p: &str,
    delta: f64,
    k: usize,
    rho: Option<f64>,
    rmax: Option<f64>,
    sigma: &str,
) -> Result<u8, Failure> {
    let p_val = match p {
        "inf" | "Inf" | "INF" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| Failure::usage(format!("bad exponent `{other}`")))?,
    };
    if p_val.is_finite() && p_val < 1.0 {
        return Err(Failure::usage("need p >= 1"));
    }
    let sigma = match sigma {
        "r" => SigmaWeight::Radius,
        "sqrt1r2" => SigmaWeight::SqrtOnePlusR2,
        other => return Err(Failure::usage(format!("bad weight `{other}`"))),
    };
    let (r, v) = formats::read_samples(input)?;
    let lo = rho.unwrap_or(r[0]);
    let hi = rmax.unwrap_or(*r.last().unwrap());
    if !(lo > 0.0 && lo < hi) {
        return Err(Failure::usage("need 0 < rho < rmax"));
    }
    header(
        "wnorm",
        &[
            ("input", input.display().to_string()),
            ("p", p.to_string()),
            ("delta", delta.to_string()),
            ("k", k.to_string()),
            ("rho", lo.to_string()),
            ("rmax", hi.to_string()),
        ],
    );
    let field = RadialField::new(r, v);
    let domain = ExteriorDomain::new(lo, hi);
    let spec = WeightedNormSpec {
        k,
        p: p_val,
        delta,
        sigma,
    };
    let n = weighted_sobolev_norm(&field, &domain, &spec).map_err(|e| match e {
        WeightedError::Quadrature { .. } | WeightedError::Coverage { .. } => Failure {
            code: EXIT_DATA,
            msg: e.to_string(),
        },
        WeightedError::OrderTooHigh { .. } => Failure::usage(e.to_string()),
        other => Failure::numerical(other.to_string()),
    })?;
    println!("truncated={}", n.truncated);
    println!("tail={}", n.tail);
    println!("total={}", n.total);
    Ok(EXIT_PASS)
}
