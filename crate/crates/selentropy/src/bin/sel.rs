//! Command-line front end: load states, measurements and distributions,
//! dispatch the entropy and bound computations, and emit CSV or scalar
//! results. Exit codes: 0 success, 2 input error, 3 numerical failure,
//! 4 validity-threshold violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use selentropy::apps::{compress_simulate, extract_simulate, qkd_rate_curve, ExtractMode};
use selentropy::bounds::{
    aep_converse, aep_direct, format_sig, ucr_residual, upsilon, AepParams, BoundTable,
    UcrVariant,
};
use selentropy::cli::{
    exit_code, figure61, load_dist, load_povm, load_problem, load_state, RunConfig,
};
use selentropy::entropy::{conditional_renyi, h_max, h_min, h_vn, EntropyValue};
use selentropy::error::{Error, Result};
use selentropy::sdp::{set_default_gap_tol, solve, SolveOptions};
use selentropy::smooth::{smooth_h_max, smooth_h_min, SmoothParam};

#[derive(Parser)]
#[command(name = "sel", version, about = "one-shot quantum information toolkit")]
struct Cli {
    /// relative duality-gap tolerance for SDP solves (also: SEL_GAP_TOL)
    #[arg(long, global = true)]
    gap_tol: Option<f64>,
    /// worker threads for the simulators
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// write CSV output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Conditional entropies of a state file
    Entropy {
        #[arg(long)]
        state: PathBuf,
        /// min | max | vn | renyi
        #[arg(long)]
        kind: String,
        /// Renyi order for --kind renyi
        #[arg(long)]
        alpha: Option<f64>,
        /// comma-separated labels of the A side
        #[arg(long)]
        a: String,
        /// comma-separated labels of the conditioning side
        #[arg(long, default_value = "")]
        b: String,
        /// smoothing parameter; 0 or absent for the non-smooth entropy
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Distance between two state files
    Distance {
        /// two --state arguments
        #[arg(long = "state", num_args = 1)]
        states: Vec<PathBuf>,
        /// trace | fidelity | purified
        #[arg(long)]
        kind: String,
    },
    /// Smooth entropies (same as entropy with --eps)
    Smooth {
        #[arg(long)]
        state: PathBuf,
        /// min | max
        #[arg(long)]
        kind: String,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long)]
        eps: f64,
    },
    /// Finite-blocklength AEP bound table over a blocklength grid
    Aep {
        /// per-copy conditional entropy h (bits); or derive via --state
        #[arg(long)]
        h: Option<f64>,
        /// convergence parameter v; or derive via --state
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value = "")]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long)]
        eps: f64,
        /// converse smoothing parameter; enables the converse columns
        #[arg(long)]
        eps2: Option<f64>,
        /// comma-separated blocklengths
        #[arg(long)]
        n: String,
    },
    /// Uncertainty-relation residual on a tripartite state
    Ucr {
        #[arg(long)]
        state: PathBuf,
        /// measurement file for the X POVM
        #[arg(long)]
        x: PathBuf,
        /// measurement file for the Y POVM
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// overlap | vn
        #[arg(long, default_value = "overlap")]
        variant: String,
    },
    /// Finite-key rate table
    Qkd {
        #[arg(long)]
        q: f64,
        /// correctness epsilon
        #[arg(long)]
        eps: f64,
        /// secrecy epsilon
        #[arg(long)]
        eps2: f64,
        /// comma-separated blocklengths
        #[arg(long)]
        n: String,
    },
    /// Random-binning compression simulator
    CompressSim {
        /// joint distribution file (rows: source symbol, cols: side info)
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: usize,
        /// message length in bits
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Toeplitz-hashing extraction simulator
    ExtractSim {
        #[arg(long)]
        dist: PathBuf,
        /// output length in bits
        #[arg(long)]
        ell: usize,
        /// sample this many hash seeds instead of exhausting them
        #[arg(long)]
        samples: Option<u64>,
        /// required with --samples
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve a standard-form problem file, printing alpha, beta and gap
    SdpSolve {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Surprisal-versus-cumulative-probability curves for binary trials
    Figure61 {
        #[arg(long)]
        p: f64,
        /// comma-separated blocklengths (feasible to 20)
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
}

fn parse_labels(s: &str) -> Vec<&str> {
    s.split(',').map(|x| x.trim()).filter(|x| !x.is_empty()).collect()
}

fn parse_grid(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| Error::Parse(format!("blocklength: {e}"))))
        .collect()
}

fn print_value(name: &str, v: &EntropyValue) -> Result<()> {
    let bits = v.bits()?;
    let tol = v.tol();
    let gap_rel = 2.0f64.powf(tol) - 1.0;
    println!("{name} = {bits:.6} ± {tol:.3e} bits (relative sdp gap <= {gap_rel:.3e})");
    Ok(())
}

fn emit(table: &BoundTable, out: &Option<PathBuf>) -> Result<()> {
    let csv = table.to_csv();
    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| Error::Argument(format!("worker pool: {e}")))?;
    }
    if let Ok(tol) = std::env::var("SEL_GAP_TOL") {
        let tol: f64 = tol.parse().map_err(|e| Error::Parse(format!("SEL_GAP_TOL: {e}")))?;
        set_default_gap_tol(tol);
    }
    if let Some(tol) = cli.gap_tol {
        set_default_gap_tol(tol);
    }
    let config = RunConfig {
        gap_tol: cli.gap_tol,
        workers: cli.workers,
        out: cli.out.clone(),
        ..Default::default()
    };
    config.validate()?;

    match cli.cmd {
        Cmd::Entropy { state, kind, alpha, a, b, eps } => {
            let rho = load_state(&state)?;
            let a = parse_labels(&a);
            let b = parse_labels(&b);
            let eps = eps.unwrap_or(0.0);
            let value = match (kind.as_str(), eps) {
                ("min", e) if e > 0.0 => smooth_h_min(&rho, &a, &b, SmoothParam::new(e)?)?.0,
                ("max", e) if e > 0.0 => smooth_h_max(&rho, &a, &b, SmoothParam::new(e)?)?.0,
                ("min", _) => h_min(&rho, &a, &b)?,
                ("max", _) => h_max(&rho, &a, &b)?,
                ("vn", _) => h_vn(&rho, &a, &b)?,
                ("renyi", _) => {
                    let alpha = alpha
                        .ok_or_else(|| Error::Argument("--kind renyi needs --alpha".into()))?;
                    conditional_renyi(alpha, &rho, &a, &b)?
                }
                (other, _) => {
                    return Err(Error::Argument(format!("unknown entropy kind `{other}`")))
                }
            };
            print_value(&format!("H_{kind}"), &value)?;
        }
        Cmd::Distance { states, kind } => {
            if states.len() != 2 {
                return Err(Error::Argument("distance needs exactly two --state".into()));
            }
            let rho = load_state(&states[0])?;
            let tau = load_state(&states[1])?;
            let value = match kind.as_str() {
                "trace" => selentropy::metrics::trace_distance(&rho, &tau)?.value,
                "fidelity" => selentropy::metrics::fidelity(&rho, &tau)?.value,
                "purified" => selentropy::metrics::purified_distance(&rho, &tau)?.value,
                other => return Err(Error::Argument(format!("unknown distance `{other}`"))),
            };
            println!("{kind} = {value:.12}");
        }
        Cmd::Smooth { state, kind, a, b, eps } => {
            let rho = load_state(&state)?;
            let a = parse_labels(&a);
            let b = parse_labels(&b);
            let e = SmoothParam::new(eps)?;
            let (value, smoothed) = match kind.as_str() {
                "min" => smooth_h_min(&rho, &a, &b, e)?,
                "max" => smooth_h_max(&rho, &a, &b, e)?,
                other => return Err(Error::Argument(format!("unknown smooth kind `{other}`"))),
            };
            print_value(&format!("H_{kind}^eps"), &value)?;
            println!("smoothed state distance = {:.6e}", smoothed.distance_to_original);
        }
        Cmd::Aep { h, v, state, a, b, eps, eps2, n } => {
            let (h, v) = match (h, v, state) {
                (Some(h), Some(v), _) => (h, v),
                (_, _, Some(path)) => {
                    let rho = load_state(&path)?;
                    let a = parse_labels(&a);
                    let b = parse_labels(&b);
                    let h = h_vn(&rho, &a, &b)?.bits()?;
                    let (marg, da, _) =
                        selentropy::entropy::conditional_marginal(&rho, &a, &b)?;
                    let rb = if b.is_empty() {
                        selentropy::operators::HermitianOp::diag(&[1.0])
                    } else {
                        marg.partial_trace(&b)?.op().clone()
                    };
                    let sigma = selentropy::operators::HermitianOp::identity(da).kron(&rb);
                    (h, upsilon(marg.op(), &sigma)?)
                }
                _ => {
                    return Err(Error::Argument(
                        "aep needs either --h and --v or a --state".into(),
                    ))
                }
            };
            let grid = parse_grid(&n)?;
            let mut table = if eps2.is_some() {
                BoundTable::new(&["n", "min_lower", "max_upper", "min_upper", "max_lower"])
            } else {
                BoundTable::new(&["n", "min_lower", "max_upper"])
            };
            for &n in &grid {
                let p = AepParams::new(n, eps, h, v)?;
                let (lo, hi) = aep_direct(&p)?;
                match eps2 {
                    Some(e2) => {
                        let (up, low) = aep_converse(&p, e2)?;
                        table.push(vec![n as f64, lo, hi, up, low])?;
                    }
                    None => table.push(vec![n as f64, lo, hi])?,
                }
            }
            emit(&table, &cli.out)?;
        }
        Cmd::Ucr { state, x, y, a, b, c, eps, variant } => {
            let rho = load_state(&state)?;
            let x = load_povm(&x)?;
            let y = load_povm(&y)?;
            let a_labels = parse_labels(&a);
            if a_labels.len() != 1 {
                return Err(Error::Argument("ucr needs exactly one measured label".into()));
            }
            let b = parse_labels(&b);
            let c = parse_labels(&c);
            let variant = match variant.as_str() {
                "overlap" => UcrVariant::Overlap { k: None },
                "vn" => UcrVariant::VonNeumann { candidates: &[] },
                other => return Err(Error::Argument(format!("unknown variant `{other}`"))),
            };
            let res = ucr_residual(&rho, a_labels[0], &b, &c, &x, &y, eps, variant)?;
            println!("residual = {res:.9}");
        }
        Cmd::Qkd { q, eps, eps2, n } => {
            let grid = parse_grid(&n)?;
            let table = qkd_rate_curve(q, eps, eps2, &grid)?;
            emit(&table, &cli.out)?;
        }
        Cmd::CompressSim { dist, n, m, trials, seed } => {
            let p = load_dist(&dist)?;
            let p_err = compress_simulate(&p, n, m, trials, seed)?;
            println!("p_err = {}", format_sig(p_err, 12));
        }
        Cmd::ExtractSim { dist, ell, samples, seed } => {
            let p = load_dist(&dist)?;
            let mode = match samples {
                Some(count) => ExtractMode::Sampled {
                    count,
                    seed: seed
                        .ok_or_else(|| Error::Argument("--samples needs --seed".into()))?,
                },
                None => ExtractMode::Exhaustive,
            };
            let avg = extract_simulate(&p, ell, mode)?;
            println!("avg_delta = {}", format_sig(avg, 12));
        }
        Cmd::SdpSolve { problem } => {
            let p = load_problem(&problem)?;
            let sol = solve(&p, &SolveOptions::default())?;
            if sol.status != selentropy::sdp::SdpStatus::Optimal {
                return Err(Error::Sdp(format!("status {:?}", sol.status)));
            }
            println!("alpha = {}", format_sig(sol.alpha, 12));
            println!("beta = {}", format_sig(sol.beta, 12));
            println!("gap = {}", format_sig(sol.gap, 12));
        }
        Cmd::Figure61 { p, n, eps } => {
            let grid = parse_grid(&n)?;
            let grid: Vec<u32> = grid.into_iter().map(|x| x as u32).collect();
            let table = figure61(p, &grid, eps)?;
            emit(&table, &cli.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
