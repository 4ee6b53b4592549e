//! `rotacov` command-line front end.
//!
//! Every verb prints one JSON document (or CSV with `--csv` where a
//! coefficient sequence is the natural output). Exit codes: 0 on success,
//! 2 for input errors, 3 when the SDP solver fails.

mod state;

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use rotacov::covariant::{
    channel_output, deterministic_feasible, max_fidelity, max_fidelity_pure_target, max_prob, KrausBlocks,
};
use rotacov::majorana::majorana_stars;
use rotacov::poly::{canonical, charfun_mixed, charfun_pure};
use rotacov::solver::SolveReport;
use rotacov::u1::{
    coherent_charfun_coeffs, extraction_probability, mean_delta_n, phase_uncertainty, squeezed_target_coeffs,
    su2_coherent_line_feasible, u1_deterministic_feasible, variance_delta_n, InterferometerSpec, ProbSeq,
};
use rotacov::{BlockDensity, HalfInt, SpinSpace, C64};
use serde_json::{json, Map, Value};

use state::{complex, density_json, State};

#[derive(Parser, Debug)]
#[command(name = "rotacov", version, about = "Rotationally covariant conversions of spin states")]
struct Cli {
    /// Run the jobs listed in a JSON file concurrently; each job is an
    /// argument list such as ["charfun", "psi.json"].
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical coefficients of the characteristic function.
    Charfun {
        state: PathBuf,
        #[arg(long)]
        normalize: bool,
        /// Print `a,b,c,d,re,im` rows instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Largest probability of a covariant conversion psi -> phi.
    Maxprob {
        psi: PathBuf,
        phi: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Whether psi -> phi is possible with certainty.
    Detfeasible {
        psi: PathBuf,
        phi: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Best fidelity reachable from rho by a covariant channel.
    Fidelity {
        rho: PathBuf,
        sigma: PathBuf,
        /// Use the program for a pure target (sigma must be a ket).
        #[arg(long)]
        pure_target: bool,
        #[arg(long)]
        normalize: bool,
    },
    /// Coherent light plus a two-photon state in a two-arm interferometer.
    Interferometer {
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Imaginary part of the coherent amplitude.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma_im: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Squeezing angle in [0, pi/2), or `optimal`.
        #[arg(long, default_value = "0")]
        tau: String,
        #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
        theta: f64,
        /// Laurent window; chosen automatically when absent.
        #[arg(long)]
        kmax: Option<usize>,
        /// Print `k,C_k,P_k` rows instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Majorana constellation of a single-irrep state.
    Majorana {
        state: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Phase-covariant (or, with --line, SU(2) top-state) conversion test.
    U1check {
        /// Source weights: `0.25,0.5,0.25` (indices 0, 1, ...) or `1/2:0.5,3/2:0.5`.
        #[arg(long)]
        p: String,
        /// Target weights, same syntax.
        #[arg(long)]
        q: String,
        /// Treat indices as spins of `|j, j⟩` superpositions.
        #[arg(long)]
        line: bool,
    },
}

enum Output {
    Json(Value),
    Csv(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.batch, cli.command) {
        (Some(path), None) => run_batch(path),
        (Some(_), Some(_)) => Err(anyhow!("--batch cannot be combined with a command")),
        (None, Some(cmd)) => run(cmd),
        (None, None) => Err(anyhow!("no command given; see --help")),
    };
    match result {
        Ok(out) => {
            print!("{}", render(out));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let solver = e.chain().any(|c| matches!(c.downcast_ref::<rotacov::Error>(), Some(rotacov::Error::Solver(_))));
    if solver {
        3
    } else {
        2
    }
}

fn render(out: Output) -> String {
    match out {
        Output::Json(mut v) => {
            round_value(&mut v);
            format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON values serialize"))
        }
        Output::Csv(s) => s,
    }
}

/// Rounds to 12 significant digits; `-0` prints as `0`.
fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap();
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = serde_json::Number::from_f64(round12(n.as_f64().unwrap())).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn run_batch(path: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let jobs: Value = serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    let jobs = jobs.as_array().ok_or_else(|| anyhow!("{}: expected an array of jobs", path.display()))?;
    let args: Vec<Vec<String>> = jobs
        .iter()
        .enumerate()
        .map(|(i, job)| {
            let list = job.get("args").unwrap_or(job);
            list.as_array()
                .and_then(|a| a.iter().map(|x| x.as_str().map(String::from)).collect::<Option<Vec<_>>>())
                .ok_or_else(|| anyhow!("job {i}: expected an array of strings"))
        })
        .collect::<Result<_>>()?;
    let results: Vec<Value> = args
        .par_iter()
        .map(|a| {
            let outcome = Cli::try_parse_from(std::iter::once("rotacov".to_string()).chain(a.iter().cloned()))
                .map_err(|e| anyhow!("{}", e.to_string().trim()))
                .and_then(|cli| match (cli.batch, cli.command) {
                    (None, Some(cmd)) => run(cmd),
                    _ => bail!("a batch job must be a single command"),
                });
            match outcome {
                Ok(Output::Json(v)) => json!({"args": a, "exit": 0, "result": v}),
                Ok(Output::Csv(s)) => json!({"args": a, "exit": 0, "result": s}),
                Err(e) => json!({"args": a, "exit": exit_code(&e), "error": format!("{e:#}")}),
            }
        })
        .collect();
    Ok(Output::Json(Value::Array(results)))
}

fn run(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Charfun { state, normalize, csv } => charfun(&state::load(&state, normalize)?, csv),
        Command::Maxprob { psi, phi, normalize } => {
            let (psi, phi) = (state::load(&psi, normalize)?, state::load(&phi, normalize)?);
            let r = max_prob(psi.ket("psi")?, phi.ket("phi")?)?;
            Ok(Output::Json(json!({
                "p": r.p,
                "rho": density_json(&r.rho),
                "sigma": density_json(&r.sigma),
                "solver_report": r.report.as_ref().map(report_json),
            })))
        }
        Command::Detfeasible { psi, phi, normalize } => {
            let (psi, phi) = (state::load(&psi, normalize)?, state::load(&phi, normalize)?);
            let r = deterministic_feasible(psi.ket("psi")?, phi.ket("phi")?)?;
            Ok(Output::Json(json!({
                "feasible": r.feasible,
                "xi": r.xi.as_ref().map(density_json),
                "solver_report": r.report.as_ref().map(report_json),
            })))
        }
        Command::Fidelity { rho, sigma, pure_target, normalize } => {
            let (rho, sigma) = (state::load(&rho, normalize)?, state::load(&sigma, normalize)?);
            let input = rho.density();
            let r = if pure_target {
                max_fidelity_pure_target(&input, sigma.ket("sigma")?)?
            } else {
                max_fidelity(&input, &sigma.density())?
            };
            let out = channel_output(&input.on_space(&r.channel.index.input_space()), &r.channel)?;
            Ok(Output::Json(json!({
                "fidelity": r.fidelity,
                "channel_blocks": channel_json(&r.channel),
                "output_state": density_json(&occupied(&out)),
                "solver_report": report_json(&r.report),
            })))
        }
        Command::Interferometer { gamma, gamma_im, epsilon, tau, theta, kmax, csv } => {
            interferometer(C64::new(gamma, gamma_im), epsilon, &tau, theta, kmax, csv)
        }
        Command::Majorana { state, normalize } => {
            let st = state::load(&state, normalize)?;
            let c = majorana_stars(st.ket("state")?)?;
            let stars: Vec<Value> =
                c.stars.iter().map(|(s, k)| json!({"n": s.components(), "multiplicity": k})).collect();
            Ok(Output::Json(json!({"j": c.j.to_string(), "stars": stars})))
        }
        Command::U1check { p, q, line } => {
            let (p, q) = (parse_seq(&p).context("--p")?, parse_seq(&q).context("--q")?);
            if line {
                let r = su2_coherent_line_feasible(&p, &q)?;
                Ok(Output::Json(json!({"feasible": r.feasible, "xi": seq_json(&r.xi)})))
            } else {
                let r = u1_deterministic_feasible(&p, &q)?;
                Ok(Output::Json(json!({"feasible": r.feasible, "delta": r.delta, "w": seq_json(&r.w)})))
            }
        }
    }
}

fn charfun(st: &State, csv: bool) -> Result<Output> {
    let chi = match st {
        State::Ket(k) => charfun_pure(k),
        State::Density(d) => charfun_mixed(d),
    };
    let pi = canonical(&chi);
    let key = |e: [u32; 4]| format!("{},{},{},{}", e[0], e[1], e[2], e[3]);
    if csv {
        let mut s = String::from("a,b,c,d,re,im\n");
        for (e, x) in pi.terms() {
            s += &format!("{},{},{}\n", key(e), round12(x.re), round12(x.im));
        }
        return Ok(Output::Csv(s));
    }
    let mut m = Map::new();
    for (e, x) in pi.terms() {
        m.insert(key(e), complex(x));
    }
    Ok(Output::Json(Value::Object(m)))
}

fn interferometer(gamma: C64, epsilon: f64, tau: &str, theta: f64, kmax: Option<usize>, csv: bool) -> Result<Output> {
    let tau = match tau.trim() {
        "optimal" => InterferometerSpec::optimal_tau(),
        t => t.parse::<f64>().map_err(|_| anyhow!("--tau: expected a number or `optimal`"))?,
    };
    let spec = InterferometerSpec::new(gamma, epsilon, tau, theta)?;
    let e = extraction_probability(&spec, kmax)?;
    let x = gamma.norm_sqr();
    let window = kmax.unwrap_or_else(|| e.k_used.max((4.0 * x).ceil() as usize + 40)).max(5);
    let c = coherent_charfun_coeffs(gamma, window);
    let p = squeezed_target_coeffs(&spec, window)?;
    if csv {
        let mut s = String::from("k,C_k,P_k\n");
        for (k, ck) in c.iter() {
            s += &format!("{k},{},{}\n", round12(ck), round12(p.get(k)));
        }
        return Ok(Output::Csv(s));
    }
    let delta = phase_uncertainty(&spec).ok();
    let factor = delta.filter(|_| x > 0.0).map(|d| d * 2.0 * x.sqrt());
    Ok(Output::Json(json!({
        "gamma": complex(gamma),
        "epsilon": epsilon,
        "tau": tau,
        "theta": theta,
        "k_max": window,
        "C_k": c.iter().map(|(_, v)| v).collect::<Vec<_>>(),
        "P_k": p.iter().map(|(_, v)| v).collect::<Vec<_>>(),
        "p_extract": e.p,
        "argmin_k": e.argmin,
        "tail": {
            "k_used": e.k_used,
            "growth": e.certificate.growth,
            "max_shift": e.certificate.max_shift,
            "threshold": e.certificate.threshold,
            "checked": e.certificate.checked,
        },
        "mean_delta_n": mean_delta_n(&spec),
        "variance_delta_n": variance_delta_n(&spec),
        "delta_theta": delta,
        "improvement_factor": factor,
    })))
}

fn parse_seq(s: &str) -> Result<ProbSeq> {
    let mut out = Vec::new();
    for (i, item) in s.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
        let (k, w) = match item.split_once(':') {
            Some((k, w)) => (k.parse::<HalfInt>()?, w),
            None => (HalfInt::from_int(i as i32), item),
        };
        let w: f64 = w.trim().parse().map_err(|_| anyhow!("entry {i}: `{w}` is not a number"))?;
        out.push((k, w));
    }
    Ok(ProbSeq::new(out)?)
}

fn seq_json(s: &ProbSeq) -> Value {
    Value::Object(s.iter().map(|(k, x)| (k.to_string(), json!(x))).collect())
}

fn report_json(r: &SolveReport) -> Value {
    json!({
        "status": format!("{:?}", r.status),
        "objective": r.objective,
        "primal_residual": r.primal_residual,
        "dual_residual": r.dual_residual,
        "gap": r.gap,
        "iterations": r.iterations,
        "tolerance": r.tolerance,
    })
}

fn channel_json(f: &KrausBlocks) -> Value {
    let blocks: Vec<Value> = f
        .index
        .blocks
        .iter()
        .zip(&f.blocks)
        .map(|((big, pairs), m)| {
            let pairs: Vec<Value> = pairs.iter().map(|(jp, j)| json!([jp.to_string(), j.to_string()])).collect();
            let rows: Vec<Value> =
                (0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| complex(m[(r, c)])).collect())).collect();
            json!({"J": big.to_string(), "pairs": pairs, "F": rows})
        })
        .collect();
    json!({"j_in": f.index.j_in.to_string(), "j_out": f.index.j_out.to_string(), "blocks": blocks})
}

/// Drops irreps whose population is negligible.
fn occupied(rho: &BlockDensity) -> BlockDensity {
    let keep = SpinSpace::new(rho.weights().into_iter().filter(|&(_, w)| w > 1e-10).map(|(j, _)| j));
    rho.on_space(&keep)
}
