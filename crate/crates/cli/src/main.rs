//! Batch command-line front end: every capability behind one binary with
//! reproducible seeds and machine-readable output.
//!
//! Exit codes: 0 success, 1 verified-property failure (a decay-bound
//! violation or a failed statistical verdict), 2 usage or parameter error.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ewens_core::elementary::{verify_decay_bound, ElementarySpec};
use ewens_core::ewens::{enumerate_ewens, EwensParam};
use ewens_core::perm::Permutation;
use ewens_core::setpart::{all_partitions, SetPartition};
use ewens_core::ssep::{
    fundamental_transform, fundamental_transform_inverse, right_to_left_minima, shape_to_word,
    ssep_steady_sample, word_to_shape, BinaryWord, Shape, SsepChain,
};
use ewens_core::stats::{
    adjacency_count, count_bivincular, count_dashed, count_local, exceedance_count, gamma_p,
    theoretical,
};
use ewens_core::Rat;
use ewens_cli::fastpat::pattern_counter;
use ewens_cli::mc::{
    self, gaussian_diagnostic, poisson_diagnostic, run_map, CumulantEstimate, GaussianReport,
    PoissonReport, RunConfig, VarianceEstimate,
};
use ewens_cli::wire::{self, envelope, float, rat_to_string};
use num_traits::ToPrimitive;
use rand::Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "ewens",
    version,
    about = "Exact and Monte-Carlo analysis of Ewens random permutations"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the document to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Clone)]
struct SampleArgs {
    /// Permutation size.
    #[arg(long)]
    n: usize,
    /// Measure parameter (positive real).
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = library default); output does not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Draw Ewens permutations.
    Sample(SampleArgs),
    /// Exhaustively list (permutation, weight) pairs for sizes up to 9.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Exact rational, e.g. 2 or 1/2.
        #[arg(long, default_value = "1")]
        theta: String,
    },
    /// Statistics of one permutation.
    Stats {
        /// One-line word, e.g. 3,7,5,2,1,6,4.
        #[arg(long)]
        sigma: String,
        /// Dashed pattern as JSON {"tau":[2,1],"X":[1]} (repeatable).
        #[arg(long)]
        pattern: Vec<String>,
        /// Bivincular pattern as JSON {"tau":..,"X":..,"Y":..} (repeatable).
        #[arg(long)]
        bivincular: Vec<String>,
        /// Local statistic as JSON {"p":..,"constraints":[..]} (repeatable).
        #[arg(long)]
        local: Vec<String>,
    },
    /// Joint moment of elementary events, exact or symbolic in the size.
    Moment {
        #[arg(long)]
        i: String,
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "1")]
        theta: String,
        /// Evaluate at this size; omit with --symbolic.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = false)]
        symbolic: bool,
    },
    /// Joint cumulant of grouped elementary events.
    Cumulant {
        #[arg(long)]
        i: String,
        #[arg(long)]
        s: String,
        /// Grouping partition as JSON, e.g. [[1],[2]].
        #[arg(long)]
        tau: String,
        #[arg(long, default_value = "1")]
        theta: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = false)]
        symbolic: bool,
    },
    /// Check the cumulant decay bound for one spec (exit 1 on violation).
    VerifyBound {
        #[arg(long)]
        i: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value = "1")]
        theta: String,
    },
    /// Sweep every collision pattern up to a given arity plus random
    /// arity-4 specs (exit 1 on any violation).
    SweepBound {
        #[arg(long, default_value_t = 3)]
        max_r: usize,
        /// Comma-separated rationals.
        #[arg(long, default_value = "1/2,1,2")]
        thetas: String,
        /// Number of random arity-4 specs.
        #[arg(long, default_value_t = 200)]
        random4: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gaussian-limit diagnostic for a pattern over a size grid, or for
    /// the exceedance profile at fixed points.
    Clt {
        /// "pattern" or "profile".
        #[arg(long, default_value = "pattern")]
        stat: String,
        /// Dashed pattern as JSON (pattern mode).
        #[arg(long)]
        pattern: Option<String>,
        /// Size grid, e.g. 200,400,800 (pattern mode).
        #[arg(long, default_value = "200,400,800")]
        n_grid: String,
        /// Profile evaluation points, e.g. 0.25,0.5,0.75 (profile mode).
        #[arg(long, default_value = "0.25,0.5,0.75")]
        x: String,
        /// Size for profile mode.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = 4.0)]
        se_multiple: f64,
    },
    /// Poisson-limit diagnostic for cycle counts or adjacencies
    /// (exit 1 when the verdict fails).
    Poisson {
        /// "gamma" (cycle counts) or "adjacency".
        #[arg(long, default_value = "gamma")]
        stat: String,
        /// Cycle length for the gamma statistic.
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 100000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = 0.01)]
        tv_threshold: f64,
        #[arg(long, default_value_t = 4.0)]
        se_multiple: f64,
    },
    /// Limiting-variance estimate for a dashed pattern.
    PatternVariance {
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value = "200,400,800")]
        n_grid: String,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Draw steady-state particle configurations.
    SsepSample {
        #[arg(long)]
        sites: usize,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the exclusion-process chain; optionally retain thinned states.
    SsepMcmc {
        #[arg(long)]
        sites: usize,
        /// Right-exit rate in (0, 1].
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1000000)]
        steps: u64,
        /// Retain every thin-th state (0 = report the final state only).
        #[arg(long, default_value_t = 0)]
        thin: u64,
        #[arg(long, default_value_t = 0)]
        burnin: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convert between staircase shapes and border words.
    ShapeWord {
        /// Row lengths, e.g. 3,3,2,0.
        #[arg(long)]
        rows: Option<String>,
        /// 0/1 word, e.g. 101001.
        #[arg(long)]
        word: Option<String>,
    },
    /// The cycle-to-word transform of a permutation (or its inverse).
    Psi {
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value_t = false)]
        inverse: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let rendered = match render(&cli, &outcome) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let write_result = match &cli.out {
                Some(path) => std::fs::write(path, rendered.as_bytes()).map_err(|e| anyhow!("{e}")),
                None => std::io::stdout()
                    .write_all(rendered.as_bytes())
                    .map_err(|e| anyhow!("{e}")),
            };
            if let Err(e) = write_result {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.property_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// A finished run: the JSON document, optional raw CSV lines, a pretty
/// rendering, and whether a verified property failed.
struct Outcome {
    doc: Value,
    csv: Option<String>,
    pretty: String,
    property_failed: bool,
}

impl Outcome {
    fn new(doc: Value, pretty: String) -> Self {
        Outcome {
            doc,
            csv: None,
            pretty,
            property_failed: false,
        }
    }
}

fn render(cli: &Cli, outcome: &Outcome) -> Result<String> {
    Ok(match cli.format {
        Format::Json => format!("{:#}\n", outcome.doc),
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| anyhow!("csv output is not available for this subcommand"))?,
        Format::Pretty => outcome.pretty.clone(),
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Sample(args) => sample_cmd(args),
        Command::Enumerate { n, theta } => enumerate_cmd(*n, theta),
        Command::Stats {
            sigma,
            pattern,
            bivincular,
            local,
        } => stats_cmd(sigma, pattern, bivincular, local),
        Command::Moment {
            i,
            s,
            theta,
            n,
            symbolic,
        } => moment_cmd(i, s, theta, *n, *symbolic),
        Command::Cumulant {
            i,
            s,
            tau,
            theta,
            n,
            symbolic,
        } => cumulant_cmd(i, s, tau, theta, *n, *symbolic, false),
        Command::VerifyBound { i, s, tau, theta } => {
            cumulant_cmd(i, s, tau, theta, None, true, true)
        }
        Command::SweepBound {
            max_r,
            thetas,
            random4,
            seed,
        } => sweep_cmd(*max_r, thetas, *random4, *seed),
        Command::Clt {
            stat,
            pattern,
            n_grid,
            x,
            n,
            theta,
            samples,
            seed,
            workers,
            se_multiple,
        } => clt_cmd(
            stat,
            pattern.as_deref(),
            n_grid,
            x,
            *n,
            *theta,
            *samples,
            *seed,
            *workers,
            *se_multiple,
        ),
        Command::Poisson {
            stat,
            p,
            n,
            theta,
            samples,
            seed,
            workers,
            tv_threshold,
            se_multiple,
        } => poisson_cmd(
            stat,
            *p,
            *n,
            *theta,
            *samples,
            *seed,
            *workers,
            *tv_threshold,
            *se_multiple,
        ),
        Command::PatternVariance {
            pattern,
            n_grid,
            theta,
            samples,
            seed,
            workers,
        } => pattern_variance_cmd(pattern, n_grid, *theta, *samples, *seed, *workers),
        Command::SsepSample {
            sites,
            theta,
            samples,
            seed,
        } => ssep_sample_cmd(*sites, *theta, *samples, *seed),
        Command::SsepMcmc {
            sites,
            beta,
            steps,
            thin,
            burnin,
            seed,
        } => ssep_mcmc_cmd(*sites, *beta, *steps, *thin, *burnin, *seed),
        Command::ShapeWord { rows, word } => shape_word_cmd(rows.as_deref(), word.as_deref()),
        Command::Psi { sigma, inverse } => psi_cmd(sigma, *inverse),
    }
}

fn sample_cmd(args: &SampleArgs) -> Result<Outcome> {
    let cfg = RunConfig {
        n: args.n,
        theta: args.theta,
        samples: args.samples,
        seed: args.seed,
        workers: args.workers,
    };
    let perms: Vec<Vec<usize>> = run_map(&cfg, |sigma| sigma.one_line().to_vec())?;
    let config = json!({
        "n": args.n, "theta": float(args.theta), "samples": args.samples,
        "seed": args.seed, "workers": args.workers,
    });
    let doc = envelope("sample", config, json!({ "permutations": perms }));
    let mut csv = String::from("sample,sigma\n");
    for (k, p) in perms.iter().enumerate() {
        let word: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        csv.push_str(&format!("{k},\"{}\"\n", word.join(",")));
    }
    let mut pretty = String::new();
    for p in &perms {
        let word: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        pretty.push_str(&word.join(","));
        pretty.push('\n');
    }
    Ok(Outcome {
        doc,
        csv: Some(csv),
        pretty,
        property_failed: false,
    })
}

fn enumerate_cmd(n: usize, theta_str: &str) -> Result<Outcome> {
    let theta = wire::parse_rat(theta_str)?;
    let param = EwensParam::new(theta).map_err(|e| anyhow!("{e}"))?;
    let pairs: Vec<(Permutation, Rat)> = enumerate_ewens(n, &param)
        .map_err(|e| anyhow!("{e}"))?
        .collect();
    let items: Vec<Value> = pairs
        .iter()
        .map(|(p, w)| json!({"sigma": p.one_line(), "weight": rat_to_string(w)}))
        .collect();
    let config = json!({"n": n, "theta": theta_str});
    let doc = envelope("enumerate", config, json!({ "permutations": items }));
    let mut csv = String::from("sigma,weight\n");
    let mut pretty = String::new();
    for (p, w) in &pairs {
        let word: Vec<String> = p.one_line().iter().map(|v| v.to_string()).collect();
        csv.push_str(&format!("\"{}\",{}\n", word.join(","), rat_to_string(w)));
        pretty.push_str(&format!("{p}  {}\n", rat_to_string(w)));
    }
    Ok(Outcome {
        doc,
        csv: Some(csv),
        pretty,
        property_failed: false,
    })
}

fn stats_cmd(
    sigma: &str,
    patterns: &[String],
    bivinculars: &[String],
    locals: &[String],
) -> Result<Outcome> {
    let sigma = wire::parse_perm_arg(sigma)?;
    let (cycles, by_len) = sigma.cycle_stats();
    let cycle_lengths: BTreeMap<String, usize> =
        by_len.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let mut result = json!({
        "n": sigma.size(),
        "cycles": { "total": cycles, "by_length": cycle_lengths },
        "exceedances": exceedance_count(&sigma),
        "adjacencies": adjacency_count(&sigma),
        "right_to_left_minima": right_to_left_minima(&sigma),
    });
    let mut pattern_counts = Vec::new();
    for raw in patterns {
        let pat = wire::parse_dashed_arg(raw)?;
        pattern_counts.push(json!({
            "pattern": wire::dashed_to_value(&pat),
            "count": count_dashed(&sigma, &pat),
        }));
    }
    for raw in bivinculars {
        let v: Value = serde_json::from_str(raw).context("bivincular pattern must be JSON")?;
        let pat = wire::bivincular_from_value(&v)?;
        pattern_counts.push(json!({
            "pattern": v,
            "count": count_bivincular(&sigma, &pat),
        }));
    }
    for raw in locals {
        let stat = wire::parse_local_arg(raw)?;
        pattern_counts.push(json!({
            "local": serde_json::from_str::<Value>(raw)?,
            "count": count_local(&sigma, &stat),
        }));
    }
    if !pattern_counts.is_empty() {
        result["patterns"] = json!(pattern_counts);
    }
    let config = json!({"sigma": sigma.one_line()});
    let pretty = format!(
        "n={} cycles={} exceedances={} adjacencies={} rtl_minima={}\n",
        sigma.size(),
        cycles,
        exceedance_count(&sigma),
        adjacency_count(&sigma),
        right_to_left_minima(&sigma)
    );
    Ok(Outcome::new(envelope("stats", config, result), pretty))
}

fn moment_cmd(
    i: &str,
    s: &str,
    theta_str: &str,
    n: Option<usize>,
    symbolic: bool,
) -> Result<Outcome> {
    let i = wire::parse_usize_list(i)?;
    let s = wire::parse_usize_list(s)?;
    let theta = wire::parse_rat(theta_str)?;
    let config = json!({"i": i, "s": s, "theta": theta_str, "n": n, "symbolic": symbolic});
    let (result, pretty) = if symbolic || n.is_none() {
        let f = ewens_core::elementary::joint_moment_symbolic(&i, &s, &theta)
            .map_err(|e| anyhow!("{e}"))?;
        let p = f.to_factored_string().unwrap_or_else(|| format!("{f}"));
        (
            json!({"moment": wire::ratfun_to_value(&f)}),
            format!("{p}\n"),
        )
    } else {
        let m = ewens_core::elementary::joint_moment(&i, &s, &theta, n.unwrap())
            .map_err(|e| anyhow!("{e}"))?;
        (
            json!({"moment": rat_to_string(&m)}),
            format!("{}\n", rat_to_string(&m)),
        )
    };
    Ok(Outcome::new(envelope("moment", config, result), pretty))
}

fn parse_spec(i: &str, s: &str, tau: &str) -> Result<ElementarySpec> {
    let i = wire::parse_usize_list(i)?;
    let s = wire::parse_usize_list(s)?;
    let tau = wire::parse_partition_arg(i.len(), tau)?;
    ElementarySpec::new(i, s, tau).map_err(|e| anyhow!("{e}"))
}

fn cumulant_cmd(
    i: &str,
    s: &str,
    tau: &str,
    theta_str: &str,
    n: Option<usize>,
    symbolic: bool,
    verify: bool,
) -> Result<Outcome> {
    let spec = parse_spec(i, s, tau)?;
    let theta = wire::parse_rat(theta_str)?;
    let command = if verify { "verify-bound" } else { "cumulant" };
    let config = json!({
        "spec": wire::spec_to_value(&spec), "theta": theta_str,
        "n": n, "symbolic": symbolic || verify,
    });
    if !verify && !symbolic {
        let n = n.ok_or_else(|| anyhow!("--n or --symbolic required"))?;
        let k =
            ewens_core::elementary::joint_cumulant(&spec, &theta, n).map_err(|e| anyhow!("{e}"))?;
        let pretty = format!("{}\n", rat_to_string(&k));
        return Ok(Outcome::new(
            envelope(command, config, json!({"cumulant": rat_to_string(&k)})),
            pretty,
        ));
    }
    let report = verify_decay_bound(&spec, &theta).map_err(|e| anyhow!("{e}"))?;
    let result = json!({
        "cumulant": wire::ratfun_to_value(&report.cumulant),
        "degree": wire::degree_to_value(report.degree),
        "bound": report.bound,
        "holds": report.holds,
    });
    let pretty = format!(
        "cumulant = {}\ndegree = {} bound = {} holds = {}\n",
        report
            .cumulant
            .to_factored_string()
            .unwrap_or_else(|| format!("{}", report.cumulant)),
        report.degree,
        report.bound,
        report.holds
    );
    let mut outcome = Outcome::new(envelope(command, config, result), pretty);
    outcome.property_failed = verify && !report.holds;
    Ok(outcome)
}

/// Every collision pattern of `2r` index slots, realized by numbering the
/// blocks of each set partition of the slots.
fn collision_specs(r: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    all_partitions(2 * r)
        .expect("2r <= 12")
        .map(|pi| {
            let i = (1..=r).map(|slot| pi.block_of(slot) + 1).collect();
            let s = (r + 1..=2 * r).map(|slot| pi.block_of(slot) + 1).collect();
            (i, s)
        })
        .collect()
}

fn sweep_cmd(max_r: usize, thetas_str: &str, random4: usize, seed: u64) -> Result<Outcome> {
    if max_r > 3 {
        bail!("exhaustive sweep supported for arity up to 3");
    }
    let thetas: Vec<Rat> = thetas_str
        .split(',')
        .map(wire::parse_rat)
        .collect::<Result<_>>()?;
    let mut checked = 0u64;
    let mut violations: Vec<Value> = Vec::new();
    let mut worst_slack: Option<i64> = None;
    let mut check = |spec: &ElementarySpec, theta: &Rat| -> Result<()> {
        let report = verify_decay_bound(spec, theta).map_err(|e| anyhow!("{e}"))?;
        checked += 1;
        if let ewens_core::ratfun::Degree::Finite(d) = report.degree {
            let slack = report.bound - d;
            worst_slack = Some(worst_slack.map_or(slack, |w: i64| w.min(slack)));
        }
        if !report.holds {
            violations.push(json!({
                "spec": wire::spec_to_value(spec),
                "theta": rat_to_string(theta),
                "degree": wire::degree_to_value(report.degree),
                "bound": report.bound,
            }));
        }
        Ok(())
    };
    for r in 1..=max_r {
        let taus: Vec<SetPartition> = all_partitions(r).map_err(|e| anyhow!("{e}"))?.collect();
        for (i, s) in collision_specs(r) {
            for tau in &taus {
                for theta in &thetas {
                    let spec = ElementarySpec::new(i.clone(), s.clone(), tau.clone())
                        .map_err(|e| anyhow!("{e}"))?;
                    check(&spec, theta)?;
                }
            }
        }
    }
    let taus4: Vec<SetPartition> = all_partitions(4).map_err(|e| anyhow!("{e}"))?.collect();
    let mut rng = mc::sample_rng(seed, 0);
    for _ in 0..random4 {
        let i: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=8)).collect();
        let s: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=8)).collect();
        let tau = taus4[rng.gen_range(0..taus4.len())].clone();
        for theta in &thetas {
            let spec = ElementarySpec::new(i.clone(), s.clone(), tau.clone())
                .map_err(|e| anyhow!("{e}"))?;
            check(&spec, theta)?;
        }
    }
    let config = json!({
        "max_r": max_r, "thetas": thetas_str, "random4": random4, "seed": seed,
    });
    let holds = violations.is_empty();
    let result = json!({
        "checked": checked,
        "violations": violations,
        "holds": holds,
        "worst_slack": worst_slack,
    });
    let pretty = format!(
        "checked {checked} specs: {}\n",
        if holds { "all bounds hold" } else { "VIOLATIONS" }
    );
    let mut outcome = Outcome::new(envelope("sweep-bound", config, result), pretty);
    outcome.property_failed = !holds;
    Ok(outcome)
}

fn cumulant_table(estimates: &[CumulantEstimate]) -> Value {
    json!(estimates
        .iter()
        .map(|e| json!({
            "order": e.order,
            "value": float(e.value),
            "std_error": float(e.std_error),
            "samples": e.samples,
        }))
        .collect::<Vec<_>>())
}

fn poisson_report_value(r: &PoissonReport) -> Value {
    json!({
        "lambda": float(r.lambda),
        "tv": float(r.tv),
        "tv_threshold": float(r.tv_threshold),
        "tv_ok": r.tv_ok,
        "k1_ok": r.k1_ok,
        "k2_ok": r.k2_ok,
        "cumulants": cumulant_table(&r.cumulants),
        "se_multiple": float(r.se_multiple),
        "verdict": r.verdict,
    })
}

#[allow(clippy::too_many_arguments)]
fn poisson_cmd(
    stat: &str,
    p: usize,
    n: usize,
    theta: f64,
    samples: usize,
    seed: u64,
    workers: usize,
    tv_threshold: f64,
    se_multiple: f64,
) -> Result<Outcome> {
    let cfg = RunConfig {
        n,
        theta,
        samples,
        seed,
        workers,
    };
    let (xs, lambda): (Vec<f64>, f64) = match stat {
        "gamma" => {
            if p == 0 {
                bail!("--p must be at least 1");
            }
            let xs = run_map(&cfg, move |sigma| gamma_p(sigma, p) as f64)?;
            (xs, theta / p as f64)
        }
        "adjacency" => {
            let xs = run_map(&cfg, |sigma| adjacency_count(sigma) as f64)?;
            (xs, 2.0)
        }
        other => bail!("unknown statistic {other:?} (expected gamma or adjacency)"),
    };
    let report = poisson_diagnostic(&xs, lambda, tv_threshold, se_multiple, seed)?;
    let config = json!({
        "stat": stat, "p": p, "n": n, "theta": float(theta), "samples": samples,
        "seed": seed, "workers": workers, "tv_threshold": float(tv_threshold),
        "se_multiple": float(se_multiple),
    });
    let pretty = format!(
        "lambda={} tv={:.6} k1={:.6} k2={:.6} verdict={}\n",
        report.lambda,
        report.tv,
        report.cumulants[0].value,
        report.cumulants[1].value,
        if report.verdict { "pass" } else { "FAIL" }
    );
    let mut csv = String::from("sample,value\n");
    for (k, x) in xs.iter().enumerate() {
        csv.push_str(&format!("{k},{x}\n"));
    }
    let mut outcome = Outcome::new(
        envelope("poisson", config, poisson_report_value(&report)),
        pretty,
    );
    outcome.csv = Some(csv);
    outcome.property_failed = !report.verdict;
    Ok(outcome)
}

fn gaussian_report_value(r: &GaussianReport) -> Value {
    json!({
        "points": r.points.iter().map(|p| json!({
            "n": p.n,
            "samples": p.samples,
            "k2": float(p.k2), "k2_se": float(p.k2_se),
            "k3": float(p.k3), "k3_se": float(p.k3_se),
            "k4": float(p.k4), "k4_se": float(p.k4_se),
        })).collect::<Vec<_>>(),
        "k3_ok": r.k3_ok,
        "k4_ok": r.k4_ok,
        "k2_stable": r.k2_stable,
        "se_multiple": float(r.se_multiple),
        "verdict": r.verdict,
    })
}

#[allow(clippy::too_many_arguments)]
fn clt_cmd(
    stat: &str,
    pattern: Option<&str>,
    n_grid: &str,
    x: &str,
    n: usize,
    theta: f64,
    samples: usize,
    seed: u64,
    workers: usize,
    se_multiple: f64,
) -> Result<Outcome> {
    match stat {
        "pattern" => {
            let raw = pattern.ok_or_else(|| anyhow!("--pattern required in pattern mode"))?;
            let pat = wire::parse_dashed_arg(raw)?;
            let grid = wire::parse_usize_list(n_grid)?;
            let counter = pattern_counter(&pat);
            let p = pat.size() as i32;
            let q = pat.num_adjacencies() as i32;
            let limit = theoretical::dashed_mean_limit(pat.size(), pat.num_adjacencies())
                .to_f64()
                .unwrap();
            let mut by_n = Vec::new();
            let mut means = Vec::new();
            for (gi, &size) in grid.iter().enumerate() {
                let cfg = RunConfig {
                    n: size,
                    theta,
                    samples,
                    seed: seed.wrapping_add(gi as u64),
                    workers,
                };
                let scale = (size as f64).powi(p - q);
                let zs: Vec<f64> = run_map(&cfg, |sigma| {
                    (size as f64).sqrt() * (counter(sigma) as f64 / scale - limit)
                })?;
                let normalized_mean =
                    zs.iter().sum::<f64>() / zs.len() as f64 / (size as f64).sqrt() + limit;
                let se =
                    (mc::k_statistics(&zs)[1] / zs.len() as f64).sqrt() / (size as f64).sqrt();
                means.push(json!({
                    "n": size,
                    "normalized_mean": float(normalized_mean),
                    "limit": float(limit),
                    "std_error": float(se),
                    "mean_ok": (normalized_mean - limit).abs() <= se_multiple * se,
                }));
                by_n.push((size, zs));
            }
            let report = gaussian_diagnostic(&by_n, se_multiple, seed)?;
            let config = json!({
                "stat": stat, "pattern": wire::dashed_to_value(&pat),
                "n_grid": grid, "theta": float(theta), "samples": samples,
                "seed": seed, "workers": workers, "se_multiple": float(se_multiple),
            });
            let mut result = gaussian_report_value(&report);
            result["means"] = json!(means);
            let verdict = report.verdict.unwrap_or(false)
                && means.iter().all(|m| m["mean_ok"].as_bool() == Some(true));
            result["overall"] = json!(verdict);
            let pretty = format!(
                "pattern CLT: gaussian verdict {:?}, overall {}\n",
                report.verdict, verdict
            );
            let mut outcome = Outcome::new(envelope("clt", config, result), pretty);
            outcome.property_failed = !verdict;
            Ok(outcome)
        }
        "profile" => {
            let points: Vec<f64> = x
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| anyhow!("bad x {t:?}: {e}"))
                })
                .collect::<Result<_>>()?;
            let theta_rat = Rat::from_float(theta).ok_or_else(|| anyhow!("bad theta"))?;
            let ms: Vec<usize> = points
                .iter()
                .map(|&x| (x * n as f64).round() as usize)
                .collect();
            let exact_means: Vec<f64> = ms
                .iter()
                .map(|&m| theoretical::f_mean_exact(n, &theta_rat, m).to_f64().unwrap())
                .collect();
            let cfg = RunConfig {
                n,
                theta,
                samples,
                seed,
                workers,
            };
            let ms_for_stat = ms.clone();
            let rows: Vec<Vec<f64>> = run_map(&cfg, move |sigma| {
                let mut acc = 0usize;
                let mut next = 0usize;
                let mut out = vec![0.0; ms_for_stat.len()];
                for i in 1..=sigma.size() {
                    if sigma.image(i) >= i {
                        acc += 1;
                    }
                    while next < ms_for_stat.len() && i == ms_for_stat[next] {
                        out[next] = acc as f64 / sigma.size() as f64;
                        next += 1;
                    }
                }
                out
            })?;
            let mut by_x = Vec::new();
            let mut zs_by_x: Vec<Vec<f64>> = Vec::new();
            for (k, &xk) in points.iter().enumerate() {
                let zs: Vec<f64> = rows
                    .iter()
                    .map(|r| (n as f64).sqrt() * (r[k] - exact_means[k]))
                    .collect();
                let fbar = rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64;
                let se = (mc::k_statistics(&zs)[1] / zs.len() as f64).sqrt() / (n as f64).sqrt();
                let limit = theoretical::f_limit(xk);
                by_x.push(json!({
                    "x": float(xk),
                    "mean": float(fbar),
                    "exact_mean": float(exact_means[k]),
                    "limit": float(limit),
                    "std_error": float(se),
                    "mean_ok": (fbar - limit).abs() <= se_multiple * se,
                }));
                zs_by_x.push(zs);
            }
            let mut covs = Vec::new();
            let mut cov_ok_all = true;
            for a in 0..points.len() {
                for b in a..points.len() {
                    let cov = mc::covariance(&zs_by_x[a], &zs_by_x[b]);
                    let se = mc::bootstrap_cov_se(&zs_by_x[a], &zs_by_x[b], seed ^ 0xC0);
                    let target =
                        theoretical::exceedance_covariance_kernel_f64(points[a], points[b]);
                    let ok = (cov - target).abs() <= se_multiple * se;
                    cov_ok_all &= ok;
                    covs.push(json!({
                        "x1": float(points[a]), "x2": float(points[b]),
                        "covariance": float(cov), "kernel": float(target),
                        "std_error": float(se), "ok": ok,
                    }));
                }
            }
            let gauss_input: Vec<(usize, Vec<f64>)> =
                zs_by_x.into_iter().map(|z| (n, z)).collect();
            let report = gaussian_diagnostic(&gauss_input, se_multiple, seed)?;
            let config = json!({
                "stat": stat, "x": points.iter().map(|&v| float(v)).collect::<Vec<_>>(),
                "n": n, "theta": float(theta), "samples": samples, "seed": seed,
                "workers": workers, "se_multiple": float(se_multiple),
            });
            let mut result = gaussian_report_value(&report);
            result["profile"] = json!(by_x);
            result["covariances"] = json!(covs);
            let verdict = report.verdict.unwrap_or(false)
                && cov_ok_all
                && by_x.iter().all(|m| m["mean_ok"].as_bool() == Some(true));
            result["overall"] = json!(verdict);
            let pretty = format!("profile CLT verdict: {verdict}\n");
            let mut outcome = Outcome::new(envelope("clt", config, result), pretty);
            outcome.property_failed = !verdict;
            Ok(outcome)
        }
        other => bail!("unknown clt statistic {other:?} (expected pattern or profile)"),
    }
}

fn pattern_variance_cmd(
    pattern: &str,
    n_grid: &str,
    theta: f64,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Outcome> {
    let pat = wire::parse_dashed_arg(pattern)?;
    let grid = wire::parse_usize_list(n_grid)?;
    let cfg = RunConfig {
        n: 0,
        theta,
        samples,
        seed,
        workers,
    };
    let estimate: VarianceEstimate = mc::estimate_v(&pat, &grid, &cfg)?;
    let config = json!({
        "pattern": wire::dashed_to_value(&pat), "n_grid": grid,
        "theta": float(theta), "samples": samples, "seed": seed, "workers": workers,
    });
    let result = json!({
        "v": float(estimate.v),
        "std_error": float(estimate.std_error),
        "correction": float(estimate.correction),
        "positivity_margin": float(estimate.positivity_margin()),
        "points": estimate.points.iter().map(|p| json!({
            "n": p.n, "samples": p.samples,
            "scaled_variance": float(p.scaled_variance),
            "std_error": float(p.std_error),
        })).collect::<Vec<_>>(),
        "exact_small_n": estimate.exact_small_n.iter()
            .map(|(n, v)| json!({"n": n, "variance": v}))
            .collect::<Vec<_>>(),
    });
    let pretty = format!(
        "V = {:.6} +- {:.6} (positivity margin {:.1} se)\n",
        estimate.v,
        estimate.std_error,
        estimate.positivity_margin()
    );
    Ok(Outcome::new(
        envelope("pattern-variance", config, result),
        pretty,
    ))
}

fn ssep_sample_cmd(sites: usize, theta: f64, samples: usize, seed: u64) -> Result<Outcome> {
    let param = EwensParam::from_f64(theta).map_err(|e| anyhow!("{e}"))?;
    let words: Vec<String> = (0..samples)
        .map(|k| {
            let mut rng = mc::sample_rng(seed, k as u64);
            ssep_steady_sample(sites, &param, &mut rng)
                .map(|w| w.to_string())
                .map_err(|e| anyhow!("{e}"))
        })
        .collect::<Result<_>>()?;
    let config = json!({
        "sites": sites, "theta": float(theta), "samples": samples, "seed": seed,
    });
    let doc = envelope("ssep-sample", config, json!({ "words": words }));
    let mut csv = String::from("sample,word\n");
    for (k, w) in words.iter().enumerate() {
        csv.push_str(&format!("{k},{w}\n"));
    }
    let pretty = words.join("\n") + "\n";
    Ok(Outcome {
        doc,
        csv: Some(csv),
        pretty,
        property_failed: false,
    })
}

fn ssep_mcmc_cmd(
    sites: usize,
    beta: f64,
    steps: u64,
    thin: u64,
    burnin: u64,
    seed: u64,
) -> Result<Outcome> {
    let mut rng = mc::sample_rng(seed, 0);
    let mut chain =
        SsepChain::new(sites, beta, BinaryWord::zeros(sites)).map_err(|e| anyhow!("{e}"))?;
    for _ in 0..burnin {
        chain.step(&mut rng);
    }
    let config = json!({
        "sites": sites, "beta": float(beta), "steps": steps, "thin": thin,
        "burnin": burnin, "seed": seed,
    });
    if thin == 0 {
        for _ in 0..steps {
            chain.step(&mut rng);
        }
        let word = chain.state().to_string();
        let pretty = format!("{word}\n");
        return Ok(Outcome::new(
            envelope("ssep-mcmc", config, json!({"word": word})),
            pretty,
        ));
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut retained = 0u64;
    let mut t = 0u64;
    while t + thin <= steps {
        for _ in 0..thin {
            chain.step(&mut rng);
        }
        t += thin;
        *counts.entry(chain.state().to_string()).or_insert(0) += 1;
        retained += 1;
    }
    let law: Vec<Value> = counts
        .iter()
        .map(|(w, c)| {
            json!({"word": w, "count": c, "frequency": float(*c as f64 / retained as f64)})
        })
        .collect();
    let result = json!({"retained": retained, "law": law});
    let mut csv = String::from("word,count,frequency\n");
    for (w, c) in &counts {
        csv.push_str(&format!("{w},{c},{}\n", *c as f64 / retained as f64));
    }
    let pretty = format!("retained {retained} states over {} words\n", counts.len());
    let mut outcome = Outcome::new(envelope("ssep-mcmc", config, result), pretty);
    outcome.csv = Some(csv);
    Ok(outcome)
}

fn shape_word_cmd(rows: Option<&str>, word: Option<&str>) -> Result<Outcome> {
    match (rows, word) {
        (Some(rows_str), None) => {
            let rows = wire::parse_usize_list(rows_str)?;
            let shape = Shape::new(rows.clone()).map_err(|e| anyhow!("{e}"))?;
            let w = shape_to_word(&shape);
            let config = json!({"rows": rows});
            let pretty = format!("{w}\n");
            Ok(Outcome::new(
                envelope("shape-word", config, json!({"word": w.to_string()})),
                pretty,
            ))
        }
        (None, Some(word_str)) => {
            let w = BinaryWord::from_str(word_str).map_err(|e| anyhow!("{e}"))?;
            let shape = word_to_shape(&w);
            let config = json!({"word": word_str});
            let rows = shape.rows().to_vec();
            let pretty = format!(
                "{}\n",
                rows.iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            Ok(Outcome::new(
                envelope("shape-word", config, json!({"rows": rows})),
                pretty,
            ))
        }
        _ => bail!("exactly one of --rows or --word is required"),
    }
}

fn psi_cmd(sigma: &str, inverse: bool) -> Result<Outcome> {
    let sigma = wire::parse_perm_arg(sigma)?;
    let image = if inverse {
        fundamental_transform_inverse(&sigma)
    } else {
        fundamental_transform(&sigma)
    };
    let config = json!({"sigma": sigma.one_line(), "inverse": inverse});
    let word: Vec<String> = image.one_line().iter().map(|v| v.to_string()).collect();
    let pretty = format!("{}\n", word.join(","));
    Ok(Outcome::new(
        envelope("psi", config, json!({"image": image.one_line()})),
        pretty,
    ))
}
