


use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use odot_core::checks::{run_full_suite, SuiteConfig};
use odot_core::extremal::{
    lambda_estimate, opnorm_root_sequence, ExtremalProblem, SearchBudget,
};
use odot_core::norm::RhoExponent;
use odot_core::scalar::{Field, Scalar};
use odot_core::series::{
    BlockSeries, Certificate, CoefficientMap, ConvergenceOptions, ConvergenceVerdict,
};

use odot_cli::fmt;
use odot_cli::io::{parse_series_file, CliError, RunReport};

/// Graded power series explorer: convergence radii, verdicts, the
/// indeterminacy layer, and extremal norm constants.
#[derive(Parser)]
#[command(name = "odot", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Series coefficient file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Truncation degree; defaults to the highest degree in the file.
    /// Terms above it are dropped with a notice.
    #[arg(long)]
    max_degree: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write a machine-readable JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print numbers with maximum precision instead of 9 significant digits.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct BudgetArgs {
    /// Independent search restarts.
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Coordinate sweeps per restart.
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    /// Seed for the restart substreams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            restarts: self.restarts,
            iters: self.iters,
            seed: self.seed,
            ..SearchBudget::default()
        }
    }
}

fn parse_rho_arg(s: &str) -> Result<RhoExponent, String> {
    let value = match s {
        "inf" | "infinity" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| format!("rho must be a number >= 1 or \"inf\", got \"{other}\""))?,
    };
    RhoExponent::new(value).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the convergence radius of a series.
    Radius {
        #[command(flatten)]
        input: InputArgs,
        /// Norm exponent in [1, inf]; accepts "inf".
        #[arg(long, value_parser = parse_rho_arg)]
        rho: RhoExponent,
        /// Trailing nonzero blocks the estimate uses (default: last half,
        /// at least 3).
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the truncated series at a point.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated coordinates; complex entries like 0.1+0.2i.
        #[arg(long)]
        point: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probe absolute convergence at a point.
    Converges {
        #[command(flatten)]
        input: InputArgs,
        /// Norm exponent in [1, inf]; accepts "inf".
        #[arg(long, value_parser = parse_rho_arg)]
        rho: RhoExponent,
        /// Comma-separated coordinates; complex entries like 0.1+0.2i.
        #[arg(long)]
        point: String,
        /// Trailing nonzero blocks the radius estimate uses.
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the indeterminacy layer between the certified regions.
    Layer {
        #[command(flatten)]
        input: InputArgs,
        /// Norm exponent in [1, inf]; accepts "inf".
        #[arg(long, value_parser = parse_rho_arg)]
        rho: RhoExponent,
        /// Trailing nonzero blocks the radius estimate uses.
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scan a sphere of the conjugate norm for divergence witnesses.
    Witness {
        #[command(flatten)]
        input: InputArgs,
        /// Norm exponent in [1, inf]; accepts "inf".
        #[arg(long, value_parser = parse_rho_arg)]
        rho: RhoExponent,
        /// Radius of the scanned sphere in the conjugate norm.
        #[arg(long)]
        r1: f64,
        /// Number of random directions besides the diagonal one.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Seed for the sampled directions.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trailing nonzero blocks the radius estimate uses.
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate the best lower constant for the graded product norm.
    Lambda {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n_prime: usize,
        /// Row degree of the left factor.
        #[arg(long)]
        p: usize,
        /// Column degree of the left factor.
        #[arg(long)]
        p_prime: usize,
        /// Row degree of the right factor.
        #[arg(long)]
        q: usize,
        /// Column degree of the right factor.
        #[arg(long)]
        q_prime: usize,
        /// Norm exponent in [1, inf]; accepts "inf".
        #[arg(long, value_parser = parse_rho_arg)]
        rho: RhoExponent,
        /// Which scalar field's unit sphere to search.
        #[arg(long, default_value = "real", value_parser = ["real", "complex", "both"])]
        field: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare multilinear operator norms with the weighted norms,
    /// block by block.
    Opnorm {
        #[command(flatten)]
        input: InputArgs,
        /// Norm exponent in [1, inf]; accepts "inf".
        #[arg(long, value_parser = parse_rho_arg)]
        rho: RhoExponent,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the randomized verification suite and exit nonzero on any
    /// violation.
    Verify {
        /// Seed for the randomized instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::CheckFailure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

struct LoadedSeries {
    series: BlockSeries,
    truncation: usize,
    terms: usize,
    dropped: usize,
}

fn load_series(input: &InputArgs) -> Result<LoadedSeries, CliError> {
    let map = parse_series_file(&input.input)?;
    let natural = map.max_degree().unwrap_or(0);
    let truncation = input.max_degree.unwrap_or(natural);
    let (map, dropped) = if natural > truncation {
        let mut truncated = CoefficientMap::new(
            map.vars(),
            map.col_vars(),
            map.col_degree(),
            map.field(),
        )?;
        let mut dropped = 0usize;
        for (alpha, alpha_prime, value) in map.iter() {
            if alpha.degree() <= truncation {
                let scalar = match map.field() {
                    Field::Real => Scalar::Real(value.re),
                    Field::Complex => Scalar::Complex(value),
                };
                truncated.insert(alpha.clone(), alpha_prime.clone(), scalar)?;
            } else {
                dropped += 1;
            }
        }
        (truncated, dropped)
    } else {
        (map, 0)
    };
    let terms = map.len();
    let series = BlockSeries::from_coefficients(&map, truncation)?;
    Ok(LoadedSeries {
        series,
        truncation,
        terms,
        dropped,
    })
}

fn describe_series(loaded: &LoadedSeries) {
    let s = &loaded.series;
    println!(
        "series: n={} n'={} q'={} field={} truncation={} terms={}",
        s.vars(),
        s.col_vars(),
        s.col_degree(),
        s.field(),
        loaded.truncation,
        loaded.terms
    );
    if loaded.dropped > 0 {
        println!(
            "note: dropped {} terms above degree {}",
            loaded.dropped, loaded.truncation
        );
    }
}

fn certificate_json(cert: &Certificate) -> serde_json::Value {
    match cert {
        Certificate::GeometricTail { ratio, tail_bound } => json!({
            "kind": "geometric_tail",
            "ratio": ratio,
            "tail_bound": tail_bound,
        }),
        Certificate::TermGrowth {
            component,
            window_start,
            sums,
        } => json!({
            "kind": "term_growth",
            "component": component,
            "window_start": window_start,
            "sums": sums,
        }),
        Certificate::Inconclusive { ratio } => json!({
            "kind": "inconclusive",
            "ratio": ratio,
        }),
    }
}

fn verdict_json(verdict: &ConvergenceVerdict) -> serde_json::Value {
    json!({
        "status": verdict.status.to_string(),
        "certificate": certificate_json(&verdict.certificate),
        "components": verdict.components,
        "grouped_status": verdict.grouped_status.to_string(),
        "grouped_certificate": certificate_json(&verdict.grouped_certificate),
        "grouped_components": verdict.grouped_components,
        "point_norm": verdict.point_norm,
        "rate": verdict.rate,
    })
}

fn print_verdict(verdict: &ConvergenceVerdict, full: bool) {
    println!("verdict: {}", verdict.status);
    println!(
        "point norm (conjugate exponent) = {}",
        fmt::sig(verdict.point_norm, full)
    );
    println!("estimated growth rate = {}", fmt::sig(verdict.rate, full));
    match &verdict.certificate {
        Certificate::GeometricTail { ratio, tail_bound } => {
            println!(
                "certificate: geometric tail, ratio = {}, tail bound = {}",
                fmt::sig(*ratio, full),
                fmt::sig(*tail_bound, full)
            );
        }
        Certificate::TermGrowth {
            component,
            window_start,
            sums,
        } => {
            let rendered: Vec<String> = sums.iter().map(|&x| fmt::sig(x, full)).collect();
            println!(
                "certificate: component {component} term sums do not decay from degree {window_start}: [{}]",
                rendered.join(", ")
            );
        }
        Certificate::Inconclusive { ratio } => {
            println!(
                "certificate: none (ratio = {}; neither bound applies)",
                fmt::sig(*ratio, full)
            );
        }
    }
    println!("grouped-by-degree verdict: {}", verdict.grouped_status);
    let partials: Vec<String> = verdict
        .components
        .iter()
        .map(|&x| fmt::sig(x, full))
        .collect();
    println!("component absolute partial sums: [{}]", partials.join(", "));
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Radius {
            input,
            rho,
            window,
            output,
        } => {
            let loaded = load_series(&input)?;
            describe_series(&loaded);
            let estimate = loaded.series.radius_estimate(rho, window)?;
            println!("rho = {rho} (conjugate = {})", rho.conjugate());
            println!("growth rate r_hat = {}", fmt::sig(estimate.rate, output.full));
            println!("radius R_hat = {}", fmt::sig(estimate.radius, output.full));
            println!("window = {} trailing nonzero blocks", estimate.window);
            if let Some(report) = &output.report {
                RunReport::new(
                    None,
                    json!({
                        "input": input.input.display().to_string(),
                        "rho": rho.value(),
                        "window": estimate.window,
                        "truncation": loaded.truncation,
                    }),
                    json!({
                        "rate": estimate.rate,
                        "radius": estimate.radius,
                        "block_roots": estimate.block_roots,
                        "block_norms": loaded.series.block_norms(rho),
                    }),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Eval {
            input,
            point,
            output,
        } => {
            let loaded = load_series(&input)?;
            describe_series(&loaded);
            let coords = fmt::parse_point(&point)?;
            let value = loaded.series.evaluate(&coords)?;
            println!("point = {}", fmt::point(&coords, output.full));
            let components: Vec<String> = value
                .entries()
                .iter()
                .map(|z| {
                    let scalar = match value.field() {
                        Field::Real => Scalar::Real(z.re),
                        Field::Complex => Scalar::Complex(*z),
                    };
                    fmt::scalar(&scalar, output.full)
                })
                .collect();
            if components.len() == 1 {
                println!("value = {}", components[0]);
            } else {
                println!("value = [{}]", components.join(", "));
            }
            if let Some(report) = &output.report {
                RunReport::new(
                    None,
                    json!({
                        "input": input.input.display().to_string(),
                        "point": point,
                        "truncation": loaded.truncation,
                    }),
                    json!({
                        "components": value
                            .entries()
                            .iter()
                            .map(|z| json!({"re": z.re, "im": z.im}))
                            .collect::<Vec<_>>(),
                    }),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Converges {
            input,
            rho,
            point,
            window,
            output,
        } => {
            let loaded = load_series(&input)?;
            describe_series(&loaded);
            let coords = fmt::parse_point(&point)?;
            let opts = ConvergenceOptions {
                radius_window: window,
                ..ConvergenceOptions::default()
            };
            let verdict = loaded.series.converges_at(&coords, rho, &opts)?;
            println!("rho = {rho} (conjugate = {})", rho.conjugate());
            println!("point = {}", fmt::point(&coords, output.full));
            print_verdict(&verdict, output.full);
            if let Some(report) = &output.report {
                RunReport::new(
                    None,
                    json!({
                        "input": input.input.display().to_string(),
                        "rho": rho.value(),
                        "point": point,
                        "truncation": loaded.truncation,
                    }),
                    verdict_json(&verdict),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Layer {
            input,
            rho,
            window,
            output,
        } => {
            let loaded = load_series(&input)?;
            describe_series(&loaded);
            let layer = loaded.series.indeterminacy_layer(rho, window)?;
            println!("rho = {rho} (conjugate = {})", rho.conjugate());
            println!(
                "indeterminacy layer = [{}, {}]",
                fmt::sig(layer.inner, output.full),
                fmt::sig(layer.outer, output.full)
            );
            println!("factor = {}", fmt::sig(layer.factor, output.full));
            if layer.factor == 1.0 {
                println!("note: the layer collapses to the sphere of radius R_hat");
            }
            if let Some(report) = &output.report {
                RunReport::new(
                    None,
                    json!({
                        "input": input.input.display().to_string(),
                        "rho": rho.value(),
                        "truncation": loaded.truncation,
                    }),
                    json!({
                        "inner": layer.inner,
                        "outer": layer.outer,
                        "factor": layer.factor,
                    }),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Witness {
            input,
            rho,
            r1,
            samples,
            seed,
            window,
            output,
        } => {
            let loaded = load_series(&input)?;
            describe_series(&loaded);
            let opts = ConvergenceOptions {
                radius_window: window,
                ..ConvergenceOptions::default()
            };
            let scan = loaded
                .series
                .layer_witness_scan(rho, r1, samples, seed, &opts)?;
            println!("rho = {rho}, sphere radius r1 = {}", fmt::sig(r1, output.full));
            println!(
                "diagonal {}: {}",
                fmt::point(&scan.diagonal.point, output.full),
                scan.diagonal.verdict.status
            );
            for sample in &scan.samples {
                println!(
                    "sample   {}: {}",
                    fmt::point(&sample.point, output.full),
                    sample.verdict.status
                );
            }
            if let Some(report) = &output.report {
                RunReport::new(
                    Some(seed),
                    json!({
                        "input": input.input.display().to_string(),
                        "rho": rho.value(),
                        "r1": r1,
                        "samples": samples,
                        "truncation": loaded.truncation,
                    }),
                    json!({
                        "diagonal": {
                            "point": point_json(&scan.diagonal.point),
                            "verdict": verdict_json(&scan.diagonal.verdict),
                        },
                        "samples": scan
                            .samples
                            .iter()
                            .map(|s| json!({
                                "point": point_json(&s.point),
                                "verdict": verdict_json(&s.verdict),
                            }))
                            .collect::<Vec<_>>(),
                    }),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Lambda {
            n,
            n_prime,
            p,
            p_prime,
            q,
            q_prime,
            rho,
            field,
            budget,
            output,
        } => {
            let fields: Vec<Field> = match field.as_str() {
                "real" => vec![Field::Real],
                "complex" => vec![Field::Complex],
                _ => vec![Field::Real, Field::Complex],
            };
            println!(
                "lambda search: n={n} n'={n_prime} degrees ({p},{p_prime})x({q},{q_prime}) rho={rho}"
            );
            let mut results_json = Vec::new();
            for search_field in fields {
                let problem = ExtremalProblem {
                    row_vars: n,
                    col_vars: n_prime,
                    left_degrees: (p, p_prime),
                    right_degrees: (q, q_prime),
                    rho,
                    field: search_field,
                    budget: budget.budget(),
                };
                let result = lambda_estimate(&problem)?;
                println!(
                    "{} sphere: lambda_est = {} (converged = {}, restarts = {})",
                    search_field,
                    fmt::sig(result.value, output.full),
                    result.converged,
                    result.trace.len()
                );
                results_json.push(json!({
                    "field": search_field.to_string(),
                    "value": result.value,
                    "converged": result.converged,
                    "trace": result.trace,
                }));
            }
            if let Some(report) = &output.report {
                RunReport::new(
                    Some(budget.seed),
                    json!({
                        "n": n, "n_prime": n_prime,
                        "p": p, "p_prime": p_prime,
                        "q": q, "q_prime": q_prime,
                        "rho": rho.value(),
                        "field": field,
                        "restarts": budget.restarts,
                        "iters": budget.iters,
                    }),
                    json!({ "results": results_json }),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Opnorm {
            input,
            rho,
            budget,
            output,
        } => {
            let loaded = load_series(&input)?;
            describe_series(&loaded);
            let rows = opnorm_root_sequence(&loaded.series, rho, &budget.budget())?;
            println!("rho = {rho} (directions measured in the conjugate norm)");
            println!("{:>3}  {:>15} {:>15} {:>15} {:>15}", "m", "op norm", "rho norm", "op root", "rho root");
            for row in &rows {
                println!(
                    "{:>3}  {:>15} {:>15} {:>15} {:>15}",
                    row.degree,
                    fmt::sig(row.op_norm, output.full),
                    fmt::sig(row.rho_norm, output.full),
                    fmt::sig(row.op_root, output.full),
                    fmt::sig(row.rho_root, output.full)
                );
            }
            if let Some(report) = &output.report {
                RunReport::new(
                    Some(budget.seed),
                    json!({
                        "input": input.input.display().to_string(),
                        "rho": rho.value(),
                        "restarts": budget.restarts,
                        "iters": budget.iters,
                        "truncation": loaded.truncation,
                    }),
                    json!({
                        "rows": rows
                            .iter()
                            .map(|r| json!({
                                "degree": r.degree,
                                "op_norm": r.op_norm,
                                "rho_norm": r.rho_norm,
                                "op_root": r.op_root,
                                "rho_root": r.rho_root,
                            }))
                            .collect::<Vec<_>>(),
                    }),
                )
                .write(report)?;
            }
            Ok(())
        }
        Command::Verify { seed, output } => {
            let started = Instant::now();
            let cfg = SuiteConfig::with_seed(seed);
            let reports = run_full_suite(&cfg);
            for report in &reports {
                println!("{report}");
            }
            let failed: Vec<&str> = reports
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.name)
                .collect();
            println!(
                "{} checks, {} failed, {:.1}s",
                reports.len(),
                failed.len(),
                started.elapsed().as_secs_f64()
            );
            if let Some(report) = &output.report {
                RunReport::new(
                    Some(seed),
                    json!({ "seed": seed }),
                    json!({
                        "checks": reports
                            .iter()
                            .map(|r| json!({
                                "name": r.name,
                                "instances": r.instances,
                                "max_violation": r.max_violation,
                                "tolerance": r.tolerance,
                                "passed": r.passed,
                            }))
                            .collect::<Vec<_>>(),
                        "all_passed": failed.is_empty(),
                    }),
                )
                .write(report)?;
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::CheckFailure(format!(
                    "violations beyond tolerance in: {}",
                    failed.join(", ")
                )))
            }
        }
    }
}

fn point_json(point: &[Scalar]) -> serde_json::Value {
    serde_json::Value::Array(
        point
            .iter()
            .map(|s| {
                let z = s.as_complex();
                json!({"re": z.re, "im": z.im})
            })
            .collect(),
    )
}
