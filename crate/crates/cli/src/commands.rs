use std::fs::File;
use std::io::{self, BufWriter, Write};

use bayesmv_core::{
    bayes_weights_gamma, bayes_weights_target_return, bayes_weights_target_variance, coefficients,
    draw_predictive_threaded, efficient_frontier, estimate_moments, interval_report_threaded,
    sample_weights_gamma, stats, Family, MomentSummary, PortfolioSolution, ReturnsWindow, Rule,
};

use crate::cli::{
    Command, CompareArgs, Format, FrontierArgs, IntervalArgs, OptimizeArgs, RatioArgs, RunConfig,
    RuleChoice, SampleArgs,
};
use crate::error::{CliError, Result};
use crate::input::parse_returns_csv;
use crate::report::{
    CompareReport, CompareRow, EstimateReport, FamilyReport, Float, FrontierPoint, FrontierReport,
    IntervalReport, IntervalRow, OptimizeReport, RatioReport, RatioRow, Report, SampleReport,
    SolutionReport,
};

pub fn run(config: &RunConfig) -> Result<()> {
    let report = match &config.command {
        Command::Estimate => estimate(config)?,
        Command::Optimize(args) => optimize(config, args)?,
        Command::Frontier(args) => frontier(config, args)?,
        Command::Sample(args) => sample(config, args)?,
        Command::Interval(args) => interval(config, args)?,
        Command::Compare(args) => compare(config, args)?,
        Command::Ratio(args) => ratio(args)?,
    };
    emit(config, &report)
}

fn emit(config: &RunConfig, report: &Report) -> Result<()> {
    let mut sink: Box<dyn Write> = match &config.output {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                context: format!("creating {}", path.display()),
                source,
            })?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(io::stdout().lock()),
    };
    match config.format {
        Format::Json => report.write_json(&mut sink)?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush().map_err(|source| CliError::Io {
        context: "writing report".into(),
        source,
    })
}

fn load_window(config: &RunConfig) -> Result<(ReturnsWindow, String)> {
    let path = config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("this command needs --input <PATH>".into()))?;
    let window = parse_returns_csv(path, config.prices)?;
    Ok((window, path.display().to_string()))
}

fn resolve_seed(config: &RunConfig) -> Result<u64> {
    if let Some(seed) = config.seed {
        return Ok(seed);
    }
    match std::env::var("BAYESMV_SEED") {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
            CliError::Usage(format!(
                "BAYESMV_SEED must be an unsigned 64-bit integer, found {raw:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(CliError::Usage("BAYESMV_SEED is not valid UTF-8".into()))
        }
    }
}

fn labels_of(window: &ReturnsWindow) -> Vec<String> {
    window.labels().map_or_else(
        || (1..=window.k()).map(|i| format!("a{i}")).collect(),
        <[String]>::to_vec,
    )
}

fn floats(values: impl IntoIterator<Item = f64>) -> Vec<Float> {
    values.into_iter().map(Float).collect()
}

fn estimate(config: &RunConfig) -> Result<Report> {
    let (window, input) = load_window(config)?;
    let summary = estimate_moments(&window)?;
    let k = summary.k();
    let coefs = summary.coefficients().ok();
    Ok(Report::Estimate(EstimateReport {
        command: "estimate",
        input,
        n: summary.n(),
        k,
        labels: labels_of(&window),
        mean: floats(summary.mean().iter().copied()),
        scatter: (0..k)
            .map(|i| floats((0..k).map(|j| summary.scatter()[(i, j)])))
            .collect(),
        c: coefs.map(|cf| Float(cf.c)),
        d: coefs.map(|cf| Float(cf.d)),
        ratio: coefs.map(|cf| Float(cf.ratio())),
    }))
}

fn solution_report(sol: &PortfolioSolution) -> SolutionReport {
    let (rule, gamma, target_return, target_variance) = match sol.rule {
        Rule::BayesGamma { gamma } => ("bayes-gamma", Some(gamma), None, None),
        Rule::BayesTargetReturn { r0 } => ("bayes-target-return", None, Some(r0), None),
        Rule::BayesTargetVariance { v0 } => ("bayes-target-variance", None, None, Some(v0)),
        Rule::Gmv => ("gmv", None, None, None),
        Rule::SampleGamma { gamma } => ("sample-gamma", Some(gamma), None, None),
        Rule::PopulationGamma { gamma } => ("population-gamma", Some(gamma), None, None),
    };
    SolutionReport {
        rule,
        gamma: gamma.map(Float),
        target_return: target_return.map(Float),
        target_variance: target_variance.map(Float),
        weights: floats(sol.weights.iter().copied()),
        expected_return: Float(sol.expected_return),
        variance: Float(sol.variance),
    }
}

fn optimize(config: &RunConfig, args: &OptimizeArgs) -> Result<Report> {
    let (window, input) = load_window(config)?;
    let summary = estimate_moments(&window)?;
    let mut solutions = Vec::new();
    match (args.gamma, args.target_return, args.target_variance) {
        (Some(gamma), None, None) => {
            if args.rule != RuleChoice::Sample {
                solutions.push(bayes_weights_gamma(&summary, gamma)?);
            }
            if args.rule != RuleChoice::Bayes {
                solutions.push(sample_weights_gamma(&summary, gamma)?);
            }
        }
        (None, Some(r0), None) => {
            require_bayes(args.rule, "--target-return")?;
            require_finite(r0, "--target-return")?;
            solutions.push(bayes_weights_target_return(&summary, r0)?);
        }
        (None, None, Some(v0)) => {
            require_bayes(args.rule, "--target-variance")?;
            require_finite(v0, "--target-variance")?;
            solutions.push(bayes_weights_target_variance(&summary, v0)?);
        }
        _ => unreachable!("argument group enforces exactly one target"),
    }
    Ok(Report::Optimize(OptimizeReport {
        command: "optimize",
        input,
        n: summary.n(),
        k: summary.k(),
        labels: labels_of(&window),
        solutions: solutions.iter().map(solution_report).collect(),
    }))
}

fn require_bayes(rule: RuleChoice, flag: &str) -> Result<()> {
    if rule == RuleChoice::Bayes {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{flag} has no sample counterpart; use --rule bayes (or --gamma)"
        )))
    }
}

fn require_finite(value: f64, flag: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag} must be finite, got {value}")))
    }
}

fn frontier(config: &RunConfig, args: &FrontierArgs) -> Result<Report> {
    let (window, input) = load_window(config)?;
    let summary = estimate_moments(&window)?;
    let families: &[Family] = match args.rule {
        RuleChoice::Bayes => &[Family::Bayes],
        RuleChoice::Sample => &[Family::Sample],
        RuleChoice::Both => &[Family::Bayes, Family::Sample],
    };
    let mut reports = Vec::new();
    for &family in families {
        let params = efficient_frontier(&summary, family)?;
        reports.push(FamilyReport {
            family: match family {
                Family::Bayes => "bayes",
                Family::Sample => "sample",
            },
            r_gmv: Float(params.r_gmv),
            v_gmv: Float(params.v_gmv),
            slope: Float(params.slope),
            curve: params
                .grid(args.grid_points)
                .into_iter()
                .map(|(variance, expected_return)| FrontierPoint {
                    variance: Float(variance),
                    expected_return: Float(expected_return),
                })
                .collect(),
        });
    }
    Ok(Report::Frontier(FrontierReport {
        command: "frontier",
        input,
        n: summary.n(),
        k: summary.k(),
        grid_points: args.grid_points,
        families: reports,
    }))
}

fn sample(config: &RunConfig, args: &SampleArgs) -> Result<Report> {
    require_positive(args.draws, "--draws")?;
    require_positive(args.threads, "--threads")?;
    let (window, input) = load_window(config)?;
    let summary = estimate_moments(&window)?;
    let seed = resolve_seed(config)?;
    let sol = bayes_weights_gamma(&summary, args.gamma)?;
    let draws = draw_predictive_threaded(&summary, &sol.weights, args.draws, seed, args.threads)?;
    let values = draws.values();
    let (minimum, maximum) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(Report::Sample(SampleReport {
        command: "sample",
        input,
        n: summary.n(),
        k: summary.k(),
        gamma: Float(args.gamma),
        draws: args.draws,
        seed,
        labels: labels_of(&window),
        weights: floats(sol.weights.iter().copied()),
        expected_return: Float(sol.expected_return),
        variance: Float(sol.variance),
        mc_mean: Float(stats::mean(values)),
        mc_variance: (values.len() > 1).then(|| Float(stats::variance(values))),
        minimum: Float(minimum),
        maximum: Float(maximum),
        values: args.emit_draws.then(|| floats(values.iter().copied())),
    }))
}

fn require_positive(value: usize, flag: &str) -> Result<()> {
    if value == 0 {
        Err(CliError::Usage(format!("{flag} must be at least 1")))
    } else {
        Ok(())
    }
}

fn interval(config: &RunConfig, args: &IntervalArgs) -> Result<Report> {
    require_positive(args.threads, "--threads")?;
    let (window, input) = load_window(config)?;
    let summary = estimate_moments(&window)?;
    let seed = resolve_seed(config)?;
    let rows = interval_report_threaded(
        &summary,
        &args.gamma,
        args.alpha,
        args.draws,
        seed,
        args.threads,
    )?;
    Ok(Report::Interval(IntervalReport {
        command: "interval",
        input,
        n: summary.n(),
        k: summary.k(),
        alpha: Float(args.alpha),
        draws: args.draws,
        seed,
        rows: rows
            .iter()
            .map(|row| IntervalRow {
                gamma: Float(row.gamma),
                expected_return: Float(row.expected_return),
                variance: Float(row.variance),
                lower: Float(row.interval.lower),
                upper: Float(row.interval.upper),
                width: Float(row.interval.upper - row.interval.lower),
            })
            .collect(),
    }))
}

fn subwindow(window: &ReturnsWindow, k: usize) -> Result<MomentSummary> {
    let data = window.data().columns(0, k).into_owned();
    let mut sub = ReturnsWindow::new(data)?;
    if let Some(labels) = window.labels() {
        sub = sub.with_labels(labels[..k].to_vec())?;
    }
    Ok(estimate_moments(&sub)?)
}

fn compare(config: &RunConfig, args: &CompareArgs) -> Result<Report> {
    let (window, input) = load_window(config)?;
    let k_full = window.k();
    let k_list = args.k.clone().unwrap_or_else(|| vec![k_full]);
    for &k in &k_list {
        if k == 0 || k > k_full {
            return Err(CliError::Usage(format!(
                "--k entries must lie in 1..={k_full} (the input has {k_full} columns), got {k}"
            )));
        }
    }
    let mut rows = Vec::with_capacity(k_list.len() * args.gamma.len());
    for &k in &k_list {
        let summary = subwindow(&window, k)?;
        for &gamma in &args.gamma {
            let bayes = bayes_weights_gamma(&summary, gamma)?;
            let sample = sample_weights_gamma(&summary, gamma)?;
            rows.push(CompareRow {
                k,
                gamma: Float(gamma),
                bayes_return: Float(bayes.expected_return),
                bayes_variance: Float(bayes.variance),
                sample_return: Float(sample.expected_return),
                sample_variance: Float(sample.variance),
            });
        }
    }
    Ok(Report::Compare(CompareReport {
        command: "compare",
        input,
        n: window.n(),
        k: k_full,
        rows,
    }))
}

fn ratio(args: &RatioArgs) -> Result<Report> {
    if !(args.kn_max > 0.0 && args.kn_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "--kn-max must be a positive finite number, got {}",
            args.kn_max
        )));
    }
    let mut rows = Vec::new();
    for &n in &args.n {
        for k in 1..n.saturating_sub(2) {
            let k_over_n = k as f64 / n as f64;
            if k_over_n >= args.kn_max {
                break;
            }
            rows.push(RatioRow {
                n,
                k,
                k_over_n: Float(k_over_n),
                ratio: Float(coefficients(k, n)?.ratio()),
            });
        }
    }
    Ok(Report::Ratio(RatioReport {
        command: "ratio",
        kn_max: Float(args.kn_max),
        rows,
    }))
}
