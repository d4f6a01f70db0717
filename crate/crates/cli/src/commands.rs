use lively_core::analysis::{coin_marginal_trace, time_averaged_ensemble};
use lively_core::spectral::limiting_distribution_prepared;
use lively_core::{
    detect_broken_link, evolve, evolve_ensemble, full_spectrum_with, gcd, mean_position_drift, periodicity_report,
    prepare_initial, time_averaged_distribution, ChernoffInformation, CoinSpec, DetectionReport, Distribution,
    HypothesisPair, PreparedState, SampleCount, SpectrumSource, WalkConfig,
};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::formats::{emit, parse_coin, parse_initial, read_distribution, Cell, Metadata, Table};

fn require(value: Option<usize>, flag: &str) -> CliResult<usize> {
    value.ok_or_else(|| CliError::param(format!("--{flag} is required")))
}

fn build_config(walk: &WalkArgs, initial: Option<&str>, edge: Option<usize>) -> CliResult<WalkConfig> {
    let n = require(walk.n, "n")?;
    let a = require(walk.a, "a")?;
    let mut cfg = WalkConfig::new(n, a)?
        .with_coin(parse_coin(&walk.coin, walk.schedule_policy.into())?)
        .with_broken_edge(edge);
    if let Some(spec) = initial {
        cfg = cfg.with_initial(parse_initial(spec, n, a)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn metadata(command: &str, walk: &WalkArgs, initial: Option<&str>, edge: Option<usize>) -> Metadata {
    let mut m = Metadata::new(command);
    m.n = walk.n;
    m.a = walk.a;
    m.coin = Some(walk.coin.clone());
    m.initial = initial.map(str::to_string);
    m.edge = edge;
    m
}

fn finish(table: &Table, out: &OutputArgs, meta: &Metadata) -> CliResult<()> {
    emit(&table.render(out.format, meta)?, out.output.as_deref())
}

fn limiting_distribution(cfg: &WalkConfig, average: &AverageArgs, spectral: &SpectralArgs) -> CliResult<Distribution> {
    let prepared = prepare_initial(&cfg.initial, cfg.n)?;
    Ok(match average.method {
        Method::Spectral => limiting_distribution_prepared(
            &full_spectrum_with(cfg, spectral.grouping_tol, spectral.source.into())?,
            &prepared,
        )?,
        Method::Average => match prepared {
            PreparedState::Pure(s) => time_averaged_distribution(cfg, &s, average.steps)?,
            PreparedState::Mixed(e) => time_averaged_ensemble(cfg, &e, average.steps)?,
        },
    })
}

fn describe_method(meta: &mut Metadata, average: &AverageArgs, spectral: &SpectralArgs) {
    match average.method {
        Method::Spectral => {
            meta.method = Some("spectral".into());
            meta.tolerances.grouping = Some(spectral.grouping_tol);
        }
        Method::Average => {
            meta.method = Some("average".into());
            meta.steps = Some(average.steps);
        }
    }
}

pub fn evolve_cmd(args: &EvolveArgs) -> CliResult<()> {
    let cfg = build_config(&args.walk, Some(&args.state.initial), args.edge)?;
    let dist = match prepare_initial(&cfg.initial, cfg.n)? {
        PreparedState::Pure(s) => evolve(&s, &cfg, args.steps)?.position_distribution(),
        PreparedState::Mixed(e) => evolve_ensemble(&e, &cfg, args.steps)?.position_distribution(),
    };
    let mut meta = metadata("evolve", &args.walk, Some(&args.state.initial), args.edge);
    meta.steps = Some(args.steps);
    finish(&Table::from_distribution(&dist), &args.out, &meta)
}

pub fn limiting_cmd(args: &LimitingArgs) -> CliResult<()> {
    let cfg = build_config(&args.walk, Some(&args.state.initial), args.edge)?;
    let dist = limiting_distribution(&cfg, &args.average, &args.spectral)?;
    let mut meta = metadata("limiting", &args.walk, Some(&args.state.initial), args.edge);
    describe_method(&mut meta, &args.average, &args.spectral);
    finish(&Table::from_distribution(&dist), &args.out, &meta)
}

pub fn broken_cmd(args: &BrokenArgs) -> CliResult<()> {
    let cfg = build_config(&args.walk, Some(&args.state.initial), Some(args.edge))?;
    let dist = limiting_distribution(&cfg, &args.average, &args.spectral)?;
    let mut meta = metadata("broken", &args.walk, Some(&args.state.initial), Some(args.edge));
    describe_method(&mut meta, &args.average, &args.spectral);
    finish(&Table::from_distribution(&dist), &args.out, &meta)
}

pub fn periodicity_cmd(args: &PeriodicityArgs) -> CliResult<()> {
    let cfg = build_config(&args.walk, Some(&args.state.initial), args.edge)?;
    let g = args.g.unwrap_or_else(|| gcd(cfg.a, cfg.n));
    let dist = limiting_distribution(&cfg, &args.average, &args.spectral)?;
    let report = periodicity_report(&dist, g, args.tol)?;
    let mut table = Table::new(&["period", "max_deviation", "tolerance", "periodic"]);
    table.push(vec![
        Cell::Int(report.period as u64),
        Cell::Float(report.max_deviation),
        Cell::Float(report.tolerance),
        Cell::Bool(report.periodic),
    ]);
    let mut meta = metadata("periodicity", &args.walk, Some(&args.state.initial), args.edge);
    describe_method(&mut meta, &args.average, &args.spectral);
    meta.tolerances.periodicity = Some(args.tol);
    finish(&table, &args.out, &meta)
}

pub fn trapping_cmd(args: &TrappingArgs) -> CliResult<()> {
    let mut cfg = build_config(&args.walk, None, None)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_coin(CoinSpec::seeded_schedule(seed, args.steps));
    }
    let drift = mean_position_drift(&cfg, args.x0, args.steps)?;
    let marginal = coin_marginal_trace(&cfg, args.x0, args.steps)?;
    let mut table = Table::new(&["t", "mean_position", "drift", "coin_deviation"]);
    for (t, (mean, dev)) in drift.expectations.iter().zip(&marginal).enumerate() {
        let step = match t {
            0 => Cell::Empty,
            _ => Cell::Float(drift.increments[t - 1]),
        };
        table.push(vec![Cell::Int(t as u64), Cell::Float(*mean), step, Cell::Float(*dev)]);
    }
    let mut meta = metadata("trapping", &args.walk, Some(&format!("mixed-coin:{}", args.x0)), None);
    if args.seed.is_some() {
        meta.coin = Some("random-schedule".into());
    }
    meta.seed = args.seed;
    meta.steps = Some(args.steps);
    finish(&table, &args.out, &meta)
}

fn detection_table(report: &DetectionReport) -> Table {
    let mut table = Table::new(&["chernoff", "lambda_star", "required_samples", "advantage_at_q"]);
    let chernoff = match report.chernoff {
        ChernoffInformation::Finite { value, .. } => Cell::Float(value),
        ChernoffInformation::Infinite => Cell::Text("inf".into()),
    };
    let lambda = report.chernoff.lambda_star().map_or(Cell::Empty, Cell::Float);
    let q = match report.required_samples {
        SampleCount::Finite(q) => Cell::Int(q),
        SampleCount::Infinite => Cell::Text("inf".into()),
    };
    table.push(vec![chernoff, lambda, q, Cell::Float(report.advantage_at_q)]);
    table
}

pub fn detect_cmd(args: &DetectArgs) -> CliResult<()> {
    let mut meta = metadata("detect", &args.walk, Some(&args.state.initial), args.edge);
    let report = match (&args.p0, &args.p1) {
        (Some(p0), Some(p1)) => {
            let pair = HypothesisPair::new(read_distribution(p0)?, read_distribution(p1)?)?;
            meta.coin = None;
            meta.initial = None;
            DetectionReport::from_pair(&pair)
        }
        _ => {
            let edge = args
                .edge
                .ok_or_else(|| CliError::param("--edge is required unless --p0 and --p1 are given"))?;
            let cfg = build_config(&args.walk, Some(&args.state.initial), Some(edge))?;
            meta.tolerances.grouping = Some(args.grouping_tol);
            detect_broken_link(&cfg, args.grouping_tol)?
        }
    };
    finish(&detection_table(&report), &args.out, &meta)
}

pub fn spectrum_cmd(args: &SpectrumArgs) -> CliResult<()> {
    let cfg = build_config(&args.walk, None, args.edge)?;
    let s = full_spectrum_with(&cfg, args.spectral.grouping_tol, args.spectral.source.into())?;
    let mut table = Table::new(&["index", "phase", "cluster", "l", "j"]);
    for (i, phase) in s.phases().into_iter().enumerate() {
        let (l, j) = match &s.labels {
            Some(labels) => (Cell::Int(labels[i].0 as u64), Cell::Int(labels[i].1 as u64)),
            None => (Cell::Empty, Cell::Empty),
        };
        table.push(vec![
            Cell::Int(i as u64),
            Cell::Float(phase),
            Cell::Int(s.cluster_of(i) as u64),
            l,
            j,
        ]);
    }
    let mut meta = metadata("spectrum", &args.walk, None, args.edge);
    meta.method = Some(
        match s.source {
            SpectrumSource::FourierAssembled => "fourier",
            SpectrumSource::DenseDiagonalized => "dense",
        }
        .into(),
    );
    meta.tolerances.grouping = Some(args.spectral.grouping_tol);
    finish(&table, &args.out, &meta)
}
