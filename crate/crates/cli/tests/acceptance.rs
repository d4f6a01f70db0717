//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lively_core::analysis::coin_marginal_trace;
use lively_core::detection::{chernoff_objective, LAMBDA_MAX, LAMBDA_MIN};
use lively_core::linalg::{c64, unitarity_defect};
use lively_core::spectral::{is_degenerate_sector, DEFAULT_GROUPING_TOL};
use lively_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Checked<T> = std::result::Result<T, String>;
type Outcome = Checked<String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Largest distance under greedy nearest matching of two multisets.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (x - b[i]).norm().total_cmp(&(x - b[j]).norm()))
            .unwrap();
        used[best] = true;
        worst = worst.max((x - b[best]).norm());
    }
    worst
}

fn block_values(n: usize, a: usize, l: usize) -> Checked<Vec<C64>> {
    let b = fourier_block(n, a, l).map_err(err)?;
    Ok(block_eigensystem(&b).map_err(err)?.iter().map(|p| p.value).collect())
}

fn periodicity_deviation(cfg: &WalkConfig) -> Checked<f64> {
    let pi = full_spectrum(cfg, DEFAULT_GROUPING_TOL)
        .and_then(|s| s.limiting_distribution(&PureState::uniform_coin(cfg.n, 0)))
        .map_err(err)?;
    let g = gcd(cfg.a, cfg.n);
    Ok(periodicity_report(&pi, g, 1e-8).map_err(err)?.max_deviation)
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for (n, a) in [(6, 2), (12, 3), (20, 4), (35, 7), (36, 6)] {
        let d = periodicity_deviation(&WalkConfig::new(n, a).map_err(err)?)?;
        if d >= 1e-8 {
            return Err(format!("(n={n}, a={a}) deviation {d:.3e}"));
        }
        worst = worst.max(d);
    }
    Ok(format!("max deviation {worst:.2e} over 5 configs"))
}

fn criterion_2() -> Outcome {
    let (n, a) = (12, 3);
    let one = c64(1.0, 0.0);
    let mut worst_one = 0.0f64;
    let mut worst_prod = 0.0f64;
    let mut worst_mirror = 0.0f64;
    for l in (0..n).filter(|l| l % (n / gcd(n, a)) == 0) {
        let mut values = block_values(n, a, l)?;
        values.sort_by(|x, y| (x - one).norm().total_cmp(&(y - one).norm()));
        worst_one = worst_one.max((values[0] - one).norm());
        worst_prod = worst_prod.max((values[1] * values[2] - one).norm());
        worst_mirror = worst_mirror.max(multiset_distance(&values, &block_values(n, a, (n - l) % n)?));
    }
    check(
        worst_one < 1e-10 && worst_prod < 1e-10 && worst_mirror < 1e-9,
        format!("|λ0−1| {worst_one:.1e}, |λ1λ2−1| {worst_prod:.1e}, l vs n−l {worst_mirror:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut blocks = 0;
    for (n, a) in [(12, 3), (20, 5), (14, 7)] {
        for l in (0..n).filter(|&l| is_degenerate_sector(n, a, l)) {
            let omega = C64::from_polar(1.0, TAU * l as f64 / n as f64);
            let closed = closed_form_eigenvalues(omega).map_err(err)?;
            worst = worst.max(multiset_distance(&closed, &block_values(n, a, l)?));
            blocks += 1;
        }
    }
    let at_one = closed_form_eigenvalues(c64(1.0, 0.0)).map_err(err)?;
    let reflect = multiset_distance(&at_one, &[c64(1.0, 0.0), c64(-1.0, 0.0), c64(-1.0, 0.0)]);
    check(
        worst < 1e-9 && reflect < 1e-12,
        format!("{blocks} blocks, max set distance {worst:.1e}; ω=1 distance {reflect:.1e}"),
    )
}

fn criterion_4() -> Outcome {
    let cfg = WalkConfig::new(7, 2).map_err(err)?;
    let s0 = PureState::uniform_coin(7, 0);
    let pi = limiting_distribution_spectral(&cfg, &s0).map_err(err)?;
    let gap = |steps| -> Checked<f64> {
        Ok(time_averaged_distribution(&cfg, &s0, steps)
            .map_err(err)?
            .max_abs_diff(&pi))
    };
    let (g4, g5) = (gap(10_000)?, gap(100_000)?);
    check(g5 < 1e-2 && g5 < g4, format!("gap N=1e4 {g4:.2e}, N=1e5 {g5:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut worst_drift = 0.0f64;
    let mut worst_marginal = 0.0f64;
    for a in [1, 2, 5] {
        for seed in [1u64, 2, 3] {
            let cfg = WalkConfig::new(21, a)
                .map_err(err)?
                .with_coin(CoinSpec::seeded_schedule(seed, 500));
            let drift = mean_position_drift(&cfg, 10, 200).map_err(err)?;
            worst_drift = worst_drift.max(drift.max_increment_error());
            let trace = coin_marginal_trace(&cfg, 10, 500).map_err(err)?;
            worst_marginal = worst_marginal.max(trace.into_iter().fold(0.0, f64::max));
        }
    }
    check(
        worst_drift < 1e-8 && worst_marginal < 1e-10,
        format!("max |ΔE − a/3| {worst_drift:.1e}, max coin marginal deviation {worst_marginal:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let (n, a, b) = (35, 5, 17);
    for edge in 0..n {
        let intact = build_shift(n, a).map_err(err)?;
        let broken = build_broken_shift(n, a, edge).map_err(err)?;
        let differing = (0..3 * n)
            .filter(|&i| intact.permutation().image(i) != broken.permutation().image(i))
            .count();
        if differing != 2 {
            return Err(format!("edge {edge}: {differing} differing mappings"));
        }
        let defect = unitarity_defect(&broken.permutation().to_dense());
        if defect != 0.0 {
            return Err(format!("edge {edge}: unitarity defect {defect:.1e}"));
        }
    }
    let intact = periodicity_deviation(&WalkConfig::new(n, a).map_err(err)?)?;
    let broken = periodicity_deviation(&WalkConfig::new(n, a).map_err(err)?.with_broken_edge(Some(b)))?;
    check(
        broken > 1e-3 && intact < 1e-8,
        format!("all 35 edges permute and differ on 2 mappings; deviation intact {intact:.1e}, broken {broken:.2e}"),
    )
}

fn dist(p: &[f64]) -> Checked<Distribution> {
    Distribution::from_probabilities(p.to_vec()).map_err(err)
}

fn grid_minimum(p0: &Distribution, p1: &Distribution) -> f64 {
    let points = 1_000_000;
    (0..points)
        .map(|i| LAMBDA_MIN + (LAMBDA_MAX - LAMBDA_MIN) * i as f64 / (points - 1) as f64)
        .map(|l| chernoff_objective(p0, p1, l))
        .fold(f64::INFINITY, f64::min)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_self = 0.0f64;
    for _ in 0..20 {
        let len = rng.random_range(2..16);
        let w: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = w.iter().sum();
        let p = dist(&w.iter().map(|x| x / total).collect::<Vec<_>>())?;
        worst_self = worst_self.max(chernoff_information(&p, &p).map_err(err)?.value().abs());
    }
    if worst_self >= 1e-12 {
        return Err(format!("C(P,P) = {worst_self:.1e}"));
    }
    let disjoint = chernoff_information(&dist(&[0.5, 0.5, 0.0])?, &dist(&[0.0, 0.0, 1.0])?).map_err(err)?;
    let q_disjoint = required_samples(&dist(&[1.0, 0.0])?, &dist(&[0.0, 1.0])?).map_err(err)?;
    if disjoint != ChernoffInformation::Infinite || q_disjoint != SampleCount::Finite(1) {
        return Err(format!("disjoint supports gave {disjoint:?}, q = {q_disjoint}"));
    }
    let mut worst_grid = 0.0f64;
    let mut worst_sym = 0.0f64;
    for _ in 0..20 {
        let len = rng.random_range(2..12);
        let mut draw = || -> Checked<Distribution> {
            let w: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = w.iter().sum();
            dist(&w.iter().map(|x| x / total).collect::<Vec<_>>())
        };
        let (p0, p1) = (draw()?, draw()?);
        let c = chernoff_information(&p0, &p1).map_err(err)?.value();
        let c_rev = chernoff_information(&p1, &p0).map_err(err)?.value();
        worst_grid = worst_grid.max((c + grid_minimum(&p0, &p1)).abs());
        worst_sym = worst_sym.max((c - c_rev).abs());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_lively"))
        .args([
            "detect",
            "--n",
            "35",
            "--a",
            "5",
            "--edge",
            "17",
            "--initial",
            "uniform-coin:0",
        ])
        .output()
        .map_err(err)?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let q: Option<u64> = stdout
        .lines()
        .nth(1)
        .and_then(|row| row.split(',').nth(2))
        .and_then(|s| s.parse().ok());
    let anchor_ok = out.status.success() && q.is_some_and(|q| q > 1);
    check(
        worst_grid < 1e-9 && worst_sym < 1e-10 && anchor_ok,
        format!(
            "grid gap {worst_grid:.1e}, asymmetry {worst_sym:.1e}, detect (35,5,17) q = {}",
            q.map_or("none".into(), |q| q.to_string())
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut qs = Vec::new();
    for a in [5, 7, 11] {
        let cfg = WalkConfig::new(385, a).map_err(err)?.with_broken_edge(Some(192));
        let r = detect_broken_link(&cfg, DEFAULT_GROUPING_TOL).map_err(err)?;
        qs.push((a, r.required_samples, r.chernoff.value()));
    }
    let q = |i: usize| match qs[i].1 {
        SampleCount::Finite(q) => q as f64,
        SampleCount::Infinite => f64::INFINITY,
    };
    let detail = qs
        .iter()
        .map(|(a, q, c)| format!("q(a={a}) = {q} (C = {c:.3e})"))
        .collect::<Vec<_>>()
        .join(", ");
    check(q(0) > q(1) && q(1) > q(2), detail)
}

fn criterion_9() -> Outcome {
    let mut worst_set = 0.0f64;
    let mut worst_resid = 0.0f64;
    let mut configs = 0;
    for n in 2..=40 {
        for a in 0..n {
            let cfg = WalkConfig::new(n, a).map_err(err)?;
            let fourier = full_spectrum_with(&cfg, DEFAULT_GROUPING_TOL, SpectrumMethod::Fourier).map_err(err)?;
            let dense = full_spectrum_with(&cfg, DEFAULT_GROUPING_TOL, SpectrumMethod::Dense).map_err(err)?;
            worst_set = worst_set.max(multiset_distance(&fourier.eigenvalues, &dense.eigenvalues));
            let op = build_walk_operator(&cfg).map_err(err)?;
            let uv = op.dense().map_err(err)? * &fourier.vectors;
            for (i, lambda) in fourier.eigenvalues.iter().enumerate() {
                let r = (uv.column(i) - fourier.vectors.column(i) * *lambda).norm();
                worst_resid = worst_resid.max(r);
            }
            configs += 1;
        }
    }
    check(
        worst_set < 1e-9 && worst_resid < 1e-8,
        format!("{configs} configs, max eigenvalue mismatch {worst_set:.1e}, max residual {worst_resid:.1e}"),
    )
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "periodicity of the limiting distribution",
            limit: Some(Duration::from_secs(10)),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            name: "Fourier block eigenstructure",
            limit: None,
            run: criterion_2,
        },
        Criterion {
            id: 3,
            name: "closed-form eigenvalues",
            limit: None,
            run: criterion_3,
        },
        Criterion {
            id: 4,
            name: "spectral vs empirical limit",
            limit: Some(Duration::from_secs(30)),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            name: "trapping resistance",
            limit: None,
            run: criterion_5,
        },
        Criterion {
            id: 6,
            name: "broken-link operator",
            limit: None,
            run: criterion_6,
        },
        Criterion {
            id: 7,
            name: "Chernoff suite",
            limit: None,
            run: criterion_7,
        },
        Criterion {
            id: 8,
            name: "sample count decreases with liveliness at n=385",
            limit: Some(Duration::from_secs(600)),
            run: criterion_8,
        },
        Criterion {
            id: 9,
            name: "Fourier vs dense spectra for n <= 40",
            limit: None,
            run: criterion_9,
        },
    ];
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(d), Some(limit)) if elapsed > limit => Err(format!("{d}; exceeded {} s", limit.as_secs())),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!(
            "[{tag}] criterion {}: {} | {detail} | {:.2} s",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
