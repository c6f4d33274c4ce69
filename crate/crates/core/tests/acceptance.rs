//! Acceptance criteria 1-7. Runs as a plain binary and prints one PASS/FAIL
//! line per criterion; exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{compositions, group_splits};
use finpop::designs::DesignKind;
use finpop::distributions::{fpc, multinomial_pmf, mvhyper_pmf, CountVector};
use finpop::population::{flatten_networks, ClassifiedPopulation, NetworkPartition, Population, SizeWeights};
use finpop::rng::{stream, DrawSource};
use finpop::verify::enumerate::for_each_ordered;
use finpop::verify::{
    count_covariance_check, enumerate_count_distribution, enumerate_count_distribution_ordered, enumerate_moments,
    relative_efficiency, simulate, EstimatorKind, Frame, MonteCarloSettings, Scenario, Tolerances, OUTCOME_LIMIT,
};
use finpop::Replacement;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
type PairExpectations = Vec<((usize, usize), f64)>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Every classified population with N <= 12 and K <= 4 classes.
fn classified_grid() -> Vec<ClassifiedPopulation> {
    let mut out = Vec::new();
    for total in 1..=12u64 {
        for k in 1..=4usize {
            if k as u64 > total {
                continue;
            }
            for extra in compositions(total - k as u64, k) {
                let sizes = extra.iter().map(|e| e + 1).collect();
                out.push(ClassifiedPopulation::new(sizes).unwrap());
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for pop in classified_grid() {
        for n in 1..=pop.total() {
            let c = count_covariance_check(&pop, n).map_err(|e| e.to_string())?;
            worst = worst.max(c.max_abs_deviation);
            check(
                c.max_abs_deviation <= 1e-10,
                format!("{:?} n={n}: deviation {}", pop.sizes(), c.max_abs_deviation),
            )?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} (population, n) cases, max |cov_wor - fpc cov_wr| = {worst:.2e}"
    ))
}

fn units(values: &[f64]) -> Frame {
    Frame::Units(Population::new(values.to_vec()).unwrap())
}

fn exact_variance(frame: &Frame, design: DesignKind, n: usize, est: EstimatorKind) -> Result<f64, String> {
    let s = Scenario::new(frame.clone(), design, n, None).map_err(|e| e.to_string())?;
    Ok(enumerate_moments(&s, est).map_err(|e| e.to_string())?.variance)
}

fn ratio_check(frame: &Frame, design: DesignKind, n: usize, est: EstimatorKind, expected: f64) -> Result<(), String> {
    let s = Scenario::new(frame.clone(), design, n, None).map_err(|e| e.to_string())?;
    let r = relative_efficiency(&s, est, None, Tolerances::default()).map_err(|e| e.to_string())?;
    let ratio = r.ratio.ok_or("no ratio")?;
    check(
        r.pass && (ratio - expected).abs() <= 1e-10,
        format!("ratio {ratio} vs {expected}"),
    )?;
    check(
        (r.predicted_fpc - expected).abs() <= 1e-15,
        format!("fpc {}", r.predicted_fpc),
    )
}

fn srs_frame() -> Frame {
    units(&[1.0, 2.0, 3.0, 4.0, 5.0])
}

fn pps_frame(values: &[f64]) -> Frame {
    Frame::weighted(
        Population::new(values.to_vec()).unwrap(),
        SizeWeights::new(vec![1, 2, 3]).unwrap(),
    )
    .unwrap()
}

fn acs_frame() -> Frame {
    let pop = Population::new(vec![1.0, 3.0, 5.0]).unwrap();
    let partition = NetworkPartition::from_assignment(&pop, &[0, 0, 1]).unwrap();
    Frame::networked(pop, partition).unwrap()
}

fn criterion_2() -> Outcome {
    let f = srs_frame();
    let wor = exact_variance(&f, DesignKind::Srs, 2, EstimatorKind::SampleMean)?;
    let wr = exact_variance(&f, DesignKind::SrsWr, 2, EstimatorKind::SampleMean)?;
    check((wor - 0.75).abs() <= 1e-12, format!("WOR variance {wor}"))?;
    check((wr - 1.0).abs() <= 1e-12, format!("WR variance {wr}"))?;
    check(fpc(2, 5).unwrap() == 0.75, "fpc(2,5)")?;
    ratio_check(&f, DesignKind::Srs, 2, EstimatorKind::SampleMean, 0.75)?;
    Ok(format!("var WOR = {wor}, var WR = {wr}, ratio = {}", wor / wr))
}

fn criterion_3() -> Outcome {
    let f = pps_frame(&[2.0, 2.0, 3.0]);
    let wr = exact_variance(&f, DesignKind::PpsWr, 2, EstimatorKind::HansenHurvitz)?;
    let wor = exact_variance(&f, DesignKind::PpsWor, 2, EstimatorKind::HansenHurvitz)?;
    check((wr - 2.5).abs() <= 1e-10, format!("WR variance {wr}"))?;
    check((wor - 2.0).abs() <= 1e-10, format!("extended WOR variance {wor}"))?;
    ratio_check(&f, DesignKind::PpsWr, 2, EstimatorKind::HansenHurvitz, 0.8)?;
    let prop = pps_frame(&[1.0, 2.0, 3.0]);
    for design in [DesignKind::PpsWr, DesignKind::PpsWor] {
        let v = exact_variance(&prop, design, 2, EstimatorKind::HansenHurvitz)?;
        check(v == 0.0, format!("proportional case {design}: variance {v}"))?;
    }
    Ok(format!(
        "var WR = {wr}, var WOR = {wor}, ratio = {}, proportional case 0",
        wor / wr
    ))
}

fn criterion_4() -> Outcome {
    let f = acs_frame();
    let wr = exact_variance(&f, DesignKind::AcsWr, 2, EstimatorKind::AcsMean)?;
    let wor = exact_variance(&f, DesignKind::Acs, 2, EstimatorKind::AcsMean)?;
    check((wr - 1.0).abs() <= 1e-10, format!("WR variance {wr}"))?;
    check((wor - 0.5).abs() <= 1e-10, format!("WOR variance {wor}"))?;
    ratio_check(&f, DesignKind::Acs, 2, EstimatorKind::AcsMean, 0.5)?;

    let mut rng = stream(4, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + rng.below(30) as usize;
        let values: Vec<f64> = (0..n).map(|_| rng.below(2_000_001) as f64 / 1000.0 - 1000.0).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.below(1 + rng_bound(n)) as usize).collect();
        let pop = Population::new(values).unwrap();
        let partition = NetworkPartition::from_assignment(&pop, &labels).map_err(|e| e.to_string())?;
        let flat = flatten_networks(&pop, &partition).map_err(|e| e.to_string())?;
        let scale = pop.values().iter().map(|v| v.abs()).fold(1.0, f64::max);
        let d = (flat.mean() - pop.mean()).abs() / scale;
        worst = worst.max(d);
        check(d <= 1e-12, format!("flattening moved the mean by {d}"))?;
    }
    Ok(format!(
        "var WR = {wr}, var WOR = {wor}, ratio = {}, 1000 flattenings, max rel. mean shift {worst:.2e}",
        wor / wr
    ))
}

fn rng_bound(n: usize) -> u64 {
    (n as u64).min(8)
}

/// Exact `E{(ȳ_k - ȳ_l)²}` for every pair of groups.
fn pair_expectations(values: &[f64], sizes: &[usize]) -> Result<PairExpectations, String> {
    let n: usize = sizes.iter().sum();
    let k = sizes.len();
    let mut sums = vec![0.0; k * k];
    let outcomes = for_each_ordered(values.len(), n, Replacement::Without, OUTCOME_LIMIT, |seq| {
        let mut means = Vec::with_capacity(k);
        let mut rest = seq;
        for &s in sizes {
            let (g, tail) = rest.split_at(s);
            rest = tail;
            means.push(g.iter().map(|&u| values[u]).sum::<f64>() / s as f64);
        }
        for a in 0..k {
            for b in a + 1..k {
                let d = means[a] - means[b];
                sums[a * k + b] += d * d;
            }
        }
    })
    .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            out.push(((a, b), sums[a * k + b] / outcomes as f64));
        }
    }
    Ok(out)
}

fn criterion_5() -> Outcome {
    let mut rng = stream(5, 0);
    let mut populations: Vec<Vec<f64>> = vec![vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], vec![0.0, 0.0, 0.0, 10.0]];
    for n in 2..=6 {
        populations.push(vec![7.0; n]);
        for _ in 0..3 {
            populations.push((0..n).map(|_| rng.below(20_001) as f64 / 100.0 - 100.0).collect());
        }
    }
    let mut configs = 0;
    for values in &populations {
        let pop = Population::new(values.clone()).unwrap();
        let s2 = pop.s_squared();
        for n in 2..=values.len() {
            for sizes in group_splits(n) {
                let s =
                    Scenario::new(units(values), DesignKind::Srs, n, Some(sizes.clone())).map_err(|e| e.to_string())?;
                let m = enumerate_moments(&s, EstimatorKind::RandomGroupVariance).map_err(|e| e.to_string())?;
                check(
                    (m.mean - s2).abs() <= 1e-10_f64.max(1e-12 * s2),
                    format!("{values:?} {sizes:?}: E[estimate] = {} vs S2 = {s2}", m.mean),
                )?;
                for ((a, b), e) in pair_expectations(values, &sizes)? {
                    let expected = finpop::estimators::rg_pair_expectation(&pop, sizes[a], sizes[b]).unwrap();
                    check(
                        (e - expected).abs() <= 1e-10_f64.max(1e-12 * expected),
                        format!("{values:?} {sizes:?} groups {a},{b}: {e} vs {expected}"),
                    )?;
                }
                configs += 1;
            }
        }
    }
    Ok(format!(
        "{} populations, {configs} (population, group sizes) configurations",
        populations.len()
    ))
}

fn criterion_6() -> Outcome {
    let t = Tolerances::default();
    let cases = [
        (srs_frame(), DesignKind::Srs, EstimatorKind::SampleMean),
        (srs_frame(), DesignKind::SrsWr, EstimatorKind::SampleMean),
        (
            pps_frame(&[2.0, 2.0, 3.0]),
            DesignKind::PpsWr,
            EstimatorKind::HansenHurvitz,
        ),
        (
            pps_frame(&[2.0, 2.0, 3.0]),
            DesignKind::PpsWor,
            EstimatorKind::HansenHurvitz,
        ),
        (acs_frame(), DesignKind::AcsWr, EstimatorKind::AcsMean),
        (acs_frame(), DesignKind::Acs, EstimatorKind::AcsMean),
    ];
    let mut details = Vec::new();
    for (i, (frame, design, est)) in cases.into_iter().enumerate() {
        let s = Scenario::new(frame, design, 2, None).map_err(|e| e.to_string())?;
        let exact = enumerate_moments(&s, est).map_err(|e| e.to_string())?;
        let settings = MonteCarloSettings::new(1_000_000, 0x5eed + i as u64);
        let a = simulate(&s, est, &settings.with_workers(1)).map_err(|e| e.to_string())?;
        let b = simulate(&s, est, &settings.with_workers(4)).map_err(|e| e.to_string())?;
        check(
            a == b && a.mean.to_bits() == b.mean.to_bits() && a.variance.to_bits() == b.variance.to_bits(),
            format!("{design}: reruns differ"),
        )?;
        check(
            t.empirical_agrees(a.mean, exact.mean, Some(a.mean_se)),
            format!("{design}: mean {} vs {}", a.mean, exact.mean),
        )?;
        check(
            t.empirical_agrees(a.variance, exact.variance, a.variance_se),
            format!("{design}: variance {} vs {}", a.variance, exact.variance),
        )?;
        let z = (a.variance - exact.variance) / a.variance_se.unwrap_or(f64::NAN);
        details.push(format!("{design} z={z:+.2}"));
    }
    Ok(format!(
        "10^6 trials each, workers 1 and 4 bit-identical; variance {}",
        details.join(", ")
    ))
}

fn criterion_7() -> Outcome {
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for pop in classified_grid() {
        let probs = pop.proportions();
        for n in 1..=pop.total() {
            for r in [Replacement::Without, Replacement::With] {
                let dist = enumerate_count_distribution(&pop, n, r).map_err(|e| e.to_string())?;
                let mut total = 0.0;
                for c in compositions(n, pop.classes()) {
                    let cv = CountVector::new(c.clone()).unwrap();
                    let p = match r {
                        Replacement::Without => mvhyper_pmf(&cv, &pop),
                        Replacement::With => multinomial_pmf(&cv, &probs),
                    }
                    .map_err(|e| e.to_string())?;
                    total += p;
                    let d = (p - dist.probability(&c)).abs();
                    worst = worst.max(d);
                    check(
                        d <= 1e-12,
                        format!(
                            "{:?} n={n} {r:?} {c:?}: pmf {p} vs {}",
                            pop.sizes(),
                            dist.probability(&c)
                        ),
                    )?;
                    points += 1;
                }
                check(
                    (total - 1.0).abs() <= 1e-10,
                    format!("{:?} n={n} {r:?}: pmf sums to {total}", pop.sizes()),
                )?;
                check(
                    (dist.total_probability() - 1.0).abs() <= 1e-10,
                    format!(
                        "{:?} n={n} {r:?}: enumeration sums to {}",
                        pop.sizes(),
                        dist.total_probability()
                    ),
                )?;
            }
        }
    }
    // the recursion agrees with brute-force ordered enumeration wherever the latter fits
    let mut ordered = 0;
    for pop in classified_grid().into_iter().filter(|p| p.total() <= 7) {
        for n in 1..=pop.total() {
            for r in [Replacement::Without, Replacement::With] {
                let Ok(brute) = enumerate_count_distribution_ordered(&pop, n, r, 200_000) else {
                    continue;
                };
                let fast = enumerate_count_distribution(&pop, n, r).unwrap();
                for (c, p) in brute.iter() {
                    check(
                        (p - fast.probability(c)).abs() <= 1e-12,
                        format!("{:?} n={n} {r:?} {c:?}", pop.sizes()),
                    )?;
                }
                ordered += 1;
            }
        }
    }
    Ok(format!("{points} support points, max |pmf - enumerated| = {worst:.2e}; {ordered} cases cross-checked by ordered enumeration"))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 7] = [
        ("1 covariance identity grid", criterion_1, Some(Duration::from_secs(10))),
        ("2 srs example", criterion_2, None),
        ("3 pps example", criterion_3, None),
        ("4 acs example", criterion_4, None),
        ("5 random groups", criterion_5, Some(Duration::from_secs(60))),
        ("6 monte carlo concordance", criterion_6, Some(Duration::from_secs(120))),
        ("7 pmf normalization", criterion_7, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({elapsed:.2?}) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({elapsed:.2?}) {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
