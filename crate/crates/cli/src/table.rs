//! Fixed-width text tables. Rust formatting ignores the locale, so numbers
//! always use a decimal point.

use std::fmt::Write;

use finpop::verify::{CountDistributionReport, EnumerationReport, MomentReport, RelativeEfficiencyReport};

const LABEL: usize = 26;
const NUM: usize = 24;

fn num(x: f64) -> String {
    format!("{x:>NUM$.17e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| format!("{:>NUM$}", "-"), num)
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "-",
    }
}

pub fn moment_reports(reports: &[MomentReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{} under {} (n = {})", r.estimator.label(), r.design, r.draws);
        let _ = writeln!(out, "{:<LABEL$}{:>NUM$}{:>NUM$}{:>8}", "", "mean", "variance", "");
        let _ = writeln!(
            out,
            "{:<LABEL$}{}{}",
            "theoretical",
            num(r.theoretical.mean),
            opt(r.theoretical.variance)
        );
        match &r.enumerated {
            Some(e) => {
                let _ = writeln!(
                    out,
                    "{:<LABEL$}{}{}  {}/{}",
                    format!("enumerated ({})", e.outcomes),
                    num(e.mean),
                    num(e.variance),
                    verdict(r.verdicts.enumerated_mean),
                    verdict(r.verdicts.enumerated_variance)
                );
            }
            None => {
                let _ = writeln!(out, "{:<LABEL$}{:>NUM$}", "enumerated", "too large");
            }
        }
        if let Some(e) = &r.empirical {
            let _ = writeln!(
                out,
                "{:<LABEL$}{}{}  {}/{}",
                format!("monte carlo ({})", e.trials),
                num(e.mean),
                num(e.variance),
                verdict(r.verdicts.empirical_mean),
                verdict(r.verdicts.empirical_variance)
            );
            let _ = writeln!(
                out,
                "{:<LABEL$}{}{}",
                "  standard error",
                num(e.mean_se),
                opt(e.variance_se)
            );
        }
        let _ = writeln!(out, "{:<LABEL$}{}", "verdict", if r.pass { "PASS" } else { "FAIL" });
    }
    out.trim_end().to_owned()
}

pub fn efficiency_reports(reports: &[RelativeEfficiencyReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{}: {} vs {} (n = {}, N = {})",
            r.estimator.label(),
            r.design_wor,
            r.design_wr,
            r.draws,
            r.effective_population
        );
        let _ = writeln!(out, "{:<LABEL$}{}", "variance without repl.", num(r.wor_variance));
        let _ = writeln!(out, "{:<LABEL$}{}", "variance with repl.", num(r.wr_variance));
        let _ = writeln!(out, "{:<LABEL$}{}", "ratio", opt(r.ratio));
        let _ = writeln!(out, "{:<LABEL$}{}", "predicted fpc", num(r.predicted_fpc));
        let _ = writeln!(
            out,
            "{:<LABEL$}{:?} ({:.1e})  {}",
            "verdict",
            r.source,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out.trim_end().to_owned()
}

pub fn enumeration_reports(reports: &[EnumerationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{} under {} (n = {})", r.estimator.label(), r.design, r.draws);
        let _ = writeln!(out, "{:<LABEL$}{:>NUM$}{:>NUM$}", "", "mean", "variance");
        let _ = writeln!(
            out,
            "{:<LABEL$}{}{}",
            "theoretical",
            num(r.theoretical.mean),
            opt(r.theoretical.variance)
        );
        let _ = writeln!(
            out,
            "{:<LABEL$}{}{}",
            format!("enumerated ({})", r.enumerated.outcomes),
            num(r.enumerated.mean),
            num(r.enumerated.variance)
        );
    }
    out.trim_end().to_owned()
}

pub fn count_distribution(r: &CountDistributionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "class counts, {} draws from {:?} ({})",
        r.draws, r.subgroup_sizes, r.design
    );
    let _ = writeln!(out, "{:<LABEL$}{:>NUM$}{:>NUM$}", "counts", "enumerated", "pmf");
    for o in &r.outcomes {
        let _ = writeln!(
            out,
            "{:<LABEL$}{}{}",
            format!("{:?}", o.counts),
            num(o.probability),
            num(o.pmf)
        );
    }
    let _ = writeln!(out, "mean");
    let _ = writeln!(
        out,
        "{:<LABEL$}{}",
        "",
        r.mean.iter().map(|&m| num(m)).collect::<String>()
    );
    let _ = writeln!(out, "covariance");
    for row in &r.covariance {
        let _ = writeln!(out, "{:<LABEL$}{}", "", row.iter().map(|&c| num(c)).collect::<String>());
    }
    out.trim_end().to_owned()
}
