//! `report`: render an analysis as markdown tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use induction::stimuli::Experiment;
use induction::Phenomenon;

use crate::analyze::{Analysis, SignRow};

fn fmt_p(p: Option<f64>) -> String {
    match p {
        None => "n/a".into(),
        Some(p) if p < 0.001 => "<.001".into(),
        Some(p) => format!("{p:.3}"),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.3}"))
}

fn phenomenon_name(tag: &str) -> String {
    Phenomenon::from_tag(tag).map_or_else(|| tag.to_string(), |p| p.display_name().to_string())
}

fn table(out: &mut String, head: &[String], rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", head.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out.push('\n');
}

/// One grid per source: phenomena down, domains across, each cell the sign
/// test p-value with its direction marker.
fn sign_grids(out: &mut String, a: &Analysis) {
    let _ = writeln!(
        out,
        "Sign tests on pair judgments. `*` marks a significant preference for the predicted argument, `∘` for the other one (alpha = {}).\n",
        a.alpha
    );
    for source in &a.sources {
        let rows: Vec<&SignRow> = a.sign_tests.iter().filter(|r| &r.source == source).collect();
        if rows.is_empty() {
            continue;
        }
        let mut domains: Vec<&str> = Vec::new();
        let mut phenomena: Vec<&str> = Vec::new();
        for r in &rows {
            if !domains.contains(&r.domain.as_str()) {
                domains.push(&r.domain);
            }
            if !phenomena.contains(&r.phenomenon.as_str()) {
                phenomena.push(&r.phenomenon);
            }
        }
        let cell: BTreeMap<(&str, &str), &SignRow> =
            rows.iter().map(|r| ((r.phenomenon.as_str(), r.domain.as_str()), *r)).collect();
        let _ = writeln!(out, "### {source}\n");
        let mut head = vec!["Phenomenon".to_string()];
        head.extend(domains.iter().map(|d| d.to_string()));
        let body: Vec<Vec<String>> = phenomena
            .iter()
            .map(|p| {
                let mut row = vec![phenomenon_name(p)];
                for d in &domains {
                    row.push(cell.get(&(*p, *d)).map_or_else(String::new, |r| {
                        format!("{}{} ({}/{})", fmt_p(r.p), r.marker, r.plus, r.n)
                    }));
                }
                row
            })
            .collect();
        table(out, &head, &body);
    }
}

fn exp2_tables(out: &mut String, a: &Analysis) {
    let _ = writeln!(out, "## Rank correlations\n");
    let pairs: Vec<(String, String)> = {
        let mut v = Vec::new();
        for c in &a.correlations {
            let k = (c.model.clone(), c.against.clone());
            if !v.contains(&k) {
                v.push(k);
            }
        }
        v
    };
    let mut head = vec!["Split".to_string(), "Set".to_string()];
    head.extend(pairs.iter().map(|(m, h)| format!("{m} ~ {h}")));
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for c in &a.correlations {
        if !keys.contains(&(c.split.as_str(), c.set.as_str())) {
            keys.push((&c.split, &c.set));
        }
    }
    let body: Vec<Vec<String>> = keys
        .iter()
        .map(|(split, set)| {
            let mut row = vec![split.to_string(), set.to_string()];
            for (m, h) in &pairs {
                let c = a
                    .correlations
                    .iter()
                    .find(|c| c.split == *split && c.set == *set && &c.model == m && &c.against == h);
                row.push(c.map_or_else(String::new, |c| fmt_opt(c.rho)));
            }
            row
        })
        .collect();
    table(out, &head, &body);

    if !a.reliability.is_empty() {
        let _ = writeln!(out, "## Split-half reliability of human ratings\n");
        let head: Vec<String> = ["Split", "Set", "Mean ρ", "SE", "Splits", "Stimuli"].map(String::from).to_vec();
        let body: Vec<Vec<String>> = a
            .reliability
            .iter()
            .map(|r| {
                vec![
                    r.split.clone(),
                    r.set.clone(),
                    format!("{:.3}", r.mean),
                    format!("{:.3}", r.se),
                    r.splits.to_string(),
                    r.stimuli.to_string(),
                ]
            })
            .collect();
        table(out, &head, &body);
    }

    if !a.bootstrap.is_empty() {
        let _ = writeln!(
            out,
            "## Bootstrap comparisons\n\nShare of resamples in which the row model correlates better with human ratings than the column model.\n"
        );
        let mut keys: Vec<(&str, &str)> = Vec::new();
        for b in &a.bootstrap {
            if !keys.contains(&(b.split.as_str(), b.set.as_str())) {
                keys.push((&b.split, &b.set));
            }
        }
        for (split, set) in keys {
            let rows: Vec<_> = a.bootstrap.iter().filter(|b| b.split == split && b.set == set).collect();
            let models: BTreeSet<&str> = rows.iter().map(|b| b.model_a.as_str()).collect();
            let models: Vec<&str> = models.into_iter().collect();
            let _ = writeln!(out, "### {split} ({set})\n");
            let mut head = vec!["M1 \\ M2".to_string()];
            head.extend(models.iter().map(|m| m.to_string()));
            let body: Vec<Vec<String>> = models
                .iter()
                .map(|m1| {
                    let mut row = vec![m1.to_string()];
                    for m2 in &models {
                        row.push(
                            rows.iter()
                                .find(|b| b.model_a == *m1 && b.model_b == *m2)
                                .map_or_else(|| "-".into(), |b| format!("{:.3}", b.proportion)),
                        );
                    }
                    row
                })
                .collect();
            table(out, &head, &body);
        }
    }
}

pub fn render(a: &Analysis) -> String {
    let mut out = String::new();
    let p = &a.provenance;
    let _ = writeln!(
        out,
        "<!-- seed={} config={} suite={} -->\n",
        p.seed, p.config_hash, p.suite_hash
    );
    match a.experiment {
        Experiment::Exp1 => {
            let _ = writeln!(out, "# Pair judgments\n");
            sign_grids(&mut out, a);
        }
        Experiment::Exp2 => {
            let _ = writeln!(out, "# Argument ratings\n");
            exp2_tables(&mut out, a);
        }
    }
    if !a.warnings.is_empty() {
        let _ = writeln!(out, "## Warnings\n");
        for w in &a.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

pub fn cmd_report(analysis: &Path, out: Option<&Path>) -> Result<PathBuf> {
    let path = if analysis.is_dir() {
        analysis.join("analysis.json")
    } else {
        analysis.to_path_buf()
    };
    let a = Analysis::load(&path)?;
    let target = out.map_or_else(
        || path.parent().unwrap_or(Path::new(".")).join("report.md"),
        Path::to_path_buf,
    );
    std::fs::write(&target, render(&a)).with_context(|| format!("writing {}", target.display()))?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_formatting() {
        assert_eq!(fmt_p(Some(0.0001)), "<.001");
        assert_eq!(fmt_p(Some(0.25)), "0.250");
        assert_eq!(fmt_p(None), "n/a");
        assert_eq!(phenomenon_name("nope"), "nope");
    }
}
