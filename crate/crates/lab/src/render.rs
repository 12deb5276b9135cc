//! Serialises experiment outputs as CSV tables or JSON documents.
//!
//! CSV output starts with `# `-prefixed comment lines; the first carries the
//! resolved parameter set of every `n` involved.

use serde::Serialize;

use crate::config::Format;
use crate::error::Result;
use crate::experiments::{
    CertifyOutput, DemCheckOutput, DensityOutput, SimulateOutput, SweepOutput, TrackOutput,
};
use crate::formats::{csv_table, json_document, params_comment};

#[derive(Serialize)]
struct SimulateRow {
    n: usize,
    seed: u64,
    stop: String,
    steps: usize,
    edges: usize,
    max_degree: usize,
    min_degree: usize,
    open_remaining: usize,
    terminated: bool,
    certified_steps: usize,
    k4_free: bool,
    maximal: Option<bool>,
}

pub fn simulate(out: &SimulateOutput, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_document(out),
        Format::Csv => {
            let s = &out.summary;
            let row = SimulateRow {
                n: s.n,
                seed: s.seed,
                stop: out.stop.clone(),
                steps: s.steps,
                edges: out.edges,
                max_degree: s.max_degree,
                min_degree: s.min_degree,
                open_remaining: s.open_remaining,
                terminated: s.terminated,
                certified_steps: out.certified_steps,
                k4_free: out.certificate.k4_free,
                maximal: out.certificate.maximal,
            };
            csv_table(&[params_comment(&out.params)?], &[row])
        }
    }
}

/// The fixed sweep columns; run index is the row position within each `n`.
#[derive(Serialize)]
struct SweepRow {
    n: usize,
    seed: u64,
    steps: usize,
    edges: usize,
    maxdeg: usize,
    mindeg: usize,
    alpha_greedy: usize,
    alpha_exact: Option<usize>,
    tri_cov: Option<f64>,
}

pub fn sweep(out: &SweepOutput, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_document(out),
        Format::Csv => {
            let mut comments = Vec::new();
            for p in &out.params {
                comments.push(params_comment(p)?);
            }
            comments.push(format!("stop {}", out.stop));
            for m in &out.means {
                comments.push(format!("mean {}", serde_json::to_string(m)?));
            }
            comments.push(format!("fits {}", serde_json::to_string(&out.fits)?));
            let rows: Vec<SweepRow> = out
                .records
                .iter()
                .map(|r| SweepRow {
                    n: r.n,
                    seed: r.seed,
                    steps: r.steps,
                    edges: r.edges,
                    maxdeg: r.maxdeg,
                    mindeg: r.mindeg,
                    alpha_greedy: r.alpha_greedy,
                    alpha_exact: r.alpha_exact,
                    tri_cov: r.tri_cov,
                })
                .collect();
            csv_table(&comments, &rows)
        }
    }
}

pub fn track(out: &TrackOutput, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_document(out),
        Format::Csv => {
            let mut comments = vec![params_comment(&out.params)?, format!("stop {}", out.stop)];
            comments.push(format!("sigma {}", serde_json::to_string(&out.sigma)?));
            if let Some(s) = &out.sigma_star {
                comments.push(format!(
                    "sigma_star {}",
                    serde_json::json!({ "I": s.i_set, "branch": s.branch, "feasible": s.feasible })
                ));
            }
            comments.push(format!("summary {}", serde_json::to_string(&out.summary)?));
            comments.push(format!(
                "counters {}",
                serde_json::to_string(&out.counters)?
            ));
            comments.push(format!(
                "bad_events {}",
                serde_json::to_string(&out.bad_events)?
            ));
            for a in &out.audits {
                comments.push(format!("audit {}", serde_json::to_string(a)?));
            }
            comments.push(format!(
                "envelope {}",
                serde_json::to_string(&out.envelope)?
            ));
            csv_table(&comments, &out.rows)
        }
    }
}

#[derive(Serialize)]
struct DemRow<'a> {
    n: usize,
    variable: &'a str,
    item: &'a str,
    status: String,
    observed: f64,
    required: f64,
    detail: &'a str,
}

pub fn dem_check(out: &DemCheckOutput, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_document(out),
        Format::Csv => {
            let comments = out
                .params
                .iter()
                .map(params_comment)
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for c in &out.checks {
                for item in &c.report.items {
                    rows.push(DemRow {
                        n: c.n,
                        variable: &c.report.variable,
                        item: &item.item,
                        status: serde_json::to_value(item.status)?
                            .as_str()
                            .unwrap_or_default()
                            .to_string(),
                        observed: item.observed,
                        required: item.required,
                        detail: item.detail.as_deref().unwrap_or(""),
                    });
                }
            }
            csv_table(&comments, &rows)
        }
    }
}

#[derive(Serialize)]
struct DensityRow<'a> {
    lemma: &'a str,
    checked: usize,
    applicable: usize,
    violations: usize,
    worst_observed: Option<f64>,
    worst_bound: Option<f64>,
}

pub fn density_check(out: &DensityOutput, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_document(out),
        Format::Csv => {
            let mut comments = vec![params_comment(&out.params)?];
            comments.push(format!("summary {}", serde_json::to_string(&out.summary)?));
            comments.push(format!("sigma {}", serde_json::to_string(&out.sigma)?));
            comments.push(format!("xi {}", serde_json::to_string(&out.xi)?));
            comments.push(format!(
                "quadruple_repair {}",
                serde_json::to_string(&out.repair)?
            ));
            for e in &out.edge_sets {
                comments.push(format!("edge_set {}", serde_json::to_string(e)?));
            }
            let rows: Vec<DensityRow> =
                out.reports
                    .iter()
                    .map(|r| {
                        let worst = r.violations.iter().max_by(|a, b| {
                            (a.observed / a.bound).total_cmp(&(b.observed / b.bound))
                        });
                        DensityRow {
                            lemma: &r.lemma,
                            checked: r.checked,
                            applicable: r.applicable,
                            violations: r.violations.len(),
                            worst_observed: worst.map(|v| v.observed),
                            worst_bound: worst.map(|v| v.bound),
                        }
                    })
                    .collect();
            csv_table(&comments, &rows)
        }
    }
}

#[derive(Serialize)]
struct CertifyRow<'a> {
    n: usize,
    seed: u64,
    edges: usize,
    source: &'a str,
    k4_free: bool,
    witness: String,
    terminated: bool,
    maximal: Option<bool>,
    maximality_witness: String,
    passed: bool,
}

pub fn certify(out: &CertifyOutput, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_document(out),
        Format::Csv => {
            let c = &out.certificate;
            let row = CertifyRow {
                n: out.n,
                seed: out.seed,
                edges: out.edges,
                source: &out.source,
                k4_free: c.k4_free,
                witness: c
                    .witness
                    .map(|q| {
                        q.iter()
                            .map(|x| (x + 1).to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .unwrap_or_default(),
                terminated: c.terminated,
                maximal: c.maximal,
                maximality_witness: c
                    .maximality_witness
                    .map(|p| format!("{} {}", p.u + 1, p.v + 1))
                    .unwrap_or_default(),
                passed: c.passed(),
            };
            csv_table(&[params_comment(&out.params)?], &[row])
        }
    }
}
