//! Run records and evaluation reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use embridge_core::corpus::IngestReport;
use embridge_core::eval::{ContentEvalReport, ContentMethod, LinkEvalReport, LinkMethod};
use embridge_core::NetworkStats;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::push_float;

/// The resolved configuration of one command, enough to repeat it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
}

impl RunRecord {
    pub fn new(command: &str) -> Self {
        Self {
            tool: "embridge".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.into(), value.to_string());
        self
    }

    /// `# key = value` lines for the head of a report.
    pub fn header(&self) -> String {
        let mut out = format!("# {} {} {}\n", self.tool, self.version, self.command);
        for (k, v) in &self.config {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        out
    }

    /// Path of the record written next to `output`.
    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".run.json");
        output.with_file_name(name)
    }

    /// Writes the record as JSON next to `output`; strict formats such as
    /// embedding files have no room for a header.
    pub fn write_sidecar(&self, output: &Path) -> Result<()> {
        let path = Self::sidecar_path(output);
        let mut json = serde_json::to_string_pretty(self).expect("record serializes");
        json.push('\n');
        std::fs::write(&path, json).map_err(|e| Error::io(path, e))
    }
}

fn pct(gain: Option<f64>) -> String {
    match gain {
        Some(g) => format!("{:+.1}%", 100.0 * g),
        None => "undefined".into(),
    }
}

fn flat_value(out: &mut String, id: &str, method: &str, metric: &str, value: f64) {
    write!(out, "{id}\t{method}\t{metric}\t").unwrap();
    push_float(out, value);
    out.push('\n');
}

/// Average P@n per method with gains of the translated method.
pub fn link_summary(report: &LinkEvalReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "documents evaluated: {} (skipped without links: {})\n",
        report.documents.len(),
        report.skipped_no_links
    )
    .unwrap();
    write!(out, "{:<24}", "method").unwrap();
    for n in &report.n_values {
        write!(out, "{:>10}", format!("P@{n}")).unwrap();
    }
    out.push('\n');
    for method in LinkMethod::ALL {
        write!(out, "{:<24}", method.name()).unwrap();
        for p in report.average(method) {
            write!(out, "{p:>10.4}").unwrap();
        }
        out.push('\n');
    }
    out.push('\n');
    for base in [LinkMethod::ContentCosine, LinkMethod::Random200] {
        write!(out, "{:<24}", format!("gain vs {}", base.name())).unwrap();
        for g in report.gain_over(base) {
            write!(out, "{:>10}", pct(g)).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "\nmax orthogonality residual: {:e}", report.max_orthogonality_residual()).unwrap();
    out
}

/// Run header followed by [`link_summary`].
pub fn link_table(report: &LinkEvalReport, record: &RunRecord) -> String {
    format!("{}\n{}", record.header(), link_summary(report))
}

/// One `id<TAB>method<TAB>metric<TAB>value` line per document, method and n.
pub fn link_flat(report: &LinkEvalReport, record: &RunRecord) -> String {
    let mut out = record.header();
    out.push_str("# id\tmethod\tmetric\tvalue\n");
    for d in &report.documents {
        for method in LinkMethod::ALL {
            for (n, &p) in report.n_values.iter().zip(d.scores(method)) {
                flat_value(&mut out, &d.id, method.name(), &format!("P@{n}"), p);
            }
        }
    }
    out
}

/// Average precision, recall and F1 per method. Recall is the headline
/// figure: the share of truly similar documents recovered.
pub fn content_summary(report: &ContentEvalReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "documents evaluated: {} (skipped with empty similar set: {})\n",
        report.documents.len(),
        report.skipped_empty_truth
    )
    .unwrap();
    writeln!(out, "{:<24}{:>10}{:>10}{:>10}", "method", "recall", "precision", "f1").unwrap();
    for method in ContentMethod::ALL {
        let s = report.average(method);
        writeln!(out, "{:<24}{:>10.4}{:>10.4}{:>10.4}", method.name(), s.recall, s.precision, s.f1).unwrap();
    }
    let ours = report.average(ContentMethod::Translated).recall;
    let base = report.average(ContentMethod::NodeCosine).recall;
    let ratio = if base > 0.0 { format!("{:.3}", ours / base) } else { "undefined".into() };
    writeln!(out, "\nrecall ratio translated / node-cosine: {ratio}").unwrap();
    writeln!(out, "max orthogonality residual: {:e}", report.max_orthogonality_residual()).unwrap();
    out
}

/// Run header followed by [`content_summary`].
pub fn content_table(report: &ContentEvalReport, record: &RunRecord) -> String {
    format!("{}\n{}", record.header(), content_summary(report))
}

pub fn content_flat(report: &ContentEvalReport, record: &RunRecord) -> String {
    let mut out = record.header();
    out.push_str("# id\tmethod\tmetric\tvalue\n");
    for d in &report.documents {
        for method in ContentMethod::ALL {
            let s = d.scores(method);
            flat_value(&mut out, &d.id, method.name(), "precision", s.precision);
            flat_value(&mut out, &d.id, method.name(), "recall", s.recall);
            flat_value(&mut out, &d.id, method.name(), "f1", s.f1);
            flat_value(&mut out, &d.id, method.name(), "estimated_size", s.estimated_size as f64);
        }
        flat_value(&mut out, &d.id, "truth", "size", d.truth_size as f64);
    }
    out
}

pub fn stats_table(stats: &NetworkStats, ingest: &IngestReport) -> String {
    format!(
        "documents\t{}\nlinks\t{}\nwith_content\t{}\nisolated\t{}\nself_loops_dropped\t{}\nduplicate_links_dropped\t{}\n",
        stats.n_documents, stats.n_links, stats.n_with_content, stats.n_isolated, ingest.self_loops, ingest.duplicates
    )
}
