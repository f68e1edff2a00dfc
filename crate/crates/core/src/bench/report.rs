use std::fs;
use std::io::Write;
use std::path::Path;

use crate::classify::{ClassifierKind, VoteRule};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "classifier,rule,k,accuracy,n_test,n_train,dim,seed,elapsed_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub classifier: ClassifierKind,
    pub rule: VoteRule,
    /// `None` for the parameter-free HSP classifier.
    pub k: Option<usize>,
    /// Percent correct, in `[0, 100]`.
    pub accuracy: f64,
    pub n_test: usize,
    pub n_train: usize,
    pub dim: usize,
    pub seed: u64,
    /// Left empty unless timing was requested; wall time is not
    /// reproducible.
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AccuracyReport {
    pub rows: Vec<ReportRow>,
}

impl AccuracyReport {
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let k = r.k.map(|k| k.to_string()).unwrap_or_default();
            let ms = r.elapsed_ms.map(|m| m.to_string()).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.classifier, r.rule, k, r.accuracy, r.n_test, r.n_train, r.dim, r.seed, ms
            ));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    /// Rows for one classifier and rule, in report order.
    pub fn curve(&self, classifier: ClassifierKind, rule: VoteRule) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.classifier == classifier && r.rule == rule)
            .collect()
    }
}

/// Best accuracy of one (classifier, rule) pair and the first `k` that
/// reached it.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxRow {
    pub classifier: ClassifierKind,
    pub rule: VoteRule,
    pub k: Option<usize>,
    pub accuracy: f64,
}

/// Reduces a sweep to one maximum per (classifier, rule), in order of
/// first appearance.
pub fn summarize_max(report: &AccuracyReport) -> Vec<MaxRow> {
    let mut out: Vec<MaxRow> = Vec::new();
    for r in &report.rows {
        match out
            .iter_mut()
            .find(|m| m.classifier == r.classifier && m.rule == r.rule)
        {
            Some(m) if r.accuracy > m.accuracy => {
                m.accuracy = r.accuracy;
                m.k = r.k;
            }
            Some(_) => {}
            None => out.push(MaxRow {
                classifier: r.classifier,
                rule: r.rule,
                k: r.k,
                accuracy: r.accuracy,
            }),
        }
    }
    out
}

/// Classifier × rule grid of maxima as aligned text.
pub fn format_max_table(rows: &[MaxRow]) -> String {
    let mut rules: Vec<VoteRule> = Vec::new();
    let mut kinds: Vec<ClassifierKind> = Vec::new();
    for r in rows {
        if !rules.contains(&r.rule) {
            rules.push(r.rule);
        }
        if !kinds.contains(&r.classifier) {
            kinds.push(r.classifier);
        }
    }
    let mut s = format!("{:<8}", "");
    for rule in &rules {
        s.push_str(&format!("{:>16}", rule.name()));
    }
    s.push('\n');
    for kind in &kinds {
        s.push_str(&format!("{:<8}", kind.name()));
        for rule in &rules {
            let cell = rows
                .iter()
                .find(|r| r.classifier == *kind && r.rule == *rule)
                .map(|r| match r.k {
                    Some(k) => format!("{:.1} (k={k})", r.accuracy),
                    None => format!("{:.1}", r.accuracy),
                })
                .unwrap_or_default();
            s.push_str(&format!("{cell:>16}"));
        }
        s.push('\n');
    }
    s
}
