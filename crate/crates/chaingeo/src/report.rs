use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::SCHEMA_VERSION;
use crate::error::{CliError, CliResult};
use crate::instance::InstanceSummary;

/// One prediction compared with the computed value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub claim: String,
    pub expected: Value,
    pub computed: Value,
    pub pass: bool,
}

impl Check {
    pub fn new(
        suite: &str,
        name: &str,
        claim: impl Into<String>,
        expected: impl Serialize,
        computed: impl Serialize,
    ) -> Self {
        let expected = serde_json::to_value(expected).expect("plain data serializes");
        let computed = serde_json::to_value(computed).expect("plain data serializes");
        Check {
            suite: suite.into(),
            name: name.into(),
            claim: claim.into(),
            pass: expected == computed,
            expected,
            computed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versions {
    pub chaingeo: String,
    pub chaingeo_core: String,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            chaingeo: env!("CARGO_PKG_VERSION").into(),
            chaingeo_core: chaingeo_core::VERSION.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub versions: Versions,
    pub instance: InstanceSummary,
    pub seed: u64,
    pub suites: Vec<String>,
    pub checks: Vec<Check>,
    pub summary: Summary,
    /// Wall-clock time per suite; only present when requested because it
    /// breaks byte-for-byte reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

impl Report {
    pub fn new(instance: InstanceSummary, seed: u64, suites: Vec<String>, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        Report {
            schema_version: SCHEMA_VERSION,
            versions: Versions::default(),
            instance,
            seed,
            suites,
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
            timings_ms: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let report: Report = serde_json::from_str(text).map_err(|e| CliError::Report(e.to_string()))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(CliError::Report(format!(
                "schema version {} is not supported",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    fn to_csv(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            suite: &'a str,
            name: &'a str,
            expected: String,
            computed: String,
            pass: bool,
            claim: &'a str,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.checks {
            w.serialize(Row {
                suite: &c.suite,
                name: &c.name,
                expected: c.expected.to_string(),
                computed: c.computed.to_string(),
                pass: c.pass,
                claim: &c.claim,
            })
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv is utf-8")
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.instance;
        let _ = writeln!(
            out,
            "{} with |K| = {}, {} points, seed {}",
            i.ring, i.subfield_size, i.points, self.seed
        );
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{mark}] {}/{}: {}", c.suite, c.name, c.claim);
            let _ = writeln!(out, "       expected {}, computed {}", c.expected, c.computed);
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} checks, {} passed, {} failed", s.total, s.passed, s.failed);
        if let Some(t) = &self.timings_ms {
            for (suite, ms) in t {
                let _ = writeln!(out, "{suite}: {ms} ms");
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}
