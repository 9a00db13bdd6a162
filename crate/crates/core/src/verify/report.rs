use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The state budget ran out; counts neither as pass nor as fail.
    Skipped,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

/// One named property evaluated on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, ok: bool) -> Self {
        Check {
            name,
            ok,
            detail: String::new(),
        }
    }

    pub fn with_detail(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            ok,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRecord {
    pub digest: String,
    pub family: String,
    pub source_feasible: Option<bool>,
    pub reduced_feasible: Option<bool>,
    pub verdict: Verdict,
    pub wall_ms: u64,
    pub checks: Vec<Check>,
}

impl SweepRecord {
    /// Builds a record whose verdict is the conjunction of its checks.
    pub fn from_checks(
        digest: String,
        family: String,
        source_feasible: Option<bool>,
        reduced_feasible: Option<bool>,
        checks: Vec<Check>,
    ) -> Self {
        let verdict = if checks.iter().all(|c| c.ok) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        SweepRecord {
            digest,
            family,
            source_feasible,
            reduced_feasible,
            verdict,
            wall_ms: 0,
            checks,
        }
    }

    pub fn skipped(digest: String, family: String, source_feasible: Option<bool>, why: String) -> Self {
        SweepRecord {
            digest,
            family,
            source_feasible,
            reduced_feasible: None,
            verdict: Verdict::Skipped,
            wall_ms: 0,
            checks: vec![Check::with_detail("budget", true, why)],
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub digest: String,
    pub failed: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub sweep: &'static str,
    pub family: String,
    pub records: Vec<SweepRecord>,
}

impl SweepReport {
    pub fn new(sweep: &'static str, family: String, records: Vec<SweepRecord>) -> Self {
        SweepReport { sweep, family, records }
    }

    pub fn summary(&self) -> SweepSummary {
        let count = |v| self.records.iter().filter(|r| r.verdict == v).count();
        SweepSummary {
            total: self.records.len(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            skipped: count(Verdict::Skipped),
        }
    }

    pub fn counterexamples(&self) -> Vec<Counterexample> {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .map(|r| Counterexample {
                digest: r.digest.clone(),
                failed: r.checks.iter().filter(|c| !c.ok).cloned().collect(),
            })
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn verdict(&self) -> Verdict {
        if self.passed() {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Records where the named check was evaluated and failed.
    pub fn failures_of(&self, name: &str) -> usize {
        self.records
            .iter()
            .filter(|r| r.check(name).is_some_and(|c| !c.ok))
            .count()
    }

    /// Records where the named check was evaluated at all.
    pub fn evaluated(&self, name: &str) -> usize {
        self.records.iter().filter(|r| r.check(name).is_some()).count()
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "sweep": self.sweep,
            "family": self.family,
            "verdict": self.verdict().tag(),
            "summary": self.summary(),
            "counterexamples": self.counterexamples(),
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "digest",
            "family",
            "source_feasible",
            "reduced_feasible",
            "verdict",
            "wall_ms",
        ])?;
        let flag = |b: Option<bool>| b.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            out.write_record([
                r.digest.clone(),
                r.family.clone(),
                flag(r.source_feasible),
                flag(r.reduced_feasible),
                r.verdict.tag().to_string(),
                r.wall_ms.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.json`.
    pub fn write_files(&self, stem: &Path) -> std::io::Result<()> {
        let csv_file = std::fs::File::create(stem.with_extension("csv"))?;
        self.write_csv(std::io::BufWriter::new(csv_file))
            .map_err(std::io::Error::other)?;
        let mut text = serde_json::to_string_pretty(&self.summary_json()).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(stem.with_extension("json"), text)
    }
}
