//! Run reports.

use serde::Serialize;

use crate::consistency::ResidualReport;

/// A suite that was not run, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skip {
    pub suite: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub suite: String,
    pub pass: bool,
    /// Wall-clock time; only recorded on request so reports stay reproducible.
    pub runtime_ms: Option<u64>,
    pub checks: Vec<ResidualReport>,
    pub skipped: Vec<Skip>,
}

impl Report {
    pub fn new(
        scenario: &str,
        suites: &[String],
        checks: Vec<ResidualReport>,
        skipped: Vec<Skip>,
    ) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            scenario: scenario.to_string(),
            suite: suites.join(","),
            pass,
            runtime_ms: None,
            checks,
            skipped,
        }
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {}  suite {}\n", self.scenario, self.suite);
        for c in &self.checks {
            let residual = if c.max_residual.is_finite() {
                format!("{:.3e}", c.max_residual)
            } else {
                "non-finite".into()
            };
            out.push_str(&format!(
                "  {:<4} {:<44} residual {:>10}  tol {:.1e}  samples {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                residual,
                c.tolerance,
                c.samples
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("  SKIP {:<44} {}\n", s.suite, s.reason));
        }
        if let Some(ms) = self.runtime_ms {
            out.push_str(&format!("  runtime {ms} ms\n"));
        }
        out.push_str(if self.pass {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        });
        out
    }
}
