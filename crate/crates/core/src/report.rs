//! Pass/fail records produced by the verification checks.

use std::fmt;

/// One verified property.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    /// Passes when `measured < tolerance` (NaN fails).
    pub fn below(id: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            passed: measured < tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn new(id: impl Into<String>, passed: bool, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            passed,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

/// Ordered collection of check results.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    /// Worst (largest) measured value among the checks.
    pub fn worst(&self) -> f64 {
        self.checks.iter().map(|c| c.measured).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: measured {:.6e} (tolerance {:.3e}){}{}",
                c.status(),
                c.id,
                c.measured,
                c.tolerance,
                if c.detail.is_empty() { "" } else { " - " },
                c.detail
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}
