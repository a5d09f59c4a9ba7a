//! Verification reports: one row per checked equation, with the exact
//! residual kept whenever a check fails.

use std::fmt;

use crate::map::GradedMap;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: Option<GradedMap>,
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report { checks: Vec::new() }
    }

    /// Records `name: lhs = rhs`, keeping lhs - rhs when it is nonzero.
    pub fn equation(&mut self, name: impl Into<String>, lhs: &GradedMap, rhs: &GradedMap) {
        self.residual(name, lhs.sub(rhs));
    }

    /// Records a check of the form `residual = 0`.
    pub fn residual(&mut self, name: impl Into<String>, residual: GradedMap) {
        let passed = residual.is_zero();
        self.checks.push(Check {
            name: name.into(),
            passed,
            residual: if passed { None } else { Some(residual) },
        });
    }

    pub fn condition(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            residual: None,
        });
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}.{}", c.name);
            }
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
        }
        Ok(())
    }
}
