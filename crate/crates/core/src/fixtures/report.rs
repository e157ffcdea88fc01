//! Structured pass/fail reports for experiments.

use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::exact_math::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
}

impl Check {
    pub fn equal(name: impl Into<String>, lhs: &Rat, rhs: &Rat) -> Check {
        Check { name: name.into(), pass: lhs == rhs, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    pub fn at_least(name: impl Into<String>, lhs: &Rat, rhs: &Rat) -> Check {
        Check { name: name.into(), pass: lhs >= rhs, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    pub fn holds(name: impl Into<String>, pass: bool, lhs: impl Display, rhs: impl Display) -> Check {
        Check { name: name.into(), pass, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(experiment: impl Into<String>) -> Report {
        Report { experiment: experiment.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}
