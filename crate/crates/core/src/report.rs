//! Machine-readable verdicts.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::series::Truncation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedThrough {
    pub t_order: usize,
    pub q_caps: Vec<usize>,
}

impl From<&Truncation> for VerifiedThrough {
    fn from(t: &Truncation) -> Self {
        Self {
            t_order: t.t_order,
            q_caps: t.q_caps.clone(),
        }
    }
}

/// `pass` is true exactly when `witnesses` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub verified_through: VerifiedThrough,
    pub witnesses: Vec<Witness>,
    pub millis: u64,
}

impl CheckReport {
    pub fn witness_count(&self) -> usize {
        self.witnesses.len()
    }

    /// Zero the timing field, for byte-stable output.
    pub fn without_timing(mut self) -> Self {
        self.millis = 0;
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Accumulates witnesses while a check runs.
pub(crate) struct ReportBuilder {
    check: String,
    through: VerifiedThrough,
    witnesses: Vec<Witness>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(check: &str, through: VerifiedThrough) -> Self {
        Self {
            check: check.to_string(),
            through,
            witnesses: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn witness(&mut self, indices: Vec<usize>, lhs: impl ToString, rhs: impl ToString) {
        self.witnesses.push(Witness {
            indices,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }

    /// Record a witness unless the two sides agree.
    pub fn expect_eq<T: PartialEq + ToString>(&mut self, indices: Vec<usize>, lhs: &T, rhs: &T) {
        if lhs != rhs {
            self.witness(indices, lhs.to_string(), rhs.to_string());
        }
    }

    pub fn finish(mut self) -> CheckReport {
        self.witnesses.sort_by(|a, b| a.indices.cmp(&b.indices));
        CheckReport {
            check: self.check,
            pass: self.witnesses.is_empty(),
            verified_through: self.through,
            witnesses: self.witnesses,
            millis: self.start.elapsed().as_millis() as u64,
        }
    }
}
