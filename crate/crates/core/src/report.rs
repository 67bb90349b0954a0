use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Outcome of a verification campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub theorem: String,
    pub parameters: BTreeMap<String, Value>,
    pub checked_count: u64,
    pub counts: BTreeMap<String, u64>,
    pub failures: Vec<Failure>,
    pub witnesses: Vec<Value>,
    pub notes: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub object: Value,
    pub detail: String,
}

impl Report {
    pub fn new(theorem: &str, seed: u64) -> Self {
        Report {
            theorem: theorem.to_string(),
            parameters: BTreeMap::new(),
            checked_count: 0,
            counts: BTreeMap::new(),
            failures: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
            seed,
            elapsed_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn bump(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += by;
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Records the outcome of one check; a false `ok` becomes a failure.
    pub fn check(&mut self, check: &str, ok: bool, object: impl FnOnce() -> Value, detail: impl FnOnce() -> String) {
        self.checked_count += 1;
        if !ok {
            self.fail(check, object(), detail());
        }
    }

    pub fn fail(&mut self, check: &str, object: Value, detail: String) {
        self.failures.push(Failure { check: check.to_string(), object, detail });
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.checked_count += other.checked_count;
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.failures.extend(other.failures);
        self.witnesses.extend(other.witnesses);
        self.notes.extend(other.notes);
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Flat `key,value` rows: the theorem id, totals, then the counts.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        out.push_str(&format!("theorem,{}\n", self.theorem));
        out.push_str(&format!("checked_count,{}\n", self.checked_count));
        out.push_str(&format!("failures,{}\n", self.failures.len()));
        for (k, v) in &self.counts {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}
