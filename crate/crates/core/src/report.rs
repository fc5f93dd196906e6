use serde::Serialize;

/// Outcome of comparing several computation routes over an index range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub methods: Vec<String>,
    /// Inclusive index range that was covered.
    pub range: (i64, i64),
    /// Number of individual comparisons performed.
    pub comparisons: u64,
    pub first_mismatch: Option<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: i64,
    pub k: Option<i64>,
    pub detail: String,
    /// The disagreeing values or rows, labelled by method.
    pub values: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, methods: &[&str], range: (i64, i64)) -> Self {
        VerificationReport {
            check: check.into(),
            methods: methods.iter().map(|m| m.to_string()).collect(),
            range,
            comparisons: 0,
            first_mismatch: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }

    /// Records a mismatch unless an earlier one is already stored.
    pub fn fail(&mut self, mismatch: Mismatch) {
        if self.first_mismatch.is_none() {
            self.first_mismatch = Some(mismatch);
        }
    }

    pub fn summary(&self) -> String {
        let status = match &self.first_mismatch {
            None => "ok".to_string(),
            Some(m) => {
                let at = match m.k {
                    Some(k) => format!("n={}, k={}", m.n, k),
                    None => format!("n={}", m.n),
                };
                let vals: Vec<String> = m.values.iter().map(|(l, v)| format!("{l}={v}")).collect();
                format!("MISMATCH at {at}: {} [{}]", m.detail, vals.join("; "))
            }
        };
        format!(
            "{} ({}) on [{}, {}], {} comparisons: {}",
            self.check,
            self.methods.join(" = "),
            self.range.0,
            self.range.1,
            self.comparisons,
            status
        )
    }
}

/// Renders a list of values as `(a, b, c)`.
pub fn fmt_values<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}
