//! Report assembly and rendering: plain text for reading, a JSON sidecar
//! for machines, CSV for numeric traces.
//!
//! Rendering is deterministic: the only nondeterministic line is the
//! optional `generated:` header, and every float is printed in fixed
//! scientific form with 12 significant digits.

use num_complex::Complex64;
use serde::Serialize;
use supercyc_core::criteria::{Citation, Conclusion, Fact, FactValue, Verdict};
use supercyc_core::domains::DomainSpec;

/// Fixed-format float: 12 significant digits, scientific.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Fixed-format complex point.
pub fn sig_complex(z: Complex64) -> String {
    format!("({}, {})", sig(z.re), sig(z.im))
}

pub fn render_fact(fact: &Fact) -> String {
    let value = match &fact.value {
        FactValue::Text(s) => s.clone(),
        FactValue::Real(x) => sig(*x),
        FactValue::Int(i) => i.to_string(),
        FactValue::Bool(b) => b.to_string(),
        FactValue::Point(z) => sig_complex(*z),
        FactValue::Points(v) => v
            .iter()
            .map(|&z| sig_complex(z))
            .collect::<Vec<_>>()
            .join("; "),
    };
    format!("{} = {}", fact.label, value)
}

/// Conclusion with its rule tag, as printed: `NotTauPSupercyclic [Prop. 4]`.
pub fn verdict_label(v: &Verdict) -> String {
    match v.citation {
        Some(c) => format!("{} [{}]", v.conclusion, c),
        None => v.conclusion.to_string(),
    }
}

/// One pipeline stage: free-form note lines plus an optional verdict.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub notes: Vec<String>,
    pub verdict: Option<Verdict>,
}

/// A fired conclusion, kept in pipeline order.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConclusionLine {
    pub conclusion: Conclusion,
    pub citation: Option<Citation>,
    pub label: String,
}

/// Scenario echo plus the ordered checks and their fired conclusions.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub name: String,
    pub domain: String,
    pub resolution: u32,
    pub symbol: String,
    pub weight: String,
    pub checks: Vec<Check>,
    pub conclusions: Vec<ConclusionLine>,
    /// The last fired conclusion, or `Inconclusive`.
    pub outcome: String,
}

impl Report {
    pub fn new(name: &str, domain: &DomainSpec, symbol: &str, weight: &str) -> Report {
        Report {
            name: name.to_string(),
            domain: format!("{:?}", domain.kind),
            resolution: domain.resolution,
            symbol: symbol.to_string(),
            weight: weight.to_string(),
            checks: Vec::new(),
            conclusions: Vec::new(),
            outcome: Conclusion::Inconclusive.to_string(),
        }
    }

    /// Records a stage with a verdict; fired conclusions join the summary.
    pub fn push_verdict(&mut self, name: &str, notes: Vec<String>, verdict: Verdict) {
        if verdict.fired() {
            self.conclusions.push(ConclusionLine {
                conclusion: verdict.conclusion,
                citation: verdict.citation,
                label: verdict_label(&verdict),
            });
        }
        self.checks.push(Check {
            name: name.to_string(),
            notes,
            verdict: Some(verdict),
        });
    }

    /// Records a stage that produced notes only.
    pub fn push_note(&mut self, name: &str, notes: Vec<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            notes,
            verdict: None,
        });
    }

    /// Sets the outcome from the recorded conclusions.
    pub fn finish(&mut self) {
        self.outcome = self
            .conclusions
            .last()
            .map(|c| c.label.clone())
            .unwrap_or_else(|| Conclusion::Inconclusive.to_string());
    }

    /// Plain-text rendering. The timestamp, if given, is confined to the
    /// single `generated:` header line; everything else is deterministic.
    pub fn text(&self, timestamp: Option<&str>) -> String {
        let mut out = String::new();
        out.push_str(&format!("supercyc report: {}\n", self.name));
        if let Some(ts) = timestamp {
            out.push_str(&format!("generated: {ts}\n"));
        }
        out.push_str(&format!(
            "domain: {} at resolution {}\n",
            self.domain, self.resolution
        ));
        out.push_str(&format!("symbol: {}\n", self.symbol));
        out.push_str(&format!("weight: {}\n", self.weight));
        for check in &self.checks {
            out.push('\n');
            out.push_str(&format!("check: {}\n", check.name));
            for note in &check.notes {
                out.push_str(&format!("  note: {note}\n"));
            }
            if let Some(v) = &check.verdict {
                out.push_str(&format!("  outcome: {}\n", verdict_label(v)));
                for fact in &v.evidence {
                    out.push_str(&format!("  evidence: {}\n", render_fact(fact)));
                }
                for caveat in &v.caveats {
                    out.push_str(&format!("  caveat: {caveat}\n"));
                }
            }
        }
        out.push_str("\nconclusions\n");
        if self.conclusions.is_empty() {
            out.push_str(&format!("  {}\n", Conclusion::Inconclusive));
        }
        for line in &self.conclusions {
            out.push_str(&format!("  {}\n", line.label));
        }
        out
    }

    /// Machine-readable sidecar; no timestamp, so it is byte-stable.
    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A named CSV artifact.
#[derive(Clone, Debug)]
pub struct Csv {
    pub filename: String,
    pub content: String,
}

impl Csv {
    pub fn new(filename: String, header: &str, rows: Vec<String>) -> Csv {
        let mut content = String::from(header);
        content.push('\n');
        for row in rows {
            content.push_str(&row);
            content.push('\n');
        }
        Csv { filename, content }
    }
}
