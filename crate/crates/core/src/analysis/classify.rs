use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jones::{bell_state, BellLabel};
use crate::measurement::correlation_pattern;
use crate::source::{basic_settings, find_counts, CountRecord};

/// Minimum lead of the best cosine score over the runner-up for a confident call.
pub const CONFIDENCE_MARGIN: f64 = 0.2;

/// Which Bell state a set of linear-basis counts looks like.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub label: BellLabel,
    /// Cosine similarity to each Bell pattern, in [`BellLabel::ALL`] order.
    pub scores: [(BellLabel, f64); 4],
    pub confident: bool,
}

impl ClassificationResult {
    pub fn score(&self, label: BellLabel) -> f64 {
        self.scores.iter().find(|(l, _)| *l == label).map(|(_, s)| *s).unwrap_or(0.0)
    }
}

impl Serialize for ClassificationResult {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report {
            label: BellLabel,
            scores: BTreeMap<&'static str, f64>,
            confident: bool,
        }
        Report {
            label: self.label,
            scores: self.scores.iter().map(|(l, s)| (l.token(), *s)).collect(),
            confident: self.confident,
        }
        .serialize(ser)
    }
}

/// Ideal coincidence probabilities of `label` over the settings of [`basic_settings`]
/// (`HH, VV, HV, VH, DD, AA, DA, AD`).
pub fn bell_pattern(label: BellLabel) -> [f64; 8] {
    let pattern = correlation_pattern(&bell_state(label));
    let mut out = [0.0; 8];
    for (slot, (a, b)) in out.iter_mut().zip(basic_settings()) {
        let (a, b) = match (a, b) {
            (crate::AnalyzerSetting::Named(a), crate::AnalyzerSetting::Named(b)) => (a, b),
            _ => unreachable!("basic settings are named"),
        };
        *slot = pattern.get(a, b).expect("linear settings");
    }
    out
}

fn cosine(x: &[f64; 8], y: &[f64; 8]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    dot / (nx * ny)
}

/// Classifies eight counts ordered `HH, VV, HV, VH, DD, AA, DA, AD`.
pub fn classify_counts(counts: &[f64; 8]) -> Result<ClassificationResult> {
    if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::Domain("counts must be finite and non-negative".into()));
    }
    if counts.iter().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroTotal("classification counts".into()));
    }
    let scores = BellLabel::ALL.map(|l| (l, cosine(counts, &bell_pattern(l))));
    let mut ranked = scores;
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1));
    Ok(ClassificationResult {
        label: ranked[0].0,
        scores,
        confident: ranked[0].1 - ranked[1].1 >= CONFIDENCE_MARGIN,
    })
}

/// Extracts the eight linear-basis counts from records, listing any missing combination.
pub fn basic_counts(records: &[CountRecord]) -> Result<[f64; 8]> {
    let mut counts = [0.0; 8];
    let mut missing = Vec::new();
    for (slot, (a, b)) in counts.iter_mut().zip(basic_settings()) {
        match find_counts(records, &a, &b) {
            Some(c) => *slot = c as f64,
            None => missing.push(format!("{a}{b}")),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingSettings(missing));
    }
    Ok(counts)
}

pub fn classify_bell(records: &[CountRecord]) -> Result<ClassificationResult> {
    classify_counts(&basic_counts(records)?)
}
