use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use serde::{Serialize, Serializer};

use super::bootstrap::bootstrap_counts;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::jones::{bell_state, BellLabel};
use crate::measurement::{projector_probability, AnalyzerSetting};
use crate::source::{find_counts, CountRecord};

/// Analyzer polarization angles (radians) of a CHSH test. The matching
/// waveplate angles are half these values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshAngles {
    /// `a = 0°, a′ = 45°, b = 22.5°, b′ = 67.5°`
    fn default() -> Self {
        Self {
            a: 0.0,
            a_prime: FRAC_PI_4,
            b: FRAC_PI_8,
            b_prime: 3.0 * FRAC_PI_8,
        }
    }
}

/// Outcome order inside each angle pair: `(+,+), (+,−), (−,+), (−,−)`.
const OUTCOMES: [(f64, f64); 4] = [(0.0, 0.0), (0.0, FRAC_PI_2), (FRAC_PI_2, 0.0), (FRAC_PI_2, FRAC_PI_2)];
const OUTCOME_NAMES: [&str; 4] = ["++", "+-", "-+", "--"];

impl ChshAngles {
    /// `(a,b), (a,b′), (a′,b), (a′,b′)`
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }

    /// `[a, a′, b, b′]` in degrees.
    pub fn degrees(&self) -> [f64; 4] {
        [self.a, self.a_prime, self.b, self.b_prime].map(f64::to_degrees)
    }

    /// The 16 analyzer pairs, angle-pair major, outcomes ordered `++, +−, −+, −−`.
    /// A `−` outcome is the orthogonal polarization, 90° away.
    pub fn settings(&self) -> Vec<(AnalyzerSetting, AnalyzerSetting)> {
        let mut out = Vec::with_capacity(16);
        for (x, y) in self.pairs() {
            for (dx, dy) in OUTCOMES {
                out.push((
                    AnalyzerSetting::Hwp((x + dx) / 2.0),
                    AnalyzerSetting::Hwp((y + dy) / 2.0),
                ));
            }
        }
        out
    }
}

/// Polarization correlation `(N++ + N−− − N+− − N−+)/(N++ + N−− + N+− + N−+)`.
pub fn correlation_e(n_pp: f64, n_pm: f64, n_mp: f64, n_mm: f64) -> Result<f64> {
    let total = n_pp + n_pm + n_mp + n_mm;
    if !(total > 0.0) {
        return Err(Error::ZeroTotal("correlation coefficient".into()));
    }
    Ok(((n_pp + n_mm - n_pm - n_mp) / total).clamp(-1.0, 1.0))
}

/// Sign applied to each correlation so that the ideal `label` state reaches `+2√2`.
///
/// The signs are read off the ideal correlations at `angles`. They must contain an
/// odd number of minus signs, otherwise the combination is not a CHSH inequality
/// (its local bound would exceed 2).
pub fn chsh_signs(label: BellLabel, angles: &ChshAngles) -> Result<[f64; 4]> {
    let ideal = DensityMatrix::pure(&bell_state(label));
    let mut signs = [0.0; 4];
    for (k, (x, y)) in angles.pairs().into_iter().enumerate() {
        let p: Vec<f64> = OUTCOMES
            .iter()
            .map(|(dx, dy)| {
                projector_probability(
                    &ideal,
                    &AnalyzerSetting::Hwp((x + dx) / 2.0),
                    &AnalyzerSetting::Hwp((y + dy) / 2.0),
                )
            })
            .collect();
        let e = correlation_e(p[0], p[1], p[2], p[3])?;
        if e.abs() < 1e-9 {
            return Err(Error::Domain(format!(
                "angle pair ({:.3}°, {:.3}°) carries no correlation for {label}",
                x.to_degrees(),
                y.to_degrees()
            )));
        }
        signs[k] = e.signum();
    }
    if signs.iter().product::<f64>() > 0.0 {
        return Err(Error::Domain(format!(
            "angles do not form a CHSH combination for {label}"
        )));
    }
    Ok(signs)
}

/// One correlation coefficient of a CHSH sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTerm {
    /// Polarization angle on port a, degrees.
    #[serde(rename = "a_deg")]
    pub a: f64,
    /// Polarization angle on port b, degrees.
    #[serde(rename = "b_deg")]
    pub b: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub sign: f64,
}

/// CHSH parameter with its bootstrap uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshResult {
    pub s: f64,
    pub sigma_s: f64,
    pub terms: [CorrelationTerm; 4],
    pub angles: ChshAngles,
    pub label: BellLabel,
}

impl Serialize for ChshResult {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report<'a> {
            #[serde(rename = "S")]
            s: f64,
            #[serde(rename = "sigma_S")]
            sigma_s: f64,
            #[serde(rename = "E")]
            e: [f64; 4],
            angles_deg: [f64; 4],
            signs: [f64; 4],
            terms: &'a [CorrelationTerm; 4],
            state: BellLabel,
        }
        Report {
            s: self.s,
            sigma_s: self.sigma_s,
            e: self.terms.map(|t| t.e),
            angles_deg: self.angles.degrees(),
            signs: self.terms.map(|t| t.sign),
            terms: &self.terms,
            state: self.label,
        }
        .serialize(ser)
    }
}

/// `S = Σ sᵢ·Eᵢ` from 16 counts in [`ChshAngles::settings`] order.
pub fn chsh_from_counts(counts: &[f64], label: BellLabel, angles: &ChshAngles) -> Result<(f64, [CorrelationTerm; 4])> {
    if counts.len() != 16 {
        return Err(Error::Domain(format!("CHSH needs 16 counts, got {}", counts.len())));
    }
    let signs = chsh_signs(label, angles)?;
    let pairs = angles.pairs();
    let mut terms = [CorrelationTerm { a: 0.0, b: 0.0, e: 0.0, sign: 0.0 }; 4];
    for k in 0..4 {
        let c = &counts[4 * k..4 * k + 4];
        let e = correlation_e(c[0], c[1], c[2], c[3]).map_err(|_| {
            Error::ZeroTotal(format!(
                "CHSH setting group a={}°, b={}°",
                pairs[k].0.to_degrees(),
                pairs[k].1.to_degrees()
            ))
        })?;
        terms[k] = CorrelationTerm {
            a: pairs[k].0.to_degrees(),
            b: pairs[k].1.to_degrees(),
            e,
            sign: signs[k],
        };
    }
    let s = terms.iter().map(|t| t.sign * t.e).sum();
    Ok((s, terms))
}

/// Pulls the 16 CHSH counts out of a record set, listing every missing setting.
pub fn chsh_counts(records: &[CountRecord], angles: &ChshAngles) -> Result<Vec<u64>> {
    let settings = angles.settings();
    let mut counts = Vec::with_capacity(16);
    let mut missing = Vec::new();
    for (i, (a, b)) in settings.iter().enumerate() {
        match find_counts(records, a, b) {
            Some(c) => counts.push(c),
            None => missing.push(format!("{a}/{b} ({})", OUTCOME_NAMES[i % 4])),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingSettings(missing));
    }
    Ok(counts)
}

/// CHSH analysis of measured records with Poisson-bootstrap `sigma_S`.
pub fn chsh_s(
    records: &[CountRecord],
    label: BellLabel,
    angles: &ChshAngles,
    n_resamples: usize,
    seed: u64,
) -> Result<ChshResult> {
    let counts = chsh_counts(records, angles)?;
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (s, terms) = chsh_from_counts(&as_f64, label, angles)?;
    let sigma_s = bootstrap_counts(&counts, n_resamples, seed, |c| {
        chsh_from_counts(c, label, angles).map(|(s, _)| s)
    })?;
    Ok(ChshResult {
        s,
        sigma_s,
        terms,
        angles: *angles,
        label,
    })
}

/// Noise-free `S` of a state, from exact coincidence probabilities.
pub fn deterministic_chsh(rho: &DensityMatrix, label: BellLabel, angles: &ChshAngles) -> Result<f64> {
    rho.ensure_physical()?;
    let probs: Vec<f64> = angles
        .settings()
        .iter()
        .map(|(a, b)| projector_probability(rho, a, b))
        .collect();
    chsh_from_counts(&probs, label, angles).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{JonesVector, TwoQubitState};
    use std::f64::consts::SQRT_2;

    #[test]
    fn correlation_limits() {
        assert_eq!(correlation_e(500.0, 0.0, 0.0, 500.0).unwrap(), 1.0);
        assert_eq!(correlation_e(250.0, 250.0, 250.0, 250.0).unwrap(), 0.0);
        assert!(matches!(correlation_e(0.0, 0.0, 0.0, 0.0), Err(Error::ZeroTotal(_))));
    }

    #[test]
    fn psi_plus_correlation_at_0_and_22_5() {
        // brute-force outcome probabilities for Ψ⁺ at polarizations (0°, 22.5°): E = −cos 45°
        let rho = DensityMatrix::pure(&bell_state(BellLabel::PsiPlus));
        let p = |x: f64, y: f64| {
            projector_probability(&rho, &AnalyzerSetting::Hwp(x / 2.0), &AnalyzerSetting::Hwp(y / 2.0))
        };
        let (a, b) = (0.0, FRAC_PI_8);
        let e = correlation_e(p(a, b), p(a, b + FRAC_PI_2), p(a + FRAC_PI_2, b), p(a + FRAC_PI_2, b + FRAC_PI_2)).unwrap();
        assert!((e + 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sign_table() {
        let angles = ChshAngles::default();
        assert_eq!(chsh_signs(BellLabel::PhiPlus, &angles).unwrap(), [1.0, -1.0, 1.0, 1.0]);
        assert_eq!(chsh_signs(BellLabel::PsiPlus, &angles).unwrap(), [-1.0, 1.0, 1.0, 1.0]);
        assert_eq!(chsh_signs(BellLabel::PsiMinus, &angles).unwrap(), [-1.0, 1.0, -1.0, -1.0]);
        assert_eq!(chsh_signs(BellLabel::PhiMinus, &angles).unwrap(), [1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn degenerate_angles_are_rejected() {
        let flat = ChshAngles { a: 0.0, a_prime: 0.0, b: FRAC_PI_8, b_prime: FRAC_PI_8 };
        assert!(chsh_signs(BellLabel::PhiPlus, &flat).is_err());
        let zero_corr = ChshAngles { a: 0.0, a_prime: FRAC_PI_4, b: FRAC_PI_4, b_prime: 0.0 };
        assert!(chsh_signs(BellLabel::PhiPlus, &zero_corr).is_err());
    }

    #[test]
    fn tsirelson_bound_for_every_bell_state() {
        for label in BellLabel::ALL {
            let rho = DensityMatrix::pure(&bell_state(label));
            let s = deterministic_chsh(&rho, label, &ChshAngles::default()).unwrap();
            assert!((s - 2.0 * SQRT_2).abs() < 1e-9, "{label}: {s}");
        }
    }

    #[test]
    fn werner_scaling() {
        let p = 0.9618;
        let rho = DensityMatrix::werner(&bell_state(BellLabel::PsiPlus), p).unwrap();
        let s = deterministic_chsh(&rho, BellLabel::PsiPlus, &ChshAngles::default()).unwrap();
        assert!((s - 2.0 * SQRT_2 * p).abs() < 1e-12);
        assert!((s - 2.720).abs() < 1e-3);
    }

    #[test]
    fn product_state_respects_local_bound() {
        let hh = TwoQubitState::product(&JonesVector::horizontal(), &JonesVector::horizontal());
        let rho = DensityMatrix::pure(&hh);
        for label in BellLabel::ALL {
            let s = deterministic_chsh(&rho, label, &ChshAngles::default()).unwrap();
            assert!(s <= 2.0 + 1e-9, "{label}: {s}");
        }
    }

    #[test]
    fn missing_settings_are_listed() {
        let angles = ChshAngles::default();
        let settings = angles.settings();
        let records: Vec<CountRecord> = settings[..10]
            .iter()
            .map(|(a, b)| CountRecord::new(*a, *b, 100, 1.0))
            .collect();
        match chsh_counts(&records, &angles) {
            Err(Error::MissingSettings(m)) => assert_eq!(m.len(), 6),
            other => panic!("{other:?}"),
        }
    }
}
