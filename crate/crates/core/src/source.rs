//! Parametric photon-pair source and Poisson coincidence counting.
//!
//! The beamsplitter post-selection is not simulated mode by mode. The
//! post-selected state is written down directly as
//! `ρ = p·|ψ(φ)⟩⟨ψ(φ)| + (1−p)·I/4` with `|ψ(φ)⟩ = (|HV⟩ + e^{iφ}|VH⟩)/√2`,
//! where the purity `p` stands in for every imperfection of the real setup.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::jones::{plan_unitary, BellLabel, TwoQubitState, WaveplatePlacement, C64};
use crate::measurement::{projector_probability, AnalyzerSetting, NamedSetting};

/// Source and detection parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// `PsiPlus` or `PsiMinus`; `PsiMinus` adds π to `relative_phase`.
    pub base_label: BellLabel,
    /// Phase between the `|HV⟩` and `|VH⟩` branches, radians.
    pub relative_phase: f64,
    /// Werner weight `p ∈ [0, 1]`.
    pub purity: f64,
    /// Coincidences per second at a bright setting of a perfect Bell state.
    pub pair_rate: f64,
    /// Flat accidental rate added to every setting, counts per second.
    pub background_rate: f64,
    /// Seconds.
    pub integration_time: f64,
    pub seed: u64,
}

impl Default for SourceConfig {
    /// A typical bench source: 96.18 % visibility, ~715 coincidences/s per bright setting.
    fn default() -> Self {
        Self {
            base_label: BellLabel::PsiPlus,
            relative_phase: 0.0,
            purity: 0.9618,
            pair_rate: 715.0,
            background_rate: 0.0,
            integration_time: 1.0,
            seed: 0,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.base_label, BellLabel::PsiPlus | BellLabel::PsiMinus) {
            return Err(Error::InvalidConfig(format!(
                "source produces psi+ or psi-, not {}",
                self.base_label
            )));
        }
        if !(0.0..=1.0).contains(&self.purity) {
            return Err(Error::InvalidConfig(format!("purity {} outside [0,1]", self.purity)));
        }
        if !(self.pair_rate >= 0.0 && self.pair_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("pair_rate {} must be ≥ 0", self.pair_rate)));
        }
        if !(self.background_rate >= 0.0 && self.background_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "background_rate {} must be ≥ 0",
                self.background_rate
            )));
        }
        if !(self.integration_time > 0.0 && self.integration_time.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "integration_time {} must be > 0",
                self.integration_time
            )));
        }
        if !self.relative_phase.is_finite() {
            return Err(Error::InvalidConfig("relative_phase must be finite".into()));
        }
        Ok(())
    }
}

/// One integrated coincidence measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_a: AnalyzerSetting,
    pub setting_b: AnalyzerSetting,
    pub counts: u64,
    /// Seconds.
    #[serde(rename = "duration_s")]
    pub duration: f64,
    #[serde(default)]
    pub label: Option<String>,
}

impl CountRecord {
    pub fn new(setting_a: AnalyzerSetting, setting_b: AnalyzerSetting, counts: u64, duration: f64) -> Self {
        Self {
            setting_a,
            setting_b,
            counts,
            duration,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn matches(&self, a: &AnalyzerSetting, b: &AnalyzerSetting) -> bool {
        self.setting_a.same_projection(a) && self.setting_b.same_projection(b)
    }
}

/// Sums the counts of every record measured at `(a, b)`; `None` if there is none.
pub fn find_counts(records: &[CountRecord], a: &AnalyzerSetting, b: &AnalyzerSetting) -> Option<u64> {
    records
        .iter()
        .filter(|r| r.matches(a, b))
        .map(|r| r.counts)
        .reduce(|x, y| x + y)
}

pub fn make_source_state(cfg: &SourceConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let phase = match cfg.base_label {
        BellLabel::PsiMinus => cfg.relative_phase + PI,
        _ => cfg.relative_phase,
    };
    let branch = if phase == PI {
        C64::new(-1.0, 0.0)
    } else {
        C64::from_polar(1.0, phase)
    };
    let zero = C64::new(0.0, 0.0);
    let psi = TwoQubitState::new([zero, C64::new(1.0, 0.0), branch, zero])?;
    DensityMatrix::werner(&psi, cfg.purity)
}

/// `U ρ U†` with `U` the half-wave plates of `plan`.
pub fn transform_source(rho: &DensityMatrix, plan: &[WaveplatePlacement]) -> DensityMatrix {
    if plan.is_empty() {
        return *rho;
    }
    rho.conjugate_by(&plan_unitary(plan))
}

/// Mean counts `2·R·T·P(a,b) + B·T`.
///
/// The factor 2 makes a perfect Bell state give `pair_rate` at each of the
/// two bright settings of a basis block.
pub fn expected_count(
    rho: &DensityMatrix,
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
    cfg: &SourceConfig,
) -> Result<f64> {
    rho.ensure_physical()?;
    Ok(expected_count_unchecked(rho, a, b, cfg))
}

pub(crate) fn expected_count_unchecked(
    rho: &DensityMatrix,
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
    cfg: &SourceConfig,
) -> f64 {
    let p = projector_probability(rho, a, b).clamp(0.0, 1.0);
    2.0 * cfg.pair_rate * cfg.integration_time * p + cfg.background_rate * cfg.integration_time
}

/// One Poisson draw. Means past the sampler's range use the normal limit,
/// saturating at `u64::MAX`.
pub fn sample_counts<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as u64,
        Err(_) => {
            let z: f64 = StandardNormal.sample(rng);
            (mean + z * mean.sqrt()).round().max(0.0) as u64
        }
    }
}

/// Independent generator for item `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates one record per analyzer pair.
///
/// Each setting draws from its own substream, so the output does not depend
/// on evaluation order.
pub fn generate_dataset(
    cfg: &SourceConfig,
    plan: &[WaveplatePlacement],
    settings: &[(AnalyzerSetting, AnalyzerSetting)],
) -> Result<Vec<CountRecord>> {
    if settings.is_empty() {
        return Err(Error::Domain("no analyzer settings requested".into()));
    }
    let rho = transform_source(&make_source_state(cfg)?, plan);
    Ok(settings
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let mean = expected_count_unchecked(&rho, a, b, cfg);
            let counts = sample_counts(mean, &mut substream(cfg.seed, i as u64));
            CountRecord::new(*a, *b, counts, cfg.integration_time)
        })
        .collect())
}

/// Noise-free counterpart of [`generate_dataset`]: the expected count per setting.
pub fn expected_dataset(
    cfg: &SourceConfig,
    plan: &[WaveplatePlacement],
    settings: &[(AnalyzerSetting, AnalyzerSetting)],
) -> Result<Vec<f64>> {
    let rho = transform_source(&make_source_state(cfg)?, plan);
    Ok(settings
        .iter()
        .map(|(a, b)| expected_count_unchecked(&rho, a, b, cfg))
        .collect())
}

/// The eight linear-basis combinations, ordered `HH, VV, HV, VH, DD, AA, DA, AD`.
pub fn basic_settings() -> Vec<(AnalyzerSetting, AnalyzerSetting)> {
    use NamedSetting::*;
    [(H, H), (V, V), (H, V), (V, H), (D, D), (A, A), (D, A), (A, D)]
        .iter()
        .map(|&(a, b)| (a.into(), b.into()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{bell_state, hwp_plan};
    use crate::measurement::coincidence_probability;

    fn named(n: NamedSetting) -> AnalyzerSetting {
        n.into()
    }

    #[test]
    fn pure_limits() {
        let mut cfg = SourceConfig {
            purity: 1.0,
            ..Default::default()
        };
        let rho = make_source_state(&cfg).unwrap();
        let target = DensityMatrix::pure(&bell_state(BellLabel::PsiPlus));
        assert!(rho.max_abs_diff(&target) < 1e-12);

        cfg.relative_phase = PI;
        let rho = make_source_state(&cfg).unwrap();
        let target = DensityMatrix::pure(&bell_state(BellLabel::PsiMinus));
        assert!(rho.max_abs_diff(&target) < 1e-12);

        cfg.relative_phase = 0.0;
        cfg.base_label = BellLabel::PsiMinus;
        assert!(make_source_state(&cfg).unwrap().max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn fully_mixed_source() {
        let cfg = SourceConfig {
            purity: 0.0,
            ..Default::default()
        };
        let rho = make_source_state(&cfg).unwrap();
        for a in NamedSetting::ALL {
            for b in NamedSetting::ALL {
                let p = coincidence_probability(&rho, &named(a), &named(b)).unwrap();
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_configs() {
        let base = SourceConfig::default();
        let bad = [
            SourceConfig { purity: 1.2, ..base },
            SourceConfig { purity: -0.1, ..base },
            SourceConfig { pair_rate: -1.0, ..base },
            SourceConfig { background_rate: -1.0, ..base },
            SourceConfig { integration_time: 0.0, ..base },
            SourceConfig { base_label: BellLabel::PhiPlus, ..base },
        ];
        for cfg in bad {
            assert!(matches!(make_source_state(&cfg), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn transforms() {
        let cfg = SourceConfig::default();
        let rho = make_source_state(&cfg).unwrap();
        assert_eq!(transform_source(&rho, &[]), rho);

        let phi_m = transform_source(&rho, &hwp_plan(BellLabel::PhiMinus));
        let expect = DensityMatrix::werner(&bell_state(BellLabel::PhiMinus), cfg.purity).unwrap();
        assert!(phi_m.max_abs_diff(&expect) < 1e-12);
        for (x, y) in phi_m.eigenvalues().iter().zip(rho.eigenvalues()) {
            assert!((x - y).abs() < 1e-12);
        }

        let plan = hwp_plan(BellLabel::PsiMinus);
        let twice = transform_source(&transform_source(&rho, &plan), &plan);
        assert!(twice.max_abs_diff(&rho) < 1e-12);
    }

    #[test]
    fn expected_counts() {
        let cfg = SourceConfig {
            purity: 1.0,
            ..Default::default()
        };
        let rho = make_source_state(&cfg).unwrap();
        let (h, v) = (named(NamedSetting::H), named(NamedSetting::V));
        assert!((expected_count(&rho, &h, &v, &cfg).unwrap() - 715.0).abs() < 1e-9);

        let bg_only = SourceConfig {
            pair_rate: 0.0,
            background_rate: 15.0,
            ..Default::default()
        };
        assert!((expected_count(&rho, &h, &h, &bg_only).unwrap() - 15.0).abs() < 1e-12);

        let cfg = SourceConfig::default();
        let rho = make_source_state(&cfg).unwrap();
        let dark = expected_count(&rho, &h, &h, &cfg).unwrap();
        assert!((dark - 2.0 * 715.0 * (1.0 - 0.9618) / 4.0).abs() < 1e-9);
        assert!((dark - 13.7).abs() < 0.1);
    }

    #[test]
    fn poisson_zero_mean() {
        let mut rng = substream(1, 0);
        assert!((0..100).all(|_| sample_counts(0.0, &mut rng) == 0));
    }

    #[test]
    fn huge_means_saturate() {
        let mut rng = substream(3, 0);
        assert_eq!(sample_counts(1e20, &mut rng), u64::MAX);
    }

    #[test]
    fn poisson_moments() {
        // mean 700, n = 1e5: |x̄ − 700| < 3·√(700/1e5), variance within 5 %
        let mut rng = substream(42, 0);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_counts(700.0, &mut rng) as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 700.0).abs() < 3.0 * (700.0f64 / n as f64).sqrt(), "{mean}");
        assert!((var / mean - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn poisson_small_mean() {
        let mut rng = substream(3, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| sample_counts(13.7, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 13.7).abs() < 3.0 * (13.7f64 / n as f64).sqrt());
    }

    #[test]
    fn dataset_envelope_and_determinism() {
        let cfg = SourceConfig {
            seed: 11,
            ..Default::default()
        };
        let records = generate_dataset(&cfg, &[], &basic_settings()).unwrap();
        assert_eq!(records.len(), 8);
        for r in &records[..2] {
            assert!((4..=30).contains(&r.counts), "{r:?}");
        }
        for r in &records[2..4] {
            assert!((600..=840).contains(&r.counts), "{r:?}");
        }
        assert_eq!(records, generate_dataset(&cfg, &[], &basic_settings()).unwrap());

        // substreams make each record independent of the others
        let tail = generate_dataset(&cfg, &[], &basic_settings()[..3]).unwrap();
        assert_eq!(&records[..3], &tail[..]);

        assert!(generate_dataset(&cfg, &[], &[]).is_err());
    }

    #[test]
    fn zero_rates_give_zero_counts() {
        let cfg = SourceConfig {
            pair_rate: 0.0,
            background_rate: 0.0,
            ..Default::default()
        };
        let records = generate_dataset(&cfg, &[], &basic_settings()).unwrap();
        assert!(records.iter().all(|r| r.counts == 0));
    }
}
