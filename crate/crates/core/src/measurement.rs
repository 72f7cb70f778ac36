//! Polarization analyzers and coincidence statistics.
//!
//! Each arm ends in a half-wave plate followed by a polarizing beamsplitter,
//! and only the transmitted (H) port is detected. A plate at physical angle
//! `α` therefore projects onto linear polarization at `2α`. All probabilities
//! here are for that transmitted-port pair.
//!
//! Named settings map to fixed kets: `H=(1,0)`, `V=(0,1)`, `D=(1,1)/√2`,
//! `A=(1,−1)/√2`, `R=(1,−i)/√2`, `L=(1,i)/√2`. R and L are idealized circular
//! projectors; a plate and a PBS alone cannot realize them.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::jones::{hwp, JonesVector, OneQubitOperator, TwoQubitState, C64};

/// Fixed analyzer projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedSetting {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl NamedSetting {
    pub const ALL: [NamedSetting; 6] = [
        NamedSetting::H,
        NamedSetting::V,
        NamedSetting::D,
        NamedSetting::A,
        NamedSetting::R,
        NamedSetting::L,
    ];

    /// The linear settings H, V, D, A.
    pub const LINEAR: [NamedSetting; 4] =
        [NamedSetting::H, NamedSetting::V, NamedSetting::D, NamedSetting::A];

    pub fn ket(&self) -> JonesVector {
        match self {
            NamedSetting::H => JonesVector::horizontal(),
            NamedSetting::V => JonesVector::vertical(),
            NamedSetting::D => JonesVector::diagonal(),
            NamedSetting::A => JonesVector::antidiagonal(),
            NamedSetting::R => JonesVector::right(),
            NamedSetting::L => JonesVector::left(),
        }
    }

    pub fn symbol(&self) -> char {
        match self {
            NamedSetting::H => 'H',
            NamedSetting::V => 'V',
            NamedSetting::D => 'D',
            NamedSetting::A => 'A',
            NamedSetting::R => 'R',
            NamedSetting::L => 'L',
        }
    }

    /// Waveplate angle realizing this projection, for linear settings.
    pub fn hwp_angle(&self) -> Option<f64> {
        match self {
            NamedSetting::H => Some(0.0),
            NamedSetting::D => Some(FRAC_PI_8),
            NamedSetting::V => Some(FRAC_PI_4),
            NamedSetting::A => Some(3.0 * FRAC_PI_8),
            NamedSetting::R | NamedSetting::L => None,
        }
    }
}

/// What one arm's analyzer projects onto.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyzerSetting {
    Named(NamedSetting),
    /// Physical waveplate angle in radians.
    Hwp(f64),
}

impl From<NamedSetting> for AnalyzerSetting {
    fn from(n: NamedSetting) -> Self {
        AnalyzerSetting::Named(n)
    }
}

impl AnalyzerSetting {
    /// Normalized ket the analyzer transmits.
    pub fn ket(&self) -> JonesVector {
        match self {
            AnalyzerSetting::Named(n) => n.ket(),
            // U(α) is real symmetric, so U(α)†|H⟩ is its first column.
            AnalyzerSetting::Hwp(alpha) => {
                let u = hwp(*alpha);
                JonesVector::new(u.get(0, 0).conj(), u.get(0, 1).conj())
                    .expect("half-wave plate rows are unit vectors")
            }
        }
    }

    pub fn projector(&self) -> OneQubitOperator {
        analyzer_projector(self)
    }

    /// Equivalent waveplate angle, if the projection is linear.
    pub fn hwp_angle(&self) -> Option<f64> {
        match self {
            AnalyzerSetting::Named(n) => n.hwp_angle(),
            AnalyzerSetting::Hwp(a) => Some(*a),
        }
    }

    /// True when both settings project onto the same polarization.
    pub fn same_projection(&self, other: &AnalyzerSetting) -> bool {
        self.projector().max_abs_diff(&other.projector()) < 1e-9
    }
}

impl fmt::Display for AnalyzerSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyzerSetting::Named(n) => write!(f, "{}", n.symbol()),
            AnalyzerSetting::Hwp(a) => write!(f, "hwp:{}", format_degrees(a.to_degrees())),
        }
    }
}

/// Prints degrees without float noise in the last digits.
pub(crate) fn format_degrees(deg: f64) -> String {
    let rounded = (deg * 1e9).round() / 1e9;
    if (rounded - deg).abs() < 1e-9 {
        format!("{rounded}")
    } else {
        format!("{deg}")
    }
}

impl FromStr for AnalyzerSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let named = match t {
            "H" => Some(NamedSetting::H),
            "V" => Some(NamedSetting::V),
            "D" => Some(NamedSetting::D),
            "A" => Some(NamedSetting::A),
            "R" => Some(NamedSetting::R),
            "L" => Some(NamedSetting::L),
            _ => None,
        };
        if let Some(n) = named {
            return Ok(AnalyzerSetting::Named(n));
        }
        if let Some(deg) = t.strip_prefix("hwp:") {
            let deg: f64 = deg
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad waveplate angle in '{t}'")))?;
            if !deg.is_finite() {
                return Err(Error::Domain(format!("bad waveplate angle in '{t}'")));
            }
            return Ok(AnalyzerSetting::Hwp(deg.to_radians()));
        }
        Err(Error::Domain(format!("unknown analyzer setting '{t}'")))
    }
}

impl Serialize for AnalyzerSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AnalyzerSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rank-one projector of the analyzer; for a plate at `α` this is `U(α)†|H⟩⟨H|U(α)`.
pub fn analyzer_projector(s: &AnalyzerSetting) -> OneQubitOperator {
    match s {
        AnalyzerSetting::Hwp(alpha) => {
            let u = hwp(*alpha);
            let h = OneQubitOperator::new(
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            );
            u.adjoint() * h * u
        }
        AnalyzerSetting::Named(n) => {
            let v = n.ket();
            let v = v.as_vector();
            OneQubitOperator::from_matrix(v * v.adjoint())
        }
    }
}

/// Product ket `|a⟩⊗|b⟩` of two analyzer settings.
pub(crate) fn pair_ket(a: &AnalyzerSetting, b: &AnalyzerSetting) -> Vector4<C64> {
    *TwoQubitState::product(&a.ket(), &b.ket()).as_vector()
}

/// `Tr[ρ·(Πa ⊗ Πb)]` without validating ρ.
pub(crate) fn projector_probability(rho: &DensityMatrix, a: &AnalyzerSetting, b: &AnalyzerSetting) -> f64 {
    rho.expectation_in(&pair_ket(a, b))
}

/// Probability of a coincidence with analyzer `a` on port a and `b` on port b.
pub fn coincidence_probability(
    rho: &DensityMatrix,
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
) -> Result<f64> {
    rho.ensure_physical()?;
    let op = a.projector().kron(&b.projector());
    Ok(rho.expectation(&op).re.clamp(0.0, 1.0))
}

/// Coincidence probabilities over `{H,V,D,A}²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationPattern {
    probabilities: [[f64; 4]; 4],
}

impl CorrelationPattern {
    /// Probability for a pair of linear settings; `None` for R/L.
    pub fn get(&self, a: NamedSetting, b: NamedSetting) -> Option<f64> {
        let ia = NamedSetting::LINEAR.iter().position(|&x| x == a)?;
        let ib = NamedSetting::LINEAR.iter().position(|&x| x == b)?;
        Some(self.probabilities[ia][ib])
    }

    /// All 16 entries with their settings, port-a major.
    pub fn entries(&self) -> Vec<(NamedSetting, NamedSetting, f64)> {
        let mut out = Vec::with_capacity(16);
        for (i, a) in NamedSetting::LINEAR.iter().enumerate() {
            for (j, b) in NamedSetting::LINEAR.iter().enumerate() {
                out.push((*a, *b, self.probabilities[i][j]));
            }
        }
        out
    }
}

pub fn correlation_pattern(state: &TwoQubitState) -> CorrelationPattern {
    let mut probabilities = [[0.0; 4]; 4];
    for (i, a) in NamedSetting::LINEAR.iter().enumerate() {
        for (j, b) in NamedSetting::LINEAR.iter().enumerate() {
            let ket = TwoQubitState::product(&a.ket(), &b.ket());
            probabilities[i][j] = ket.overlap(state);
        }
    }
    CorrelationPattern { probabilities }
}

/// One point of a correlation fringe. `two_beta` is twice the swept plate angle, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub two_beta: f64,
    pub value: f64,
}

/// Coincidence probability with port a fixed at plate angle `alpha_fixed`
/// while port b sweeps `beta_sweep`.
pub fn visibility_curve(
    rho: &DensityMatrix,
    alpha_fixed: f64,
    beta_sweep: &[f64],
) -> Result<Vec<CurvePoint>> {
    if beta_sweep.is_empty() {
        return Err(Error::Domain("empty waveplate sweep".into()));
    }
    rho.ensure_physical()?;
    let a = AnalyzerSetting::Hwp(alpha_fixed);
    Ok(beta_sweep
        .iter()
        .map(|&beta| CurvePoint {
            two_beta: 2.0 * beta,
            value: projector_probability(rho, &a, &AnalyzerSetting::Hwp(beta)).clamp(0.0, 1.0),
        })
        .collect())
}

/// `(max − min)/(max + min)` of a fringe.
pub fn visibility(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Domain("visibility needs at least two samples".into()));
    }
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        return Err(Error::Domain("fringe has negative samples".into()));
    }
    if max + min <= 0.0 {
        return Err(Error::Numerical("visibility undefined for an all-zero fringe".into()));
    }
    Ok((max - min) / (max + min))
}

/// Evenly spaced plate angles from `start` to `stop` inclusive.
pub fn sweep(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::Domain("sweep needs step > 0 and stop ≥ start".into()));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{bell_state, BellLabel};
    use proptest::prelude::*;

    fn named(n: NamedSetting) -> AnalyzerSetting {
        AnalyzerSetting::Named(n)
    }

    #[test]
    fn plate_angles_give_expected_projectors() {
        let cases = [
            (0.0, NamedSetting::H),
            (22.5f64.to_radians(), NamedSetting::D),
            (FRAC_PI_4, NamedSetting::V),
            (67.5f64.to_radians(), NamedSetting::A),
        ];
        for (alpha, n) in cases {
            let p = analyzer_projector(&AnalyzerSetting::Hwp(alpha));
            assert!(p.max_abs_diff(&analyzer_projector(&named(n))) < 1e-12, "{n:?}");
        }
    }

    #[test]
    fn named_projectors_are_idempotent() {
        for n in NamedSetting::ALL {
            let p = analyzer_projector(&named(n));
            assert!(p.is_hermitian(1e-12));
            assert!((p * p).max_abs_diff(&p) < 1e-12);
        }
    }

    #[test]
    fn bell_coincidences() {
        let rho = DensityMatrix::pure(&bell_state(BellLabel::PsiPlus));
        let (h, v) = (named(NamedSetting::H), named(NamedSetting::V));
        assert!((coincidence_probability(&rho, &h, &v).unwrap() - 0.5).abs() < 1e-12);
        assert!(coincidence_probability(&rho, &h, &h).unwrap().abs() < 1e-12);

        let p = 0.9618;
        let w = DensityMatrix::werner(&bell_state(BellLabel::PsiPlus), p).unwrap();
        assert!((coincidence_probability(&w, &h, &h).unwrap() - (1.0 - p) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn unphysical_input_is_rejected() {
        use nalgebra::Matrix4;
        let mut m = Matrix4::<C64>::zeros();
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        let h = named(NamedSetting::H);
        assert!(coincidence_probability(&rho, &h, &h).is_err());
    }

    #[test]
    fn patterns_for_psi_minus_and_phi_plus() {
        use NamedSetting::*;
        let psi_m = correlation_pattern(&bell_state(BellLabel::PsiMinus));
        for (a, b) in [(H, V), (V, H), (D, A), (A, D)] {
            assert!((psi_m.get(a, b).unwrap() - 0.5).abs() < 1e-12);
        }
        for (a, b) in [(H, H), (V, V), (D, D), (A, A)] {
            assert!(psi_m.get(a, b).unwrap().abs() < 1e-12);
        }
        let phi_p = correlation_pattern(&bell_state(BellLabel::PhiPlus));
        for (a, b) in [(H, H), (V, V), (D, D), (A, A)] {
            assert!((phi_p.get(a, b).unwrap() - 0.5).abs() < 1e-12);
        }
        assert_eq!(psi_m.get(R, H), None);
    }

    #[test]
    fn product_state_pattern() {
        use NamedSetting::*;
        let hh = TwoQubitState::product(&H.ket(), &H.ket());
        let pat = correlation_pattern(&hh);
        assert!((pat.get(H, H).unwrap() - 1.0).abs() < 1e-12);
        for (a, b) in [(D, D), (D, A), (A, D), (A, A)] {
            assert!((pat.get(a, b).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_state_curve_is_flat() {
        let betas = sweep(0.0, 180f64.to_radians(), 5f64.to_radians()).unwrap();
        let curve = visibility_curve(&DensityMatrix::maximally_mixed(), 0.3, &betas).unwrap();
        assert_eq!(curve.len(), 37);
        assert!(curve.iter().all(|p| (p.value - 0.25).abs() < 1e-12));
    }

    #[test]
    fn werner_curve_extrema_and_visibility() {
        let p = 0.9618;
        let rho = DensityMatrix::werner(&bell_state(BellLabel::PsiPlus), p).unwrap();
        let betas = sweep(0.0, 90f64.to_radians(), 22.5f64.to_radians()).unwrap();
        let curve = visibility_curve(&rho, 0.0, &betas).unwrap();
        let values: Vec<f64> = curve.iter().map(|c| c.value).collect();
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        assert!((max - (p / 2.0 + (1.0 - p) / 4.0)).abs() < 1e-12);
        assert!((min - (1.0 - p) / 4.0).abs() < 1e-12);
        assert!((visibility(&values).unwrap() - p).abs() < 1e-12);
        // Ψ⁺ with port a at H: dark at β = 0 (HH), bright at β = 45° (HV)
        assert!(values[0] < 0.01 && values[2] > 0.45);
        assert!((curve[2].two_beta - FRAC_PI_4 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn visibility_errors() {
        assert!(visibility(&[0.0, 0.0, 0.0]).is_err());
        assert!(visibility(&[1.0]).is_err());
        assert!((visibility(&[0.5, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(visibility_curve(&DensityMatrix::maximally_mixed(), 0.0, &[]).is_err());
    }

    #[test]
    fn setting_tokens() {
        for n in NamedSetting::ALL {
            let s = named(n);
            assert_eq!(s.to_string().parse::<AnalyzerSetting>().unwrap(), s);
        }
        let s: AnalyzerSetting = "hwp:22.5".parse().unwrap();
        assert_eq!(s.to_string(), "hwp:22.5");
        assert!(s.same_projection(&named(NamedSetting::D)));
        assert!("hwp:x".parse::<AnalyzerSetting>().is_err());
        assert!("Q".parse::<AnalyzerSetting>().is_err());
        assert_eq!(AnalyzerSetting::Hwp(FRAC_PI_8).to_string(), "hwp:22.5");
    }

    proptest! {
        #[test]
        fn plate_projectors_are_complete(alpha in -7.0f64..7.0) {
            let p = analyzer_projector(&AnalyzerSetting::Hwp(alpha));
            let q = analyzer_projector(&AnalyzerSetting::Hwp(alpha + FRAC_PI_4));
            prop_assert!(p.is_hermitian(1e-12));
            prop_assert!((p * p).max_abs_diff(&p) < 1e-12);
            let sum = p.matrix() + q.matrix() - nalgebra::Matrix2::identity();
            prop_assert!(sum.iter().all(|z| z.norm() < 1e-12));
        }
    }
}
