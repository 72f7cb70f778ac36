use nalgebra::{Matrix3, Vector3};

use super::bootstrap::bootstrap_counts;
use crate::error::{Error, Result};
use crate::source::CountRecord;

/// Least-squares fringe `offset + amplitude·cos(4β − phase)` in the swept plate angle β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl FringeFit {
    pub fn max(&self) -> f64 {
        self.offset + self.amplitude
    }

    pub fn min(&self) -> f64 {
        self.offset - self.amplitude
    }

    /// `(max − min)/(max + min)` of the fitted curve.
    pub fn visibility(&self) -> f64 {
        self.amplitude / self.offset
    }

    pub fn eval(&self, beta: f64) -> f64 {
        self.offset + self.amplitude * (4.0 * beta - self.phase).cos()
    }
}

const MIN_POINTS: usize = 5;

/// Fits `(β, counts)` pairs, β being the physical plate angle in radians.
pub fn fit_fringe(points: &[(f64, f64)]) -> Result<FringeFit> {
    if points.len() < MIN_POINTS {
        return Err(Error::Numerical(format!(
            "fringe fit needs at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for &(beta, y) in points {
        let row = Vector3::new(1.0, (4.0 * beta).cos(), (4.0 * beta).sin());
        normal += row * row.transpose();
        rhs += row * y;
    }
    let scale = normal.diagonal().max();
    let chol = nalgebra::Cholesky::new(normal)
        .filter(|c| c.l().diagonal().min() > 1e-6 * scale.sqrt())
        .ok_or_else(|| Error::Numerical("degenerate sweep: plate angles do not span a fringe".into()))?;
    let coef = chol.solve(&rhs);
    let offset = coef[0];
    if !(offset > 0.0) {
        return Err(Error::Numerical(format!("fringe offset {offset} is not positive")));
    }
    Ok(FringeFit {
        offset,
        amplitude: coef[1].hypot(coef[2]),
        phase: coef[2].atan2(coef[1]),
    })
}

pub fn visibility_from_points(points: &[(f64, f64)]) -> Result<f64> {
    fit_fringe(points).map(|f| f.visibility())
}

/// `(β, counts)` pairs of a sweep: port a must stay fixed while port b moves.
pub fn sweep_points(records: &[CountRecord]) -> Result<Vec<(f64, f64)>> {
    let first = records
        .first()
        .ok_or_else(|| Error::Numerical("empty sweep".into()))?;
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if !r.setting_a.same_projection(&first.setting_a) {
                return Err(Error::Domain(format!(
                    "record {i}: port a setting {} differs from {}",
                    r.setting_a, first.setting_a
                )));
            }
            let beta = r.setting_b.hwp_angle().ok_or_else(|| {
                Error::Domain(format!("record {i}: {} is not a linear analyzer", r.setting_b))
            })?;
            Ok((beta, r.counts as f64))
        })
        .collect()
}

/// Visibility of a measured sweep and its bootstrap standard deviation.
pub fn visibility_from_records(records: &[CountRecord], n_resamples: usize, seed: u64) -> Result<(f64, f64)> {
    let points = sweep_points(records)?;
    let v = visibility_from_points(&points)?;
    let counts: Vec<u64> = records.iter().map(|r| r.counts).collect();
    let mut buf = points.clone();
    let sigma = bootstrap_counts(&counts, n_resamples, seed, |drawn| {
        for (p, &c) in buf.iter_mut().zip(drawn) {
            p.1 = c;
        }
        visibility_from_points(&buf)
    })?;
    Ok((v, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..36)
            .map(|k| {
                let b = (k as f64 * 5.0).to_radians();
                (b, f(b))
            })
            .collect()
    }

    #[test]
    fn recovers_exact_fringe() {
        let pts = sweep(|b| 300.0 + 200.0 * (4.0 * b - 0.7).cos());
        let fit = fit_fringe(&pts).unwrap();
        assert!((fit.offset - 300.0).abs() < 1e-9);
        assert!((fit.amplitude - 200.0).abs() < 1e-9);
        assert!((fit.phase - 0.7).abs() < 1e-12);
        assert!((fit.visibility() - 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.eval(0.3) - (300.0 + 200.0 * (1.2f64 - 0.7).cos())).abs() < 1e-9);
    }

    #[test]
    fn pure_and_werner_fringes() {
        let pure = sweep(|b| 0.5 * (2.0 * b).sin().powi(2));
        assert!((visibility_from_points(&pure).unwrap() - 1.0).abs() < 1e-9);
        let p = 0.9618;
        let werner = sweep(|b| p * 0.5 * (2.0 * b).sin().powi(2) + (1.0 - p) / 4.0);
        assert!((visibility_from_points(&werner).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn degenerate_sweeps_fail() {
        assert!(fit_fringe(&[(0.0, 1.0); 3]).is_err());
        // all angles equivalent modulo 90°
        let same: Vec<(f64, f64)> = (0..6).map(|k| ((k as f64 * 90.0).to_radians(), 5.0)).collect();
        assert!(fit_fringe(&same).is_err());
        assert!(fit_fringe(&sweep(|_| 0.0)).is_err());
    }
}
