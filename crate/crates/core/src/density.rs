//! Two-photon density matrices.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};
use crate::jones::{TwoQubitState, C64, ZERO};

/// Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-8;

/// A 4×4 Hermitian, unit-trace matrix in `(HH, HV, VH, VV)` ordering.
///
/// Construction checks Hermiticity and trace only. Estimators such as linear
/// inversion can legitimately produce matrices with small negative eigenvalues;
/// use [`DensityMatrix::is_physical`] or [`DensityMatrix::ensure_physical`]
/// where positivity matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::Domain(format!(
                "density matrix not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Domain(format!("density matrix trace is {tr}")));
        }
        Ok(Self(m))
    }

    /// Symmetrizes and rescales to unit trace before validating.
    pub fn normalized(m: Matrix4<C64>) -> Result<Self> {
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let tr = herm.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::Numerical(format!("cannot normalize matrix with trace {tr}")));
        }
        Self::new(herm / C64::new(tr, 0.0))
    }

    pub fn pure(state: &TwoQubitState) -> Self {
        let v = state.as_vector();
        Self(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * C64::new(0.25, 0.0))
    }

    /// `p·|ψ⟩⟨ψ| + (1−p)·I/4`
    pub fn werner(state: &TwoQubitState, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Werner weight must lie in [0,1], got {p}")));
        }
        Ok(Self::pure(state).mix(&Self::maximally_mixed(), p))
    }

    /// `w·self + (1−w)·other`
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Self {
        Self(self.0 * C64::new(w, 0.0) + other.0 * C64::new(1.0 - w, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= PSD_TOL
    }

    pub fn ensure_physical(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < PSD_TOL {
            return Err(Error::Domain(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(())
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn expectation_in(&self, state: &Vector4<C64>) -> f64 {
        state.dotc(&(self.0 * state)).re
    }

    /// `Tr(ρ·O)`
    pub fn expectation(&self, op: &Matrix4<C64>) -> C64 {
        (self.0 * op).trace()
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &Matrix4<C64>) -> Self {
        Self(u * self.0 * u.adjoint())
    }

    /// `½‖ρ − σ‖₁`
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.0 - other.0;
        0.5 * SymmetricEigen::new(diff).eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Uhlmann fidelity `(Tr√(√ρ σ √ρ))²` between two mixed states.
    pub fn uhlmann_fidelity(&self, other: &DensityMatrix) -> f64 {
        let sqrt_rho = psd_sqrt(&self.0);
        let inner = sqrt_rho * other.0 * sqrt_rho;
        let herm = (inner + inner.adjoint()) * C64::new(0.5, 0.0);
        let tr: f64 = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .map(|x| x.max(0.0).sqrt())
            .sum();
        (tr * tr).min(1.0)
    }

    /// Largest entry-wise deviation.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn psd_sqrt(m: &Matrix4<C64>) -> Matrix4<C64> {
    let eig = SymmetricEigen::new(*m);
    let mut out = Matrix4::from_element(ZERO);
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        let w = eig.eigenvalues[k].max(0.0).sqrt();
        out += v * v.adjoint() * C64::new(w, 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{bell_state, BellLabel};

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut m = Matrix4::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(Matrix4::identity() * C64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn werner_spectrum_and_purity() {
        let p = 0.9618;
        let rho = DensityMatrix::werner(&bell_state(BellLabel::PsiPlus), p).unwrap();
        let ev = rho.eigenvalues();
        let low = (1.0 - p) / 4.0;
        for e in &ev[..3] {
            assert!((e - low).abs() < 1e-12);
        }
        assert!((ev[3] - (p + low)).abs() < 1e-12);
        let direct = (rho.matrix() * rho.matrix()).trace().re;
        assert!((rho.purity() - direct).abs() < 1e-14);
        assert!((rho.purity() - (p * p + (1.0 - p * p) / 4.0)).abs() < 1e-12);
        assert!(DensityMatrix::werner(&bell_state(BellLabel::PsiPlus), 1.5).is_err());
    }

    #[test]
    fn fidelity_and_distance() {
        let psi = DensityMatrix::pure(&bell_state(BellLabel::PsiPlus));
        let mixed = DensityMatrix::maximally_mixed();
        assert!((psi.uhlmann_fidelity(&psi) - 1.0).abs() < 1e-10);
        assert!((psi.uhlmann_fidelity(&mixed) - 0.25).abs() < 1e-10);
        assert!(psi.trace_distance(&psi) < 1e-12);
        assert!((psi.trace_distance(&mixed) - 0.75).abs() < 1e-12);
    }
}
