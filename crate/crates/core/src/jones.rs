//! Jones calculus for single photons and photon pairs.
//!
//! Single-photon polarization lives in a two-dimensional space spanned by
//! `|H⟩ = (1, 0)` and `|V⟩ = (0, 1)`. Pair states use the fixed product
//! ordering `(HH, HV, VH, VV)`, where the first letter belongs to the photon
//! in port `a` (the signal photon) and the second to port `b` (the idler).
//!
//! Global phases are physically irrelevant, so states are compared through
//! [`TwoQubitState::overlap`] (`|⟨ψ|φ⟩|²`) rather than amplitude-wise.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance used when checking that an operator is unitary.
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Normalized single-photon polarization state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector(Vector2<C64>);

impl JonesVector {
    /// Builds a normalized Jones vector from (unnormalized) H and V amplitudes.
    pub fn new(h: C64, v: C64) -> Result<Self> {
        let raw = Vector2::new(h, v);
        let norm = raw.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain("Jones vector has zero norm".into()));
        }
        Ok(Self(raw / c(norm)))
    }

    pub fn horizontal() -> Self {
        Self(Vector2::new(ONE, ZERO))
    }

    pub fn vertical() -> Self {
        Self(Vector2::new(ZERO, ONE))
    }

    /// `(|H⟩ + |V⟩)/√2`
    pub fn diagonal() -> Self {
        Self(Vector2::new(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)))
    }

    /// `(|H⟩ − |V⟩)/√2`
    pub fn antidiagonal() -> Self {
        Self(Vector2::new(c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)))
    }

    /// `(|H⟩ − i|V⟩)/√2`
    pub fn right() -> Self {
        Self(Vector2::new(c(FRAC_1_SQRT_2), -I * FRAC_1_SQRT_2))
    }

    /// `(|H⟩ + i|V⟩)/√2`
    pub fn left() -> Self {
        Self(Vector2::new(c(FRAC_1_SQRT_2), I * FRAC_1_SQRT_2))
    }

    /// Linear polarization at `angle` radians from horizontal.
    pub fn linear(angle: f64) -> Self {
        Self(Vector2::new(c(angle.cos()), c(angle.sin())))
    }

    pub fn h(&self) -> C64 {
        self.0[0]
    }

    pub fn v(&self) -> C64 {
        self.0[1]
    }

    pub fn as_vector(&self) -> &Vector2<C64> {
        &self.0
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &JonesVector) -> C64 {
        self.0.dotc(&other.0)
    }
}

/// A 2×2 complex operator acting on one photon's polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitOperator(Matrix2<C64>);

impl OneQubitOperator {
    pub fn from_matrix(m: Matrix2<C64>) -> Self {
        Self(m)
    }

    /// Row-major construction.
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self(Matrix2::new(m00, m01, m10, m11))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Operator product `self · rhs`.
    pub fn then_after(&self, rhs: &OneQubitOperator) -> Self {
        Self(self.0 * rhs.0)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self(self.0 * k)
    }

    /// Largest entry-wise deviation between two operators.
    pub fn max_abs_diff(&self, other: &OneQubitOperator) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.0.adjoint() * self.0;
        (prod - Matrix2::identity()).iter().all(|z| z.norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Applies a unitary operator to a polarization state.
    pub fn apply(&self, v: &JonesVector) -> Result<JonesVector> {
        if !self.is_unitary(UNITARY_TOL) {
            return Err(Error::Domain("operator is not unitary".into()));
        }
        let out = self.0 * v.0;
        JonesVector::new(out[0], out[1])
    }

    /// Kronecker product `self ⊗ rhs` in `(HH, HV, VH, VV)` ordering.
    pub fn kron(&self, rhs: &OneQubitOperator) -> Matrix4<C64> {
        Matrix4::from_fn(|r, col| self.0[(r / 2, col / 2)] * rhs.0[(r % 2, col % 2)])
    }
}

impl std::ops::Mul for OneQubitOperator {
    type Output = OneQubitOperator;

    fn mul(self, rhs: OneQubitOperator) -> OneQubitOperator {
        OneQubitOperator(self.0 * rhs.0)
    }
}

/// Single-qubit Pauli gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

pub fn pauli(label: Pauli) -> OneQubitOperator {
    match label {
        Pauli::I => OneQubitOperator::new(ONE, ZERO, ZERO, ONE),
        Pauli::X => OneQubitOperator::new(ZERO, ONE, ONE, ZERO),
        Pauli::Y => OneQubitOperator::new(ZERO, -I, I, ZERO),
        Pauli::Z => OneQubitOperator::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// Retardance `2π·d·Δn/λ` in radians, not reduced modulo 2π.
///
/// `thickness` and `wavelength` share a length unit (µm throughout this crate).
pub fn retardance(thickness: f64, delta_n: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(thickness >= 0.0) {
        return Err(Error::Domain(format!(
            "thickness must be non-negative, got {thickness}"
        )));
    }
    Ok(TAU * thickness * delta_n / wavelength)
}

/// A linear retarder: fast axis at `theta` from horizontal, retardance `delta`.
///
/// Phase convention: the component along the fast axis is left untouched and
/// the slow-axis component picks up `e^{iδ}`, i.e. the Jones matrix is
/// `R(θ)·diag(1, e^{iδ})·R(−θ)` with no extra global phase. At `δ = π` this is
/// exactly the half-wave plate matrix `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Retarder {
    theta: f64,
    delta: f64,
}

impl Retarder {
    /// Angles are reduced to `theta ∈ [0, π)` and `delta ∈ [0, 2π)`.
    pub fn new(theta: f64, delta: f64) -> Self {
        Self {
            theta: reduce(theta, PI),
            delta: reduce(delta, TAU),
        }
    }

    pub fn half_wave(theta: f64) -> Self {
        Self::new(theta, PI)
    }

    pub fn quarter_wave(theta: f64) -> Self {
        Self::new(theta, PI / 2.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn matrix(&self) -> OneQubitOperator {
        retarder_matrix(self)
    }
}

fn reduce(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to exactly `period` for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

pub fn retarder_matrix(r: &Retarder) -> OneQubitOperator {
    let phase = if r.delta == PI {
        -ONE
    } else {
        C64::from_polar(1.0, r.delta)
    };
    let mean = (ONE + phase) * 0.5;
    let diff = (ONE - phase) * 0.5;
    let (s2, c2) = (2.0 * r.theta).sin_cos();
    OneQubitOperator::new(mean + diff * c2, diff * s2, diff * s2, mean - diff * c2)
}

/// Half-wave plate unitary at fast-axis angle `theta` (radians).
pub fn hwp(theta: f64) -> OneQubitOperator {
    retarder_matrix(&Retarder::half_wave(theta))
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// Short token used in files and on the command line.
    pub fn token(&self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi+" | "psiplus" | "psi_plus" => Ok(BellLabel::PsiPlus),
            "psi-" | "psiminus" | "psi_minus" => Ok(BellLabel::PsiMinus),
            "phi+" | "phiplus" | "phi_plus" => Ok(BellLabel::PhiPlus),
            "phi-" | "phiminus" | "phi_minus" => Ok(BellLabel::PhiMinus),
            other => Err(Error::Domain(format!("unknown Bell state '{other}'"))),
        }
    }
}

/// Pure polarization state of a photon pair, amplitudes ordered `(HH, HV, VH, VV)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState(Vector4<C64>);

impl TwoQubitState {
    /// Normalizes the given amplitudes.
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let raw = Vector4::from(amplitudes);
        let norm = raw.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain("two-photon state has zero norm".into()));
        }
        Ok(Self(raw / c(norm)))
    }

    pub fn product(a: &JonesVector, b: &JonesVector) -> Self {
        Self(Vector4::new(
            a.h() * b.h(),
            a.h() * b.v(),
            a.v() * b.h(),
            a.v() * b.v(),
        ))
    }

    pub fn bell(label: BellLabel) -> Self {
        bell_state(label)
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn as_vector(&self) -> &Vector4<C64> {
        &self.0
    }

    pub fn inner(&self, other: &TwoQubitState) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `|⟨self|other⟩|²`; equals 1 iff the states agree up to a global phase.
    pub fn overlap(&self, other: &TwoQubitState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn same_up_to_phase(&self, other: &TwoQubitState, tol: f64) -> bool {
        (1.0 - self.overlap(other)).abs() <= tol
    }

    /// Squared overlap with each Bell state, in [`BellLabel::ALL`] order.
    pub fn bell_overlaps(&self) -> [(BellLabel, f64); 4] {
        BellLabel::ALL.map(|l| (l, bell_state(l).overlap(self)))
    }

    /// The Bell state with the largest overlap and that overlap.
    pub fn closest_bell(&self) -> (BellLabel, f64) {
        self.bell_overlaps()
            .into_iter()
            .fold((BellLabel::PsiPlus, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }
}

pub fn bell_state(label: BellLabel) -> TwoQubitState {
    let h = c(FRAC_1_SQRT_2);
    let amps = match label {
        BellLabel::PsiPlus => [ZERO, h, h, ZERO],
        BellLabel::PsiMinus => [ZERO, h, -h, ZERO],
        BellLabel::PhiPlus => [h, ZERO, ZERO, h],
        BellLabel::PhiMinus => [h, ZERO, ZERO, -h],
    };
    TwoQubitState(Vector4::from(amps))
}

/// Applies `op_a ⊗ op_b` to a pair state. Both operators must be unitary.
pub fn apply_local(
    state: &TwoQubitState,
    op_a: &OneQubitOperator,
    op_b: &OneQubitOperator,
) -> Result<TwoQubitState> {
    for (name, op) in [("a", op_a), ("b", op_b)] {
        if !op.is_unitary(UNITARY_TOL) {
            return Err(Error::Domain(format!("operator on port {name} is not unitary")));
        }
    }
    let out = op_a.kron(op_b) * state.0;
    TwoQubitState::new([out[0], out[1], out[2], out[3]])
}

/// Output port of the beamsplitter carrying a photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl FromStr for Port {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(Port::A),
            "b" | "B" => Ok(Port::B),
            other => Err(Error::Domain(format!("unknown port '{other}'"))),
        }
    }
}

/// A half-wave plate inserted in one port at fast-axis angle `theta` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplatePlacement {
    pub port: Port,
    pub theta: f64,
}

impl WaveplatePlacement {
    pub fn new(port: Port, theta: f64) -> Self {
        Self { port, theta }
    }
}

/// Waveplates that turn `|Ψ⁺⟩` into `target` (up to global phase).
///
/// | target | placements        | gate   |
/// |--------|-------------------|--------|
/// | Ψ⁺     | none              | I      |
/// | Ψ⁻     | a at 0°           | Z      |
/// | Φ⁺     | a at 45°          | X      |
/// | Φ⁻     | a at 0°, b at 45° | Z ⊗ X  |
pub fn hwp_plan(target: BellLabel) -> Vec<WaveplatePlacement> {
    use std::f64::consts::FRAC_PI_4;
    match target {
        BellLabel::PsiPlus => vec![],
        BellLabel::PsiMinus => vec![WaveplatePlacement::new(Port::A, 0.0)],
        BellLabel::PhiPlus => vec![WaveplatePlacement::new(Port::A, FRAC_PI_4)],
        BellLabel::PhiMinus => vec![
            WaveplatePlacement::new(Port::A, 0.0),
            WaveplatePlacement::new(Port::B, FRAC_PI_4),
        ],
    }
}

/// Collapses a plan into one operator per port. Later placements act after earlier ones.
pub fn plan_operators(plan: &[WaveplatePlacement]) -> (OneQubitOperator, OneQubitOperator) {
    let mut a = OneQubitOperator::identity();
    let mut b = OneQubitOperator::identity();
    for p in plan {
        let u = hwp(p.theta);
        match p.port {
            Port::A => a = u * a,
            Port::B => b = u * b,
        }
    }
    (a, b)
}

/// The full two-photon unitary of a plan.
pub fn plan_unitary(plan: &[WaveplatePlacement]) -> Matrix4<C64> {
    let (a, b) = plan_operators(plan);
    a.kron(&b)
}

pub fn apply_plan(state: &TwoQubitState, plan: &[WaveplatePlacement]) -> Result<TwoQubitState> {
    let (a, b) = plan_operators(plan);
    apply_local(state, &a, &b)
}

/// Single-photon measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `(H, V)`
    HV,
    /// `(D, A)`
    DA,
}

impl Basis {
    pub fn kets(&self) -> [JonesVector; 2] {
        match self {
            Basis::HV => [JonesVector::horizontal(), JonesVector::vertical()],
            Basis::DA => [JonesVector::diagonal(), JonesVector::antidiagonal()],
        }
    }

    pub fn labels(&self) -> [char; 2] {
        match self {
            Basis::HV => ['H', 'V'],
            Basis::DA => ['D', 'A'],
        }
    }
}

/// Amplitudes of `state` in the product basis `basis_a ⊗ basis_b`.
///
/// The output is ordered like the input: for `(DA, DA)` it is `(DD, DA, AD, AA)`.
pub fn express_in_basis(state: &TwoQubitState, basis_a: Basis, basis_b: Basis) -> [C64; 4] {
    let ka = basis_a.kets();
    let kb = basis_b.kets();
    let mut out = [ZERO; 4];
    for (i, x) in ka.iter().enumerate() {
        for (j, y) in kb.iter().enumerate() {
            out[2 * i + j] = TwoQubitState::product(x, y).inner(state);
        }
    }
    out
}
