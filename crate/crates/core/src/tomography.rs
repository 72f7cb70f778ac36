//! Two-photon state tomography from 36 product-basis coincidence counts.
//!
//! Each arm is measured in all six settings `H, V, D, A, R, L`. Pauli
//! correlations are estimated from basis contrasts (`Z ↔ H/V`, `X ↔ D/A`,
//! `Y ↔ L/R`; with `L = (1, i)/√2` the `+1` eigenstate of σy is L). Linear
//! inversion of those correlations seeds an iterative maximum-likelihood
//! refinement on the Poisson likelihood.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Serialize, Serializer};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::jones::{pauli, Pauli, TwoQubitState, C64};
use crate::measurement::{pair_ket, projector_probability, AnalyzerSetting, NamedSetting};
use crate::source::{find_counts, CountRecord};

pub const N_SETTINGS: usize = 36;

/// The 36 product settings, port-a major over `H, V, D, A, R, L`:
/// `(H,H), (H,V), …, (L,R), (L,L)`.
pub fn tomo_settings() -> Vec<(AnalyzerSetting, AnalyzerSetting)> {
    let mut out = Vec::with_capacity(N_SETTINGS);
    for a in NamedSetting::ALL {
        for b in NamedSetting::ALL {
            out.push((a.into(), b.into()));
        }
    }
    out
}

fn setting_index(a: NamedSetting, b: NamedSetting) -> usize {
    let pos = |n| NamedSetting::ALL.iter().position(|&x| x == n).expect("named setting");
    6 * pos(a) + pos(b)
}

/// `(+1, −1)` eigen-settings of a Pauli operator.
fn eigen_settings(p: Pauli) -> Option<(NamedSetting, NamedSetting)> {
    match p {
        Pauli::I => None,
        Pauli::X => Some((NamedSetting::D, NamedSetting::A)),
        Pauli::Y => Some((NamedSetting::L, NamedSetting::R)),
        Pauli::Z => Some((NamedSetting::H, NamedSetting::V)),
    }
}

/// Counts for the 36 settings of [`tomo_settings`], in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyData {
    counts: [f64; N_SETTINGS],
}

impl TomographyData {
    pub fn from_counts(counts: [f64; N_SETTINGS]) -> Result<Self> {
        if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Domain("tomography counts must be finite and non-negative".into()));
        }
        Ok(Self { counts })
    }

    /// Matches records to the 36 settings; every missing setting is reported.
    pub fn from_records(records: &[CountRecord]) -> Result<Self> {
        let mut counts = [0.0; N_SETTINGS];
        let mut missing = Vec::new();
        for (slot, (a, b)) in counts.iter_mut().zip(tomo_settings()) {
            match find_counts(records, &a, &b) {
                Some(c) => *slot = c as f64,
                None => missing.push(format!("{a}{b}")),
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingSettings(missing));
        }
        Self::from_counts(counts)
    }

    /// Noise-free data: `scale · Tr[ρ (Πa ⊗ Πb)]` for every setting.
    pub fn expected(rho: &DensityMatrix, scale: f64) -> Self {
        let mut counts = [0.0; N_SETTINGS];
        for (slot, (a, b)) in counts.iter_mut().zip(tomo_settings()) {
            *slot = scale * projector_probability(rho, &a, &b).max(0.0);
        }
        Self { counts }
    }

    pub fn counts(&self) -> &[f64; N_SETTINGS] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    fn get(&self, a: NamedSetting, b: NamedSetting) -> f64 {
        self.counts[setting_index(a, b)]
    }
}

/// Estimated Pauli correlations `S_ij = ⟨σ_i ⊗ σ_j⟩`, indices ordered `I, X, Y, Z`.
///
/// Two-body terms use the contrast inside their own basis pair. Single-body
/// terms pool the three basis pairs that share the measured arm's basis.
pub fn stokes_correlations(data: &TomographyData) -> Result<Matrix4<f64>> {
    let paulis = Pauli::ALL;
    let mut s = Matrix4::<f64>::zeros();
    s[(0, 0)] = 1.0;
    // [n++, n+-, n-+, n--] for each basis pair
    let block = |i: Pauli, j: Pauli| -> [f64; 4] {
        let (ap, am) = eigen_settings(i).expect("non-identity");
        let (bp, bm) = eigen_settings(j).expect("non-identity");
        [data.get(ap, bp), data.get(ap, bm), data.get(am, bp), data.get(am, bm)]
    };
    for (i, &pi) in paulis.iter().enumerate().skip(1) {
        for (j, &pj) in paulis.iter().enumerate().skip(1) {
            let n = block(pi, pj);
            let total: f64 = n.iter().sum();
            if !(total > 0.0) {
                return Err(Error::ZeroTotal(format!("basis pair {pi:?}{pj:?}")));
            }
            s[(i, j)] = (n[0] + n[3] - n[1] - n[2]) / total;
        }
    }
    for (k, &pk) in paulis.iter().enumerate().skip(1) {
        let (mut num_a, mut den_a, mut num_b, mut den_b) = (0.0, 0.0, 0.0, 0.0);
        for &other in &paulis[1..] {
            let na = block(pk, other);
            let nb = block(other, pk);
            num_a += na[0] + na[1] - na[2] - na[3];
            den_a += na.iter().sum::<f64>();
            num_b += nb[0] + nb[2] - nb[1] - nb[3];
            den_b += nb.iter().sum::<f64>();
        }
        s[(k, 0)] = num_a / den_a;
        s[(0, k)] = num_b / den_b;
    }
    Ok(s)
}

/// `ρ = ¼ Σ S_ij σ_i ⊗ σ_j`. The result can have negative eigenvalues.
pub fn linear_inversion(s: &Matrix4<f64>) -> Result<DensityMatrix> {
    if (s[(0, 0)] - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("S_00 must be 1, got {}", s[(0, 0)])));
    }
    let mut m = Matrix4::<C64>::zeros();
    for (i, &pi) in Pauli::ALL.iter().enumerate() {
        for (j, &pj) in Pauli::ALL.iter().enumerate() {
            m += pauli(pi).kron(&pauli(pj)) * C64::new(0.25 * s[(i, j)], 0.0);
        }
    }
    DensityMatrix::new(m)
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Closest physical state with the same eigenvectors: the eigenvalues are
/// projected onto the probability simplex.
pub fn project_physical(rho: &DensityMatrix) -> DensityMatrix {
    let eig = SymmetricEigen::new(*rho.matrix());
    let projected = project_to_simplex(eig.eigenvalues.as_slice());
    let mut m = Matrix4::<C64>::zeros();
    for (k, &w) in projected.iter().enumerate() {
        if w > 0.0 {
            let v = eig.eigenvectors.column(k);
            m += v * v.adjoint() * C64::new(w, 0.0);
        }
    }
    DensityMatrix::normalized(m).expect("simplex weights sum to one")
}

/// `⟨ψ|ρ|ψ⟩`: overlap of a reconstructed state with a pure target.
pub fn fidelity(rho: &DensityMatrix, target: &TwoQubitState) -> f64 {
    rho.expectation_in(target.as_vector()).clamp(0.0, 1.0)
}

/// `Tr(ρ²)`
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Mle,
}

/// Knobs of the likelihood iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleConfig {
    /// Weight `ε` of the `RρR` step in `ρ ← (1−ε)ρ + ε·N[RρR]`.
    pub dilution: f64,
    pub max_iterations: usize,
    /// Stop once an accepted step raises the log-likelihood per detected count by less than this.
    pub tolerance: f64,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            dilution: 0.1,
            max_iterations: 10_000,
            tolerance: 1e-10,
        }
    }
}

/// Mixing weight of `I/4` used when the initial state forbids an observed outcome.
pub const INIT_PERTURBATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub rho: DensityMatrix,
    pub fidelity: f64,
    pub purity: f64,
    pub method: Method,
    pub iterations: usize,
    pub log_likelihood: f64,
    /// Log-likelihood after the initial state and after every accepted step.
    pub likelihood_trace: Vec<f64>,
    pub target: TwoQubitState,
}

impl TomographyResult {
    fn new(rho: DensityMatrix, target: &TwoQubitState, method: Method, iterations: usize, trace: Vec<f64>) -> Self {
        Self {
            fidelity: fidelity(&rho, target),
            purity: purity(&rho),
            log_likelihood: trace.last().copied().unwrap_or(f64::NEG_INFINITY),
            rho,
            method,
            iterations,
            likelihood_trace: trace,
            target: *target,
        }
    }

    /// Name of the target: its Bell token when it is a Bell state.
    pub fn target_name(&self) -> String {
        let (label, overlap) = self.target.closest_bell();
        if (overlap - 1.0).abs() < 1e-9 {
            label.token().to_string()
        } else {
            "custom".to_string()
        }
    }
}

impl Serialize for TomographyResult {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report {
            re: [[f64; 4]; 4],
            im: [[f64; 4]; 4],
            fidelity: f64,
            purity: f64,
            target: String,
            method: Method,
            iterations: usize,
            log_likelihood: Option<f64>,
        }
        let m = self.rho.matrix();
        Report {
            re: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)].re)),
            im: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)].im)),
            fidelity: self.fidelity,
            purity: self.purity,
            target: self.target_name(),
            method: self.method,
            iterations: self.iterations,
            log_likelihood: self.log_likelihood.is_finite().then_some(self.log_likelihood),
        }
        .serialize(ser)
    }
}

struct Likelihood {
    kets: Vec<Vector4<C64>>,
    counts: [f64; N_SETTINGS],
    total: f64,
}

impl Likelihood {
    fn new(data: &TomographyData) -> Self {
        Self {
            kets: tomo_settings().iter().map(|(a, b)| pair_ket(a, b)).collect(),
            counts: data.counts,
            total: data.total(),
        }
    }

    fn probabilities(&self, rho: &DensityMatrix) -> [f64; N_SETTINGS] {
        std::array::from_fn(|k| rho.expectation_in(&self.kets[k]))
    }

    fn log_likelihood(&self, probs: &[f64; N_SETTINGS]) -> f64 {
        let mut ll = 0.0;
        for (&n, &p) in self.counts.iter().zip(probs) {
            if n > 0.0 {
                if p <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                ll += n * p.ln();
            }
        }
        ll
    }

    fn forbids_observation(&self, probs: &[f64; N_SETTINGS]) -> bool {
        self.counts.iter().zip(probs).any(|(&n, &p)| n > 0.0 && p <= 1e-300)
    }

    /// `R = Σ_k (n_k / N p_k) |k⟩⟨k|`
    fn r_operator(&self, probs: &[f64; N_SETTINGS]) -> Matrix4<C64> {
        let mut r = Matrix4::<C64>::zeros();
        for ((ket, &n), &p) in self.kets.iter().zip(&self.counts).zip(probs) {
            if n > 0.0 && p > 0.0 {
                r += ket * ket.adjoint() * C64::new(n / (self.total * p), 0.0);
            }
        }
        r
    }
}

/// Maximum-likelihood reconstruction by diluted `RρR` iteration.
///
/// Each step proposes `ρ' = (1−ε)ρ + ε·RρR/Tr(RρR)`. A proposal that lowers
/// the likelihood is retried with ε halved, so accepted steps never decrease
/// it. Starts from `init`, or from the projected linear inversion when `None`.
pub fn mle_reconstruct(
    data: &TomographyData,
    init: Option<&DensityMatrix>,
    target: &TwoQubitState,
    cfg: &MleConfig,
) -> Result<TomographyResult> {
    if !(cfg.dilution > 0.0 && cfg.dilution <= 1.0) {
        return Err(Error::Domain(format!("dilution must lie in (0, 1], got {}", cfg.dilution)));
    }
    let lik = Likelihood::new(data);
    if !(lik.total > 0.0) {
        return Err(Error::ZeroTotal("tomography data".into()));
    }
    let mut rho = match init {
        Some(r) => {
            r.ensure_physical()?;
            *r
        }
        None => project_physical(&linear_inversion(&stokes_correlations(data)?)?),
    };
    let mut probs = lik.probabilities(&rho);
    if lik.forbids_observation(&probs) {
        rho = rho.mix(&DensityMatrix::maximally_mixed(), 1.0 - INIT_PERTURBATION);
        probs = lik.probabilities(&rho);
    }
    let mut ll = lik.log_likelihood(&probs);
    if !ll.is_finite() {
        return Err(Error::Numerical("initial state assigns zero probability to observed counts".into()));
    }
    let mut trace = vec![ll];
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let r = lik.r_operator(&probs);
        let step = r * rho.matrix() * r;
        let step = match DensityMatrix::normalized(step) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut eps = cfg.dilution;
        let mut accepted = None;
        while eps > 1e-12 {
            let candidate = step.mix(&rho, eps);
            let cand_probs = lik.probabilities(&candidate);
            let cand_ll = lik.log_likelihood(&cand_probs);
            if cand_ll >= ll {
                accepted = Some((candidate, cand_probs, cand_ll));
                break;
            }
            eps *= 0.5;
        }
        let Some((candidate, cand_probs, cand_ll)) = accepted else {
            break;
        };
        let gain = cand_ll - ll;
        rho = candidate;
        probs = cand_probs;
        ll = cand_ll;
        trace.push(ll);
        if gain / lik.total < cfg.tolerance {
            break;
        }
    }
    let rho = DensityMatrix::normalized(*rho.matrix())?;
    Ok(TomographyResult::new(rho, target, Method::Mle, iterations, trace))
}

/// Reconstruction with the requested estimator. `Linear` returns the
/// simplex-projected linear inversion.
pub fn reconstruct(
    data: &TomographyData,
    method: Method,
    target: &TwoQubitState,
    cfg: &MleConfig,
) -> Result<TomographyResult> {
    match method {
        Method::Mle => mle_reconstruct(data, None, target, cfg),
        Method::Linear => {
            let rho = project_physical(&linear_inversion(&stokes_correlations(data)?)?);
            let lik = Likelihood::new(data);
            let ll = lik.log_likelihood(&lik.probabilities(&rho));
            Ok(TomographyResult::new(rho, target, Method::Linear, 0, vec![ll]))
        }
    }
}
