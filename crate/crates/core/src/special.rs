//! Closed-form OTOC values for dephasing, entanglement-breaking and
//! basis-diagonal channels, plus the two analytic swap examples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, Picture};
use crate::error::{OtocError, Result};
use crate::lindblad::LindbladGenerator;
use crate::linalg::{
    hermitian_eigh, hermitian_eigenvalues, hs_inner, hs_norm2_sq, identity, kron, matrix_unit,
    min_hermitian_eigenvalue, projector, swap_aa, swap_within, trace_out_b, BipartiteSpace,
    CMatrix, CVector, DoubledOperator, Replica, C64, I, ZERO,
};
use crate::random::{haar_unitary, rng_for};
use crate::stats::mean_and_se;

const BASIS_TOL: f64 = 1e-10;

/// An orthonormal basis `{|ψ_α⟩}` of `H_AB`.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingBasis {
    space: BipartiteSpace,
    vectors: Vec<CVector>,
}

impl DephasingBasis {
    pub fn new(space: BipartiteSpace, vectors: Vec<CVector>) -> Result<Self> {
        let d = space.dim();
        if vectors.len() != d || vectors.iter().any(|v| v.len() != d) {
            return Err(OtocError::DimensionMismatch(format!("a basis of H_AB needs {d} vectors of length {d}")));
        }
        let gram = CMatrix::from_fn(d, d, |a, b| vectors[a].dotc(&vectors[b]));
        let defect = (gram - identity(d)).norm();
        if defect > BASIS_TOL {
            return Err(OtocError::NotOrthonormal { defect });
        }
        Ok(Self { space, vectors })
    }

    /// Columns of a unitary matrix.
    pub fn from_unitary(space: BipartiteSpace, u: &CMatrix) -> Result<Self> {
        space.check_operator(u)?;
        Self::new(space, u.column_iter().map(|c| c.into_owned()).collect())
    }

    pub fn computational(space: BipartiteSpace) -> Self {
        Self { space, vectors: (0..space.dim()).map(|i| crate::linalg::basis_ket(space.dim(), i)).collect() }
    }

    /// `{|a⟩_A ⊗ |b⟩_B}` from bases given as columns of unitaries on each factor.
    pub fn product(u_a: &CMatrix, u_b: &CMatrix) -> Result<Self> {
        let space = BipartiteSpace::new(u_a.nrows(), u_b.nrows())?;
        Self::from_unitary(space, &kron(u_a, u_b))
    }

    /// Bell basis `Φ+, Φ−, Ψ+, Ψ−` on two qubits. All four are swap
    /// eigenvectors with eigenvalues `(+1, +1, +1, −1)`.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rows = [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0]];
        let vectors = rows
            .iter()
            .map(|r| CVector::from_iterator(4, r.iter().map(|&x| C64::new(x, 0.0))))
            .collect();
        Self { space: BipartiteSpace::new(2, 2).expect("2x2"), vectors }
    }

    /// `U · B₀` for Haar `U` and the computational `B₀`.
    pub fn haar(space: BipartiteSpace, rng: &mut crate::random::OtocRng) -> Self {
        let u = haar_unitary(space.dim(), rng);
        Self { space, vectors: u.column_iter().map(|c| c.into_owned()).collect() }
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        self.vectors.iter().map(projector).collect()
    }

    /// `ρ_α = Tr_B |ψ_α⟩⟨ψ_α|`.
    pub fn reduced_states(&self) -> Vec<CMatrix> {
        self.vectors.iter().map(|v| trace_out_b(&projector(v), &self.space)).collect()
    }

    /// `ρ_{α,α'} = Tr_B |ψ_α⟩⟨ψ_α'|`, indexed `α * d + α'`.
    pub fn reduced_transitions(&self) -> Vec<CMatrix> {
        let d = self.space.dim();
        let mut out = Vec::with_capacity(d * d);
        for a in &self.vectors {
            for b in &self.vectors {
                out.push(trace_out_b(&(a * b.adjoint()), &self.space));
            }
        }
        out
    }

    pub fn unitary(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }

    /// Dephasing channel `X ↦ Σ_α Π_α X Π_α`.
    pub fn dephasing_channel(&self, picture: Picture) -> Channel {
        Channel::from_kraus(self.space, self.projectors(), picture).expect("projectors live on the space")
    }
}

/// `X̃_{αβ} = ⟨ρ_α, ρ_β⟩ / d_B`.
pub fn gram_matrix(basis: &DephasingBasis) -> CMatrix {
    let rho = basis.reduced_states();
    let d = rho.len();
    let db = basis.space.d_b() as f64;
    CMatrix::from_fn(d, d, |a, b| C64::new(hs_inner(&rho[a], &rho[b]).expect("same shape").re / db, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingOtoc {
    /// `(1/d_A²) ‖X̃ − X̃²‖₁` from the eigenvalues of `X̃ − X̃²`.
    pub g: f64,
    /// `(1/d_A²) Σ_α x_α (1 − x_α)` from the eigenvalues `x_α` of `X̃`.
    pub g_from_spectrum: f64,
    pub gram_spectrum: Vec<f64>,
}

pub fn g_dephasing_detail(basis: &DephasingBasis) -> DephasingOtoc {
    let x = gram_matrix(basis);
    let da2 = (basis.space.d_a() * basis.space.d_a()) as f64;
    let deficit = &x - &x * &x;
    let trace_norm: f64 = hermitian_eigenvalues(&deficit).iter().map(|v| v.abs()).sum();
    let spectrum = hermitian_eigenvalues(&x);
    let from_spec: f64 = spectrum.iter().map(|v| v * (1.0 - v)).sum();
    DephasingOtoc { g: trace_norm / da2, g_from_spectrum: from_spec / da2, gram_spectrum: spectrum }
}

pub fn g_dephasing(basis: &DephasingBasis) -> f64 {
    g_dephasing_detail(basis).g
}

/// `(G, ε/d_A)` with `ε = max_α ‖ρ_α − I/d_A‖₂²`; the bound `G ≤ ε/d_A` holds.
pub fn dephasing_entanglement_bound(basis: &DephasingBasis) -> (f64, f64) {
    let da = basis.space.d_a();
    let mixed = identity(da).unscale(da as f64);
    let eps = basis
        .reduced_states()
        .iter()
        .map(|r| hs_norm2_sq(&(r - &mixed)))
        .fold(0.0, f64::max);
    (g_dephasing(basis), eps / da as f64)
}

/// `R_B = (1/d) Σ_α Π_α ⊗ Π_α` on `H_AB ⊗ H_A'B'`.
pub fn r_matrix(basis: &DephasingBasis) -> DoubledOperator {
    let d = basis.space.dim();
    let mut r = CMatrix::zeros(d * d, d * d);
    for p in basis.projectors() {
        r += kron(&p, &p);
    }
    DoubledOperator { space: basis.space, data: r.unscale(d as f64) }
}

/// `(1/d_A) ⟨S_AA', R_B⟩ − ‖Tr_BB' R_B‖₂²`.
pub fn g_from_r_matrix(basis: &DephasingBasis) -> f64 {
    let r = r_matrix(basis);
    let sp = basis.space;
    let first = hs_inner(&swap_aa(&sp).data, &r.data).expect("same shape").re / sp.d_a() as f64;
    let second = hs_norm2_sq(&r.reduce(&[Replica::A, Replica::APrime]));
    first - second
}

/// `(1/d_A)(1 − 1/d_A)`: the largest value any dephasing channel reaches.
pub fn dephasing_cap(space: &BipartiteSpace) -> f64 {
    let da = space.d_a() as f64;
    (1.0 - 1.0 / da) / da
}

/// `¼ min(1, d_B/d_A)`.
pub fn dephasing_rank_bound(space: &BipartiteSpace) -> f64 {
    0.25 * (space.d_b() as f64 / space.d_a() as f64).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub d_a: usize,
    pub d_b: usize,
    pub n_bases: usize,
    pub mean: f64,
    pub std_err: f64,
    /// `7 / (4 d_A²)`.
    pub mean_bound: f64,
    pub epsilon: f64,
    /// Fraction of bases with `G ≥ 7/(4 d_A²) + ε`.
    pub tail: f64,
    /// `exp(−d ε² / K²)` with `K = 100`.
    pub tail_bound: f64,
    pub values: Vec<f64>,
}

pub const LIPSCHITZ_K: f64 = 100.0;

/// `G(D_{U·B₀})` over Haar `U`, one ChaCha stream per basis.
pub fn random_dephasing_ensemble(d_a: usize, d_b: usize, n_bases: usize, seed: u64, epsilon: f64) -> Result<EnsembleReport> {
    if d_a > d_b {
        return Err(OtocError::InvalidArgument(format!("ensemble needs d_A <= d_B, got {d_a} > {d_b}")));
    }
    if n_bases < 10 {
        return Err(OtocError::InvalidArgument("need at least 10 bases".into()));
    }
    let space = BipartiteSpace::new(d_a, d_b)?;
    let values: Vec<f64> = (0..n_bases)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, k as u64);
            g_dephasing(&DephasingBasis::haar(space, &mut rng))
        })
        .collect();
    let (mean, se) = mean_and_se(&values);
    let mean_bound = 7.0 / (4.0 * (d_a * d_a) as f64);
    let tail = values.iter().filter(|&&g| g >= mean_bound + epsilon).count() as f64 / n_bases as f64;
    let d = space.dim() as f64;
    Ok(EnsembleReport {
        d_a,
        d_b,
        n_bases,
        mean,
        std_err: se,
        mean_bound,
        epsilon,
        tail,
        tail_bound: (-d * epsilon * epsilon / (LIPSCHITZ_K * LIPSCHITZ_K)).exp(),
        values,
    })
}

/// Measure-and-prepare channel `X ↦ Σ_k M_k Tr[δ_k X]` (Heisenberg picture).
#[derive(Debug, Clone, PartialEq)]
pub struct EbChannelSpec {
    space: BipartiteSpace,
    povm: Vec<CMatrix>,
    states: Vec<CMatrix>,
}

impl EbChannelSpec {
    pub fn new(space: BipartiteSpace, povm: Vec<CMatrix>, states: Vec<CMatrix>) -> Result<Self> {
        if povm.len() != states.len() || povm.is_empty() {
            return Err(OtocError::DimensionMismatch(format!(
                "{} POVM elements but {} states",
                povm.len(),
                states.len()
            )));
        }
        let d = space.dim();
        let mut total = CMatrix::zeros(d, d);
        for (m, s) in povm.iter().zip(&states) {
            space.check_operator(m)?;
            space.check_operator(s)?;
            let min_m = min_hermitian_eigenvalue(m);
            let min_s = min_hermitian_eigenvalue(s);
            if min_m < -BASIS_TOL || crate::linalg::hermiticity_defect(m) > BASIS_TOL {
                return Err(OtocError::NotPositive { min_eigenvalue: min_m });
            }
            if min_s < -BASIS_TOL || crate::linalg::hermiticity_defect(s) > BASIS_TOL {
                return Err(OtocError::NotPositive { min_eigenvalue: min_s });
            }
            if (s.trace() - C64::new(1.0, 0.0)).norm() > BASIS_TOL {
                return Err(OtocError::InvalidArgument("prepared states must have unit trace".into()));
            }
            total += m;
        }
        let defect = (total - identity(d)).norm();
        if defect > BASIS_TOL {
            return Err(OtocError::InvalidArgument(format!("POVM is incomplete (defect {defect:.3e})")));
        }
        Ok(Self { space, povm, states })
    }

    /// `M_k = Π̃_k`, `δ_k = Π_k`, paired in list order.
    pub fn basis_to_basis(from: &DephasingBasis, to: &DephasingBasis) -> Result<Self> {
        if from.space != to.space {
            return Err(OtocError::DimensionMismatch("bases live on different spaces".into()));
        }
        Self::new(from.space, to.projectors(), from.projectors())
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    /// Liouville matrix `Σ_k vec(M_k) vec(δ_kᵀ)ᵀ`.
    pub fn channel(&self) -> Channel {
        let d = self.space.dim();
        let mut m = CMatrix::zeros(d * d, d * d);
        for (mk, dk) in self.povm.iter().zip(&self.states) {
            let a = crate::linalg::vec_col(mk);
            let b = crate::linalg::vec_col(&dk.transpose());
            m += a * b.transpose();
        }
        Channel::from_liouville(self.space, m, Picture::Heisenberg).expect("shape fixed")
    }
}

/// `(1/d²) Σ_kk' ⟨δ_k^A, δ_k'^A⟩ [d_B ⟨M_k, M_k'⟩ − ⟨M_k^A, M_k'^A⟩]`.
pub fn g_eb(spec: &EbChannelSpec) -> f64 {
    let sp = spec.space;
    let n = spec.povm.len();
    let da_states: Vec<CMatrix> = spec.states.iter().map(|s| trace_out_b(s, &sp)).collect();
    let da_povm: Vec<CMatrix> = spec.povm.iter().map(|m| trace_out_b(m, &sp)).collect();
    let db = sp.d_b() as f64;
    let mut acc = ZERO;
    for k in 0..n {
        for k2 in 0..n {
            let w = hs_inner(&da_states[k], &da_states[k2]).expect("same shape");
            let m = hs_inner(&spec.povm[k], &spec.povm[k2]).expect("same shape") * db
                - hs_inner(&da_povm[k], &da_povm[k2]).expect("same shape");
            acc += w * m;
        }
    }
    let d = sp.dim() as f64;
    acc.re / (d * d)
}

/// `(1/d²) (d_B Σ_k ‖ρ_k‖² − Σ_kk' ⟨ρ_k, ρ_k'⟩⟨ρ̃_k, ρ̃_k'⟩)`.
pub fn g_eb_basis_to_basis(from: &DephasingBasis, to: &DephasingBasis) -> Result<f64> {
    if from.space != to.space {
        return Err(OtocError::DimensionMismatch("bases live on different spaces".into()));
    }
    let sp = from.space;
    let r = from.reduced_states();
    let rt = to.reduced_states();
    let first: f64 = r.iter().map(hs_norm2_sq).sum::<f64>() * sp.d_b() as f64;
    let mut second = 0.0;
    for k in 0..r.len() {
        for k2 in 0..r.len() {
            second += hs_inner(&r[k], &r[k2]).expect("same shape").re * hs_inner(&rt[k], &rt[k2]).expect("same shape").re;
        }
    }
    let d = sp.dim() as f64;
    Ok((first - second) / (d * d))
}

/// `Φ̂ ≥ 0` with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    phi: CMatrix,
}

impl PhaseProfile {
    pub fn new(phi: CMatrix) -> Result<Self> {
        if !phi.is_square() {
            return Err(OtocError::DimensionMismatch("phase profile must be square".into()));
        }
        for a in 0..phi.nrows() {
            if (phi[(a, a)] - C64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(OtocError::InvalidArgument(format!("phase profile diagonal entry {a} is not 1")));
            }
        }
        let herm = crate::linalg::hermiticity_defect(&phi);
        let min = min_hermitian_eigenvalue(&phi);
        if herm > 1e-10 || min < -1e-10 {
            return Err(OtocError::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { phi })
    }

    /// `Φ̂ = I`: complete dephasing in the basis.
    pub fn dephasing(d: usize) -> Self {
        Self { phi: identity(d) }
    }

    /// `φ_{αα'} = e^{i(θ_α − θ_α')}`: a unitary diagonal in the basis.
    pub fn from_phases(theta: &[f64]) -> Self {
        let n = theta.len();
        Self { phi: CMatrix::from_fn(n, n, |a, b| (I * (theta[a] - theta[b])).exp()) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.phi
    }
}

/// `E(|α⟩⟨α'|) = φ_{αα'} |α⟩⟨α'|` with Kraus operators
/// `√λ_μ V diag(w_μ) V†` from `Φ̂ = W diag(λ) W†`.
pub fn b_diagonal_channel(basis: &DephasingBasis, profile: &PhaseProfile) -> Result<Channel> {
    let d = basis.space.dim();
    if profile.phi.nrows() != d {
        return Err(OtocError::DimensionMismatch(format!("profile is {}x{}, basis has {d} states", profile.phi.nrows(), profile.phi.nrows())));
    }
    let v = basis.unitary();
    let (vals, w) = hermitian_eigh(&profile.phi);
    let mut ops = Vec::new();
    for (mu, &lam) in vals.iter().enumerate() {
        if lam <= 1e-14 {
            continue;
        }
        let diag = CMatrix::from_diagonal(&w.column(mu).map(|z| z * lam.sqrt()));
        ops.push(&v * diag * v.adjoint());
    }
    Channel::from_kraus(basis.space, ops, Picture::Heisenberg)
}

/// `(d_B/d²) Σ |φ_{αα'}|² ‖ρ_{αα'}‖² − (1/d²) Σ φ*_{αα'} φ_{ββ'} |⟨ρ_{αα'}, ρ_{ββ'}⟩|²`.
pub fn g_b_diagonal(basis: &DephasingBasis, profile: &PhaseProfile) -> Result<f64> {
    let d = basis.space.dim();
    if profile.phi.nrows() != d {
        return Err(OtocError::DimensionMismatch("profile and basis sizes differ".into()));
    }
    let rho = basis.reduced_transitions();
    let phi: Vec<C64> = (0..d * d).map(|p| profile.phi[(p / d, p % d)]).collect();
    let db = basis.space.d_b() as f64;
    let first: f64 = phi.iter().zip(&rho).map(|(f, r)| f.norm_sqr() * hs_norm2_sq(r)).sum::<f64>() * db;
    let mut second = ZERO;
    for p in 0..d * d {
        for q in 0..d * d {
            let ip = hs_inner(&rho[p], &rho[q]).expect("same shape");
            second += phi[p].conj() * phi[q] * ip.norm_sqr();
        }
    }
    let d2 = (d * d) as f64;
    Ok((first - second.re) / d2)
}

/// `φ_{αα'}(t) = exp(−(t/2) Σ_μ (|α_μ − α'_μ|² − 2i Im(α'_μ ᾱ_μ)))` for jump
/// operators diagonal in the basis, with `eigenvalues[α][μ] = α_μ`. This is the
/// evolution `e^{tL}` of the Heisenberg generator `Σ_μ (L_μ† X L_μ − ½{L_μ†L_μ, X})`.
pub fn abelian_lindblad_profile(eigenvalues: &[Vec<C64>], t: f64) -> Result<PhaseProfile> {
    let d = eigenvalues.len();
    let n_ops = eigenvalues.first().map_or(0, |e| e.len());
    if eigenvalues.iter().any(|e| e.len() != n_ops) {
        return Err(OtocError::DimensionMismatch("ragged eigenvalue table".into()));
    }
    if t < 0.0 {
        return Err(OtocError::InvalidArgument("t must be nonnegative".into()));
    }
    let phi = CMatrix::from_fn(d, d, |a, b| {
        let mut s = ZERO;
        for mu in 0..n_ops {
            let (x, y) = (eigenvalues[a][mu], eigenvalues[b][mu]);
            s += C64::new((x - y).norm_sqr(), -2.0 * (y * x.conj()).im);
        }
        (s * (-0.5 * t)).exp()
    });
    PhaseProfile::new(phi)
}

/// Jump operators `V diag(α_μ) V†` matching an eigenvalue table.
pub fn abelian_jumps(basis: &DephasingBasis, eigenvalues: &[Vec<C64>]) -> Vec<CMatrix> {
    let v = basis.unitary();
    let n_ops = eigenvalues.first().map_or(0, |e| e.len());
    (0..n_ops)
        .map(|mu| {
            let diag = CVector::from_iterator(eigenvalues.len(), eigenvalues.iter().map(|e| e[mu]));
            &v * CMatrix::from_diagonal(&diag) * v.adjoint()
        })
        .collect()
}

fn two_qubits() -> BipartiteSpace {
    BipartiteSpace::new(2, 2).expect("2x2")
}

fn g_max_2() -> f64 {
    0.75
}

/// `G(E_t) = b(t)² G_max` with `b(t) = (1 − e^{−t})/2`.
pub fn example1_curve(t: f64) -> f64 {
    let b = 0.5 * (1.0 - (-t).exp());
    b * b * g_max_2()
}

/// `E_t = a(t) I + b(t) Ad S` as an explicit Kraus mixture.
pub fn example1_channel(t: f64) -> Result<Channel> {
    let sp = two_qubits();
    let b = 0.5 * (1.0 - (-t).exp());
    let a = 1.0 - b;
    let id = Channel::identity(sp, Picture::Heisenberg);
    let sw = Channel::unitary(sp, swap_within(&sp)?, Picture::Heisenberg)?;
    Channel::convex_combination(&[(a, &id), (b, &sw)])
}

/// `L = ½(Ad S − I)`: a single jump operator `S/√2`. The rate ½ is what
/// produces the weights `(1 ± e^{−t})/2`; `Ad S − I` itself gives `e^{−2t}`.
pub fn example1_generator() -> Result<LindbladGenerator> {
    let sp = two_qubits();
    LindbladGenerator::new(sp, CMatrix::zeros(4, 4), vec![swap_within(&sp)?.scale(std::f64::consts::FRAC_1_SQRT_2)])
}

/// `G(E_t) = e^{−2λt} (1 − cos⁴ t) G_max`.
pub fn example2_curve(t: f64, lambda: f64) -> f64 {
    (-2.0 * lambda * t).exp() * (1.0 - t.cos().powi(4)) * g_max_2()
}

/// Checks `D_B(X ⊗ I/d_B) = Tr(X) I/d` on matrix units of `H_A`; returns the defect.
pub fn reduced_dephasing_defect(basis: &DephasingBasis) -> f64 {
    let sp = basis.space;
    let (da, db, d) = (sp.d_a(), sp.d_b(), sp.dim());
    let ch = basis.dephasing_channel(Picture::Heisenberg);
    let mut worst: f64 = 0.0;
    for i in 0..da {
        for j in 0..da {
            let x = matrix_unit(da, i, j);
            let out = ch.apply(&kron(&x, &identity(db).unscale(db as f64))).expect("shape");
            let expect = identity(d).scale(if i == j { 1.0 / d as f64 } else { 0.0 });
            worst = worst.max((out - expect).norm());
        }
    }
    worst
}

/// `E_t = ã(t) e^{it ad S} + b̃(t) D_Bell` with `ã = e^{−λt}`.
pub fn example2_channel(t: f64, lambda: f64) -> Result<Channel> {
    let sp = two_qubits();
    let bell = DephasingBasis::bell();
    let defect = reduced_dephasing_defect(&bell);
    if defect > 1e-12 {
        return Err(OtocError::InvalidArgument(format!("Bell dephasing fails the reduced-input identity ({defect:.3e})")));
    }
    let a = (-lambda * t).exp();
    let s = swap_within(&sp)?;
    // e^{itS} = cos t I + i sin t S since S² = I
    let u = identity(4).scale(t.cos()) + s * (I * t.sin());
    let unitary = Channel::unitary(sp, u, Picture::Heisenberg)?;
    let deph = bell.dephasing_channel(Picture::Heisenberg);
    Channel::convex_combination(&[(a, &unitary), (1.0 - a, &deph)])
}

/// `L = i ad S + λ(D_Bell − I)`: Hamiltonian `S`, jumps `√λ Π_α`.
pub fn example2_generator(lambda: f64) -> Result<LindbladGenerator> {
    if lambda < 0.0 {
        return Err(OtocError::InvalidArgument("λ must be nonnegative".into()));
    }
    let sp = two_qubits();
    let jumps = if lambda == 0.0 {
        vec![]
    } else {
        DephasingBasis::bell().projectors().into_iter().map(|p| p.scale(lambda.sqrt())).collect()
    };
    LindbladGenerator::new(sp, swap_within(&sp)?, jumps)
}
