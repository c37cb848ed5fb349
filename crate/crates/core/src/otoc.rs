//! The averaged bipartite OTOC `G(E)` and its equivalent forms.
//!
//! For a unital Heisenberg-picture map `E` on `H_A ⊗ H_B` with `Y_ij = E(|i⟩⟨j| ⊗ I_B)`:
//!
//! ```text
//! G1 = (d_B/d²) Σ_ij ‖Y_ij‖₂²      G2 = (1/d²) Σ_ij ‖Tr_B Y_ij‖₂²      G = G1 − G2
//! ```
//!
//! Only `d_A²` applications of `E` on `d × d` operators are needed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, Picture, Representation};
use crate::error::{OtocError, Result};
use crate::linalg::{
    hs_norm2_sq, identity, kron, linear_entropy, matrix_unit, partial_trace, projector,
    swap_aa, trace_out_b, unitarity_defect, BipartiteSpace, CMatrix, CVector, C64, ZERO,
};
use crate::random::{haar_state, haar_unitary, rng_for, OtocRng};
use crate::stats::{binomial_se, mean_and_se, pairwise_sum, sample_chunked, CHUNK};

/// Unitality tolerance on `‖E(I) − I‖₂ / √d`.
pub const UNITAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Closed,
    Choi,
    EntropyMc,
    CommutatorMc,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Closed => "closed",
            Method::Choi => "choi",
            Method::EntropyMc => "entropy_mc",
            Method::CommutatorMc => "commutator_mc",
            Method::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocValue {
    pub g: f64,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub method: Method,
    pub std_err: Option<f64>,
    pub n_samples: Option<usize>,
}

impl OtocValue {
    fn split(g1: f64, g2: f64, method: Method) -> Self {
        Self { g: g1 - g2, g1: Some(g1), g2: Some(g2), method, std_err: None, n_samples: None }
    }

    fn sampled(g: f64, se: f64, n: usize, method: Method) -> Self {
        Self { g, g1: None, g2: None, method, std_err: Some(se), n_samples: Some(n) }
    }
}

fn require_heisenberg(ch: &Channel) -> Result<()> {
    if ch.picture() != Picture::Heisenberg {
        return Err(OtocError::InvalidArgument(
            "OTOC evaluation needs a Heisenberg-picture channel; take the adjoint first".into(),
        ));
    }
    Ok(())
}

fn check_unital(e_of_identity: &CMatrix) -> Result<()> {
    let d = e_of_identity.nrows();
    let defect = (e_of_identity - identity(d)).norm();
    if defect > UNITAL_TOL * (d as f64).sqrt() {
        return Err(OtocError::NotUnital { defect });
    }
    Ok(())
}

/// `G` from the images `Y_ij = E(|i⟩⟨j| ⊗ I_B)`, indexed `i * d_A + j`.
/// Unitality is checked through `E(I) = Σ_i Y_ii`.
pub fn g_from_images(space: &BipartiteSpace, images: &[CMatrix]) -> Result<OtocValue> {
    let (da, db, d) = (space.d_a(), space.d_b(), space.dim());
    if images.len() != da * da {
        return Err(OtocError::DimensionMismatch(format!(
            "expected {} images, got {}",
            da * da,
            images.len()
        )));
    }
    let mut e_id = CMatrix::zeros(d, d);
    for i in 0..da {
        space.check_operator(&images[i * da + i])?;
        e_id += &images[i * da + i];
    }
    check_unital(&e_id)?;
    let t1: Vec<f64> = images.iter().map(hs_norm2_sq).collect();
    let t2: Vec<f64> = images.iter().map(|y| hs_norm2_sq(&trace_out_b(y, space))).collect();
    let d2 = (d * d) as f64;
    Ok(OtocValue::split(db as f64 * pairwise_sum(&t1) / d2, pairwise_sum(&t2) / d2, Method::Exact))
}

/// `G` for any map given as a closure on `d × d` operators.
pub fn g_from_map<F>(space: &BipartiteSpace, map: F) -> Result<OtocValue>
where
    F: Fn(&CMatrix) -> Result<CMatrix>,
{
    let da = space.d_a();
    let id_b = identity(space.d_b());
    let mut images = Vec::with_capacity(da * da);
    for i in 0..da {
        for j in 0..da {
            images.push(map(&kron(&matrix_unit(da, i, j), &id_b))?);
        }
    }
    g_from_images(space, &images)
}

pub fn g_exact(ch: &Channel) -> Result<OtocValue> {
    require_heisenberg(ch)?;
    g_from_map(&ch.space(), |x| ch.apply(x))
}

/// Value of `G` with the roles of A and B exchanged, i.e. built from
/// `Tr[S_BB' E⊗²(S_BB')]`. Differs from `G` for generic non-unitary channels.
pub fn g_exact_reversed(ch: &Channel) -> Result<OtocValue> {
    require_heisenberg(ch)?;
    let sp = ch.space();
    let rev = BipartiteSpace::new(sp.d_b(), sp.d_a())?;
    let p = factor_swap(&sp);
    g_from_map(&rev, |x| Ok(&p * ch.apply(&(p.adjoint() * x * &p))? * p.adjoint()))
}

/// Permutation `|a⟩|b⟩ ↦ |b⟩|a⟩` from `H_A ⊗ H_B` to `H_B ⊗ H_A`.
fn factor_swap(space: &BipartiteSpace) -> CMatrix {
    let (da, db) = (space.d_a(), space.d_b());
    let mut p = CMatrix::zeros(da * db, da * db);
    for a in 0..da {
        for b in 0..db {
            p[(b * da + a, a * db + b)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// `G(U) = 1 − (1/d²) Σ_{a,a',i,j} |Σ_{b,c} U_{ab,ic} conj(U_{a'b,jc})|²` for the
/// unitary channel `X ↦ U X U†`.
pub fn g_closed(space: &BipartiteSpace, u: &CMatrix) -> Result<OtocValue> {
    space.check_operator(u)?;
    let defect = unitarity_defect(u);
    if defect > 1e-8 {
        return Err(OtocError::NotUnitary { defect });
    }
    let (da, db, d) = (space.d_a(), space.d_b(), space.dim());
    let mut acc = Vec::with_capacity(da * da);
    for i in 0..da {
        for j in 0..da {
            let mut s = 0.0;
            for a in 0..da {
                for a2 in 0..da {
                    let mut z = ZERO;
                    for b in 0..db {
                        for c in 0..db {
                            z += u[(a * db + b, i * db + c)] * u[(a2 * db + b, j * db + c)].conj();
                        }
                    }
                    s += z.norm_sqr();
                }
            }
            acc.push(s);
        }
    }
    let g2 = pairwise_sum(&acc) / (d * d) as f64;
    Ok(OtocValue::split(1.0, g2, Method::Closed))
}

/// Choi-purity form `G = d_B ‖Tr_B' ρ_E‖² − ‖Tr_BB' ρ_E‖²` together with the
/// channel-distance form `d_B ‖ρ_Ẽ − ρ_{T∘Ẽ}‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOtoc {
    pub value: OtocValue,
    pub distance_form: f64,
}

pub fn g_choi(ch: &Channel) -> Result<ChoiOtoc> {
    require_heisenberg(ch)?;
    let sp = ch.space();
    check_unital(&ch.apply(&identity(sp.dim()))?)?;
    let (da, db) = (sp.d_a(), sp.d_b());
    let rho = ch.choi();
    // Choi factors ordered (A, B, A', B'): output first, reference second
    let dims = [da, db, da, db];
    let no_bp = partial_trace(&rho, &dims, &[true, true, true, false])?;
    let no_bbp = partial_trace(&rho, &dims, &[true, false, true, false])?;
    let g1 = db as f64 * hs_norm2_sq(&no_bp);
    let g2 = hs_norm2_sq(&no_bbp);

    // Ẽ(X) = E(X ⊗ I/d_B) from A to AB; T(Y) = Tr_B(Y) ⊗ I/d_B
    let id_b = identity(db);
    let mut rho_tilde = CMatrix::zeros(da * db * da, da * db * da);
    let mut rho_twirl = CMatrix::zeros(da * db * da, da * db * da);
    for i in 0..da {
        for j in 0..da {
            let eij = matrix_unit(da, i, j);
            let y = ch.apply(&kron(&eij, &id_b.unscale(db as f64)))?;
            let twirled = kron(&trace_out_b(&y, &sp), &id_b.unscale(db as f64));
            rho_tilde += kron(&y, &eij);
            rho_twirl += kron(&twirled, &eij);
        }
    }
    let distance = db as f64 * hs_norm2_sq(&(rho_tilde - rho_twirl)) / (da * da) as f64;
    Ok(ChoiOtoc { value: OtocValue::split(g1, g2, Method::Choi), distance_form: distance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyDecomposition {
    pub g_scra: f64,
    pub g_dec: f64,
    pub g: f64,
    pub n_a: f64,
    pub s_l_min: f64,
    pub n_samples: usize,
    pub std_err: f64,
    pub std_err_scra: f64,
    pub std_err_dec: f64,
    /// Smallest per-sample value of `S_L(Ẽ(ψ)) − S_L^min`.
    pub min_excess_entropy: f64,
    /// Largest per-sample value of `S_L(Ẽ(ψ)) − S_L^min`.
    pub max_excess_entropy: f64,
}

/// `Ẽ(ψ) = E(|ψ⟩⟨ψ| ⊗ I/d_B)`.
fn reduced_input_image(ch: &Channel, psi: &CVector) -> Result<CMatrix> {
    let db = ch.space().d_b();
    ch.apply(&kron(&projector(psi), &identity(db).unscale(db as f64)))
}

/// Haar-state estimator of the entropy decomposition
/// `G = N_A E_ψ[S_L(Tr_B Ẽ(ψ)) − d_B (S_L(Ẽ(ψ)) − S_L^min)]`.
pub fn g_entropy_mc(ch: &Channel, n_samples: usize, seed: u64) -> Result<EntropyDecomposition> {
    require_heisenberg(ch)?;
    if n_samples < 2 {
        return Err(OtocError::InvalidArgument("need at least 2 samples".into()));
    }
    let sp = ch.space();
    check_unital(&ch.apply(&identity(sp.dim()))?)?;
    let (da, db) = (sp.d_a(), sp.d_b());
    let n_a = (da as f64 + 1.0) / da as f64;
    let s_min = 1.0 - 1.0 / db as f64;
    let samples = sample_chunked(n_samples, seed, |rng: &mut OtocRng| {
        let psi = haar_state(da, rng);
        let rho = reduced_input_image(ch, &psi).expect("dimensions checked");
        (linear_entropy(&trace_out_b(&rho, &sp)), linear_entropy(&rho) - s_min)
    });
    let scra: Vec<f64> = samples.iter().map(|s| n_a * s.0).collect();
    let dec: Vec<f64> = samples.iter().map(|s| n_a * db as f64 * s.1).collect();
    let both: Vec<f64> = scra.iter().zip(&dec).map(|(a, b)| a - b).collect();
    let (g_scra, se_scra) = mean_and_se(&scra);
    let (g_dec, se_dec) = mean_and_se(&dec);
    let (g, se) = mean_and_se(&both);
    Ok(EntropyDecomposition {
        g_scra,
        g_dec,
        g,
        n_a,
        s_l_min: s_min,
        n_samples,
        std_err: se,
        std_err_scra: se_scra,
        std_err_dec: se_dec,
        min_excess_entropy: samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        max_excess_entropy: samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Unbiased estimator `(1/2d) E_{V_A, W_B} ‖[E(V_A), W_B]‖₂²` over Haar pairs.
pub fn g_commutator_mc(ch: &Channel, n_pairs: usize, seed: u64) -> Result<OtocValue> {
    require_heisenberg(ch)?;
    if n_pairs < 2 {
        return Err(OtocError::InvalidArgument("need at least 2 pairs".into()));
    }
    let sp = ch.space();
    let (da, db, d) = (sp.d_a(), sp.d_b(), sp.dim());
    let id_a = identity(da);
    let id_b = identity(db);
    let samples = sample_chunked(n_pairs, seed, |rng: &mut OtocRng| {
        let v = kron(&haar_unitary(da, rng), &id_b);
        let w = kron(&id_a, &haar_unitary(db, rng));
        let ev = ch.apply(&v).expect("dimensions checked");
        hs_norm2_sq(&(&ev * &w - &w * &ev)) / (2.0 * d as f64)
    });
    let (g, se) = mean_and_se(&samples);
    Ok(OtocValue::sampled(g, se, n_pairs, Method::CommutatorMc))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub epsilon: f64,
    pub n_samples: usize,
    pub center: f64,
    pub tail: f64,
    pub bound: f64,
    pub binomial_se: f64,
    pub within_bound: bool,
}

/// Empirical `P(|S_L(Tr_B Ẽ(ψ)) − d_A/(d_A+1) G| > ε)` for a unitary channel,
/// compared with `exp(−d_A ε²/64)`.
pub fn concentration_experiment(
    ch: &Channel,
    n_samples: usize,
    epsilon: f64,
    seed: u64,
) -> Result<ConcentrationReport> {
    require_heisenberg(ch)?;
    let u = match ch.representation() {
        Representation::Kraus(ops) if ops.len() == 1 => ops[0].clone(),
        _ => {
            return Err(OtocError::InvalidArgument(
                "concentration bound is stated for unitary channels (single Kraus operator)".into(),
            ))
        }
    };
    let sp = ch.space();
    let (da, db) = (sp.d_a(), sp.d_b());
    let g = g_closed(&sp, &u)?.g;
    let center = da as f64 / (da as f64 + 1.0) * g;
    let hits = sample_chunked(n_samples, seed, |rng: &mut OtocRng| {
        let psi = haar_state(da, rng);
        // U(ψ ⊗ I/d_B)U† = (1/d_B) Σ_b |u_b⟩⟨u_b| with u_b = U|ψ⟩|b⟩
        let mut reduced = CMatrix::zeros(da, da);
        for b in 0..db {
            let mut input = CVector::zeros(sp.dim());
            for a in 0..da {
                input[a * db + b] = psi[a];
            }
            let out = &u * input;
            let m = CMatrix::from_fn(da, db, |a, c| out[a * db + c]);
            reduced += &m * m.adjoint();
        }
        let s = linear_entropy(&reduced.unscale(db as f64));
        if (s - center).abs() > epsilon { 1.0 } else { 0.0 }
    });
    let tail = pairwise_sum(&hits) / n_samples as f64;
    let bound = (-(da as f64) * epsilon * epsilon / 64.0).exp();
    let se = binomial_se(tail, n_samples);
    Ok(ConcentrationReport {
        epsilon,
        n_samples,
        center,
        tail,
        bound,
        binomial_se: se,
        within_bound: tail <= bound + 3.0 * se,
    })
}

/// `E_op(U) = 1 − Tr σ²` with `σ = Ψ Ψ†` and `Ψ[(a,a'),(b,b')] = U_{ab,a'b'} / √d`.
pub fn operator_entanglement(space: &BipartiteSpace, u: &CMatrix) -> Result<f64> {
    space.check_operator(u)?;
    let (da, db, d) = (space.d_a(), space.d_b(), space.dim());
    let scale = 1.0 / (d as f64).sqrt();
    let psi = CMatrix::from_fn(da * da, db * db, |r, c| {
        let (a, a2) = (r / da, r % da);
        let (b, b2) = (c / db, c % db);
        u[(a * db + b, a2 * db + b2)] * scale
    });
    let sigma = &psi * psi.adjoint();
    Ok(1.0 - hs_norm2_sq(&sigma))
}

/// `e_p(U) = (n/(n+1))² [E_op(U) + E_op(U S) − E_op(S)]` for `d_A = d_B = n`.
pub fn entangling_power(space: &BipartiteSpace, u: &CMatrix) -> Result<f64> {
    let n = space.d_a();
    if n != space.d_b() {
        return Err(OtocError::InvalidArgument("entangling power needs d_A = d_B".into()));
    }
    let s = crate::linalg::swap_within(space)?;
    let pre = (n as f64 / (n as f64 + 1.0)).powi(2);
    Ok(pre
        * (operator_entanglement(space, u)? + operator_entanglement(space, &(u * &s))?
            - operator_entanglement(space, &s)?))
}

/// Product-state average of `S_L(Tr_B U|ψ_A⟩|φ_B⟩)`; returns (mean, standard error).
pub fn entangling_power_mc(space: &BipartiteSpace, u: &CMatrix, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    space.check_operator(u)?;
    let (da, db) = (space.d_a(), space.d_b());
    let samples = sample_chunked(n_samples, seed, |rng: &mut OtocRng| {
        let psi = haar_state(da, rng);
        let phi = haar_state(db, rng);
        let out = u * psi.kronecker(&phi);
        let m = CMatrix::from_fn(da, db, |a, b| out[a * db + b]);
        linear_entropy(&(&m * m.adjoint()))
    });
    Ok(mean_and_se(&samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarReport {
    pub d_a: usize,
    pub d_b: usize,
    pub n_samples: usize,
    /// `‖E[(A†⊗I_B) ⊗ (A⊗I_B)] − S_AA'/d_A‖₂` on the doubled space.
    pub unitary_deviation: f64,
    /// `‖E[ψ⊗ψ] − (I + S_AA')/(d_A(d_A+1))‖₂` on `H_A ⊗ H_A'`.
    pub state_deviation: f64,
}

/// Empirical check of the Haar moment identities used throughout the proofs.
pub fn haar_identity_checks(d_a: usize, d_b: usize, n: usize, seed: u64) -> Result<HaarReport> {
    if n < 100 {
        return Err(OtocError::InvalidArgument("need at least 100 samples".into()));
    }
    let sp = BipartiteSpace::new(d_a, d_b)?;
    let id_b = identity(d_b);
    // Sum within chunks, then across chunks in order: deterministic.
    let n_chunks = n.div_ceil(CHUNK);
    let partial: Vec<(CMatrix, CMatrix)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut su = CMatrix::zeros(sp.dim() * sp.dim(), sp.dim() * sp.dim());
            let mut ss = CMatrix::zeros(d_a * d_a, d_a * d_a);
            for _ in 0..len {
                let a = haar_unitary(d_a, &mut rng);
                su += kron(&kron(&a.adjoint(), &id_b), &kron(&a, &id_b));
                let p = projector(&haar_state(d_a, &mut rng));
                ss += kron(&p, &p);
            }
            (su, ss)
        })
        .collect();
    let (mut su, mut ss) = (
        CMatrix::zeros(sp.dim() * sp.dim(), sp.dim() * sp.dim()),
        CMatrix::zeros(d_a * d_a, d_a * d_a),
    );
    for (a, b) in partial {
        su += a;
        ss += b;
    }
    let nf = n as f64;
    let target_u = swap_aa(&sp).data.unscale(d_a as f64);
    let s_a = swap_aa(&BipartiteSpace::new(d_a, 1)?).data;
    let target_s = (identity(d_a * d_a) + s_a).unscale((d_a * (d_a + 1)) as f64);
    Ok(HaarReport {
        d_a,
        d_b,
        n_samples: n,
        unitary_deviation: (su.unscale(nf) - target_u).norm(),
        state_deviation: (ss.unscale(nf) - target_s).norm(),
    })
}
