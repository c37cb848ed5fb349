//! Open spin-1/2 chains with boundary dissipation.
//!
//! Every operator used here (Pauli strings, σ±, sums with common flip
//! pattern) is a *monomial*: `(M x)[r] = coef[r] · x[r ^ mask]`. Products of
//! monomials are monomials, so the Heisenberg generator can be applied to a
//! vectorized `d × d` operator in `O(terms · d²)` without any dense `d² × d²`
//! matrix. Site 1 is the most significant bit; `σ⁺ = |0⟩⟨1|`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OtocError, Result};
use crate::lindblad::{check_grid, LindbladGenerator};
use crate::linalg::{hermitian_eigh, BipartiteSpace, CMatrix, C64, ZERO};
use crate::otoc::{g_closed, Method, OtocValue};
use crate::propagate::{Evolution, Integrator, LinearGenerator};
use crate::record::OtocRecord;
use crate::stats::pairwise_sum;

pub const MAX_SITES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub mask: usize,
    pub coef: Vec<C64>,
}

impl Monomial {
    pub fn identity(d: usize) -> Self {
        Self { mask: 0, coef: vec![C64::new(1.0, 0.0); d] }
    }

    pub fn dim(&self) -> usize {
        self.coef.len()
    }

    /// `self · other`.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let coef = (0..self.dim()).map(|r| self.coef[r] * other.coef[r ^ self.mask]).collect();
        Monomial { mask: self.mask ^ other.mask, coef }
    }

    pub fn adjoint(&self) -> Monomial {
        let coef = (0..self.dim()).map(|r| self.coef[r ^ self.mask].conj()).collect();
        Monomial { mask: self.mask, coef }
    }

    pub fn scale(&self, s: C64) -> Monomial {
        Monomial { mask: self.mask, coef: self.coef.iter().map(|c| c * s).collect() }
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for r in 0..d {
            m[(r, r ^ self.mask)] += self.coef[r];
        }
        m
    }

    fn is_zero(&self) -> bool {
        self.coef.iter().all(|c| c.norm() == 0.0)
    }
}

/// Sum of monomials with distinct masks.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialSum {
    dim: usize,
    terms: BTreeMap<usize, Vec<C64>>,
}

impl MonomialSum {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn add(&mut self, m: &Monomial) {
        let entry = self.terms.entry(m.mask).or_insert_with(|| vec![ZERO; self.dim]);
        for (e, c) in entry.iter_mut().zip(&m.coef) {
            *e += c;
        }
    }

    pub fn terms(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(&mask, coef)| Monomial { mask, coef: coef.clone() })
            .filter(|m| !m.is_zero())
            .collect()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for t in self.terms() {
            m += t.to_dense();
        }
        m
    }
}

fn bit(l: usize, site: usize) -> usize {
    1 << (l - site)
}

/// Single-site operators on an `l`-site chain; `site` is 1-based.
pub mod site {
    use super::*;

    pub fn x(l: usize, site: usize) -> Monomial {
        Monomial { mask: bit(l, site), coef: vec![C64::new(1.0, 0.0); 1 << l] }
    }

    pub fn y(l: usize, site: usize) -> Monomial {
        let b = bit(l, site);
        let coef = (0..1usize << l).map(|r| if r & b == 0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) }).collect();
        Monomial { mask: b, coef }
    }

    pub fn z(l: usize, site: usize) -> Monomial {
        let b = bit(l, site);
        let coef = (0..1usize << l).map(|r| C64::new(if r & b == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        Monomial { mask: 0, coef }
    }

    /// `σ⁺ = |0⟩⟨1|`.
    pub fn plus(l: usize, site: usize) -> Monomial {
        let b = bit(l, site);
        let coef = (0..1usize << l).map(|r| C64::new(if r & b == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
        Monomial { mask: b, coef }
    }

    /// `σ⁻ = |1⟩⟨0|`.
    pub fn minus(l: usize, site: usize) -> Monomial {
        let b = bit(l, site);
        let coef = (0..1usize << l).map(|r| C64::new(if r & b == 0 { 0.0 } else { 1.0 }, 0.0)).collect();
        Monomial { mask: b, coef }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    /// `−Σ_j (Z_j Z_{j+1} + g X_j + h Z_j)`.
    Tfim { g: f64, h: f64 },
    /// `J Σ (XX + YY + Δ ZZ)_{j,j+1} + J' Σ (XX + YY + Δ' ZZ)_{j,j+2}`.
    XxzNnn { j: f64, delta: f64, j2: f64, delta2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainModel {
    sites: usize,
    kind: ModelKind,
}

impl SpinChainModel {
    pub fn new(sites: usize, kind: ModelKind) -> Result<Self> {
        if sites < 2 {
            return Err(OtocError::InvalidArgument(format!("chain needs at least 2 sites, got {sites}")));
        }
        if sites > MAX_SITES {
            return Err(OtocError::InvalidArgument(format!("chains longer than {MAX_SITES} sites are not supported")));
        }
        let params: Vec<f64> = match kind {
            ModelKind::Tfim { g, h } => vec![g, h],
            ModelKind::XxzNnn { j, delta, j2, delta2 } => {
                if j2 != 0.0 && sites < 3 {
                    return Err(OtocError::InvalidArgument("next-nearest coupling needs at least 3 sites".into()));
                }
                vec![j, delta, j2, delta2]
            }
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(OtocError::InvalidArgument("model parameters must be finite".into()));
        }
        Ok(Self { sites, kind })
    }

    pub fn tfim(sites: usize, g: f64, h: f64) -> Result<Self> {
        Self::new(sites, ModelKind::Tfim { g, h })
    }

    pub fn xxz_nnn(sites: usize, j: f64, delta: f64, j2: f64, delta2: f64) -> Result<Self> {
        Self::new(sites, ModelKind::XxzNnn { j, delta, j2, delta2 })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn hamiltonian_terms(&self) -> MonomialSum {
        let l = self.sites;
        let mut h = MonomialSum::zero(self.dim());
        let re = |x: f64| C64::new(x, 0.0);
        let heis = |h: &mut MonomialSum, a: usize, b: usize, c: f64, anis: f64| {
            h.add(&site::x(l, a).mul(&site::x(l, b)).scale(re(c)));
            h.add(&site::y(l, a).mul(&site::y(l, b)).scale(re(c)));
            h.add(&site::z(l, a).mul(&site::z(l, b)).scale(re(c * anis)));
        };
        match self.kind {
            ModelKind::Tfim { g, h: hz } => {
                for j in 1..l {
                    h.add(&site::z(l, j).mul(&site::z(l, j + 1)).scale(re(-1.0)));
                }
                for j in 1..=l {
                    h.add(&site::x(l, j).scale(re(-g)));
                    h.add(&site::z(l, j).scale(re(-hz)));
                }
            }
            ModelKind::XxzNnn { j, delta, j2, delta2 } => {
                for s in 1..l {
                    heis(&mut h, s, s + 1, j, delta);
                }
                if j2 != 0.0 {
                    for s in 1..l - 1 {
                        heis(&mut h, s, s + 2, j2, delta2);
                    }
                }
            }
        }
        h
    }

    pub fn hamiltonian(&self) -> CMatrix {
        self.hamiltonian_terms().to_dense()
    }
}

/// Boundary amplitude damping (`√α σ±` on sites 1 and L) and boundary
/// dephasing (`√γ σᶻ` on sites 1 and L).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSpec {
    pub alpha: f64,
    pub gamma: f64,
}

impl DissipationSpec {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        let spec = Self { alpha, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn closed() -> Self {
        Self { alpha: 0.0, gamma: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(OtocError::InvalidArgument(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.alpha == 0.0 && self.gamma == 0.0
    }

    pub fn jumps(&self, sites: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        let ends = [1, sites];
        if self.alpha > 0.0 {
            let s = C64::new(self.alpha.sqrt(), 0.0);
            for &j in &ends {
                out.push(site::plus(sites, j).scale(s));
                out.push(site::minus(sites, j).scale(s));
            }
        }
        if self.gamma > 0.0 {
            let s = C64::new(self.gamma.sqrt(), 0.0);
            for &j in &ends {
                out.push(site::z(sites, j).scale(s));
            }
        }
        out
    }
}

/// `A = first c sites`, `B = the rest`.
pub fn cut_space(model: &SpinChainModel, cut: usize) -> Result<BipartiteSpace> {
    if cut == 0 || cut >= model.sites {
        return Err(OtocError::InvalidArgument(format!("cut must satisfy 1 <= c < L = {}, got {cut}", model.sites)));
    }
    BipartiteSpace::new(1 << cut, 1 << (model.sites - cut))
}

/// Dense GKSL generator for small chains.
pub fn build_generator(model: &SpinChainModel, dissipation: &DissipationSpec, cut: usize) -> Result<LindbladGenerator> {
    dissipation.validate()?;
    let space = cut_space(model, cut)?;
    let jumps = dissipation.jumps(model.sites).iter().map(Monomial::to_dense).collect();
    LindbladGenerator::new(space, model.hamiltonian(), jumps)
}

/// Matrix-free Heisenberg generator
/// `L(X) = P X + X P† + Σ_j L_j† X L_j`, `P = iH − ½ Σ_j L_j† L_j`,
/// acting on column-stacked `d × d` operators.
#[derive(Debug, Clone)]
pub struct ChainGenerator {
    d: usize,
    left: Vec<Monomial>,
    right: Vec<Monomial>,
    sandwich: Vec<(Monomial, Monomial)>,
}

impl ChainGenerator {
    pub fn new(model: &SpinChainModel, dissipation: &DissipationSpec) -> Result<Self> {
        dissipation.validate()?;
        let d = model.dim();
        let mut p = MonomialSum::zero(d);
        for t in model.hamiltonian_terms().terms() {
            p.add(&t.scale(C64::new(0.0, 1.0)));
        }
        let jumps = dissipation.jumps(model.sites);
        for l in &jumps {
            p.add(&l.adjoint().mul(l).scale(C64::new(-0.5, 0.0)));
        }
        let left = p.terms();
        let right = left.iter().map(Monomial::adjoint).collect();
        let sandwich = jumps.iter().map(|l| (l.adjoint(), l.clone())).collect();
        Ok(Self { d, left, right, sandwich })
    }

    pub fn operator_dim(&self) -> usize {
        self.d
    }
}

impl LinearGenerator for ChainGenerator {
    fn dim(&self) -> usize {
        self.d * self.d
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let d = self.d;
        out.fill(ZERO);
        for c in 0..d {
            let oc = &mut out[c * d..(c + 1) * d];
            let xc = &x[c * d..(c + 1) * d];
            for m in &self.left {
                for r in 0..d {
                    oc[r] += m.coef[r] * xc[r ^ m.mask];
                }
            }
            for m in &self.right {
                let src = c ^ m.mask;
                let w = m.coef[src];
                if w == ZERO {
                    continue;
                }
                let xs = &x[src * d..(src + 1) * d];
                for r in 0..d {
                    oc[r] += xs[r] * w;
                }
            }
            for (a, b) in &self.sandwich {
                let src = c ^ b.mask;
                let w = b.coef[src];
                if w == ZERO {
                    continue;
                }
                let xs = &x[src * d..(src + 1) * d];
                for r in 0..d {
                    oc[r] += a.coef[r] * xs[r ^ a.mask] * w;
                }
            }
        }
    }
}

/// `G(E_t)` on a time grid via the images `E_t(|i⟩⟨j| ⊗ I_B)`, `i ≤ j`
/// (the rest follow from `Y_ji = Y_ij†`).
pub fn otoc_timeseries(
    model: &SpinChainModel,
    dissipation: &DissipationSpec,
    cut: usize,
    times: &[f64],
    integrator: Integrator,
) -> Result<Vec<OtocRecord>> {
    check_grid(times)?;
    let space = cut_space(model, cut)?;
    let gen = ChainGenerator::new(model, dissipation)?;
    let (da, db, d) = (space.d_a(), space.d_b(), space.dim());
    let pairs: Vec<(usize, usize)> = (0..da).flat_map(|i| (i..da).map(move |j| (i, j))).collect();
    // per pair, per time: (‖Y‖², ‖Tr_B Y‖², Y restricted to the diagonal for the unitality check)
    let series: Vec<Vec<(f64, f64, Vec<C64>)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut x = vec![ZERO; d * d];
            for b in 0..db {
                x[(j * db + b) * d + (i * db + b)] = C64::new(1.0, 0.0);
            }
            let mut evo = Evolution::new(&gen, x, integrator)?;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                evo.advance_to(t)?;
                let y = evo.state();
                let n1: f64 = y.iter().map(|z| z.norm_sqr()).sum();
                let mut n2 = 0.0;
                for a in 0..da {
                    for a2 in 0..da {
                        let mut z = ZERO;
                        for b in 0..db {
                            z += y[(a2 * db + b) * d + (a * db + b)];
                        }
                        n2 += z.norm_sqr();
                    }
                }
                let diag = if i == j { y.to_vec() } else { Vec::new() };
                out.push((n1, n2, diag));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let d2 = (d * d) as f64;
    let mut records = Vec::with_capacity(times.len());
    for (ti, &t) in times.iter().enumerate() {
        let mut t1 = Vec::with_capacity(pairs.len());
        let mut t2 = Vec::with_capacity(pairs.len());
        let mut e_id = vec![ZERO; d * d];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let w = if i == j { 1.0 } else { 2.0 };
            let (n1, n2, diag) = &series[p][ti];
            t1.push(w * n1);
            t2.push(w * n2);
            for (e, y) in e_id.iter_mut().zip(diag) {
                *e += y;
            }
        }
        let mut defect = 0.0;
        for c in 0..d {
            for r in 0..d {
                let target = if r == c { 1.0 } else { 0.0 };
                defect += (e_id[c * d + r] - C64::new(target, 0.0)).norm_sqr();
            }
        }
        let defect = defect.sqrt();
        if defect > crate::otoc::UNITAL_TOL * (d as f64).sqrt() {
            return Err(OtocError::NonConvergence { t, reason: format!("evolved identity drifted by {defect:.3e}") });
        }
        let g1 = db as f64 * pairwise_sum(&t1) / d2;
        let g2 = pairwise_sum(&t2) / d2;
        let mut rec = OtocRecord::new(t, g1 - g2, Method::Exact);
        rec.g1 = Some(g1);
        rec.g2 = Some(g2);
        records.push(rec);
    }
    Ok(records)
}

/// Closed-system reference: `g_closed(e^{−iHt})` from one diagonalization.
pub fn closed_timeseries(model: &SpinChainModel, cut: usize, times: &[f64]) -> Result<Vec<OtocRecord>> {
    check_grid(times)?;
    let space = cut_space(model, cut)?;
    let (evals, v) = hermitian_eigh(&model.hamiltonian());
    let vals: Vec<OtocValue> = times
        .par_iter()
        .map(|&t| {
            let phases = crate::linalg::CVector::from_iterator(evals.len(), evals.iter().map(|e| C64::new(0.0, -e * t).exp()));
            let u = &v * CMatrix::from_diagonal(&phases) * v.adjoint();
            g_closed(&space, &u)
        })
        .collect::<Result<_>>()?;
    Ok(times.iter().zip(&vals).map(|(&t, v)| OtocRecord::from_value(t, v, None)).collect())
}

/// `n` uniform points on `[t0, t1]`.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(t1 > t0) || t0 < 0.0 || !t1.is_finite() {
        return Err(OtocError::InvalidArgument(format!("bad time grid [{t0}, {t1}] with {n} points")));
    }
    Ok((0..n).map(|k| if k == n - 1 { t1 } else { t0 + (t1 - t0) * k as f64 / (n - 1) as f64 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Picture;
    use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, identity, kron, pauli, vec_col};
    use crate::otoc::g_exact;
    use crate::random::{ginibre, rng_for};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn site_operators_match_kron_products() {
        let l = 3;
        let id = identity(2);
        let embed = |op: CMatrix, s: usize| -> CMatrix {
            let mut m = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
            for k in 1..=l {
                m = kron(&m, if k == s { &op } else { &id });
            }
            m
        };
        for s in 1..=l {
            assert_eq!(site::x(l, s).to_dense(), embed(pauli::x(), s));
            assert_eq!(site::y(l, s).to_dense(), embed(pauli::y(), s));
            assert_eq!(site::z(l, s).to_dense(), embed(pauli::z(), s));
            assert_eq!(site::plus(l, s).to_dense(), embed(pauli::plus(), s));
            assert_eq!(site::minus(l, s).to_dense(), embed(pauli::minus(), s));
        }
    }

    #[test]
    fn monomial_algebra_matches_dense() {
        let l = 3;
        let a = site::y(l, 1).mul(&site::plus(l, 3)).scale(C64::new(0.3, -0.7));
        let b = site::minus(l, 2).mul(&site::z(l, 1));
        assert_eq!(a.mul(&b).to_dense(), a.to_dense() * b.to_dense());
        assert_eq!(a.adjoint().to_dense(), a.to_dense().adjoint());
    }

    #[test]
    fn small_hamiltonian_spectra() {
        let tfim = SpinChainModel::tfim(2, 0.0, 0.0).unwrap();
        assert!(close(&hermitian_eigenvalues(&tfim.hamiltonian()), &[-1.0, -1.0, 1.0, 1.0], 1e-12));
        assert_eq!(tfim.hamiltonian(), kron(&pauli::z(), &pauli::z()).scale(-1.0));
        let xxz = SpinChainModel::xxz_nnn(2, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(close(&hermitian_eigenvalues(&xxz.hamiltonian()), &[-2.0, 0.0, 0.0, 2.0], 1e-12));
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        for m in [
            SpinChainModel::tfim(5, -1.05, 0.5).unwrap(),
            SpinChainModel::xxz_nnn(5, 1.0, 0.5, 0.4, 1.3).unwrap(),
        ] {
            assert!(hermiticity_defect(&m.hamiltonian()) < 1e-12);
        }
    }

    #[test]
    fn tfim_terms_by_hand() {
        let (g, h) = (0.7, -0.2);
        let m = SpinChainModel::tfim(3, g, h).unwrap();
        let (x, z, id) = (pauli::x(), pauli::z(), identity(2));
        let k3 = |a: &CMatrix, b: &CMatrix, c: &CMatrix| kron(&kron(a, b), c);
        let mut expect = k3(&z, &z, &id) + k3(&id, &z, &z);
        for s in 0..3 {
            let ops: Vec<&CMatrix> = (0..3).map(|k| if k == s { &x } else { &id }).collect();
            expect += k3(ops[0], ops[1], ops[2]).scale(g);
            let ops: Vec<&CMatrix> = (0..3).map(|k| if k == s { &z } else { &id }).collect();
            expect += k3(ops[0], ops[1], ops[2]).scale(h);
        }
        assert!((m.hamiltonian() + expect).norm() < 1e-13);
    }

    #[test]
    fn model_validation() {
        assert!(SpinChainModel::tfim(1, 1.0, 0.0).is_err());
        assert!(SpinChainModel::xxz_nnn(2, 1.0, 0.0, 0.5, 0.0).is_err());
        assert!(SpinChainModel::tfim(9, 1.0, 0.0).is_err());
        assert!(SpinChainModel::tfim(3, f64::NAN, 0.0).is_err());
        assert!(DissipationSpec::new(-0.1, 0.0).is_err());
        let m = SpinChainModel::tfim(3, 1.0, 0.0).unwrap();
        assert!(cut_space(&m, 0).is_err() && cut_space(&m, 3).is_err());
    }

    #[test]
    fn jump_set_drops_zero_rates() {
        assert_eq!(DissipationSpec::new(0.0, 0.0).unwrap().jumps(4).len(), 0);
        assert_eq!(DissipationSpec::new(0.1, 0.0).unwrap().jumps(4).len(), 4);
        assert_eq!(DissipationSpec::new(0.0, 0.1).unwrap().jumps(4).len(), 2);
        assert_eq!(DissipationSpec::new(0.1, 0.1).unwrap().jumps(4).len(), 6);
    }

    #[test]
    fn matrix_free_generator_matches_dense() {
        let m = SpinChainModel::xxz_nnn(3, 1.0, 0.5, 0.3, 0.7).unwrap();
        let diss = DissipationSpec::new(0.2, 0.1).unwrap();
        let dense = build_generator(&m, &diss, 1).unwrap().heisenberg_liouville();
        let fast = ChainGenerator::new(&m, &diss).unwrap();
        let mut rng = rng_for(1, 0);
        let x = vec_col(&ginibre(8, 8, &mut rng));
        let mut out = vec![ZERO; 64];
        fast.apply(x.as_slice(), &mut out);
        let expect = dense * x;
        let err: f64 = out.iter().zip(expect.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn timeseries_matches_dense_channels() {
        let m = SpinChainModel::tfim(3, -1.05, 0.5).unwrap();
        let diss = DissipationSpec::new(0.05, 0.02).unwrap();
        let times = [0.0, 0.5, 2.0, 5.0];
        let recs = otoc_timeseries(&m, &diss, 1, &times, Integrator::default()).unwrap();
        let gen = build_generator(&m, &diss, 1).unwrap();
        let chans = gen.channels_on_grid(&times, Picture::Heisenberg, Integrator::default()).unwrap();
        for (r, ch) in recs.iter().zip(&chans) {
            let v = g_exact(ch).unwrap();
            assert!((r.g - v.g).abs() < 1e-8);
            assert!((r.g1.unwrap() - v.g1.unwrap()).abs() < 1e-8);
        }
        assert_eq!(recs[0].g, 0.0);
        assert_eq!(recs[0].g1, Some(1.0));
    }

    #[test]
    fn closed_series_matches_propagation() {
        let m = SpinChainModel::tfim(4, -1.05, 0.5).unwrap();
        let times = uniform_grid(0.0, 6.0, 13).unwrap();
        let a = otoc_timeseries(&m, &DissipationSpec::closed(), 1, &times, Integrator::taylor()).unwrap();
        let b = closed_timeseries(&m, 1, &times).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.g - y.g).abs() < 1e-9, "t {}: {} vs {}", x.t, x.g, y.g);
            assert!((x.g1.unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dissipative_channel_is_cp_unital_not_unitary() {
        let m = SpinChainModel::tfim(3, -1.05, 0.5).unwrap();
        let gen = build_generator(&m, &DissipationSpec::new(0.05, 0.0).unwrap(), 1).unwrap();
        let ch = gen.channel_at_time(5.0, Picture::Heisenberg, Integrator::taylor()).unwrap();
        assert!(ch.is_cp() && ch.is_unital());
        assert!(!ch.is_unitary_via_swap_commutant().unwrap());
        let closed = build_generator(&SpinChainModel::tfim(2, 1.0, 0.3).unwrap(), &DissipationSpec::closed(), 1).unwrap();
        let u = closed.channel_at_time(1.7, Picture::Heisenberg, Integrator::default()).unwrap();
        assert!(u.is_unitary_via_swap_commutant().unwrap());
        let id = closed.channel_at_time(0.0, Picture::Heisenberg, Integrator::default()).unwrap();
        assert!((id.liouville() - identity(16)).norm() < 1e-14);
    }

    #[test]
    fn semigroup_property() {
        let m = SpinChainModel::xxz_nnn(3, 1.0, 0.5, 0.0, 0.0).unwrap();
        let gen = build_generator(&m, &DissipationSpec::new(0.1, 0.1).unwrap(), 1).unwrap();
        let at = |t| gen.channel_at_time(t, Picture::Heisenberg, Integrator::default()).unwrap();
        let (s, t) = (0.4, 1.3);
        let lhs = at(s + t).liouville();
        let rhs = at(s).compose(&at(t)).unwrap().liouville();
        assert!((lhs - rhs).norm() < 1e-7);
    }

    #[test]
    fn evolved_hermitian_operator_stays_hermitian() {
        let m = SpinChainModel::tfim(4, -1.05, 0.5).unwrap();
        let gen = ChainGenerator::new(&m, &DissipationSpec::new(0.05, 0.05).unwrap()).unwrap();
        let x = site::x(4, 2).to_dense() + site::z(4, 3).to_dense();
        let mut evo = Evolution::new(&gen, vec_col(&x).as_slice().to_vec(), Integrator::default()).unwrap();
        evo.advance_to(3.0).unwrap();
        let y = CMatrix::from_column_slice(16, 16, evo.state());
        assert!(hermiticity_defect(&y) < 1e-9);
    }

    #[test]
    fn grid_helper() {
        let g = uniform_grid(0.0, 30.0, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[199], 30.0);
        assert!(uniform_grid(1.0, 0.0, 10).is_err());
    }
}
