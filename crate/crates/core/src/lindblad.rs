//! Dense GKSL generators.
//!
//! Heisenberg-picture generator acting on observables:
//!
//! ```text
//! L(X) = i[H, X] + Σ_j (L_j† X L_j − ½{L_j† L_j, X})
//! ```
//!
//! Its column-stacked matrix is
//! `i(I⊗H − Hᵀ⊗I) + Σ_j (L_jᵀ⊗L_j† − ½ I⊗L_j†L_j − ½ (L_j†L_j)ᵀ⊗I)`,
//! and the Schrödinger-picture matrix is its adjoint.

use rayon::prelude::*;

use crate::channel::{Channel, Picture};
use crate::error::{OtocError, Result};
use crate::linalg::{hermiticity_defect, identity, kron, vec_col, BipartiteSpace, CMatrix, CVector, C64, I};
use crate::propagate::{Evolution, Integrator};

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    space: BipartiteSpace,
    h: CMatrix,
    jumps: Vec<CMatrix>,
}

impl LindbladGenerator {
    pub fn new(space: BipartiteSpace, h: CMatrix, jumps: Vec<CMatrix>) -> Result<Self> {
        space.check_operator(&h)?;
        let defect = hermiticity_defect(&h);
        if defect > 1e-12 * h.norm().max(1.0) {
            return Err(OtocError::InvalidArgument(format!(
                "Hamiltonian is not Hermitian (defect {defect:.3e})"
            )));
        }
        for l in &jumps {
            space.check_operator(l)?;
        }
        Ok(Self { space, h, jumps })
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    pub fn jumps(&self) -> &[CMatrix] {
        &self.jumps
    }

    pub fn heisenberg_liouville(&self) -> CMatrix {
        let d = self.space.dim();
        let id = identity(d);
        let mut m = (kron(&id, &self.h) - kron(&self.h.transpose(), &id)) * I;
        for l in &self.jumps {
            let k = l.adjoint() * l;
            m += kron(&l.transpose(), &l.adjoint());
            m -= (kron(&id, &k) + kron(&k.transpose(), &id)).scale(0.5);
        }
        m
    }

    pub fn schrodinger_liouville(&self) -> CMatrix {
        self.heisenberg_liouville().adjoint()
    }

    pub fn liouville(&self, picture: Picture) -> CMatrix {
        match picture {
            Picture::Heisenberg => self.heisenberg_liouville(),
            Picture::Schrodinger => self.schrodinger_liouville(),
        }
    }

    /// `L(X)` in the Heisenberg picture, by direct matrix algebra.
    pub fn apply_heisenberg(&self, x: &CMatrix) -> Result<CMatrix> {
        self.space.check_operator(x)?;
        let mut out = (&self.h * x - x * &self.h) * I;
        for l in &self.jumps {
            let k = l.adjoint() * l;
            out += l.adjoint() * x * l - (&k * x + x * &k).scale(0.5);
        }
        Ok(out)
    }

    /// `e^{tL}` as a channel, built column by column by propagating the
    /// vectorized matrix units.
    pub fn channel_at_time(&self, t: f64, picture: Picture, integrator: Integrator) -> Result<Channel> {
        Ok(self.channels_on_grid(&[t], picture, integrator)?.pop().expect("one time point"))
    }

    /// Channels at each time of a nondecreasing grid starting at `t ≥ 0`.
    pub fn channels_on_grid(&self, times: &[f64], picture: Picture, integrator: Integrator) -> Result<Vec<Channel>> {
        check_grid(times)?;
        let d = self.space.dim();
        let gen = self.liouville(picture);
        let n = d * d;
        let columns: Vec<Vec<CVector>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[k] = C64::new(1.0, 0.0);
                let mut evo = Evolution::new(&gen, e, integrator)?;
                let mut out = Vec::with_capacity(times.len());
                for &t in times {
                    evo.advance_to(t)?;
                    out.push(CVector::from_column_slice(evo.state()));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        times
            .iter()
            .enumerate()
            .map(|(ti, _)| {
                let m = CMatrix::from_fn(n, n, |r, c| columns[c][ti][r]);
                Channel::from_liouville(self.space, m, picture)
            })
            .collect()
    }

    /// `e^{tL}(X)` in the given picture at each time of the grid.
    pub fn evolve(&self, x: &CMatrix, times: &[f64], picture: Picture, integrator: Integrator) -> Result<Vec<CMatrix>> {
        check_grid(times)?;
        self.space.check_operator(x)?;
        let d = self.space.dim();
        let gen = self.liouville(picture);
        let mut evo = Evolution::new(&gen, vec_col(x).as_slice().to_vec(), integrator)?;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            evo.advance_to(t)?;
            out.push(CMatrix::from_column_slice(d, d, evo.state()));
        }
        Ok(out)
    }
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(OtocError::InvalidArgument("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(OtocError::InvalidArgument("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(OtocError::InvalidArgument("time grid must be nondecreasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, pauli, unitary_from_hamiltonian};
    use crate::random::{ginibre, random_hermitian, rng_for};

    fn random_generator(seed: u64) -> LindbladGenerator {
        let mut rng = rng_for(seed, 0);
        let sp = BipartiteSpace::new(2, 2).unwrap();
        let h = random_hermitian(4, &mut rng);
        let jumps = (0..2).map(|_| ginibre(4, 4, &mut rng).scale(0.3)).collect();
        LindbladGenerator::new(sp, h, jumps).unwrap()
    }

    #[test]
    fn liouville_matches_direct_action() {
        let g = random_generator(1);
        let mut rng = rng_for(1, 1);
        let x = ginibre(4, 4, &mut rng);
        let via_matrix = g.heisenberg_liouville() * vec_col(&x);
        let direct = vec_col(&g.apply_heisenberg(&x).unwrap());
        assert!((via_matrix - direct).norm() < 1e-12);
    }

    #[test]
    fn heisenberg_unital_schrodinger_trace_preserving() {
        let g = random_generator(2);
        let id = vec_col(&identity(4));
        assert!((g.heisenberg_liouville() * &id).norm() < 1e-12);
        // ⟨⟨I| L_S = 0
        assert!((id.adjoint() * g.schrodinger_liouville()).norm() < 1e-12);
    }

    #[test]
    fn channel_matches_dense_exponential_and_is_valid() {
        let g = random_generator(3);
        let t = 0.7;
        let ch = g.channel_at_time(t, Picture::Heisenberg, Integrator::default()).unwrap();
        let exact = expm(&g.heisenberg_liouville().scale(t));
        assert!((ch.liouville() - exact).norm() < 1e-8);
        assert!(ch.is_cp() && ch.is_unital());
        let s = g.channel_at_time(t, Picture::Schrodinger, Integrator::default()).unwrap();
        assert!(s.is_trace_preserving());
        assert!((s.adjoint().choi() - ch.choi()).norm() < 1e-8);
    }

    #[test]
    fn closed_limit_is_unitary_conjugation() {
        let mut rng = rng_for(4, 0);
        let h = random_hermitian(4, &mut rng);
        let g = LindbladGenerator::new(BipartiteSpace::new(2, 2).unwrap(), h.clone(), vec![]).unwrap();
        let t = 1.3;
        let ch = g.channel_at_time(t, Picture::Heisenberg, Integrator::default()).unwrap();
        let u = unitary_from_hamiltonian(&h, t);
        // Heisenberg picture: X ↦ U† X U with U = e^{-iHt}
        let expect = Channel::unitary(g.space(), u.adjoint(), Picture::Heisenberg).unwrap();
        assert!((ch.liouville() - expect.liouville()).norm() < 1e-8);
    }

    #[test]
    fn qubit_dephasing_decay() {
        let gamma: f64 = 0.4;
        let sp = BipartiteSpace::plain(2).unwrap();
        let g = LindbladGenerator::new(sp, CMatrix::zeros(2, 2), vec![pauli::z().scale(gamma.sqrt())]).unwrap();
        let rho = CMatrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0));
        let out = g.evolve(&rho, &[0.0, 1.0, 2.5], Picture::Schrodinger, Integrator::default()).unwrap();
        for (t, r) in [0.0, 1.0, 2.5].iter().zip(&out) {
            assert!((r[(0, 1)].re - 0.5 * (-2.0 * gamma * t).exp()).abs() < 1e-9);
            assert!((r[(0, 0)].re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_raising_lowering_fixed_point() {
        let a: f64 = 0.3;
        let sp = BipartiteSpace::plain(2).unwrap();
        let jumps = vec![pauli::plus().scale(a.sqrt()), pauli::minus().scale(a.sqrt())];
        let g = LindbladGenerator::new(sp, CMatrix::zeros(2, 2), jumps).unwrap();
        let ls = g.schrodinger_liouville();
        let half = vec_col(&identity(2).scale(0.5));
        assert!((&ls * half).norm() < 1e-14);
        // null space is one dimensional
        let sv = ls.singular_values();
        assert_eq!(sv.iter().filter(|&&s| s < 1e-12).count(), 1);
        assert!((g.heisenberg_liouville() * vec_col(&identity(2))).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian_and_bad_grid() {
        let sp = BipartiteSpace::plain(2).unwrap();
        assert!(LindbladGenerator::new(sp, pauli::plus(), vec![]).is_err());
        let g = LindbladGenerator::new(sp, pauli::x(), vec![]).unwrap();
        assert!(g.channels_on_grid(&[1.0, 0.5], Picture::Heisenberg, Integrator::default()).is_err());
        assert!(g.channels_on_grid(&[-1.0], Picture::Heisenberg, Integrator::default()).is_err());
    }
}
