//! Random unitaries, states and channels.
//!
//! All sampling goes through ChaCha20 streams keyed by `(seed, stream)` so that
//! Monte-Carlo chunks are reproducible regardless of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dagger, CMatrix, CVector, C64};

pub type OtocRng = ChaCha20Rng;

pub fn rng_for(seed: u64, stream: u64) -> OtocRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// QR of a Gaussian matrix with the phases of `diag(R)` divided out, which makes
/// the orthonormal factor Haar distributed.
fn phase_fixed_q(g: CMatrix) -> CMatrix {
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..q.ncols() {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    phase_fixed_q(ginibre(d, d, rng))
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`).
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    phase_fixed_q(ginibre(rows, cols, rng))
}

pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Mixed state `G G† / Tr(G G†)` with Ginibre `G` of shape `d x rank`.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let rho = &g * dagger(&g);
    let tr = rho.trace();
    rho / tr
}

/// Kraus operators of a random CPTP map with `n_kraus` terms: the blocks of a
/// Haar isometry `C^d -> C^{n_kraus d}`.
pub fn random_cptp_kraus<R: Rng + ?Sized>(d: usize, n_kraus: usize, rng: &mut R) -> Vec<CMatrix> {
    let v = haar_isometry(n_kraus * d, d, rng);
    (0..n_kraus).map(|k| v.rows(k * d, d).into_owned()).collect()
}

/// Kraus operators `sqrt(p_k) U_k` of a random mixed-unitary channel, which is
/// both unital and trace preserving.
pub fn random_mixed_unitary_kraus<R: Rng + ?Sized>(d: usize, n_terms: usize, rng: &mut R) -> Vec<CMatrix> {
    let weights: Vec<f64> = (0..n_terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| haar_unitary(d, rng).scale((w / total).sqrt()))
        .collect()
}

/// Random Hermitian matrix from the GUE, normalized to unit operator scale.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + dagger(&g)).scale(0.5 / (d as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, unitarity_defect};

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_for(1, 0);
        for d in [1, 2, 5, 8] {
            assert!(unitarity_defect(&haar_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn cptp_kraus_complete() {
        let mut rng = rng_for(2, 0);
        let ks = random_cptp_kraus(4, 3, &mut rng);
        let sum = ks.iter().fold(CMatrix::zeros(4, 4), |acc, k| acc + dagger(k) * k);
        assert!((sum - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn mixed_unitary_bistochastic() {
        let mut rng = rng_for(3, 0);
        let ks = random_mixed_unitary_kraus(3, 4, &mut rng);
        let tp = ks.iter().fold(CMatrix::zeros(3, 3), |acc, k| acc + dagger(k) * k);
        let un = ks.iter().fold(CMatrix::zeros(3, 3), |acc, k| acc + k * dagger(k));
        assert!((tp - identity(3)).norm() < 1e-12);
        assert!((un - identity(3)).norm() < 1e-12);
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: f64 = rng_for(7, 0).random();
        let b: f64 = rng_for(7, 0).random();
        let c: f64 = rng_for(7, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn density_matrix_normalized() {
        let mut rng = rng_for(4, 0);
        let rho = random_density_matrix(5, 2, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(crate::linalg::min_hermitian_eigenvalue(&rho) > -1e-12);
    }
}
