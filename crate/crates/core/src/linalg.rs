//! Dense complex linear algebra on bipartite spaces.
//!
//! Index conventions are fixed once for the whole crate:
//!
//! * `H_AB = H_A ⊗ H_B` with A the slow (leftmost) factor, so the basis
//!   index of `|a⟩|b⟩` is `a * d_B + b`.
//! * The doubled space used for replica identities is ordered
//!   `(A, B, A', B')`, i.e. `H_AB ⊗ H_A'B'`.
//! * Operators are vectorized by column stacking: `vec(X)[r + c*d] = X[r, c]`,
//!   so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OtocError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dimensions of `H_A ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteSpace {
    d_a: usize,
    d_b: usize,
}

impl BipartiteSpace {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(OtocError::InvalidArgument(format!(
                "subsystem dimensions must be positive, got ({d_a}, {d_b})"
            )));
        }
        Ok(Self { d_a, d_b })
    }

    /// A space with a trivial B factor, for unstructured use.
    pub fn plain(d: usize) -> Result<Self> {
        Self::new(d, 1)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.d_b + b
    }

    /// Upper bound `1 - 1/d_A²` of the averaged bipartite OTOC.
    pub fn g_max(&self) -> f64 {
        1.0 - 1.0 / (self.d_a * self.d_a) as f64
    }

    /// Factor dimensions of the doubled space `(A, B, A', B')`.
    pub fn doubled_dims(&self) -> [usize; 4] {
        [self.d_a, self.d_b, self.d_a, self.d_b]
    }

    pub fn check_operator(&self, x: &CMatrix) -> Result<()> {
        let d = self.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(OtocError::DimensionMismatch(format!(
                "expected {d}x{d} operator on ({}, {}), got {}x{}",
                self.d_a,
                self.d_b,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }
}

/// Labels of the four factors of the doubled space `H_AB ⊗ H_A'B'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replica {
    A,
    B,
    APrime,
    BPrime,
}

impl Replica {
    fn position(self) -> usize {
        match self {
            Replica::A => 0,
            Replica::B => 1,
            Replica::APrime => 2,
            Replica::BPrime => 3,
        }
    }
}

/// An operator on `H_AB ⊗ H_A'B'` carrying its bipartite structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledOperator {
    pub space: BipartiteSpace,
    pub data: CMatrix,
}

impl DoubledOperator {
    pub fn new(space: BipartiteSpace, data: CMatrix) -> Result<Self> {
        let dd = space.dim() * space.dim();
        if data.nrows() != dd || data.ncols() != dd {
            return Err(OtocError::DimensionMismatch(format!(
                "doubled operator must be {dd}x{dd}, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { space, data })
    }

    /// Reduced operator on the listed factors, in `(A, B, A', B')` order.
    pub fn reduce(&self, keep: &[Replica]) -> CMatrix {
        let mut mask = [false; 4];
        for r in keep {
            mask[r.position()] = true;
        }
        partial_trace(&self.data, &self.space.doubled_dims(), &mask)
            .expect("doubled operator dimensions are consistent by construction")
    }
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `|i⟩⟨j|` in dimension `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn basis_ket(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = ONE;
    v
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn kron(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.kronecker(y)
}

pub fn dagger(x: &CMatrix) -> CMatrix {
    x.adjoint()
}

/// Hilbert-Schmidt inner product `Tr[X† Y]`.
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> Result<C64> {
    if x.shape() != y.shape() {
        return Err(OtocError::DimensionMismatch(format!(
            "hs_inner of {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum())
}

pub fn hs_norm2_sq(x: &CMatrix) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr[X Y]` without forming the product.
pub fn trace_of_product(x: &CMatrix, y: &CMatrix) -> C64 {
    let n = x.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += x[(i, k)] * y[(k, i)];
        }
    }
    acc
}

/// Linear entropy `1 - Tr[ρ²]` of a Hermitian operator.
pub fn linear_entropy(rho: &CMatrix) -> f64 {
    1.0 - hs_norm2_sq(rho)
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Partial trace of `x` over a tensor product with factor dimensions `dims`
/// (first factor slowest), keeping the factors flagged in `keep`.
pub fn partial_trace(x: &CMatrix, dims: &[usize], keep: &[bool]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if dims.len() != keep.len() {
        return Err(OtocError::InvalidArgument(format!(
            "{} factor dimensions but {} keep flags",
            dims.len(),
            keep.len()
        )));
    }
    if x.nrows() != total || x.ncols() != total {
        return Err(OtocError::DimensionMismatch(format!(
            "operator is {}x{} but factors {:?} give {}",
            x.nrows(),
            x.ncols(),
            dims,
            total
        )));
    }
    let kept_dims: Vec<usize> = dims
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(&d, _)| d)
        .collect();
    let kept_total: usize = kept_dims.iter().product();

    // strides of each factor in the full index
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }

    let mut out = CMatrix::zeros(kept_total, kept_total);
    let mut row_digits = vec![0usize; dims.len()];
    let mut kept_digits = vec![0usize; kept_dims.len()];
    for r in 0..total {
        digits(r, dims, &mut row_digits);
        // kept part of the row index, and the traced-out offset shared with the column
        let mut kr = 0usize;
        let mut traced_offset = 0usize;
        for k in 0..dims.len() {
            if keep[k] {
                kr = kr * dims[k] + row_digits[k];
            } else {
                traced_offset += row_digits[k] * strides[k];
            }
        }
        for kc in 0..kept_total {
            digits(kc, &kept_dims, &mut kept_digits);
            let mut c = traced_offset;
            let mut j = 0;
            for k in 0..dims.len() {
                if keep[k] {
                    c += kept_digits[j] * strides[k];
                    j += 1;
                }
            }
            out[(kr, kc)] += x[(r, c)];
        }
    }
    Ok(out)
}

/// `Tr_B X` for an operator on `H_A ⊗ H_B`.
pub fn trace_out_b(x: &CMatrix, space: &BipartiteSpace) -> CMatrix {
    let (da, db) = (space.d_a(), space.d_b());
    let mut out = CMatrix::zeros(da, da);
    for a in 0..da {
        for a2 in 0..da {
            let mut acc = ZERO;
            for b in 0..db {
                acc += x[(a * db + b, a2 * db + b)];
            }
            out[(a, a2)] = acc;
        }
    }
    out
}

/// `Tr_A X` for an operator on `H_A ⊗ H_B`.
pub fn trace_out_a(x: &CMatrix, space: &BipartiteSpace) -> CMatrix {
    let (da, db) = (space.d_a(), space.d_b());
    let mut out = CMatrix::zeros(db, db);
    for b in 0..db {
        for b2 in 0..db {
            let mut acc = ZERO;
            for a in 0..da {
                acc += x[(a * db + b, a * db + b2)];
            }
            out[(b, b2)] = acc;
        }
    }
    out
}

fn permutation_operator(dim: usize, mut map: impl FnMut(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(map(col), col)] = ONE;
    }
    m
}

/// Full swap `S|x⟩|y⟩ = |y⟩|x⟩` on `H_AB ⊗ H_A'B'`.
pub fn swap_full(space: &BipartiteSpace) -> DoubledOperator {
    let d = space.dim();
    let data = permutation_operator(d * d, |i| (i % d) * d + i / d);
    DoubledOperator { space: *space, data }
}

fn swap_factor(space: &BipartiteSpace, swap_a: bool) -> DoubledOperator {
    let dims = space.doubled_dims();
    let mut dg = [0usize; 4];
    let data = permutation_operator(space.dim() * space.dim(), |i| {
        digits(i, &dims, &mut dg);
        if swap_a {
            dg.swap(0, 2);
        } else {
            dg.swap(1, 3);
        }
        ((dg[0] * dims[1] + dg[1]) * dims[2] + dg[2]) * dims[3] + dg[3]
    });
    DoubledOperator { space: *space, data }
}

/// `S_AA'`: swaps only the A factor with its replica.
pub fn swap_aa(space: &BipartiteSpace) -> DoubledOperator {
    swap_factor(space, true)
}

/// `S_BB'`: swaps only the B factor with its replica.
pub fn swap_bb(space: &BipartiteSpace) -> DoubledOperator {
    swap_factor(space, false)
}

/// Swap of the two tensor factors of `C^{d_A} ⊗ C^{d_B}` when `d_A = d_B`.
pub fn swap_within(space: &BipartiteSpace) -> Result<CMatrix> {
    if space.d_a() != space.d_b() {
        return Err(OtocError::InvalidArgument(
            "the A<->B swap needs d_A = d_B".into(),
        ));
    }
    let n = space.d_a();
    Ok(permutation_operator(n * n, |i| (i % n) * n + i / n))
}

/// Column-stacking vectorization.
pub fn vec_col(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

pub fn unvec_col(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

pub fn hermiticity_defect(x: &CMatrix) -> f64 {
    hs_norm2_sq(&(x - x.adjoint())).sqrt()
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    hs_norm2_sq(&(u.adjoint() * u - identity(n))).sqrt()
}

/// Eigenvalues of the Hermitian part of `x`, ascending.
pub fn hermitian_eigenvalues(x: &CMatrix) -> Vec<f64> {
    let h = (x + x.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition of the Hermitian part of `x`.
pub fn hermitian_eigh(x: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (x + x.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn min_hermitian_eigenvalue(x: &CMatrix) -> f64 {
    hermitian_eigenvalues(x).first().copied().unwrap_or(0.0)
}

/// Trace norm of a Hermitian matrix via its spectrum.
pub fn trace_norm_hermitian(x: &CMatrix) -> f64 {
    hermitian_eigenvalues(x).iter().map(|e| e.abs()).sum()
}

/// Dense matrix exponential by scaling and squaring with Padé approximants.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// `e^{-iHt}` for Hermitian `H`, via its eigendecomposition.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> CMatrix {
    let (ev, vecs) = hermitian_eigh(h);
    let n = h.nrows();
    let mut scaled = vecs.clone();
    for (k, &e) in ev.iter().enumerate() {
        let phase = C64::from_polar(1.0, -e * t);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    scaled * vecs.adjoint()
}

/// Pauli matrices and the single-qubit ladder operators.
pub mod pauli {
    use super::{CMatrix, C64, ONE, ZERO};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// `σ⁺ = |0⟩⟨1|` (raising, with `|0⟩` the σᶻ = +1 state).
    pub fn plus() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
    }

    pub fn minus() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
    }
}
