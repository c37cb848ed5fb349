//! Quantum channels with interconvertible Kraus, Choi and Liouville forms.
//!
//! Choi state: `ρ_E = (1/d) Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first.
//! Liouville matrix: `vec(E(X)) = M vec(X)` with column stacking, so that
//! `ρ_E[(k,i),(l,j)] = M[k + l·d, i + j·d] / d`.

use serde::{Deserialize, Serialize};

use crate::error::{OtocError, Result};
use crate::linalg::{
    dagger, hermitian_eigh, identity, kron, min_hermitian_eigenvalue, unitarity_defect, vec_col,
    BipartiteSpace, CMatrix, C64,
};

pub const CP_TOL: f64 = 1e-10;
pub const TP_TOL: f64 = 1e-10;
/// Negative Choi eigenvalues down to `−KRAUS_CLIP · λ_max` are treated as
/// round-off when extracting Kraus operators (propagated channels carry
/// integrator noise in the Choi null space).
pub const KRAUS_CLIP: f64 = 1e-8;
/// Relative threshold below which Choi eigenvalues are dropped when extracting Kraus operators.
const KRAUS_CUTOFF: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Schrodinger,
    Heisenberg,
}

impl Picture {
    pub fn flipped(self) -> Self {
        match self {
            Picture::Schrodinger => Picture::Heisenberg,
            Picture::Heisenberg => Picture::Schrodinger,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Kraus(Vec<CMatrix>),
    Choi(CMatrix),
    Liouville(CMatrix),
}

impl Representation {
    pub fn kind(&self) -> RepresentationKind {
        match self {
            Representation::Kraus(_) => RepresentationKind::Kraus,
            Representation::Choi(_) => RepresentationKind::Choi,
            Representation::Liouville(_) => RepresentationKind::Liouville,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationKind {
    Kraus,
    Choi,
    Liouville,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    space: BipartiteSpace,
    repr: Representation,
    picture: Picture,
}

impl Channel {
    pub fn from_kraus(space: BipartiteSpace, ops: Vec<CMatrix>, picture: Picture) -> Result<Self> {
        if ops.is_empty() {
            return Err(OtocError::InvalidArgument("empty Kraus set".into()));
        }
        for (k, a) in ops.iter().enumerate() {
            if !a.is_square() {
                return Err(OtocError::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, not square",
                    a.nrows(),
                    a.ncols()
                )));
            }
            space.check_operator(a)?;
        }
        Ok(Self { space, repr: Representation::Kraus(ops), picture })
    }

    pub fn from_choi(space: BipartiteSpace, choi: CMatrix, picture: Picture) -> Result<Self> {
        check_super(&space, &choi, "Choi matrix")?;
        Ok(Self { space, repr: Representation::Choi(choi), picture })
    }

    pub fn from_liouville(space: BipartiteSpace, m: CMatrix, picture: Picture) -> Result<Self> {
        check_super(&space, &m, "Liouville matrix")?;
        Ok(Self { space, repr: Representation::Liouville(m), picture })
    }

    pub fn identity(space: BipartiteSpace, picture: Picture) -> Self {
        Self { space, repr: Representation::Kraus(vec![identity(space.dim())]), picture }
    }

    /// `X ↦ U X U†`.
    pub fn unitary(space: BipartiteSpace, u: CMatrix, picture: Picture) -> Result<Self> {
        space.check_operator(&u)?;
        let defect = unitarity_defect(&u);
        if defect > 1e-8 {
            return Err(OtocError::NotUnitary { defect });
        }
        Ok(Self { space, repr: Representation::Kraus(vec![u]), picture })
    }

    /// `X ↦ Tr[X] I/d`.
    pub fn completely_depolarizing(space: BipartiteSpace, picture: Picture) -> Self {
        let d = space.dim();
        let s = 1.0 / (d as f64).sqrt();
        let mut ops = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut a = CMatrix::zeros(d, d);
                a[(i, j)] = C64::new(s, 0.0);
                ops.push(a);
            }
        }
        Self { space, repr: Representation::Kraus(ops), picture }
    }

    /// Convex combination `Σ p_k E_k` of channels on the same space.
    pub fn convex_combination(parts: &[(f64, &Channel)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| OtocError::InvalidArgument("empty convex combination".into()))?
            .1;
        let mut ops = Vec::new();
        for &(p, ch) in parts {
            if p < 0.0 {
                return Err(OtocError::InvalidArgument(format!("negative weight {p}")));
            }
            if ch.space != first.space {
                return Err(OtocError::DimensionMismatch("channels on different spaces".into()));
            }
            if p == 0.0 {
                continue;
            }
            ops.extend(ch.kraus()?.into_iter().map(|a| a.scale(p.sqrt())));
        }
        if ops.is_empty() {
            return Err(OtocError::InvalidArgument("all weights are zero".into()));
        }
        Self::from_kraus(first.space, ops, first.picture)
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Same map, relabelled picture.
    pub fn with_picture(mut self, picture: Picture) -> Self {
        self.picture = picture;
        self
    }

    pub fn kraus(&self) -> Result<Vec<CMatrix>> {
        match &self.repr {
            Representation::Kraus(ops) => Ok(ops.clone()),
            Representation::Choi(c) => kraus_from_choi(c, self.dim()),
            Representation::Liouville(m) => kraus_from_choi(&choi_from_liouville(m, self.dim()), self.dim()),
        }
    }

    pub fn choi(&self) -> CMatrix {
        match &self.repr {
            Representation::Kraus(ops) => choi_from_kraus(ops, self.dim()),
            Representation::Choi(c) => c.clone(),
            Representation::Liouville(m) => choi_from_liouville(m, self.dim()),
        }
    }

    pub fn liouville(&self) -> CMatrix {
        match &self.repr {
            Representation::Kraus(ops) => liouville_from_kraus(ops, self.dim()),
            Representation::Choi(c) => liouville_from_choi(c, self.dim()),
            Representation::Liouville(m) => m.clone(),
        }
    }

    pub fn to_representation(&self, kind: RepresentationKind) -> Result<Self> {
        let repr = match kind {
            RepresentationKind::Kraus => Representation::Kraus(self.kraus()?),
            RepresentationKind::Choi => Representation::Choi(self.choi()),
            RepresentationKind::Liouville => Representation::Liouville(self.liouville()),
        };
        Ok(Self { space: self.space, repr, picture: self.picture })
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.space.check_operator(x)?;
        let d = self.dim();
        Ok(match &self.repr {
            Representation::Kraus(ops) => {
                let mut out = CMatrix::zeros(d, d);
                for a in ops {
                    out += a * x * a.adjoint();
                }
                out
            }
            Representation::Liouville(m) => {
                let v = m * vec_col(x);
                CMatrix::from_column_slice(d, d, v.as_slice())
            }
            Representation::Choi(c) => {
                let v = liouville_from_choi(c, d) * vec_col(x);
                CMatrix::from_column_slice(d, d, v.as_slice())
            }
        })
    }

    /// Hilbert–Schmidt adjoint; the picture tag flips.
    pub fn adjoint(&self) -> Self {
        let repr = match &self.repr {
            Representation::Kraus(ops) => Representation::Kraus(ops.iter().map(dagger).collect()),
            Representation::Liouville(m) => Representation::Liouville(m.adjoint()),
            Representation::Choi(c) => {
                let m = liouville_from_choi(c, self.dim()).adjoint();
                Representation::Choi(choi_from_liouville(&m, self.dim()))
            }
        };
        Self { space: self.space, repr, picture: self.picture.flipped() }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Channel) -> Result<Self> {
        if self.space != other.space {
            return Err(OtocError::DimensionMismatch("composing channels on different spaces".into()));
        }
        let repr = match (&self.repr, &other.repr) {
            (Representation::Kraus(a), Representation::Kraus(b)) => {
                Representation::Kraus(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
            _ => Representation::Liouville(self.liouville() * other.liouville()),
        };
        Ok(Self { space: self.space, repr, picture: self.picture })
    }

    /// `E ⊗ E` on the doubled space, with Kraus set `{A_i ⊗ A_j}`. The result
    /// is labelled with the bipartition (first copy | second copy).
    pub fn tensor_square(&self) -> Result<Self> {
        let ops = self.kraus()?;
        let d = self.dim();
        let mut sq = Vec::with_capacity(ops.len() * ops.len());
        for a in &ops {
            for b in &ops {
                sq.push(kron(a, b));
            }
        }
        Ok(Self { space: BipartiteSpace::new(d, d)?, repr: Representation::Kraus(sq), picture: self.picture })
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.choi())
    }

    pub fn is_cp(&self) -> bool {
        self.min_choi_eigenvalue() >= -CP_TOL
    }

    /// `‖E†(I) − I‖₂`, i.e. `‖Σ A†A − I‖₂` for Kraus sets.
    pub fn tp_defect(&self) -> f64 {
        let d = self.dim();
        match &self.repr {
            Representation::Kraus(ops) => {
                let s = ops.iter().fold(CMatrix::zeros(d, d), |acc, a| acc + a.adjoint() * a);
                (s - identity(d)).norm()
            }
            _ => {
                let v = self.liouville().adjoint() * vec_col(&identity(d));
                (CMatrix::from_column_slice(d, d, v.as_slice()) - identity(d)).norm()
            }
        }
    }

    /// `‖E(I) − I‖₂`.
    pub fn unital_defect(&self) -> f64 {
        let d = self.dim();
        match self.apply(&identity(d)) {
            Ok(y) => (y - identity(d)).norm(),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.tp_defect() < TP_TOL
    }

    pub fn is_unital(&self) -> bool {
        self.unital_defect() < TP_TOL
    }

    /// Number of Choi eigenvalues above `tol` relative to the largest.
    pub fn kraus_rank(&self, tol: f64) -> usize {
        let (vals, _) = hermitian_eigh(&self.choi());
        let top = vals.iter().cloned().fold(0.0, f64::max);
        vals.iter().filter(|&&v| v > tol * top).count()
    }

    /// Relative norm of the superoperator `[L_S, E⊗E]` where `L_S` multiplies by
    /// the swap. With Kraus Gram matrix `g_ab = ⟨A_a, A_b⟩` the squared norm is
    /// `2[(Tr g²)² − Tr g⁴]`, which vanishes iff `g` has rank one.
    pub fn swap_commutant_defect(&self) -> Result<f64> {
        let ops = self.kraus()?;
        let n = ops.len();
        let g = CMatrix::from_fn(n, n, |a, b| ops[a].dotc(&ops[b]));
        let g2 = &g * &g;
        let tr2 = g2.trace().re;
        let tr4 = (&g2 * &g2).trace().re;
        if tr2 <= 0.0 {
            return Ok(0.0);
        }
        Ok((2.0 * (tr2 * tr2 - tr4)).max(0.0).sqrt() / tr2)
    }

    pub fn is_unitary_via_swap_commutant(&self) -> Result<bool> {
        Ok(self.swap_commutant_defect()? < 1e-7)
    }

    /// Single-Kraus detection from the Choi rank.
    pub fn is_unitary(&self) -> bool {
        self.kraus_rank(1e-10) == 1
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ChannelDocument::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ChannelDocument = serde_json::from_str(s)?;
        doc.try_into()
    }
}

fn check_super(space: &BipartiteSpace, m: &CMatrix, what: &str) -> Result<()> {
    let n = space.dim() * space.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(OtocError::DimensionMismatch(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn choi_from_kraus(ops: &[CMatrix], d: usize) -> CMatrix {
    // d ρ_E = Σ_a |A_a⟩⟩⟨⟨A_a| with row-major |A⟩⟩[(k,i)] = A[k,i]
    let mut c = CMatrix::zeros(d * d, d * d);
    for a in ops {
        let v = crate::linalg::CVector::from_fn(d * d, |r, _| a[(r / d, r % d)]);
        c += &v * v.adjoint();
    }
    c.unscale(d as f64)
}

pub fn liouville_from_kraus(ops: &[CMatrix], d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for a in ops {
        m += kron(&a.conjugate(), a);
    }
    m
}

/// Reshuffle `ρ_E[(k,i),(l,j)] = M[k + l·d, i + j·d] / d`.
pub fn choi_from_liouville(m: &CMatrix, d: usize) -> CMatrix {
    let inv = 1.0 / d as f64;
    CMatrix::from_fn(d * d, d * d, |r, c| {
        let (k, i) = (r / d, r % d);
        let (l, j) = (c / d, c % d);
        m[(k + l * d, i + j * d)] * inv
    })
}

pub fn liouville_from_choi(c: &CMatrix, d: usize) -> CMatrix {
    let df = d as f64;
    CMatrix::from_fn(d * d, d * d, |r, s| {
        let (k, l) = (r % d, r / d);
        let (i, j) = (s % d, s / d);
        c[(k * d + i, l * d + j)] * df
    })
}

pub fn kraus_from_choi(c: &CMatrix, d: usize) -> Result<Vec<CMatrix>> {
    let (vals, vecs) = hermitian_eigh(c);
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -CP_TOL.max(KRAUS_CLIP * top) {
        return Err(OtocError::NotCompletelyPositive { min_eigenvalue: min });
    }
    let mut ops = Vec::new();
    // largest eigenvalues first, for a canonical ordering
    for idx in (0..vals.len()).rev() {
        let lam = vals[idx];
        if lam <= KRAUS_CUTOFF * top.max(f64::MIN_POSITIVE) {
            continue;
        }
        let s = (d as f64 * lam).sqrt();
        let v = vecs.column(idx);
        ops.push(CMatrix::from_fn(d, d, |k, i| v[k * d + i] * s));
    }
    if ops.is_empty() {
        ops.push(CMatrix::zeros(d, d));
    }
    Ok(ops)
}

#[derive(Serialize, Deserialize)]
struct ChannelDocument {
    dims: [usize; 2],
    picture: Picture,
    representation: RepresentationKind,
    /// Row-major matrices of `[re, im]` pairs.
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

fn encode(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn decode(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(OtocError::DimensionMismatch("ragged matrix in channel document".into()));
    }
    Ok(CMatrix::from_fn(n, ncols, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
}

impl From<&Channel> for ChannelDocument {
    fn from(ch: &Channel) -> Self {
        let matrices = match &ch.repr {
            Representation::Kraus(ops) => ops.iter().map(encode).collect(),
            Representation::Choi(m) | Representation::Liouville(m) => vec![encode(m)],
        };
        ChannelDocument {
            dims: [ch.space.d_a(), ch.space.d_b()],
            picture: ch.picture,
            representation: ch.repr.kind(),
            matrices,
        }
    }
}

impl TryFrom<ChannelDocument> for Channel {
    type Error = OtocError;

    fn try_from(doc: ChannelDocument) -> Result<Self> {
        let space = BipartiteSpace::new(doc.dims[0], doc.dims[1])?;
        let mats = doc.matrices.iter().map(|m| decode(m)).collect::<Result<Vec<_>>>()?;
        match doc.representation {
            RepresentationKind::Kraus => Channel::from_kraus(space, mats, doc.picture),
            RepresentationKind::Choi | RepresentationKind::Liouville => {
                let [m]: [CMatrix; 1] = mats.try_into().map_err(|_| {
                    OtocError::InvalidArgument("expected exactly one matrix".into())
                })?;
                if doc.representation == RepresentationKind::Choi {
                    Channel::from_choi(space, m, doc.picture)
                } else {
                    Channel::from_liouville(space, m, doc.picture)
                }
            }
        }
    }
}
