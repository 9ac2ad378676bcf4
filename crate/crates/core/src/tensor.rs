//! Multipartite index arithmetic on dense matrices: Kronecker products,
//! partial transposes and projections, local operations, and the rank/PSD/PPT
//! tests built on the Hermitian eigensolver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::shape::SystemShape;
use crate::spectral::{self, hermiticity_residual};

/// Default relative tolerance for rank, PSD, and commutation decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows()).ok_or(Error::Overflow {
        rows: usize::MAX,
        cols: 0,
    })?;
    let cols = a.cols().checked_mul(b.cols()).ok_or(Error::Overflow {
        rows,
        cols: usize::MAX,
    })?;
    rows.checked_mul(cols)
        .ok_or(Error::Overflow { rows, cols })?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i1 in 0..a.rows() {
        for j1 in 0..a.cols() {
            let x = a[(i1, j1)];
            if x == ZERO {
                continue;
            }
            for i2 in 0..b.rows() {
                for j2 in 0..b.cols() {
                    out[(i1 * b.rows() + i2, j1 * b.cols() + j2)] = x * b[(i2, j2)];
                }
            }
        }
    }
    Ok(out)
}

/// Left-to-right Kronecker product of all factors; the empty product is `[1]`.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    factors
        .iter()
        .try_fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Kronecker product of column vectors.
pub fn kron_vectors(factors: &[&[C64]]) -> Vec<C64> {
    factors.iter().fold(vec![C64::new(1.0, 0.0)], |acc, f| {
        acc.iter()
            .flat_map(|&x| f.iter().map(move |&y| x * y))
            .collect()
    })
}

fn check_state_shape(rho: &ComplexMatrix, shape: &SystemShape) -> Result<usize> {
    let side = rho.ensure_square()?;
    if side != shape.total() {
        return Err(Error::Shape(format!(
            "{side}x{side} matrix does not match subsystem dimensions {:?}",
            shape.dims()
        )));
    }
    Ok(side)
}

/// Transposes the indices of every subsystem in `subsystems`.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    subsystems: &[usize],
) -> Result<ComplexMatrix> {
    let side = check_state_shape(rho, shape)?;
    let mut selected = vec![false; shape.parties()];
    for &s in subsystems {
        shape.check_subsystem(s)?;
        selected[s] = true;
    }
    let strides = shape.strides();
    let digits: Vec<Vec<usize>> = (0..side).map(|i| shape.multi_index(i)).collect();

    Ok(ComplexMatrix::from_fn(side, side, |i, j| {
        let (mut si, mut sj) = (i, j);
        for s in (0..shape.parties()).filter(|&s| selected[s]) {
            let (di, dj) = (digits[i][s], digits[j][s]);
            if di != dj {
                si = si + dj * strides[s] - di * strides[s];
                sj = sj + di * strides[s] - dj * strides[s];
            }
        }
        rho[(si, sj)]
    }))
}

/// `⟨v|ρ|v⟩` with `v` acting on subsystem `subsystem` only.
///
/// The result lives on the shape with that subsystem removed (see
/// [`SystemShape::without`]).
pub fn partial_projection(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    subsystem: usize,
    vector: &[C64],
) -> Result<ComplexMatrix> {
    check_state_shape(rho, shape)?;
    shape.check_subsystem(subsystem)?;
    let d = shape.dim(subsystem);
    if vector.len() != d {
        return Err(Error::Shape(format!(
            "projection vector has length {} but subsystem {subsystem} has dimension {d}",
            vector.len()
        )));
    }
    let inner = shape.stride(subsystem);
    let reduced = shape.total() / d;
    let full = |r: usize, x: usize| (r / inner) * d * inner + x * inner + r % inner;

    Ok(ComplexMatrix::from_fn(reduced, reduced, |ri, rj| {
        let mut acc = ZERO;
        for (x, vx) in vector.iter().enumerate() {
            if *vx == ZERO {
                continue;
            }
            let row = full(ri, x);
            for (y, vy) in vector.iter().enumerate() {
                acc += vx.conj() * rho[(row, full(rj, y))] * vy;
            }
        }
        acc
    }))
}

/// Projects several leading subsystems in turn, e.g. `⟨1_A,1_B,1_C|ρ|1_A,1_B,1_C⟩`
/// for `vectors = [|1⟩, |1⟩, |1⟩]`. Returns the reduced matrix and shape.
pub fn project_leading(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    vectors: &[&[C64]],
) -> Result<(ComplexMatrix, SystemShape)> {
    let mut m = rho.clone();
    let mut sh = shape.clone();
    for v in vectors {
        m = partial_projection(&m, &sh, 0, v)?;
        sh = sh.without(0)?;
    }
    Ok((m, sh))
}

/// Basis vector `|k⟩` of `ℂ^d`.
pub fn basis_vector(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Applies `op` to the index of `subsystem`: rows when `left`, or columns
/// through `op†` on the right otherwise.
fn apply_on_axis(
    m: &ComplexMatrix,
    shape: &SystemShape,
    subsystem: usize,
    op: &ComplexMatrix,
    left: bool,
) -> ComplexMatrix {
    let d = shape.dim(subsystem);
    let stride = shape.stride(subsystem);
    let side = m.rows();
    ComplexMatrix::from_fn(side, side, |i, j| {
        let idx = if left { i } else { j };
        let digit = (idx / stride) % d;
        let base = idx - digit * stride;
        let mut acc = ZERO;
        for k in 0..d {
            let src = base + k * stride;
            acc += if left {
                op[(digit, k)] * m[(src, j)]
            } else {
                m[(i, src)] * op[(digit, k)].conj()
            };
        }
        acc
    })
}

/// `(L₀ ⊗ ⋯ ⊗ L_{k−1}) ρ (L₀ ⊗ ⋯ ⊗ L_{k−1})†`.
///
/// Every operator must be square with its subsystem's dimension and
/// invertible: `L†L` must have full rank at `tol`.
pub fn local_transform(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    ops: &[ComplexMatrix],
    tol: f64,
) -> Result<ComplexMatrix> {
    check_state_shape(rho, shape)?;
    if ops.len() != shape.parties() {
        return Err(Error::Shape(format!(
            "{} local operators for {} subsystems",
            ops.len(),
            shape.parties()
        )));
    }
    for (s, op) in ops.iter().enumerate() {
        let d = shape.dim(s);
        if op.rows() != d || op.cols() != d {
            return Err(Error::Shape(format!(
                "operator on subsystem {s} is {}x{}, expected {d}x{d}",
                op.rows(),
                op.cols()
            )));
        }
        let rank = rank_kernel(&op.adjoint().matmul(op), tol)?.rank;
        if rank < d {
            return Err(Error::NotInvertible {
                subsystem: s,
                rank,
                dim: d,
            });
        }
    }
    let mut out = rho.clone();
    for (s, op) in ops.iter().enumerate() {
        out = apply_on_axis(&out, shape, s, op, true);
        out = apply_on_axis(&out, shape, s, op, false);
    }
    Ok(out)
}

/// Outcome of [`psd_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_hermitian: bool,
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

/// Hermiticity and positivity at tolerance `tol` relative to `‖m‖_F`.
pub fn psd_check(m: &ComplexMatrix, tol: f64) -> Result<PsdReport> {
    m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = hermiticity_residual(m);
    let is_hermitian = residual <= tol;
    let min_eigenvalue = spectral::jacobi_eigh(&m.hermitian_part())?.min_eigenvalue();
    let is_psd = is_hermitian && min_eigenvalue >= -tol * m.frobenius_norm();
    Ok(PsdReport {
        is_hermitian,
        hermiticity_residual: residual,
        min_eigenvalue,
        is_psd,
    })
}

/// Rank and an orthonormal kernel basis of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RankKernel {
    pub rank: usize,
    pub kernel_basis: Vec<Vec<C64>>,
    pub eigenvalues: Vec<f64>,
}

impl RankKernel {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel_basis.len()
    }
}

/// Counts eigenvalues with `|λ| > tol·‖m‖_F`; the remaining eigenvectors
/// form the kernel basis.
pub fn rank_kernel(m: &ComplexMatrix, tol: f64) -> Result<RankKernel> {
    let eig = spectral::hermitian_eig(m, tol)?;
    let floor = tol * m.frobenius_norm();
    let mut rank = 0;
    let mut kernel_basis = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > floor {
            rank += 1;
        } else {
            kernel_basis.push(eig.eigenvector(k));
        }
    }
    Ok(RankKernel {
        rank,
        kernel_basis,
        eigenvalues: eig.eigenvalues,
    })
}

/// Minimum eigenvalue of one partial transpose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitionResult {
    pub subsystems: Vec<usize>,
    pub label: String,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub bipartitions: Vec<BipartitionResult>,
    /// Eigenvalues at or above `-threshold` count as non-negative.
    pub threshold: f64,
    pub is_ppt: bool,
}

impl PptReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.bipartitions
            .iter()
            .map(|b| b.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn failing(&self) -> impl Iterator<Item = &BipartitionResult> {
        self.bipartitions.iter().filter(|b| !b.passes)
    }
}

/// One representative of every nonempty proper subset up to complement,
/// ordered by size then lexicographically: for four parties
/// `{A} {B} {C} {D} {AB} {AC} {AD}`.
pub fn bipartition_subsets(parties: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for mask in 1u64..(1u64 << parties).saturating_sub(1) {
        let members: Vec<usize> = (0..parties).filter(|&s| mask & (1 << s) != 0).collect();
        let size = members.len();
        if 2 * size < parties || (2 * size == parties && members[0] == 0) {
            out.push(members);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn subset_label(subsystems: &[usize]) -> String {
    subsystems.iter().map(|&s| SystemShape::label(s)).collect()
}

/// Peres test over every bipartition.
///
/// Fails with [`Error::NotPsdState`] when `rho` itself is not PSD, which is
/// distinct from a PPT violation.
pub fn is_ppt(rho: &ComplexMatrix, shape: &SystemShape, tol: f64) -> Result<PptReport> {
    check_state_shape(rho, shape)?;
    let state = psd_check(rho, tol)?;
    if !state.is_hermitian {
        return Err(Error::NotHermitian {
            residual: state.hermiticity_residual,
        });
    }
    if !state.is_psd {
        return Err(Error::NotPsdState {
            min_eigenvalue: state.min_eigenvalue,
        });
    }
    let threshold = tol * rho.frobenius_norm();
    let mut bipartitions = Vec::new();
    for subset in bipartition_subsets(shape.parties()) {
        let pt = partial_transpose(rho, shape, &subset)?;
        let min_eigenvalue = spectral::jacobi_eigh(&pt.hermitian_part())?.min_eigenvalue();
        bipartitions.push(BipartitionResult {
            label: subset_label(&subset),
            passes: min_eigenvalue >= -threshold,
            subsystems: subset,
            min_eigenvalue,
        });
    }
    let is_ppt = bipartitions.iter().all(|b| b.passes);
    Ok(PptReport {
        bipartitions,
        threshold,
        is_ppt,
    })
}
