//! Canonical form of rank-N PPT states on `2⊗2⊗2⊗N`.
//!
//! A canonical state is `ρ = (I₈⊗√D) W†W (I₈⊗√D)` where `W` is the block row
//! `[CBA CB CA C BA B A I]` of `N×N` matrices, `A, B, C` are normal and
//! pairwise commuting (also with each other's adjoints) and `D` is PSD.
//! Block `(i, j)` of `ρ` is therefore `√D Wᵢ† Wⱼ √D`, with `i = 4a + 2b + c`
//! for the qubit label `|abc⟩`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::matrix::{vector_norm, ComplexMatrix, C64, ZERO};
use crate::shape::SystemShape;
use crate::spectral::{self, hermiticity_residual};
use crate::tensor::{self, rank_kernel};

/// `(A, B, C, D)`, all `n × n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: usize,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl CanonicalForm {
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        let n = a.rows();
        for (name, m) in [("a", &a), ("b", &b), ("c", &c), ("d", &d)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if n == 0 {
            return Err(Error::InvalidArgument("canonical form needs n >= 1".into()));
        }
        Ok(Self { n, a, b, c, d })
    }

    /// Scalar (`n = 1`) form, handy for small examples.
    pub fn scalar(a: C64, b: C64, c: C64, d: f64) -> Self {
        let m = |z: C64| ComplexMatrix::from_diag(&[z]);
        Self {
            n: 1,
            a: m(a),
            b: m(b),
            c: m(c),
            d: ComplexMatrix::from_real_diag(&[d]),
        }
    }

    pub fn shape(&self) -> SystemShape {
        SystemShape::qubits3_with(self.n).expect("n >= 1")
    }
}

/// Qubit label `|abc⟩` of one of the 8×8 blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockAddress {
    pub a_bit: u8,
    pub b_bit: u8,
    pub c_bit: u8,
}

impl BlockAddress {
    pub const fn new(a_bit: u8, b_bit: u8, c_bit: u8) -> Self {
        Self {
            a_bit,
            b_bit,
            c_bit,
        }
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < 8, "block index {i} out of range");
        Self::new((i >> 2) as u8 & 1, (i >> 1) as u8 & 1, i as u8 & 1)
    }

    pub fn index(self) -> usize {
        4 * self.a_bit as usize + 2 * self.b_bit as usize + self.c_bit as usize
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..8).map(Self::from_index)
    }

    pub const TOP: Self = Self::new(1, 1, 1);
}

impl fmt::Display for BlockAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}{}⟩", self.a_bit, self.b_bit, self.c_bit)
    }
}

/// Entry `addr` of the block row: `C^[a=0] · B^[b=0] · A^[c=0]`.
///
/// `|111⟩ ↦ I`, `|011⟩ ↦ C`, `|110⟩ ↦ A`, `|000⟩ ↦ CBA`.
pub fn word_matrix(cf: &CanonicalForm, addr: BlockAddress) -> ComplexMatrix {
    let mut w = ComplexMatrix::identity(cf.n);
    if addr.a_bit == 0 {
        w = cf.c.clone();
    }
    if addr.b_bit == 0 {
        w = w.matmul(&cf.b);
    }
    if addr.c_bit == 0 {
        w = w.matmul(&cf.a);
    }
    w
}

/// All eight words in block order.
pub fn words(cf: &CanonicalForm) -> Vec<ComplexMatrix> {
    BlockAddress::all()
        .map(|addr| word_matrix(cf, addr))
        .collect()
}

/// Residuals of the nine commutation relations plus the Hermiticity of `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    /// `(relation, ‖[X, Y]‖_F, ‖[X, Y]‖_F / (‖X‖_F ‖Y‖_F))`.
    pub relations: Vec<(String, f64, f64)>,
    pub d_hermiticity: f64,
    pub tol: f64,
    pub passes: bool,
}

impl CommutationReport {
    pub fn worst(&self) -> Option<&(String, f64, f64)> {
        self.relations.iter().max_by(|x, y| x.2.total_cmp(&y.2))
    }
}

impl fmt::Display for CommutationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.worst() {
            Some((name, abs, rel)) => write!(
                f,
                "worst relation {name}: {abs:.3e} (relative {rel:.3e}); d hermiticity {:.3e}; tol {:.1e}",
                self.d_hermiticity, self.tol
            ),
            None => write!(f, "no relations"),
        }
    }
}

fn relative(abs: f64, x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let scale = x.frobenius_norm() * y.frobenius_norm();
    if scale == 0.0 {
        abs
    } else {
        abs / scale
    }
}

/// Evaluates `[A,A†] [B,B†] [C,C†] [B,A] [B,A†] [C,A] [C,A†] [C,B] [C,B†]`
/// and `d − d†`; passes when every relative residual is at most `tol`.
pub fn check_commutation(cf: &CanonicalForm, tol: f64) -> CommutationReport {
    let (a, b, c) = (&cf.a, &cf.b, &cf.c);
    let (ad, bd, cd) = (a.adjoint(), b.adjoint(), c.adjoint());
    let pairs: [(&str, &ComplexMatrix, &ComplexMatrix); 9] = [
        ("[A,A†]", a, &ad),
        ("[B,B†]", b, &bd),
        ("[C,C†]", c, &cd),
        ("[B,A]", b, a),
        ("[B,A†]", b, &ad),
        ("[C,A]", c, a),
        ("[C,A†]", c, &ad),
        ("[C,B]", c, b),
        ("[C,B†]", c, &bd),
    ];
    let relations: Vec<(String, f64, f64)> = pairs
        .iter()
        .map(|(name, x, y)| {
            let abs = x.commutator(y).frobenius_norm();
            (name.to_string(), abs, relative(abs, x, y))
        })
        .collect();
    let d_hermiticity = hermiticity_residual(&cf.d);
    let passes = relations.iter().all(|r| r.2 <= tol) && d_hermiticity <= tol;
    CommutationReport {
        relations,
        d_hermiticity,
        tol,
        passes,
    }
}

fn stack_gram(row: &[ComplexMatrix]) -> ComplexMatrix {
    let n = row[0].rows();
    let mut v = ComplexMatrix::zeros(n, n * row.len());
    for (j, w) in row.iter().enumerate() {
        v.set_block(0, j * n, w);
    }
    v.adjoint().matmul(&v).hermitian_part()
}

/// The `8n × 8n` canonical state of `cf`.
///
/// Fails if the commutation relations or the PSD requirement on `d` are
/// violated beyond `tol`. Singular PSD `d` is accepted and yields a state of
/// rank `rank(d)`.
pub fn build_canonical_222n(cf: &CanonicalForm, tol: f64) -> Result<ComplexMatrix> {
    let report = check_commutation(cf, tol);
    if !report.passes {
        return Err(commutation_error(&report));
    }
    let root = spectral::sqrt_psd(&cf.d, tol, false)?;
    let row: Vec<ComplexMatrix> = words(cf).iter().map(|w| w.matmul(&root)).collect();
    Ok(stack_gram(&row))
}

fn commutation_error(report: &CommutationReport) -> Error {
    if report.d_hermiticity > report.tol {
        return Error::NotHermitian {
            residual: report.d_hermiticity,
        };
    }
    let (name, _, rel) = report.worst().cloned().unwrap_or_default();
    Error::InvalidArgument(format!(
        "commutation relation {name} violated (relative residual {rel:.3e})"
    ))
}

/// The `4n × 4n` state on `2⊗2⊗N` with block row `[BA B A I]`.
pub fn build_canonical_22n(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: f64,
) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::Shape(format!(
            "a is {n}x{n} but b is {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    spectral::check_commuting_normal(&[a.clone(), b.clone()], tol)?;
    let bd_resid = b.commutator(&a.adjoint()).frobenius_norm();
    if relative(bd_resid, a, b) > tol {
        return Err(Error::NotCommuting {
            first: 1,
            second: 0,
            residual: relative(bd_resid, a, b),
        });
    }
    let row = vec![
        b.matmul(a),
        b.clone(),
        a.clone(),
        ComplexMatrix::identity(n),
    ];
    Ok(stack_gram(&row))
}

/// Why a state fails the extraction procedure.
#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("rank hypothesis failed: rank of {what} is {found}, expected {expected}")]
    RankHypothesis {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("extracted A, B, C violate the commutation relations: {0}")]
    Commutation(CommutationReport),

    #[error("block ({row}, {col}) deviates from the canonical form (relative residual {residual:.3e}, tol {tol:.1e})")]
    BlockMismatch {
        row: BlockAddress,
        col: BlockAddress,
        residual: f64,
        tol: f64,
    },

    #[error(transparent)]
    Numeric(#[from] Error),
}

/// Result of [`extract_canonical`]: the form (with the original, ungauged
/// `d`) and the gauge `S = d^{-1/2}` acting on the fourth subsystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub cf: CanonicalForm,
    pub gauge: ComplexMatrix,
    /// Largest relative block residual seen during verification.
    pub max_block_residual: f64,
}

/// Block `(i, j)` (each `n × n`) of an `8n × 8n` matrix.
pub fn block(rho: &ComplexMatrix, n: usize, row: BlockAddress, col: BlockAddress) -> ComplexMatrix {
    rho.block(row.index() * n, col.index() * n, n, n)
}

/// Recovers `(A, B, C, D)` from a state in the canonical class.
///
/// `D` is the `|111⟩` block. After gauging it to the identity with
/// `I₈ ⊗ D^{-1/2}`, the bottom block row reads `[CBA CB CA C BA B A I]`, so
/// `A`, `B`, `C` are the `|110⟩`, `|101⟩`, `|011⟩` entries. All 64 gauged
/// blocks are then compared with `Wᵢ†Wⱼ`.
pub fn extract_canonical(
    rho: &ComplexMatrix,
    n: usize,
    tol: f64,
) -> std::result::Result<Extraction, ExtractError> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()).into());
    }
    let shape = SystemShape::qubits3_with(n)?;
    let side = rho.ensure_square()?;
    if side != 8 * n {
        return Err(Error::Shape(format!("{side}x{side} state for n = {n}")).into());
    }

    let rank = rank_kernel(rho, tol)?.rank;
    if rank != n {
        return Err(ExtractError::RankHypothesis {
            what: "the state",
            expected: n,
            found: rank,
        });
    }
    let d = block(rho, n, BlockAddress::TOP, BlockAddress::TOP).hermitian_part();
    let d_rank = rank_kernel(&d, tol)?.rank;
    if d_rank != n {
        return Err(ExtractError::RankHypothesis {
            what: "the |111⟩ block",
            expected: n,
            found: d_rank,
        });
    }
    let gauge = spectral::sqrt_psd(&d, tol, true)?;
    let id2 = ComplexMatrix::identity(2);
    let gauged = tensor::local_transform(
        rho,
        &shape,
        &[id2.clone(), id2.clone(), id2, gauge.clone()],
        tol,
    )?;

    let top = BlockAddress::TOP;
    let cf = CanonicalForm {
        n,
        a: block(&gauged, n, top, BlockAddress::new(1, 1, 0)),
        b: block(&gauged, n, top, BlockAddress::new(1, 0, 1)),
        c: block(&gauged, n, top, BlockAddress::new(0, 1, 1)),
        d,
    };
    let report = check_commutation(&cf, tol);
    if !report.passes {
        return Err(ExtractError::Commutation(report));
    }

    let scale = gauged.frobenius_norm();
    let ws = words(&cf);
    let mut worst: Option<(BlockAddress, BlockAddress, f64)> = None;
    for row in BlockAddress::all() {
        let wi_adj = ws[row.index()].adjoint();
        for col in BlockAddress::all() {
            let expect = wi_adj.matmul(&ws[col.index()]);
            let residual = block(&gauged, n, row, col).distance(&expect) / scale;
            if worst.is_none_or(|w| residual > w.2) {
                worst = Some((row, col, residual));
            }
        }
    }
    let (row, col, max_block_residual) = worst.expect("64 blocks");
    if max_block_residual > tol {
        return Err(ExtractError::BlockMismatch {
            row,
            col,
            residual: max_block_residual,
            tol,
        });
    }
    Ok(Extraction {
        cf,
        gauge,
        max_block_residual,
    })
}

/// Outcome of [`verify_kernel_family`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFamilyReport {
    /// `max ‖ρv‖ / (‖ρ‖_F ‖v‖)` over the `7n` vectors.
    pub max_residual: f64,
    pub span_dimension: usize,
    pub expected_dimension: usize,
    pub passes: bool,
}

/// The `7n` vectors `|abc⟩|k⟩ − |111⟩ W_abc |k⟩` (`abc ≠ 111`), in block order
/// then `k`. They annihilate the gauged state `W†W`.
pub fn kernel_family(cf: &CanonicalForm) -> Vec<Vec<C64>> {
    let n = cf.n;
    let top = BlockAddress::TOP.index() * n;
    let mut out = Vec::with_capacity(7 * n);
    for addr in BlockAddress::all().filter(|&a| a != BlockAddress::TOP) {
        let w = word_matrix(cf, addr);
        for k in 0..n {
            let mut v = vec![ZERO; 8 * n];
            v[addr.index() * n + k] = C64::new(1.0, 0.0);
            for i in 0..n {
                v[top + i] = -w[(i, k)];
            }
            out.push(v);
        }
    }
    out
}

/// Checks that the kernel family annihilates `rho` and spans `7n` dimensions.
///
/// For `d ≠ I` the family is carried into the frame of `rho` by
/// `I₈ ⊗ d^{-1/2}` (pseudo-inverse for singular `d`), since `rho` is the
/// gauged state conjugated by `I₈ ⊗ √d`.
pub fn verify_kernel_family(
    rho: &ComplexMatrix,
    cf: &CanonicalForm,
    tol: f64,
) -> Result<KernelFamilyReport> {
    let n = cf.n;
    let side = rho.ensure_square()?;
    if side != 8 * n {
        return Err(Error::Shape(format!("{side}x{side} state for n = {n}")));
    }
    let to_frame = spectral::pinv_sqrt_psd(&cf.d.hermitian_part(), tol)?;
    let rho_norm = rho.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut max_residual: f64 = 0.0;
    let mut mapped = Vec::with_capacity(7 * n);
    for v in kernel_family(cf) {
        let mut u = vec![ZERO; 8 * n];
        for blk in 0..8 {
            let part = to_frame.mul_vec(&v[blk * n..(blk + 1) * n]);
            u[blk * n..(blk + 1) * n].copy_from_slice(&part);
        }
        let norm = vector_norm(&u);
        let residual = if norm == 0.0 {
            0.0
        } else {
            vector_norm(&rho.mul_vec(&u)) / (rho_norm * norm)
        };
        max_residual = max_residual.max(residual);
        mapped.push(u);
    }

    let k = mapped.len();
    let gram = ComplexMatrix::from_fn(k, k, |i, j| crate::matrix::inner(&mapped[i], &mapped[j]));
    let span_dimension = rank_kernel(&gram.hermitian_part(), tol)?.rank;
    let expected_dimension = 7 * n;
    Ok(KernelFamilyReport {
        max_residual,
        span_dimension,
        expected_dimension,
        passes: max_residual <= tol && span_dimension == expected_dimension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{basis_vector, is_ppt, project_leading};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag_form() -> CanonicalForm {
        CanonicalForm::new(
            ComplexMatrix::from_real_diag(&[2.0, 3.0]),
            ComplexMatrix::from_real_diag(&[5.0, 7.0]),
            ComplexMatrix::from_real_diag(&[0.0, 1.0]),
            ComplexMatrix::identity(2),
        )
        .unwrap()
    }

    #[test]
    fn word_positions() {
        let cf = CanonicalForm::scalar(c(2.0), c(3.0), c(5.0), 1.0);
        let at = |a, b, cc| word_matrix(&cf, BlockAddress::new(a, b, cc))[(0, 0)].re;
        assert_eq!(at(1, 1, 1), 1.0);
        assert_eq!(at(0, 1, 1), 5.0);
        assert_eq!(at(1, 1, 0), 2.0);
        assert_eq!(at(0, 0, 0), 30.0);
        let row: Vec<f64> = (0..8).map(|i| words(&cf)[i][(0, 0)].re).collect();
        // [CBA CB CA C BA B A I]
        assert_eq!(row, vec![30.0, 15.0, 10.0, 5.0, 6.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn block_address_round_trip() {
        for i in 0..8 {
            assert_eq!(BlockAddress::from_index(i).index(), i);
        }
        assert_eq!(BlockAddress::from_index(3), BlockAddress::new(0, 1, 1));
        assert_eq!(BlockAddress::TOP.to_string(), "|111⟩");
    }

    #[test]
    fn scalar_builds() {
        let ones = build_canonical_222n(&CanonicalForm::scalar(c(1.0), c(1.0), c(1.0), 1.0), 1e-9)
            .unwrap();
        assert_eq!(ones, ComplexMatrix::from_fn(8, 8, |_, _| c(1.0)));
        let zero =
            build_canonical_222n(&CanonicalForm::scalar(ZERO, ZERO, ZERO, 1.0), 1e-9).unwrap();
        let mut expect = ComplexMatrix::zeros(8, 8);
        expect[(7, 7)] = c(1.0);
        assert_eq!(zero, expect);
    }

    #[test]
    fn diagonal_instance_properties() {
        let cf = diag_form();
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        let rk = rank_kernel(&rho, 1e-9).unwrap();
        assert_eq!((rk.rank, rk.kernel_dimension()), (2, 14));
        assert!(is_ppt(&rho, &cf.shape(), 1e-9).unwrap().is_ppt);
        let e1 = basis_vector(2, 1);
        let (d, _) = project_leading(&rho, &cf.shape(), &[&e1, &e1, &e1]).unwrap();
        assert!(d.distance(&cf.d) < 1e-14);
    }

    #[test]
    fn projection_onto_first_qubit_gives_22n_form() {
        let cf = diag_form();
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        let tilde = tensor::partial_projection(&rho, &cf.shape(), 0, &basis_vector(2, 1)).unwrap();
        let expect = build_canonical_22n(&cf.a, &cf.b, 1e-9).unwrap();
        assert!(tilde.max_abs_diff(&expect) < 1e-12);
        let rk = rank_kernel(&expect, 1e-9).unwrap();
        assert_eq!((rk.rank, rk.kernel_dimension()), (2, 6));
    }

    #[test]
    fn builder_22n_trivial_case() {
        let z = ComplexMatrix::zeros(1, 1);
        let rho = build_canonical_22n(&z, &z, 1e-9).unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(3, 3)] = c(1.0);
        assert_eq!(rho, expect);
    }

    #[test]
    fn commutation_report_flags_paulis() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let cf = CanonicalForm::new(
            x.clone(),
            z.clone(),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let report = check_commutation(&cf, 1e-9);
        assert!(!report.passes);
        let ba = report.relations.iter().find(|r| r.0 == "[B,A]").unwrap();
        assert!((ba.1 - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(build_canonical_222n(&cf, 1e-9).is_err());
        assert!(build_canonical_22n(&x, &z, 1e-9).is_err());

        let ok = check_commutation(&diag_form(), 1e-9);
        assert!(ok.passes);
        assert!(ok.relations.iter().all(|r| r.1 == 0.0));
    }

    #[test]
    fn extraction_of_examples() {
        let ones = ComplexMatrix::from_fn(8, 8, |_, _| c(1.0));
        let ex = extract_canonical(&ones, 1, 1e-9).unwrap();
        for m in [&ex.cf.a, &ex.cf.b, &ex.cf.c, &ex.cf.d] {
            assert!((m[(0, 0)] - c(1.0)).norm() < 1e-14);
        }

        // |111⟩⟨111| ⊗ I_n
        let n = 3;
        let mut top = ComplexMatrix::zeros(8, 8);
        top[(7, 7)] = c(1.0);
        let rho = tensor::kron(&top, &ComplexMatrix::identity(n)).unwrap();
        let ex = extract_canonical(&rho, n, 1e-9).unwrap();
        assert_eq!(ex.cf.a.max_abs(), 0.0);
        assert_eq!(ex.cf.b.max_abs(), 0.0);
        assert_eq!(ex.cf.c.max_abs(), 0.0);
        assert!(ex.cf.d.distance(&ComplexMatrix::identity(n)) < 1e-15);
    }

    #[test]
    fn extraction_round_trip_diagonal() {
        let cf = diag_form();
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        let ex = extract_canonical(&rho, 2, 1e-9).unwrap();
        assert!(ex.cf.a.distance(&cf.a) < 1e-12);
        assert!(ex.cf.b.distance(&cf.b) < 1e-12);
        assert!(ex.cf.c.distance(&cf.c) < 1e-12);
        assert!(ex.cf.d.distance(&cf.d) < 1e-12);
    }

    #[test]
    fn extraction_rank_failures() {
        let n = 2;
        let rho = tensor::kron(&ComplexMatrix::identity(8), &ComplexMatrix::identity(n)).unwrap();
        assert!(matches!(
            extract_canonical(&rho, n, 1e-9),
            Err(ExtractError::RankHypothesis {
                what: "the state",
                expected: 2,
                found: 16
            })
        ));
        // rank n but the |111⟩ block vanishes
        let mut bottom = ComplexMatrix::zeros(8, 8);
        bottom[(0, 0)] = c(1.0);
        let rho = tensor::kron(&bottom, &ComplexMatrix::identity(n)).unwrap();
        assert!(matches!(
            extract_canonical(&rho, n, 1e-9),
            Err(ExtractError::RankHypothesis {
                what: "the |111⟩ block",
                found: 0,
                ..
            })
        ));
    }

    #[test]
    fn extraction_reports_block_mismatch() {
        // v = (1,…,1, 1) except the |000⟩ entry: rank 1 but |000⟩ row is not CBA
        let mut v = vec![c(1.0); 8];
        v[0] = c(2.0);
        let rho = ComplexMatrix::projector(&v);
        match extract_canonical(&rho, 1, 1e-9) {
            Err(ExtractError::BlockMismatch { row, col, .. }) => {
                assert!(row.index() == 0 || col.index() == 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kernel_family_on_examples() {
        let cf = diag_form();
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        let report = verify_kernel_family(&rho, &cf, 1e-9).unwrap();
        assert!(report.passes, "{report:?}");
        assert_eq!(report.span_dimension, 14);
        assert!(report.max_residual <= 1e-10);

        let zero = CanonicalForm::new(
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let rho0 = build_canonical_222n(&zero, 1e-9).unwrap();
        let report = verify_kernel_family(&rho0, &zero, 1e-9).unwrap();
        assert_eq!(report.max_residual, 0.0);
        assert!(report.passes);
    }

    #[test]
    fn kernel_family_detects_perturbation() {
        let cf = diag_form();
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        let mut r = crate::rng::stream(3, crate::rng::Stream::Perturbation);
        let g = ComplexMatrix::from_fn(16, 16, |_, _| crate::rng::complex_normal(&mut r))
            .hermitian_part();
        let eps = 1e-3;
        let perturbed = &rho + &g.scale_real(eps * rho.frobenius_norm() / g.frobenius_norm());
        let report = verify_kernel_family(&perturbed, &cf, 1e-9).unwrap();
        assert!(!report.passes);
        assert!(
            report.max_residual > 1e-5 && report.max_residual < 1e-2,
            "{}",
            report.max_residual
        );
    }
}
