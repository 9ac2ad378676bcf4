//! Hermitian eigensolver, joint diagonalization of commuting normal
//! families, and PSD square roots.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::rng::{self, Stream};

/// Upper bound on cyclic Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// as columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ λ_k v_k v_k†`, optionally with each eigenvalue mapped through `f`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let scaled =
            ComplexMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * f(self.eigenvalues[j]));
        scaled.matmul(&self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Relative Hermiticity residual `‖m − m†‖_F / ‖m‖_F` (0 for the zero matrix).
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return 0.0;
    }
    m.distance(&m.adjoint()) / norm
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// The input must be Hermitian to `tol` relative Frobenius; only its
/// Hermitian part is used. Sweeps visit pairs `(p, q)`, `p < q`, in row order
/// and eigenvectors are phase-fixed so their largest-modulus entry is real
/// positive, which makes the output a deterministic function of the input.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    h.ensure_square()?;
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = hermiticity_residual(h);
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    jacobi_eigh(&h.hermitian_part())
}

/// Jacobi on an input already known to be Hermitian.
pub(crate) fn jacobi_eigh(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = h.rows();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let target = f64::EPSILON * norm;

    let mut converged = n <= 1 || norm == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        vectors.set_column(k, &col);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `V = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the `(p, q)`
/// plane, where `φ = arg a[p][q]`; the phase makes the pivot real so the
/// classical real rotation applies.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots that are already negligible against both diagonal entries.
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();

    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = conj_phase * (-s);
    let vqq = conj_phase * c;

    let n = a.rows();
    // A ← A V
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    // A ← V† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
    // V_acc ← V_acc V
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

/// Rotates `col` so its largest-modulus entry (first one on exact ties) is
/// real positive.
fn fix_phase(col: &mut [C64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let rot = col[best].conj() / best_mag;
    for z in col.iter_mut() {
        *z *= rot;
    }
    col[best] = C64::new(col[best].norm(), 0.0);
}

/// Common eigenbasis of a commuting normal family. `eigenvalue_lists[j][n]`
/// is the eigenvalue of input `j` on column `n` of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEigenDecomposition {
    pub basis: ComplexMatrix,
    pub eigenvalue_lists: Vec<Vec<C64>>,
    /// Number of coefficient draws used, starting at 1.
    pub attempts: usize,
}

impl JointEigenDecomposition {
    /// Eigenvalues of every input on common eigenvector `n`.
    pub fn tuple(&self, n: usize) -> Vec<C64> {
        self.eigenvalue_lists.iter().map(|l| l[n]).collect()
    }
}

/// Checks that each matrix is normal and that every pair commutes, at
/// `tol · ‖M_i‖_F · ‖M_j‖_F`.
pub fn check_commuting_normal(ms: &[ComplexMatrix], tol: f64) -> Result<()> {
    for (i, m) in ms.iter().enumerate() {
        let norm = m.frobenius_norm();
        let residual = m.commutator(&m.adjoint()).frobenius_norm();
        if residual > tol * norm * norm {
            return Err(Error::NotNormal {
                index: i,
                residual: residual / (norm * norm),
            });
        }
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let scale = ms[i].frobenius_norm() * ms[j].frobenius_norm();
            let residual = ms[i].commutator(&ms[j]).frobenius_norm();
            if residual > tol * scale {
                return Err(Error::NotCommuting {
                    first: i,
                    second: j,
                    residual: residual / scale,
                });
            }
        }
    }
    Ok(())
}

/// Simultaneously diagonalizes a commuting family of normal matrices.
///
/// Each attempt eigensolves the Hermitian combination
/// `Σ_j α_j (M_j + M_j†)/2 + β_j (M_j − M_j†)/(2i)` with Gaussian
/// coefficients drawn from `seed`, then accepts the basis only if every
/// `U† M_j U` is diagonal to `tol · ‖M_j‖_F`. An accidental degeneracy in the
/// combination is cured by redrawing, up to `max_retries` extra attempts.
pub fn simultaneous_diagonalize(
    ms: &[ComplexMatrix],
    tol: f64,
    seed: u64,
    max_retries: usize,
) -> Result<JointEigenDecomposition> {
    let Some(first) = ms.first() else {
        return Err(Error::InvalidArgument("empty matrix family".into()));
    };
    let n = first.ensure_square()?;
    for m in ms {
        if m.rows() != n || m.cols() != n {
            return Err(Error::Shape(format!(
                "family mixes {n}x{n} with {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    check_commuting_normal(ms, tol)?;

    let parts: Vec<(ComplexMatrix, ComplexMatrix)> = ms
        .iter()
        .map(|m| {
            let adj = m.adjoint();
            let re = (m + &adj).scale_real(0.5);
            let im = (m - &adj).scale(C64::new(0.0, -0.5));
            (re, im)
        })
        .collect();

    let mut rng = rng::stream(seed, Stream::JointDiagonalization);
    let mut worst = f64::INFINITY;
    for attempt in 1..=max_retries + 1 {
        let mut h = ComplexMatrix::zeros(n, n);
        for (re, im) in &parts {
            let alpha = rng::normal(&mut rng);
            let beta = rng::normal(&mut rng);
            h = &h + &(&re.scale_real(alpha) + &im.scale_real(beta));
        }
        let eig = jacobi_eigh(&h.hermitian_part())?;
        let u = eig.vectors;
        let u_adj = u.adjoint();

        let mut lists = Vec::with_capacity(ms.len());
        let mut attempt_worst: f64 = 0.0;
        for m in ms {
            let t = u_adj.matmul(&m.matmul(&u));
            let diag = t.diagonal();
            let off = (&t - &ComplexMatrix::from_diag(&diag)).frobenius_norm();
            let norm = m.frobenius_norm();
            let rel = if norm == 0.0 { off } else { off / norm };
            attempt_worst = attempt_worst.max(rel);
            lists.push(diag);
        }
        if attempt_worst <= tol {
            return Ok(JointEigenDecomposition {
                basis: u,
                eigenvalue_lists: lists,
                attempts: attempt,
            });
        }
        worst = worst.min(attempt_worst);
    }
    Err(Error::RetriesExhausted {
        attempts: max_retries + 1,
        residual: worst,
    })
}

/// `d^{1/2}` (or `d^{-1/2}` when `inverse`) through the eigendecomposition.
///
/// Eigenvalues in `[-tol·‖d‖_F, 0)` are clipped to zero. The inverse root
/// requires every eigenvalue to exceed `tol·‖d‖_F`.
pub fn sqrt_psd(d: &ComplexMatrix, tol: f64, inverse: bool) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(d, tol)?;
    let floor = tol * d.frobenius_norm();
    let min = eig.min_eigenvalue();
    if min < -floor {
        return Err(Error::Indefinite {
            min_eigenvalue: min,
        });
    }
    if inverse {
        if min <= floor {
            return Err(Error::Singular {
                min_eigenvalue: min,
            });
        }
        Ok(eig.reconstruct_with(|x| 1.0 / x.sqrt()).hermitian_part())
    } else {
        Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()).hermitian_part())
    }
}

/// Moore-Penrose style inverse square root: eigenvalues at or below
/// `tol·‖d‖_F` map to zero.
pub fn pinv_sqrt_psd(d: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(d, tol)?;
    let floor = tol * d.frobenius_norm();
    Ok(eig
        .reconstruct_with(|x| if x > floor { 1.0 / x.sqrt() } else { 0.0 })
        .hermitian_part())
}

/// `true` when `u† u = I` to `tol` in Frobenius norm.
pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square()
        && u.adjoint()
            .matmul(u)
            .distance(&ComplexMatrix::identity(u.rows()))
            <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = rng::stream(seed, Stream::Perturbation);
        let g = ComplexMatrix::from_fn(n, n, |_, _| rng::complex_normal(&mut rng));
        g.hermitian_part()
    }

    #[test]
    fn diagonal_input_sorts_and_permutes() {
        let h = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let eig = hermitian_eig(&h, 1e-12).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        let expect =
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(eig.vectors, expect);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = hermitian_eig(&x, 1e-12).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            hermitian_eig(&m, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&r, 1e-9),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn decomposition_invariants_on_random_input() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (16, 4), (40, 5)] {
            let h = random_hermitian(n, seed);
            let eig = hermitian_eig(&h, 1e-12).unwrap();
            let u = &eig.vectors;
            let gram = u.adjoint().matmul(u);
            assert!(gram.distance(&ComplexMatrix::identity(n)) <= 1e-10 * (n as f64).sqrt());
            let hu = h.matmul(u);
            let ul = ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)] * eig.eigenvalues[j]);
            assert!(hu.distance(&ul) <= 1e-8 * h.frobenius_norm());
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = eig.eigenvalues.iter().sum();
            assert!((trace - h.trace().re).abs() <= 1e-9 * h.frobenius_norm().max(1.0));
            assert!(eig.reconstruct().relative_distance(&h) <= 1e-10);
        }
    }

    #[test]
    fn phase_convention_is_applied() {
        let h = random_hermitian(6, 11);
        let eig = hermitian_eig(&h, 1e-12).unwrap();
        for k in 0..6 {
            let col = eig.eigenvector(k);
            let big = col
                .iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            assert_eq!(big.im, 0.0);
            assert!(big.re > 0.0);
        }
    }

    #[test]
    fn deterministic_output() {
        let h = random_hermitian(9, 21);
        let a = hermitian_eig(&h, 1e-12).unwrap();
        let b = hermitian_eig(&h, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn joint_diagonalization_of_diagonal_family() {
        let ms = vec![
            ComplexMatrix::from_real_diag(&[1.0, 2.0]),
            ComplexMatrix::from_real_diag(&[5.0, 5.0]),
        ];
        let joint = simultaneous_diagonalize(&ms, 1e-9, 0, 8).unwrap();
        let mut pairs: Vec<(f64, f64)> = (0..2)
            .map(|n| {
                (
                    joint.eigenvalue_lists[0][n].re,
                    joint.eigenvalue_lists[1][n].re,
                )
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((pairs[0].0 - 1.0).abs() < 1e-12 && (pairs[0].1 - 5.0).abs() < 1e-12);
        assert!((pairs[1].0 - 2.0).abs() < 1e-12 && (pairs[1].1 - 5.0).abs() < 1e-12);
        // basis is a permutation up to phases
        for j in 0..2 {
            let col = joint.basis.column(j);
            let mags: Vec<f64> = col.iter().map(|z| z.norm()).collect();
            assert!(mags.iter().any(|&m| (m - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn joint_diagonalization_rejects_non_commuting() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let err = simultaneous_diagonalize(&[x, z], 1e-9, 0, 4).unwrap_err();
        assert!(matches!(
            err,
            Error::NotCommuting {
                first: 0,
                second: 1,
                ..
            }
        ));
    }

    #[test]
    fn joint_diagonalization_rejects_non_normal() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let err = simultaneous_diagonalize(&[m], 1e-9, 0, 4).unwrap_err();
        assert!(matches!(err, Error::NotNormal { index: 0, .. }));
    }

    #[test]
    fn sqrt_examples() {
        let d = ComplexMatrix::from_real_diag(&[4.0, 9.0]);
        let r = sqrt_psd(&d, 1e-9, false).unwrap();
        assert!(r.distance(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
        let i3 = ComplexMatrix::identity(3);
        assert!(sqrt_psd(&i3, 1e-9, true).unwrap().distance(&i3) < 1e-14);
    }

    #[test]
    fn sqrt_of_gram_matrix_squares_back() {
        let mut rng = rng::stream(5, Stream::Perturbation);
        let g = ComplexMatrix::from_fn(5, 5, |_, _| rng::complex_normal(&mut rng));
        let d = g.adjoint().matmul(&g);
        let r = sqrt_psd(&d, 1e-9, false).unwrap();
        assert!(r.matmul(&r).relative_distance(&d) <= 1e-8);
        assert!(r.commutator(&d).frobenius_norm() <= 1e-9 * d.frobenius_norm().powi(2));
        let ri = sqrt_psd(&d, 1e-9, true).unwrap();
        assert!(ri.matmul(&r).distance(&ComplexMatrix::identity(5)) <= 1e-8);
    }

    #[test]
    fn sqrt_errors() {
        let indefinite = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(
            sqrt_psd(&indefinite, 1e-9, false),
            Err(Error::Indefinite { .. })
        ));
        let singular = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(sqrt_psd(&singular, 1e-9, false).is_ok());
        assert!(matches!(
            sqrt_psd(&singular, 1e-9, true),
            Err(Error::Singular { .. })
        ));
        let p = pinv_sqrt_psd(&ComplexMatrix::from_real_diag(&[4.0, 0.0]), 1e-9).unwrap();
        assert!(p.distance(&ComplexMatrix::from_real_diag(&[0.5, 0.0])) < 1e-14);
    }
}
