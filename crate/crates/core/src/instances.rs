//! Seeded ground-truth instances and negative controls.

use serde::{Deserialize, Serialize};

use crate::canonical::{build_canonical_222n, CanonicalForm};
use crate::error::{Error, Result};
use crate::matrix::{inner, vector_norm, ComplexMatrix, C64};
use crate::rng::{self, Rng, Stream};
use crate::shape::SystemShape;
use crate::tensor::{self, DEFAULT_TOL};

/// Haar-distributed `n × n` unitary drawn from `rng`.
///
/// Orthonormalizes the columns of a complex Ginibre matrix with modified
/// Gram-Schmidt (two passes). The implied triangular factor has a positive
/// real diagonal, which makes the QR factorization unique and the result
/// Haar distributed.
pub fn haar_unitary_from(rng: &mut Rng, n: usize) -> ComplexMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| rng::complex_normal(rng)).collect())
        .collect();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj = inner(q, v);
                for (x, &y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = vector_norm(v);
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn haar_unitary(n: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_from(&mut rng::stream(seed, Stream::Unitaries), n)
}

/// `U diag(σ) W†` with Haar `U`, `W` and singular values uniform in `[lo, hi]`.
pub fn random_invertible_from(rng: &mut Rng, n: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let u = haar_unitary_from(rng, n);
    let w = haar_unitary_from(rng, n);
    let sigma: Vec<f64> = (0..n).map(|_| rng::uniform(rng, lo, hi)).collect();
    let us = ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)] * sigma[j]);
    us.matmul(&w.adjoint())
}

/// Three commuting normal matrices sharing the eigenbasis `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingFamily {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub basis: ComplexMatrix,
    /// Planted eigenvalues of `a`, `b`, `c` on each column of `basis`.
    pub eigenvalues: [Vec<C64>; 3],
}

fn disk_sample(rng: &mut Rng, radius: f64) -> C64 {
    let r = radius * rng::uniform(rng, 0.0, 1.0).sqrt();
    let theta = rng::uniform(rng, 0.0, std::f64::consts::TAU);
    C64::from_polar(r, theta)
}

/// `U diag(λ) U†` for a shared Haar `U` and eigenvalues uniform in the disk
/// of radius `scale`.
pub fn random_commuting_family(n: usize, seed: u64, scale: f64) -> CommutingFamily {
    let basis = haar_unitary(n, seed);
    let mut ev_rng = rng::stream(seed, Stream::Eigenvalues);
    let eigenvalues: [Vec<C64>; 3] =
        std::array::from_fn(|_| (0..n).map(|_| disk_sample(&mut ev_rng, scale)).collect());
    let conj = |vals: &[C64]| {
        let ud = ComplexMatrix::from_fn(n, n, |i, j| basis[(i, j)] * vals[j]);
        ud.matmul(&basis.adjoint())
    };
    CommutingFamily {
        a: conj(&eigenvalues[0]),
        b: conj(&eigenvalues[1]),
        c: conj(&eigenvalues[2]),
        basis: basis.clone(),
        eigenvalues,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DMode {
    #[default]
    Identity,
    RandomPd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceOptions {
    pub d_mode: DMode,
    pub disguise: bool,
    /// Radius of the disk the planted eigenvalues are drawn from.
    pub scale: f64,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        Self {
            d_mode: DMode::Identity,
            disguise: false,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceLabel {
    Canonical,
    Disguised,
    EntangledControl,
    ProductControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub cf: CanonicalForm,
    /// `L_A, L_B, L_C, L_D` such that `rho = (⊗L) build(cf) (⊗L)†`.
    pub disguise_ops: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub rho: ComplexMatrix,
    pub shape: SystemShape,
    pub ground_truth: Option<GroundTruth>,
    pub label: InstanceLabel,
    pub seed: u64,
}

/// `V diag(uniform[0.5, 2]) V†` with Haar `V`.
fn random_pd(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng::stream(seed, Stream::PositiveDefinite);
    let v = haar_unitary_from(&mut r, n);
    let eig: Vec<f64> = (0..n).map(|_| rng::uniform(&mut r, 0.5, 2.0)).collect();
    let vd = ComplexMatrix::from_fn(n, n, |i, j| v[(i, j)] * eig[j]);
    vd.matmul(&v.adjoint()).hermitian_part()
}

/// A canonical state with known `(A, B, C, D)`, optionally conjugated by
/// well-conditioned local operators (singular values in `[0.8, 1.25]`).
pub fn random_instance(n: usize, seed: u64, options: InstanceOptions) -> Result<InstanceBundle> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let fam = random_commuting_family(n, seed, options.scale);
    let d = match options.d_mode {
        DMode::Identity => ComplexMatrix::identity(n),
        DMode::RandomPd => random_pd(n, seed),
    };
    let cf = CanonicalForm::new(fam.a, fam.b, fam.c, d)?;
    let canonical = build_canonical_222n(&cf, DEFAULT_TOL)?;
    let shape = cf.shape();

    let (rho, disguise_ops, label) = if options.disguise {
        let mut r = rng::stream(seed, Stream::Disguise);
        let ops: Vec<ComplexMatrix> = shape
            .dims()
            .iter()
            .map(|&dim| random_invertible_from(&mut r, dim, 0.8, 1.25))
            .collect();
        let rho = tensor::local_transform(&canonical, &shape, &ops, DEFAULT_TOL)?.hermitian_part();
        (rho, ops, InstanceLabel::Disguised)
    } else {
        let ids = shape
            .dims()
            .iter()
            .map(|&dim| ComplexMatrix::identity(dim))
            .collect();
        (canonical, ids, InstanceLabel::Canonical)
    };
    Ok(InstanceBundle {
        rho,
        shape,
        ground_truth: Some(GroundTruth { cf, disguise_ops }),
        label,
        seed,
    })
}

/// `p |GHZ⟩⟨GHZ| + (1 − p) I₈/8` on three qubits.
pub fn ghz_werner(p: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "mixing weight {p} outside [0, 1]"
        )));
    }
    let mut rho = ComplexMatrix::identity(8).scale_real((1.0 - p) / 8.0);
    let half = C64::new(p / 2.0, 0.0);
    for &i in &[0, 7] {
        for &j in &[0, 7] {
            rho[(i, j)] += half;
        }
    }
    Ok(rho)
}

/// `ghz_werner(p) ⊗ |0⟩⟨0|` on `[2, 2, 2, n]`.
pub fn ghz_werner_control(p: f64, n: usize, seed: u64) -> Result<InstanceBundle> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut zero = ComplexMatrix::zeros(n, n);
    zero[(0, 0)] = C64::new(1.0, 0.0);
    Ok(InstanceBundle {
        rho: tensor::kron(&ghz_werner(p)?, &zero)?,
        shape: SystemShape::qubits3_with(n)?,
        ground_truth: None,
        label: InstanceLabel::EntangledControl,
        seed,
    })
}

/// A random pure product state on `[2, 2, 2, n]`.
pub fn product_control(n: usize, seed: u64) -> Result<InstanceBundle> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let shape = SystemShape::qubits3_with(n)?;
    let mut r = rng::stream(seed, Stream::Unitaries);
    let factors: Vec<Vec<C64>> = shape
        .dims()
        .iter()
        .map(|&d| (0..d).map(|_| rng::complex_normal(&mut r)).collect())
        .collect();
    let refs: Vec<&[C64]> = factors.iter().map(Vec::as_slice).collect();
    let v = tensor::kron_vectors(&refs);
    Ok(InstanceBundle {
        rho: ComplexMatrix::projector(&v),
        shape,
        ground_truth: None,
        label: InstanceLabel::ProductControl,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{check_commutation, extract_canonical};
    use crate::spectral::{hermitian_eig, is_unitary, simultaneous_diagonalize};
    use crate::tensor::{is_ppt, partial_transpose, rank_kernel};

    #[test]
    fn haar_is_unitary_and_deterministic() {
        let u1 = haar_unitary(1, 3);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-15);
        for n in [2, 3, 8, 17] {
            let u = haar_unitary(n, 42);
            assert!(is_unitary(&u, 1e-12 * (n as f64).sqrt()));
            assert_eq!(u, haar_unitary(n, 42));
        }
        assert_ne!(haar_unitary(4, 1), haar_unitary(4, 2));
    }

    #[test]
    fn haar_first_moment() {
        // E|U₀₀|² = 1/n; the variance of |U₀₀|² is (n−1)/(n²(n+1)).
        let n = 4;
        let draws = 1000;
        let mut r = rng::stream(99, Stream::Unitaries);
        let samples: Vec<f64> = (0..draws)
            .map(|_| haar_unitary_from(&mut r, n)[(0, 0)].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let nf = n as f64;
        let sd = ((nf - 1.0) / (nf * nf * (nf + 1.0))).sqrt() / (draws as f64).sqrt();
        assert!((mean - 1.0 / nf).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn commuting_family_properties() {
        let fam = random_commuting_family(5, 8, 1.0);
        let cf = CanonicalForm::new(
            fam.a.clone(),
            fam.b.clone(),
            fam.c.clone(),
            ComplexMatrix::identity(5),
        )
        .unwrap();
        let report = check_commutation(&cf, 1e-12);
        assert!(report.relations.iter().all(|r| r.1 <= 1e-12), "{report}");

        let joint = simultaneous_diagonalize(&[fam.a, fam.b, fam.c], 1e-9, 1, 8).unwrap();
        for k in 0..5 {
            let planted: Vec<C64> = fam.eigenvalues.iter().map(|l| l[k]).collect();
            let hit = (0..5).any(|m| {
                joint
                    .tuple(m)
                    .iter()
                    .zip(&planted)
                    .all(|(x, y)| (x - y).norm() < 1e-8)
            });
            assert!(hit, "planted triple {k} not recovered");
        }

        let zero = random_commuting_family(3, 1, 0.0);
        assert_eq!(zero.a.max_abs(), 0.0);
        assert_eq!(zero.c.max_abs(), 0.0);
    }

    #[test]
    fn trivial_instance_is_top_projector() {
        let opts = InstanceOptions {
            scale: 0.0,
            ..InstanceOptions::default()
        };
        let bundle = random_instance(1, 0, opts).unwrap();
        let mut expect = ComplexMatrix::zeros(8, 8);
        expect[(7, 7)] = C64::new(1.0, 0.0);
        assert_eq!(bundle.rho, expect);
    }

    #[test]
    fn instances_are_ppt_with_expected_rank() {
        for (n, disguise) in [(1, false), (2, true), (3, false), (3, true)] {
            let opts = InstanceOptions {
                d_mode: DMode::RandomPd,
                disguise,
                scale: 1.0,
            };
            let bundle = random_instance(n, 5, opts).unwrap();
            assert!(is_ppt(&bundle.rho, &bundle.shape, 1e-9).unwrap().is_ppt);
            let rk = rank_kernel(&bundle.rho, 1e-9).unwrap();
            assert_eq!(rk.rank, n);
            assert_eq!(rk.kernel_dimension(), 7 * n);
            if !disguise {
                let ex = extract_canonical(&bundle.rho, n, 1e-9).unwrap();
                let truth = bundle.ground_truth.unwrap().cf;
                assert!(ex.cf.a.relative_distance(&truth.a) < 1e-8);
            }
        }
    }

    #[test]
    fn disguise_reproduces_state() {
        let opts = InstanceOptions {
            d_mode: DMode::RandomPd,
            disguise: true,
            scale: 1.0,
        };
        let bundle = random_instance(3, 17, opts).unwrap();
        let truth = bundle.ground_truth.as_ref().unwrap();
        let base = build_canonical_222n(&truth.cf, 1e-9).unwrap();
        let again =
            tensor::local_transform(&base, &bundle.shape, &truth.disguise_ops, 1e-9).unwrap();
        assert!(again.relative_distance(&bundle.rho) <= 1e-10);
        assert_eq!(bundle, random_instance(3, 17, opts).unwrap());
    }

    #[test]
    fn ghz_werner_examples() {
        let shape = SystemShape::new(vec![2, 2, 2]).unwrap();
        let mixed = ghz_werner(0.0).unwrap();
        assert_eq!(mixed, ComplexMatrix::identity(8).scale_real(0.125));
        assert!(is_ppt(&mixed, &shape, 1e-9).unwrap().is_ppt);

        let pure = ghz_werner(1.0).unwrap();
        let pt = partial_transpose(&pure, &shape, &[0]).unwrap();
        assert!((hermitian_eig(&pt, 1e-12).unwrap().min_eigenvalue() + 0.5).abs() < 1e-14);

        let r = ghz_werner(0.9).unwrap();
        // exact up to the rounding of the diagonal sum
        assert!((r.trace() - C64::new(1.0, 0.0)).norm() <= 4.0 * f64::EPSILON);
        assert_eq!(ghz_werner(0.5).unwrap().trace(), C64::new(1.0, 0.0));
        assert_eq!(r, r.adjoint());
        assert!(!is_ppt(&r, &shape, 1e-9).unwrap().is_ppt);
        assert!(ghz_werner(1.5).is_err());
        assert!(ghz_werner(-0.1).is_err());
    }

    #[test]
    fn product_control_is_ppt() {
        let b = product_control(3, 4).unwrap();
        assert!(is_ppt(&b.rho, &b.shape, 1e-9).unwrap().is_ppt);
        assert_eq!(rank_kernel(&b.rho, 1e-9).unwrap().rank, 1);
    }
}
