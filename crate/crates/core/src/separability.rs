//! Explicit product decompositions for canonical-class states and the
//! certification pipeline around them.

use serde::{Deserialize, Serialize};

use crate::canonical::{check_commutation, extract_canonical, CanonicalForm};
use crate::error::{Error, Result};
use crate::instances::haar_unitary_from;
use crate::io::complex_vec;
use crate::matrix::{vector_norm, ComplexMatrix, C64, ZERO};
use crate::rng::{self, Stream};
use crate::shape::SystemShape;
use crate::spectral::{self, simultaneous_diagonalize};
use crate::tensor::{self, basis_vector, is_ppt, rank_kernel, PptReport};

/// Redraws allowed when the random combination in joint diagonalization hits
/// a degenerate spectrum.
pub const JOINT_DIAG_RETRIES: usize = 16;
pub const DEFAULT_BUDGET: usize = 200;
pub const DEFAULT_CERT_TOL: f64 = 1e-7;

/// `|psi⟩⟨psi| ⊗ |phi⟩⟨phi| ⊗ |omega⟩⟨omega| ⊗ |g⟩⟨g|`, weights absorbed into
/// the vector norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    #[serde(with = "complex_vec")]
    pub psi: Vec<C64>,
    #[serde(with = "complex_vec")]
    pub phi: Vec<C64>,
    #[serde(with = "complex_vec")]
    pub omega: Vec<C64>,
    #[serde(with = "complex_vec")]
    pub g: Vec<C64>,
}

impl ProductTerm {
    /// Trace of the term: product of the squared factor norms.
    pub fn weight(&self) -> f64 {
        [&self.psi, &self.phi, &self.omega, &self.g]
            .iter()
            .map(|v| vector_norm(v).powi(2))
            .product()
    }

    /// Splits off the weight, returning it with unit-norm factors.
    pub fn normalized(&self) -> (f64, ProductTerm) {
        let unit = |v: &[C64]| {
            let n = vector_norm(v);
            if n == 0.0 {
                v.to_vec()
            } else {
                v.iter().map(|z| z / n).collect()
            }
        };
        (
            self.weight(),
            ProductTerm {
                psi: unit(&self.psi),
                phi: unit(&self.phi),
                omega: unit(&self.omega),
                g: unit(&self.g),
            },
        )
    }

    pub fn product_vector(&self) -> Vec<C64> {
        tensor::kron_vectors(&[&self.psi, &self.phi, &self.omega, &self.g])
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProductDecomposition {
    pub terms: Vec<ProductTerm>,
}

impl ProductDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Product decomposition of the canonical state of `cf`.
///
/// With `fₙ` the common eigenvectors of `A, B, C` and `(aₙ, bₙ, cₙ)` their
/// eigenvalues, term `n` is `(c̄ₙ, 1) ⊗ (b̄ₙ, 1) ⊗ (āₙ, 1) ⊗ √D fₙ`. Note the
/// first qubit carries `C`'s eigenvalue and the third carries `A`'s.
pub fn decompose_canonical(
    cf: &CanonicalForm,
    tol: f64,
    seed: u64,
) -> Result<ProductDecomposition> {
    let report = check_commutation(cf, tol);
    if !report.passes {
        return Err(Error::InvalidArgument(format!(
            "canonical form violates its relations: {report}"
        )));
    }
    let eig = spectral::hermitian_eig(&cf.d, tol)?;
    let floor = tol * cf.d.frobenius_norm();
    if eig.min_eigenvalue() <= floor {
        return Err(Error::Singular {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    let root = eig.reconstruct_with(f64::sqrt).hermitian_part();
    let joint = simultaneous_diagonalize(
        &[cf.a.clone(), cf.b.clone(), cf.c.clone()],
        tol,
        seed,
        JOINT_DIAG_RETRIES,
    )?;
    let one = C64::new(1.0, 0.0);
    let terms = (0..cf.n)
        .map(|k| {
            let (a, b, c) = (
                joint.eigenvalue_lists[0][k],
                joint.eigenvalue_lists[1][k],
                joint.eigenvalue_lists[2][k],
            );
            ProductTerm {
                psi: vec![c.conj(), one],
                phi: vec![b.conj(), one],
                omega: vec![a.conj(), one],
                g: root.mul_vec(&joint.basis.column(k)),
            }
        })
        .collect();
    Ok(ProductDecomposition { terms })
}

/// `Σ kron(ψψ†, φφ†, ωω†, gg†)` on `[2, 2, 2, n]`.
pub fn reconstruct_decomposition(pd: &ProductDecomposition, n: usize) -> Result<ComplexMatrix> {
    let side = 8 * n;
    let mut out = ComplexMatrix::zeros(side, side);
    for (k, t) in pd.terms.iter().enumerate() {
        if t.psi.len() != 2 || t.phi.len() != 2 || t.omega.len() != 2 || t.g.len() != n {
            return Err(Error::Shape(format!(
                "term {k} has factor lengths ({}, {}, {}, {}), expected (2, 2, 2, {n})",
                t.psi.len(),
                t.phi.len(),
                t.omega.len(),
                t.g.len()
            )));
        }
        let v = t.product_vector();
        let data = out.as_mut_slice();
        for i in 0..side {
            if v[i] == ZERO {
                continue;
            }
            for j in 0..side {
                data[i * side + j] += v[i] * v[j].conj();
            }
        }
    }
    Ok(out)
}

/// Local frame on the three qubits in which `⟨111|ρ|111⟩` has full rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductFrame {
    /// `L_A, L_B, L_C`; the frame's state is `(L_A⊗L_B⊗L_C⊗I) ρ (…)†`.
    pub local_ops: Vec<ComplexMatrix>,
    /// `None` for the identity frame, otherwise the random trial index.
    pub trial: Option<usize>,
}

fn top_block_rank(rho: &ComplexMatrix, shape: &SystemShape, tol: f64) -> Result<usize> {
    let e1 = basis_vector(2, 1);
    let (block, _) = tensor::project_leading(rho, shape, &[&e1, &e1, &e1])?;
    Ok(rank_kernel(&block.hermitian_part(), tol)?.rank)
}

fn frame_ops(seed: u64, trial: usize) -> Vec<ComplexMatrix> {
    let mut r = rng::substream(seed, Stream::FrameSearch, trial as u64);
    (0..3).map(|_| haar_unitary_from(&mut r, 2)).collect()
}

/// Searches for a product frame with a full-rank `|111⟩` projection.
///
/// Tries the identity first, then `budget` seeded triples of Haar unitaries.
/// `Ok(None)` only means the search ran out of budget; it says nothing about
/// whether such a frame exists.
pub fn find_product_basis(
    rho: &ComplexMatrix,
    n: usize,
    tol: f64,
    budget: usize,
    seed: u64,
) -> Result<Option<ProductFrame>> {
    let shape = SystemShape::qubits3_with(n)?;
    let side = rho.ensure_square()?;
    if side != shape.total() {
        return Err(Error::Shape(format!("{side}x{side} state for n = {n}")));
    }
    let state = tensor::psd_check(rho, tol)?;
    if !state.is_psd {
        return Err(Error::NotPsdState {
            min_eigenvalue: state.min_eigenvalue,
        });
    }
    if top_block_rank(rho, &shape, tol)? == n {
        return Ok(Some(ProductFrame {
            local_ops: vec![ComplexMatrix::identity(2); 3],
            trial: None,
        }));
    }
    let id_n = ComplexMatrix::identity(n);
    for trial in 0..budget {
        let mut ops = frame_ops(seed, trial);
        ops.push(id_n.clone());
        let moved = tensor::local_transform(rho, &shape, &ops, tol)?;
        if top_block_rank(&moved, &shape, tol)? == n {
            ops.pop();
            return Ok(Some(ProductFrame {
                local_ops: ops,
                trial: Some(trial),
            }));
        }
    }
    Ok(None)
}

/// A checked product decomposition of a state in its original frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub n: usize,
    pub decomposition: ProductDecomposition,
    /// `L_A, L_B, L_C` of the product frame and the gauge `S` on the fourth
    /// subsystem that brings the state to the canonical frame.
    pub local_ops: Vec<ComplexMatrix>,
    /// `‖ρ − Σ terms‖_F / ‖ρ‖_F`.
    pub residual: f64,
    pub ppt_report: PptReport,
    pub seed: u64,
    pub tol: f64,
    pub frame_trial: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    Certified(Box<SeparabilityCertificate>),
    /// At least one partial transpose has a negative eigenvalue: entangled.
    NotPpt(PptReport),
    /// The state could not be brought into the constructive class. This is
    /// inconclusive, never a claim of entanglement.
    HypothesisNotMet(String),
}

impl Certification {
    pub fn certificate(&self) -> Option<&SeparabilityCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub tol: f64,
    pub budget: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_CERT_TOL,
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

fn invert_2x2(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() <= f64::EPSILON * m.frobenius_norm().powi(2) {
        return Err(Error::Singular {
            min_eigenvalue: det.norm(),
        });
    }
    Ok(ComplexMatrix::from_rows(&[
        vec![m[(1, 1)] / det, -m[(0, 1)] / det],
        vec![-m[(1, 0)] / det, m[(0, 0)] / det],
    ]))
}

/// Relative Frobenius error of reconstructing `rho` from `pd`.
pub fn reconstruction_residual(
    rho: &ComplexMatrix,
    pd: &ProductDecomposition,
    n: usize,
) -> Result<f64> {
    let recon = reconstruct_decomposition(pd, n)?;
    if recon.rows() != rho.rows() || recon.cols() != rho.cols() {
        return Err(Error::Shape(format!(
            "decomposition for n = {n} does not match a {}x{} state",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(recon.relative_distance(rho))
}

/// Full pipeline: Peres gate, rank hypothesis, frame search, extraction,
/// decomposition, pullback to the original frame, and reconstruction check.
pub fn certify_separability(
    rho: &ComplexMatrix,
    n: usize,
    options: CertifyOptions,
) -> Result<Certification> {
    let CertifyOptions { tol, budget, seed } = options;
    let shape = SystemShape::qubits3_with(n)?;

    let ppt_report = is_ppt(rho, &shape, tol)?;
    if !ppt_report.is_ppt {
        return Ok(Certification::NotPpt(ppt_report));
    }
    let rank = rank_kernel(rho, tol)?.rank;
    if rank != n {
        return Ok(Certification::HypothesisNotMet(format!(
            "rank hypothesis: state has rank {rank}, expected {n}"
        )));
    }
    let Some(frame) = find_product_basis(rho, n, tol, budget, seed)? else {
        return Ok(Certification::HypothesisNotMet(format!(
            "no product frame with a full-rank |111⟩ projection found in {budget} trials (inconclusive)"
        )));
    };

    let mut ops = frame.local_ops.clone();
    ops.push(ComplexMatrix::identity(n));
    let framed = tensor::local_transform(rho, &shape, &ops, tol)?;
    let extraction = match extract_canonical(&framed, n, tol) {
        Ok(ex) => ex,
        Err(e) => {
            return Ok(Certification::HypothesisNotMet(format!(
                "extraction failed in the found frame: {e}"
            )))
        }
    };
    let local = decompose_canonical(&extraction.cf, tol, seed)?;

    let inverses: Vec<ComplexMatrix> = frame
        .local_ops
        .iter()
        .map(invert_2x2)
        .collect::<Result<_>>()?;
    let terms = local
        .terms
        .into_iter()
        .map(|t| ProductTerm {
            psi: inverses[0].mul_vec(&t.psi),
            phi: inverses[1].mul_vec(&t.phi),
            omega: inverses[2].mul_vec(&t.omega),
            g: t.g,
        })
        .collect();
    let decomposition = ProductDecomposition { terms };
    let residual = reconstruction_residual(rho, &decomposition, n)?;
    if residual > tol {
        return Ok(Certification::HypothesisNotMet(format!(
            "reconstruction residual {residual:.3e} exceeds tolerance {tol:.1e}"
        )));
    }

    let mut local_ops = frame.local_ops;
    local_ops.push(extraction.gauge);
    Ok(Certification::Certified(Box::new(
        SeparabilityCertificate {
            n,
            decomposition,
            local_ops,
            residual,
            ppt_report,
            seed,
            tol,
            frame_trial: frame.trial,
        },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical_222n;
    use crate::instances::{ghz_werner_control, random_instance, DMode, InstanceOptions};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(u: &[C64], v: &[C64]) -> bool {
        u.len() == v.len() && u.iter().zip(v).all(|(a, b)| (a - b).norm() < 1e-12)
    }

    #[test]
    fn trivial_decomposition() {
        let cf = CanonicalForm::scalar(ZERO, ZERO, ZERO, 1.0);
        let pd = decompose_canonical(&cf, 1e-9, 0).unwrap();
        assert_eq!(pd.len(), 1);
        let t = &pd.terms[0];
        let e1 = vec![ZERO, c(1.0)];
        assert!(close(&t.psi, &e1) && close(&t.phi, &e1) && close(&t.omega, &e1));
        assert!(close(&t.g, &[c(1.0)]));
    }

    #[test]
    fn diagonal_decomposition_terms() {
        let cf = CanonicalForm::new(
            ComplexMatrix::from_real_diag(&[2.0, 3.0]),
            ComplexMatrix::from_real_diag(&[5.0, 7.0]),
            ComplexMatrix::from_real_diag(&[0.0, 1.0]),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let pd = decompose_canonical(&cf, 1e-9, 0).unwrap();
        assert_eq!(pd.len(), 2);
        // Terms are indexed by the joint basis; identify them through g.
        for t in &pd.terms {
            let (_, unit) = t.normalized();
            let k = if unit.g[0].norm() > 0.5 { 0 } else { 1 };
            let (a, b, cc) = [(2.0, 5.0, 0.0), (3.0, 7.0, 1.0)][k];
            assert!(close(&t.psi, &[c(cc), c(1.0)]));
            assert!(close(&t.phi, &[c(b), c(1.0)]));
            assert!(close(&t.omega, &[c(a), c(1.0)]));
            assert!((t.g[k].norm() - 1.0).abs() < 1e-12);
        }
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        assert!(reconstruction_residual(&rho, &pd, 2).unwrap() < 1e-12);
    }

    #[test]
    fn complex_eigenvalue_is_conjugated() {
        let cf = CanonicalForm::scalar(C64::new(0.0, 1.0), c(0.5), C64::new(0.3, -0.2), 1.0);
        let pd = decompose_canonical(&cf, 1e-9, 0).unwrap();
        assert!(close(&pd.terms[0].omega, &[C64::new(0.0, -1.0), c(1.0)]));
        assert!(close(&pd.terms[0].psi, &[C64::new(0.3, 0.2), c(1.0)]));
        let rho = build_canonical_222n(&cf, 1e-9).unwrap();
        assert!(reconstruction_residual(&rho, &pd, 1).unwrap() < 1e-14);
    }

    #[test]
    fn singular_d_is_rejected() {
        let cf = CanonicalForm::scalar(c(1.0), c(1.0), c(1.0), 0.0);
        assert!(matches!(
            decompose_canonical(&cf, 1e-9, 0),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn reconstruct_edge_cases() {
        let empty = ProductDecomposition::default();
        assert_eq!(
            reconstruct_decomposition(&empty, 2).unwrap(),
            ComplexMatrix::zeros(16, 16)
        );

        let t = ProductTerm {
            psi: vec![c(1.0), c(1.0)],
            phi: vec![c(0.0), c(2.0)],
            omega: vec![C64::new(0.0, 1.0), c(0.0)],
            g: vec![c(1.0), c(-1.0), c(0.5)],
        };
        let single = ProductDecomposition {
            terms: vec![t.clone()],
        };
        let m = reconstruct_decomposition(&single, 3).unwrap();
        assert!((m.trace().re - t.weight()).abs() < 1e-12);
        assert_eq!(tensor::rank_kernel(&m, 1e-9).unwrap().rank, 1);

        let bad = ProductDecomposition {
            terms: vec![ProductTerm {
                g: vec![c(1.0)],
                ..t
            }],
        };
        assert!(reconstruct_decomposition(&bad, 3).is_err());
    }

    #[test]
    fn identity_frame_for_canonical_state() {
        let bundle = random_instance(3, 2, InstanceOptions::default()).unwrap();
        let frame = find_product_basis(&bundle.rho, 3, 1e-9, 10, 0)
            .unwrap()
            .unwrap();
        assert_eq!(frame.trial, None);
    }

    #[test]
    fn search_finds_frame_when_top_block_is_deficient() {
        // Rotate a canonical state so |111⟩ carries no weight on qubit A.
        let bundle = random_instance(2, 4, InstanceOptions::default()).unwrap();
        let mut top = ComplexMatrix::zeros(2, 2);
        top[(0, 0)] = c(1.0);
        // |0⟩⟨0| ⊗ ρ_rest has a vanishing |1⟩ projection on A.
        let rest =
            tensor::partial_projection(&bundle.rho, &bundle.shape, 0, &basis_vector(2, 1)).unwrap();
        let rho = tensor::kron(&top, &rest).unwrap();
        assert_eq!(top_block_rank(&rho, &bundle.shape, 1e-9).unwrap(), 0);
        let frame = find_product_basis(&rho, 2, 1e-9, 200, 7).unwrap().unwrap();
        assert!(frame.trial.is_some());
        let mut moved_ops = frame.local_ops.clone();
        moved_ops.push(ComplexMatrix::identity(2));
        let moved = tensor::local_transform(&rho, &bundle.shape, &moved_ops, 1e-9).unwrap();
        assert_eq!(top_block_rank(&moved, &bundle.shape, 1e-9).unwrap(), 2);
        // …and the whole pipeline certifies it
        let cert = certify_separability(&rho, 2, CertifyOptions::default()).unwrap();
        assert!(cert.certificate().is_some(), "{cert:?}");
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        // A pure product state has rank-1 projections in every frame.
        let mut v = vec![ZERO; 16];
        v[0] = c(1.0);
        let rho = ComplexMatrix::projector(&v);
        let frame = find_product_basis(&rho, 2, 1e-9, 5, 0).unwrap();
        assert!(frame.is_none());
    }

    #[test]
    fn certifies_disguised_instance() {
        let opts = InstanceOptions {
            d_mode: DMode::RandomPd,
            disguise: true,
            scale: 1.0,
        };
        let bundle = random_instance(3, 11, opts).unwrap();
        let outcome = certify_separability(&bundle.rho, 3, CertifyOptions::default()).unwrap();
        let cert = outcome.certificate().expect("certified");
        assert!(cert.residual <= 1e-7);
        assert_eq!(cert.decomposition.len(), 3);
        assert_eq!(cert.local_ops.len(), 4);
        let recon = reconstruct_decomposition(&cert.decomposition, 3).unwrap();
        assert!((recon.trace() - bundle.rho.trace()).norm() <= 1e-8 * bundle.rho.trace().norm());
    }

    #[test]
    fn rejects_entangled_control() {
        let bundle = ghz_werner_control(0.9, 2, 0).unwrap();
        let outcome = certify_separability(&bundle.rho, 2, CertifyOptions::default()).unwrap();
        assert!(matches!(outcome, Certification::NotPpt(_)));
    }

    #[test]
    fn rank_mismatch_is_hypothesis_failure() {
        let rho = ComplexMatrix::identity(16).scale_real(1.0 / 16.0);
        let outcome = certify_separability(&rho, 2, CertifyOptions::default()).unwrap();
        match outcome {
            Certification::HypothesisNotMet(msg) => assert!(msg.contains("rank hypothesis")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
