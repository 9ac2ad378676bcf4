//! Seeded acceptance suite.
//!
//! Runs the nine property checks over generated instances and reports one
//! line per criterion. Shared by the `acceptance` integration test and the
//! `pptsep selftest` subcommand.

use std::fmt;
use std::time::{Duration, Instant};

use crate::canonical::{
    build_canonical_22n, extract_canonical, verify_kernel_family, CanonicalForm,
};
use crate::error::Result;
use crate::instances::{
    ghz_werner, ghz_werner_control, random_commuting_family, random_instance, DMode,
    InstanceOptions,
};
use crate::io::{matrix_from_str, matrix_to_string};
use crate::matrix::{ComplexMatrix, C64};
use crate::rng::{self, Stream};
use crate::separability::{
    certify_separability, decompose_canonical, reconstruct_decomposition, Certification,
    CertifyOptions,
};
use crate::shape::SystemShape;
use crate::spectral::{hermitian_eig, simultaneous_diagonalize, sqrt_psd};
use crate::tensor::{self, basis_vector, is_ppt, rank_kernel, DEFAULT_TOL};

/// Tolerances pinned by the acceptance criteria.
pub mod thresholds {
    pub const ROUND_TRIP: f64 = 1e-8;
    pub const PPT_MIN_EIG: f64 = 1e-10;
    pub const KERNEL_RESIDUAL: f64 = 1e-10;
    pub const ORACLE_EQUIVALENCE: f64 = 1e-8;
    pub const CERTIFICATE: f64 = 1e-7;
    pub const BISECTION: f64 = 1e-3;
    pub const SPECTRAL: f64 = 1e-8;
    pub const PROJECTION: f64 = 1e-9;
    pub const FULL_RUNTIME_SECS: f64 = 30.0;
    pub const QUICK_RUNTIME_SECS: f64 = 10.0;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub max_n: usize,
    /// Instances per `n` and per `d` mode for criteria 1–4 and 8.
    pub instances_per_n: usize,
    /// Disguised instances per `n` for criterion 5.
    pub disguised_per_n: usize,
    pub spectral_samples: usize,
    pub serialization_samples: usize,
    pub seed: u64,
    pub quick: bool,
}

impl SuiteConfig {
    pub fn full() -> Self {
        Self {
            max_n: 6,
            instances_per_n: 50,
            disguised_per_n: 20,
            spectral_samples: 200,
            serialization_samples: 100,
            seed: 0,
            quick: false,
        }
    }

    pub fn quick() -> Self {
        Self {
            max_n: 3,
            instances_per_n: 10,
            disguised_per_n: 5,
            spectral_samples: 50,
            serialization_samples: 100,
            seed: 0,
            quick: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

struct SuiteInstance {
    n: usize,
    seed: u64,
    cf: CanonicalForm,
    rho: ComplexMatrix,
}

fn instance_seed(base: u64, n: usize, mode: usize, i: usize) -> u64 {
    base + 10_000 * n as u64 + 1_000 * mode as u64 + i as u64
}

fn suite_instances(cfg: &SuiteConfig) -> Result<Vec<SuiteInstance>> {
    let mut out = Vec::new();
    for n in 1..=cfg.max_n {
        for (mode, d_mode) in [DMode::Identity, DMode::RandomPd].into_iter().enumerate() {
            for i in 0..cfg.instances_per_n {
                let seed = instance_seed(cfg.seed, n, mode, i);
                let opts = InstanceOptions {
                    d_mode,
                    disguise: false,
                    scale: 1.0,
                };
                let bundle = random_instance(n, seed, opts)?;
                let cf = bundle
                    .ground_truth
                    .expect("canonical bundles carry ground truth")
                    .cf;
                out.push(SuiteInstance {
                    n,
                    seed,
                    cf,
                    rho: bundle.rho,
                });
            }
        }
    }
    Ok(out)
}

/// Largest entry of `got − want` relative to the largest entry of `want`.
fn entrywise_relative(got: &ComplexMatrix, want: &ComplexMatrix) -> f64 {
    got.max_abs_diff(want) / want.max_abs().max(f64::MIN_POSITIVE)
}

struct Tally {
    worst: f64,
    failures: usize,
    count: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            worst: 0.0,
            failures: 0,
            count: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, value: f64, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if value.is_finite() {
            self.worst = self.worst.max(value);
        } else {
            self.worst = f64::INFINITY;
        }
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.record(f64::INFINITY, false, || what);
    }

    fn summary(&self, metric: &str) -> String {
        let mut s = format!("{metric} {:.2e} over {} checks", self.worst, self.count);
        if let Some(f) = &self.first_failure {
            s.push_str(&format!("; {} failures, first: {f}", self.failures));
        }
        s
    }

    fn passed(&self) -> bool {
        self.failures == 0 && self.count > 0
    }
}

fn timed(id: u8, name: &'static str, body: impl FnOnce() -> (bool, String)) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = body();
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn criterion_round_trip(suite: &[SuiteInstance], quick: bool) -> CriterionResult {
    let start = Instant::now();
    let mut r = timed(1, "Canonical round trip", || {
        let mut tally = Tally::new();
        for inst in suite {
            match extract_canonical(&inst.rho, inst.n, DEFAULT_TOL) {
                Ok(ex) => {
                    let err = [
                        entrywise_relative(&ex.cf.a, &inst.cf.a),
                        entrywise_relative(&ex.cf.b, &inst.cf.b),
                        entrywise_relative(&ex.cf.c, &inst.cf.c),
                        entrywise_relative(&ex.cf.d, &inst.cf.d),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    tally.record(err, err <= thresholds::ROUND_TRIP, || {
                        format!("n={} seed={} err {err:.2e}", inst.n, inst.seed)
                    });
                }
                Err(e) => tally.fail(format!("n={} seed={}: {e}", inst.n, inst.seed)),
            }
        }
        (tally.passed(), tally.summary("max entrywise rel err"))
    });
    // Times extraction only; instance generation is shared with later criteria.
    let secs = start.elapsed().as_secs_f64();
    let limit = if quick {
        thresholds::QUICK_RUNTIME_SECS
    } else {
        thresholds::FULL_RUNTIME_SECS
    };
    if secs >= limit {
        r.passed = false;
        r.detail
            .push_str(&format!("; runtime {secs:.1} s exceeds {limit} s"));
    }
    r
}

fn criterion_consistency(suite: &[SuiteInstance]) -> CriterionResult {
    timed(2, "Canonical consistency (PPT, rank N, kernel 7N)", || {
        let mut tally = Tally::new();
        for inst in suite {
            let shape = inst.cf.shape();
            let what = |msg: String| format!("n={} seed={}: {msg}", inst.n, inst.seed);
            let report = match is_ppt(&inst.rho, &shape, thresholds::PPT_MIN_EIG) {
                Ok(r) => r,
                Err(e) => {
                    tally.fail(what(e.to_string()));
                    continue;
                }
            };
            let rel_min = -report.min_eigenvalue() / inst.rho.frobenius_norm();
            let rk = match rank_kernel(&inst.rho, DEFAULT_TOL) {
                Ok(r) => r,
                Err(e) => {
                    tally.fail(what(e.to_string()));
                    continue;
                }
            };
            let ok = report.is_ppt
                && report.bipartitions.len() == 7
                && rk.rank == inst.n
                && rk.kernel_dimension() == 7 * inst.n;
            tally.record(rel_min.max(0.0), ok, || {
                what(format!(
                    "ppt={} rank={} kernel={}",
                    report.is_ppt,
                    rk.rank,
                    rk.kernel_dimension()
                ))
            });
        }
        (
            tally.passed(),
            tally.summary("worst relative negative PT eigenvalue"),
        )
    })
}

fn criterion_kernel(suite: &[SuiteInstance]) -> CriterionResult {
    timed(3, "Kernel families", || {
        let mut tally = Tally::new();
        for inst in suite {
            match verify_kernel_family(&inst.rho, &inst.cf, thresholds::KERNEL_RESIDUAL) {
                Ok(rep) => tally.record(rep.max_residual, rep.passes, || {
                    format!(
                        "n={} seed={} residual {:.2e} span {}",
                        inst.n, inst.seed, rep.max_residual, rep.span_dimension
                    )
                }),
                Err(e) => tally.fail(format!("n={} seed={}: {e}", inst.n, inst.seed)),
            }
        }
        (tally.passed(), tally.summary("max kernel residual"))
    })
}

fn criterion_oracle(suite: &[SuiteInstance]) -> CriterionResult {
    timed(4, "Decomposition oracle equivalence", || {
        let mut tally = Tally::new();
        for inst in suite {
            let outcome = decompose_canonical(&inst.cf, DEFAULT_TOL, inst.seed).and_then(|pd| {
                let terms = pd.len();
                reconstruct_decomposition(&pd, inst.n).map(|m| (m, terms))
            });
            match outcome {
                Ok((recon, terms)) => {
                    let err = recon.relative_distance(&inst.rho);
                    tally.record(
                        err,
                        err <= thresholds::ORACLE_EQUIVALENCE && terms == inst.n,
                        || {
                            format!(
                                "n={} seed={} err {err:.2e} terms {terms}",
                                inst.n, inst.seed
                            )
                        },
                    );
                }
                Err(e) => tally.fail(format!("n={} seed={}: {e}", inst.n, inst.seed)),
            }
        }
        (tally.passed(), tally.summary("max relative Frobenius err"))
    })
}

fn criterion_disguise(cfg: &SuiteConfig) -> CriterionResult {
    timed(5, "End-to-end with disguise", || {
        let mut tally = Tally::new();
        for n in 1..=cfg.max_n {
            for i in 0..cfg.disguised_per_n {
                let seed = instance_seed(cfg.seed, n, 2, i);
                let opts = InstanceOptions {
                    d_mode: DMode::RandomPd,
                    disguise: true,
                    scale: 1.0,
                };
                let bundle = match random_instance(n, seed, opts) {
                    Ok(b) => b,
                    Err(e) => {
                        tally.fail(format!("n={n} seed={seed}: {e}"));
                        continue;
                    }
                };
                let options = CertifyOptions {
                    seed,
                    ..CertifyOptions::default()
                };
                match certify_separability(&bundle.rho, n, options) {
                    Ok(Certification::Certified(cert)) => {
                        // Pullback check against the original state, computed
                        // independently of the certificate's stored residual.
                        let recon = reconstruct_decomposition(&cert.decomposition, n);
                        let err = recon
                            .map(|m| m.relative_distance(&bundle.rho))
                            .unwrap_or(f64::INFINITY);
                        let ok = err <= thresholds::CERTIFICATE
                            && cert.residual <= thresholds::CERTIFICATE
                            && cert.decomposition.len() <= n;
                        tally.record(err, ok, || format!("n={n} seed={seed} err {err:.2e}"));
                    }
                    Ok(other) => tally.fail(format!("n={n} seed={seed}: {other:?}")),
                    Err(e) => tally.fail(format!("n={n} seed={seed}: {e}")),
                }
            }
        }
        (tally.passed(), tally.summary("max pullback residual"))
    })
}

/// Smallest `p` at which `ghz_werner(p)` stops being PPT, to within `width`.
pub fn ghz_werner_threshold(width: f64) -> Result<f64> {
    let shape = SystemShape::new(vec![2, 2, 2])?;
    let ppt = |p: f64| -> Result<bool> { Ok(is_ppt(&ghz_werner(p)?, &shape, DEFAULT_TOL)?.is_ppt) };
    let (mut lo, mut hi) = (0.0, 1.0);
    debug_assert!(ppt(lo)? && !ppt(hi)?);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if ppt(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn criterion_peres() -> CriterionResult {
    timed(6, "Peres gate", || {
        let mut notes = Vec::new();
        let mut ok = true;

        match ghz_werner_control(0.9, 2, 0)
            .and_then(|b| certify_separability(&b.rho, 2, CertifyOptions::default()))
        {
            Ok(Certification::NotPpt(report)) => notes.push(format!(
                "p=0.9 rejected (min PT eig {:.3})",
                report.min_eigenvalue()
            )),
            Ok(other) => {
                ok = false;
                notes.push(format!("p=0.9 not rejected: {other:?}"));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("p=0.9 error: {e}"));
            }
        }

        let shape = SystemShape::new(vec![2, 2, 2]).expect("valid shape");
        match ghz_werner(0.0).and_then(|r| is_ppt(&r, &shape, DEFAULT_TOL)) {
            Ok(rep) if rep.is_ppt => notes.push("p=0 PPT".into()),
            Ok(_) => {
                ok = false;
                notes.push("p=0 reported NPT".into());
            }
            Err(e) => {
                ok = false;
                notes.push(format!("p=0 error: {e}"));
            }
        }

        match ghz_werner_threshold(thresholds::BISECTION) {
            Ok(p) => notes.push(format!(
                "PPT threshold p* = {p:.4} ± {:.0e}",
                thresholds::BISECTION
            )),
            Err(e) => {
                ok = false;
                notes.push(format!("bisection error: {e}"));
            }
        }
        (ok, notes.join("; "))
    })
}

/// Closed-form eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn closed_form_eigenvalues_2x2(h: &ComplexMatrix) -> [f64; 2] {
    let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - rad, mean + rad]
}

/// Closed-form (trigonometric) roots of the characteristic cubic of a 3×3
/// Hermitian matrix, ascending.
pub fn closed_form_eigenvalues_3x3(h: &ComplexMatrix) -> [f64; 3] {
    let p1 = h[(0, 1)].norm_sqr() + h[(0, 2)].norm_sqr() + h[(1, 2)].norm_sqr();
    let q = (h[(0, 0)].re + h[(1, 1)].re + h[(2, 2)].re) / 3.0;
    let p2 = (0..3).map(|i| (h[(i, i)].re - q).powi(2)).sum::<f64>() + 2.0 * p1;
    if p2 == 0.0 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| {
        let shift = if i == j { q } else { 0.0 };
        (h[(i, j)] - C64::new(shift, 0.0)) / p
    };
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [smallest, middle, largest]
}

fn criterion_spectral(cfg: &SuiteConfig) -> CriterionResult {
    timed(7, "Spectral unit suite", || {
        let mut tally = Tally::new();
        let mut r = rng::stream(cfg.seed, Stream::Perturbation);
        for k in 0..cfg.spectral_samples {
            for n in [2usize, 3] {
                let g = ComplexMatrix::from_fn(n, n, |_, _| rng::complex_normal(&mut r));
                let h = g.hermitian_part();
                let got = match hermitian_eig(&h, DEFAULT_TOL) {
                    Ok(e) => e.eigenvalues,
                    Err(e) => {
                        tally.fail(format!("sample {k} n={n}: {e}"));
                        continue;
                    }
                };
                let want: Vec<f64> = if n == 2 {
                    closed_form_eigenvalues_2x2(&h).to_vec()
                } else {
                    closed_form_eigenvalues_3x3(&h).to_vec()
                };
                let err = got
                    .iter()
                    .zip(&want)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                tally.record(err, err <= thresholds::SPECTRAL, || {
                    format!("eig sample {k} n={n} err {err:.2e}")
                });
            }
        }

        for n in 1..=cfg.max_n.max(4) {
            let seed = cfg.seed + 77 + n as u64;
            let fam = random_commuting_family(n, seed, 1.0);
            match simultaneous_diagonalize(
                &[fam.a.clone(), fam.b.clone(), fam.c.clone()],
                DEFAULT_TOL,
                seed,
                16,
            ) {
                Ok(joint) => {
                    // Match each planted triple to its nearest recovered triple.
                    let mut err: f64 = 0.0;
                    let mut used = vec![false; n];
                    for k in 0..n {
                        let planted = [
                            fam.eigenvalues[0][k],
                            fam.eigenvalues[1][k],
                            fam.eigenvalues[2][k],
                        ];
                        let dist = |m: usize| {
                            joint
                                .tuple(m)
                                .iter()
                                .zip(&planted)
                                .map(|(x, y)| (x - y).norm())
                                .fold(0.0, f64::max)
                        };
                        let best = (0..n)
                            .filter(|&m| !used[m])
                            .min_by(|&x, &y| dist(x).total_cmp(&dist(y)))
                            .expect("unused column");
                        used[best] = true;
                        err = err.max(dist(best));
                    }
                    tally.record(err, err <= thresholds::SPECTRAL, || {
                        format!("joint n={n} err {err:.2e}")
                    });
                }
                Err(e) => tally.fail(format!("joint n={n}: {e}")),
            }
        }

        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let rejected = simultaneous_diagonalize(&[x, z], DEFAULT_TOL, 0, 4).is_err();
        tally.record(0.0, rejected, || "non-commuting [X, Z] accepted".into());

        for n in 1..=6 {
            let g = ComplexMatrix::from_fn(n, n, |_, _| rng::complex_normal(&mut r));
            let d = g.adjoint().matmul(&g);
            match sqrt_psd(&d, DEFAULT_TOL, false) {
                Ok(root) => {
                    let err = root.matmul(&root).relative_distance(&d);
                    tally.record(err, err <= thresholds::SPECTRAL, || {
                        format!("sqrt n={n} err {err:.2e}")
                    });
                }
                Err(e) => tally.fail(format!("sqrt n={n}: {e}")),
            }
        }
        (tally.passed(), tally.summary("max error"))
    })
}

fn criterion_projection(suite: &[SuiteInstance]) -> CriterionResult {
    timed(8, "Projection onto |1_A⟩ matches the 2x2xN form", || {
        let mut tally = Tally::new();
        let e1 = basis_vector(2, 1);
        for inst in suite {
            let shape = inst.cf.shape();
            let run = || -> Result<f64> {
                let gauge = sqrt_psd(&inst.cf.d, DEFAULT_TOL, true)?;
                let id2 = ComplexMatrix::identity(2);
                let gauged = tensor::local_transform(
                    &inst.rho,
                    &shape,
                    &[id2.clone(), id2.clone(), id2, gauge],
                    DEFAULT_TOL,
                )?;
                let tilde = tensor::partial_projection(&gauged, &shape, 0, &e1)?;
                let expect = build_canonical_22n(&inst.cf.a, &inst.cf.b, DEFAULT_TOL)?;
                Ok(tilde.max_abs_diff(&expect))
            };
            match run() {
                Ok(err) => tally.record(err, err <= thresholds::PROJECTION, || {
                    format!("n={} seed={} err {err:.2e}", inst.n, inst.seed)
                }),
                Err(e) => tally.fail(format!("n={} seed={}: {e}", inst.n, inst.seed)),
            }
        }
        (tally.passed(), tally.summary("max entrywise err"))
    })
}

fn random_f64(r: &mut rng::Rng) -> f64 {
    use rand::Rng as _;
    match r.random_range(0..4u8) {
        0 => f64::from_bits(
            r.random::<u64>() & !(0x7FFu64 << 52) | ((r.random_range(1..0x7FEu64)) << 52),
        ),
        1 => rng::normal(r),
        2 => rng::normal(r) * 10f64.powi(r.random_range(-300..300)),
        _ => [0.0, -0.0, 1.0, -1.0, 0.5, f64::MIN_POSITIVE, f64::MAX][r.random_range(0..7)],
    }
}

fn criterion_serialization(cfg: &SuiteConfig, prior: Option<Duration>) -> CriterionResult {
    timed(9, "Serialization and quick selftest", || {
        use rand::Rng as _;
        let mut tally = Tally::new();
        let mut r = rng::stream(cfg.seed, Stream::Perturbation);
        for k in 0..cfg.serialization_samples {
            let d = r.random_range(1..=6usize);
            let shape = SystemShape::new(vec![d]).expect("positive dimension");
            let m = ComplexMatrix::from_fn(d, d, |_, _| {
                C64::new(random_f64(&mut r), random_f64(&mut r))
            });
            let ok = matrix_to_string(&m, &shape)
                .and_then(|text| matrix_from_str(&text))
                .map(|(back, back_shape)| {
                    back_shape == shape
                        && back.as_slice().iter().zip(m.as_slice()).all(|(a, b)| {
                            a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
                        })
                })
                .unwrap_or(false);
            tally.record(0.0, ok, || format!("matrix {k} did not round-trip"));
        }
        let mut detail = format!(
            "{} of {} matrices round-trip bitwise",
            tally.count - tally.failures,
            tally.count
        );

        let quick_elapsed = match prior {
            Some(d) => d,
            None => {
                let start = Instant::now();
                let results = run_criteria(&SuiteConfig::quick(), false);
                let elapsed = start.elapsed();
                let all = results.iter().all(|c| c.passed);
                tally.record(0.0, all, || "quick suite had failing criteria".into());
                elapsed
            }
        };
        let secs = quick_elapsed.as_secs_f64();
        tally.record(0.0, secs < thresholds::QUICK_RUNTIME_SECS, || {
            format!("quick suite took {secs:.1} s")
        });
        detail.push_str(&format!(
            "; quick criteria 1-8 within {} s",
            thresholds::QUICK_RUNTIME_SECS
        ));
        if let Some(f) = &tally.first_failure {
            detail.push_str(&format!("; first failure: {f}"));
        }
        (tally.passed(), detail)
    })
}

fn run_criteria(cfg: &SuiteConfig, with_serialization: bool) -> Vec<CriterionResult> {
    let start = Instant::now();
    let mut results = Vec::with_capacity(9);
    match suite_instances(cfg) {
        Ok(suite) => {
            results.push(criterion_round_trip(&suite, cfg.quick));
            results.push(criterion_consistency(&suite));
            results.push(criterion_kernel(&suite));
            results.push(criterion_oracle(&suite));
        }
        Err(e) => {
            for (id, name) in [
                (1, "Canonical round trip"),
                (2, "Canonical consistency (PPT, rank N, kernel 7N)"),
                (3, "Kernel families"),
                (4, "Decomposition oracle equivalence"),
            ] {
                results.push(CriterionResult {
                    id,
                    name,
                    passed: false,
                    detail: format!("instance generation failed: {e}"),
                    elapsed: Duration::ZERO,
                });
            }
        }
    }
    results.push(criterion_disguise(cfg));
    results.push(criterion_peres());
    results.push(criterion_spectral(cfg));
    match suite_instances(cfg) {
        Ok(suite) => results.push(criterion_projection(&suite)),
        Err(e) => results.push(CriterionResult {
            id: 8,
            name: "Projection onto |1_A⟩ matches the 2x2xN form",
            passed: false,
            detail: format!("instance generation failed: {e}"),
            elapsed: Duration::ZERO,
        }),
    }
    if with_serialization {
        let prior = cfg.quick.then(|| start.elapsed());
        results.push(criterion_serialization(cfg, prior));
    }
    results
}

/// Runs all nine criteria. In quick mode criterion 9 times this run's
/// criteria 1–8; in full mode it runs and times a separate quick suite.
pub fn run(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    run_criteria(cfg, true)
}
