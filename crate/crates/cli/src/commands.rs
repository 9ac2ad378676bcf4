use std::ffi::OsString;
use std::path::{Path, PathBuf};

use pptsep_core::canonical::{extract_canonical, ExtractError};
use pptsep_core::instances::{
    ghz_werner, ghz_werner_control, random_instance, DMode, InstanceOptions,
};
use pptsep_core::io::{load_matrix, read_json, save_matrix, write_canonical_json};
use pptsep_core::selftest::{self, SuiteConfig};
use pptsep_core::separability::{certify_separability, reconstruction_residual};
use pptsep_core::tensor::{is_ppt, psd_check, rank_kernel};
use pptsep_core::{
    Certification, CertifyOptions, ComplexMatrix, Error, SeparabilityCertificate, SystemShape,
};

use crate::{
    CanonizeArgs, CheckArgs, Command, DModeArg, DecomposeArgs, GenArgs, SelftestArgs, VerifyArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_NOT_PPT: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_SOFTWARE: u8 = 70;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    fn at(path: &Path, e: Error) -> Self {
        let mut f = Self::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Shape(_)
            | Error::NotSquare { .. }
            | Error::NotHermitian { .. }
            | Error::NonFinite
            | Error::NotPsdState { .. }
            | Error::InvalidArgument(_)
            | Error::Format(_)
            | Error::Json(_) => EXIT_DATA,
            _ => EXIT_SOFTWARE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Gen(a) => gen(a),
        Command::Check(a) => check(a),
        Command::Canonize(a) => canonize(a),
        Command::Decompose(a) => decompose(a),
        Command::Verify(a) => verify(a),
        Command::Selftest(a) => run_selftest(a),
    }
}

fn load(path: &Path) -> Result<(ComplexMatrix, SystemShape), Failure> {
    load_matrix(path).map_err(|e| Failure::at(path, e))
}

/// Loads a state and checks it lives on `2⊗2⊗2⊗n`.
fn load_for(path: &Path, n: usize) -> Result<ComplexMatrix, Failure> {
    let (rho, shape) = load(path)?;
    let want = SystemShape::qubits3_with(n)?;
    if shape != want {
        return Err(Failure::data(format!(
            "{}: dims {:?} do not match {:?} for n = {n}",
            path.display(),
            shape.dims(),
            want.dims()
        )));
    }
    Ok(rho)
}

fn truth_path(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".truth");
    PathBuf::from(s)
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn gen(a: GenArgs) -> CmdResult {
    let (rho, shape, truth) = match (a.ghz_werner, a.n) {
        (Some(p), None) => {
            let rho = ghz_werner(p)?;
            (rho, SystemShape::new(vec![2, 2, 2])?, None)
        }
        (Some(p), Some(n)) => {
            let b = ghz_werner_control(p, n, a.seed)?;
            (b.rho, b.shape, None)
        }
        (None, Some(n)) => {
            let opts = InstanceOptions {
                d_mode: match a.d_mode {
                    DModeArg::Identity => DMode::Identity,
                    DModeArg::Random => DMode::RandomPd,
                },
                disguise: a.disguise,
                scale: a.scale,
            };
            let b = random_instance(n, a.seed, opts)?;
            (b.rho, b.shape, b.ground_truth)
        }
        (None, None) => unreachable!("clap requires --n without --ghz-werner"),
    };
    save_matrix(&a.output, &rho, &shape).map_err(|e| Failure::at(&a.output, e))?;
    let mut line = format!("wrote {} (dims {:?})", a.output.display(), shape.dims());
    if let Some(t) = truth {
        let path = truth_path(&a.output);
        write_canonical_json(&path, &t).map_err(|e| Failure::at(&path, e))?;
        line.push_str(&format!(", ground truth {}", path.display()));
    }
    println!("{line}");
    Ok(EXIT_OK)
}

fn check(a: CheckArgs) -> CmdResult {
    let (rho, shape) = load(&a.input)?;
    let psd = psd_check(&rho, a.tol)?;
    if !psd.is_hermitian {
        println!(
            "hermitian: no (residual {}); not a state",
            sci(psd.hermiticity_residual)
        );
        return Ok(EXIT_DATA);
    }
    if !psd.is_psd {
        println!(
            "hermitian: yes (residual {}); not PSD (min eigenvalue {}); not a state",
            sci(psd.hermiticity_residual),
            sci(psd.min_eigenvalue)
        );
        return Ok(EXIT_DATA);
    }
    let rank = rank_kernel(&rho, a.tol)?.rank;
    let report = is_ppt(&rho, &shape, a.tol)?;
    let parts: Vec<String> = report
        .bipartitions
        .iter()
        .map(|b| format!("{}={}", b.label, sci(b.min_eigenvalue)))
        .collect();
    println!(
        "hermitian: yes (residual {}); rank {rank}; min PT eigenvalues {}; {}",
        sci(psd.hermiticity_residual),
        parts.join(" "),
        if report.is_ppt { "PPT" } else { "NPT" }
    );
    Ok(if report.is_ppt { EXIT_OK } else { EXIT_NOT_PPT })
}

fn canonize(a: CanonizeArgs) -> CmdResult {
    let rho = load_for(&a.input, a.n)?;
    match extract_canonical(&rho, a.n, a.tol) {
        Ok(ex) => {
            write_canonical_json(&a.output, &ex).map_err(|e| Failure::at(&a.output, e))?;
            println!(
                "canonical form extracted: n {}, max block residual {}, wrote {}",
                a.n,
                sci(ex.max_block_residual),
                a.output.display()
            );
            Ok(EXIT_OK)
        }
        Err(ExtractError::Numeric(e)) => Err(e.into()),
        Err(e) => {
            println!("hypothesis not met: {e}");
            Ok(EXIT_HYPOTHESIS)
        }
    }
}

fn decompose(a: DecomposeArgs) -> CmdResult {
    let rho = load_for(&a.input, a.n)?;
    let opts = CertifyOptions {
        tol: a.tol,
        budget: a.budget,
        seed: a.seed,
    };
    match certify_separability(&rho, a.n, opts)? {
        Certification::Certified(cert) => {
            write_canonical_json(&a.output, &cert).map_err(|e| Failure::at(&a.output, e))?;
            println!(
                "separable: {} product terms, residual {}, wrote {}",
                cert.decomposition.len(),
                sci(cert.residual),
                a.output.display()
            );
            Ok(EXIT_OK)
        }
        Certification::NotPpt(report) => {
            let failing: Vec<&str> = report.failing().map(|b| b.label.as_str()).collect();
            println!(
                "not PPT: min eigenvalue {} (failing bipartitions {})",
                sci(report.min_eigenvalue()),
                failing.join(" ")
            );
            Ok(EXIT_NOT_PPT)
        }
        Certification::HypothesisNotMet(msg) => {
            println!("hypothesis not met: {msg}");
            Ok(EXIT_HYPOTHESIS)
        }
    }
}

fn verify(a: VerifyArgs) -> CmdResult {
    let (rho, shape) = load(&a.input)?;
    let cert: SeparabilityCertificate =
        read_json(&a.certificate).map_err(|e| Failure::at(&a.certificate, e))?;
    let want = SystemShape::qubits3_with(cert.n)?;
    if shape != want {
        return Err(Failure::data(format!(
            "certificate is for dims {:?}, state has {:?}",
            want.dims(),
            shape.dims()
        )));
    }
    let tol = a.tol.unwrap_or(cert.tol);
    let residual = reconstruction_residual(&rho, &cert.decomposition, cert.n)?;
    let ok = residual <= tol;
    println!(
        "residual {} {} tol {}: {}",
        sci(residual),
        if ok { "<=" } else { ">" },
        sci(tol),
        if ok { "verified" } else { "rejected" }
    );
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn run_selftest(a: SelftestArgs) -> CmdResult {
    let cfg = if a.quick {
        SuiteConfig::quick()
    } else {
        SuiteConfig::full()
    };
    let results = selftest::run(&cfg);
    for r in &results {
        if a.timings {
            println!("{r}");
        } else {
            println!(
                "[{}] {} {}: {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.id,
                r.name,
                r.detail
            );
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    Ok(if passed == results.len() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
