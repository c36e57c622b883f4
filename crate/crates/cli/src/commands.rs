use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use hyperdelta::delta::{delta_product_integrate, TestFunction};
use hyperdelta::horn::compare_report;
use hyperdelta::poly::{expand_j_symbolic, j_sum, Family, RootPoly};
use hyperdelta::verify::{verify_identity, IdentityReport};
use hyperdelta::{Error, Singularity};

use crate::config::{load, HornFile, IntegrateFile, VerifyCase, VerifyFile};
use crate::CliError;

const MAX_EXPAND_SIZE: usize = 4;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn check_out_dir(dir: &Path) -> Result<(), CliError> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(CliError::Config(format!("output directory {} does not exist", dir.display())))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two sizes separated by a comma")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Parses `7`, `-3/4` or `0.125` exactly.
fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Config(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(numer, denom));
    }
    s.parse::<BigRational>().map_err(|_| bad())
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct CaseRecord<'a> {
    name: String,
    a: f64,
    u: &'a [f64],
    b: f64,
    v: &'a [f64],
    test_function: TestFunction,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    seed: u64,
    pass: bool,
    cases: Vec<CaseRecord<'a>>,
}

enum Prepared {
    Ready(RootPoly, RootPoly, TestFunction),
    Divergent(Singularity, TestFunction),
}

fn prepare(case: &VerifyCase) -> Result<Prepared, CliError> {
    let phi = case.test_function()?;
    let n = case.u.len() + case.v.len();
    if phi.dim() != n {
        return Err(CliError::Config(format!("test function has dimension {}, expected {n}", phi.dim())));
    }
    let p = match RootPoly::new(case.a, case.u.clone(), Family::A) {
        Err(Error::RepeatedRoot { first, second }) => {
            return Ok(Prepared::Divergent(Singularity::ARoots { first, second }, phi))
        }
        other => other.map_err(config_err)?,
    };
    let q = match RootPoly::new(case.b, case.v.clone(), Family::B) {
        Err(Error::RepeatedRoot { first, second }) => {
            return Ok(Prepared::Divergent(Singularity::BRoots { first, second }, phi))
        }
        other => other.map_err(config_err)?,
    };
    Ok(Prepared::Ready(p, q, phi))
}

pub fn verify(path: &Path, out: Option<&Path>, seed: Option<u64>, tolerance: Option<f64>) -> Result<(), CliError> {
    let mut file: VerifyFile = load(path)?;
    if let Some(dir) = out {
        check_out_dir(dir)?;
    }
    if file.cases.is_empty() {
        return Err(CliError::Config("no cases given".into()));
    }
    let seed = seed.unwrap_or(file.seed);
    let mut cfg = file.settings.clone();
    cfg.integration.seed = seed;
    if let Some(t) = tolerance {
        if !(t > 0.0) {
            return Err(CliError::Config("--tolerance must be positive".into()));
        }
        cfg.rel_tol = t;
    }
    cfg.integration.validate().map_err(config_err)?;
    let prepared = file.cases.iter().map(prepare).collect::<Result<Vec<_>, _>>()?;

    let mut records = Vec::with_capacity(prepared.len());
    let mut summary = String::new();
    let mut failures = 0;
    for (i, (case, prep)) in file.cases.iter_mut().zip(prepared).enumerate() {
        let name = case.label(i);
        let (report, error, phi) = match prep {
            Prepared::Divergent(s, phi) => (Some(IdentityReport::divergent(s, &cfg)), None, phi),
            Prepared::Ready(p, q, phi) => match verify_identity(&p, &q, &phi, &cfg) {
                Ok(r) => (Some(r), None, phi),
                Err(Error::Divergent(s)) => (Some(IdentityReport::divergent(s, &cfg)), None, phi),
                Err(e) => (None, Some(e.to_string()), phi),
            },
        };
        let line = match (&report, &error) {
            (Some(r), _) if r.divergence.is_some() => {
                format!("{name}: DIVERGENT ({})", r.divergence.expect("checked"))
            }
            (Some(r), _) => {
                let value = r.lhs_localized.map_or(f64::NAN, |e| e.value);
                let verdict = if r.pass { "PASS" } else { "FAIL" };
                let mut l = format!("{name}: {verdict} value={value:.6}");
                if let Some(d) = &r.discrepancies {
                    let _ = write!(l, " direct_rel={:.1e} rhs_rel={:.1e}", d.direct_vs_localized.rel, d.rhs_vs_lhs.rel);
                    if let Some(m) = &d.mollified_vs_lhs {
                        let _ = write!(l, " mollified_rel={:.1e}", m.rel);
                    }
                }
                l
            }
            (None, Some(e)) => format!("{name}: ERROR {e}"),
            (None, None) => unreachable!(),
        };
        summary.push_str(&line);
        summary.push('\n');
        if !report.as_ref().is_some_and(|r| r.pass) {
            failures += 1;
        }
        records.push(CaseRecord { name, a: case.a, u: &case.u, b: case.b, v: &case.v, test_function: phi, report, error });
    }
    let output = VerifyOutput { seed, pass: failures == 0, cases: records };
    let json = serde_json::to_string_pretty(&output).expect("report serializes") + "\n";
    print!("{summary}");
    match out {
        Some(dir) => write_file(&dir.join("verify_report.json"), &json)?,
        None => print!("{json}"),
    }
    if failures > 0 {
        return Err(CliError::Failed(format!("{failures} case(s) did not pass")));
    }
    Ok(())
}

// -------------------------------------------------------------- expand-j

pub fn expand_j(sizes: (usize, usize), a: &str, b: &str) -> Result<(), CliError> {
    let (na, nb) = sizes;
    if na == 0 || nb == 0 || na > MAX_EXPAND_SIZE || nb > MAX_EXPAND_SIZE {
        return Err(CliError::Config(format!("sizes must lie in 1..={MAX_EXPAND_SIZE}, got {na},{nb}")));
    }
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    let j = expand_j_symbolic(na, nb, &a, &b).map_err(|e| match e {
        Error::InvalidInput(m) => CliError::Config(m),
        other => CliError::Failed(other.to_string()),
    })?;
    // spot-check the expansion against the defining sum at distinct rational points
    for shift in 0..3i64 {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let u: Vec<BigRational> = (0..na as i64).map(|k| r(3 * k + shift + 1, 2)).collect();
        let v: Vec<BigRational> = (0..nb as i64).map(|k| r(5 * k - shift - 7, 3)).collect();
        let point: Vec<BigRational> = u.iter().chain(&v).cloned().collect();
        if j.eval(&point) != j_sum(&a, &b, &u, &v) {
            return Err(CliError::Failed("expansion disagrees with the defining sum".into()));
        }
    }
    println!("{j}");
    Ok(())
}

// ------------------------------------------------------------------ horn

pub fn horn(path: &Path, out: &Path, seed: Option<u64>, tolerance: Option<f64>) -> Result<(), CliError> {
    let mut cfg: HornFile = load(path)?;
    check_out_dir(out)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tolerance {
        cfg.localized.psi_rel_tol = t;
    }
    cfg.validate().map_err(config_err)?;
    let report = compare_report(&cfg).map_err(|e| CliError::Failed(e.to_string()))?;
    write_file(&out.join("mc_grid.csv"), &report.mc.to_csv())?;
    write_file(&out.join("localized_grid.csv"), &report.localized.to_csv())?;
    write_file(&out.join("compare.csv"), &report.to_csv())?;
    println!(
        "mc: {} samples, {} outside the grid, {} discriminant violations",
        report.mc.samples, report.mc.outside, report.mc.discriminant_violations
    );
    println!(
        "|z| <= 3 in {}/{} unflagged bins ({:.1}%), {} flagged",
        report.within_3sigma,
        report.unflagged,
        100.0 * report.pass_fraction,
        report.flagged_bins.len()
    );
    Ok(())
}

// ------------------------------------------------------------- integrate

pub fn integrate(path: &Path, seed: Option<u64>, tolerance: Option<f64>) -> Result<(), CliError> {
    let file: IntegrateFile = load(path)?;
    let mut cfg = file.integration.clone();
    cfg.seed = seed.unwrap_or(file.seed);
    if let Some(t) = tolerance {
        cfg.rel_tol = t;
    }
    cfg.validate().map_err(config_err)?;
    let fac = file.factorization()?;
    let phi = file.test_function.clone().validated().map_err(config_err)?;
    if phi.dim() != fac.dim() {
        return Err(CliError::Config(format!(
            "test function has dimension {}, factors have {}",
            phi.dim(),
            fac.dim()
        )));
    }
    match delta_product_integrate(&fac, &phi, &cfg) {
        Ok(e) => println!("{} ± {:.1e}", e.value, e.error),
        Err(Error::Divergent(s)) => println!("DIVERGENT ({s})"),
        Err(Error::DimensionMismatch { expected, found }) => {
            return Err(CliError::Config(format!("dimension mismatch: expected {expected}, got {found}")))
        }
        Err(e) => return Err(CliError::Failed(e.to_string())),
    }
    Ok(())
}
