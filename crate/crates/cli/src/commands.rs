use std::path::Path;
use std::time::Instant;

use lmoment_core::arith::{gcd, FactoredInt};
use lmoment_core::characters::{even_primitive_count, orthogonality_formula, orthogonality_sum};
use lmoment_core::identities::{run_suite, SuiteOptions, SUITES};
use lmoment_core::lfunction::ShiftPair;
use lmoment_core::moments::{
    delta_bruteforce, diagonal_residue_check, diagonal_term, family_budget, main_term_executed, main_term_theorem1,
    moment_report, weighted_sweep, CoefficientVector, FamilySpec,
};
use lmoment_core::transforms::kernel_identity_check;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, FamilyArgs, KernelArgs, Knobs, OrthogonalityArgs, SweepArgs, VerifyArgs};
use crate::output::{Report, Row, Table};
use crate::CliError;

/// Largest relative residual accepted by the diagonal residue cross-check.
const RESIDUE_TOLERANCE: f64 = 1e-6;

struct Outcome {
    inputs: Value,
    result: Value,
    table: Table,
    failure: Option<String>,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} threads: {e}", cli.common.threads)))?;
    let knobs = cli.common.knobs(pool.current_num_threads())?;

    let start = Instant::now();
    let out = pool.install(|| match &cli.command {
        Command::VerifyIdentities(a) => verify(a, &knobs),
        Command::ComputeMoment(a) => compute(a, &knobs),
        Command::PredictMoment(a) => predict(a, &knobs),
        Command::Diagonal(a) => diagonal(a, &knobs),
        Command::Compare(a) => compare(a, &knobs),
        Command::Sweep(a) => sweep(a, &knobs),
        Command::KernelCheck(a) => kernel(a, &knobs),
        Command::OrthogonalityCheck(a) => orthogonality(a),
    })?;
    let runtime_seconds = start.elapsed().as_secs_f64();

    let report = Report {
        command: cli.command.name(),
        config: json!({
            "command": cli.command.name(),
            "format": cli.common.format,
            "knobs": knobs,
            "inputs": out.inputs,
        }),
        result: out.result,
        table: out.table,
        runtime_seconds,
    };
    report.write(cli.common.format, cli.common.output.as_deref())?;
    match out.failure {
        Some(msg) => Err(CliError::SuiteFailure(msg)),
        None => Ok(()),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn family_row<'a>(row: Row<'a>, spec: &FamilySpec) -> Row<'a> {
    row.num("Q", spec.scale_q)
        .num("h", spec.twist_h.value())
        .num("k", spec.twist_k.value())
        .complex("alpha", spec.shifts.alpha())
        .complex("beta", spec.shifts.beta())
}

fn shift_row<'a>(row: Row<'a>, q: f64, s: &ShiftPair) -> Row<'a> {
    row.num("Q", q).complex("alpha", s.alpha()).complex("beta", s.beta())
}

fn verify(a: &VerifyArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let opts = SuiteOptions {
        orthogonality_max_q: a.orthogonality_max_q,
        orthogonality_max_mn: a.orthogonality_max_mn,
        primitive_count_max_q: a.primitive_count_max_q,
        functional_equation_max_q: a.functional_equation_max_q,
        afe_max_q: a.afe_max_q,
        series_terms: a.series_terms,
        precision: knobs.precision,
        euler: knobs.euler,
        kernel: knobs.kernel,
        weight: knobs.weight,
    };
    let names: Vec<&str> = if a.suites.is_empty() {
        SUITES.to_vec()
    } else {
        a.suites.iter().map(String::as_str).collect()
    };
    let mut table = Table::new();
    let mut results = Vec::new();
    for name in &names {
        let r = run_suite(name, &opts)?;
        table
            .row()
            .num("identity", &r.name)
            .num("cases", r.cases)
            .num("max_residual", r.max_residual)
            .num("tolerance", r.tolerance)
            .num("passed", r.passed)
            .num("suite_runtime_seconds", r.runtime_seconds);
        results.push(r);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    Ok(Outcome {
        inputs: json!({ "suites": names, "sizes": opts }),
        result: json!({ "identities": results, "all_passed": failed.is_empty() }),
        table,
        failure: (!failed.is_empty()).then(|| format!("identity suites above tolerance: {}", failed.join(", "))),
    })
}

fn compute(a: &FamilyArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let spec = a.spec(knobs)?;
    let b = delta_bruteforce(&spec, &knobs.moments())?;
    let mut table = Table::new();
    family_row(table.row(), &spec)
        .complex("brute", b.raw.value)
        .num("brute_error", b.raw.error)
        .complex("brute_coprime", b.coprime.value)
        .num("brute_coprime_error", b.coprime.error)
        .num("character_count", b.character_count)
        .num("moduli", b.moduli);
    Ok(Outcome {
        inputs: to_value(&spec),
        result: json!({ "brute_force": b, "budget_used": family_budget(&spec)? }),
        table,
        failure: None,
    })
}

fn predict(a: &FamilyArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let spec = a.spec(knobs)?;
    let cfg = knobs.moments();
    let theorem1 = main_term_theorem1(&spec, &cfg)?;
    let executed = main_term_executed(&spec, &cfg)?;
    let mut table = Table::new();
    family_row(table.row(), &spec)
        .complex("theorem1", theorem1)
        .complex("executed", executed.value)
        .num("executed_error", executed.error);
    Ok(Outcome {
        inputs: to_value(&spec),
        result: json!({
            "theorem1_main": { "re": theorem1.re, "im": theorem1.im },
            "executed_main": executed,
        }),
        table,
        failure: None,
    })
}

fn diagonal(a: &FamilyArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let spec = a.spec(knobs)?;
    let cfg = knobs.moments();
    let d = diagonal_term(&spec, &cfg)?;
    let check = diagonal_residue_check(&spec, &cfg)?;
    let passed = check.relative_residual <= RESIDUE_TOLERANCE;
    let mut table = Table::new();
    family_row(table.row(), &spec)
        .complex("diagonal", d)
        .complex("left", check.left)
        .num("left_line", check.left_line)
        .complex("residue", check.residue)
        .num("relative_residual", check.relative_residual)
        .num("tolerance", RESIDUE_TOLERANCE)
        .num("passed", passed);
    Ok(Outcome {
        inputs: to_value(&spec),
        result: json!({
            "diagonal_main": { "re": d.re, "im": d.im },
            "residue_check": check,
            "tolerance": RESIDUE_TOLERANCE,
            "passed": passed,
        }),
        table,
        failure: (!passed).then(|| {
            format!(
                "diagonal residue check {:e} above {RESIDUE_TOLERANCE:e}",
                check.relative_residual
            )
        }),
    })
}

fn compare(a: &FamilyArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let spec = a.spec(knobs)?;
    let r = moment_report(&spec, &knobs.moments())?;
    let mut table = Table::new();
    family_row(table.row(), &spec)
        .complex("brute", r.brute_force.value)
        .complex("executed", r.executed_main.value)
        .complex("theorem1", r.theorem1_main)
        .complex("diagonal", r.diagonal_main)
        .num("relative_gap", r.relative_gap)
        .num("error_bar", r.brute_force.error + r.executed_main.error);
    Ok(Outcome {
        inputs: to_value(&spec),
        result: to_value(&r),
        table,
        failure: None,
    })
}

#[derive(Deserialize)]
struct LambdaRow {
    h: u64,
    re: f64,
    im: f64,
}

fn read_lambda(path: &Path, bound: Option<u64>) -> Result<CoefficientVector, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["h", "re", "im"] {
        return Err(bad(format!(
            "expected header h,re,im, got {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let rows: Vec<LambdaRow> = rdr
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| bad(e.to_string()))?;
    let bound = bound.unwrap_or_else(|| rows.iter().map(|r| r.h).max().unwrap_or(1));
    CoefficientVector::new(rows.iter().map(|r| (r.h, Complex64::new(r.re, r.im))), bound)
        .map_err(|e| bad(e.to_string()))
}

fn sweep(a: &SweepArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let shifts = a.shifts.resolve(a.scale_q)?;
    let mut spec = FamilySpec::new(a.scale_q, shifts, 1, 1)?;
    spec.weight = knobs.weight;
    spec.validate()?;
    let lambda = read_lambda(&a.lambda_file, a.length_bound)?;
    let r = weighted_sweep(&spec, &lambda, &knobs.moments())?;
    let mut table = Table::new();
    shift_row(table.row(), a.scale_q, &shifts)
        .complex("brute", r.brute.value)
        .num("brute_error", r.brute.error)
        .complex("main", r.main.value)
        .num("main_error", r.main.error)
        .complex("residual", r.residual)
        .num("cells", r.cells)
        .num("character_count", r.character_count);
    Ok(Outcome {
        inputs: json!({
            "scale_q": a.scale_q,
            "shifts": shifts,
            "weight": spec.weight,
            "lambda_file": a.lambda_file.display().to_string(),
            "lambda": lambda,
        }),
        result: to_value(&r),
        table,
        failure: None,
    })
}

fn kernel(a: &KernelArgs, knobs: &Knobs) -> Result<Outcome, CliError> {
    let z = Complex64::new(a.z_re, a.z_im);
    let k = kernel_identity_check(a.r, z, a.c, &knobs.kernel)?;
    let passed = k.residual <= a.tolerance;
    let mut table = Table::new();
    table
        .row()
        .num("r", a.r)
        .complex("z", z)
        .num("c", a.c)
        .complex("lhs", k.lhs)
        .complex("lhs_smoothed", k.lhs_smoothed)
        .complex("rhs", k.rhs)
        .num("residual", k.residual)
        .num("smoothing_bias", k.smoothing_bias)
        .num("tolerance", a.tolerance)
        .num("passed", passed);
    Ok(Outcome {
        inputs: json!({ "r": a.r, "z": { "re": z.re, "im": z.im }, "c": a.c, "tolerance": a.tolerance }),
        result: json!({ "check": k, "passed": passed }),
        table,
        failure: (!passed).then(|| format!("kernel identity residual {:e} above {:e}", k.residual, a.tolerance)),
    })
}

fn orthogonality(a: &OrthogonalityArgs) -> Result<Outcome, CliError> {
    let q = FactoredInt::new(a.q)?;
    let mut cases = 0u64;
    let mut worst = (0.0f64, 0, 0);
    for m in 1..=a.max_mn {
        for n in 1..=a.max_mn {
            if gcd(m * n, a.q) != 1 {
                continue;
            }
            let lhs = orthogonality_sum(&q, m, n)?;
            let rhs = orthogonality_formula(&q, m, n)?.to_f64();
            let r = (lhs - rhs).norm();
            cases += 1;
            if !(r <= worst.0) {
                worst = (r, m, n);
            }
        }
    }
    let passed = cases > 0 && worst.0 <= a.tolerance;
    let count = even_primitive_count(&q);
    let mut table = Table::new();
    table
        .row()
        .num("q", a.q)
        .num("even_primitive_count", count)
        .num("cases", cases)
        .num("max_residual", worst.0)
        .num("worst_m", worst.1)
        .num("worst_n", worst.2)
        .num("tolerance", a.tolerance)
        .num("passed", passed);
    Ok(Outcome {
        inputs: json!({ "q": a.q, "max_mn": a.max_mn, "tolerance": a.tolerance }),
        result: json!({
            "even_primitive_count": count,
            "cases": cases,
            "max_residual": worst.0,
            "worst_pair": [worst.1, worst.2],
            "passed": passed,
        }),
        table,
        failure: (!passed).then(|| format!("orthogonality residual {:e} above {:e}", worst.0, a.tolerance)),
    })
}
