//! Command implementations. Each returns the process exit code:
//! 0 success, 1 usage/parse/numerical error (via `CliError`), 2 when the
//! input has no real symplectic diagonalisation (verdict still written).

use std::str::FromStr;
use std::time::Instant;

use sympdec::baseline::decompose_baseline;
use sympdec::degenerate::{decompose_perturbed, make_plan};
use sympdec::detdiag::{decompose_det, DetDiagOptions, KbarPolicy};
use sympdec::indefinite::{decompose_indefinite, IndefiniteOutcome};
use sympdec::symp::{
    gauge_distance, is_symplectic, reconstruction_residual, CovMatrix, Ordering, SympForm,
};
use sympdec::sympeig::symplectic_eigenvalues;
use sympdec::{random_covariance, Error};

use crate::files::{
    parse_matrix_input, write_output, DecompFile, MatrixFile, Metadata, OptionsEcho,
};
use crate::{CliError, Command};

pub fn run(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Decompose { input, method, ordering, tol, epsilon, allow_indefinite, kbar, output } => {
            decompose(&input, &method, ordering, tol, epsilon, allow_indefinite, &kbar, &output)
        }
        Command::Verify { input, decomp, tol } => verify(&input, &decomp, tol),
        Command::Compare { input } => compare(&input),
        Command::Gen { modes, lambdas, degenerate, indefinite, seed, output } => {
            gen(modes, lambdas, degenerate, indefinite, seed, &output)
        }
        Command::Bench { modes, trials, seed, csv } => bench(&modes, trials, seed, csv.as_deref()),
    }
}

fn parse_ordering_flag(flag: &Option<String>) -> Result<Option<Ordering>, CliError> {
    flag.as_deref()
        .map(|s| Ordering::from_str(s).map_err(CliError::Usage))
        .transpose()
}

fn parse_kbar(kbar: &str) -> Result<KbarPolicy, CliError> {
    match kbar {
        "per-mode" => Ok(KbarPolicy::PerModeMax),
        "fixed" => Ok(KbarPolicy::Fixed(0)),
        other => Err(CliError::Usage(format!("unknown kbar policy '{other}' (per-mode|fixed)"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn decompose(
    input: &str,
    method: &str,
    ordering: Option<String>,
    tol: f64,
    epsilon: Option<f64>,
    allow_indefinite: bool,
    kbar: &str,
    output: &str,
) -> Result<i32, CliError> {
    let raw_ordering = parse_ordering_flag(&ordering)?;
    let (v, _) = parse_matrix_input(input, raw_ordering)?;
    let kbar_policy = parse_kbar(kbar)?;
    let opts = DetDiagOptions { tol, kbar: kbar_policy, ..Default::default() };
    let echo = |eps: Option<f64>| OptionsEcho {
        kbar: kbar.to_string(),
        tol: opts.tol,
        tol_deg: opts.tol_deg,
        epsilon: eps,
        seed: None,
    };

    let (file, code) = match method {
        "baseline" => {
            let w = decompose_baseline(&v).map_err(CliError::Lib)?;
            (DecompFile::ok(&w, "baseline", echo(None)), 0)
        }
        "det" if allow_indefinite => match decompose_indefinite(&v, &opts).map_err(CliError::Lib)? {
            IndefiniteOutcome::Diagonalized(w) => {
                (DecompFile::ok(&w, "det-indefinite", echo(None)), 0)
            }
            IndefiniteOutcome::NotDiagonalizable(nd) => {
                eprintln!("E_NOT_DIAGONALIZABLE: {}", nd.reason);
                (
                    DecompFile::not_diagonalizable(&nd, v.modes(), v.ordering(), "det-indefinite", echo(None)),
                    2,
                )
            }
        },
        "det" => {
            let spec = symplectic_eigenvalues(&v).map_err(|e| match e {
                Error::NotPositiveDefinite { .. } => CliError::Lib(e),
                other => CliError::Lib(other),
            })?;
            if spec.is_degenerate() {
                let mut plan = make_plan(&v, &spec, 0);
                if let Some(eps) = epsilon {
                    plan.epsilons = vec![eps];
                }
                let out = decompose_perturbed(&v, &plan, &opts).map_err(CliError::Lib)?;
                (
                    DecompFile::ok(&out.decomp, "det-perturbed", echo(Some(out.epsilon))),
                    0,
                )
            } else {
                let w = decompose_det(&v, &opts).map_err(CliError::Lib)?;
                (DecompFile::ok(&w, "det", echo(None)), 0)
            }
        }
        other => return Err(CliError::Usage(format!("unknown method '{other}' (det|baseline)"))),
    };

    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::Io(format!("serialize: {e}")))?;
    write_output(output, &json)?;
    Ok(code)
}

fn verify(input: &str, decomp: &str, tol: f64) -> Result<i32, CliError> {
    let (v, _) = parse_matrix_input(input, None)?;
    let text = crate::files::read_input(decomp)?;
    let df: DecompFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{decomp}: {e}")))?;
    if df.d != v.modes() {
        return Err(CliError::Lib(Error::DimensionMismatch { expected: v.modes(), got: df.d }));
    }
    let s = df.s_matrix()?;
    let lambdas = df
        .lambdas
        .clone()
        .ok_or_else(|| CliError::Parse("decomposition file holds no lambdas".into()))?;
    let s_ordering = Ordering::from_str(&df.ordering).map_err(CliError::Parse)?;
    let v_in_s_frame = sympdec::convert_ordering(&v, s_ordering);

    let (residual_symp, symp_ok) =
        is_symplectic(&s, &SympForm::new(df.d, s_ordering), tol).map_err(CliError::Lib)?;
    let residual_rec = reconstruction_residual(&s, &lambdas, v_in_s_frame.matrix(), s_ordering);
    let rec_ok = residual_rec <= tol;
    let verdict = if symp_ok && rec_ok { "PASS" } else { "FAIL" };
    println!("residual_symp={residual_symp:.6e} residual_rec={residual_rec:.6e} tol={tol:.1e} {verdict}");
    Ok(if symp_ok && rec_ok { 0 } else { 1 })
}

fn compare(input: &str) -> Result<i32, CliError> {
    let (v, _) = parse_matrix_input(input, None)?;
    let spec = symplectic_eigenvalues(&v).map_err(CliError::Lib)?;
    let opts = DetDiagOptions::default();

    let (v_used, note) = if spec.is_degenerate() {
        let plan = make_plan(&v, &spec, 0);
        let eps = plan.epsilons[0];
        let perturbed = CovMatrix::new(v.matrix() + &plan.delta * eps, v.ordering())
            .map_err(CliError::Lib)?;
        (perturbed, Some(format!(
            "degenerate spectrum: methods compared on the perturbed matrix (epsilon={eps:.3e})"
        )))
    } else {
        (v.clone(), None)
    };

    let t0 = Instant::now();
    let w_det = decompose_det(&v_used, &opts).map_err(CliError::Lib)?;
    let time_det = t0.elapsed().as_secs_f64() * 1e3;

    let t1 = Instant::now();
    let w_base = decompose_baseline(&v_used).map_err(CliError::Lib)?;
    let time_base = t1.elapsed().as_secs_f64() * 1e3;

    let lambda_diff = w_det
        .lambdas
        .iter()
        .zip(w_base.lambdas.iter())
        .map(|(a, b)| (a - b).abs() / a.abs().max(1e-300))
        .fold(0.0f64, f64::max);
    let dist = gauge_distance(&w_det.s, &w_base.s, &w_det.lambdas).map_err(CliError::Lib)?;

    println!("lambda_max_rel_diff={lambda_diff:.6e}");
    println!("gauge_distance={dist:.6e}");
    println!(
        "residuals_det symp={:.6e} rec={:.6e}",
        w_det.residual_symp, w_det.residual_rec
    );
    println!(
        "residuals_baseline symp={:.6e} rec={:.6e}",
        w_base.residual_symp, w_base.residual_rec
    );
    println!("time_det_ms={time_det:.3}");
    println!("time_baseline_ms={time_base:.3}");
    if let Some(n) = note {
        println!("note={n}");
    }
    Ok(0)
}

fn parse_lambda_spec(
    modes: usize,
    lambdas: Option<String>,
    degenerate: Option<String>,
    indefinite: Option<String>,
) -> Result<Vec<f64>, CliError> {
    let mut lams: Vec<f64> = Vec::new();
    if let Some(list) = lambdas {
        for part in list.split(',').filter(|p| !p.is_empty()) {
            lams.push(
                part.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("--lambdas '{part}': {e}")))?,
            );
        }
    }
    if let Some(sign_list) = indefinite {
        let signs: Vec<&str> = sign_list.split(',').map(str::trim).collect();
        if signs.len() != lams.len() {
            return Err(CliError::Usage(format!(
                "--indefinite lists {} signs for {} lambdas",
                signs.len(),
                lams.len()
            )));
        }
        for (l, s) in lams.iter_mut().zip(signs.iter()) {
            match *s {
                "+" => {}
                "-" => *l = -*l,
                other => return Err(CliError::Usage(format!("--indefinite sign '{other}' (use + or -)"))),
            }
        }
    }
    if let Some(groups) = degenerate {
        for part in groups.split(',').filter(|p| !p.is_empty()) {
            let (count, value) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("--degenerate '{part}' (use COUNT:VALUE)")))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("--degenerate count '{count}': {e}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("--degenerate value '{value}': {e}")))?;
            lams.extend(std::iter::repeat_n(value, count));
        }
    }
    if lams.len() != modes {
        return Err(CliError::Usage(format!(
            "lambda spec yields {} modes, --modes says {}",
            lams.len(),
            modes
        )));
    }
    if let Some(zero) = lams.iter().find(|l| **l == 0.0) {
        return Err(CliError::Lib(Error::InvalidLambda(*zero)));
    }
    Ok(lams)
}

fn gen(
    modes: usize,
    lambdas: Option<String>,
    degenerate: Option<String>,
    indefinite: Option<String>,
    seed: u64,
    output: &str,
) -> Result<i32, CliError> {
    let lams = parse_lambda_spec(modes, lambdas, degenerate, indefinite)?;
    let (v, _) = random_covariance(modes, &lams, seed).map_err(CliError::Lib)?;
    let file = MatrixFile::from_cov(
        &v,
        Some(Metadata {
            label: Some(format!("generated d={modes} seed={seed}")),
            seed: Some(seed),
            ground_truth_lambdas: Some(lams),
        }),
    );
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::Io(format!("serialize: {e}")))?;
    write_output(output, &json)?;
    Ok(0)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn bench_lambdas(d: usize, seed: u64) -> Vec<f64> {
    // well-separated spectrum, deterministic in (d, seed)
    (0..d)
        .map(|m| 1.0 + 0.6 * m as f64 + 0.01 * ((seed % 17) as f64 + 1.0))
        .rev()
        .collect()
}

fn bench(modes: &str, trials: usize, seed: u64, csv_path: Option<&str>) -> Result<i32, CliError> {
    let dims: Result<Vec<usize>, _> = modes
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| p.trim().parse::<usize>())
        .collect();
    let dims = dims.map_err(|e| CliError::Usage(format!("--modes '{modes}': {e}")))?;
    let opts = DetDiagOptions::default();

    let mut rows: Vec<(usize, &'static str, f64, f64)> = Vec::new();
    for &d in &dims {
        let mut times_det = Vec::with_capacity(trials);
        let mut times_base = Vec::with_capacity(trials);
        let mut worst_residual = 0.0f64;
        for trial in 0..trials {
            let lams = bench_lambdas(d, seed + trial as u64);
            let (v, _) =
                random_covariance(d, &lams, seed.wrapping_add(trial as u64)).map_err(CliError::Lib)?;

            let t0 = Instant::now();
            let w_det = decompose_det(&v, &opts).map_err(CliError::Lib)?;
            times_det.push(t0.elapsed().as_secs_f64() * 1e3);

            let t1 = Instant::now();
            let w_base = decompose_baseline(&v).map_err(CliError::Lib)?;
            times_base.push(t1.elapsed().as_secs_f64() * 1e3);

            worst_residual = worst_residual
                .max(w_det.residual_symp)
                .max(w_det.residual_rec)
                .max(w_base.residual_symp)
                .max(w_base.residual_rec);
        }
        rows.push((d, "det", median(times_det), worst_residual));
        rows.push((d, "baseline", median(times_base), worst_residual));
    }

    let mut csv = String::from("d,method,median_ms,max_residual\n");
    for (d, method, ms, res) in &rows {
        csv.push_str(&format!("{d},{method},{ms:.3},{res:.3e}\n"));
    }
    print!("{csv}");
    if let Some(path) = csv_path {
        std::fs::write(path, &csv).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    }
    eprintln!("{:>4} {:>10} {:>12} {:>14}", "d", "method", "median_ms", "max_residual");
    for (d, method, ms, res) in &rows {
        eprintln!("{d:>4} {method:>10} {ms:>12.3} {res:>14.3e}");
    }
    Ok(0)
}
