//! Subcommand implementations.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use oseledets_core::exact_model::{generate, ExactModelSpec, ZMode};
use oseledets_core::method::Approximator;
use oseledets_core::spectrum::{
    choose_shifts_with_fraction, qr_lyapunov, qr_lyapunov_seeded, DEFAULT_LYAPUNOV_SEED,
};
use oseledets_core::validation::{
    equivariance_defect, exact_error, expansion_rate_series, TestSeries,
};
use oseledets_core::{CocycleWindow, DVector, DichotomyShifts, Method, MethodTag};
use rayon::prelude::*;

use crate::cli::{
    Cli, Command, ComputeArgs, GenExactArgs, LyapArgs, MethodParams, ShiftArgs, SweepArgs,
    ValidateArgs,
};
use crate::error::{CliError, CliResult};
use crate::format::{read_cocycle_file, write_cocycle_file};
use crate::output::{csv_writer, real, sink};
use crate::truth::TruthTable;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::GenExact(a) => gen_exact(&a),
        Command::Compute(a) => compute(&a, &mut *sink(a.out.as_deref())?),
        Command::Sweep(a) => sweep(&a, &mut *sink(a.out.as_deref())?),
        Command::Validate(a) => validate(&a, &mut *sink(a.out.as_deref())?),
        Command::Lyap(a) => lyap(&a, &mut *sink(a.out.as_deref())?),
    }
}

/// `log-ladder:k` or a comma-separated list.
pub fn parse_spectrum(text: &str, dim: usize) -> CliResult<Vec<f64>> {
    if let Some(k) = text.strip_prefix("log-ladder:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Usage(format!("bad ladder top `{k}`")))?;
        return Ok(ExactModelSpec::log_ladder(k, dim)?);
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad exponent `{s}`")))
        })
        .collect()
}

pub fn gen_exact(a: &GenExactArgs) -> CliResult<()> {
    let spectrum = match &a.spectrum {
        Some(s) => parse_spectrum(s, a.dim)?,
        None => parse_spectrum(&format!("log-ladder:{}", a.dim), a.dim)?,
    };
    let spec = ExactModelSpec {
        dim: a.dim,
        spectrum,
        epsilon: a.eps,
        half_width: a.half_width,
        seed: a.seed.seed,
        z_mode: if a.fixed_z {
            ZMode::Fixed
        } else {
            ZMode::Fresh
        },
    };
    let (window, truth) = generate(&spec)?;
    write_cocycle_file(&a.out, &window)?;
    if let Some(path) = &a.truth_out {
        let f =
            std::fs::File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        TruthTable::from_ground_truth(&truth).write(std::io::BufWriter::new(f))?;
    }
    log::info!(
        "wrote {} matrices for times {}..={}",
        window.len(),
        window.start(),
        window.end()
    );
    Ok(())
}

/// Explicit shifts, or estimates from the three leading exponents.
pub fn resolve_shifts(window: &CocycleWindow, s: &ShiftArgs) -> CliResult<DichotomyShifts> {
    if let (Some(l), Some(r)) = (s.lambda_left, s.lambda_right) {
        return Ok(DichotomyShifts::new(l, r)?);
    }
    let spectrum = qr_lyapunov(window, 3)?;
    let shifts = choose_shifts_with_fraction(&spectrum, s.shift_fraction)?;
    log::info!(
        "estimated exponents {:?}; shifts {} {}",
        spectrum.lambdas,
        shifts.lambda_left,
        shifts.lambda_right
    );
    Ok(shifts)
}

fn misplaced(flag: &str, tag: MethodTag) -> CliError {
    CliError::Usage(format!("--{flag} does not apply to {tag}"))
}

/// Defaults for `tag`, then any overrides from `p`.
pub fn build_method(
    tag: MethodTag,
    j: usize,
    n: usize,
    p: &MethodParams,
    shifts: Option<DichotomyShifts>,
    seed: u64,
) -> CliResult<Method> {
    let mut method = Method::with_defaults(tag, j, n, shifts, seed)?;
    let c_init = p.c_init.as_ref().map(|c| DVector::from_vec(c.clone()));
    match &mut method {
        Method::Svd { m, .. } => {
            if let Some(x) = p.m {
                *m = x;
            }
        }
        Method::Svd2 { m, stride, .. } => {
            if let Some(x) = p.m {
                *m = x;
            }
            if let Some(x) = p.stride {
                *stride = x;
            }
        }
        Method::Ginelli { m, c_init: c, .. } => {
            if let Some(x) = p.m {
                *m = x;
            }
            if c_init.is_some() {
                *c = c_init.clone();
            }
        }
        Method::Ginelli2 {
            m,
            m_prime,
            c_init: c,
            ..
        } => {
            if let Some(x) = p.m {
                *m = x;
            }
            if let Some(x) = p.m_prime {
                *m_prime = x;
            }
            if c_init.is_some() {
                *c = c_init.clone();
            }
        }
        Method::Wolfe {
            m1, m1_prime, m2, ..
        } => {
            if let Some(x) = p.m1 {
                *m1 = x;
            }
            if let Some(x) = p.m1_prime {
                *m1_prime = x;
            }
            if let Some(x) = p.m2 {
                *m2 = x;
            }
        }
        Method::DichIntersect { .. } | Method::DichProject { .. } => {}
    }
    let uses = |flag: &str| match (tag, flag) {
        (MethodTag::Svd | MethodTag::Svd2 | MethodTag::Ginelli | MethodTag::Ginelli2, "m") => true,
        (MethodTag::Ginelli2, "m-prime") => true,
        (MethodTag::Wolfe, "m1" | "m1-prime" | "m2") => true,
        (MethodTag::Svd2, "stride") => true,
        (MethodTag::Ginelli | MethodTag::Ginelli2, "c-init") => true,
        _ => false,
    };
    for (flag, given) in [
        ("m", p.m.is_some()),
        ("m-prime", p.m_prime.is_some()),
        ("m1", p.m1.is_some()),
        ("m1-prime", p.m1_prime.is_some()),
        ("m2", p.m2.is_some()),
        ("stride", p.stride.is_some()),
        ("c-init", p.c_init.is_some()),
    ] {
        if given && !uses(flag) {
            return Err(misplaced(flag, tag));
        }
    }
    Ok(method)
}

fn is_dichotomy(tag: MethodTag) -> bool {
    matches!(tag, MethodTag::DichIntersect | MethodTag::DichProject)
}

fn check_range(method: &Method, window: &CocycleWindow, at: i64, path: &Path) -> CliResult<()> {
    let (first, last) = method.data_range(at);
    if first < window.start() || last > window.end() {
        return Err(CliError::Usage(format!(
            "{} with N={} at time {at} needs matrices for times {first}..={last}; {} covers {}..={}",
            method.tag(),
            method.half_width(),
            path.display(),
            window.start(),
            window.end()
        )));
    }
    Ok(())
}

fn truth_vector(table: &TruthTable, at: i64, j: usize, path: &Path) -> CliResult<DVector<f64>> {
    table.vector(at, j).cloned().ok_or_else(|| {
        CliError::format(
            path.display().to_string(),
            format!("no vector for time {at}, j={j}"),
        )
    })
}

pub fn compute(a: &ComputeArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.method == MethodTag::Truth {
        return Err(CliError::Usage(
            "compute needs an approximation method".into(),
        ));
    }
    let window = read_cocycle_file(&a.input)?;
    let shifts = if is_dichotomy(a.method) {
        Some(resolve_shifts(&window, &a.shifts)?)
    } else {
        None
    };
    let method = build_method(a.method, a.j, a.n, &a.params, shifts, a.seed.seed)?;
    check_range(&method, &window, a.at, &a.input)?;
    let truth = match &a.truth {
        Some(p) => Some(truth_vector(
            &TruthTable::read_file(p)?,
            a.at,
            method.j(),
            p,
        )?),
        None => None,
    };
    let clock = Instant::now();
    let approx = method.run(&window, a.at)?;
    let elapsed = clock.elapsed().as_secs_f64() * 1e3;

    let mut header: Vec<String> = ["method", "j", "N", "time"].map(String::from).to_vec();
    let mut row = vec![
        method.tag().to_string(),
        method.j().to_string(),
        method.half_width().to_string(),
        a.at.to_string(),
    ];
    if let Some(s) = shifts {
        header.extend(["lambda_left".into(), "lambda_right".into()]);
        row.extend([real(s.lambda_left), real(s.lambda_right)]);
    }
    if let Some(t) = &truth {
        header.push("exact_error".into());
        row.push(real(exact_error(&approx.vector, t)));
    }
    if a.timing {
        header.push("elapsed_ms".into());
        row.push(real(elapsed));
    }
    header.extend((1..=approx.vector.len()).map(|i| format!("x{i}")));
    row.extend(approx.vector.iter().map(|&x| real(x)));
    if approx.degenerate_tail {
        log::warn!("trailing singular vectors are dominated by rounding");
    }
    let mut w = csv_writer(out);
    w.write_record(&header)?;
    w.write_record(&row)?;
    w.flush().map_err(|e| CliError::io("output", e))?;
    Ok(())
}

struct SweepPoint {
    tag: MethodTag,
    n: usize,
    error: f64,
    elapsed_ms: f64,
}

pub fn sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.n_step == 0 || a.n_min == 0 || a.n_min > a.n_max {
        return Err(CliError::Usage(
            "need 0 < n-min ≤ n-max and n-step > 0".into(),
        ));
    }
    if a.jobs == 0 {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    let window = read_cocycle_file(&a.input)?;
    let table = TruthTable::read_file(&a.truth)?;
    let truth = truth_vector(&table, a.at, a.j, &a.truth)?;
    let methods = a
        .methods
        .clone()
        .unwrap_or_else(|| MethodTag::ALL_METHODS.to_vec());
    if methods.contains(&MethodTag::Truth) {
        return Err(CliError::Usage("`truth` cannot be swept".into()));
    }
    let shifts = if methods.iter().any(|&t| is_dichotomy(t)) {
        Some(resolve_shifts(&window, &a.shifts)?)
    } else {
        None
    };
    let grid: Vec<(MethodTag, usize)> = methods
        .iter()
        .flat_map(|&t| (a.n_min..=a.n_max).step_by(a.n_step).map(move |n| (t, n)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        grid.par_iter()
            .map(|&(tag, n)| {
                let clock = Instant::now();
                let result = Method::with_defaults(tag, a.j, n, shifts, a.seed.seed)
                    .and_then(|m| m.run(&window, a.at));
                let elapsed_ms = clock.elapsed().as_secs_f64() * 1e3;
                let error = match result {
                    Ok(approx) => exact_error(&approx.vector, &truth),
                    Err(e) => {
                        log::warn!("{tag} at N={n}: {e}");
                        f64::NAN
                    }
                };
                SweepPoint {
                    tag,
                    n,
                    error,
                    elapsed_ms,
                }
            })
            .collect()
    });
    let mut w = csv_writer(out);
    let mut header = vec!["method", "j", "N", "error"];
    if a.timing {
        header.push("elapsed_ms");
    }
    w.write_record(&header)?;
    for p in &points {
        let mut row = vec![
            p.tag.to_string(),
            a.j.to_string(),
            p.n.to_string(),
            real(p.error),
        ];
        if a.timing {
            row.push(real(p.elapsed_ms));
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io("output", e))?;
    Ok(())
}

fn write_series<W: Write>(w: &mut csv::Writer<W>, s: &TestSeries) -> CliResult<()> {
    for &(m, v) in &s.points {
        w.write_record([s.kind.to_string(), m.to_string(), real(v)])?;
    }
    if let Some((m, e)) = &s.failure {
        log::warn!("{} series stopped at m={m}: {e}", s.kind);
        w.write_record([s.kind.to_string(), m.to_string(), real(f64::NAN)])?;
    }
    Ok(())
}

pub fn validate(a: &ValidateArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.equivariance.is_none() && a.expansion.is_none() {
        return Err(CliError::Usage(
            "give --equivariance and/or --expansion".into(),
        ));
    }
    let window = read_cocycle_file(&a.input)?;
    let table;
    let method;
    let approximator: &dyn Approximator = if a.method == MethodTag::Truth {
        let path = a
            .truth
            .as_ref()
            .ok_or_else(|| CliError::Usage("--method truth needs --truth".into()))?;
        table = TruthTable::read_file(path)?;
        &table.approximator(a.j)
    } else {
        let n =
            a.n.ok_or_else(|| CliError::Usage(format!("--n is required for {}", a.method)))?;
        let shifts = if is_dichotomy(a.method) {
            Some(resolve_shifts(&window, &a.shifts)?)
        } else {
            None
        };
        method = build_method(a.method, a.j, n, &a.params, shifts, a.seed.seed)?;
        check_range(&method, &window, a.at, &a.input)?;
        &method
    };
    let mut w = csv_writer(out);
    w.write_record(["kind", "m", "value"])?;
    if let Some(m_max) = a.equivariance {
        let s = equivariance_defect(&window, approximator, a.at, m_max)?;
        write_series(&mut w, &s)?;
    }
    if let Some(m_max) = a.expansion {
        let v = approximator.approximate(&window, a.at)?;
        let s = expansion_rate_series(&window, a.at, &v, m_max)?;
        write_series(&mut w, &s)?;
    }
    w.flush().map_err(|e| CliError::io("output", e))?;
    Ok(())
}

pub fn lyap(a: &LyapArgs, out: &mut dyn Write) -> CliResult<()> {
    let window = read_cocycle_file(&a.input)?;
    let s = qr_lyapunov_seeded(&window, a.k, a.seed.unwrap_or(DEFAULT_LYAPUNOV_SEED))?;
    let mut w = csv_writer(out);
    w.write_record(["i", "lambda"])?;
    for (i, l) in s.lambdas.iter().enumerate() {
        w.write_record([(i + 1).to_string(), real(*l)])?;
    }
    w.flush().map_err(|e| CliError::io("output", e))?;
    Ok(())
}
