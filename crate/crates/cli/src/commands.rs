//! Subcommand implementations. Every command resolves its settings from
//! flags plus the optional config file, runs, prints a short human summary
//! to stdout, and writes a JSON report when --out is given.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use nosignal::bits::BitString;
use nosignal::channel::{run_experiment, trial_records_csv, BobPolicy, ChannelConfig};
use nosignal::measure::{
    outcome_probabilities, product_family, sample_outcomes, string_probability, MeasurementFamily,
};
use nosignal::metrics;
use nosignal::nosignaling::{
    alice_marginal, random_bob_family, scenario_equivalence, spin_axis_family, BobKind,
};
use nosignal::rng::derive_stream;
use nosignal::state::{
    bernoulli_state, maximally_mixed, pure_density, tensor_power, DensityOperator,
};
use nosignal::Ket;

use crate::config::{pick, pick_or, required_seed, FileConfig};
use crate::{
    ChannelRunArgs, CliError, MeasureArgs, OracleArgs, RandomnessArgs, ScenariosArgs, VerifyArgs,
};

/// Report envelope shared by every subcommand.
#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: Value,
    results: Value,
    runtime_ms: u128,
    seed: u64,
}

fn write_report(
    out: Option<&Path>,
    command: &str,
    config: Value,
    results: Value,
    seed: u64,
    started: Instant,
) -> Result<(), CliError> {
    let Some(path) = out else { return Ok(()) };
    let report = Report {
        command,
        config,
        results,
        runtime_ms: started.elapsed().as_millis(),
        seed,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn verify_nosignaling(args: &VerifyArgs, file: &FileConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = required_seed(&args.seed, file)?;
    let trials = pick_or(&args.trials, &file.trials, 1000);
    let tol = pick_or(&args.tol, &file.tolerance, 1e-12);
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }

    let mut max_deviation: f64 = 0.0;
    let mut spin = 0usize;
    let mut kraus = 0usize;
    for i in 0..trials as u64 {
        let kind = if i % 2 == 0 {
            spin += 1;
            BobKind::SpinAxis
        } else {
            kraus += 1;
            BobKind::GeneralKraus
        };
        let bob = random_bob_family(derive_stream(seed, &[i]).next_u64(), kind);
        let marginal = alice_marginal(&bob)?;
        max_deviation = max_deviation.max((marginal - 0.5).abs());
    }
    let pass = max_deviation <= tol;
    println!(
        "max |P(0) - 1/2| = {max_deviation:.3e} over {trials} random Bob families \
         ({spin} spin-axis, {kraus} general-kraus), tolerance {tol:.1e}: {}",
        if pass { "OK" } else { "VIOLATED" }
    );
    write_report(
        args.out.as_deref(),
        "verify-nosignaling",
        json!({ "trials": trials, "tolerance": tol }),
        json!({
            "max_deviation": max_deviation,
            "spin_axis_families": spin,
            "general_kraus_families": kraus,
            "pass": pass,
        }),
        seed,
        started,
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "max |P(0) - 1/2| = {max_deviation:.3e} exceeds {tol:.1e}"
        )))
    }
}

pub fn scenarios(args: &ScenariosArgs, file: &FileConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = required_seed(&args.seed, file)?;
    let trials = pick_or(&args.trials, &file.trials, 100);
    let tol = pick_or(&args.tol, &file.tolerance, 1e-12);

    let report = scenario_equivalence(seed, trials)?;
    let max_dev = report.max_deviation();
    let pass = max_dev <= tol && report.max_cross_scenario_gap <= tol;
    println!(
        "{trials} trials: max |marginal - 1/2| = {max_dev:.3e}, \
         max cross-scenario gap = {:.3e}, tolerance {tol:.1e}: {}",
        report.max_cross_scenario_gap,
        if pass { "OK" } else { "VIOLATED" }
    );
    write_report(
        args.out.as_deref(),
        "scenarios",
        json!({ "trials": trials, "tolerance": tol }),
        json!({
            "max_deviation_bob_once": report.max_deviation_bob_once,
            "max_deviation_bob_twice": report.max_deviation_bob_twice,
            "max_deviation_alice_alone": report.max_deviation_alice_alone,
            "max_cross_scenario_gap": report.max_cross_scenario_gap,
            "per_trial": serde_json::to_value(&report.per_trial)
                .map_err(|e| CliError::Usage(e.to_string()))?,
            "pass": pass,
        }),
        seed,
        started,
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "scenario deviation {max_dev:.3e} exceeds {tol:.1e}"
        )))
    }
}

fn parse_policy(name: &str) -> Result<BobPolicy, CliError> {
    match name {
        "honest-protocol" => Ok(BobPolicy::HonestProtocol),
        "always-nothing" => Ok(BobPolicy::AlwaysNothing),
        "always-scramble" => Ok(BobPolicy::AlwaysScramble),
        other => Err(CliError::Usage(format!(
            "unknown policy {other:?} (expected honest-protocol, always-nothing, or always-scramble)"
        ))),
    }
}

pub fn channel_run(args: &ChannelRunArgs, file: &FileConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = required_seed(&args.seed, file)?;
    let block_len = pick_or(&args.block_len, &file.block_len, 256);
    let trials = pick_or(&args.trials, &file.trials, 10_000);
    let template_seed = pick(&args.template_seed, &file.template_seed)
        .unwrap_or_else(|| derive_stream(seed, &[1]).next_u64());
    let policy = parse_policy(&pick_or(
        &args.policy,
        &file.policy,
        "honest-protocol".to_string(),
    ))?;
    let calib_samples = pick_or(&args.calib_samples, &file.calib_samples, 2000);
    let calib_quantile = pick_or(&args.calib_quantile, &file.calib_quantile, 0.05);
    let threshold = match pick(&args.threshold, &file.threshold) {
        Some(t) => t,
        None => metrics::calibrate_threshold(
            block_len,
            calib_samples,
            calib_quantile,
            derive_stream(seed, &[2]).next_u64(),
        )?,
    };

    let calibrated = args.threshold.is_none() && file.threshold.is_none();
    let cfg = ChannelConfig {
        block_len,
        trials,
        template_seed,
        master_seed: seed,
        classifier_threshold: threshold,
        bob_policy: policy,
    };
    let experiment = run_experiment(&cfg)?;
    let report = &experiment.report;
    println!(
        "channel: N = {block_len}, trials = {trials}, policy = {policy:?}, theta = {threshold:.4}",
    );
    println!(
        "MI = {:.6} bits, accuracy = {:.4}, ratio KS p = {:.4}, confusion = {:?}",
        report.mutual_information_bits,
        report.decode_accuracy,
        report.ratio_ks.p_value,
        report.confusion
    );
    if let Some(csv_path) = pick(&args.csv, &file.csv) {
        std::fs::write(&csv_path, trial_records_csv(&experiment.records))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", csv_path.display())))?;
    }
    write_report(
        pick(&args.out, &file.out).as_deref(),
        "channel run",
        json!({
            "block_len": block_len,
            "trials": trials,
            "template_seed": template_seed,
            "policy": serde_json::to_value(policy).map_err(|e| CliError::Usage(e.to_string()))?,
            "threshold": threshold,
            "threshold_calibrated": calibrated,
            "calib_samples": if calibrated { Some(calib_samples) } else { None },
            "calib_quantile": if calibrated { Some(calib_quantile) } else { None },
        }),
        serde_json::to_value(report).map_err(|e| CliError::Usage(e.to_string()))?,
        seed,
        started,
    )?;
    Ok(())
}

pub fn randomness_analyze(args: &RandomnessArgs, file: &FileConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = required_seed(&args.seed, file)?;
    let input: PathBuf = pick(&args.input, &file.input)
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let raw = args.raw || file.raw.unwrap_or(false);
    let max_k = pick_or(&args.max_k, &file.max_k, 4);
    let entropy_k = pick_or(&args.entropy_k, &file.entropy_k, 4);

    let bits = if raw {
        let bytes = std::fs::read(&input)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
        metrics::bits_from_bytes(&bytes)?
    } else {
        let text = std::fs::read_to_string(&input)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
        metrics::parse_bits_ascii(&text)?
    };

    let ratio = metrics::compression_ratio(&bits)?;
    let entropy = metrics::block_entropy(&bits, entropy_k)?;
    let borel = metrics::borel_normality(&bits, max_k)?;
    println!(
        "{}: {} bits, compression ratio = {ratio:.4}, block entropy (k = {entropy_k}) = \
         {entropy:.4} bits/symbol, Borel normality (k <= {max_k}): {}",
        input.display(),
        bits.len(),
        if borel.passes() { "pass" } else { "FAIL" }
    );
    write_report(
        pick(&args.out, &file.out).as_deref(),
        "randomness analyze",
        json!({
            "input": input.display().to_string(),
            "raw": raw,
            "max_k": max_k,
            "entropy_k": entropy_k,
        }),
        json!({
            "n_bits": bits.len(),
            "compression_ratio": ratio,
            "block_entropy": { "k": entropy_k, "bits_per_symbol": entropy },
            "borel": serde_json::to_value(&borel)
                .map_err(|e| CliError::Usage(e.to_string()))?,
            "borel_pass": borel.passes(),
        }),
        seed,
        started,
    )?;
    Ok(())
}

fn parse_state(name: &str, p: Option<f64>) -> Result<DensityOperator, CliError> {
    match name {
        "maximally-mixed" => Ok(maximally_mixed()),
        "zero" => Ok(pure_density(&Ket::basis(2, 0))?),
        "one" => Ok(pure_density(&Ket::basis(2, 1))?),
        "bernoulli" => {
            let p =
                p.ok_or_else(|| CliError::Usage("--p is required for the bernoulli state".into()))?;
            Ok(bernoulli_state(p)?)
        }
        other => Err(CliError::Usage(format!(
            "unknown state {other:?} (expected maximally-mixed, zero, one, or bernoulli)"
        ))),
    }
}

fn parse_axis(text: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("invalid axis {text:?}: {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "axis needs three components, got {}",
            parts.len()
        )));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn parse_family(name: &str, axis: Option<&str>) -> Result<MeasurementFamily, CliError> {
    match name {
        "computational" => Ok(MeasurementFamily::computational()),
        "spin" => {
            let axis = axis
                .ok_or_else(|| CliError::Usage("--axis is required for the spin family".into()))?;
            Ok(spin_axis_family(parse_axis(axis)?)?)
        }
        other => Err(CliError::Usage(format!(
            "unknown family {other:?} (expected computational or spin)"
        ))),
    }
}

pub fn measure_sample(args: &MeasureArgs, file: &FileConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = required_seed(&args.seed, file)?;
    let state_name = pick_or(&args.state, &file.state, "maximally-mixed".to_string());
    let family_name = pick_or(&args.family, &file.family, "computational".to_string());
    let axis = pick(&args.axis, &file.axis);
    let shots = pick_or(&args.shots, &file.shots, 1000);
    let p = pick(&args.p, &file.p);

    let rho = parse_state(&state_name, p)?;
    let family = parse_family(&family_name, axis.as_deref())?;
    let exact = outcome_probabilities(&rho, &family)?;
    let outcomes = sample_outcomes(&rho, &family, shots, seed)?;

    let mut counts = vec![0u64; family.len()];
    for &k in &outcomes {
        counts[k] += 1;
    }
    let outcome_string: String = outcomes
        .iter()
        .map(|&k| family.label(k).to_string())
        .collect();
    let summary: Vec<Value> = family
        .labels()
        .enumerate()
        .map(|(k, label)| {
            json!({
                "label": label,
                "count": counts[k],
                "frequency": counts[k] as f64 / shots as f64,
                "exact_probability": exact[k],
            })
        })
        .collect();
    println!(
        "{shots} shots of {family_name} on {state_name}: {:?}",
        family
            .labels()
            .enumerate()
            .map(|(k, l)| format!("{l}: {}", counts[k]))
            .collect::<Vec<_>>()
    );
    write_report(
        pick(&args.out, &file.out).as_deref(),
        "measure sample",
        json!({
            "state": state_name,
            "p": p,
            "family": family_name,
            "axis": axis,
            "shots": shots,
        }),
        json!({
            "outcomes": outcome_string,
            "per_label": summary,
        }),
        seed,
        started,
    )?;
    Ok(())
}

pub fn oracle_enum(args: &OracleArgs, file: &FileConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = required_seed(&args.seed, file)?;
    let n = pick_or(&args.n, &file.n, 3);
    let tol = pick_or(&args.tol, &file.tolerance, 1e-12);
    if !(1..=7).contains(&n) {
        return Err(CliError::Usage(format!(
            "--n must be between 1 and 7, got {n}"
        )));
    }

    let rho = maximally_mixed();
    let family = MeasurementFamily::computational();
    let big = tensor_power(&rho, n as u32)?;
    let slots: Vec<&MeasurementFamily> = vec![&family; n];
    let product = product_family(&slots)?;
    let tensor_probs = outcome_probabilities(&big, &product)?;
    let uniform = 0.5f64.powi(n as i32);

    let mut max_residual: f64 = 0.0;
    for value in 0..(1usize << n) {
        let x = BitString::from_index(value, n);
        let direct = string_probability(&rho, &family, &x)?;
        let idx = product
            .index_of(&x.to_string())
            .expect("product labels cover all strings");
        max_residual = max_residual
            .max((direct - tensor_probs[idx]).abs())
            .max((direct - uniform).abs());
    }
    let pass = max_residual <= tol;
    println!(
        "string law vs tensor law on {} strings of length {n}: \
         max residual = {max_residual:.3e}, tolerance {tol:.1e}: {}",
        1usize << n,
        if pass { "OK" } else { "VIOLATED" }
    );
    write_report(
        pick(&args.out, &file.out).as_deref(),
        "oracle enum",
        json!({ "n": n, "tolerance": tol }),
        json!({ "max_residual": max_residual, "strings": 1usize << n, "pass": pass }),
        seed,
        started,
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "oracle mismatch {max_residual:.3e} exceeds {tol:.1e}"
        )))
    }
}
