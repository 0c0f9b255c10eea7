//! Simulation of the entanglement "compressibility channel": Bob tries to
//! signal one bit per N-bit block by either leaving his measurement basis
//! alone or scrambling it with a seeded template of random directions, and
//! Alice decodes each of her blocks by compressibility. Every pair is
//! simulated exactly in the full 4-dimensional two-stage law, so any
//! statistical signal would be visible if one existed. None does: the
//! mutual information between intent and decoding is zero.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::Ket;
use crate::measure::{
    collapse_by_index, outcome_probabilities_ket, sample_index, MeasurementFamily,
};
use crate::metrics::{self, KsTest};
use crate::nosignaling::{spin_axis_family, BobFamily};
use crate::rng::derive_stream;
use crate::state::bell_state;

/// What Bob actually does each trial, regardless of the intended bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobPolicy {
    /// Follow the protocol: do nothing for a 0, scramble for a 1.
    HonestProtocol,
    /// Keep the predetermined basis every trial.
    AlwaysNothing,
    /// Scramble every trial.
    AlwaysScramble,
}

/// Parameters of one channel experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Bits per block (Bell pairs per trial). At least 8.
    pub block_len: usize,
    /// Number of blocks to run.
    pub trials: usize,
    /// Seed of Bob's pre-shared template of scramble directions.
    pub template_seed: u64,
    /// Seed for all measurement outcomes.
    pub master_seed: u64,
    /// Compression-ratio cutoff: blocks below it decode as 0.
    pub classifier_threshold: f64,
    pub bob_policy: BobPolicy,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_len < 8 {
            return Err(Error::InvalidArgument(format!(
                "block_len must be at least 8, got {}",
                self.block_len
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if !(self.classifier_threshold > 0.0 && self.classifier_threshold < 2.0) {
            return Err(Error::OutOfRange {
                name: "classifier_threshold",
                value: self.classifier_threshold,
                range: "(0, 2)",
            });
        }
        Ok(())
    }
}

/// Outcome of one block transmission.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub intended_bit: u8,
    pub alice_block: BitString,
    pub compression_ratio: f64,
    pub decoded_bit: u8,
}

/// Aggregated result of a channel experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub config: ChannelConfig,
    /// Counts indexed by [intended][decoded].
    pub confusion: [[u64; 2]; 2],
    /// Plug-in mutual information of (intended, decoded), in bits.
    pub mutual_information_bits: f64,
    /// Fraction of trials where decoded == intended.
    pub decode_accuracy: f64,
    /// Two-sample KS test of the compression-ratio distributions of the two
    /// intended-bit classes.
    pub ratio_ks: KsTest,
}

/// Report plus the per-trial records it was computed from.
#[derive(Debug, Clone)]
pub struct ChannelExperiment {
    pub report: ChannelReport,
    pub records: Vec<TrialRecord>,
}

/// Bob's per-pair measurement bases for one block.
///
/// Sending 0 means doing nothing: every pair is measured along the fixed
/// predetermined direction (the computational basis). Sending 1 scrambles:
/// the pairs are measured along directions drawn from the template stream
/// seeded by (template_seed, block_index). Deterministic in all arguments.
pub fn bob_encode(
    bit: u8,
    block_len: usize,
    template_seed: u64,
    block_index: u64,
) -> Result<Vec<MeasurementFamily>> {
    match bit {
        0 => Ok(vec![MeasurementFamily::computational(); block_len]),
        1 => {
            let mut template = derive_stream(template_seed, &[block_index]);
            (0..block_len)
                .map(|_| spin_axis_family(template.next_sphere_point()))
                .collect()
        }
        other => Err(Error::InvalidArgument(format!(
            "intended bit must be 0 or 1, got {other}"
        ))),
    }
}

/// Exact two-stage simulation of one Bell pair: Bob measures with his lifted
/// family, the state collapses, then Alice measures her computational
/// projectors on the collapsed state. Returns Alice's bit.
fn simulate_pair(
    bob: &BobFamily,
    alice: &MeasurementFamily,
    psi: &Ket,
    u_bob: f64,
    u_alice: f64,
) -> Result<u8> {
    let bob_probs = outcome_probabilities_ket(psi, bob.lifted())?;
    let bob_outcome = sample_index(&bob_probs, u_bob);
    let collapsed = collapse_by_index(psi, bob.lifted(), bob_outcome)?;
    let alice_probs = outcome_probabilities_ket(&collapsed, alice)?;
    Ok(sample_index(&alice_probs, u_alice) as u8)
}

/// The bit Bob acts on under the configured policy.
fn effective_bit(policy: BobPolicy, intended_bit: u8) -> u8 {
    match policy {
        BobPolicy::HonestProtocol => intended_bit,
        BobPolicy::AlwaysNothing => 0,
        BobPolicy::AlwaysScramble => 1,
    }
}

/// Transmit one block: encode, simulate every pair exactly, decode.
pub fn run_trial(cfg: &ChannelConfig, intended_bit: u8, trial_index: u64) -> Result<TrialRecord> {
    cfg.validate()?;
    if intended_bit > 1 {
        return Err(Error::InvalidArgument(format!(
            "intended bit must be 0 or 1, got {intended_bit}"
        )));
    }
    let action = effective_bit(cfg.bob_policy, intended_bit);
    let families = bob_encode(action, cfg.block_len, cfg.template_seed, trial_index)?;
    let psi = bell_state();
    let alice = MeasurementFamily::alice_computational_on_pair();

    let mut block = BitString::with_capacity(cfg.block_len);
    // The do-nothing basis is one family repeated; lift it once.
    let shared_bob = if action == 0 {
        Some(BobFamily::from_base(families[0].clone())?)
    } else {
        None
    };
    for (pair, family) in families.into_iter().enumerate() {
        let bob = match &shared_bob {
            Some(b) => b.clone(),
            None => BobFamily::from_base(family)?,
        };
        let mut draws = derive_stream(cfg.master_seed, &[trial_index, pair as u64]);
        let u_bob = draws.next_f64();
        let u_alice = draws.next_f64();
        block.push(simulate_pair(&bob, &alice, &psi, u_bob, u_alice)?);
    }

    let compression_ratio = metrics::compression_ratio(&block)?;
    let decoded_bit = alice_decode(&block, cfg.block_len, cfg.classifier_threshold)?;
    Ok(TrialRecord {
        trial_index,
        intended_bit,
        alice_block: block,
        compression_ratio,
        decoded_bit,
    })
}

/// Alice's decoder: a block that compresses below the threshold reads as 0,
/// anything incompressible reads as 1.
pub fn alice_decode(block: &BitString, block_len: usize, theta: f64) -> Result<u8> {
    if block.len() != block_len {
        return Err(Error::DimMismatch {
            context: "alice_decode",
            expected: block_len,
            got: block.len(),
        });
    }
    Ok(if metrics::compression_ratio(block)? < theta {
        0
    } else {
        1
    })
}

/// Plug-in mutual information (base 2) of an exact or empirical 2x2 joint
/// distribution. Zero-probability cells contribute nothing.
pub fn mutual_information_joint(joint: &[[f64; 2]; 2]) -> f64 {
    let total: f64 = joint.iter().flatten().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let p: Vec<f64> = joint.iter().flatten().map(|&c| c / total).collect();
    let px = [p[0] + p[1], p[2] + p[3]];
    let py = [p[0] + p[2], p[1] + p[3]];
    let mut mi = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let pxy = p[x * 2 + y];
            if pxy > 0.0 {
                mi += pxy * (pxy / (px[x] * py[y])).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Plug-in mutual information of (intended, decoded) over trial records.
/// Errors when the records are empty or one intended class is absent.
pub fn estimate_mutual_information(records: &[TrialRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput {
            context: "estimate_mutual_information",
        });
    }
    let counts = confusion_counts(records);
    for (class, row) in counts.iter().enumerate() {
        if row[0] + row[1] == 0 {
            return Err(Error::MissingClass { class: class as u8 });
        }
    }
    let joint = [
        [counts[0][0] as f64, counts[0][1] as f64],
        [counts[1][0] as f64, counts[1][1] as f64],
    ];
    Ok(mutual_information_joint(&joint))
}

fn confusion_counts(records: &[TrialRecord]) -> [[u64; 2]; 2] {
    let mut counts = [[0u64; 2]; 2];
    for r in records {
        counts[r.intended_bit as usize][r.decoded_bit as usize] += 1;
    }
    counts
}

/// Run a full experiment: intended bits alternate 0, 1, 0, 1 over the trial
/// index (a deterministic schedule keeps intent noise out of the MI
/// estimate), trials execute independently, and the aggregate is a pure
/// function of the configuration.
pub fn run_experiment(cfg: &ChannelConfig) -> Result<ChannelExperiment> {
    cfg.validate()?;
    let records: Vec<TrialRecord> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, (t % 2) as u8, t))
        .collect::<Result<_>>()?;

    let confusion = confusion_counts(&records);
    let mutual_information_bits = estimate_mutual_information(&records)?;
    let matches = records
        .iter()
        .filter(|r| r.intended_bit == r.decoded_bit)
        .count();
    let decode_accuracy = matches as f64 / records.len() as f64;

    let ratios_zero: Vec<f64> = records
        .iter()
        .filter(|r| r.intended_bit == 0)
        .map(|r| r.compression_ratio)
        .collect();
    let ratios_one: Vec<f64> = records
        .iter()
        .filter(|r| r.intended_bit == 1)
        .map(|r| r.compression_ratio)
        .collect();
    let ratio_ks = metrics::ks_two_sample(&ratios_zero, &ratios_one)?;

    Ok(ChannelExperiment {
        report: ChannelReport {
            config: cfg.clone(),
            confusion,
            mutual_information_bits,
            decode_accuracy,
            ratio_ks,
        },
        records,
    })
}

/// Per-trial records as CSV with a header row.
pub fn trial_records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial_index,intended_bit,decoded_bit,compression_ratio\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.trial_index, r.intended_bit, r.decoded_bit, r.compression_ratio
        ));
    }
    out
}

/// Exact probability of each Alice block (indexed by the block read as a
/// binary number, first pair most significant) when the pairs are measured
/// with the given per-pair Bob bases. Pairs are independent, so the block
/// law is the product of the exact per-pair two-stage laws.
pub fn exact_block_distribution(pair_families: &[MeasurementFamily]) -> Result<Vec<f64>> {
    if pair_families.is_empty() {
        return Err(Error::EmptyInput {
            context: "exact_block_distribution",
        });
    }
    if pair_families.len() > 20 {
        return Err(Error::InvalidArgument(
            "exact enumeration supports at most 20 pairs".into(),
        ));
    }
    let psi = bell_state();
    let alice = MeasurementFamily::alice_computational_on_pair();
    let mut per_pair = Vec::with_capacity(pair_families.len());
    for family in pair_families {
        let bob = BobFamily::from_base(family.clone())?;
        let bob_probs = outcome_probabilities_ket(&psi, bob.lifted())?;
        let mut p_zero = 0.0;
        for (k, &p_branch) in bob_probs.iter().enumerate() {
            if p_branch <= 1e-12 {
                continue;
            }
            let collapsed = collapse_by_index(&psi, bob.lifted(), k)?;
            p_zero += p_branch * outcome_probabilities_ket(&collapsed, &alice)?[0];
        }
        per_pair.push(p_zero);
    }
    let n = per_pair.len();
    let mut law = Vec::with_capacity(1 << n);
    for block in 0..(1usize << n) {
        let mut p = 1.0;
        for (i, &p_zero) in per_pair.iter().enumerate() {
            let bit = (block >> (n - 1 - i)) & 1;
            p *= if bit == 0 { p_zero } else { 1.0 - p_zero };
        }
        law.push(p);
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::validate_family;

    fn test_config(policy: BobPolicy) -> ChannelConfig {
        ChannelConfig {
            block_len: 16,
            trials: 64,
            template_seed: 5,
            master_seed: 6,
            classifier_threshold: 1.0,
            bob_policy: policy,
        }
    }

    #[test]
    fn encode_zero_is_the_fixed_basis() {
        let families = bob_encode(0, 4, 99, 0).unwrap();
        assert_eq!(families.len(), 4);
        let comp = MeasurementFamily::computational();
        for f in &families {
            for k in 0..2 {
                assert!(crate::linalg::approx_eq(f.op(k), comp.op(k), 0.0).unwrap());
            }
        }
    }

    #[test]
    fn encode_one_is_deterministic_per_inputs() {
        let a = bob_encode(1, 4, 7, 0).unwrap();
        let b = bob_encode(1, 4, 7, 0).unwrap();
        let c = bob_encode(1, 4, 7, 1).unwrap();
        for (fa, fb) in a.iter().zip(&b) {
            for k in 0..2 {
                assert!(crate::linalg::approx_eq(fa.op(k), fb.op(k), 0.0).unwrap());
            }
        }
        // A different block index draws different directions.
        let same = a
            .iter()
            .zip(&c)
            .all(|(fa, fc)| crate::linalg::approx_eq(fa.op(0), fc.op(0), 1e-9).unwrap());
        assert!(!same);
        assert!(bob_encode(2, 4, 7, 0).is_err());
    }

    #[test]
    fn encoded_scramble_families_all_validate() {
        let families = bob_encode(1, 256, 13, 3).unwrap();
        assert_eq!(families.len(), 256);
        for f in &families {
            assert!(validate_family(f, 1e-12).is_valid());
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = test_config(BobPolicy::HonestProtocol);
        let a = run_trial(&cfg, 1, 3).unwrap();
        let b = run_trial(&cfg, 1, 3).unwrap();
        assert_eq!(a.alice_block, b.alice_block);
        assert_eq!(a.compression_ratio, b.compression_ratio);
        assert_eq!(a.decoded_bit, b.decoded_bit);
    }

    #[test]
    fn block_statistics_are_fair_for_both_intents() {
        // Per-bit frequency over many trials stays near 1/2 whatever Bob
        // intends; 0.5 +/- 0.02 is far looser than the binomial 4-sigma band
        // at this sample size.
        let mut cfg = test_config(BobPolicy::HonestProtocol);
        cfg.trials = 2;
        for intended in [0u8, 1] {
            let mut ones = 0usize;
            let mut bits = 0usize;
            for t in 0..600u64 {
                let r = run_trial(&cfg, intended, t).unwrap();
                ones += r.alice_block.count_ones();
                bits += r.alice_block.len();
            }
            let freq = ones as f64 / bits as f64;
            assert!(
                (freq - 0.5).abs() < 0.02,
                "intended {intended}: freq {freq}"
            );
        }
    }

    #[test]
    fn decoder_thresholds() {
        let zeros = BitString::zeros(256);
        let theta = metrics::calibrate_threshold(256, 1000, 0.05, 3).unwrap();
        assert_eq!(alice_decode(&zeros, 256, theta).unwrap(), 0);
        // Uniform blocks read as 1 except in the calibrated lower tail.
        let mut ones = 0;
        for seed in 0..200 {
            let block = BitString::random(256, seed);
            ones += alice_decode(&block, 256, theta).unwrap() as usize;
        }
        assert!(ones >= 180, "{ones}/200 uniform blocks decoded as 1");
        // theta = 2 decodes everything as 0 (ratios never reach 2).
        assert_eq!(
            alice_decode(&BitString::random(256, 9), 256, 2.0).unwrap(),
            0
        );
        assert!(alice_decode(&zeros, 128, 1.0).is_err());
    }

    #[test]
    fn mutual_information_oracle_values() {
        // Perfect correlation carries one bit.
        assert!((mutual_information_joint(&[[0.5, 0.0], [0.0, 0.5]]) - 1.0).abs() < 1e-12);
        // Independence carries none.
        assert_eq!(mutual_information_joint(&[[0.25, 0.25], [0.25, 0.25]]), 0.0);
        // A worked asymmetric case: I(X;Y) for p = [[0.4, 0.1], [0.1, 0.4]].
        let p = [[0.4, 0.1], [0.1, 0.4]];
        let expected = 2.0 * (0.4 * (0.4f64 / 0.25).log2() + 0.1 * (0.1f64 / 0.25).log2());
        assert!((mutual_information_joint(&p) - expected).abs() < 1e-12);
    }

    #[test]
    fn perfectly_correlated_records_carry_one_bit() {
        let records: Vec<TrialRecord> = (0..8u64)
            .map(|t| TrialRecord {
                trial_index: t,
                intended_bit: (t % 2) as u8,
                alice_block: BitString::zeros(8),
                compression_ratio: 0.5,
                decoded_bit: (t % 2) as u8,
            })
            .collect();
        assert!((estimate_mutual_information(&records).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimator_requires_both_classes() {
        let cfg = test_config(BobPolicy::HonestProtocol);
        let only_zero: Vec<TrialRecord> = (0..4).map(|t| run_trial(&cfg, 0, t).unwrap()).collect();
        let err = estimate_mutual_information(&only_zero).unwrap_err();
        assert!(matches!(err, Error::MissingClass { class: 1 }));
        assert!(estimate_mutual_information(&[]).is_err());
    }

    #[test]
    fn plug_in_bias_matches_multinomial_enumeration() {
        // Exact E[plug-in MI] under independent fair coins, enumerated over
        // the multinomial distribution of the 2x2 table, stays within
        // 1/(2 n ln 2) + 0.001. The first-order bias term needs n of a few
        // dozen before the O(1/n^2) remainder drops under the slack.
        for n in [64u64, 128, 256] {
            let mut expected_mi = 0.0;
            let ln_fact: Vec<f64> = {
                let mut v = vec![0.0];
                for k in 1..=n {
                    v.push(v[k as usize - 1] + (k as f64).ln());
                }
                v
            };
            let log_cell = (0.25f64).ln();
            for c00 in 0..=n {
                for c01 in 0..=(n - c00) {
                    for c10 in 0..=(n - c00 - c01) {
                        let c11 = n - c00 - c01 - c10;
                        let log_pmf = ln_fact[n as usize]
                            - ln_fact[c00 as usize]
                            - ln_fact[c01 as usize]
                            - ln_fact[c10 as usize]
                            - ln_fact[c11 as usize]
                            + (n as f64) * log_cell;
                        let joint = [[c00 as f64, c01 as f64], [c10 as f64, c11 as f64]];
                        expected_mi += log_pmf.exp() * mutual_information_joint(&joint);
                    }
                }
            }
            let bound = 1.0 / (2.0 * n as f64 * std::f64::consts::LN_2) + 0.001;
            assert!(
                expected_mi <= bound,
                "n = {n}: E[MI] = {expected_mi} > {bound}"
            );
        }
    }

    #[test]
    fn plug_in_bias_is_small_at_experiment_scale() {
        // One seeded draw of 10^4 independent fair coin pairs; the plug-in
        // estimate must stay under the same bias bound.
        let n = 10_000u64;
        let mut rng = derive_stream(101, &[0]);
        let mut counts = [[0u64; 2]; 2];
        for _ in 0..n {
            let w = rng.next_u64();
            counts[(w & 1) as usize][((w >> 1) & 1) as usize] += 1;
        }
        let joint = [
            [counts[0][0] as f64, counts[0][1] as f64],
            [counts[1][0] as f64, counts[1][1] as f64],
        ];
        let mi = mutual_information_joint(&joint);
        let bound = 1.0 / (2.0 * n as f64 * std::f64::consts::LN_2) + 0.001;
        assert!(mi <= bound, "MI = {mi} > {bound}");
    }

    #[test]
    fn small_experiment_counts_sum_to_trials() {
        let mut cfg = test_config(BobPolicy::HonestProtocol);
        cfg.block_len = 8;
        cfg.trials = 2;
        let exp = run_experiment(&cfg).unwrap();
        let total: u64 = exp.report.confusion.iter().flatten().sum();
        assert_eq!(total, 2);
        assert_eq!(exp.records.len(), 2);
        assert_eq!(exp.records[0].intended_bit, 0);
        assert_eq!(exp.records[1].intended_bit, 1);
    }

    #[test]
    fn experiments_are_byte_reproducible() {
        let cfg = test_config(BobPolicy::AlwaysScramble);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a.report).unwrap(),
            serde_json::to_string(&b.report).unwrap()
        );
        assert_eq!(trial_records_csv(&a.records), trial_records_csv(&b.records));
    }

    #[test]
    fn config_invariants_enforced() {
        let mut cfg = test_config(BobPolicy::HonestProtocol);
        cfg.block_len = 7;
        assert!(cfg.validate().is_err());
        let mut cfg = test_config(BobPolicy::HonestProtocol);
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = test_config(BobPolicy::HonestProtocol);
        cfg.classifier_threshold = 2.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn csv_has_header_and_one_row_per_trial() {
        let mut cfg = test_config(BobPolicy::HonestProtocol);
        cfg.block_len = 8;
        cfg.trials = 3;
        let exp = run_experiment(&cfg).unwrap();
        let csv = trial_records_csv(&exp.records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "trial_index,intended_bit,decoded_bit,compression_ratio"
        );
        assert!(lines[1].starts_with("0,0,"));
    }

    #[test]
    fn exact_block_law_is_uniform_under_both_policies() {
        for n in 1..=4usize {
            let nothing = bob_encode(0, n, 17, 0).unwrap();
            let scramble = bob_encode(1, n, 17, 0).unwrap();
            let law_nothing = exact_block_distribution(&nothing).unwrap();
            let law_scramble = exact_block_distribution(&scramble).unwrap();
            let uniform = 1.0 / (1 << n) as f64;
            for block in 0..(1 << n) {
                assert!(
                    (law_nothing[block] - uniform).abs() <= 1e-12,
                    "nothing n={n} block={block}: {}",
                    law_nothing[block]
                );
                assert!(
                    (law_scramble[block] - uniform).abs() <= 1e-12,
                    "scramble n={n} block={block}: {}",
                    law_scramble[block]
                );
                assert!((law_nothing[block] - law_scramble[block]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn any_decoder_sees_zero_information_exactly() {
        // With identical block laws under both actions, the exact MI of
        // (intent, decoded) is zero for every deterministic decoder; spot
        // check a few decoders at n = 4.
        let n = 4usize;
        let law_nothing = exact_block_distribution(&bob_encode(0, n, 23, 0).unwrap()).unwrap();
        let law_scramble = exact_block_distribution(&bob_encode(1, n, 23, 0).unwrap()).unwrap();
        let decoders: Vec<Box<dyn Fn(usize) -> usize>> = vec![
            Box::new(|b| b & 1),
            Box::new(|b| (b.count_ones() as usize) & 1),
            Box::new(|b| usize::from(b == 0)),
            Box::new(|b| usize::from(b.count_ones() >= 2)),
        ];
        for decoder in &decoders {
            let mut joint = [[0.0f64; 2]; 2];
            for block in 0..(1 << n) {
                // Intent 0 -> nothing, intent 1 -> scramble, equiprobable.
                joint[0][decoder(block)] += 0.5 * law_nothing[block];
                joint[1][decoder(block)] += 0.5 * law_scramble[block];
            }
            let mi = mutual_information_joint(&joint);
            assert!(mi <= 1e-12, "decoder leaked {mi} bits");
        }
    }
}
