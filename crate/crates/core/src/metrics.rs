//! Finite-string randomness statistics: a self-contained dictionary
//! compressor as the incompressibility proxy, block entropy, Borel
//! normality, and the two hypothesis tests the channel experiment leans on.

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng::derive_stream;

// ---------------------------------------------------------------------------
// Compression proxy
// ---------------------------------------------------------------------------

/// Number of bits the dictionary encoder spends on the input.
///
/// The code is fully specified so ratios are reproducible everywhere:
/// the input is parsed into phrases, each the longest previously seen phrase
/// extended by one symbol. The dictionary starts with only the empty phrase.
/// The i-th phrase (1-based) is coded as ceil(log2(i)) bits naming the
/// matched phrase among the i entries known so far, plus 1 bit for the new
/// symbol. A trailing suffix that exactly matches a known phrase is coded as
/// its index alone.
pub fn compressed_len_bits(x: &BitString) -> Result<u64> {
    if x.is_empty() {
        return Err(Error::EmptyInput {
            context: "compressed_len_bits",
        });
    }
    // children[id] = phrase ids reached by appending 0 / 1; id 0 is the
    // empty phrase.
    let mut children: Vec<[u32; 2]> = vec![[0, 0]];
    let mut bits_out: u64 = 0;
    let mut phrases: u64 = 0;
    let mut current: u32 = 0;
    for bit in x.iter() {
        let next = children[current as usize][bit as usize];
        if next != 0 {
            current = next;
            continue;
        }
        phrases += 1;
        bits_out += ceil_log2(phrases) + 1;
        let id = children.len() as u32;
        children[current as usize][bit as usize] = id;
        children.push([0, 0]);
        current = 0;
    }
    if current != 0 {
        // Partial phrase: the remaining suffix is already in the dictionary.
        bits_out += ceil_log2(phrases + 1);
    }
    Ok(bits_out)
}

/// Compressed size over input size, both in bits. Below 1 means the encoder
/// found structure; uniform random input lands above 1 at these lengths.
pub fn compression_ratio(x: &BitString) -> Result<f64> {
    Ok(compressed_len_bits(x)? as f64 / x.len() as f64)
}

fn ceil_log2(k: u64) -> u64 {
    if k <= 1 {
        0
    } else {
        64 - (k - 1).leading_zeros() as u64
    }
}

/// Empirical `quantile` of the compression ratio over seeded uniform random
/// strings of `n_bits` bits. Blocks that compress below the returned
/// threshold are rarer than `quantile` among genuinely uniform input.
pub fn calibrate_threshold(n_bits: usize, samples: usize, quantile: f64, seed: u64) -> Result<f64> {
    if n_bits == 0 {
        return Err(Error::InvalidArgument("n_bits must be >= 1".into()));
    }
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "calibration needs at least 100 samples, got {samples}"
        )));
    }
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::OutOfRange {
            name: "quantile",
            value: quantile,
            range: "(0, 1)",
        });
    }
    let mut ratios: Vec<f64> = (0..samples)
        .map(|s| {
            let block = BitString::random(n_bits, derive_stream(seed, &[s as u64]).next_u64());
            compression_ratio(&block)
        })
        .collect::<Result<_>>()?;
    ratios.sort_by(|a, b| a.total_cmp(b));
    let rank = ((quantile * samples as f64).ceil() as usize).clamp(1, samples);
    Ok(ratios[rank - 1])
}

// ---------------------------------------------------------------------------
// Entropy and normality
// ---------------------------------------------------------------------------

/// Shannon entropy per symbol of the empirical distribution of overlapping
/// k-blocks, in [0, 1].
pub fn block_entropy(x: &BitString, k: usize) -> Result<f64> {
    if k == 0 || k > x.len() {
        return Err(Error::InvalidArgument(format!(
            "block size {k} invalid for a string of {} bits",
            x.len()
        )));
    }
    if k > 24 {
        return Err(Error::InvalidArgument(
            "block size above 24 is unsupported".into(),
        ));
    }
    let mut counts = vec![0u64; 1 << k];
    let mask = (1usize << k) - 1;
    let mut word = 0usize;
    for (i, bit) in x.iter().enumerate() {
        word = ((word << 1) | bit as usize) & mask;
        if i + 1 >= k {
            counts[word] += 1;
        }
    }
    let total = (x.len() - k + 1) as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let f = c as f64 / total;
            h -= f * f.log2();
        }
    }
    Ok(h / k as f64)
}

/// Per-block-size entry of a [`MetricReport`].
#[derive(Debug, Clone, Serialize)]
pub struct BlockStat {
    pub k: usize,
    pub deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// A named scalar metric with an optional per-block-size breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub metric: String,
    pub value: f64,
    pub auxiliary: Vec<BlockStat>,
}

impl MetricReport {
    /// True iff every per-block-size entry passes.
    pub fn passes(&self) -> bool {
        self.auxiliary.iter().all(|s| s.pass)
    }
}

/// Borel normality check: for each k up to `max_k`, the worst deviation of
/// non-overlapping k-block word frequencies from 2^-k, against the
/// sqrt(log2(n)/n) finite-string bound. The report value is the largest
/// deviation-to-bound ratio across k.
pub fn borel_normality(x: &BitString, max_k: usize) -> Result<MetricReport> {
    if max_k == 0 || max_k > 24 {
        return Err(Error::InvalidArgument(format!(
            "max_k {max_k} out of supported range"
        )));
    }
    let n = x.len();
    let needed = (1usize << max_k) * max_k;
    if n < needed {
        return Err(Error::InvalidArgument(format!(
            "string of {n} bits is too short for max_k {max_k} (needs {needed})"
        )));
    }
    let bound = ((n as f64).log2() / n as f64).sqrt();
    let mut auxiliary = Vec::with_capacity(max_k);
    let mut worst_ratio: f64 = 0.0;
    for k in 1..=max_k {
        let blocks = n / k;
        let mut counts = vec![0u64; 1 << k];
        for b in 0..blocks {
            let mut word = 0usize;
            for j in 0..k {
                word = (word << 1) | x.get(b * k + j) as usize;
            }
            counts[word] += 1;
        }
        let expected = (0.5f64).powi(k as i32);
        let deviation = counts
            .iter()
            .map(|&c| (c as f64 / blocks as f64 - expected).abs())
            .fold(0.0, f64::max);
        worst_ratio = worst_ratio.max(deviation / bound);
        auxiliary.push(BlockStat {
            k,
            deviation,
            bound,
            pass: deviation <= bound,
        });
    }
    Ok(MetricReport {
        metric: "borel-normality".into(),
        value: worst_ratio,
        auxiliary,
    })
}

// ---------------------------------------------------------------------------
// Hypothesis tests
// ---------------------------------------------------------------------------

/// Pearson chi-square result against the uniform null.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// Pearson chi-square test of observed counts against the uniform
/// distribution over the bins. Requires at least 2 bins and an expected
/// count of at least 5 per bin.
pub fn chi_square_uniformity(counts: &[u64]) -> Result<ChiSquareTest> {
    let bins = counts.len();
    chi_square_goodness_of_fit(counts, &vec![1.0 / bins.max(1) as f64; bins])
}

/// Pearson chi-square test of observed counts against an arbitrary null
/// distribution. Same power requirements as [`chi_square_uniformity`].
pub fn chi_square_goodness_of_fit(counts: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    let bins = counts.len();
    if bins < 2 {
        return Err(Error::InvalidArgument(
            "chi-square needs at least 2 bins".into(),
        ));
    }
    if probs.len() != bins {
        return Err(Error::DimMismatch {
            context: "chi_square_goodness_of_fit",
            expected: bins,
            got: probs.len(),
        });
    }
    if !probs.iter().all(|&p| p > 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(
            "null probabilities must be positive and sum to 1".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    if total < 5 * bins as u64 {
        return Err(Error::InvalidArgument(format!(
            "chi-square is underpowered: {total} observations over {bins} bins (need {})",
            5 * bins
        )));
    }
    let statistic = counts
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let expected = total as f64 * p;
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = bins - 1;
    let p_value = gamma_q(dof as f64 / 2.0, statistic / 2.0);
    Ok(ChiSquareTest {
        statistic,
        p_value,
        dof,
    })
}

/// Two-sample Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test: the max gap between the two empirical
/// CDFs, with the asymptotic Kolmogorov p-value at the effective sample size
/// n_a * n_b / (n_a + n_b).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput {
            context: "ks_two_sample",
        });
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.total_cmp(y));
    sb.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (sa.len(), sb.len());
    let mut ia = 0;
    let mut ib = 0;
    let mut statistic = 0.0f64;
    while ia < na && ib < nb {
        let va = sa[ia];
        let vb = sb[ib];
        let v = va.min(vb);
        while ia < na && sa[ia] <= v {
            ia += 1;
        }
        while ib < nb && sb[ib] <= v {
            ib += 1;
        }
        let gap = (ia as f64 / na as f64 - ib as f64 / nb as f64).abs();
        if gap > statistic {
            statistic = gap;
        }
    }
    let n_eff = (na as f64 * nb as f64) / ((na + nb) as f64);
    let sqrt_n = n_eff.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    let p_value = kolmogorov_q(lambda).clamp(0.0, 1.0);
    Ok(KsTest { statistic, p_value })
}

/// Complementary CDF of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2).
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let a2 = -2.0 * lambda * lambda;
    let mut sign = 1.0;
    let mut sum = 0.0;
    let mut previous = 0.0f64;
    for j in 1..=200 {
        let term = sign * (a2 * (j * j) as f64).exp();
        sum += term;
        if term.abs() <= 1e-3 * previous || term.abs() <= 1e-12 * sum.abs() {
            return 2.0 * sum;
        }
        sign = -sign;
        previous = term.abs();
    }
    1.0
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma (for the chi-square tail)
// ---------------------------------------------------------------------------

/// ln Gamma(x) by the Lanczos approximation.
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    let mut y = y;
    for c in COEFFS {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_contfrac(a, x)
    }
}

/// Series for P(a, x); converges fast for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut term = sum;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Continued fraction for Q(a, x) by modified Lentz; for x >= a + 1.
fn gamma_q_contfrac(a: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

// ---------------------------------------------------------------------------
// Bit-stream input formats
// ---------------------------------------------------------------------------

/// Parse ASCII '0'/'1' text, ignoring all whitespace.
pub fn parse_bits_ascii(text: &str) -> Result<BitString> {
    let bits: BitString = text.parse()?;
    if bits.is_empty() {
        return Err(Error::EmptyInput {
            context: "parse_bits_ascii",
        });
    }
    Ok(bits)
}

/// Expand raw bytes into bits, most significant bit of each byte first.
pub fn bits_from_bytes(bytes: &[u8]) -> Result<BitString> {
    if bytes.is_empty() {
        return Err(Error::EmptyInput {
            context: "bits_from_bytes",
        });
    }
    let mut bits = BitString::with_capacity(bytes.len() * 8);
    for &byte in bytes {
        for shift in (0..8).rev() {
            bits.push((byte >> shift) & 1);
        }
    }
    Ok(bits)
}
