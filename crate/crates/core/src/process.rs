//! Exact finite-support laws for the consumption process.
//!
//! Every distribution here is a sparse map from full sequences to
//! probabilities: no sampling, no truncation. Constructors validate
//! normalization (within 1e-12) and, when a mean is declared, that the
//! support actually realizes it (within 1e-9).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::EmsConfig;
use crate::ems::ConsumptionSequence;
use crate::error::{Error, Result};
use crate::policy::BlockAlphabet;

/// Default cap on the number of sequences a constructor will materialize.
pub const DEFAULT_SUPPORT_CAP: u64 = 1 << 20;

const NORMALIZATION_TOL: f64 = 1e-12;
const DECLARED_MEAN_TOL: f64 = 1e-9;

/// An exact probability law over consumption sequences of one fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDistribution {
    n: usize,
    alpha: u32,
    support: BTreeMap<ConsumptionSequence, f64>,
    declared_mean: Option<f64>,
}

impl SequenceDistribution {
    /// Builds a distribution from explicit (sequence, probability) entries.
    /// Zero-probability entries are dropped; the rest must be non-negative,
    /// share one length, and sum to 1 within 1e-12. A declared mean is
    /// cross-checked against the support.
    pub fn from_support(
        alpha: u32,
        entries: impl IntoIterator<Item = (ConsumptionSequence, f64)>,
        declared_mean: Option<f64>,
    ) -> Result<Self> {
        let mut support = BTreeMap::new();
        let mut n = None;
        for (seq, p) in entries {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} for {:?}",
                    seq.symbols()
                )));
            }
            if let Some(&bad) = seq.symbols().iter().find(|&&s| s > alpha) {
                return Err(Error::InvalidDistribution(format!(
                    "symbol {bad} exceeds alpha = {alpha}"
                )));
            }
            match n {
                None => n = Some(seq.len()),
                Some(len) if len != seq.len() => {
                    return Err(Error::InvalidDistribution(format!(
                        "mixed sequence lengths {len} and {}",
                        seq.len()
                    )));
                }
                Some(_) => {}
            }
            if p > 0.0 && support.insert(seq, p).is_some() {
                return Err(Error::InvalidDistribution(
                    "duplicate sequence in support".to_string(),
                ));
            }
        }
        let n = n.ok_or_else(|| Error::InvalidDistribution("empty support".to_string()))?;
        if support.is_empty() {
            return Err(Error::InvalidDistribution(
                "all probabilities are zero".to_string(),
            ));
        }

        let dist = Self {
            n,
            alpha,
            support,
            declared_mean,
        };
        let total: f64 = dist.support.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if let Some(mu) = declared_mean {
            let realized = dist.mean();
            if (realized - mu).abs() > DECLARED_MEAN_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "declared mean {mu} but support realizes {realized}"
                )));
            }
        }
        Ok(dist)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn declared_mean(&self) -> Option<f64> {
        self.declared_mean
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConsumptionSequence, f64)> {
        self.support.iter().map(|(seq, &p)| (seq, p))
    }

    pub fn probability(&self, seq: &ConsumptionSequence) -> f64 {
        self.support.get(seq).copied().unwrap_or(0.0)
    }

    /// Expected time-average consumption `E[(1/n) sum x_i]`, exact over the
    /// support.
    pub fn mean(&self) -> f64 {
        let total: f64 = self
            .support
            .iter()
            .map(|(seq, &p)| p * seq.sum() as f64)
            .sum();
        total / self.n as f64
    }

    /// Shannon entropy of the whole sequence, in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .support
            .values()
            .map(|&p| if p > 0.0 { p * p.log2() } else { 0.0 })
            .sum::<f64>()
    }

    /// Serializes to the fixture schema
    /// `{n, alpha, entries: [{seq: [..], p: ..}]}`.
    pub fn to_json_string(&self) -> Result<String> {
        let dto = DistributionJson {
            n: self.n,
            alpha: self.alpha,
            entries: self
                .support
                .iter()
                .map(|(seq, &p)| EntryJson {
                    seq: seq.symbols().to_vec(),
                    p,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    /// Parses the fixture schema and re-validates everything. Imported
    /// fixtures carry no declared mean; use [`SequenceDistribution::mean`].
    pub fn from_json_str(text: &str) -> Result<Self> {
        let dto: DistributionJson = serde_json::from_str(text)?;
        let entries = dto
            .entries
            .into_iter()
            .map(|e| Ok((ConsumptionSequence::new(e.seq, dto.alpha)?, e.p)))
            .collect::<Result<Vec<_>>>()?;
        let dist = Self::from_support(dto.alpha, entries, None)?;
        if dist.n() != dto.n {
            return Err(Error::InvalidDistribution(format!(
                "header says n = {}, entries have length {}",
                dto.n,
                dist.n()
            )));
        }
        Ok(dist)
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    n: usize,
    alpha: u32,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    seq: Vec<u32>,
    p: f64,
}

fn validate_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.is_empty() {
        return Err(Error::InvalidDistribution("empty pmf".to_string()));
    }
    for &p in pmf {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::ProbabilityOutOfRange { value: p });
        }
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!(
            "pmf sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// Product law of `n` independent draws from `pmf` over `{0, .., len-1}`.
pub fn iid_process(pmf: &[f64], n: usize) -> Result<SequenceDistribution> {
    iid_process_capped(pmf, n, DEFAULT_SUPPORT_CAP)
}

pub fn iid_process_capped(pmf: &[f64], n: usize, cap: u64) -> Result<SequenceDistribution> {
    validate_pmf(pmf)?;
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    let alpha = (pmf.len() - 1) as u32;
    let nonzero: Vec<(u32, f64)> = pmf
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(s, &p)| (s as u32, p))
        .collect();
    let support_size = (nonzero.len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if support_size > u128::from(cap) {
        return Err(Error::SupportCapExceeded { cap });
    }

    let mut entries = Vec::with_capacity(support_size as usize);
    let mut stack: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
    while let Some((prefix, p)) = stack.pop() {
        if prefix.len() == n {
            entries.push((ConsumptionSequence::new(prefix, alpha)?, p));
            continue;
        }
        for &(symbol, ps) in &nonzero {
            let mut next = prefix.clone();
            next.push(symbol);
            stack.push((next, p * ps));
        }
    }
    // Analytic mean of the product law, declared for cross-checking.
    let per_step: f64 = pmf.iter().enumerate().map(|(s, &p)| s as f64 * p).sum();
    SequenceDistribution::from_support(alpha, entries, Some(per_step))
}

/// Path law of a time-homogeneous Markov chain: `init` for the first symbol,
/// `transitions[from][to]` afterwards.
pub fn markov_process(
    transitions: &[Vec<f64>],
    init: &[f64],
    n: usize,
) -> Result<SequenceDistribution> {
    markov_process_capped(transitions, init, n, DEFAULT_SUPPORT_CAP)
}

pub fn markov_process_capped(
    transitions: &[Vec<f64>],
    init: &[f64],
    n: usize,
    cap: u64,
) -> Result<SequenceDistribution> {
    validate_pmf(init)?;
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    let states = init.len();
    if transitions.len() != states {
        return Err(Error::InvalidDistribution(format!(
            "transition matrix has {} rows for {} states",
            transitions.len(),
            states
        )));
    }
    for row in transitions {
        if row.len() != states {
            return Err(Error::InvalidDistribution(
                "transition matrix is not square".to_string(),
            ));
        }
        validate_pmf(row)?;
    }
    let alpha = (states - 1) as u32;

    let mut entries: Vec<(ConsumptionSequence, f64)> = Vec::new();
    let mut stack: Vec<(Vec<u32>, f64)> = init
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(s, &p)| (vec![s as u32], p))
        .collect();
    while let Some((prefix, p)) = stack.pop() {
        if prefix.len() == n {
            entries.push((ConsumptionSequence::new(prefix, alpha)?, p));
            if entries.len() as u64 > cap {
                return Err(Error::SupportCapExceeded { cap });
            }
            continue;
        }
        let from = *prefix.last().expect("prefix non-empty") as usize;
        for (to, &pt) in transitions[from].iter().enumerate() {
            if pt > 0.0 {
                let mut next = prefix.clone();
                next.push(to as u32);
                stack.push((next, p * pt));
            }
        }
    }

    // Analytic mean from the marginals, an independent route from the path
    // enumeration above.
    let mut marginal = init.to_vec();
    let mut mean_sum: f64 = marginal.iter().enumerate().map(|(s, &p)| s as f64 * p).sum();
    for _ in 1..n {
        let mut next = vec![0.0; states];
        for (from, &p) in marginal.iter().enumerate() {
            if p > 0.0 {
                for (to, &pt) in transitions[from].iter().enumerate() {
                    next[to] += p * pt;
                }
            }
        }
        mean_sum += next.iter().enumerate().map(|(s, &p)| s as f64 * p).sum::<f64>();
        marginal = next;
    }
    SequenceDistribution::from_support(alpha, entries, Some(mean_sum / n as f64))
}

/// Uniform law over the `2^m` sequences of the block repetition alphabet.
/// Its mean is `alpha / 2` and its entropy rate is `1/l` bits per step.
pub fn uniform_block_process(cfg: &EmsConfig, l: usize, m: usize) -> Result<SequenceDistribution> {
    uniform_block_process_capped(cfg, l, m, DEFAULT_SUPPORT_CAP)
}

pub fn uniform_block_process_capped(
    cfg: &EmsConfig,
    l: usize,
    m: usize,
    cap: u64,
) -> Result<SequenceDistribution> {
    mean_block_process_capped(cfg, l, m, f64::from(cfg.alpha()) / 2.0, cap)
}

/// Blockwise i.i.d. law on the block repetition alphabet: each block is
/// all-`alpha` with probability `mu / alpha`, all-zero otherwise. Realizes
/// mean `mu` exactly, with entropy rate `H2(mu/alpha) / l` bits per step.
pub fn mean_block_process(
    cfg: &EmsConfig,
    l: usize,
    m: usize,
    mu: f64,
) -> Result<SequenceDistribution> {
    mean_block_process_capped(cfg, l, m, mu, DEFAULT_SUPPORT_CAP)
}

pub fn mean_block_process_capped(
    cfg: &EmsConfig,
    l: usize,
    m: usize,
    mu: f64,
    cap: u64,
) -> Result<SequenceDistribution> {
    let alpha = cfg.alpha();
    if !mu.is_finite() || mu < 0.0 || mu > f64::from(alpha) {
        return Err(Error::MeanOutOfRange { mu, alpha });
    }
    let alphabet = BlockAlphabet::new(l, m, alpha)?;
    if alphabet.size() > u128::from(cap) {
        return Err(Error::SupportCapExceeded { cap });
    }
    let q = mu / f64::from(alpha);

    let entries = alphabet.sequences().into_iter().map(|seq| {
        let p: f64 = seq
            .symbols()
            .chunks_exact(l)
            .map(|block| if block[0] == alpha { q } else { 1.0 - q })
            .product();
        (seq, p)
    });
    SequenceDistribution::from_support(alpha, entries, Some(mu))
}
