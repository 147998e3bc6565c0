//! Exact information leakage and the closed-form bounds on it.
//!
//! For a deterministic policy the grid's view `Y^n` is a function of the
//! consumption `X^n`, so the leakage `I(X^n; Y^n) = H(X^n) - H(X^n | Y^n)` is
//! computed exactly by pushing the (finite, sparse) input law through the
//! policy and grouping sequences that collide on the same output. Everything
//! is in bits; rates divide by the horizon `n`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::EmsConfig;
use crate::ems::{enumerate_stable_set, is_stable, ConsumptionSequence, RequestSequence};
use crate::error::{Error, Result};
use crate::policy::{disjoint_block_length, max_block_length, BlockAlphabet, MapPolicy, Policy};
use crate::process::SequenceDistribution;

/// Hard limit on the number of candidate policies the brute-force minimum
/// leakage search will walk.
pub const BRUTE_FORCE_GUARD: u64 = 1_000_000;

const RATE_TOL: f64 = 1e-9;

/// Binary entropy `H2(p)` in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { value: p });
    }
    Ok(h2_unchecked(p))
}

fn h2_unchecked(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// Worst-case guaranteed leakage rate of the longest feasible block policy:
/// `1 / floor((beta+1)/alpha)` bits per step, for any consumption process.
/// Infinite when no block policy exists (`alpha > beta + 1`).
pub fn theorem1_bound(cfg: &EmsConfig) -> f64 {
    match max_block_length(cfg) {
        0 => f64::INFINITY,
        l => 1.0 / l as f64,
    }
}

/// Leakage rate forced by the uniform block process on block length
/// `ceil((beta+1)/alpha)` under *every* stable policy: `1 / ceil((beta+1)/alpha)`.
pub fn theorem2_rate(cfg: &EmsConfig) -> f64 {
    1.0 / disjoint_block_length(cfg) as f64
}

/// A closed-form bound value attached to a leakage report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TheoremBound {
    /// Which bound applies: "theorem1" (no moment information) or
    /// "theorem3" (mean-constrained).
    pub theorem: String,
    pub bits_per_step: f64,
    /// True when a binary-entropy argument left [0, 1] and was clamped
    /// (possible at small horizons, where `beta/n` is large).
    pub clamped: bool,
}

/// Mean-constrained leakage bound for the longest feasible block policy at
/// horizon `n`.
///
/// The average request is pinned to `mu +- beta/n` by battery conservation,
/// so the per-block entropy is at most the supremum of `H2` over the
/// feasible interval `[(mu - beta/n)/alpha, (mu + beta/n)/alpha]` clamped to
/// `[0, 1]`. When the interval straddles 1/2 the supremum sits at the
/// interior peak `H2(1/2) = 1`, not at an endpoint; evaluating only the
/// endpoints there would produce a value below achievable leakage.
pub fn theorem3_bound(cfg: &EmsConfig, mu: f64, n: usize) -> Result<TheoremBound> {
    if !mu.is_finite() || mu < 0.0 || mu > f64::from(cfg.alpha()) {
        return Err(Error::MeanOutOfRange {
            mu,
            alpha: cfg.alpha(),
        });
    }
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    let alpha = f64::from(cfg.alpha());
    let shift = f64::from(cfg.beta()) / n as f64;
    let lo = (mu - shift) / alpha;
    let hi = (mu + shift) / alpha;
    let clamped = lo < 0.0 || hi > 1.0;
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    let sup = if lo <= 0.5 && 0.5 <= hi {
        1.0
    } else {
        h2_unchecked(lo).max(h2_unchecked(hi))
    };
    let value = match max_block_length(cfg) {
        0 => f64::INFINITY,
        l => sup / l as f64,
    };
    Ok(TheoremBound {
        theorem: "theorem3".to_string(),
        bits_per_step: value,
        clamped,
    })
}

/// Large-horizon limit of [`theorem3_bound`]: `H2(mu/alpha) / floor((beta+1)/alpha)`.
pub fn theorem3_bound_asymptotic(cfg: &EmsConfig, mu: f64) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 || mu > f64::from(cfg.alpha()) {
        return Err(Error::MeanOutOfRange {
            mu,
            alpha: cfg.alpha(),
        });
    }
    let h = h2_unchecked(mu / f64::from(cfg.alpha()));
    Ok(match max_block_length(cfg) {
        0 => f64::INFINITY,
        l => h / l as f64,
    })
}

/// Leakage rate forced by the mean-`mu` block process under every stable
/// policy: `H2(mu/alpha) / ceil((beta+1)/alpha)`.
pub fn theorem4_rate(cfg: &EmsConfig, mu: f64) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 || mu > f64::from(cfg.alpha()) {
        return Err(Error::MeanOutOfRange {
            mu,
            alpha: cfg.alpha(),
        });
    }
    Ok(h2_unchecked(mu / f64::from(cfg.alpha())) / disjoint_block_length(cfg) as f64)
}

/// Exact leakage decomposition for one input law and one policy.
#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    pub n: usize,
    pub policy: String,
    /// `I(X^n; Y^n) / n` in bits per step.
    pub leakage_rate: f64,
    /// `H(X^n) / n`.
    pub entropy_x_rate: f64,
    /// `H(Y^n) / n`.
    pub entropy_y_rate: f64,
    /// `H(X^n | Y^n) / n`; zero exactly when the output identifies the input.
    pub equivocation_rate: f64,
    /// The applicable closed-form bound for the longest feasible block
    /// policy on this battery (mean-constrained when the law declares a
    /// mean).
    pub bound: TheoremBound,
    /// Whether `leakage_rate <= bound + 1e-9`.
    pub satisfied: bool,
}

/// Pushes the input law through a deterministic policy and returns the exact
/// output law. Every policy output is checked stable.
pub fn output_law(
    d: &SequenceDistribution,
    policy: &dyn Policy,
    cfg: &EmsConfig,
) -> Result<BTreeMap<RequestSequence, f64>> {
    let mut law = BTreeMap::new();
    for (x, p) in d.iter() {
        let y = policy.request(x, cfg)?;
        if !is_stable(x, &y, cfg)? {
            return Err(Error::InvariantViolation(format!(
                "policy {} produced an unstable request for {:?}",
                policy.label(),
                x.symbols()
            )));
        }
        *law.entry(y).or_insert(0.0) += p;
    }
    Ok(law)
}

/// Exact information leakage rate of `policy` on the input law `d`.
///
/// Groups support sequences by their (deterministic) output; the
/// equivocation of each group is `sum_x p log2(q/p)` with `q` the group
/// mass, which is exactly zero for singleton groups.
pub fn exact_leakage(
    d: &SequenceDistribution,
    policy: &dyn Policy,
    cfg: &EmsConfig,
) -> Result<LeakageReport> {
    if d.alpha() > cfg.alpha() {
        return Err(Error::InvalidDistribution(format!(
            "law over symbols up to {} fed to a channel with alpha = {}",
            d.alpha(),
            cfg.alpha()
        )));
    }

    // Per output group: (total mass q, sum of p*log2(p) over members).
    let mut groups: BTreeMap<RequestSequence, (f64, f64)> = BTreeMap::new();
    for (x, p) in d.iter() {
        let y = policy.request(x, cfg)?;
        if !is_stable(x, &y, cfg)? {
            return Err(Error::InvariantViolation(format!(
                "policy {} produced an unstable request for {:?}",
                policy.label(),
                x.symbols()
            )));
        }
        let slot = groups.entry(y).or_insert((0.0, 0.0));
        slot.0 += p;
        slot.1 += p * p.log2();
    }

    let entropy_x = d.entropy_bits();
    let mut entropy_y = 0.0;
    let mut equivocation = 0.0;
    for &(q, plogp) in groups.values() {
        entropy_y -= q * q.log2();
        equivocation += q * q.log2() - plogp;
    }

    let n = d.n() as f64;
    let entropy_x_rate = entropy_x / n;
    let entropy_y_rate = entropy_y / n;
    let equivocation_rate = equivocation / n;
    let leakage_rate = (entropy_x - equivocation) / n;

    let bound = match d.declared_mean() {
        Some(mu) => theorem3_bound(cfg, mu, d.n())?,
        None => TheoremBound {
            theorem: "theorem1".to_string(),
            bits_per_step: theorem1_bound(cfg),
            clamped: false,
        },
    };
    let satisfied = leakage_rate <= bound.bits_per_step + RATE_TOL;

    Ok(LeakageReport {
        n: d.n(),
        policy: policy.label(),
        leakage_rate,
        entropy_x_rate,
        entropy_y_rate,
        equivocation_rate,
        bound,
        satisfied,
    })
}

/// Overlap evidence: one request sequence stable for two different block
/// inputs from the same initial level.
#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessWitness {
    pub s0: u32,
    pub x_first: ConsumptionSequence,
    pub x_second: ConsumptionSequence,
    pub y: RequestSequence,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessReport {
    pub l: usize,
    pub m: usize,
    /// Whether `l * alpha > beta`, the hypothesis under which disjointness
    /// is guaranteed.
    pub hypothesis_holds: bool,
    pub disjoint: bool,
    pub witness: Option<DisjointnessWitness>,
    /// Stable sets enumerated across all initial levels.
    pub sets_enumerated: u64,
}

/// Checks, for every initial level and every pair of distinct block-alphabet
/// inputs, that their stable request sets do not intersect. Returns the
/// first counterexample if one exists.
pub fn verify_disjointness(cfg: &EmsConfig, l: usize, m: usize) -> Result<DisjointnessReport> {
    let alphabet = BlockAlphabet::new(l, m, cfg.alpha())?;
    let hypothesis_holds = (l as u64) * u64::from(cfg.alpha()) > u64::from(cfg.beta());
    let mut sets_enumerated = 0u64;

    for s0 in cfg.states() {
        let cfg_s = cfg.with_s0(s0)?;
        let mut seen: BTreeMap<RequestSequence, ConsumptionSequence> = BTreeMap::new();
        for x in alphabet.sequences() {
            let stable = enumerate_stable_set(&x, &cfg_s)?;
            sets_enumerated += 1;
            for y in stable {
                if let Some(prev) = seen.get(&y) {
                    return Ok(DisjointnessReport {
                        l,
                        m,
                        hypothesis_holds,
                        disjoint: false,
                        witness: Some(DisjointnessWitness {
                            s0,
                            x_first: prev.clone(),
                            x_second: x.clone(),
                            y,
                        }),
                        sets_enumerated,
                    });
                }
                seen.insert(y, x.clone());
            }
        }
    }
    Ok(DisjointnessReport {
        l,
        m,
        hypothesis_holds,
        disjoint: true,
        witness: None,
        sets_enumerated,
    })
}

/// Exhaustively searches every deterministic stable map from the support of
/// `d` to request sequences and returns the minimum leakage rate plus one
/// minimizer. The number of candidate maps is the product of the stable-set
/// sizes and is hard-capped by [`BRUTE_FORCE_GUARD`].
pub fn brute_force_min_leakage(
    d: &SequenceDistribution,
    cfg: &EmsConfig,
) -> Result<(f64, MapPolicy)> {
    if d.alpha() > cfg.alpha() {
        return Err(Error::InvalidDistribution(format!(
            "law over symbols up to {} fed to a channel with alpha = {}",
            d.alpha(),
            cfg.alpha()
        )));
    }
    let support: Vec<(ConsumptionSequence, f64)> =
        d.iter().map(|(x, p)| (x.clone(), p)).collect();
    let mut choice_sets = Vec::with_capacity(support.len());
    let mut combinations: u128 = 1;
    for (x, _) in &support {
        let stable = enumerate_stable_set(x, cfg)?;
        combinations = combinations.saturating_mul(stable.len() as u128);
        if combinations > u128::from(BRUTE_FORCE_GUARD) {
            return Err(Error::SearchGuardExceeded {
                combinations,
                cap: BRUTE_FORCE_GUARD,
            });
        }
        choice_sets.push(stable);
    }

    let entropy_x = d.entropy_bits();
    let n = d.n() as f64;

    let mut best_rate = f64::INFINITY;
    let mut best_indices: Vec<usize> = vec![0; support.len()];
    let mut indices = vec![0usize; support.len()];
    loop {
        // Equivocation of this assignment, grouping by chosen output.
        let mut groups: BTreeMap<&RequestSequence, (f64, f64)> = BTreeMap::new();
        for (i, &(_, p)) in support.iter().enumerate() {
            let y = &choice_sets[i][indices[i]];
            let slot = groups.entry(y).or_insert((0.0, 0.0));
            slot.0 += p;
            slot.1 += p * p.log2();
        }
        let equivocation: f64 = groups
            .values()
            .map(|&(q, plogp)| q * q.log2() - plogp)
            .sum();
        let rate = (entropy_x - equivocation) / n;
        if rate < best_rate {
            best_rate = rate;
            best_indices.copy_from_slice(&indices);
        }

        // Mixed-radix odometer over the choice sets.
        let mut pos = indices.len();
        loop {
            if pos == 0 {
                let table = support
                    .iter()
                    .enumerate()
                    .map(|(i, (x, _))| (x.clone(), choice_sets[i][best_indices[i]].clone()))
                    .collect();
                return Ok((best_rate, MapPolicy::new(table)));
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < choice_sets[pos].len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}
