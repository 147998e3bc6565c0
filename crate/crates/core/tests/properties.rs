//! Property-based and exhaustive structural checks on the channel model,
//! the block policy, and the process constructors.

use meterleak::ems::all_sequences;
use meterleak::{
    apply_policy, ems_to_trapdoor, enumerate_stable_set, is_stable, iid_process, is_trapdoor_stable,
    markov_process, max_block_length, mean_block_process, trajectory, trapdoor_to_ems,
    uniform_block_process, BlockAlphabet, ConsumptionSequence, EmsConfig, RequestSequence,
    SequenceDistribution,
};
use proptest::prelude::*;

fn small_channel() -> impl Strategy<Value = EmsConfig> {
    (1u32..=3, 0u32..=4, 0u32..=2).prop_flat_map(|(alpha, beta, extra_gamma)| {
        (Just(alpha), Just(beta), Just(extra_gamma), 0u32..=beta)
            .prop_map(|(alpha, beta, extra_gamma, s0)| {
                EmsConfig::new(alpha, alpha + extra_gamma, beta, s0).unwrap()
            })
    })
}

fn consumption(cfg: EmsConfig, max_len: usize) -> impl Strategy<Value = ConsumptionSequence> {
    prop::collection::vec(0..=cfg.alpha(), 1..=max_len)
        .prop_map(move |sym| ConsumptionSequence::new(sym, cfg.alpha()).unwrap())
}

/// A (cfg, x, stable y) triple: y is drawn from the enumerated stable set.
fn stable_pair() -> impl Strategy<Value = (EmsConfig, ConsumptionSequence, RequestSequence)> {
    small_channel()
        .prop_flat_map(|cfg| (Just(cfg), consumption(cfg, 6)))
        .prop_flat_map(|(cfg, x)| {
            let stable = enumerate_stable_set(&x, &cfg).unwrap();
            let count = stable.len();
            (Just(cfg), Just(x), Just(stable), 0..count)
        })
        .prop_map(|(cfg, x, stable, idx)| (cfg, x, stable[idx].clone()))
}

proptest! {
    /// Every prefix of a stable pair is stable for the corresponding prefix.
    #[test]
    fn prefix_monotonicity((cfg, x, y) in stable_pair()) {
        for k in 1..=x.len() {
            let xp = ConsumptionSequence::new(x.symbols()[..k].to_vec(), cfg.alpha()).unwrap();
            let yp = RequestSequence::new(y.symbols()[..k].to_vec(), cfg.gamma()).unwrap();
            prop_assert!(is_stable(&xp, &yp, &cfg).unwrap());
        }
    }

    /// Echoing the consumption is stable from every initial level.
    #[test]
    fn echo_is_always_stable(
        (cfg, x) in small_channel().prop_flat_map(|cfg| (Just(cfg), consumption(cfg, 8)))
    ) {
        let y = RequestSequence::new(x.symbols().to_vec(), cfg.gamma()).unwrap();
        prop_assert!(is_stable(&x, &y, &cfg).unwrap());
    }

    /// Battery bookkeeping: sum(y) - sum(x) = s_n - s0, so the transfer is
    /// bounded by the capacity.
    #[test]
    fn conservation_identity((cfg, x, y) in stable_pair()) {
        let t = trajectory(&x, &y, &cfg).unwrap();
        let s_last = *t.states().last().unwrap();
        prop_assert_eq!(y.sum() - x.sum(), s_last - i64::from(cfg.s0()));
        prop_assert!((y.sum() - x.sum()).abs() <= i64::from(cfg.beta()));
    }

    /// Relabeling a binary pair as ball streams and back is the identity.
    #[test]
    fn trapdoor_roundtrip(beta in 0u32..=3, sym in prop::collection::vec(0u32..=1, 1..=8), seed in 0u64..) {
        let s0 = seed as u32 % (beta + 1);
        let cfg = EmsConfig::new(1, 1, beta, s0).unwrap();
        let x = ConsumptionSequence::new(sym.clone(), 1).unwrap();
        let mut ysym = sym;
        ysym.reverse();
        let y = RequestSequence::new(ysym, 1).unwrap();
        let t = ems_to_trapdoor(&x, &y, &cfg).unwrap();
        let (x2, y2) = trapdoor_to_ems(&t, &cfg).unwrap();
        prop_assert_eq!(x, x2);
        prop_assert_eq!(y, y2);
    }

    /// Fixture serialization preserves the law exactly.
    #[test]
    fn json_roundtrip(pmf_raw in prop::collection::vec(0.01f64..1.0, 2..=3), n in 1usize..=4) {
        let total: f64 = pmf_raw.iter().sum();
        let pmf: Vec<f64> = pmf_raw.iter().map(|p| p / total).collect();
        let d = iid_process(&pmf, n).unwrap();
        let text = d.to_json_string().unwrap();
        let back = SequenceDistribution::from_json_str(&text).unwrap();
        prop_assert_eq!(back.support_len(), d.support_len());
        for (seq, p) in d.iter() {
            prop_assert_eq!(back.probability(seq), p);
        }
    }
}

#[test]
fn trapdoor_equivalence_is_exhaustive_for_small_boxes() {
    // Battery stability iff trapdoor stability, for every beta <= 3, every
    // initial level, and every binary pair up to length 4.
    let mut checked = 0u64;
    for beta in 0..=3u32 {
        for s0 in 0..=beta {
            let cfg = EmsConfig::new(1, 1, beta, s0).unwrap();
            for n in 1..=4usize {
                for xsym in all_sequences(n, 1) {
                    let x = ConsumptionSequence::new(xsym, 1).unwrap();
                    for ysym in all_sequences(n, 1) {
                        let y = RequestSequence::new(ysym, 1).unwrap();
                        let ems = is_stable(&x, &y, &cfg).unwrap();
                        let t = ems_to_trapdoor(&x, &y, &cfg).unwrap();
                        assert_eq!(ems, is_trapdoor_stable(&t, beta).unwrap());
                        checked += 1;
                    }
                }
            }
        }
    }
    assert_eq!(checked, (1 + 2 + 3 + 4) * (4 + 16 + 64 + 256));
}

#[test]
fn enumerate_matches_naive_filter_everywhere_small() {
    // Pruned enumeration equals the (gamma+1)^n filter for n <= 4, beta <= 2.
    for alpha in 1..=2u32 {
        for beta in 0..=2u32 {
            for s0 in 0..=beta {
                let cfg = EmsConfig::symmetric(alpha, beta, s0).unwrap();
                for n in 1..=4usize {
                    for xsym in all_sequences(n, alpha) {
                        let x = ConsumptionSequence::new(xsym, alpha).unwrap();
                        let fast = enumerate_stable_set(&x, &cfg).unwrap();
                        let naive: Vec<RequestSequence> = all_sequences(n, cfg.gamma())
                            .map(|s| RequestSequence::new(s, cfg.gamma()).unwrap())
                            .filter(|y| is_stable(&x, y, &cfg).unwrap())
                            .collect();
                        assert_eq!(fast, naive);
                    }
                }
            }
        }
    }
}

#[test]
fn block_policy_exists_wherever_the_length_condition_holds() {
    // Exhaustive existence sweep: for every channel with l = floor((beta+1)/alpha)
    // >= 1 and every input of length l*m, the policy succeeds, stays stable,
    // and lands in the block alphabet. Sweep capped at 10^6 cases per grid
    // point via (alpha+1)^n * (beta+1).
    for alpha in 1..=3u32 {
        for beta in 0..=5u32 {
            let cfg0 = EmsConfig::symmetric(alpha, beta, 0).unwrap();
            let l = max_block_length(&cfg0);
            if l == 0 {
                continue;
            }
            for m in 1..=3usize {
                let n = l * m;
                let cases = (u128::from(alpha) + 1)
                    .checked_pow(n as u32)
                    .unwrap_or(u128::MAX)
                    .saturating_mul(u128::from(beta) + 1);
                if cases > 1_000_000 {
                    break;
                }
                let alphabet = BlockAlphabet::new(l, m, alpha).unwrap();
                for s0 in 0..=beta {
                    let cfg = cfg0.with_s0(s0).unwrap();
                    for xsym in all_sequences(n, alpha) {
                        let x = ConsumptionSequence::new(xsym, alpha).unwrap();
                        let y = apply_policy(&x, &cfg, l).unwrap();
                        assert!(is_stable(&x, &y, &cfg).unwrap());
                        assert!(alphabet.contains(y.symbols()));
                    }
                }
            }
        }
    }
}

#[test]
fn uniform_block_is_the_half_mean_special_case() {
    for alpha in [1u32, 2] {
        let cfg = EmsConfig::symmetric(alpha, alpha, 0).unwrap();
        for (l, m) in [(1usize, 1usize), (2, 2), (3, 1)] {
            let uniform = uniform_block_process(&cfg, l, m).unwrap();
            let half = mean_block_process(&cfg, l, m, f64::from(alpha) / 2.0).unwrap();
            assert_eq!(uniform, half);
        }
    }
}

#[test]
fn mean_block_entropy_rate_matches_binary_entropy() {
    let cfg = EmsConfig::symmetric(2, 3, 0).unwrap();
    for mu in [0.0, 0.3, 1.0, 1.9, 2.0] {
        for (l, m) in [(2usize, 1usize), (2, 3), (3, 2)] {
            let d = mean_block_process(&cfg, l, m, mu).unwrap();
            let rate = d.entropy_bits() / (l * m) as f64;
            let expected = meterleak::binary_entropy(mu / 2.0).unwrap() / l as f64;
            assert!((rate - expected).abs() < 1e-9, "mu={mu} l={l} m={m}");
        }
    }
}

#[test]
fn markov_declared_mean_agrees_with_support() {
    let rows = vec![vec![0.9, 0.1], vec![0.25, 0.75]];
    let d = markov_process(&rows, &[0.6, 0.4], 6).unwrap();
    let declared = d.declared_mean().unwrap();
    assert!((declared - d.mean()).abs() < 1e-9);
}
