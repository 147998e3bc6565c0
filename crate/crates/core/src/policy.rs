//! Request policies, centered on the block repetition policy.
//!
//! The block policy carves time into blocks of length `l` and answers each
//! block with a constant run of `0` or `alpha`, chosen from the battery level
//! at the block boundary. With `l <= floor((beta+1)/alpha)` one of the two
//! runs is always stable: discharging works when the level covers the block's
//! consumption, charging works otherwise because `beta - alpha*l >= -1`
//! leaves no integer level uncovered. Its outputs live in a `2^m`-element
//! alphabet, which is what caps the information the grid can see.

use std::collections::BTreeMap;

use crate::config::EmsConfig;
use crate::ems::{ConsumptionSequence, RequestSequence};
use crate::error::{Error, Result, SymbolKind};

/// Largest block length for which the block policy exists for every initial
/// level and every consumption sequence: `floor((beta+1)/alpha)`.
///
/// Returns 0 when `alpha > beta + 1`; no block policy exists there.
pub fn max_block_length(cfg: &EmsConfig) -> usize {
    ((cfg.beta() + 1) / cfg.alpha()) as usize
}

/// Smallest block length at which distinct block-alphabet inputs have
/// disjoint stable request sets: `ceil((beta+1)/alpha)`, the least integer
/// `l` with `l * alpha > beta`. Worst-case consumption processes are built
/// on this block length.
pub fn disjoint_block_length(cfg: &EmsConfig) -> usize {
    ((cfg.beta() + cfg.alpha()) / cfg.alpha()) as usize
}

/// The set of sequences made of `m` constant blocks of length `l`, each block
/// all-`0` or all-`alpha`. Contains `2^m` sequences of length `l*m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockAlphabet {
    l: usize,
    m: usize,
    alpha: u32,
}

impl BlockAlphabet {
    pub fn new(l: usize, m: usize, alpha: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::ZeroBlockLength);
        }
        if m == 0 {
            return Err(Error::ZeroHorizon);
        }
        if alpha == 0 {
            return Err(Error::DegenerateAlpha);
        }
        Ok(Self { l, m, alpha })
    }

    pub fn block_length(&self) -> usize {
        self.l
    }

    pub fn block_count(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn horizon(&self) -> usize {
        self.l * self.m
    }

    /// Number of member sequences, `2^m`.
    pub fn size(&self) -> u128 {
        1u128 << self.m
    }

    /// Membership test: every length-`l` block constant and equal to 0 or
    /// `alpha`.
    pub fn contains(&self, symbols: &[u32]) -> bool {
        if symbols.len() != self.horizon() {
            return false;
        }
        symbols.chunks_exact(self.l).all(|block| {
            let head = block[0];
            (head == 0 || head == self.alpha) && block.iter().all(|&s| s == head)
        })
    }

    /// All member sequences in lexicographic order (all-zero first).
    pub fn sequences(&self) -> Vec<ConsumptionSequence> {
        let mut out = Vec::with_capacity(1 << self.m);
        for mask in 0u64..(1u64 << self.m) {
            let mut symbols = Vec::with_capacity(self.horizon());
            for block in 0..self.m {
                let high = (mask >> (self.m - 1 - block)) & 1 == 1;
                let symbol = if high { self.alpha } else { 0 };
                symbols.extend(std::iter::repeat(symbol).take(self.l));
            }
            out.push(ConsumptionSequence::new(symbols, self.alpha).expect("symbols in range"));
        }
        out
    }
}

/// The two codewords a block policy can answer with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockChoice {
    Zero,
    Alpha,
}

impl BlockChoice {
    pub fn symbol(self, alpha: u32) -> u32 {
        match self {
            BlockChoice::Zero => 0,
            BlockChoice::Alpha => alpha,
        }
    }
}

/// Decides the request block for one consumption block.
///
/// Discharge (all-zero) when the level at the block start covers the block's
/// total consumption; otherwise charge (all-`alpha`), which the feasibility
/// condition `l <= floor((beta+1)/alpha)` guarantees stable. Ties prefer the
/// zero block. The chosen block is re-verified against the recursion before
/// being returned.
pub fn choose_block(s_start: u32, x_block: &[u32], cfg: &EmsConfig) -> Result<BlockChoice> {
    let l = x_block.len();
    if l == 0 {
        return Err(Error::ZeroBlockLength);
    }
    let max_l = max_block_length(cfg);
    if l > max_l {
        return Err(Error::BlockLengthInfeasible { l, max_l });
    }
    if s_start > cfg.beta() {
        return Err(Error::LevelOutOfRange {
            level: i64::from(s_start),
            beta: cfg.beta(),
        });
    }
    for &x in x_block {
        if x > cfg.alpha() {
            return Err(Error::SymbolOutOfRange {
                kind: SymbolKind::Consumption,
                value: x,
                max: cfg.alpha(),
            });
        }
    }

    let demand: i64 = x_block.iter().map(|&x| i64::from(x)).sum();
    let choice = if i64::from(s_start) - demand >= 0 {
        BlockChoice::Zero
    } else {
        BlockChoice::Alpha
    };

    if block_end_level(s_start, x_block, choice, cfg).is_none() {
        return Err(Error::InvariantViolation(format!(
            "neither constant block is stable from level {s_start} (block {x_block:?})"
        )));
    }
    Ok(choice)
}

/// Replays one block under a constant request; `None` if the level leaves
/// `[0, beta]`.
fn block_end_level(
    s_start: u32,
    x_block: &[u32],
    choice: BlockChoice,
    cfg: &EmsConfig,
) -> Option<u32> {
    let y = i64::from(choice.symbol(cfg.alpha()));
    let mut level = i64::from(s_start);
    for &x in x_block {
        level += y - i64::from(x);
        if level < 0 || level > i64::from(cfg.beta()) {
            return None;
        }
    }
    Some(level as u32)
}

/// Runs the block policy over a whole consumption sequence, threading the
/// battery level across blocks. The horizon must be a multiple of `l`;
/// padding is deliberately not supported.
pub fn apply_policy(x: &ConsumptionSequence, cfg: &EmsConfig, l: usize) -> Result<RequestSequence> {
    if l == 0 {
        return Err(Error::ZeroBlockLength);
    }
    let max_l = max_block_length(cfg);
    if l > max_l {
        return Err(Error::BlockLengthInfeasible { l, max_l });
    }
    if x.len() % l != 0 {
        return Err(Error::NotBlockAligned { n: x.len(), l });
    }

    let mut symbols = Vec::with_capacity(x.len());
    let mut level = cfg.s0();
    for block in x.symbols().chunks_exact(l) {
        let choice = choose_block(level, block, cfg)?;
        level = block_end_level(level, block, choice, cfg)
            .expect("choose_block verified block stability");
        symbols.extend(std::iter::repeat(choice.symbol(cfg.alpha())).take(l));
    }
    RequestSequence::new(symbols, cfg.gamma())
}

/// A deterministic map from consumption sequences to stable request
/// sequences, as seen by the leakage analysis.
pub trait Policy {
    fn request(&self, x: &ConsumptionSequence, cfg: &EmsConfig) -> Result<RequestSequence>;

    /// Short label used in reports.
    fn label(&self) -> String;
}

/// The block repetition policy with a fixed block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPolicy {
    block_length: usize,
}

impl BlockPolicy {
    pub fn new(cfg: &EmsConfig, block_length: usize) -> Result<Self> {
        if block_length == 0 {
            return Err(Error::ZeroBlockLength);
        }
        let max_l = max_block_length(cfg);
        if block_length > max_l {
            return Err(Error::BlockLengthInfeasible {
                l: block_length,
                max_l,
            });
        }
        Ok(Self { block_length })
    }

    /// The policy at the largest feasible block length, i.e. the strongest
    /// privacy guarantee this battery admits.
    pub fn longest(cfg: &EmsConfig) -> Result<Self> {
        Self::new(cfg, max_block_length(cfg))
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }
}

impl Policy for BlockPolicy {
    fn request(&self, x: &ConsumptionSequence, cfg: &EmsConfig) -> Result<RequestSequence> {
        apply_policy(x, cfg, self.block_length)
    }

    fn label(&self) -> String {
        format!("block(l={})", self.block_length)
    }
}

/// The identity policy `y = x`; always stable because it never moves the
/// battery.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoPolicy;

impl Policy for EchoPolicy {
    fn request(&self, x: &ConsumptionSequence, cfg: &EmsConfig) -> Result<RequestSequence> {
        RequestSequence::new(x.symbols().to_vec(), cfg.gamma())
    }

    fn label(&self) -> String {
        "echo".to_string()
    }
}

/// Requests as much as fits each step, keeping the battery as full as
/// possible: `y_i = min(gamma, beta + x_i - s_i)`. Causal and always stable.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyChargePolicy;

impl Policy for GreedyChargePolicy {
    fn request(&self, x: &ConsumptionSequence, cfg: &EmsConfig) -> Result<RequestSequence> {
        let beta = i64::from(cfg.beta());
        let gamma = i64::from(cfg.gamma());
        let mut level = i64::from(cfg.s0());
        let mut symbols = Vec::with_capacity(x.len());
        for &xi in x.symbols() {
            if xi > cfg.alpha() {
                return Err(Error::SymbolOutOfRange {
                    kind: SymbolKind::Consumption,
                    value: xi,
                    max: cfg.alpha(),
                });
            }
            let y = (beta + i64::from(xi) - level).min(gamma);
            debug_assert!(y >= 0);
            level += y - i64::from(xi);
            symbols.push(y as u32);
        }
        RequestSequence::new(symbols, cfg.gamma())
    }

    fn label(&self) -> String {
        "greedy-charge".to_string()
    }
}

/// An explicit lookup-table policy over a finite set of consumption
/// sequences. Produced by the brute-force leakage search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapPolicy {
    table: BTreeMap<ConsumptionSequence, RequestSequence>,
}

impl MapPolicy {
    pub fn new(table: BTreeMap<ConsumptionSequence, RequestSequence>) -> Self {
        Self { table }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ConsumptionSequence, &RequestSequence)> {
        self.table.iter()
    }
}

impl Policy for MapPolicy {
    fn request(&self, x: &ConsumptionSequence, _cfg: &EmsConfig) -> Result<RequestSequence> {
        self.table
            .get(x)
            .cloned()
            .ok_or_else(|| Error::PolicyUndefined(x.symbols().to_vec()))
    }

    fn label(&self) -> String {
        "table".to_string()
    }
}
