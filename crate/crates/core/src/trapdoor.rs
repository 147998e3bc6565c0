//! Ball-in-box trapdoor channel and its equivalence with the binary battery
//! channel.
//!
//! A box holds `beta` balls, each red or blue. Every step one ball is thrown
//! in and one of the `beta + 1` balls then present is drawn out. Tracking the
//! red count `r` gives the recursion `r' = r + bl(out) - bl(in)` where `bl`
//! is 1 for blue. With `alpha = gamma = 1` this is exactly the battery
//! recursion under red-count <-> battery-level, so the two channels have the
//! same stable sets. This module exists to machine-check that claim; the
//! policy and leakage machinery works on the battery formulation.

use crate::config::EmsConfig;
use crate::ems::{ConsumptionSequence, RequestSequence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BallColor {
    Red,
    Blue,
}

impl BallColor {
    /// The blue indicator `bl`.
    fn bl(self) -> i64 {
        match self {
            BallColor::Blue => 1,
            BallColor::Red => 0,
        }
    }
}

/// Box state: capacity and how many of the resident balls are red.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrapdoorBox {
    capacity: u32,
    red_count: u32,
}

impl TrapdoorBox {
    pub fn new(capacity: u32, red_count: u32) -> Result<Self> {
        if red_count > capacity {
            return Err(Error::LevelOutOfRange {
                level: i64::from(red_count),
                beta: capacity,
            });
        }
        Ok(Self {
            capacity,
            red_count,
        })
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn red_count(&self) -> u32 {
        self.red_count
    }

    pub fn blue_count(&self) -> u32 {
        self.capacity - self.red_count
    }
}

/// One channel use: throw `input` in, draw `output` out. Returns `None` when
/// the draw is impossible, i.e. no ball of the requested color is present
/// after the insertion. That physical condition coincides with the red-count
/// recursion leaving `[0, capacity]`.
pub fn trapdoor_step(
    box_state: TrapdoorBox,
    input: BallColor,
    output: BallColor,
) -> Option<TrapdoorBox> {
    let next_red = i64::from(box_state.red_count) + output.bl() - input.bl();

    // Ball-count feasibility: the extracted color must exist once the input
    // ball has been added.
    let present = match output {
        BallColor::Blue => i64::from(box_state.blue_count()) + input.bl(),
        BallColor::Red => i64::from(box_state.red_count) + (1 - input.bl()),
    };
    let count_feasible = present >= 1;
    let range_feasible = (0..=i64::from(box_state.capacity)).contains(&next_red);
    debug_assert_eq!(count_feasible, range_feasible);

    if !range_feasible {
        return None;
    }
    Some(TrapdoorBox {
        capacity: box_state.capacity,
        red_count: next_red as u32,
    })
}

/// Ball streams obtained from a battery channel realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrapdoorSequences {
    pub inputs: Vec<BallColor>,
    pub outputs: Vec<BallColor>,
    pub initial_red: u32,
}

fn symbol_to_color(symbol: u32) -> BallColor {
    if symbol == 1 {
        BallColor::Blue
    } else {
        BallColor::Red
    }
}

fn color_to_symbol(color: BallColor) -> u32 {
    match color {
        BallColor::Blue => 1,
        BallColor::Red => 0,
    }
}

/// Relabels a binary battery realization as ball streams: symbol 1 becomes
/// blue and 0 red on both streams, and the initial red count is `s0`.
/// Only defined for `alpha = gamma = 1`.
pub fn ems_to_trapdoor(
    x: &ConsumptionSequence,
    y: &RequestSequence,
    cfg: &EmsConfig,
) -> Result<TrapdoorSequences> {
    if cfg.alpha() != 1 || cfg.gamma() != 1 {
        return Err(Error::UnsupportedTrapdoorConfig {
            alpha: cfg.alpha(),
            gamma: cfg.gamma(),
        });
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    Ok(TrapdoorSequences {
        inputs: x.symbols().iter().map(|&s| symbol_to_color(s)).collect(),
        outputs: y.symbols().iter().map(|&s| symbol_to_color(s)).collect(),
        initial_red: cfg.s0(),
    })
}

/// Inverse of [`ems_to_trapdoor`].
pub fn trapdoor_to_ems(
    seqs: &TrapdoorSequences,
    cfg: &EmsConfig,
) -> Result<(ConsumptionSequence, RequestSequence)> {
    if cfg.alpha() != 1 || cfg.gamma() != 1 {
        return Err(Error::UnsupportedTrapdoorConfig {
            alpha: cfg.alpha(),
            gamma: cfg.gamma(),
        });
    }
    let x: Vec<u32> = seqs.inputs.iter().map(|&c| color_to_symbol(c)).collect();
    let y: Vec<u32> = seqs.outputs.iter().map(|&c| color_to_symbol(c)).collect();
    Ok((
        ConsumptionSequence::new(x, cfg.alpha())?,
        RequestSequence::new(y, cfg.gamma())?,
    ))
}

/// Whether the ball streams can actually be pulled through a box of the
/// given capacity: every step feasible, red count always in `[0, capacity]`.
pub fn is_trapdoor_stable(seqs: &TrapdoorSequences, capacity: u32) -> Result<bool> {
    if seqs.inputs.len() != seqs.outputs.len() {
        return Err(Error::LengthMismatch {
            x_len: seqs.inputs.len(),
            y_len: seqs.outputs.len(),
        });
    }
    let mut state = TrapdoorBox::new(capacity, seqs.initial_red)?;
    for (&input, &output) in seqs.inputs.iter().zip(&seqs.outputs) {
        match trapdoor_step(state, input, output) {
            Some(next) => state = next,
            None => return Ok(false),
        }
    }
    Ok(true)
}
