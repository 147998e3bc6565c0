//! Channel instance parameters.

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of one battery channel instance.
///
/// Consumption symbols live in `{0, ..., alpha}`, grid requests in
/// `{0, ..., gamma}`, and the battery level in `{0, ..., beta}`, starting from
/// `s0`. All quantities are dimensionless integer energy units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmsConfig {
    alpha: u32,
    gamma: u32,
    beta: u32,
    s0: u32,
}

impl EmsConfig {
    /// Validates `gamma >= alpha`, `alpha >= 1` and `s0 <= beta`.
    pub fn new(alpha: u32, gamma: u32, beta: u32, s0: u32) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::DegenerateAlpha);
        }
        if gamma < alpha {
            return Err(Error::GammaBelowAlpha { gamma, alpha });
        }
        if s0 > beta {
            return Err(Error::InitialLevelOutOfRange { s0, beta });
        }
        Ok(Self {
            alpha,
            gamma,
            beta,
            s0,
        })
    }

    /// A channel whose request alphabet matches the consumption alphabet.
    pub fn symmetric(alpha: u32, beta: u32, s0: u32) -> Result<Self> {
        Self::new(alpha, alpha, beta, s0)
    }

    /// Same channel, different initial battery level.
    pub fn with_s0(self, s0: u32) -> Result<Self> {
        Self::new(self.alpha, self.gamma, self.beta, s0)
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn s0(&self) -> u32 {
        self.s0
    }

    /// Iterates the battery state alphabet `0..=beta`.
    pub fn states(&self) -> impl Iterator<Item = u32> {
        0..=self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_parameters() {
        let cfg = EmsConfig::new(1, 2, 3, 1).unwrap();
        assert_eq!(cfg.alpha(), 1);
        assert_eq!(cfg.gamma(), 2);
        assert_eq!(cfg.beta(), 3);
        assert_eq!(cfg.s0(), 1);
    }

    #[test]
    fn rejects_alpha_zero() {
        assert!(matches!(
            EmsConfig::new(0, 1, 1, 0),
            Err(Error::DegenerateAlpha)
        ));
    }

    #[test]
    fn rejects_gamma_below_alpha() {
        assert!(matches!(
            EmsConfig::new(2, 1, 1, 0),
            Err(Error::GammaBelowAlpha { gamma: 1, alpha: 2 })
        ));
    }

    #[test]
    fn rejects_initial_level_above_capacity() {
        assert!(matches!(
            EmsConfig::new(1, 1, 2, 3),
            Err(Error::InitialLevelOutOfRange { s0: 3, beta: 2 })
        ));
    }

    #[test]
    fn batteryless_channel_is_allowed() {
        let cfg = EmsConfig::symmetric(1, 0, 0).unwrap();
        assert_eq!(cfg.states().collect::<Vec<_>>(), vec![0]);
    }
}
