//! Seeded random draws of models, step sizes and states for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ModelKind, ModelParams, State};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Parses a seed string (decimal or `0x` hex); falls back to [`DEFAULT_SEED`].
pub fn parse_seed(text: Option<&str>) -> u64 {
    let Some(t) = text.map(str::trim) else {
        return DEFAULT_SEED;
    };
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => t.parse().ok(),
    };
    parsed.unwrap_or(DEFAULT_SEED)
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        libm::exp(self.uniform(libm::log(lo), libm::log(hi)))
    }

    pub fn kind(&mut self) -> ModelKind {
        if self.rng.random::<bool>() {
            ModelKind::Ricker
        } else {
            ModelKind::LotkaVolterra
        }
    }

    /// `r, c in (0.05, 1)`; `K in (100, 5000)`, `alpha, gamma in (1e-3, 1e-1)`
    /// log-uniform.
    pub fn params(&mut self) -> ModelParams {
        let r = self.uniform(0.05, 1.0);
        let k = self.log_uniform(100.0, 5000.0);
        let alpha = self.log_uniform(1e-3, 1e-1);
        let gamma = self.log_uniform(1e-3, 1e-1);
        let c = self.uniform(0.05, 1.0);
        ModelParams::new(r, k, alpha, gamma, c).expect("sampled parameters are positive")
    }

    /// Parameters with a feasible coexistence point (`theta > 0`).
    pub fn feasible_params(&mut self) -> ModelParams {
        loop {
            let p = self.params();
            if p.derived().theta > 0.0 {
                return p;
            }
        }
    }

    /// Step size in `(0.01, 3)`.
    pub fn step(&mut self) -> f64 {
        self.uniform(0.01, 3.0)
    }

    /// Step size in `(0, 2]`.
    pub fn small_step(&mut self) -> f64 {
        2.0 - self.uniform(0.0, 2.0)
    }

    /// State with both coordinates in `(0, 2K)`.
    pub fn state(&mut self, params: &ModelParams) -> State {
        let hi = 2.0 * params.k();
        State::new(self.uniform(0.0, hi), self.uniform(0.0, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            assert_eq!(a.params(), b.params());
            assert_eq!(a.step(), b.step());
        }
    }

    #[test]
    fn draws_in_range() {
        let mut s = Sampler::new(DEFAULT_SEED);
        for _ in 0..500 {
            let p = s.params();
            assert!((0.05..1.0).contains(&p.r()));
            assert!((100.0..=5000.0).contains(&p.k()));
            let h = s.small_step();
            assert!(h > 0.0 && h <= 2.0);
            let x = s.state(&p);
            assert!(x.prey >= 0.0 && x.prey < 2.0 * p.k());
        }
        assert!(s.feasible_params().derived().theta > 0.0);
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed(None), DEFAULT_SEED);
        assert_eq!(parse_seed(Some("42")), 42);
        assert_eq!(parse_seed(Some(" 0xff ")), 255);
        assert_eq!(parse_seed(Some("junk")), DEFAULT_SEED);
    }
}
