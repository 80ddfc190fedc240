//! Seeded parameter draws for the verification batches.
//!
//! Every suite reads its own ChaCha8 stream of the same seed, so the draws
//! of one suite do not depend on which other suites ran before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::identities::SumParams;
use crate::integrals::{IntegralSpec, LaplaceSpec};
use crate::numerics::Complex;
use crate::wfunction::WArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Representations,
    Asymptotics,
    Recurrences,
    Sums,
    Integrals,
    Laplace,
}

impl Suite {
    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, suite: Suite) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(suite.stream());
        Sampler { rng }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn complex(&mut self, re: (f64, f64), im_max: f64) -> Complex {
        let re = self.uniform(re.0, re.1);
        let im = if im_max > 0.0 {
            self.uniform(-im_max, im_max)
        } else {
            0.0
        };
        Complex::new(re, im)
    }

    /// z = r e^{iθ} with r uniform in [r_lo, r_hi] and θ
    /// at least 0.04 from the negative real axis.
    pub fn polar(&mut self, r_lo: f64, r_hi: f64) -> Complex {
        Complex::from_polar(self.uniform(r_lo, r_hi), self.uniform(-3.1, 3.1))
    }

    /// Parameters for the W-function with Re in [0.3, 2] and |Im| ≤ 0.5.
    pub fn w_params(&mut self, z: Complex) -> WArgs {
        let mut p = || self.complex((0.3, 2.0), 0.5);
        let (a, b, g, d) = (p(), p(), p(), p());
        WArgs::new(a, b, g, d, z).expect("sampled parameters keep Re > 0")
    }

    /// Parameters for leading-order small-z checks: Re in [0.2, 1] and
    /// |Im| ≤ 0.25, which keeps the first correction |(α+γ)(1+α+γ-β) z| small
    /// at |z| = 0.02.
    pub fn w_params_small(&mut self, z: Complex) -> WArgs {
        let mut p = || self.complex((0.2, 1.0), 0.25);
        let (a, b, g, d) = (p(), p(), p(), p());
        WArgs::new(a, b, g, d, z).expect("sampled parameters keep Re > 0")
    }

    pub fn w_args(&mut self, r_lo: f64, r_hi: f64) -> WArgs {
        let z = self.polar(r_lo, r_hi);
        self.w_params(z)
    }

    pub fn sum_params(&mut self) -> SumParams {
        let mut p = || self.complex((0.5, 2.0), 0.3);
        SumParams {
            alpha: p(),
            beta: p(),
            gamma: p(),
        }
    }

    pub fn integral_spec(&mut self) -> IntegralSpec {
        let alpha = self.complex((0.5, 2.5), 0.5);
        let beta = self.complex((0.5, 3.0), 0.5);
        let gamma = self.complex((0.5, 2.5), 0.5);
        let l = self.rng.gen_range(0..=2u32);
        let rho = self.uniform(0.5, 3.0);
        IntegralSpec::new(alpha, beta, gamma, l, rho).expect("sampled spec is valid")
    }

    pub fn laplace_spec(&mut self, h: Complex) -> LaplaceSpec {
        let alpha = self.complex((0.5, 2.5), 0.5);
        let beta = self.complex((0.0, 2.0), 0.5);
        let gamma = self.complex((0.0, 1.0), 0.5);
        LaplaceSpec::new(alpha, beta, gamma, h).expect("sampled spec is valid")
    }
}
