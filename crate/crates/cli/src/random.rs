//! Seeded random chains.
//!
//! Each trial draws from its own ChaCha8 stream of the run seed, so a trial's
//! chain does not depend on which worker computes it.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wbar::{Chain, Coeff, GroupElement, GroupModel, Simplex};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomChainSpec {
    pub degree: usize,
    /// Exact number of distinct simplices.
    pub support: usize,
    /// Every vertex lies in the ball of this radius.
    pub radius: u64,
    pub max_diameter: Option<u64>,
    /// Reject simplices of diameter 0.
    pub exclude_degenerate: bool,
    /// Numerators are drawn from `[-max_numerator, max_numerator] \ {0}`.
    pub max_numerator: i64,
    /// Denominators are drawn from `[1, max_denominator]`.
    pub max_denominator: i64,
}

impl RandomChainSpec {
    pub fn new(degree: usize, support: usize, radius: u64) -> Self {
        RandomChainSpec {
            degree,
            support,
            radius,
            max_diameter: None,
            exclude_degenerate: false,
            max_numerator: 9,
            max_denominator: 5,
        }
    }

    pub fn max_diameter(mut self, d: u64) -> Self {
        self.max_diameter = Some(d);
        self
    }

    pub fn non_degenerate(mut self) -> Self {
        self.exclude_degenerate = true;
        self
    }
}

/// `ChaCha8Rng` for trial `stream` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples chains for one model and spec; the vertex ball is enumerated once.
#[derive(Clone, Debug)]
pub struct ChainSampler {
    model: Arc<GroupModel>,
    spec: RandomChainSpec,
    pool: Vec<GroupElement>,
}

impl ChainSampler {
    pub fn new(model: Arc<GroupModel>, spec: RandomChainSpec) -> Result<Self, HarnessError> {
        if spec.max_numerator < 1 || spec.max_denominator < 1 {
            return Err(HarnessError::Config("coefficient bounds must be positive".into()));
        }
        let pool = model.ball(spec.radius)?;
        Ok(ChainSampler { model, spec, pool })
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn spec(&self) -> &RandomChainSpec {
        &self.spec
    }

    fn admissible(&self, s: &Simplex) -> bool {
        let d = s.diameter(&self.model);
        !(self.spec.exclude_degenerate && d == 0) && self.spec.max_diameter.is_none_or(|m| d <= m)
    }

    pub fn coefficient(&self, rng: &mut impl Rng) -> Coeff {
        let mut num = rng.gen_range(1..=self.spec.max_numerator);
        if rng.gen_bool(0.5) {
            num = -num;
        }
        Coeff::new(num.into(), rng.gen_range(1..=self.spec.max_denominator).into())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<Chain, HarnessError> {
        let spec = &self.spec;
        let mut c = Chain::zero(self.model.clone(), spec.degree);
        let budget = 10_000 + 1_000 * spec.support;
        let mut attempts = 0;
        while c.len() < spec.support {
            attempts += 1;
            if attempts > budget {
                return Err(HarnessError::Sampling(format!(
                    "found {} of {} admissible simplices after {budget} draws",
                    c.len(),
                    spec.support
                )));
            }
            let s = Simplex::new((0..spec.degree).map(|_| self.pool[rng.gen_range(0..self.pool.len())].clone()));
            if c.coefficient(&s).is_some() || !self.admissible(&s) {
                continue;
            }
            let a = self.coefficient(rng);
            c.add_term(s, a)?;
        }
        Ok(c)
    }
}

/// One chain for `(spec, seed)`.
pub fn random_chain(model: Arc<GroupModel>, spec: &RandomChainSpec, seed: u64) -> Result<Chain, HarnessError> {
    ChainSampler::new(model, spec.clone())?.sample(&mut trial_rng(seed, 0))
}
