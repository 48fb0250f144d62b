//! Experiment configuration, shared by the command line and `--config` files.
//!
//! Every parameter struct is both a clap argument group and a serde record;
//! fields missing from a JSON config take the command-line defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, FromArgMatches};
use serde::{Deserialize, Serialize};
use wbar::group::DEFAULT_ENUMERATION_CAP;
use wbar::{Exponent, GroupModel};

use crate::error::HarnessError;

/// Environment variable overriding the enumeration cap.
pub const CAP_ENV: &str = "WBAR_ENUM_CAP";

fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults"));
    T::from_arg_matches(&cmd.get_matches_from(["defaults"])).expect("argument defaults parse")
}

macro_rules! clap_default {
    ($($t:ty),*) => {
        $(impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        })*
    };
}

pub fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: wbar::NormError| e.to_string())
}

/// A weight/exponent pair written `n:p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NormPair {
    pub weight: u32,
    pub exponent: Exponent,
}

impl FromStr for NormPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, p) = s.split_once(':').ok_or_else(|| format!("expected n:p, got {s:?}"))?;
        Ok(NormPair { weight: n.trim().parse().map_err(|_| format!("bad weight in {s:?}"))?, exponent: parse_exponent(p)? })
    }
}

impl TryFrom<String> for NormPair {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NormPair> for String {
    fn from(p: NormPair) -> String {
        p.to_string()
    }
}

impl fmt::Display for NormPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.weight, self.exponent)
    }
}

/// Sphere/ball sizes against enumeration and a breadth-first search.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthParams {
    #[arg(long, default_value = "free:2")]
    pub model: String,
    #[arg(long, default_value_t = 6)]
    pub radius: u64,
    /// Also report `max_{1<=r<=radius} β(r)/r^D`.
    #[arg(long)]
    pub growth_degree: Option<u32>,
}

/// Norm axioms and contractivity on random chains.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormsParams {
    #[arg(long, default_value = "free:2")]
    pub model: String,
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    #[arg(long, default_value_t = 8)]
    pub support: usize,
    #[arg(long, default_value_t = 3)]
    pub radius: u64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long = "n", value_delimiter = ',', default_value = "0,1,3")]
    pub weights: Vec<u32>,
    #[arg(long = "p", value_delimiter = ',', default_value = "1,2,3,inf", value_parser = parse_exponent)]
    pub exponents: Vec<Exponent>,
}

/// The comparison estimate for groups of polynomial growth.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareParams {
    #[arg(long, default_value = "abelian:2")]
    pub model: String,
    #[arg(long = "k", value_delimiter = ',', default_value = "1")]
    pub degrees: Vec<usize>,
    #[arg(long = "n", value_delimiter = ',', default_value = "0")]
    pub weights: Vec<u32>,
    /// Paired element-wise with `--q`.
    #[arg(long = "p", value_delimiter = ',', default_value = "2", value_parser = parse_exponent)]
    pub p: Vec<Exponent>,
    #[arg(long = "q", value_delimiter = ',', default_value = "4", value_parser = parse_exponent)]
    pub q: Vec<Exponent>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub support: usize,
    #[arg(long, default_value_t = 6)]
    pub radius: u64,
    /// Defaults to the polynomial growth degree of the model.
    #[arg(long)]
    pub growth_degree: Option<u32>,
    /// Ball constant `K` as an integer or `p/q`; defaults to `max β(r)/r^D`.
    #[arg(long)]
    pub growth_constant: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub growth_radius: u64,
}

/// The functoriality estimates for a homomorphism with controlled kernel.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PushforwardParams {
    #[arg(long, default_value = "abelian:2")]
    pub source: String,
    #[arg(long, default_value = "abelian:1")]
    pub target: String,
    /// Images of the source basis, separated by `;`.
    #[arg(long, default_value = "1;0")]
    pub images: String,
    #[arg(long = "k", value_delimiter = ',', default_value = "1")]
    pub degrees: Vec<usize>,
    #[arg(long = "n", value_delimiter = ',', default_value = "0")]
    pub weights: Vec<u32>,
    #[arg(long = "p", value_delimiter = ',', default_value = "1,2,3,inf", value_parser = parse_exponent)]
    pub exponents: Vec<Exponent>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 8)]
    pub support: usize,
    #[arg(long, default_value_t = 6)]
    pub radius: u64,
    #[arg(long, default_value_t = 1)]
    pub kernel_degree: u32,
    /// Kernel constant `K`; defaults to the empirical `max |ker ∩ B(r)| / r^D`.
    #[arg(long)]
    pub kernel_constant: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub kernel_radius: u64,
}

/// The diffusion cone operator, the chain map `E` and their estimates.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiffuseParams {
    #[arg(long, default_value = "free:2")]
    pub model: String,
    /// Annulus degree `N`.
    #[arg(long = "N", default_value_t = 2)]
    pub annulus_degree: u32,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, default_value_t = 3)]
    pub radius: u64,
    #[arg(long)]
    pub max_diameter: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub support: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long = "n", value_delimiter = ',', default_value = "0,1,2")]
    pub weights: Vec<u32>,
    /// Paired element-wise with `--q`.
    #[arg(long = "p", value_delimiter = ',', default_value = "2", value_parser = parse_exponent)]
    pub p: Vec<Exponent>,
    #[arg(long = "q", value_delimiter = ',', default_value = "4", value_parser = parse_exponent)]
    pub q: Vec<Exponent>,
    /// Weight `m` of the reported ratios.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Diffuse this JSON chain instead of random ones.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Write `E(c)` of the last chain here.
    #[arg(long)]
    pub emit_chain: Option<PathBuf>,
}

/// The level sets, the partial sums `b(D)` and their decay over `F_2`.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct F2Params {
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, value_delimiter = ',', default_value = "0:3,0:2")]
    pub norms: Vec<NormPair>,
}

clap_default!(GrowthParams, NormsParams, CompareParams, PushforwardParams, DiffuseParams, F2Params);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Growth(GrowthParams),
    Norms(NormsParams),
    Diffuse(DiffuseParams),
    ComparePq(CompareParams),
    Pushforward(PushforwardParams),
    F2Vanish(F2Params),
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Growth(_) => "growth",
            Command::Norms(_) => "norms",
            Command::Diffuse(_) => "diffuse",
            Command::ComparePq(_) => "compare-pq",
            Command::Pushforward(_) => "pushforward",
            Command::F2Vanish(_) => "f2-vanish",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// Enumeration cap; falls back to `WBAR_ENUM_CAP`, then the library default.
    #[serde(default)]
    pub cap: Option<u64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("wbar-out")
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig { command, seed: 0, cap: None, out: default_out() }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn effective_cap(&self) -> Result<u64, HarnessError> {
        if let Some(cap) = self.cap {
            return Ok(cap);
        }
        match std::env::var(CAP_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| HarnessError::Config(format!("{CAP_ENV}={v:?} is not an integer"))),
            Err(_) => Ok(DEFAULT_ENUMERATION_CAP),
        }
    }
}

/// Seed and cap shared by the suites of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context {
    pub seed: u64,
    pub cap: u64,
}

impl Context {
    pub fn model(&self, descriptor: &str) -> Result<Arc<GroupModel>, HarnessError> {
        let model: GroupModel = descriptor.parse()?;
        Ok(Arc::new(model.with_cap(self.cap)))
    }

    /// The same context with a seed derived for sub-run `index`.
    pub fn derive(&self, index: u64) -> Context {
        Context { seed: self.seed ^ (index << 32), cap: self.cap }
    }
}
