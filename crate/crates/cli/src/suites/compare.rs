use std::sync::Arc;

use rayon::prelude::*;
use wbar::chain::{format_coeff, parse_coeff};
use wbar::norms::verify_comparison;
use wbar::{Coeff, Exponent, GroupModel};

use crate::config::{CompareParams, Context};
use crate::error::HarnessError;
use crate::random::{trial_rng, ChainSampler, RandomChainSpec};
use crate::report::{fmt_f64, Table};
use crate::suites::{ok_str, pairs, polynomial_growth_degree, SuiteOutput};

pub const HEADER: &[&str] = &[
    "model",
    "trial",
    "k",
    "n",
    "p",
    "q",
    "growth_degree",
    "growth_constant",
    "m",
    "lhs",
    "rhs",
    "constant",
    "ratio",
    "ok",
];

/// `(D, K)` from the parameters, defaulting to the model's growth degree and
/// `max_{r <= growth_radius} β(r)/r^D`.
pub fn growth_data(model: &GroupModel, params: &CompareParams) -> Result<(u32, Coeff), HarnessError> {
    let d = match params.growth_degree.or_else(|| polynomial_growth_degree(model)) {
        Some(d) => d,
        None => return Err(HarnessError::Config(format!("{model} has no polynomial growth degree; pass --growth-degree"))),
    };
    let k = match &params.growth_constant {
        Some(s) => parse_coeff(s)?,
        None => model.growth_constant(d, params.growth_radius)?,
    };
    Ok((d, k))
}

struct Job {
    trial: usize,
    k: usize,
    n: u32,
    p: Exponent,
    q: Exponent,
}

pub fn run(ctx: &Context, params: &CompareParams) -> Result<SuiteOutput, HarnessError> {
    let model: Arc<GroupModel> = ctx.model(&params.model)?;
    let (d, k_const) = growth_data(&model, params)?;
    let grid = pairs(&params.p, &params.q)?;
    let samplers = params
        .degrees
        .iter()
        .map(|&k| ChainSampler::new(model.clone(), RandomChainSpec::new(k, params.support, params.radius).non_degenerate()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::new();
    for trial in 0..params.trials {
        for &k in &params.degrees {
            for &n in &params.weights {
                for &(p, q) in &grid {
                    jobs.push(Job { trial, k, n, p, q });
                }
            }
        }
    }
    let k_text = format_coeff(&k_const);
    let rows = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let sampler = &samplers[params.degrees.iter().position(|&k| k == job.k).expect("listed degree")];
            let c = sampler.sample(&mut trial_rng(ctx.seed, i as u64))?;
            let r = verify_comparison(&c, job.n, job.p, job.q, d, &k_const)?;
            Ok((
                vec![
                    params.model.clone(),
                    job.trial.to_string(),
                    job.k.to_string(),
                    job.n.to_string(),
                    job.p.to_string(),
                    job.q.to_string(),
                    d.to_string(),
                    k_text.clone(),
                    r.exponent_m.to_string(),
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs),
                    fmt_f64(r.constant),
                    fmt_f64(r.ratio()),
                    ok_str(r.ok),
                ],
                r.ok,
            ))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut table = Table::new("compare-pq", HEADER);
    for (row, ok) in rows {
        table.push(row, ok);
    }
    Ok(SuiteOutput { tables: vec![table], ..Default::default() })
}
