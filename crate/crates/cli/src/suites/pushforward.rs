use rayon::prelude::*;
use wbar::chain::{format_coeff, parse_coeff};
use wbar::norms::verify_pushforward_estimate;
use wbar::{Exponent, GroupHomomorphism, KernelCertificate};

use crate::config::{Context, PushforwardParams};
use crate::error::HarnessError;
use crate::random::{trial_rng, ChainSampler, RandomChainSpec};
use crate::report::{fmt_f64, fmt_opt_f64, Table};
use crate::suites::{ok_str, SuiteOutput};

pub const HEADER: &[&str] = &[
    "source",
    "target",
    "images",
    "kernel_degree",
    "kernel_constant",
    "trial",
    "k",
    "n",
    "p",
    "regime",
    "m",
    "lhs",
    "rhs",
    "constant",
    "printed_ratio",
    "alternative_ratio",
    "exact_lhs",
    "exact_rhs",
    "ok",
];

struct Job {
    trial: usize,
    k: usize,
    n: u32,
    p: Exponent,
}

pub fn homomorphism(ctx: &Context, params: &PushforwardParams) -> Result<GroupHomomorphism, HarnessError> {
    let phi = GroupHomomorphism::parse(ctx.model(&params.source)?, ctx.model(&params.target)?, &params.images)?;
    let cert = match &params.kernel_constant {
        Some(k) => KernelCertificate { degree: params.kernel_degree, constant: parse_coeff(k)?, radius: 0 },
        None => phi.kernel_certificate(params.kernel_degree, params.kernel_radius)?,
    };
    Ok(phi.with_certificate(cert))
}

pub fn run(ctx: &Context, params: &PushforwardParams) -> Result<SuiteOutput, HarnessError> {
    let phi = homomorphism(ctx, params)?;
    let cert = phi.certificate().expect("attached above").clone();
    let samplers = params
        .degrees
        .iter()
        .map(|&k| {
            ChainSampler::new(phi.source().clone(), RandomChainSpec::new(k, params.support, params.radius).non_degenerate())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::new();
    for trial in 0..params.trials {
        for &k in &params.degrees {
            for &n in &params.weights {
                for &p in &params.exponents {
                    jobs.push(Job { trial, k, n, p });
                }
            }
        }
    }
    let k_text = format_coeff(&cert.constant);
    let rows = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let sampler = &samplers[params.degrees.iter().position(|&k| k == job.k).expect("listed degree")];
            let c = sampler.sample(&mut trial_rng(ctx.seed, i as u64))?;
            let r = verify_pushforward_estimate(&phi, &c, job.n, job.p)?;
            let regime = serde_json::to_value(r.regime)?.as_str().unwrap_or_default().to_string();
            Ok((
                vec![
                    params.source.clone(),
                    params.target.clone(),
                    params.images.clone(),
                    cert.degree.to_string(),
                    k_text.clone(),
                    job.trial.to_string(),
                    job.k.to_string(),
                    job.n.to_string(),
                    job.p.to_string(),
                    regime,
                    r.estimate.exponent_m.to_string(),
                    fmt_f64(r.estimate.lhs),
                    fmt_f64(r.estimate.rhs),
                    fmt_f64(r.estimate.constant),
                    fmt_opt_f64(r.printed_ratio),
                    fmt_opt_f64(r.alternative_ratio),
                    r.exact_lhs.clone().unwrap_or_default(),
                    r.exact_rhs.clone().unwrap_or_default(),
                    ok_str(r.estimate.ok),
                ],
                r.estimate.ok,
            ))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut table = Table::new("pushforward", HEADER);
    for (row, ok) in rows {
        table.push(row, ok);
    }
    Ok(SuiteOutput { tables: vec![table], ..Default::default() })
}
