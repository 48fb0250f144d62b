use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use wbar::norms::{check_contractivity, frechet_seminorm, holds, weighted_norm};
use wbar::{Exponent, NormParams};

use crate::config::{Context, NormsParams};
use crate::error::HarnessError;
use crate::random::{trial_rng, ChainSampler, RandomChainSpec};
use crate::report::{fmt_f64, fmt_opt, Table};
use crate::suites::{ok_str, SuiteOutput};

pub const HEADER: &[&str] = &[
    "model",
    "trial",
    "n",
    "p",
    "norm",
    "frechet",
    "triangle_ok",
    "homogeneity_ok",
    "monotone_ok",
    "q",
    "contractivity_ok",
    "ok",
];

/// Triangle inequality, homogeneity, monotonicity in `n` and contractivity
/// (`q = p + 1`) on pairs of random chains with non-degenerate support.
pub fn run(ctx: &Context, params: &NormsParams) -> Result<SuiteOutput, HarnessError> {
    let model = ctx.model(&params.model)?;
    let spec = RandomChainSpec::new(params.degree, params.support, params.radius).non_degenerate();
    let sampler = ChainSampler::new(model, spec)?;
    let rows: Vec<Vec<(Vec<String>, bool)>> = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(ctx.seed, trial as u64);
            let a = sampler.sample(&mut rng)?;
            let b = sampler.sample(&mut rng)?;
            let lambda = sampler.coefficient(&mut rng);
            let lambda_abs = lambda.abs().to_f64().expect("small rational");
            let sum = a.add(&b)?;
            let scaled = a.scale(&lambda);
            let mut rows = Vec::new();
            for &n in &params.weights {
                for &p in &params.exponents {
                    let at = NormParams::new(n, p);
                    let na = weighted_norm(&a, at);
                    let triangle = holds(weighted_norm(&sum, at), na + weighted_norm(&b, at));
                    let ns = weighted_norm(&scaled, at);
                    let homogeneous = (ns - lambda_abs * na).abs() <= 1e-9 * ns.max(1.0);
                    let monotone = holds(na, weighted_norm(&a, NormParams::new(n + 1, p)));
                    let (q, contractive) = match p {
                        Exponent::Finite(r) => {
                            let q = Exponent::Finite(r + Ratio::one());
                            (Some(q), check_contractivity(&a, n, p, q)?.ok)
                        }
                        Exponent::Infinity => (None, true),
                    };
                    let ok = triangle && homogeneous && monotone && contractive;
                    rows.push((
                        vec![
                            params.model.clone(),
                            trial.to_string(),
                            n.to_string(),
                            p.to_string(),
                            fmt_f64(na),
                            fmt_f64(frechet_seminorm(&a, at)),
                            ok_str(triangle),
                            ok_str(homogeneous),
                            ok_str(monotone),
                            fmt_opt(q),
                            ok_str(contractive),
                            ok_str(ok),
                        ],
                        ok,
                    ));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, HarnessError>>()?;
    let mut table = Table::new("norms", HEADER);
    for (row, ok) in rows.into_iter().flatten() {
        table.push(row, ok);
    }
    Ok(SuiteOutput { tables: vec![table], ..Default::default() })
}
