use rayon::prelude::*;
use serde::Serialize;
use wbar::diffusion::{annuli_disjoint, AccumulationReport, DiffusionEstimateReport, Homotopy};
use wbar::{Chain, DiffusionOperator};

use crate::config::{Context, DiffuseParams};
use crate::error::HarnessError;
use crate::random::{trial_rng, ChainSampler, RandomChainSpec};
use crate::report::{fmt_f64, Table};
use crate::suites::{ok_str, pairs, SuiteOutput};

pub const HEADER: &[&str] = &[
    "model",
    "N",
    "conforming",
    "trial",
    "degree",
    "support",
    "n",
    "p",
    "q",
    "m",
    "homotopy_ok",
    "chain_map_ok",
    "annuli_disjoint",
    "accumulation_ok",
    "cone_norm",
    "cone_bound",
    "cone_ok",
    "cone_pp_ratio",
    "cone_pq_ratio",
    "id_minus_boundary_cone_ratio",
    "e_ratio",
    "ok",
];

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub support: usize,
    pub homotopy_ok: bool,
    pub chain_map_ok: bool,
    pub annuli_disjoint: bool,
    pub accumulation: AccumulationReport,
    pub estimates: Vec<DiffusionEstimateReport>,
}

/// `c - E(c) = ∂B(c) + B(∂c)` exactly.
pub fn homotopy_identity(c: &Chain, h: &Homotopy) -> Result<bool, HarnessError> {
    let lhs = c.sub(&h.e)?;
    let rhs = match &h.cone_of_boundary {
        Some(b) => h.boundary_of_cone.add(b)?,
        None => h.boundary_of_cone.clone(),
    };
    Ok(lhs == rhs)
}

/// `∂E(c) = E(∂c)`, using `E(∂c) = ∂c - ∂B(∂c)`.
pub fn chain_map_identity(c: &Chain, h: &Homotopy) -> Result<bool, HarnessError> {
    if c.degree() == 0 {
        return Ok(true);
    }
    let dc = c.boundary()?;
    let e_dc = match &h.cone_of_boundary {
        Some(b) => dc.sub(&b.boundary()?)?,
        None => dc,
    };
    Ok(h.e.boundary()? == e_dc)
}

fn radii(c: &Chain) -> Vec<u64> {
    let mut r: Vec<u64> = c.iter().map(|(s, _)| s.diameter(c.model())).collect();
    if c.degree() > 0 {
        if let Ok(b) = c.boundary() {
            r.extend(b.iter().map(|(s, _)| s.diameter(c.model())));
        }
    }
    r
}

pub fn run(ctx: &Context, params: &DiffuseParams) -> Result<SuiteOutput, HarnessError> {
    let model = ctx.model(&params.model)?;
    let op = DiffusionOperator::with_cap(model.clone(), params.annulus_degree, ctx.cap)?;
    let grid = pairs(&params.p, &params.q)?;
    let chains: Vec<Chain> = match &params.chain {
        Some(path) => vec![Chain::from_json(model.clone(), None, &std::fs::read_to_string(path)?)?],
        None => {
            let mut spec = RandomChainSpec::new(params.degree, params.support, params.radius);
            spec.max_diameter = params.max_diameter;
            let sampler = ChainSampler::new(model.clone(), spec)?;
            (0..params.trials)
                .map(|t| sampler.sample(&mut trial_rng(ctx.seed, t as u64)))
                .collect::<Result<_, _>>()?
        }
    };
    let results = chains
        .par_iter()
        .enumerate()
        .map(|(trial, c)| {
            let h = op.homotopy(c)?;
            let mut estimates = Vec::new();
            for &n in &params.weights {
                for &(p, q) in &grid {
                    estimates.push(op.estimate_from(c, &h, n, p, q, params.m)?);
                }
            }
            let report = TrialReport {
                trial,
                support: c.len(),
                homotopy_ok: homotopy_identity(c, &h)?,
                chain_map_ok: chain_map_identity(c, &h)?,
                annuli_disjoint: annuli_disjoint(op.config(), &radii(c))?,
                accumulation: op.check_accumulation(c)?,
                estimates,
            };
            Ok((report, h.e))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let mut table = Table::new("diffuse", HEADER);
    let conforming = op.config().is_conforming();
    for (r, _) in &results {
        let exact_ok = r.homotopy_ok && r.chain_map_ok && r.annuli_disjoint && r.accumulation.ok;
        for e in &r.estimates {
            let ok = exact_ok && e.ok;
            table.push(
                vec![
                    params.model.clone(),
                    params.annulus_degree.to_string(),
                    ok_str(conforming),
                    r.trial.to_string(),
                    chains[r.trial].degree().to_string(),
                    r.support.to_string(),
                    e.weight.to_string(),
                    e.p.to_string(),
                    e.q.to_string(),
                    e.m.to_string(),
                    ok_str(r.homotopy_ok),
                    ok_str(r.chain_map_ok),
                    ok_str(r.annuli_disjoint),
                    ok_str(r.accumulation.ok),
                    fmt_f64(e.cone_norm),
                    fmt_f64(e.cone_bound),
                    ok_str(e.ok),
                    fmt_f64(e.cone_pp_ratio),
                    fmt_f64(e.cone_pq_ratio),
                    fmt_f64(e.id_minus_boundary_cone_ratio),
                    fmt_f64(e.e_ratio),
                    ok_str(ok),
                ],
                ok,
            );
        }
    }
    let mut out = SuiteOutput::default();
    if !conforming {
        out.notes.push(format!("diffuse: N = {} is below the conforming range N > 10", params.annulus_degree));
    }
    if let (Some(path), Some((_, e))) = (&params.emit_chain, results.last()) {
        std::fs::write(path, e.to_json())?;
    }
    let reports: Vec<&TrialReport> = results.iter().map(|(r, _)| r).collect();
    out.files.push(("diffuse.json".into(), serde_json::to_vec_pretty(&reports)?));
    out.tables.push(table);
    Ok(out)
}
