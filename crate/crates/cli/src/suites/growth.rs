use std::collections::{HashMap, VecDeque};

use wbar::{GroupElement, GroupModel};

use crate::config::{Context, GrowthParams};
use crate::error::HarnessError;
use crate::report::Table;
use crate::suites::{ok_str, SuiteOutput};

pub const HEADER: &[&str] = &[
    "model",
    "radius",
    "sphere_formula",
    "sphere_enumerated",
    "sphere_bfs",
    "ball_formula",
    "ball_bfs",
    "lengths_ok",
    "ok",
];

/// Distances from `e` in the Cayley graph up to `radius`, by generator
/// multiplication only.
pub fn bfs_distances(model: &GroupModel, radius: u64) -> HashMap<GroupElement, u64> {
    let gens = model.generators();
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    let e = model.identity();
    dist.insert(e.clone(), 0);
    queue.push_back(e);
    while let Some(g) = queue.pop_front() {
        let d = dist[&g];
        if d == radius {
            continue;
        }
        for s in &gens {
            let h = model.multiply(&g, s).expect("generator of the model");
            if !dist.contains_key(&h) {
                dist.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    dist
}

pub fn run(ctx: &Context, params: &GrowthParams) -> Result<SuiteOutput, HarnessError> {
    let model = ctx.model(&params.model)?;
    let bfs = bfs_distances(&model, params.radius);
    let mut bfs_spheres = vec![0u128; params.radius as usize + 1];
    for &d in bfs.values() {
        bfs_spheres[d as usize] += 1;
    }
    let mut table = Table::new("growth", HEADER);
    let mut ball_bfs = 0u128;
    for r in 0..=params.radius {
        let formula = model.sphere_size(r);
        let mut enumerated = 0u128;
        let mut lengths_ok = true;
        for g in model.sphere_iter(r)? {
            enumerated += 1;
            lengths_ok &= model.word_length(&g) == r && bfs.get(&g) == Some(&r);
        }
        ball_bfs += bfs_spheres[r as usize];
        let ball = model.ball_size(r)?;
        let ok = lengths_ok && formula == enumerated && formula == bfs_spheres[r as usize] && ball == ball_bfs;
        table.push(
            vec![
                params.model.clone(),
                r.to_string(),
                formula.to_string(),
                enumerated.to_string(),
                bfs_spheres[r as usize].to_string(),
                ball.to_string(),
                ball_bfs.to_string(),
                ok_str(lengths_ok),
                ok_str(ok),
            ],
            ok,
        );
    }
    let mut notes = Vec::new();
    if let Some(d) = params.growth_degree {
        let k = model.growth_constant(d, params.radius.max(1))?;
        notes.push(format!("{}: max β(r)/r^{d} over 1..={} is {}", params.model, params.radius.max(1), wbar::chain::format_coeff(&k)));
    }
    Ok(SuiteOutput { tables: vec![table], files: Vec::new(), notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn bfs_matches_closed_forms() {
        let m = Arc::new(GroupModel::free(2).unwrap());
        let d = bfs_distances(&m, 3);
        assert_eq!(d.len(), 53);
        let ctx = Context { seed: 0, cap: 1_000_000 };
        for model in ["free:2", "abelian:2", "cyclic:7", "product:[free:1,cyclic:3]"] {
            let out = run(&ctx, &GrowthParams { model: model.into(), radius: 5, growth_degree: None }).unwrap();
            assert_eq!(out.violations(), 0, "{model}");
            assert_eq!(out.trials(), 6);
        }
    }
}
