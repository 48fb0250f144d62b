//! The ten acceptance criteria, one pass/fail line each.
//!
//! Floating-point inequalities use a relative slack of `1e-9`; identities are
//! exact rational equality.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::One;
use rayon::prelude::*;
use wbar::f2::ALPHA;
use wbar::norms::{comparison_exponent, verify_pushforward_estimate, weighted_l1_exact, weighted_norm, ZETA_2};
use wbar::{
    Chain, Coeff, DiffusionOperator, Exponent, F2Construction, GroupElement, GroupHomomorphism, GroupModel,
    NormParams, Simplex,
};
use wbar_harness::random::{trial_rng, ChainSampler, RandomChainSpec};

const SLACK: f64 = 1e-9;
const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + SLACK)
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= SLACK * a.abs().max(b.abs())
}

fn model(s: &str) -> Arc<GroupModel> {
    Arc::new(match s {
        "free:2" => GroupModel::free(2).unwrap(),
        "abelian:1" => GroupModel::free_abelian(1).unwrap(),
        "abelian:2" => GroupModel::free_abelian(2).unwrap(),
        "cyclic:5" => GroupModel::cyclic(5).unwrap(),
        "cyclic:7" => GroupModel::cyclic(7).unwrap(),
        _ => unreachable!(),
    })
}

fn exp(s: &str) -> Exponent {
    s.parse().unwrap()
}

fn samples(m: &Arc<GroupModel>, spec: RandomChainSpec, count: usize, stream: u64) -> Vec<Chain> {
    let sampler = ChainSampler::new(m.clone(), spec).unwrap();
    (0..count)
        .into_par_iter()
        .map(|i| sampler.sample(&mut trial_rng(SEED, (stream << 20) + i as u64)).unwrap())
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_boundary_squared() -> Outcome {
    let mut n = 0;
    for (mi, m) in ["free:2", "abelian:2"].into_iter().enumerate() {
        let m = model(m);
        for degree in [2, 3] {
            let chains = samples(&m, RandomChainSpec::new(degree, 50, 3), 500, (mi * 4 + degree) as u64);
            let bad = chains.par_iter().filter(|c| !c.boundary().unwrap().boundary().unwrap().is_zero()).count();
            ensure(bad == 0, || format!("{m} degree {degree}: {bad} chains with ∂∂ ≠ 0"))?;
            n += chains.len();
        }
    }
    Ok(format!("{n} chains"))
}

/// `B` from its definition, with the annulus filtered out of a ball.
fn oracle_cone(c: &Chain, big_n: u32, annuli: &mut BTreeMap<u64, Vec<GroupElement>>) -> Chain {
    let m = c.model().clone();
    let mut out = Chain::zero(m.clone(), c.degree() + 1);
    for (s, a) in c.iter() {
        let r = s.diameter(&m);
        let zs = annuli.entry(r).or_insert_with(|| {
            if r == 0 {
                return vec![m.identity()];
            }
            let upper = r.pow(big_n);
            let lower = upper as f64 - (r as f64).powf(big_n as f64 / 10.0);
            m.ball(upper).unwrap().into_iter().filter(|g| m.word_length(g) as f64 > lower).collect()
        });
        let w = a.clone() / Coeff::from_integer(zs.len().into());
        for z in zs.iter() {
            let zi = m.inverse(z);
            let rest: Vec<GroupElement> = s.vertices().iter().map(|g| m.multiply(&zi, g).unwrap()).collect();
            out.add_term(Simplex::new(std::iter::once(zi).chain(rest)), w.clone()).unwrap();
        }
    }
    out
}

fn c2_homotopy() -> Outcome {
    let m = model("free:2");
    let op = DiffusionOperator::new(m.clone(), 2).unwrap();
    let mut annuli = BTreeMap::new();
    let mut n = 0;
    // 100 chains per degree; degree-2 chains carry one simplex since a
    // diameter-3 simplex alone cones to 34992 terms
    for (degree, support) in [(1, 2), (2, 1)] {
        let spec = RandomChainSpec::new(degree, support, 3).max_diameter(3);
        for (i, c) in samples(&m, spec, 100, 10 + degree as u64).into_iter().enumerate() {
            let h = op.homotopy(&c).map_err(|e| e.to_string())?;
            let rhs = match &h.cone_of_boundary {
                Some(b) => h.boundary_of_cone.add(b).unwrap(),
                None => h.boundary_of_cone.clone(),
            };
            ensure(c.sub(&h.e).unwrap() == rhs, || format!("c - E(c) ≠ ∂B(c) + B(∂c) for {}", c.to_json()))?;
            if i < 3 {
                let cone = oracle_cone(&c, 2, &mut annuli);
                ensure(cone == h.cone, || format!("B differs from its definition on {}", c.to_json()))?;
                let dc = c.boundary().unwrap();
                let b_dc = if dc.is_zero() { Chain::zero(m.clone(), degree) } else { oracle_cone(&dc, 2, &mut annuli) };
                let e = c.sub(&cone.boundary().unwrap()).unwrap().sub(&b_dc).unwrap();
                ensure(e == h.e, || format!("E differs from id - ∂B - B∂ on {}", c.to_json()))?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} chains, N = 2"))
}

fn c3_diffusion_bound() -> Outcome {
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for (name, spec, stream) in [
        ("free:2", RandomChainSpec::new(1, 4, 2).max_diameter(2), 20),
        ("abelian:2", RandomChainSpec::new(1, 4, 3), 21),
    ] {
        let m = model(name);
        let chains = samples(&m, spec, 100, stream);
        for big_n in [2u32, 3] {
            let op = DiffusionOperator::new(m.clone(), big_n).unwrap();
            for c in &chains {
                let b = op.cone(c).unwrap();
                for n in 0..=2u32 {
                    for p in ["3/2", "2", "3"] {
                        let p = exp(p);
                        let lhs = weighted_norm(&b, NormParams::new(n, p));
                        let rhs = 2f64.powf(n as f64 / p.as_f64()) * weighted_norm(c, NormParams::new(big_n * n, p));
                        ensure(le(lhs, rhs), || format!("{name} N={big_n} n={n} p={p}: {lhs} > {rhs}"))?;
                        worst = worst.max(lhs / rhs);
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} inequalities, max ratio {worst:.4}"))
}

fn c4_comparison() -> Outcome {
    let mut checks = 0;
    for (name, d, k_expected) in [("abelian:1", 1u32, 3i64), ("abelian:2", 2, 5)] {
        let m = model(name);
        let k_growth = m.growth_constant(d, 60).unwrap();
        ensure(k_growth == Coeff::from_integer(k_expected.into()), || format!("{name}: K = {k_growth}"))?;
        let kf = k_expected as f64;
        for k in [1u32, 2] {
            let chains = samples(&m, RandomChainSpec::new(k as usize, 10, 6).non_degenerate(), 50, 30 + k as u64 + 2 * d as u64);
            for n in [0u32, 1] {
                for (p, q) in [("1", "2"), ("2", "4"), ("2", "inf")] {
                    let (p, q) = (exp(p), exp(q));
                    let (ip, iq) = (1.0 / p.as_f64(), if q.is_infinite() { 0.0 } else { 1.0 / q.as_f64() });
                    let m_exp = if q.is_infinite() {
                        ((k * d + n + 2) as f64 / p.as_f64()).ceil() as u32
                    } else {
                        (q.as_f64() * ((k * d + 2) as f64 * (ip - iq) + n as f64 * ip)).ceil() as u32
                    };
                    let m_lib = comparison_exponent(k, n, p, q, d).unwrap();
                    ensure(m_lib == m_exp as u64, || format!("m = {m_lib}, expected {m_exp}"))?;
                    let constant = (kf.powi(k as i32) * ZETA_2).powf(ip - iq);
                    for c in &chains {
                        let lhs = weighted_norm(c, NormParams::new(n, p));
                        let rhs = constant * weighted_norm(c, NormParams::new(m_exp, q));
                        ensure(le(lhs, rhs), || format!("{name} k={k} n={n} p={p} q={q}: {lhs} > {rhs}"))?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} inequalities"))
}

fn c5_functoriality() -> Outcome {
    let mut checks = 0;
    for (src, tgt, images, stream) in [("abelian:2", "abelian:1", "1;0", 40), ("abelian:1", "cyclic:5", "1", 41)] {
        let phi = GroupHomomorphism::parse(model(src), model(tgt), images).unwrap();
        let cert = phi.kernel_certificate(1, 50).unwrap();
        let phi = phi.with_certificate(cert);
        let chains = samples(phi.source(), RandomChainSpec::new(1, 8, 6).non_degenerate(), 100, stream);
        for c in &chains {
            let image = phi.push_forward(c).unwrap();
            for n in 0..=2 {
                let (l, r) = (weighted_l1_exact(&image, n), weighted_l1_exact(c, n));
                ensure(l <= r, || format!("{src}→{tgt} n={n}: {l} > {r}"))?;
                checks += 1;
                for p in ["1", "2", "3", "inf"] {
                    let rep = verify_pushforward_estimate(&phi, c, n, exp(p)).unwrap();
                    ensure(rep.estimate.ok, || format!("{src}→{tgt} n={n} p={p}: {:?}", rep.estimate))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} estimates"))
}

fn c6_levels() -> Outcome {
    let f = F2Construction::build(6).map_err(|e| e.to_string())?;
    for d in 0..=6 {
        let level = f.level(d).unwrap();
        let distinct: std::collections::HashSet<_> = level.words().iter().collect();
        ensure(level.len() == 4usize.pow(d as u32) && distinct.len() == level.len(), || format!("|W({d})| = {}", level.len()))?;
        ensure(level.words().iter().all(|w| w.iter().all(|&l| l % 2 == 0)), || format!("W({d}) has inverse letters"))?;
        let markers: std::collections::HashSet<_> = level.markers().iter().collect();
        ensure(markers.len() == level.len(), || format!("markers of W({d}) collide"))?;
    }
    Ok("levels 0..=6".into())
}

fn c7_telescoping() -> Outcome {
    let f = F2Construction::build(6).map_err(|e| e.to_string())?;
    let m = f.model().clone();
    for top in 0..=5 {
        let b = f.partial_sum_b(top).unwrap();
        let mut expected = Chain::zero(m.clone(), 1);
        expected.add_term(Simplex::new([GroupElement::Word([ALPHA].into_iter().collect())]), Coeff::one()).unwrap();
        let next = f.level(top + 1).unwrap();
        let weight = Coeff::new(1.into(), (1u64 << (top + 1)).into());
        for (y, &eps) in next.words().iter().zip(next.signs()) {
            let a = if eps > 0 { -weight.clone() } else { weight.clone() };
            expected.add_term(Simplex::new([GroupElement::Word(y.clone())]), a).unwrap();
        }
        ensure(b.boundary().unwrap() == expected, || format!("telescoping fails at D = {top}"))?;
        if top == 5 {
            ensure(b.len() == 2730, || format!("|supp b(5)| = {}", b.len()))?;
        }
    }
    Ok("D = 0..=5, |supp b(5)| = 2730".into())
}

fn c8_decay() -> Outcome {
    let f = F2Construction::build(7).map_err(|e| e.to_string())?;
    let b: Vec<Chain> = (0..=6).map(|d| f.partial_sum_b(d).unwrap()).collect();
    let norms = |p: &str| -> Vec<(f64, f64)> {
        let at = NormParams::new(0, exp(p));
        (1..=6)
            .map(|d| {
                let inc = b[d].sub(&b[d - 1]).unwrap();
                let tail = b[d].boundary().unwrap().sub(&f.target()).unwrap();
                (weighted_norm(&inc, at), weighted_norm(&tail, at))
            })
            .collect()
    };
    let three = norms("3");
    for (i, &(inc, tail)) in three.iter().enumerate() {
        let d = i as i32 + 1;
        let envelope = (2.0 * 4f64.powi(d)).powf(1.0 / 3.0) / 2f64.powi(d + 1);
        ensure(rel_eq(inc, envelope), || format!("p=3 D={d}: {inc} vs {envelope}"))?;
        if i > 0 {
            ensure(inc < three[i - 1].0 && tail < three[i - 1].1, || format!("p=3 not decreasing at D={d}"))?;
        }
    }
    let two = norms("2");
    for (i, &(inc, _)) in two.iter().enumerate() {
        ensure(rel_eq(inc, two[0].0), || format!("p=2 increment at D={} is {inc}, at D=1 {}", i + 1, two[0].0))?;
    }
    Ok(format!("p=3 decreasing to {:.4}, p=2 flat at {:.4}", three[5].0, two[0].0))
}

fn bfs(m: &GroupModel, radius: u64) -> HashMap<GroupElement, u64> {
    let mut dist = HashMap::from([(m.identity(), 0)]);
    let mut queue = VecDeque::from([m.identity()]);
    while let Some(g) = queue.pop_front() {
        let d = dist[&g];
        if d == radius {
            continue;
        }
        for s in m.generators() {
            let h = m.multiply(&g, &s).unwrap();
            dist.entry(h.clone()).or_insert_with(|| {
                queue.push_back(h);
                d + 1
            });
        }
    }
    dist
}

fn c9_metric() -> Outcome {
    let mut elements = 0;
    for (name, radius) in [("free:2", 6), ("abelian:2", 12), ("cyclic:7", 7)] {
        let m = model(name);
        let dist = bfs(&m, radius);
        let mut spheres: BTreeMap<u64, u128> = BTreeMap::new();
        for (g, &d) in &dist {
            ensure(m.word_length(g) == d, || format!("{name}: |{}| ≠ {d}", m.format_element(g)))?;
            *spheres.entry(d).or_default() += 1;
        }
        for r in 0..=radius {
            let s = spheres.get(&r).copied().unwrap_or(0);
            ensure(m.sphere_size(r) == s, || format!("{name}: sphere({r}) = {} vs {s}", m.sphere_size(r)))?;
            ensure(m.sphere(r).unwrap().len() as u128 == s, || format!("{name}: enumerated sphere({r})"))?;
        }
        ensure(m.ball(radius).unwrap().len() == dist.len(), || format!("{name}: ball({radius})"))?;
        elements += dist.len();
    }
    Ok(format!("{elements} elements"))
}

fn run_all(out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_wbar"))
        .args(["all", "--seed", "42", "--out"])
        .arg(out)
        .env_remove("WBAR_ENUM_CAP")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("wbar all exited with {}", status.status))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut bytes = std::fs::read(&path).unwrap();
        if name == "summary.json" {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            for s in v.as_array_mut().unwrap() {
                s.as_object_mut().unwrap().remove("wall_time_ms");
            }
            bytes = serde_json::to_vec(&v).unwrap();
        }
        files.insert(name, bytes);
    }
    files
}

fn c10_reproducible() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_all(a.path())?;
    run_all(b.path())?;
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    ensure(sa.keys().eq(sb.keys()), || "different file sets".into())?;
    for (name, bytes) in &sa {
        ensure(sb[name] == *bytes, || format!("{name} differs"))?;
    }
    Ok(format!("{} files identical", sa.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("boundary squares to zero", c1_boundary_squared, 10),
        ("exact homotopy identity", c2_homotopy, 60),
        ("explicit diffusion bound", c3_diffusion_bound, 120),
        ("polynomial-growth comparison", c4_comparison, 60),
        ("functoriality estimates", c5_functoriality, 60),
        ("F2 level construction", c6_levels, 30),
        ("exact telescoping", c7_telescoping, 30),
        ("decay above p = 2", c8_decay, 30),
        ("metric oracles", c9_metric, 30),
        ("reproducible reports", c10_reproducible, 600),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => Err(format!("{detail}; over the {budget} s budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({:.2} s): {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({:.2} s): {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
