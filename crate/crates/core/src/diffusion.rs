//! Diffusion annuli, the diffusion cone operator `B` and the chain map
//! `E = id - ∂B - B∂`.
//!
//! The annulus of radius `r` is `Z̄_r = {g : r^N - r^{N/10} < |g| <= r^N}`;
//! a simplex of diameter `r` is coned over `Z̄_r`:
//!
//! ```text
//! B[e, g_1, ..., g_k] = 1/|Z̄_r| Σ_{z ∈ Z̄_r} [z, e, g_1, ..., g_k]
//! ```
//!
//! and `[z, e, g_1, ...]` is stored re-based as `[e, z^{-1}, z^{-1} g_1, ...]`.
//! `Z̄_0` is `{e}`, so degenerate simplices are coned on the identity.

use std::ops::RangeInclusive;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::chain::{Chain, Coeff, Simplex};
use crate::error::{DiffusionError, GroupError};
use crate::group::{GroupElement, GroupModel};
use crate::norms::{holds, ratio, weighted_norm, Exponent, NormParams};

/// Annulus degree `N` with an element cap and a per-radius memo.
#[derive(Debug)]
pub struct AnnuliConfig {
    degree: u32,
    cap: u64,
    memo: RwLock<FxHashMap<u64, Arc<Vec<GroupElement>>>>,
}

impl AnnuliConfig {
    pub fn new(degree: u32, cap: u64) -> Result<Self, DiffusionError> {
        if degree == 0 {
            return Err(DiffusionError::InvalidDegree);
        }
        Ok(AnnuliConfig { degree, cap, memo: RwLock::new(FxHashMap::default()) })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// The degree used in the convergence argument is `N > 10`.
    pub fn is_conforming(&self) -> bool {
        self.degree > 10
    }

    /// The word lengths in `Z̄_r`, as an inclusive range.
    pub fn length_range(&self, r: u64) -> Result<RangeInclusive<u64>, DiffusionError> {
        if r == 0 {
            return Ok(0..=0);
        }
        let overflow = || DiffusionError::RadiusOverflow { radius: r, degree: self.degree };
        let upper = r.checked_pow(self.degree).ok_or_else(overflow)?;
        // w = r^{N/10}; L > upper - w  iff  L >= upper - ⌈w⌉ + 1, with ⌈w⌉ found exactly
        let target = num_traits::pow(BigInt::from(r), self.degree as usize);
        let tenth = |c: u64| num_traits::pow(BigInt::from(c), 10);
        let mut ceil_w = (r as f64).powf(self.degree as f64 / 10.0).round() as u64;
        while tenth(ceil_w) < target {
            ceil_w += 1;
        }
        while ceil_w > 0 && tenth(ceil_w - 1) >= target {
            ceil_w -= 1;
        }
        let lower = (upper + 1).saturating_sub(ceil_w).max(1);
        Ok(lower..=upper)
    }
}

/// Whether the annuli for `radii` have pairwise disjoint length ranges.
pub fn annuli_disjoint(config: &AnnuliConfig, radii: &[u64]) -> Result<bool, DiffusionError> {
    let mut ranges: Vec<(u64, RangeInclusive<u64>)> = Vec::new();
    let mut sorted = radii.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for r in sorted {
        ranges.push((r, config.length_range(r)?));
    }
    Ok(ranges.windows(2).all(|w| w[0].1.end() < w[1].1.start()))
}

/// The diffusion cone operator for one group model.
#[derive(Debug)]
pub struct DiffusionOperator {
    model: Arc<GroupModel>,
    config: AnnuliConfig,
}

/// `B(c)`, `∂B(c)`, `B(∂c)` and `E(c)` for one chain.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub cone: Chain,
    pub boundary_of_cone: Chain,
    /// `None` in degree 0, where `∂c := 0`.
    pub cone_of_boundary: Option<Chain>,
    pub e: Chain,
}

impl DiffusionOperator {
    pub fn new(model: Arc<GroupModel>, degree: u32) -> Result<Self, DiffusionError> {
        let cap = model.cap();
        Ok(DiffusionOperator { model, config: AnnuliConfig::new(degree, cap)? })
    }

    pub fn with_cap(model: Arc<GroupModel>, degree: u32, cap: u64) -> Result<Self, DiffusionError> {
        Ok(DiffusionOperator { model, config: AnnuliConfig::new(degree, cap)? })
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn config(&self) -> &AnnuliConfig {
        &self.config
    }

    /// An upper bound on `|Z̄_r|` from sphere sizes.
    pub fn annulus_size_bound(&self, r: u64) -> Result<u128, DiffusionError> {
        Ok(self.config.length_range(r)?.map(|l| self.model.sphere_size(l)).fold(0u128, u128::saturating_add))
    }

    /// `Z̄_r`, memoized.
    pub fn annulus(&self, r: u64) -> Result<Arc<Vec<GroupElement>>, DiffusionError> {
        if let Some(z) = self.config.memo.read().expect("annulus memo poisoned").get(&r) {
            return Ok(z.clone());
        }
        let elements = if r == 0 {
            vec![self.model.identity()]
        } else {
            let bound = self.annulus_size_bound(r)?;
            if bound > self.config.cap as u128 {
                return Err(GroupError::EnumerationTooLarge { bound, cap: self.config.cap }.into());
            }
            let mut out = Vec::with_capacity(bound as usize);
            for l in self.config.length_range(r)? {
                if self.model.sphere_size(l) > 0 {
                    out.extend(self.model.sphere_iter(l)?);
                }
            }
            out
        };
        if elements.is_empty() {
            return Err(DiffusionError::EmptyAnnulus { radius: r });
        }
        let elements = Arc::new(elements);
        let mut memo = self.config.memo.write().expect("annulus memo poisoned");
        Ok(memo.entry(r).or_insert(elements).clone())
    }

    /// `Z_g = Z̄_{diam g}`.
    pub fn cone_points(&self, s: &Simplex) -> Result<Arc<Vec<GroupElement>>, DiffusionError> {
        self.annulus(s.diameter(&self.model))
    }

    /// `[z, e, g_1, ..., g_k]` re-based to `[e, z^{-1}, z^{-1} g_1, ...]`.
    pub fn coned_simplex(&self, z: &GroupElement, s: &Simplex) -> Simplex {
        let zi = self.model.inverse(z);
        let rest: Vec<GroupElement> = s.vertices().iter().map(|g| self.model.mul(&zi, g)).collect();
        Simplex::new(std::iter::once(zi).chain(rest))
    }

    /// The diffusion cone operator `B`.
    pub fn cone(&self, c: &Chain) -> Result<Chain, DiffusionError> {
        let terms = c.sorted_terms();
        let mut radii: Vec<u64> = terms.iter().map(|(s, _)| s.diameter(&self.model)).collect();
        radii.sort_unstable();
        radii.dedup();
        for &r in &radii {
            self.annulus(r)?;
        }
        let pieces: Vec<Vec<(Simplex, Coeff)>> = terms
            .par_iter()
            .map(|(s, a)| {
                let zs = self.cone_points(s)?;
                let coeff = (*a).clone() / BigRational::from_integer(BigInt::from(zs.len()));
                Ok(zs.iter().map(|z| (self.coned_simplex(z, s), coeff.clone())).collect())
            })
            .collect::<Result<_, DiffusionError>>()?;
        let mut out = Chain::zero(self.model.clone(), c.degree() + 1);
        for piece in pieces {
            for (s, a) in piece {
                out.accumulate(s, &a);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `B(c)`, `∂B(c)`, `B(∂c)` and `E(c) = c - ∂B(c) - B(∂c)`.
    pub fn homotopy(&self, c: &Chain) -> Result<Homotopy, DiffusionError> {
        let cone = self.cone(c)?;
        let boundary_of_cone = cone.boundary()?;
        let mut e = c.sub(&boundary_of_cone)?;
        let cone_of_boundary = if c.degree() == 0 {
            None
        } else {
            let b = self.cone(&c.boundary()?)?;
            e = e.sub(&b)?;
            Some(b)
        };
        Ok(Homotopy { cone, boundary_of_cone, cone_of_boundary, e })
    }

    /// `E(c) = c - ∂B(c) - B(∂c)`.
    pub fn chain_map_e(&self, c: &Chain) -> Result<Chain, DiffusionError> {
        Ok(self.homotopy(c)?.e)
    }

    /// Checks the accumulation-control statements over the coned support of `c`:
    ///
    /// * (a) faces `[z, e, g_1, .., ĝ_j, .., g_k]` shared by coned simplices
    ///   force equal cone points and equal source diameters;
    /// * (b) `diam [z, e, g_1, ..., g_k] <= 2 diam(g)^N`.
    ///
    /// Collisions of the faces `[z, g_1, ..., g_k]` with different source
    /// diameters are counted but do not affect `ok`: that statement needs the
    /// annuli to be separated by more than the diameters, which small `N`
    /// does not give.
    pub fn check_accumulation(&self, c: &Chain) -> Result<AccumulationReport, DiffusionError> {
        let model = &self.model;
        let n = self.config.degree;
        let mut report = AccumulationReport {
            source_simplices: c.len(),
            coned_simplices: 0,
            face_collisions: 0,
            face_violations: Vec::new(),
            diameter_violations: Vec::new(),
            translate_collisions: 0,
            translate_mismatches: 0,
            ok: true,
        };
        // absolute vertex tuple of a face -> (cone point, source diameter)
        let mut faces: FxHashMap<Vec<GroupElement>, (GroupElement, u64)> = FxHashMap::default();
        let mut translates: FxHashMap<Vec<GroupElement>, u64> = FxHashMap::default();
        let e = model.identity();
        for (s, _) in c.sorted_terms() {
            let d = s.diameter(model);
            let bound = (d as u128).checked_pow(n).map(|x| 2 * x).unwrap_or(u128::MAX);
            for z in self.cone_points(s)?.iter() {
                report.coned_simplices += 1;
                let mut vertices = Vec::with_capacity(s.degree() + 2);
                vertices.push(z.clone());
                vertices.push(e.clone());
                vertices.extend(s.vertices().iter().cloned());
                let coned_diam = model.diameter(self.coned_simplex(z, s).vertices()) as u128;
                if coned_diam > bound {
                    report.diameter_violations.push(format!(
                        "{} coned at {}: diameter {coned_diam} > {bound}",
                        format_tuple(model, s.vertices()),
                        model.format_element(z)
                    ));
                }
                for j in 2..vertices.len() {
                    let mut face = vertices.clone();
                    face.remove(j);
                    match faces.get(&face) {
                        Some((w, dh)) => {
                            report.face_collisions += 1;
                            if w != z || *dh != d {
                                report.face_violations.push(format!(
                                    "face {} from diameters {dh} and {d}",
                                    format_tuple(model, &face)
                                ));
                            }
                        }
                        None => {
                            faces.insert(face, (z.clone(), d));
                        }
                    }
                }
                let mut translate = vertices;
                translate.remove(1);
                match translates.get(&translate) {
                    Some(dh) => {
                        report.translate_collisions += 1;
                        if *dh != d {
                            report.translate_mismatches += 1;
                        }
                    }
                    None => {
                        translates.insert(translate, d);
                    }
                }
            }
        }
        report.ok = report.face_violations.is_empty() && report.diameter_violations.is_empty();
        Ok(report)
    }

    /// Checks `‖B(c)‖_{n,p} <= 2^{n/p} ‖c‖_{Nn,p}` (`2^n` at `p = ∞`) and
    /// reports, without asserting, the ratios of `‖B c‖`, `‖c - ∂B c‖` and
    /// `‖E c‖` in weight `n` against `‖c‖_{m,p}` / `‖c‖_{m,q}` (+ `‖∂c‖_{m,q}`).
    pub fn estimate_report(
        &self,
        c: &Chain,
        n: u32,
        p: Exponent,
        q: Exponent,
        m: u32,
    ) -> Result<DiffusionEstimateReport, DiffusionError> {
        if p >= q {
            return Err(crate::error::NormError::ExponentOrder { p: p.to_string(), q: q.to_string() }.into());
        }
        let h = self.homotopy(c)?;
        self.estimate_from(c, &h, n, p, q, m)
    }

    /// [`estimate_report`](Self::estimate_report) with a precomputed [`Homotopy`] of `c`.
    pub fn estimate_from(
        &self,
        c: &Chain,
        h: &Homotopy,
        n: u32,
        p: Exponent,
        q: Exponent,
        m: u32,
    ) -> Result<DiffusionEstimateReport, DiffusionError> {
        if p >= q {
            return Err(crate::error::NormError::ExponentOrder { p: p.to_string(), q: q.to_string() }.into());
        }
        let at = |w: u32, e: Exponent| NormParams::new(w, e);
        let bn = weighted_norm(&h.cone, at(n, p));
        let constant = match p {
            Exponent::Infinity => 2f64.powi(n as i32),
            _ => 2f64.powf(n as f64 / p.as_f64()),
        };
        let rhs = constant * weighted_norm(c, at(self.config.degree * n, p));
        let c_mq = weighted_norm(c, at(m, q));
        let dc_mq = if c.degree() == 0 { 0.0 } else { weighted_norm(&c.boundary()?, at(m, q)) };
        let id_minus = c.sub(&h.boundary_of_cone)?;
        Ok(DiffusionEstimateReport {
            degree_n: self.config.degree,
            conforming: self.config.is_conforming(),
            weight: n,
            p,
            q,
            m,
            cone_norm: bn,
            cone_bound: rhs,
            cone_constant: constant,
            ok: holds(bn, rhs),
            cone_pp_ratio: ratio(bn, weighted_norm(c, at(m, p))),
            cone_pq_ratio: ratio(bn, c_mq),
            id_minus_boundary_cone_ratio: ratio(weighted_norm(&id_minus, at(n, p)), c_mq),
            e_ratio: ratio(weighted_norm(&h.e, at(n, p)), c_mq + dc_mq),
        })
    }
}

fn format_tuple(model: &GroupModel, v: &[GroupElement]) -> String {
    let parts: Vec<String> = v.iter().map(|g| model.format_element(g)).collect();
    format!("[{}]", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccumulationReport {
    pub source_simplices: usize,
    pub coned_simplices: usize,
    pub face_collisions: usize,
    pub face_violations: Vec<String>,
    pub diameter_violations: Vec<String>,
    pub translate_collisions: usize,
    pub translate_mismatches: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffusionEstimateReport {
    pub degree_n: u32,
    pub conforming: bool,
    pub weight: u32,
    pub p: Exponent,
    pub q: Exponent,
    pub m: u32,
    /// `‖B c‖_{n,p}`
    pub cone_norm: f64,
    /// `2^{n/p} ‖c‖_{Nn,p}`
    pub cone_bound: f64,
    pub cone_constant: f64,
    pub ok: bool,
    /// `‖B c‖_{n,p} / ‖c‖_{m,p}`
    pub cone_pp_ratio: f64,
    /// `‖B c‖_{n,p} / ‖c‖_{m,q}`
    pub cone_pq_ratio: f64,
    /// `‖c - ∂B c‖_{n,p} / ‖c‖_{m,q}`
    pub id_minus_boundary_cone_ratio: f64,
    /// `‖E c‖_{n,p} / (‖c‖_{m,q} + ‖∂c‖_{m,q})`
    pub e_ratio: f64,
}
