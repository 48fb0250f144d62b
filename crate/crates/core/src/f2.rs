//! The explicit 2-chains over `F_2 = <α, β>` whose boundaries converge to
//! `[e, α]` in every `‖·‖_{n,p}` with `p > 2`.
//!
//! With `s_d = α^d β^d` and `t_d = β^d α^d`, the level sets are `W(0) = {α}`
//! and, for `x ∈ W(d)` with marker `m(x)`,
//!
//! ```text
//! W(d+1) ∋ x m(x) s_{d+1},  m(x) s_{d+1},  x m(x) t_{d+1},  m(x) t_{d+1}
//! ```
//!
//! with signs `ε(x m s) = ε(x m t) = ε(x)` and `ε(m s) = ε(m t) = -ε(x)`,
//! `ε(α) = 1`. The simplices are `s(x) = [e, x, x m(x) s_{d+1}]` and
//! `t(x) = [e, x, x m(x) t_{d+1}]`, and
//!
//! ```text
//! b(D) = Σ_{d <= D} Σ_{x ∈ W(d)} ε(x) / 2^{d+1} (s(x) + t(x)),
//! ∂b(D) = [e, α] - Σ_{y ∈ W(D+1)} ε(y) / 2^{D+1} [e, y].
//! ```
//!
//! Children of `x ∈ W(d)` use the suffix index `d + 1`, so both families of
//! edges produced by `∂(s(x) + t(x))` are level-`(d+1)` words.
//!
//! Markers are canonical: `W(d)` is sorted shortlex and its `i`-th word is
//! marked by the binary expansion of `i` in `2d` letters (`α = 0`, `β = 1`).

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::chain::{Chain, Coeff, Simplex};
use crate::error::F2Error;
use crate::group::{GroupElement, GroupModel, Letter, Word};
use crate::norms::{holds, weighted_norm, Exponent, NormParams};

pub const ALPHA: Letter = 0;
pub const BETA: Letter = 2;

/// Default cap on the highest built level; `W(9)` has `4^9` words.
pub const DEFAULT_LEVEL_CAP: usize = 9;

fn word(letters: impl IntoIterator<Item = Letter>) -> Word {
    letters.into_iter().collect()
}

fn concat(parts: &[&[Letter]]) -> Word {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// `(s_d, t_d) = (α^d β^d, β^d α^d)`.
pub fn suffixes(d: usize) -> (Word, Word) {
    let a = std::iter::repeat_n(ALPHA, d);
    let b = std::iter::repeat_n(BETA, d);
    (word(a.clone().chain(b.clone())), word(b.chain(a)))
}

/// The binary expansion of `i` in `len` letters, most significant first.
fn marker_word(i: usize, len: usize) -> Word {
    (0..len).rev().map(|bit| if (i >> bit) & 1 == 1 { BETA } else { ALPHA }).collect()
}

fn shortlex(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// `W(d)` in shortlex order with markers and signs.
#[derive(Clone, Debug)]
pub struct LevelData {
    level: usize,
    words: Vec<Word>,
    markers: Vec<Word>,
    signs: Vec<i8>,
    index: FxHashMap<Word, usize>,
}

impl LevelData {
    fn from_signed(level: usize, mut signed: Vec<(Word, i8)>) -> Self {
        signed.sort_by(|a, b| shortlex(&a.0, &b.0));
        let markers = (0..signed.len()).map(|i| marker_word(i, 2 * level)).collect();
        let index = signed.iter().enumerate().map(|(i, (w, _))| (w.clone(), i)).collect();
        let (words, signs) = signed.into_iter().unzip();
        LevelData { level, words, markers, signs, index }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The words of `W(d)` in shortlex order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn markers(&self) -> &[Word] {
        &self.markers
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn position(&self, x: &Word) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn marker(&self, x: &Word) -> Option<&Word> {
        self.position(x).map(|i| &self.markers[i])
    }

    pub fn sign(&self, x: &Word) -> Option<i8> {
        self.position(x).map(|i| self.signs[i])
    }

    pub fn markers_injective(&self) -> bool {
        let mut m = self.markers.clone();
        m.sort();
        m.dedup();
        m.len() == self.markers.len()
    }
}

/// One row of the level table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub size: usize,
    pub expected_size: u64,
    pub min_length: usize,
    pub max_length: usize,
    /// `1 + 2d²`, the bound `1 + Σ_{j<=d} (4j - 2)`.
    pub length_bound: usize,
    pub positive_words: bool,
    pub markers_injective: bool,
    pub positive_signs: usize,
}

/// The levels `W(0), ..., W(D)`.
#[derive(Clone, Debug)]
pub struct F2Construction {
    model: Arc<GroupModel>,
    levels: Vec<LevelData>,
}

impl F2Construction {
    /// Builds `W(0), ..., W(top)` with the default cap.
    pub fn build(top: usize) -> Result<Self, F2Error> {
        Self::build_with_cap(top, DEFAULT_LEVEL_CAP)
    }

    pub fn build_with_cap(top: usize, cap: usize) -> Result<Self, F2Error> {
        if top > cap {
            return Err(F2Error::CapExceeded { levels: top, cap });
        }
        let model = Arc::new(GroupModel::free(2).expect("rank 2"));
        let mut levels = vec![LevelData::from_signed(0, vec![(word([ALPHA]), 1)])];
        for d in 0..top {
            let next = Self::children(&levels[d])?;
            levels.push(next);
        }
        Ok(F2Construction { model, levels })
    }

    fn children(parent: &LevelData) -> Result<LevelData, F2Error> {
        let d = parent.level;
        let (s, t) = suffixes(d + 1);
        let mut seen: FxHashMap<Word, i8> = FxHashMap::default();
        seen.reserve(4 * parent.len());
        let mut out = Vec::with_capacity(4 * parent.len());
        for ((x, m), &eps) in parent.words.iter().zip(&parent.markers).zip(&parent.signs) {
            for (child, sign) in [
                (concat(&[x, m, &s]), eps),
                (concat(&[m, &s]), -eps),
                (concat(&[x, m, &t]), eps),
                (concat(&[m, &t]), -eps),
            ] {
                if seen.insert(child.clone(), sign).is_some() {
                    return Err(F2Error::CollisionDetected { level: d + 1, word: format_word(&child) });
                }
                out.push((child, sign));
            }
        }
        Ok(LevelData::from_signed(d + 1, out))
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    /// The highest built level.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, d: usize) -> Result<&LevelData, F2Error> {
        self.levels.get(d).ok_or(F2Error::LevelNotBuilt { level: d })
    }

    pub fn summaries(&self) -> Vec<LevelSummary> {
        self.levels
            .iter()
            .map(|l| LevelSummary {
                level: l.level,
                size: l.len(),
                expected_size: 4u64.pow(l.level as u32),
                min_length: l.words.iter().map(|w| w.len()).min().unwrap_or(0),
                max_length: l.words.iter().map(|w| w.len()).max().unwrap_or(0),
                length_bound: 1 + 2 * l.level * l.level,
                positive_words: l.words.iter().all(|w| w.iter().all(|&c| c == ALPHA || c == BETA)),
                markers_injective: l.markers_injective(),
                positive_signs: l.signs.iter().filter(|&&e| e > 0).count(),
            })
            .collect()
    }

    /// `(s(x), t(x))` for `x ∈ W(d)`.
    pub fn cone_simplices(&self, d: usize, x: &Word) -> Result<(Simplex, Simplex), F2Error> {
        let level = self.level(d)?;
        let m = level.marker(x).ok_or(F2Error::LevelNotBuilt { level: d })?;
        Ok(self.cone_pair(d, x, m))
    }

    fn cone_pair(&self, d: usize, x: &Word, m: &Word) -> (Simplex, Simplex) {
        let (s, t) = suffixes(d + 1);
        let xg = GroupElement::Word(x.clone());
        (
            Simplex::new([xg.clone(), GroupElement::Word(concat(&[x, m, &s]))]),
            Simplex::new([xg, GroupElement::Word(concat(&[x, m, &t]))]),
        )
    }

    fn level_coefficient(d: usize, sign: i8) -> Coeff {
        let c = BigRational::new(BigInt::one(), BigInt::one() << (d + 1));
        if sign < 0 {
            -c
        } else {
            c
        }
    }

    /// `b(d) - b(d-1) = Σ_{x ∈ W(d)} ε(x) / 2^{d+1} (s(x) + t(x))`.
    pub fn level_terms(&self, d: usize) -> Result<Chain, F2Error> {
        let level = self.level(d)?;
        let mut c = Chain::zero(self.model.clone(), 2);
        for ((x, m), &eps) in level.words.iter().zip(&level.markers).zip(&level.signs) {
            let coeff = Self::level_coefficient(d, eps);
            let (s, t) = self.cone_pair(d, x, m);
            c.add_term_unchecked(s, coeff.clone());
            c.add_term_unchecked(t, coeff);
        }
        if c.len() != 2 * level.len() {
            return Err(F2Error::SupportMismatch { level: d, found: c.len(), expected: 2 * level.len() });
        }
        Ok(c)
    }

    /// `b(D)`, checked to have `2 Σ_{d<=D} 4^d` distinct simplices.
    pub fn partial_sum_b(&self, top: usize) -> Result<Chain, F2Error> {
        let mut b = Chain::zero(self.model.clone(), 2);
        let mut expected = 0;
        for d in 0..=top {
            let terms = self.level_terms(d)?;
            expected += terms.len();
            b = b.add(&terms)?;
        }
        if b.len() != expected {
            return Err(F2Error::SupportMismatch { level: top, found: b.len(), expected });
        }
        Ok(b)
    }

    /// `Σ_{y ∈ W(d)} ε(y) / 2^d [e, y]`.
    pub fn edge_sum(&self, d: usize) -> Result<Chain, F2Error> {
        let level = self.level(d)?;
        let mut c = Chain::zero(self.model.clone(), 1);
        for (y, &eps) in level.words.iter().zip(&level.signs) {
            let coeff = Self::level_coefficient(d, eps) * BigRational::from_integer(2.into());
            c.add_term_unchecked(Simplex::new([GroupElement::Word(y.clone())]), coeff);
        }
        Ok(c)
    }

    /// `[e, α]`.
    pub fn target(&self) -> Chain {
        Chain::basis(self.model.clone(), Simplex::new([GroupElement::Word(word([ALPHA]))])).expect("α in F_2")
    }

    /// `∂b(D) - [e, α]`, after checking that it equals `-Σ_{y ∈ W(D+1)} ε(y)/2^{D+1} [e, y]`.
    pub fn boundary_tail(&self, top: usize) -> Result<Chain, F2Error> {
        let tail = self.partial_sum_b(top)?.boundary()?.sub(&self.target())?;
        self.check_tail(top, &tail)?;
        Ok(tail)
    }

    fn check_tail(&self, top: usize, tail: &Chain) -> Result<(), F2Error> {
        let expected = self.edge_sum(top + 1)?.neg();
        if *tail != expected {
            return Err(F2Error::TelescopingMismatch { level: top });
        }
        Ok(())
    }

    /// Norms of the increments `b(D) - b(D-1)` and tails `∂b(D) - [e, α]`
    /// for `D = 1..=top`, against their envelopes.
    ///
    /// Needs levels through `top + 1`.
    pub fn decay_report(&self, top: usize, weight: u32, p: Exponent) -> Result<DecayReport, F2Error> {
        self.level(top + 1)?;
        let params = NormParams::new(weight, p);
        let mut boundary = self.level_terms(0)?.boundary()?;
        let mut rows = Vec::with_capacity(top);
        for d in 1..=top {
            let increment = self.level_terms(d)?;
            boundary = boundary.add(&increment.boundary()?)?;
            let tail = boundary.sub(&self.target())?;
            self.check_tail(d, &tail)?;
            let increment_norm = weighted_norm(&increment, params);
            let tail_norm = weighted_norm(&tail, params);
            let increment_envelope = counted_envelope(&increment, weight, p);
            let tail_envelope = counted_envelope(&tail, weight, p);
            let closed_form_envelope = closed_form_increment_envelope(d, weight, p);
            let ok = holds(increment_norm, increment_envelope)
                && holds(tail_norm, tail_envelope)
                && holds(increment_norm, closed_form_envelope);
            rows.push(DecayRow {
                level: d,
                increment_support: increment.len(),
                increment_norm,
                increment_envelope,
                closed_form_envelope,
                tail_support: tail.len(),
                tail_norm,
                tail_envelope,
                ok,
            });
        }
        let increments: Vec<f64> = rows.iter().map(|r| r.increment_norm).collect();
        let tails: Vec<f64> = rows.iter().map(|r| r.tail_norm).collect();
        let monotone_from = monotone_from_index(&increments).map(|i| rows[i].level);
        let tail_monotone_from = monotone_from_index(&tails).map(|i| rows[i].level);
        let eventually_decreasing = monotone_from.is_some() && tail_monotone_from.is_some();
        let envelopes_ok = rows.iter().all(|r| r.ok);
        let above_threshold = p.as_f64() > 2.0;
        Ok(DecayReport {
            weight,
            p,
            rows,
            monotone_from,
            tail_monotone_from,
            eventually_decreasing,
            ok: envelopes_ok && (!above_threshold || eventually_decreasing),
        })
    }
}

fn format_word(w: &Word) -> String {
    w.iter().map(|&c| if c == ALPHA { 'a' } else { 'b' }).collect()
}

/// `(|support| · max |a|^p · max diam^n)^{1/p}`.
pub fn counted_envelope(c: &Chain, weight: u32, p: Exponent) -> f64 {
    let max_coeff = c.iter().map(|(_, a)| a.abs()).max().unwrap_or_else(Coeff::zero).to_f64().unwrap_or(f64::INFINITY);
    let max_diam = c.iter().map(|(s, _)| s.diameter(c.model())).max().unwrap_or(0) as f64;
    let w = if weight == 0 { 1.0 } else { max_diam.powi(weight as i32) };
    match p {
        Exponent::Infinity => max_coeff * w,
        _ => {
            let pf = p.as_f64();
            (c.len() as f64 * max_coeff.powf(pf) * w).powf(1.0 / pf)
        }
    }
}

/// `(2·4^D · L_D^n)^{1/p} / 2^{D+1}` with `L_D = 1 + 2D² + 4D + 2` bounding `diam s(x)`.
pub fn closed_form_increment_envelope(d: usize, weight: u32, p: Exponent) -> f64 {
    let diam = (1 + 2 * d * d + 4 * d + 2) as f64;
    let w = if weight == 0 { 1.0 } else { diam.powi(weight as i32) };
    let coeff = 0.5f64.powi(d as i32 + 1);
    match p {
        Exponent::Infinity => coeff * w,
        _ => {
            let pf = p.as_f64();
            (2.0 * 4f64.powi(d as i32) * w).powf(1.0 / pf) * coeff
        }
    }
}

/// Index of the first `i >= 1` with `v[i] < v[i-1]`, provided `v` strictly
/// decreases from there to the end.
fn monotone_from_index(v: &[f64]) -> Option<usize> {
    let first = (1..v.len()).find(|&i| v[i] < v[i - 1])?;
    (first..v.len()).all(|i| v[i] < v[i - 1]).then_some(first)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub level: usize,
    pub increment_support: usize,
    /// `‖b(D) - b(D-1)‖_{n,p}`
    pub increment_norm: f64,
    pub increment_envelope: f64,
    pub closed_form_envelope: f64,
    pub tail_support: usize,
    /// `‖∂b(D) - [e, α]‖_{n,p}`
    pub tail_norm: f64,
    pub tail_envelope: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub weight: u32,
    pub p: Exponent,
    pub rows: Vec<DecayRow>,
    /// First `D` from which the increments strictly decrease through the table.
    pub monotone_from: Option<usize>,
    pub tail_monotone_from: Option<usize>,
    pub eventually_decreasing: bool,
    pub ok: bool,
}
