//! Group models with a fixed symmetric generating set.
//!
//! Four kinds are supported: free groups `F_k`, free abelian groups `Z^n`,
//! finite cyclic groups `Z/m` and finite direct products of these. Each kind
//! comes with its standard generating set, closed under inversion: the basis
//! letters and their inverses for `F_k` and `Z^n`, `{+1, -1}` for `Z/m`, and
//! the union of the factor generators (embedded in their coordinate) for a
//! product. Word lengths are therefore the usual reduced length for free
//! groups, the `l^1` norm on `Z^n`, `min(r, m - r)` on `Z/m`, and the sum of
//! the factor lengths on products.
//!
//! A free generating set `{a, b}` of `F_2` and its symmetric closure
//! `{a, A, b, B}` give the same word metric, since word lengths are always
//! measured with inverses available.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use smallvec::SmallVec;

use crate::error::GroupError;

/// Default hard cap on the number of elements any enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// A free-group letter: generator `i` is `2 * i`, its inverse `2 * i + 1`.
pub type Letter = u8;

/// A reduced word over the letters of a free group.
pub type Word = SmallVec<[Letter; 16]>;

#[inline]
pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

/// A group element in canonical form.
///
/// The variant must match the kind of the model the element is used with;
/// [`GroupModel::contains`] checks this together with the canonical-form
/// constraints (reduced words, residues in `[0, m)`).
#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Word(Word),
    Vector(SmallVec<[i64; 4]>),
    Residue(u64),
    Tuple(Vec<GroupElement>),
}

// SmallVec's derived clone copies element by element; from_slice is a memcpy.
impl Clone for GroupElement {
    fn clone(&self) -> Self {
        match self {
            GroupElement::Word(w) => GroupElement::Word(Word::from_slice(w)),
            GroupElement::Vector(v) => GroupElement::Vector(SmallVec::from_slice(v)),
            GroupElement::Residue(r) => GroupElement::Residue(*r),
            GroupElement::Tuple(t) => GroupElement::Tuple(t.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Cyclic { modulus: u64 },
    Product(Vec<GroupModel>),
}

/// A finitely generated group together with its standard generating set.
///
/// The enumeration cap does not take part in equality: two models with the
/// same kind are the same group.
#[derive(Clone, Debug)]
pub struct GroupModel {
    kind: ModelKind,
    cap: u64,
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for GroupModel {}

impl std::hash::Hash for GroupModel {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl GroupModel {
    pub fn free(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 || rank > 26 {
            return Err(GroupError::InvalidModel(format!("free group rank {rank} outside 1..=26")));
        }
        Ok(Self::from_kind(ModelKind::Free { rank }))
    }

    pub fn free_abelian(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 {
            return Err(GroupError::InvalidModel("free abelian rank must be positive".into()));
        }
        Ok(Self::from_kind(ModelKind::FreeAbelian { rank }))
    }

    /// `Z/m` for `m >= 2` (for `m = 1` the generator would be the identity).
    pub fn cyclic(modulus: u64) -> Result<Self, GroupError> {
        if modulus < 2 {
            return Err(GroupError::InvalidModel(format!("cyclic modulus {modulus} must be at least 2")));
        }
        Ok(Self::from_kind(ModelKind::Cyclic { modulus }))
    }

    pub fn product(factors: Vec<GroupModel>) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::InvalidModel("product needs at least one factor".into()));
        }
        Ok(Self::from_kind(ModelKind::Product(factors)))
    }

    fn from_kind(kind: ModelKind) -> Self {
        GroupModel { kind, cap: DEFAULT_ENUMERATION_CAP }
    }

    /// Same group, different enumeration cap (propagated to product factors).
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        if let ModelKind::Product(factors) = &mut self.kind {
            for f in factors.iter_mut() {
                *f = f.clone().with_cap(cap);
            }
        }
        self
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            ModelKind::Free { .. } => GroupElement::Word(Word::new()),
            ModelKind::FreeAbelian { rank } => GroupElement::Vector(SmallVec::from_elem(0, *rank)),
            ModelKind::Cyclic { .. } => GroupElement::Residue(0),
            ModelKind::Product(fs) => GroupElement::Tuple(fs.iter().map(|f| f.identity()).collect()),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        match g {
            GroupElement::Word(w) => w.is_empty(),
            GroupElement::Vector(v) => v.iter().all(|&x| x == 0),
            GroupElement::Residue(r) => *r == 0,
            GroupElement::Tuple(cs) => match &self.kind {
                ModelKind::Product(fs) => fs.iter().zip(cs).all(|(f, c)| f.is_identity(c)),
                _ => false,
            },
        }
    }

    /// The basis generators whose images define a homomorphism out of this
    /// model: the `k` letters of `F_k`, the unit vectors of `Z^n`, `1` in
    /// `Z/m`, and the factor bases (in factor order) of a product.
    pub fn basis(&self) -> Vec<GroupElement> {
        match &self.kind {
            ModelKind::Free { rank } => {
                (0..*rank).map(|i| GroupElement::Word(smallvec::smallvec![(2 * i) as Letter])).collect()
            }
            ModelKind::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v: SmallVec<[i64; 4]> = SmallVec::from_elem(0, *rank);
                    v[i] = 1;
                    GroupElement::Vector(v)
                })
                .collect(),
            ModelKind::Cyclic { .. } => vec![GroupElement::Residue(1)],
            ModelKind::Product(fs) => {
                let mut out = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    for b in f.basis() {
                        out.push(self.embed(i, b));
                    }
                }
                out
            }
        }
    }

    /// Index ranges of the basis generators belonging to each product factor.
    pub(crate) fn factor_basis_ranges(&self) -> Vec<std::ops::Range<usize>> {
        match &self.kind {
            ModelKind::Product(fs) => {
                let mut start = 0;
                fs.iter()
                    .map(|f| {
                        let len = f.basis().len();
                        let r = start..start + len;
                        start += len;
                        r
                    })
                    .collect()
            }
            _ => vec![0..self.basis().len()],
        }
    }

    fn embed(&self, factor: usize, g: GroupElement) -> GroupElement {
        match &self.kind {
            ModelKind::Product(fs) => {
                let mut cs: Vec<GroupElement> = fs.iter().map(|f| f.identity()).collect();
                cs[factor] = g;
                GroupElement::Tuple(cs)
            }
            _ => g,
        }
    }

    /// `g` written in the basis generators as `(basis index, exponent)` pairs,
    /// in an order whose product (left to right) is `g`.
    pub(crate) fn basis_word(&self, g: &GroupElement) -> Vec<(usize, i64)> {
        match (&self.kind, g) {
            (_, GroupElement::Word(w)) => {
                w.iter().map(|&l| ((l / 2) as usize, if l % 2 == 0 { 1 } else { -1 })).collect()
            }
            (_, GroupElement::Vector(v)) => {
                v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
            }
            (_, GroupElement::Residue(r)) => vec![(0, *r as i64)],
            (ModelKind::Product(fs), GroupElement::Tuple(cs)) => {
                let mut out = Vec::new();
                let mut offset = 0;
                for (f, c) in fs.iter().zip(cs) {
                    out.extend(f.basis_word(c).into_iter().map(|(i, e)| (i + offset, e)));
                    offset += f.basis().len();
                }
                out
            }
            _ => panic!("element does not belong to model {self}"),
        }
    }

    /// The symmetric generating set `S`, without duplicates and without the identity.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = Vec::new();
        for b in self.basis() {
            let inv = self.inverse(&b);
            let same = inv == b;
            out.push(b);
            if !same {
                out.push(inv);
            }
        }
        out
    }

    /// Whether `g` is a canonical-form element of this model.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.kind, g) {
            (ModelKind::Free { rank }, GroupElement::Word(w)) => {
                w.iter().all(|&l| (l as usize) < 2 * rank)
                    && w.windows(2).all(|p| p[1] != inverse_letter(p[0]))
            }
            (ModelKind::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
            (ModelKind::Cyclic { modulus }, GroupElement::Residue(r)) => r < modulus,
            (ModelKind::Product(fs), GroupElement::Tuple(cs)) => {
                fs.len() == cs.len() && fs.iter().zip(cs).all(|(f, c)| f.contains(c))
            }
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::ModelMismatch { model: self.to_string(), element: format!("{g:?}") })
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Product of two elements already known to belong to this model.
    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (&self.kind, g, h) {
            (ModelKind::Free { .. }, GroupElement::Word(a), GroupElement::Word(b)) => {
                let mut cancel = 0;
                while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == inverse_letter(b[cancel]) {
                    cancel += 1;
                }
                let mut w: Word = Word::with_capacity(a.len() + b.len() - 2 * cancel);
                w.extend_from_slice(&a[..a.len() - cancel]);
                w.extend_from_slice(&b[cancel..]);
                GroupElement::Word(w)
            }
            (ModelKind::FreeAbelian { .. }, GroupElement::Vector(a), GroupElement::Vector(b)) => {
                GroupElement::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (ModelKind::Cyclic { modulus }, GroupElement::Residue(a), GroupElement::Residue(b)) => {
                GroupElement::Residue(((*a as u128 + *b as u128) % *modulus as u128) as u64)
            }
            (ModelKind::Product(fs), GroupElement::Tuple(a), GroupElement::Tuple(b)) => {
                GroupElement::Tuple(fs.iter().zip(a.iter().zip(b)).map(|(f, (x, y))| f.mul(x, y)).collect())
            }
            _ => panic!("element does not belong to model {self}"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match (&self.kind, g) {
            (_, GroupElement::Word(w)) => GroupElement::Word(w.iter().rev().map(|&l| inverse_letter(l)).collect()),
            (_, GroupElement::Vector(v)) => GroupElement::Vector(v.iter().map(|x| -x).collect()),
            (ModelKind::Cyclic { modulus }, GroupElement::Residue(r)) => {
                GroupElement::Residue(if *r == 0 { 0 } else { modulus - r })
            }
            (ModelKind::Product(fs), GroupElement::Tuple(cs)) => {
                GroupElement::Tuple(fs.iter().zip(cs).map(|(f, c)| f.inverse(c)).collect())
            }
            _ => panic!("element does not belong to model {self}"),
        }
    }

    /// `g^e` for any integer exponent.
    pub fn pow(&self, g: &GroupElement, e: i64) -> GroupElement {
        let base = if e < 0 { self.inverse(g) } else { g.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Length of a shortest word in `S` representing `g`.
    pub fn word_length(&self, g: &GroupElement) -> u64 {
        match (&self.kind, g) {
            (_, GroupElement::Word(w)) => w.len() as u64,
            (_, GroupElement::Vector(v)) => v.iter().map(|x| x.unsigned_abs()).sum(),
            (ModelKind::Cyclic { modulus }, GroupElement::Residue(r)) => (*r).min(modulus - r),
            (ModelKind::Product(fs), GroupElement::Tuple(cs)) => {
                fs.iter().zip(cs).map(|(f, c)| f.word_length(c)).sum()
            }
            _ => panic!("element does not belong to model {self}"),
        }
    }

    /// Word distance `d_S(g, h) = |g^{-1} h|`.
    pub fn distance(&self, g: &GroupElement, h: &GroupElement) -> Result<u64, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.dist(g, h))
    }

    pub(crate) fn dist(&self, g: &GroupElement, h: &GroupElement) -> u64 {
        match (&self.kind, g, h) {
            (ModelKind::Free { .. }, GroupElement::Word(a), GroupElement::Word(b)) => {
                let lcp = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
                (a.len() + b.len() - 2 * lcp) as u64
            }
            (ModelKind::FreeAbelian { .. }, GroupElement::Vector(a), GroupElement::Vector(b)) => {
                a.iter().zip(b).map(|(x, y)| (y - x).unsigned_abs()).sum()
            }
            (ModelKind::Cyclic { modulus }, GroupElement::Residue(a), GroupElement::Residue(b)) => {
                let r = (b + modulus - a) % modulus;
                r.min(modulus - r)
            }
            (ModelKind::Product(fs), GroupElement::Tuple(a), GroupElement::Tuple(b)) => {
                fs.iter().zip(a.iter().zip(b)).map(|(f, (x, y))| f.dist(x, y)).sum()
            }
            _ => panic!("element does not belong to model {self}"),
        }
    }

    /// Diameter of the point set `{e, g_1, ..., g_k}`.
    pub fn diameter(&self, vertices: &[GroupElement]) -> u64 {
        let mut diam = 0;
        for (i, g) in vertices.iter().enumerate() {
            diam = diam.max(self.word_length(g));
            for h in &vertices[i + 1..] {
                diam = diam.max(self.dist(g, h));
            }
        }
        diam
    }

    /// Number of elements of word length exactly `r`, saturating at `u128::MAX`.
    pub fn sphere_size(&self, r: u64) -> u128 {
        match &self.kind {
            ModelKind::Free { rank } => {
                if r == 0 {
                    return 1;
                }
                let k = 2 * *rank as u128;
                checked_pow(k - 1, r - 1).and_then(|x| x.checked_mul(k)).unwrap_or(u128::MAX)
            }
            ModelKind::FreeAbelian { rank } => {
                let b = lattice_ball(*rank as u128, r);
                if r == 0 {
                    b
                } else {
                    b.saturating_sub(lattice_ball(*rank as u128, r - 1))
                }
            }
            ModelKind::Cyclic { modulus } => {
                let m = *modulus as u128;
                let r = r as u128;
                if r == 0 {
                    1
                } else if 2 * r < m {
                    2
                } else if 2 * r == m {
                    1
                } else {
                    0
                }
            }
            ModelKind::Product(fs) => {
                let mut conv = vec![0u128; r as usize + 1];
                conv[0] = 1;
                for f in fs {
                    let sizes: Vec<u128> = (0..=r).map(|s| f.sphere_size(s)).collect();
                    let mut next = vec![0u128; r as usize + 1];
                    for (i, &a) in conv.iter().enumerate() {
                        if a == 0 {
                            continue;
                        }
                        for (j, &b) in sizes.iter().enumerate().take(r as usize + 1 - i) {
                            next[i + j] = next[i + j].saturating_add(a.saturating_mul(b));
                        }
                    }
                    conv = next;
                }
                conv[r as usize]
            }
        }
    }

    /// `|{g : |g| <= r}|` from closed formulas (free and free abelian) or by
    /// summing sphere sizes.
    pub fn ball_size(&self, r: u64) -> Result<u128, GroupError> {
        let total = match &self.kind {
            ModelKind::Free { rank: 1 } => Some(2 * r as u128 + 1),
            ModelKind::Free { rank } => {
                let k = 2 * *rank as u128;
                checked_pow(k - 1, r).map(|x| 1 + k * (x - 1) / (k - 2))
            }
            ModelKind::FreeAbelian { rank } => {
                let b = lattice_ball(*rank as u128, r);
                (b != u128::MAX).then_some(b)
            }
            _ => {
                let mut acc: u128 = 0;
                let mut ok = true;
                for s in 0..=r {
                    let sz = self.sphere_size(s);
                    if sz == 0 && self.is_finite() {
                        break;
                    }
                    match acc.checked_add(sz) {
                        Some(v) if sz != u128::MAX => acc = v,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                ok.then_some(acc)
            }
        };
        total.ok_or(GroupError::EnumerationTooLarge { bound: u128::MAX, cap: self.cap })
    }

    pub fn is_finite(&self) -> bool {
        match &self.kind {
            ModelKind::Free { .. } | ModelKind::FreeAbelian { .. } => false,
            ModelKind::Cyclic { .. } => true,
            ModelKind::Product(fs) => fs.iter().all(|f| f.is_finite()),
        }
    }

    fn guard(&self, bound: u128) -> Result<(), GroupError> {
        if bound > self.cap as u128 {
            Err(GroupError::EnumerationTooLarge { bound, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Lazily streamed sphere of radius `r`. Fails before producing anything
    /// when the precomputed sphere size exceeds the cap.
    pub fn sphere_iter(&self, r: u64) -> Result<Box<dyn Iterator<Item = GroupElement> + Send + '_>, GroupError> {
        self.guard(self.sphere_size(r))?;
        Ok(match &self.kind {
            ModelKind::Free { rank } => Box::new(FreeSphere::new(*rank, r as usize).map(GroupElement::Word)),
            ModelKind::FreeAbelian { rank } => {
                let mut out = Vec::new();
                let mut cur: SmallVec<[i64; 4]> = SmallVec::from_elem(0, *rank);
                lattice_sphere(&mut cur, 0, r as i64, &mut out);
                Box::new(out.into_iter())
            }
            ModelKind::Cyclic { modulus } => {
                let m = *modulus;
                let v: Vec<u64> = if r == 0 {
                    vec![0]
                } else if 2 * r < m {
                    vec![r, m - r]
                } else if 2 * r == m {
                    vec![r]
                } else {
                    vec![]
                };
                Box::new(v.into_iter().map(GroupElement::Residue))
            }
            ModelKind::Product(fs) => {
                let mut out = Vec::new();
                let mut parts = Vec::with_capacity(fs.len());
                self.product_sphere(fs, 0, r, &mut parts, &mut out)?;
                Box::new(out.into_iter())
            }
        })
    }

    fn product_sphere(
        &self,
        fs: &[GroupModel],
        idx: usize,
        remaining: u64,
        parts: &mut Vec<Vec<GroupElement>>,
        out: &mut Vec<GroupElement>,
    ) -> Result<(), GroupError> {
        if idx == fs.len() {
            if remaining == 0 {
                let mut acc: Vec<Vec<GroupElement>> = vec![Vec::new()];
                for part in parts.iter() {
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for prefix in &acc {
                        for g in part {
                            let mut t = prefix.clone();
                            t.push(g.clone());
                            next.push(t);
                        }
                    }
                    acc = next;
                }
                out.extend(acc.into_iter().map(GroupElement::Tuple));
            }
            return Ok(());
        }
        let last = idx + 1 == fs.len();
        let lo = if last { remaining } else { 0 };
        for s in lo..=remaining {
            let sphere: Vec<GroupElement> = fs[idx].sphere_iter(s)?.collect();
            if sphere.is_empty() {
                continue;
            }
            parts.push(sphere);
            self.product_sphere(fs, idx + 1, remaining - s, parts, out)?;
            parts.pop();
        }
        Ok(())
    }

    pub fn sphere(&self, r: u64) -> Result<Vec<GroupElement>, GroupError> {
        Ok(self.sphere_iter(r)?.collect())
    }

    /// All elements of length at most `r`, sphere by sphere.
    pub fn ball(&self, r: u64) -> Result<Vec<GroupElement>, GroupError> {
        let size = self.ball_size(r)?;
        self.guard(size)?;
        let mut out = Vec::with_capacity(size as usize);
        for s in 0..=r {
            out.extend(self.sphere_iter(s)?);
        }
        Ok(out)
    }

    /// Smallest `K` with `ball_size(r) <= K * r^D` for `1 <= r <= r_max`.
    pub fn growth_constant(&self, degree: u32, r_max: u64) -> Result<BigRational, GroupError> {
        let mut best = BigRational::zero();
        for r in 1..=r_max {
            let ball = BigInt::from(self.ball_size(r)?);
            let denom = num_traits::pow(BigInt::from(r), degree as usize);
            let ratio = BigRational::new(ball, denom);
            if ratio > best {
                best = ratio;
            }
        }
        Ok(best)
    }

    pub fn parse_element(&self, s: &str) -> Result<GroupElement, GroupError> {
        let bad = || GroupError::ParseElement { model: self.to_string(), input: s.to_string() };
        let s = s.trim();
        let g = match &self.kind {
            ModelKind::Free { rank } => {
                let mut w = Word::new();
                for ch in s.chars() {
                    let letter = if ch.is_ascii_lowercase() {
                        2 * (ch as u8 - b'a')
                    } else if ch.is_ascii_uppercase() {
                        2 * (ch as u8 - b'A') + 1
                    } else {
                        return Err(bad());
                    };
                    if letter as usize >= 2 * rank {
                        return Err(bad());
                    }
                    // Reduce while reading so non-reduced input is accepted.
                    if w.last() == Some(&inverse_letter(letter)) {
                        w.pop();
                    } else {
                        w.push(letter);
                    }
                }
                GroupElement::Word(w)
            }
            ModelKind::FreeAbelian { rank } => {
                let v: SmallVec<[i64; 4]> =
                    s.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
                if v.len() != *rank {
                    return Err(bad());
                }
                GroupElement::Vector(v)
            }
            ModelKind::Cyclic { modulus } => {
                let x: i128 = s.parse().map_err(|_| bad())?;
                GroupElement::Residue(x.rem_euclid(*modulus as i128) as u64)
            }
            ModelKind::Product(fs) => {
                let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
                let parts = split_top_level(inner, '|', '(', ')');
                if parts.len() != fs.len() {
                    return Err(bad());
                }
                GroupElement::Tuple(fs.iter().zip(parts).map(|(f, p)| f.parse_element(p)).collect::<Result<_, _>>()?)
            }
        };
        Ok(g)
    }

    /// Inverse of [`parse_element`](Self::parse_element) on canonical elements.
    pub fn format_element(&self, g: &GroupElement) -> String {
        match (&self.kind, g) {
            (_, GroupElement::Word(w)) => w
                .iter()
                .map(|&l| {
                    let base = if l % 2 == 0 { b'a' } else { b'A' };
                    (base + l / 2) as char
                })
                .collect(),
            (_, GroupElement::Vector(v)) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            (_, GroupElement::Residue(r)) => r.to_string(),
            (ModelKind::Product(fs), GroupElement::Tuple(cs)) => {
                let parts: Vec<String> = fs.iter().zip(cs).map(|(f, c)| f.format_element(c)).collect();
                format!("({})", parts.join("|"))
            }
            _ => format!("{g:?}"),
        }
    }
}

fn checked_pow(base: u128, exp: u64) -> Option<u128> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// `|{x in Z^n : |x|_1 <= r}| = sum_i 2^i C(n,i) C(r,i)`, saturating.
fn lattice_ball(n: u128, r: u64) -> u128 {
    let r = r as u128;
    let mut total: u128 = 0;
    let mut cn: u128 = 1; // C(n, i)
    let mut cr: u128 = 1; // C(r, i)
    let mut two: u128 = 1;
    for i in 0..=n.min(r) {
        if i > 0 {
            cn = cn * (n - i + 1) / i;
            cr = match cr.checked_mul(r - i + 1) {
                Some(v) => v / i,
                None => return u128::MAX,
            };
            two = match two.checked_mul(2) {
                Some(v) => v,
                None => return u128::MAX,
            };
        }
        let term = two.checked_mul(cn).and_then(|x| x.checked_mul(cr));
        total = match term.and_then(|t| total.checked_add(t)) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    total
}

fn lattice_sphere(cur: &mut SmallVec<[i64; 4]>, idx: usize, remaining: i64, out: &mut Vec<GroupElement>) {
    if idx + 1 == cur.len() {
        cur[idx] = remaining;
        out.push(GroupElement::Vector(cur.clone()));
        if remaining != 0 {
            cur[idx] = -remaining;
            out.push(GroupElement::Vector(cur.clone()));
        }
        cur[idx] = 0;
        return;
    }
    for x in -remaining..=remaining {
        cur[idx] = x;
        lattice_sphere(cur, idx + 1, remaining - x.abs(), out);
    }
    cur[idx] = 0;
}

/// Odometer over the reduced words of a fixed length.
struct FreeSphere {
    alphabet: u8,
    letters: Word,
    done: bool,
}

impl FreeSphere {
    fn new(rank: usize, len: usize) -> Self {
        let mut s = FreeSphere { alphabet: (2 * rank) as u8, letters: Word::from_elem(0, len), done: false };
        s.fill_minimal(0);
        s
    }

    fn allowed(&self, pos: usize, l: Letter) -> bool {
        pos == 0 || l != inverse_letter(self.letters[pos - 1])
    }

    fn fill_minimal(&mut self, from: usize) {
        for pos in from..self.letters.len() {
            let mut l = 0;
            while !self.allowed(pos, l) {
                l += 1;
            }
            self.letters[pos] = l;
        }
    }
}

impl Iterator for FreeSphere {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let out = self.letters.clone();
        let mut pos = self.letters.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            let mut l = self.letters[pos] + 1;
            while l < self.alphabet && !self.allowed(pos, l) {
                l += 1;
            }
            if l < self.alphabet {
                self.letters[pos] = l;
                self.fill_minimal(pos + 1);
                break;
            }
        }
        Some(out)
    }
}

/// Split on `sep` at bracket depth zero.
pub(crate) fn split_top_level(s: &str, sep: char, open: char, close: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == open {
            depth += 1;
        } else if ch == close {
            depth -= 1;
        } else if ch == sep && depth == 0 {
            parts.push(&s[start..i]);
            start = i + ch.len_utf8();
        }
    }
    parts.push(&s[start..]);
    parts
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Free { rank } => write!(f, "free:{rank}"),
            ModelKind::FreeAbelian { rank } => write!(f, "abelian:{rank}"),
            ModelKind::Cyclic { modulus } => write!(f, "cyclic:{modulus}"),
            ModelKind::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|m| m.to_string()).collect();
                write!(f, "product:[{}]", parts.join(","))
            }
        }
    }
}

impl FromStr for GroupModel {
    type Err = GroupError;

    /// Parses `free:2`, `abelian:3`, `cyclic:7`, `product:[free:2,cyclic:3]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::InvalidModel(format!("cannot parse model descriptor {s:?}"));
        let s = s.trim();
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "free" => GroupModel::free(arg.trim().parse().map_err(|_| bad())?),
            "abelian" => GroupModel::free_abelian(arg.trim().parse().map_err(|_| bad())?),
            "cyclic" => GroupModel::cyclic(arg.trim().parse().map_err(|_| bad())?),
            "product" => {
                let inner = arg.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
                let factors = split_top_level(inner, ',', '[', ']')
                    .into_iter()
                    .map(str::parse)
                    .collect::<Result<Vec<GroupModel>, _>>()?;
                GroupModel::product(factors)
            }
            _ => Err(bad()),
        }
    }
}
