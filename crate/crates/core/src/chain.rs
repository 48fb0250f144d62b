//! Finitely supported chains of the (unnormalized) bar complex.
//!
//! A degree-`k` simplex `[e, g_1, ..., g_k]` is stored as the tuple
//! `(g_1, ..., g_k)`; the leading identity vertex is implicit. Faces that do
//! not start at the identity are re-based by left translation, so the face
//! `[g_1, ..., g_k]` becomes `[e, g_1^{-1} g_2, ..., g_1^{-1} g_k]`.
//! Degenerate simplices (repeated vertices, identity entries) are kept as
//! ordinary basis elements.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::ChainError;
use crate::group::{GroupElement, GroupModel, ModelKind};

/// Exact chain coefficients.
pub type Coeff = BigRational;

/// The tuple `(g_1, ..., g_k)` of a bar simplex `[e, g_1, ..., g_k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[GroupElement; 3]>);

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = GroupElement>) -> Self {
        Simplex(vertices.into_iter().collect())
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `diam {e, g_1, ..., g_k}`.
    pub fn diameter(&self, model: &GroupModel) -> u64 {
        model.diameter(&self.0)
    }

    pub fn parse(model: &GroupModel, words: &[&str]) -> Result<Self, ChainError> {
        Ok(Simplex(words.iter().map(|w| model.parse_element(w)).collect::<Result<_, _>>()?))
    }

    /// The `j`-th face with its sign, re-based to start at the identity.
    pub fn face(&self, model: &GroupModel, j: usize) -> (Simplex, bool) {
        let k = self.0.len();
        assert!(j <= k && k > 0);
        if j == 0 {
            let inv = model.inverse(&self.0[0]);
            (Simplex(self.0[1..].iter().map(|g| model.mul(&inv, g)).collect()), true)
        } else {
            let mut v = self.0.clone();
            v.remove(j - 1);
            (Simplex(v), j.is_multiple_of(2))
        }
    }
}

/// A finitely supported formal sum of same-degree simplices over one model.
///
/// No stored coefficient is zero.
#[derive(Clone, Debug)]
pub struct Chain {
    model: Arc<GroupModel>,
    degree: usize,
    terms: FxHashMap<Simplex, Coeff>,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && same_model(&self.model, &other.model) && self.terms == other.terms
    }
}

pub(crate) fn same_model(a: &Arc<GroupModel>, b: &Arc<GroupModel>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Chain {
    pub fn zero(model: Arc<GroupModel>, degree: usize) -> Self {
        Chain { model, degree, terms: FxHashMap::default() }
    }

    /// The basis chain `1 * simplex`.
    pub fn basis(model: Arc<GroupModel>, simplex: Simplex) -> Result<Self, ChainError> {
        let mut c = Chain::zero(model, simplex.degree());
        c.add_term(simplex, Coeff::one())?;
        Ok(c)
    }

    pub fn from_terms(
        model: Arc<GroupModel>,
        degree: usize,
        terms: impl IntoIterator<Item = (Simplex, Coeff)>,
    ) -> Result<Self, ChainError> {
        let mut c = Chain::zero(model, degree);
        for (s, a) in terms {
            c.add_term(s, a)?;
        }
        Ok(c)
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of simplices with non-zero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &Simplex) -> Option<&Coeff> {
        self.terms.get(s)
    }

    /// Terms in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &Coeff)> {
        self.terms.iter()
    }

    /// Terms in the canonical simplex order; use this wherever the order of
    /// evaluation can influence a result.
    pub fn sorted_terms(&self) -> Vec<(&Simplex, &Coeff)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Adds `coeff * simplex`, checking degree and model membership.
    pub fn add_term(&mut self, simplex: Simplex, coeff: Coeff) -> Result<(), ChainError> {
        if simplex.degree() != self.degree {
            return Err(ChainError::DegreeMismatch { expected: self.degree, found: simplex.degree() });
        }
        if let Some(g) = simplex.0.iter().find(|g| !self.model.contains(g)) {
            return Err(crate::error::GroupError::ModelMismatch {
                model: self.model.to_string(),
                element: format!("{g:?}"),
            }
            .into());
        }
        self.add_term_unchecked(simplex, coeff);
        Ok(())
    }

    pub(crate) fn add_term_unchecked(&mut self, simplex: Simplex, coeff: Coeff) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(simplex) {
            Entry::Occupied(mut e) => {
                add_coeff(e.get_mut(), &coeff);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    /// Accumulate without pruning; callers must finish with [`prune`](Self::prune).
    /// `self += ±coeff · simplex`, cloning only what gets inserted.
    fn add_term_ref(&mut self, simplex: &Simplex, coeff: &Coeff, negate: bool) {
        match self.terms.get_mut(simplex) {
            Some(a) => {
                if negate {
                    add_coeff(a, &-coeff);
                } else {
                    add_coeff(a, coeff);
                }
                if a.is_zero() {
                    self.terms.remove(simplex);
                }
            }
            None => {
                self.terms.insert(simplex.clone(), if negate { -coeff } else { coeff.clone() });
            }
        }
    }

    pub(crate) fn accumulate(&mut self, simplex: Simplex, coeff: &Coeff) {
        match self.terms.get_mut(&simplex) {
            Some(a) => add_coeff(a, coeff),
            None => {
                self.terms.insert(simplex, coeff.clone());
            }
        }
    }

    pub(crate) fn prune(&mut self) {
        self.terms.retain(|_, a| !a.is_zero());
    }

    fn compatible(&self, other: &Chain) -> Result<(), ChainError> {
        if !same_model(&self.model, &other.model) {
            return Err(ChainError::ModelMismatch { left: self.model.to_string(), right: other.model.to_string() });
        }
        if self.degree != other.degree {
            return Err(ChainError::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Chain) -> Result<Chain, ChainError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (s, a) in &other.terms {
            out.add_term_ref(s, a, false);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Chain) -> Result<Chain, ChainError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (s, a) in &other.terms {
            out.add_term_ref(s, a, true);
        }
        Ok(out)
    }

    /// `self + lambda * other`, in place.
    pub fn add_scaled(&mut self, other: &Chain, lambda: &Coeff) -> Result<(), ChainError> {
        self.compatible(other)?;
        for (s, a) in &other.terms {
            self.add_term_unchecked(s.clone(), a * lambda);
        }
        Ok(())
    }

    pub fn scale(&self, lambda: &Coeff) -> Chain {
        if lambda.is_zero() {
            return Chain::zero(self.model.clone(), self.degree);
        }
        Chain {
            model: self.model.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(s, a)| (s.clone(), a * lambda)).collect(),
        }
    }

    pub fn neg(&self) -> Chain {
        Chain {
            model: self.model.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(s, a)| (s.clone(), -a)).collect(),
        }
    }

    /// Sum of all coefficients.
    pub fn total_coefficient(&self) -> Coeff {
        self.sorted_terms().into_iter().fold(Coeff::zero(), |acc, (_, a)| acc + a)
    }

    /// `∂[v_0, ..., v_k] = Σ_j (-1)^j [v_0, ..., v̂_j, ..., v_k]` with every face re-based.
    pub fn boundary(&self) -> Result<Chain, ChainError> {
        if self.degree == 0 {
            return Err(ChainError::DegreeZeroBoundary);
        }
        let model = &*self.model;
        let mut out = Chain::zero(self.model.clone(), self.degree - 1);
        out.terms.reserve(self.terms.len() * (self.degree + 1));
        for (s, a) in &self.terms {
            let neg = -a;
            for j in 0..=self.degree {
                let (face, positive) = s.face(model, j);
                out.accumulate(face, if positive { a } else { &neg });
            }
        }
        out.prune();
        Ok(out)
    }

    /// Largest diameter in the support (0 for the empty chain).
    pub fn max_diameter(&self) -> u64 {
        self.terms.keys().map(|s| s.diameter(&self.model)).max().unwrap_or(0)
    }

    /// JSON array of `{"simplex": [...], "coeff": "p/q"}` records in canonical order.
    pub fn to_json(&self) -> String {
        let records: Vec<ChainRecord> = self
            .sorted_terms()
            .into_iter()
            .map(|(s, a)| ChainRecord {
                simplex: s.0.iter().map(|g| self.model.format_element(g)).collect(),
                coeff: format_coeff(a),
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("chain records serialize")
    }

    /// Parses [`to_json`](Self::to_json) output. The degree is taken from the
    /// records; an empty array needs `degree` to be given.
    pub fn from_json(model: Arc<GroupModel>, degree: Option<usize>, text: &str) -> Result<Chain, ChainError> {
        let records: Vec<ChainRecord> = serde_json::from_str(text).map_err(|e| ChainError::Parse(e.to_string()))?;
        let degree = match (degree, records.first()) {
            (Some(d), _) => d,
            (None, Some(r)) => r.simplex.len(),
            (None, None) => return Err(ChainError::Parse("empty chain needs an explicit degree".into())),
        };
        let mut c = Chain::zero(model.clone(), degree);
        for r in records {
            let words: Vec<&str> = r.simplex.iter().map(String::as_str).collect();
            let s = Simplex::parse(&model, &words)?;
            c.add_term(s, parse_coeff(&r.coeff)?)?;
        }
        Ok(c)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ChainRecord {
    simplex: Vec<String>,
    coeff: String,
}

/// `p/q` in lowest terms, always with a denominator.
/// `a += b`, in machine integers when both sides are small.
fn add_coeff(a: &mut Coeff, b: &Coeff) {
    let small = |x: &Coeff| Some((x.numer().to_i64()?, x.denom().to_i64()?));
    if let (Some((an, ad)), Some((bn, bd))) = (small(a), small(b)) {
        let (an, ad, bn, bd) = (an as i128, ad as i128, bn as i128, bd as i128);
        let (n, d) = if ad == bd { (an + bn, ad) } else { (an * bd + bn * ad, ad * bd) };
        let g = n.gcd(&d);
        let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d > 0 {
            *a = Coeff::new_raw(BigInt::from(n), BigInt::from(d));
            return;
        }
    }
    *a += b;
}

pub fn format_coeff(a: &Coeff) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

/// Accepts `p/q` or a plain integer.
pub fn parse_coeff(s: &str) -> Result<Coeff, ChainError> {
    let bad = || ChainError::Parse(format!("bad coefficient {s:?}"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (s, a)) in self.sorted_terms().into_iter().enumerate() {
            let sign = if a.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            let verts: Vec<String> = std::iter::once("e".to_string())
                .chain(s.0.iter().map(|g| {
                    let w = self.model.format_element(g);
                    if w.is_empty() { "e".to_string() } else { w }
                }))
                .collect();
            if i > 0 {
                write!(f, " ")?;
            }
            let abs = a.abs();
            if abs.is_one() {
                write!(f, "{sign}[{}]", verts.join(","))?;
            } else {
                write!(f, "{sign}{}*[{}]", abs, verts.join(","))?;
            }
        }
        Ok(())
    }
}

/// Bound `(D, K, r_max)` with `|B_r ∩ ker φ| <= K r^D` for `1 <= r <= r_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelCertificate {
    pub degree: u32,
    #[serde(serialize_with = "ser_coeff")]
    pub constant: BigRational,
    pub radius: u64,
}

fn ser_coeff<S: serde::Serializer>(a: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_coeff(a))
}

/// A homomorphism determined by the images of the source basis generators.
#[derive(Clone, Debug)]
pub struct GroupHomomorphism {
    source: Arc<GroupModel>,
    target: Arc<GroupModel>,
    images: Vec<GroupElement>,
    certificate: Option<KernelCertificate>,
}

impl GroupHomomorphism {
    /// Checks that the images respect the relations of the source: pairwise
    /// commutation for `Z^n`, `g^m = e` for `Z/m`, both per factor plus
    /// commutation across factors for products.
    pub fn new(source: Arc<GroupModel>, target: Arc<GroupModel>, images: Vec<GroupElement>) -> Result<Self, ChainError> {
        let basis = source.basis();
        if images.len() != basis.len() {
            return Err(ChainError::InvalidHomomorphism(format!(
                "{} generator images given, source has {}",
                images.len(),
                basis.len()
            )));
        }
        for g in &images {
            if !target.contains(g) {
                return Err(ChainError::InvalidHomomorphism(format!("image {g:?} is not an element of {target}")));
            }
        }
        check_relations(&source, &target, &images)?;
        Ok(GroupHomomorphism { source, target, images, certificate: None })
    }

    pub fn identity(model: Arc<GroupModel>) -> Self {
        let images = model.basis();
        GroupHomomorphism { source: model.clone(), target: model, images, certificate: None }
    }

    /// Parses images separated by `;`, e.g. `"1;0"` for `Z^2 -> Z`, `(x, y) ↦ x`.
    pub fn parse(source: Arc<GroupModel>, target: Arc<GroupModel>, images: &str) -> Result<Self, ChainError> {
        let imgs = images.split(';').map(|s| target.parse_element(s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, imgs)
    }

    pub fn source(&self) -> &Arc<GroupModel> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroupModel> {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn certificate(&self) -> Option<&KernelCertificate> {
        self.certificate.as_ref()
    }

    pub fn with_certificate(mut self, cert: KernelCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        let mut acc = self.target.identity();
        for (i, e) in self.source.basis_word(g) {
            let factor = self.target.pow(&self.images[i], e);
            acc = self.target.mul(&acc, &factor);
        }
        acc
    }

    /// Whether every source generator maps into `T ∪ {e}`.
    pub fn maps_generators_into_generators(&self) -> bool {
        self.images.iter().all(|g| self.target.word_length(g) <= 1)
    }

    /// Empirical kernel control: counts kernel elements in the source ball of
    /// radius `radius` and returns the least `K` with `|B_r ∩ ker| <= K r^D`
    /// for `1 <= r <= radius`.
    pub fn kernel_certificate(&self, degree: u32, radius: u64) -> Result<KernelCertificate, ChainError> {
        let mut per_length = vec![0u64; radius as usize + 1];
        for g in self.source.ball(radius)? {
            if self.target.is_identity(&self.apply(&g)) {
                per_length[self.source.word_length(&g) as usize] += 1;
            }
        }
        let mut best = BigRational::zero();
        let mut cumulative = 0u64;
        for (r, &count) in per_length.iter().enumerate() {
            cumulative += count;
            if r == 0 {
                continue;
            }
            let ratio = BigRational::new(BigInt::from(cumulative), num_traits::pow(BigInt::from(r), degree as usize));
            if ratio > best {
                best = ratio;
            }
        }
        Ok(KernelCertificate { degree, constant: best, radius })
    }

    /// `C_k(φ)(c) = Σ_h (Σ_{g ∈ φ^{-1}(h)} a_g) [e, h_1, ..., h_k]`.
    pub fn push_forward(&self, c: &Chain) -> Result<Chain, ChainError> {
        if !same_model(c.model(), &self.source) {
            return Err(ChainError::ModelMismatch { left: c.model().to_string(), right: self.source.to_string() });
        }
        let mut out = Chain::zero(self.target.clone(), c.degree());
        for (s, a) in c.iter() {
            out.accumulate(Simplex(s.0.iter().map(|g| self.apply(g)).collect()), a);
        }
        out.prune();
        Ok(out)
    }
}

fn commute(target: &GroupModel, a: &GroupElement, b: &GroupElement) -> bool {
    target.mul(a, b) == target.mul(b, a)
}

fn check_relations(source: &GroupModel, target: &GroupModel, images: &[GroupElement]) -> Result<(), ChainError> {
    let fail = |msg: String| Err(ChainError::InvalidHomomorphism(msg));
    match source.kind() {
        ModelKind::Free { .. } => Ok(()),
        ModelKind::FreeAbelian { .. } => {
            for (i, a) in images.iter().enumerate() {
                for b in &images[i + 1..] {
                    if !commute(target, a, b) {
                        return fail(format!("images of a free abelian basis must commute ({a:?}, {b:?})"));
                    }
                }
            }
            Ok(())
        }
        ModelKind::Cyclic { modulus } => {
            let e = *modulus as i64;
            if target.is_identity(&target.pow(&images[0], e)) {
                Ok(())
            } else {
                fail(format!("image of the generator of Z/{modulus} has order not dividing {modulus}"))
            }
        }
        ModelKind::Product(fs) => {
            let ranges = source.factor_basis_ranges();
            for (f, r) in fs.iter().zip(&ranges) {
                check_relations(f, target, &images[r.clone()])?;
            }
            for (i, r1) in ranges.iter().enumerate() {
                for r2 in &ranges[i + 1..] {
                    for a in &images[r1.clone()] {
                        for b in &images[r2.clone()] {
                            if !commute(target, a, b) {
                                return fail("images of different product factors must commute".into());
                            }
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

/// Exact ceiling of a rational.
pub(crate) fn ceil_rational(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}
