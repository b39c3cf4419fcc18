use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::exponent::Exponent;
use super::SymbolicError;

/// Coefficients below this magnitude are dropped during canonicalization.
pub const COEFF_DROP: f64 = 1e-300;

/// Product count above which a multiplication is split into merged chunks.
const MUL_CHUNK: usize = 1 << 15;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: &str) -> Result<Self, SymbolicError> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(VarId(name.to_string()))
        } else {
            Err(SymbolicError::InvalidVariables(format!("`{name}` is not a valid identifier")))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered, duplicate-free variable list shared by every polynomial of a model.
#[derive(Clone, Debug)]
pub struct VarList(Arc<[VarId]>);

impl VarList {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, SymbolicError> {
        let mut out: Vec<VarId> = Vec::with_capacity(names.len());
        for n in names {
            let v = VarId::new(n.as_ref())?;
            if out.contains(&v) {
                return Err(SymbolicError::InvalidVariables(format!("duplicate variable `{v}`")));
            }
            out.push(v);
        }
        Ok(VarList(out.into()))
    }

    pub fn empty() -> Self {
        VarList(Arc::from(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &VarId {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v.as_str() == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarId> {
        self.0.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|v| v.0.clone()).collect()
    }

    fn same(&self, other: &VarList) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0[..] == other.0[..]
    }

    fn union(&self, other: &VarList) -> VarList {
        let mut out: Vec<VarId> = self.0.to_vec();
        for v in other.iter() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        VarList(out.into())
    }
}

impl PartialEq for VarList {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

/// `coeff · ∏ vars[i]^exps[i]`, exponents stored densely against the owning list.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub(crate) coeff: f64,
    pub(crate) exps: SmallVec<[Exponent; 3]>,
}

impl Monomial {
    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    fn is_constant(&self) -> bool {
        self.exps.iter().all(Exponent::is_zero)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            coeff: self.coeff * other.coeff,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a.add(*b)).collect(),
        }
    }
}

fn cmp_exps(a: &[Exponent], b: &[Exponent]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.compare(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn keep(c: f64) -> bool {
    !(c.abs() < COEFF_DROP)
}

/// Sort descending by exponent vector, merge equal vectors, drop vanishing terms.
fn canonicalize(mut terms: Vec<Monomial>) -> Vec<Monomial> {
    terms.sort_by(|a, b| cmp_exps(&b.exps, &a.exps));
    let mut out: Vec<Monomial> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if cmp_exps(&last.exps, &t.exps) == Ordering::Equal => {
                last.coeff += t.coeff;
                for (a, b) in last.exps.iter_mut().zip(&t.exps) {
                    *a = a.merge(*b);
                }
            }
            _ => {
                if let Some(last) = out.last() {
                    if !keep(last.coeff) {
                        out.pop();
                    }
                }
                out.push(t);
            }
        }
    }
    if matches!(out.last(), Some(last) if !keep(last.coeff)) {
        out.pop();
    }
    out
}

/// Linear merge of two canonical term lists over the same variable list.
fn merge_sorted(a: &[Monomial], b: &[Monomial], sign: f64) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match cmp_exps(&a[i].exps, &b[j].exps) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let mut t = b[j].clone();
                t.coeff *= sign;
                out.push(t);
                j += 1;
            }
            Ordering::Equal => {
                let c = a[i].coeff + sign * b[j].coeff;
                if keep(c) {
                    let exps = a[i].exps.iter().zip(&b[j].exps).map(|(x, y)| x.merge(*y)).collect();
                    out.push(Monomial { coeff: c, exps });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(b[j..].iter().map(|t| Monomial { coeff: t.coeff * sign, exps: t.exps.clone() }));
    out
}

fn remap(terms: &[Monomial], from: &VarList, to: &VarList) -> Vec<Monomial> {
    let map: Vec<Option<usize>> = to.iter().map(|v| from.index_of(v.as_str())).collect();
    terms
        .iter()
        .map(|t| Monomial {
            coeff: t.coeff,
            exps: map.iter().map(|m| m.map_or(Exponent::ZERO, |k| t.exps[k])).collect(),
        })
        .collect()
}

/// Canonical finite sum of power-law monomials with real coefficients.
///
/// Terms are kept sorted in descending lexicographic order of their exponent
/// vectors with no two terms sharing a vector, so structural equality of two
/// polynomials over the same variable list is equality of their term lists.
#[derive(Clone, Debug)]
pub struct GenPoly {
    vars: VarList,
    terms: Vec<Monomial>,
}

impl GenPoly {
    pub fn zero(vars: &VarList) -> Self {
        GenPoly { vars: vars.clone(), terms: Vec::new() }
    }

    pub fn constant(vars: &VarList, c: f64) -> Self {
        let terms = if keep(c) {
            vec![Monomial { coeff: c, exps: std::iter::repeat_n(Exponent::ZERO, vars.len()).collect() }]
        } else {
            Vec::new()
        };
        GenPoly { vars: vars.clone(), terms }
    }

    pub fn var(vars: &VarList, name: &str) -> Result<Self, SymbolicError> {
        Self::monomial(vars, 1.0, &[(name, Exponent::ONE)])
    }

    pub fn monomial(vars: &VarList, coeff: f64, powers: &[(&str, Exponent)]) -> Result<Self, SymbolicError> {
        let mut exps: SmallVec<[Exponent; 3]> = std::iter::repeat_n(Exponent::ZERO, vars.len()).collect();
        for (name, e) in powers {
            let k = vars.index_of(name).ok_or_else(|| SymbolicError::UnknownVariable(name.to_string()))?;
            exps[k] = exps[k].add(*e);
        }
        Ok(Self::from_monomials(vars, vec![Monomial { coeff, exps }]))
    }

    /// Build from raw `(coeff, exponents)` pairs; exponent slices must match `vars` in length.
    pub fn from_terms<I>(vars: &VarList, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, Vec<Exponent>)>,
    {
        let monos = terms
            .into_iter()
            .map(|(c, e)| {
                assert_eq!(e.len(), vars.len(), "exponent vector length must match variable list");
                Monomial { coeff: c, exps: e.into_iter().collect() }
            })
            .collect();
        Self::from_monomials(vars, monos)
    }

    fn from_monomials(vars: &VarList, terms: Vec<Monomial>) -> Self {
        GenPoly { vars: vars.clone(), terms: canonicalize(terms) }
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [t] if t.is_constant() => Some(t.coeff),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Does any term carry a nonzero power of `name`?
    pub fn depends_on(&self, name: &str) -> bool {
        match self.vars.index_of(name) {
            Some(k) => self.terms.iter().any(|t| !t.exps[k].is_zero()),
            None => false,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.abs()))
    }

    fn aligned<'a>(&'a self, other: &'a GenPoly) -> (VarList, Vec<Monomial>, Vec<Monomial>) {
        let vars = self.vars.union(&other.vars);
        let a = if self.vars.same(&vars) { self.terms.clone() } else { remap(&self.terms, &self.vars, &vars) };
        let b = if other.vars.same(&vars) { other.terms.clone() } else { remap(&other.terms, &other.vars, &vars) };
        (vars, a, b)
    }

    fn combine(&self, other: &GenPoly, sign: f64) -> GenPoly {
        if self.vars.same(&other.vars) {
            return GenPoly { vars: self.vars.clone(), terms: merge_sorted(&self.terms, &other.terms, sign) };
        }
        let (vars, a, b) = self.aligned(other);
        let (a, b) = (canonicalize(a), canonicalize(b));
        GenPoly { terms: merge_sorted(&a, &b, sign), vars }
    }

    pub fn add(&self, other: &GenPoly) -> GenPoly {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &GenPoly) -> GenPoly {
        self.combine(other, -1.0)
    }

    pub fn neg(&self) -> GenPoly {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> GenPoly {
        if !keep(c) {
            return GenPoly::zero(&self.vars);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let coeff = t.coeff * c;
                keep(coeff).then(|| Monomial { coeff, exps: t.exps.clone() })
            })
            .collect();
        GenPoly { vars: self.vars.clone(), terms }
    }

    pub fn mul(&self, other: &GenPoly) -> GenPoly {
        let (vars, a, b) = if self.vars.same(&other.vars) {
            (self.vars.clone(), self.terms.clone(), other.terms.clone())
        } else {
            self.aligned(other)
        };
        if a.is_empty() || b.is_empty() {
            return GenPoly::zero(&vars);
        }
        let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let per_chunk = (MUL_CHUNK / big.len()).max(1);
        let mut acc: Vec<Monomial> = Vec::new();
        for chunk in small.chunks(per_chunk) {
            let mut part = Vec::with_capacity(chunk.len() * big.len());
            for s in chunk {
                part.extend(big.iter().map(|t| t.times(s)));
            }
            let part = canonicalize(part);
            acc = if acc.is_empty() { part } else { merge_sorted(&acc, &part, 1.0) };
        }
        GenPoly { vars, terms: acc }
    }

    pub fn pow(&self, k: u32) -> GenPoly {
        let mut out = GenPoly::constant(&self.vars, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative by the power rule; unknown variables give zero.
    pub fn diff(&self, name: &str) -> GenPoly {
        match self.vars.index_of(name) {
            Some(k) => self.diff_index(k),
            None => GenPoly::zero(&self.vars),
        }
    }

    pub fn diff_index(&self, k: usize) -> GenPoly {
        let terms = self
            .terms
            .iter()
            .filter(|t| !t.exps[k].is_zero())
            .map(|t| {
                let e = t.exps[k];
                let mut exps = t.exps.clone();
                exps[k] = e.sub(Exponent::ONE);
                Monomial { coeff: t.coeff * e.value(), exps }
            })
            .collect();
        Self::from_monomials(&self.vars, terms)
    }

    /// `Σ_v v·∂_v p` over every variable of the list (the Euler operator).
    pub fn euler(&self) -> GenPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let degree = t.exps.iter().fold(0.0, |s, e| s + e.value());
                Monomial { coeff: t.coeff * degree, exps: t.exps.clone() }
            })
            .collect();
        Self::from_monomials(&self.vars, terms)
    }

    /// Reciprocal of a single-term polynomial, `None` otherwise.
    pub fn monomial_inverse(&self) -> Option<GenPoly> {
        match self.terms.as_slice() {
            [t] => Some(GenPoly {
                vars: self.vars.clone(),
                terms: vec![Monomial { coeff: 1.0 / t.coeff, exps: t.exps.iter().map(|e| e.neg()).collect() }],
            }),
            _ => None,
        }
    }

    /// Bind `name = value`, folding its powers into the coefficients.
    pub fn substitute(&self, name: &str, value: f64) -> Result<GenPoly, SymbolicError> {
        let Some(k) = self.vars.index_of(name) else {
            return Ok(self.clone());
        };
        if !(value > 0.0) {
            return Err(SymbolicError::NonPositiveBase { name: name.to_string(), value });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut exps = t.exps.clone();
                let e = std::mem::replace(&mut exps[k], Exponent::ZERO);
                Monomial { coeff: t.coeff * power(value, e), exps }
            })
            .collect();
        Ok(Self::from_monomials(&self.vars, terms))
    }

    /// `p(…, λ·name, …)` as a polynomial in the original variables.
    pub fn rescale_var(&self, name: &str, lambda: f64) -> GenPoly {
        let Some(k) = self.vars.index_of(name) else {
            return self.clone();
        };
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial { coeff: t.coeff * power(lambda, t.exps[k]), exps: t.exps.clone() })
            .collect();
        Self::from_monomials(&self.vars, terms)
    }

    /// Re-express over `vars`, which must contain every variable the polynomial uses.
    pub fn with_vars(&self, vars: &VarList) -> Result<GenPoly, SymbolicError> {
        for (k, v) in self.vars.iter().enumerate() {
            if vars.index_of(v.as_str()).is_none() && self.terms.iter().any(|t| !t.exps[k].is_zero()) {
                return Err(SymbolicError::UnknownVariable(v.to_string()));
            }
        }
        Ok(Self::from_monomials(vars, remap(&self.terms, &self.vars, vars)))
    }

    /// Values aligned with [`GenPoly::vars`]. Entries for unused variables are ignored.
    pub fn eval_slice(&self, values: &[f64]) -> f64 {
        let logs: SmallVec<[f64; 3]> = values.iter().map(|v| v.ln()).collect();
        let mut sum = NeumaierSum::default();
        for t in &self.terms {
            sum.add(term_value(t, values, &logs));
        }
        sum.value()
    }

    /// `Σ |term|` at the point; the natural scale for judging cancellation.
    pub fn eval_abs_slice(&self, values: &[f64]) -> f64 {
        let logs: SmallVec<[f64; 3]> = values.iter().map(|v| v.ln()).collect();
        self.terms.iter().map(|t| term_value(t, values, &logs).abs()).sum()
    }

    /// Pull the values this polynomial needs out of `x`, in variable-list order.
    pub fn bind(&self, x: &EvalPoint) -> Result<Vec<f64>, SymbolicError> {
        self.vars
            .iter()
            .enumerate()
            .map(|(k, v)| match x.get(v.as_str()) {
                Some(val) => Ok(val),
                None if self.terms.iter().all(|t| t.exps[k].is_zero()) => Ok(1.0),
                None => Err(SymbolicError::MissingVariable(v.to_string())),
            })
            .collect()
    }

    pub fn eval(&self, x: &EvalPoint) -> Result<f64, SymbolicError> {
        Ok(self.eval_slice(&self.bind(x)?))
    }

    pub fn eval_abs(&self, x: &EvalPoint) -> Result<f64, SymbolicError> {
        Ok(self.eval_abs_slice(&self.bind(x)?))
    }

    /// Structural comparison with coefficient slack: exponent vectors must
    /// match exactly, coefficients within `rel_tol` of the larger polynomial's
    /// biggest coefficient. Terms that cancel to rounding noise are ignored.
    pub fn approx_eq(&self, other: &GenPoly, rel_tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        let diff = self.sub(other);
        diff.terms.iter().all(|t| t.coeff.abs() <= rel_tol * scale)
    }
}

fn power(base: f64, e: Exponent) -> f64 {
    match e.as_integer() {
        Some(0) => 1.0,
        Some(k) if k.abs() <= i32::MAX as i64 => base.powi(k as i32),
        _ => base.powf(e.value()),
    }
}

#[inline]
fn term_value(t: &Monomial, values: &[f64], logs: &[f64]) -> f64 {
    let mut v = t.coeff;
    let mut log_acc = 0.0;
    for (k, e) in t.exps.iter().enumerate() {
        match e {
            Exponent::Rational(r) if r.is_integer() => {
                let n = *r.numer();
                if n != 0 {
                    v *= values[k].powi(n as i32);
                }
            }
            e if e.is_zero() => {}
            e => log_acc += e.value() * logs[k],
        }
    }
    if log_acc != 0.0 {
        v *= log_acc.exp();
    }
    v
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact structural equality: identical exponent vectors and bit-identical coefficients.
impl PartialEq for GenPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars.same(&other.vars) {
            return self.terms.len() == other.terms.len()
                && self
                    .terms
                    .iter()
                    .zip(&other.terms)
                    .all(|(a, b)| a.coeff == b.coeff && cmp_exps(&a.exps, &b.exps) == Ordering::Equal);
        }
        let (_, a, b) = self.aligned(other);
        let (a, b) = (canonicalize(a), canonicalize(b));
        a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| x.coeff == y.coeff && cmp_exps(&x.exps, &y.exps) == Ordering::Equal)
    }
}

impl Add for &GenPoly {
    type Output = GenPoly;
    fn add(self, rhs: &GenPoly) -> GenPoly {
        GenPoly::add(self, rhs)
    }
}

impl Sub for &GenPoly {
    type Output = GenPoly;
    fn sub(self, rhs: &GenPoly) -> GenPoly {
        GenPoly::sub(self, rhs)
    }
}

impl Mul for &GenPoly {
    type Output = GenPoly;
    fn mul(self, rhs: &GenPoly) -> GenPoly {
        GenPoly::mul(self, rhs)
    }
}

impl Neg for &GenPoly {
    type Output = GenPoly;
    fn neg(self) -> GenPoly {
        GenPoly::neg(self)
    }
}

pub(crate) fn fmt_coeff(c: f64) -> String {
    let a = c.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{c}")
    } else {
        format!("{c:e}")
    }
}

/// Parser grammar: `2*S^(1/2) - Q`, coefficient omitted when it is one.
impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff < 0.0;
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            let a = t.coeff.abs();
            if a != 1.0 || t.is_constant() {
                factors.push(fmt_coeff(a));
            }
            for (k, e) in t.exps.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let name = self.vars.get(k);
                if e.as_integer() == Some(1) {
                    factors.push(name.to_string());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// Strictly positive coordinates keyed by variable name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint(BTreeMap<String, f64>);

impl EvalPoint {
    pub fn new<S: AsRef<str>>(pairs: &[(S, f64)]) -> Result<Self, SymbolicError> {
        let mut map = BTreeMap::new();
        for (name, value) in pairs {
            check_positive(name.as_ref(), *value)?;
            map.insert(name.as_ref().to_string(), *value);
        }
        Ok(EvalPoint(map))
    }

    pub fn empty() -> Self {
        EvalPoint(BTreeMap::new())
    }

    /// Point over `vars` with coordinates in list order.
    pub fn from_slice(vars: &VarList, values: &[f64]) -> Result<Self, SymbolicError> {
        let pairs: Vec<(&str, f64)> = vars.iter().map(VarId::as_str).zip(values.iter().copied()).collect();
        Self::new(&pairs)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    /// Copy with `name` set (added or replaced).
    pub fn with(&self, name: &str, value: f64) -> Result<Self, SymbolicError> {
        check_positive(name, value)?;
        let mut map = self.0.clone();
        map.insert(name.to_string(), value);
        Ok(EvalPoint(map))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn to_slice(&self, vars: &VarList) -> Result<Vec<f64>, SymbolicError> {
        vars.iter()
            .map(|v| self.get(v.as_str()).ok_or_else(|| SymbolicError::MissingVariable(v.to_string())))
            .collect()
    }
}

fn check_positive(name: &str, value: f64) -> Result<(), SymbolicError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SymbolicError::NonPositiveBase { name: name.to_string(), value })
    }
}
