use std::fmt;

use super::poly::{EvalPoint, GenPoly, VarList};
use super::SymbolicError;

/// Quotient of two generalized polynomials.
///
/// Never reduced to lowest terms: there is no GCD for sums with real
/// exponents. Two normalizations are applied because they are exact:
/// a zero numerator becomes `0/1`, and a single-term denominator is folded
/// into the numerator as negative powers. Equality of values is therefore a
/// numerical question; `==` only compares representations.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalExpr {
    num: GenPoly,
    den: GenPoly,
}

impl RationalExpr {
    pub fn new(num: GenPoly, den: GenPoly) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZeroExpression);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: GenPoly) -> Self {
        let den = GenPoly::constant(p.vars(), 1.0);
        RationalExpr { num: p, den }
    }

    pub fn zero(vars: &VarList) -> Self {
        Self::from_poly(GenPoly::zero(vars))
    }

    pub fn constant(vars: &VarList, c: f64) -> Self {
        Self::from_poly(GenPoly::constant(vars, c))
    }

    fn normalized(num: GenPoly, den: GenPoly) -> Self {
        if num.is_zero() {
            return Self::zero(den.vars());
        }
        match den.monomial_inverse() {
            Some(inv) => Self::from_poly(num.mul(&inv)),
            None => RationalExpr { num, den },
        }
    }

    pub fn num(&self) -> &GenPoly {
        &self.num
    }

    pub fn den(&self) -> &GenPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Denominator is the constant one, i.e. the value is a plain polynomial.
    pub fn is_poly(&self) -> bool {
        self.den.as_constant() == Some(1.0)
    }

    /// Largest term count of the two parts.
    pub fn size(&self) -> usize {
        self.num.len().max(self.den.len())
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.combine(other, true)
    }

    fn combine(&self, other: &RationalExpr, subtract: bool) -> RationalExpr {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { other.neg() } else { other.clone() };
        }
        let pick = |a: &GenPoly, b: &GenPoly| if subtract { a.sub(b) } else { a.add(b) };
        if self.den == other.den {
            return Self::normalized(pick(&self.num, &other.num), self.den.clone());
        }
        if other.is_poly() {
            return Self::normalized(pick(&self.num, &other.num.mul(&self.den)), self.den.clone());
        }
        if self.is_poly() {
            return Self::normalized(pick(&self.num.mul(&other.den), &other.num), other.den.clone());
        }
        let num = pick(&self.num.mul(&other.den), &other.num.mul(&self.den));
        Self::normalized(num, self.den.mul(&other.den))
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.num.vars());
        }
        let den = match (self.is_poly(), other.is_poly()) {
            (true, true) => return Self::from_poly(self.num.mul(&other.num)),
            (true, false) => other.den.clone(),
            (false, true) => self.den.clone(),
            (false, false) => self.den.mul(&other.den),
        };
        Self::normalized(self.num.mul(&other.num), den)
    }

    pub fn div(&self, other: &RationalExpr) -> Result<RationalExpr, SymbolicError> {
        if other.is_zero() {
            return Err(SymbolicError::DivisionByZeroExpression);
        }
        let flipped = Self::normalized(other.den.clone(), other.num.clone());
        Ok(self.mul(&flipped))
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: f64) -> RationalExpr {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &GenPoly) -> RationalExpr {
        Self::normalized(self.num.mul(p), self.den.clone())
    }

    /// Quotient rule `(n'·d − n·d')/d²`; polynomial inputs differentiate termwise.
    pub fn diff(&self, name: &str) -> RationalExpr {
        if self.is_poly() {
            return Self::from_poly(self.num.diff(name));
        }
        let dn = self.num.diff(name);
        let dd = self.den.diff(name);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::normalized(num, self.den.mul(&self.den))
    }

    pub fn eval(&self, x: &EvalPoint) -> Result<f64, SymbolicError> {
        let n = self.num.eval(x)?;
        if self.is_poly() {
            return Ok(n);
        }
        Ok(n / self.den.eval(x)?)
    }

    /// Values aligned to the numerator's variable list (see [`GenPoly::eval_slice`]).
    pub fn eval_slice(&self, values: &[f64]) -> f64 {
        let n = self.num.eval_slice(values);
        if self.is_poly() {
            n
        } else {
            n / self.den.eval_slice(values)
        }
    }

    /// Value together with a first-order bound on its relative rounding error.
    ///
    /// The bound is `8ε (Σ|num terms| / |num| + Σ|den terms| / |den|)`, which
    /// grows without limit as either sum cancels toward zero.
    pub fn eval_slice_with_error(&self, values: &[f64]) -> (f64, f64) {
        let cond = |p: &GenPoly| {
            let v = p.eval_slice(values);
            let abs = p.eval_abs_slice(values);
            let c = if abs == 0.0 { 0.0 } else { abs / v.abs() };
            (v, c)
        };
        let (n, cn) = cond(&self.num);
        if self.num.is_zero() {
            return (0.0, 0.0);
        }
        let (d, cd) = if self.is_poly() { (1.0, 0.0) } else { cond(&self.den) };
        (n / d, 8.0 * f64::EPSILON * (cn + cd))
    }

    pub fn substitute(&self, name: &str, value: f64) -> Result<RationalExpr, SymbolicError> {
        let num = self.num.substitute(name, value)?;
        let den = self.den.substitute(name, value)?;
        Self::new(num, den)
    }

    /// Re-express both parts over a (super)set of variables.
    pub fn with_vars(&self, vars: &VarList) -> Result<RationalExpr, SymbolicError> {
        Ok(RationalExpr { num: self.num.with_vars(vars)?, den: self.den.with_vars(vars)? })
    }
}

impl From<GenPoly> for RationalExpr {
    fn from(p: GenPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
