//! Laurent polynomials and rational functions in `X`, and the multiplicative
//! group of formal units `c * X^m * prod(eps_i^{n_i})` where local constants live.
//!
//! Normal forms: a [`RationalFraction`] is `X^s * P / Q` with `P(0) != 0`,
//! `Q(0) = 1` and `gcd(P, Q) = 1`; a [`FactorExpr`] moves the scalar `P(0)`
//! and the power `X^s` into its unit, so its fraction has `P(0) = Q(0) = 1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::poly::Poly;
use crate::weil::Line;

/// `X^low * poly` with `poly(0) != 0`, or the zero polynomial with `low = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i64,
    poly: Poly,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            low: 0,
            poly: Poly::zero(),
        }
    }

    pub fn one() -> Self {
        LaurentPoly::from_poly(Poly::one())
    }

    pub fn monomial(c: FieldElem, e: i64) -> Self {
        LaurentPoly::shifted(Poly::constant(c), e)
    }

    pub fn from_poly(p: Poly) -> Self {
        LaurentPoly::shifted(p, 0)
    }

    /// `X^shift * p`, renormalized.
    pub fn shifted(p: Poly, shift: i64) -> Self {
        if p.is_zero() {
            return LaurentPoly::zero();
        }
        let z = p.coeffs().iter().take_while(|c| c.is_zero()).count();
        LaurentPoly {
            low: shift + z as i64,
            poly: Poly::from_coeffs(p.coeffs()[z..].to_vec()),
        }
    }

    /// Builds from `(exponent, coefficient)` terms; repeated exponents add up.
    pub fn from_terms(ctx: &FieldCtx, terms: &[(i64, FieldElem)]) -> Self {
        let Some(low) = terms.iter().map(|t| t.0).min() else {
            return LaurentPoly::zero();
        };
        let high = terms.iter().map(|t| t.0).max().expect("nonempty");
        let mut c = vec![FieldElem::ZERO; (high - low + 1) as usize];
        for &(e, v) in terms {
            let i = (e - low) as usize;
            c[i] = ctx.add(c[i], v);
        }
        LaurentPoly::shifted(Poly::from_coeffs(c), low)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.poly.is_one()
    }

    /// Lowest exponent with a nonzero coefficient (0 for the zero polynomial).
    pub fn low_exp(&self) -> i64 {
        self.low
    }

    /// The polynomial part, with nonzero constant term.
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn coeff(&self, e: i64) -> FieldElem {
        if e < self.low {
            return FieldElem::ZERO;
        }
        self.poly.coeff((e - self.low) as usize)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> Vec<(i64, FieldElem)> {
        self.poly
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (self.low + i as i64, c))
            .collect()
    }

    pub fn add(&self, ctx: &FieldCtx, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let a = Poly::from_coeffs(lift(&self.poly, (self.low - low) as usize));
        let b = Poly::from_coeffs(lift(&other.poly, (other.low - low) as usize));
        LaurentPoly::shifted(a.add(ctx, &b), low)
    }

    pub fn neg(&self, ctx: &FieldCtx) -> LaurentPoly {
        self.scale(ctx, ctx.neg(FieldElem::ONE))
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &LaurentPoly) -> LaurentPoly {
        self.add(ctx, &other.neg(ctx))
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElem) -> LaurentPoly {
        LaurentPoly::shifted(self.poly.scale(ctx, c), self.low)
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::shifted(self.poly.mul(ctx, &other.poly), self.low + other.low)
    }

    /// Substitutes `X -> c * X^{-1}`.
    pub fn substitute_inv(&self, ctx: &FieldCtx, c: FieldElem) -> LaurentPoly {
        let terms: Vec<(i64, FieldElem)> = self
            .terms()
            .into_iter()
            .map(|(e, v)| (-e, ctx.mul(v, ctx.pow(c, e).expect("c is nonzero"))))
            .collect();
        LaurentPoly::from_terms(ctx, &terms)
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .into_iter()
            .map(|(e, c)| {
                if e == 0 {
                    ctx.format(c)
                } else {
                    format!("{}*X^{}", ctx.format(c), e)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn lift(p: &Poly, by: usize) -> Vec<FieldElem> {
    let mut v = vec![FieldElem::ZERO; by];
    v.extend_from_slice(p.coeffs());
    v
}

/// A reduced quotient of Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFraction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFraction {
    pub fn one() -> Self {
        RationalFraction {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn new(ctx: &FieldCtx, num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFraction {
                num,
                den: LaurentPoly::one(),
            });
        }
        let g = num.poly.gcd(ctx, &den.poly);
        let p = num.poly.div_exact(ctx, &g)?;
        let q = den.poly.div_exact(ctx, &g)?;
        let c = ctx.inv(q.coeff(0))?;
        Ok(RationalFraction {
            num: LaurentPoly::shifted(p.scale(ctx, c), num.low - den.low),
            den: LaurentPoly::from_poly(q.scale(ctx, c)),
        })
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        RationalFraction {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    /// Already-reduced constructor used when coprimality is known.
    fn from_parts(num: LaurentPoly, den: LaurentPoly) -> Self {
        RationalFraction { num, den }
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the denominator is 1 and the numerator a single term.
    pub fn is_monomial(&self) -> bool {
        self.den.is_one() && self.num.poly.degree() == Some(0)
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &RationalFraction) -> RationalFraction {
        RationalFraction::new(
            ctx,
            self.num.mul(ctx, &other.num),
            self.den.mul(ctx, &other.den),
        )
        .expect("denominators are nonzero")
    }

    pub fn div(&self, ctx: &FieldCtx, other: &RationalFraction) -> Result<RationalFraction> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFraction::new(
            ctx,
            self.num.mul(ctx, &other.den),
            self.den.mul(ctx, &other.num),
        )
    }

    /// Substitutes `X -> c * X^{-1}` and renormalizes.
    pub fn substitute_inv(&self, ctx: &FieldCtx, c: FieldElem) -> RationalFraction {
        RationalFraction::new(
            ctx,
            self.num.substitute_inv(ctx, c),
            self.den.substitute_inv(ctx, c),
        )
        .expect("substitution keeps the denominator nonzero")
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        if self.is_one() {
            return "1".into();
        }
        format!("({})/({})", self.num.render(ctx), self.den.render(ctx))
    }
}

/// `prod 1/(1 - a_i X)`, reduced.
pub fn euler_factor(ctx: &FieldCtx, reciprocal_roots: &[FieldElem]) -> RationalFraction {
    let mut lp = LinearProduct::new();
    for &a in reciprocal_roots {
        lp.mul_linear(a, -1);
    }
    lp.into_fraction(ctx)
}

/// An opaque epsilon token: one per isomorphism class `nu^twist * base(line)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenId {
    pub line: Line,
    pub twist: u32,
}

impl TokenId {
    pub fn render(&self, ctx: &FieldCtx) -> String {
        format!("eps[{};a={}]", self.line.base().render(ctx), self.twist)
    }
}

/// `scalar * X^x_power * prod(tokens)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitExpr {
    pub scalar: FieldElem,
    pub x_power: i64,
    pub tokens: BTreeMap<TokenId, i64>,
}

impl UnitExpr {
    pub fn one() -> Self {
        UnitExpr {
            scalar: FieldElem::ONE,
            x_power: 0,
            tokens: BTreeMap::new(),
        }
    }

    pub fn monomial(scalar: FieldElem, x_power: i64) -> Self {
        UnitExpr {
            scalar,
            x_power,
            tokens: BTreeMap::new(),
        }
    }

    pub fn token(t: TokenId) -> Self {
        let mut u = UnitExpr::one();
        u.tokens.insert(t, 1);
        u
    }

    pub fn is_one(&self) -> bool {
        self.scalar == FieldElem::ONE && self.x_power == 0 && self.tokens.is_empty()
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &UnitExpr) -> UnitExpr {
        let mut tokens = self.tokens.clone();
        for (t, &e) in &other.tokens {
            add_exponent(&mut tokens, t.clone(), e);
        }
        UnitExpr {
            scalar: ctx.mul(self.scalar, other.scalar),
            x_power: self.x_power + other.x_power,
            tokens,
        }
    }

    pub fn pow(&self, ctx: &FieldCtx, e: i64) -> UnitExpr {
        let mut tokens = BTreeMap::new();
        if e != 0 {
            tokens = self.tokens.iter().map(|(t, &k)| (t.clone(), k * e)).collect();
        }
        UnitExpr {
            scalar: ctx.pow(self.scalar, e).expect("unit scalar is nonzero"),
            x_power: self.x_power * e,
            tokens,
        }
    }

    pub fn inv(&self, ctx: &FieldCtx) -> UnitExpr {
        UnitExpr {
            scalar: ctx.inv(self.scalar).expect("unit scalar is nonzero"),
            x_power: -self.x_power,
            tokens: self.tokens.iter().map(|(t, &e)| (t.clone(), -e)).collect(),
        }
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        let tokens = if self.tokens.is_empty() {
            "1".to_string()
        } else {
            self.tokens
                .iter()
                .map(|(t, e)| format!("{}^{}", t.render(ctx), e))
                .collect::<Vec<_>>()
                .join("*")
        };
        format!("{}*X^{}*{}", ctx.format(self.scalar), self.x_power, tokens)
    }
}

fn add_exponent<K: Ord>(map: &mut BTreeMap<K, i64>, k: K, e: i64) {
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += e;
            if *o.get() == 0 {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            if e != 0 {
                v.insert(e);
            }
        }
    }
}

/// A nonzero element of the fraction field, times formal tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorExpr {
    pub unit: UnitExpr,
    pub frac: RationalFraction,
}

impl FactorExpr {
    pub fn one() -> Self {
        FactorExpr {
            unit: UnitExpr::one(),
            frac: RationalFraction::one(),
        }
    }

    pub fn from_unit(unit: UnitExpr) -> Self {
        FactorExpr {
            unit,
            frac: RationalFraction::one(),
        }
    }

    /// Splits a nonzero fraction into its unit part and a normalized fraction.
    pub fn from_fraction(ctx: &FieldCtx, r: &RationalFraction) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = r.num.poly.coeff(0);
        let inv = ctx.inv(c)?;
        Ok(FactorExpr {
            unit: UnitExpr::monomial(c, r.num.low),
            frac: RationalFraction::from_parts(
                LaurentPoly::from_poly(r.num.poly.scale(ctx, inv)),
                r.den.clone(),
            ),
        })
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &FactorExpr) -> FactorExpr {
        let frac = self.frac.mul(ctx, &other.frac);
        let f = FactorExpr::from_fraction(ctx, &frac).expect("product of nonzero fractions");
        FactorExpr {
            unit: self.unit.mul(ctx, &other.unit).mul(ctx, &f.unit),
            frac: f.frac,
        }
    }

    pub fn inv(&self, ctx: &FieldCtx) -> FactorExpr {
        let frac = RationalFraction::new(ctx, self.frac.den.clone(), self.frac.num.clone())
            .expect("nonzero numerator");
        let f = FactorExpr::from_fraction(ctx, &frac).expect("nonzero");
        FactorExpr {
            unit: self.unit.inv(ctx).mul(ctx, &f.unit),
            frac: f.frac,
        }
    }

    pub fn div(&self, ctx: &FieldCtx, other: &FactorExpr) -> FactorExpr {
        self.mul(ctx, &other.inv(ctx))
    }

    /// Substitutes `X -> c X^{-1}`; only defined without tokens, which are
    /// functions of `X` whose substitution the model does not track.
    pub fn substitute_inv(&self, ctx: &FieldCtx, c: FieldElem) -> Result<FactorExpr> {
        if !self.unit.tokens.is_empty() {
            return Err(Error::InvalidInput(
                "cannot substitute into opaque tokens".into(),
            ));
        }
        let m = self.unit.x_power;
        let scalar = ctx.mul(self.unit.scalar, ctx.pow(c, m)?);
        let f = FactorExpr::from_fraction(ctx, &self.frac.substitute_inv(ctx, c))?;
        Ok(FactorExpr {
            unit: UnitExpr::monomial(scalar, -m).mul(ctx, &f.unit),
            frac: f.frac,
        })
    }

    pub fn is_unit(&self) -> Option<UnitExpr> {
        self.frac.is_one().then(|| self.unit.clone())
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        format!(
            "unit: {}  frac: {}",
            self.unit.render(ctx),
            self.frac.render(ctx)
        )
    }
}

/// Accumulates a unit times a product of powers of linear factors `(1 - aX)`.
/// Converting to a fraction needs no gcd since distinct factors are coprime.
#[derive(Clone, Debug, Default)]
pub struct LinearProduct {
    unit: Option<UnitExpr>,
    exponents: BTreeMap<FieldElem, i64>,
}

impl LinearProduct {
    pub fn new() -> Self {
        LinearProduct::default()
    }

    /// Multiplies by `(1 - aX)^e`.
    pub fn mul_linear(&mut self, a: FieldElem, e: i64) {
        if !a.is_zero() && e != 0 {
            add_exponent(&mut self.exponents, a, e);
        }
    }

    pub fn mul_unit(&mut self, ctx: &FieldCtx, u: &UnitExpr) {
        self.unit = Some(match &self.unit {
            Some(v) => v.mul(ctx, u),
            None => u.clone(),
        });
    }

    pub fn exponents(&self) -> &BTreeMap<FieldElem, i64> {
        &self.exponents
    }

    fn fraction(&self, ctx: &FieldCtx) -> RationalFraction {
        let mut num = Poly::one();
        let mut den = Poly::one();
        for (&a, &e) in &self.exponents {
            let lin = Poly::one_minus(ctx, a).pow(ctx, e.unsigned_abs() as u32);
            if e > 0 {
                num = num.mul(ctx, &lin);
            } else {
                den = den.mul(ctx, &lin);
            }
        }
        RationalFraction::from_parts(LaurentPoly::from_poly(num), LaurentPoly::from_poly(den))
    }

    /// The fraction times the scalar and `X`-power of the unit; tokens are dropped.
    pub fn into_fraction(self, ctx: &FieldCtx) -> RationalFraction {
        let frac = self.fraction(ctx);
        match &self.unit {
            Some(u) => RationalFraction::from_parts(
                LaurentPoly::shifted(frac.num.poly.scale(ctx, u.scalar), u.x_power),
                frac.den,
            ),
            None => frac,
        }
    }

    pub fn into_factor(self, ctx: &FieldCtx) -> FactorExpr {
        FactorExpr {
            frac: self.fraction(ctx),
            unit: self.unit.unwrap_or_else(UnitExpr::one),
        }
    }
}
