//! Dense univariate polynomials over a context field.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

/// Coefficients from low to high degree, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(FieldElem::ONE)
    }

    pub fn constant(c: FieldElem) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * X^e`.
    pub fn monomial(c: FieldElem, e: usize) -> Self {
        let mut v = vec![FieldElem::ZERO; e + 1];
        v[e] = c;
        Poly::from_coeffs(v)
    }

    pub fn x() -> Self {
        Poly::monomial(FieldElem::ONE, 1)
    }

    /// `1 - a X`.
    pub fn one_minus(ctx: &FieldCtx, a: FieldElem) -> Self {
        Poly::from_coeffs(vec![FieldElem::ONE, ctx.neg(a)])
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [FieldElem::ONE]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn lead(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| ctx.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| ctx.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, ctx: &FieldCtx, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(ctx, self))
    }

    pub fn divrem(&self, ctx: &FieldCtx, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv_lead = ctx.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![FieldElem::ZERO; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = ctx.mul(r[i + dd], inv_lead);
            q[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                r[i + j] = ctx.sub(r[i + j], ctx.mul(c, b));
            }
        }
        r.truncate(dd);
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, ctx: &FieldCtx, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(ctx, d)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self, ctx: &FieldCtx) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = ctx.inv(self.lead()).expect("nonzero lead");
        self.scale(ctx, inv)
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(ctx, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c))
                .collect(),
        )
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    /// For `f` with zero derivative, the unique `g` with `g^ell = f`.
    fn frobenius_root(&self, ctx: &FieldCtx) -> Poly {
        let ell = ctx.ell() as usize;
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .step_by(ell)
                .map(|&c| ctx.frobenius_root(c))
                .collect(),
        )
    }

    /// Monic squarefree part: the product of the distinct monic irreducible
    /// factors. Handles inseparable powers in characteristic `ell`.
    pub fn radical(&self, ctx: &FieldCtx) -> Poly {
        let f = self.monic(ctx);
        if f.degree().unwrap_or(0) == 0 {
            return Poly::one();
        }
        let df = f.derivative(ctx);
        if df.is_zero() {
            return f.frobenius_root(ctx).radical(ctx);
        }
        let g = f.gcd(ctx, &df);
        let h = f.div_exact(ctx, &g).expect("gcd divides");
        let rg = g.radical(ctx);
        let common = h.gcd(ctx, &rg);
        h.mul(ctx, &rg)
            .div_exact(ctx, &common)
            .expect("gcd divides")
            .monic(ctx)
    }

    /// Roots in the context field, with multiplicity, in code order.
    pub fn roots(&self, ctx: &FieldCtx) -> Vec<FieldElem> {
        let mut out = Vec::new();
        let mut f = self.clone();
        if f.is_zero() {
            return out;
        }
        for x in ctx.elements() {
            if f.degree() == Some(0) {
                break;
            }
            let lin = Poly::from_coeffs(vec![ctx.neg(x), FieldElem::ONE]);
            loop {
                let (q, r) = f.divrem(ctx, &lin).expect("monic divisor");
                if !r.is_zero() {
                    break;
                }
                out.push(x);
                f = q;
            }
        }
        out
    }
}
