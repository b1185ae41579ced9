//! Local constants `L`, `gamma` and `epsilon` of Deligne classes, with the
//! additive character fixed at level zero so unramified epsilons are trivial.

use crate::deligne::{dual_class, tensor_ss, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::laurent::{euler_factor, FactorExpr, LinearProduct, RationalFraction, TokenId, UnitExpr};
use crate::matrixmodel::{raw_tensor, realize};
use crate::weil::{twist, FusionTable, IrredRep, Line};

pub use crate::matrixmodel::l_factor_matrix;

/// `det(1 - X Frob | ker U)^-1`: one factor per segment on an unramified line,
/// taken at its last twist.
pub fn l_factor(ctx: &FieldCtx, a: &DeligneClass) -> RationalFraction {
    let mut roots = Vec::new();
    for (x, m) in a.iter() {
        if let Indec::Seg { line, r, a } = x {
            if let IrredRep::Char(t) = line.base() {
                let s = ctx.mul(*t, ctx.nu_pow(*a as i64 + *r as i64 - 1));
                roots.extend(std::iter::repeat(s).take(m as usize));
            }
        }
    }
    euler_factor(ctx, &roots)
}

/// Contribution of the irreducible `nu^k base(line)`.
pub(crate) fn gamma_constituent(ctx: &FieldCtx, line: &Line, k: u32, lp: &mut LinearProduct, e: i64) {
    match line.base() {
        IrredRep::Char(_) if ctx.o_nu() > 1 => {
            // (1 - sX) / (1 - (sqX)^-1) = (-sqX) (1 - sX) / (1 - sqX)
            let s = line.member(ctx, k as i64).twist_value();
            let sq = ctx.mul(s, ctx.q_img());
            lp.mul_linear(s, e);
            lp.mul_linear(sq, -e);
            lp.mul_unit(ctx, &UnitExpr::monomial(ctx.neg(sq), 1).pow(ctx, e));
        }
        _ => {
            let mut u = UnitExpr::one();
            u.tokens.insert(
                TokenId {
                    line: line.clone(),
                    twist: k,
                },
                e,
            );
            lp.mul_unit(ctx, &u);
        }
    }
}

/// Product of the gamma factors of all irreducible constituents.
pub fn gamma_factor(ctx: &FieldCtx, a: &DeligneClass) -> FactorExpr {
    let mut lp = LinearProduct::new();
    for ((line, k), m) in a.constituents() {
        gamma_constituent(ctx, &line, k, &mut lp, m as i64);
    }
    lp.into_factor(ctx)
}

/// `gamma(X) L(X) / L(q^-1 X^-1, dual)`, which must be a unit.
pub fn epsilon_factor(ctx: &FieldCtx, a: &DeligneClass) -> Result<FactorExpr> {
    let gamma = gamma_factor(ctx, a);
    let l = FactorExpr::from_fraction(ctx, &l_factor(ctx, a))?;
    let l_dual = l_factor(ctx, &dual_class(ctx, a)).substitute_inv(ctx, ctx.q_inv());
    let l_dual = FactorExpr::from_fraction(ctx, &l_dual)?;
    let eps = gamma.mul(ctx, &l).div(ctx, &l_dual);
    if eps.is_unit().is_none() {
        return Err(Error::EpsilonNotUnit(eps.render(ctx)));
    }
    Ok(eps)
}

/// The three sides of the multiplicativity identity for segments of lengths
/// `n >= m` over unramified characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativityReport {
    pub tensor_side: RationalFraction,
    pub product_side: RationalFraction,
    pub matrix_side: RationalFraction,
}

impl MultiplicativityReport {
    pub fn holds(&self) -> bool {
        self.tensor_side == self.product_side && self.tensor_side == self.matrix_side
    }
}

pub fn multiplicativity_report(
    ctx: &FieldCtx,
    n: u32,
    m: u32,
    psi: &IrredRep,
    psi2: &IrredRep,
) -> Result<MultiplicativityReport> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput("expected 1 <= m <= n".into()));
    }
    if psi.is_ramified() || psi2.is_ramified() {
        return Err(Error::RamifiedLine);
    }
    let table = FusionTable::new();
    let left = DeligneClass::single(Indec::seg(ctx, psi, n, 0)?);
    let right = DeligneClass::single(Indec::seg(ctx, psi2, m, 0)?);
    let tensor_side = l_factor(ctx, &tensor_ss(ctx, &left, &right, &table)?);
    let top = DeligneClass::single(Indec::seg(ctx, &twist(ctx, psi, n as i64 - 1), 1, 0)?);
    let mut product_side = RationalFraction::one();
    for k in 0..m {
        let other = DeligneClass::single(Indec::seg(ctx, &twist(ctx, psi2, k as i64), 1, 0)?);
        let l = l_factor(ctx, &tensor_ss(ctx, &top, &other, &table)?);
        product_side = product_side.mul(ctx, &l);
    }
    let raw = raw_tensor(&realize(ctx, &left)?, &realize(ctx, &right)?)?;
    let matrix_side = l_factor_matrix(&raw)?;
    Ok(MultiplicativityReport {
        tensor_side,
        product_side,
        matrix_side,
    })
}

pub fn check_multiplicativity(
    ctx: &FieldCtx,
    n: u32,
    m: u32,
    psi: &IrredRep,
    psi2: &IrredRep,
) -> Result<bool> {
    Ok(multiplicativity_report(ctx, n, m, psi, psi2)?.holds())
}

/// `(-(tX)^o)^r`, the expected epsilon of a banal cycle of length `r`.
pub fn banal_cycle_unit(ctx: &FieldCtx, t: FieldElem, r: u32) -> UnitExpr {
    let o = ctx.o_nu() as u64;
    let base = UnitExpr::monomial(ctx.neg(ctx.powu(t, o)), o as i64);
    (0..r).fold(UnitExpr::one(), |acc, _| acc.mul(ctx, &base))
}
