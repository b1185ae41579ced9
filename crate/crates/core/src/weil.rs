//! Formal irreducible representations of the Weil group, their lines of
//! unramified twists, duals, and fusion data for tensor products.
//!
//! Every irreducible carries an unramified multiplier `u`: an unramified
//! character is `chi_t` with `u = t`, and an abstract irreducible with label
//! `L` and multiplier `u` stands for `chi_u (x) Psi_L`. Twisting by `nu^k`
//! multiplies `u` by `q^{-k}`, so the line of an irreducible is the orbit of
//! `u` under `<q>`, and isomorphism classes are read modulo the order of the line.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractIrr {
    pub label: String,
    pub dim: u32,
    /// Number of distinct unramified twists `o(Psi)`.
    pub order: u32,
    pub dual_label: String,
    /// Unramified multiplier; one for the declared representative.
    pub twist: FieldElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IrredRep {
    /// Unramified character sending Frobenius to `t`.
    Char(FieldElem),
    Abstract(AbstractIrr),
}

impl IrredRep {
    pub fn unram(t: FieldElem) -> Self {
        IrredRep::Char(t)
    }

    pub fn abstract_irr(label: &str, dim: u32, order: u32, dual_label: &str) -> Self {
        IrredRep::Abstract(AbstractIrr {
            label: label.to_string(),
            dim,
            order,
            dual_label: dual_label.to_string(),
            twist: FieldElem::ONE,
        })
    }

    pub fn dim(&self) -> u32 {
        match self {
            IrredRep::Char(_) => 1,
            IrredRep::Abstract(a) => a.dim,
        }
    }

    pub fn order(&self, ctx: &FieldCtx) -> u32 {
        match self {
            IrredRep::Char(_) => ctx.o_nu(),
            IrredRep::Abstract(a) => a.order,
        }
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self, IrredRep::Abstract(_))
    }

    pub fn twist_value(&self) -> FieldElem {
        match self {
            IrredRep::Char(t) => *t,
            IrredRep::Abstract(a) => a.twist,
        }
    }

    fn with_twist_value(&self, v: FieldElem) -> Self {
        match self {
            IrredRep::Char(_) => IrredRep::Char(v),
            IrredRep::Abstract(a) => IrredRep::Abstract(AbstractIrr {
                twist: v,
                ..a.clone()
            }),
        }
    }

    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        if self.twist_value().is_zero() {
            return Err(Error::InvalidInput("character value must be nonzero".into()));
        }
        if let IrredRep::Abstract(a) = self {
            if a.dim == 0 || a.order == 0 {
                return Err(Error::InvalidInput(format!(
                    "{}: dimension and order must be positive",
                    a.label
                )));
            }
            if ctx.o_nu() % a.order != 0 {
                return Err(Error::InvalidInput(format!(
                    "{}: order {} does not divide o(nu) = {}",
                    a.label,
                    a.order,
                    ctx.o_nu()
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        match self {
            IrredRep::Char(t) => format!("chi(t={})", ctx.format(*t)),
            IrredRep::Abstract(a) => {
                let mut s = format!(
                    "irr({}, dim={}, ord={}, dual={}",
                    a.label, a.dim, a.order, a.dual_label
                );
                if a.twist != FieldElem::ONE {
                    s.push_str(&format!(", u={}", ctx.format(a.twist)));
                }
                s.push(')');
                s
            }
        }
    }
}

/// `nu^k * psi`.
pub fn twist(ctx: &FieldCtx, psi: &IrredRep, k: i64) -> IrredRep {
    psi.with_twist_value(ctx.mul(psi.twist_value(), ctx.nu_pow(k)))
}

/// `chi_s (x) psi` for the unramified character `chi_s`.
pub fn twist_by_char(ctx: &FieldCtx, psi: &IrredRep, s: FieldElem) -> IrredRep {
    psi.with_twist_value(ctx.mul(psi.twist_value(), s))
}

pub fn dual_irr(ctx: &FieldCtx, psi: &IrredRep) -> IrredRep {
    let inv = ctx.inv(psi.twist_value()).expect("validated nonzero");
    match psi {
        IrredRep::Char(_) => IrredRep::Char(inv),
        IrredRep::Abstract(a) => IrredRep::Abstract(AbstractIrr {
            label: a.dual_label.clone(),
            dual_label: a.label.clone(),
            twist: inv,
            ..a.clone()
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum LineKey {
    Unram(u32),
    Ram(String, u32),
}

/// The orbit `{nu^k psi}` with its canonical base point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    base: IrredRep,
    order: u32,
    key: LineKey,
}

impl Ord for Line {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl PartialOrd for Line {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Line {
    pub fn of(ctx: &FieldCtx, psi: &IrredRep) -> Line {
        locate(ctx, psi).0
    }

    pub fn base(&self) -> &IrredRep {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> u32 {
        self.base.dim()
    }

    pub fn is_ramified(&self) -> bool {
        self.base.is_ramified()
    }

    /// `nu^a * base`.
    pub fn member(&self, ctx: &FieldCtx, a: i64) -> IrredRep {
        twist(ctx, &self.base, a)
    }

    pub fn dual(&self, ctx: &FieldCtx) -> Line {
        Line::of(ctx, &dual_irr(ctx, &self.base))
    }

    pub fn twist_by_char(&self, ctx: &FieldCtx, s: FieldElem) -> Line {
        Line::of(ctx, &twist_by_char(ctx, &self.base, s))
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        format!("line({})", self.base.render(ctx))
    }
}

/// Canonical line of `psi` and the twist `a in [0, o(psi))` with `psi = nu^a base`.
///
/// The base has the multiplier of least discrete log in the orbit `u <q>`.
pub fn locate(ctx: &FieldCtx, psi: &IrredRep) -> (Line, u32) {
    let v = psi.twist_value();
    let q = ctx.q_img();
    let mut w = v;
    let mut best = (ctx.dlog(v).expect("nonzero multiplier"), 0u32, v);
    for j in 1..ctx.o_nu() {
        // w = v q^j, hence v = nu^j (w)
        w = ctx.mul(w, q);
        let l = ctx.dlog(w).expect("nonzero");
        if l < best.0 {
            best = (l, j, w);
        }
    }
    let order = psi.order(ctx);
    let base = psi.with_twist_value(best.2);
    let key = match &base {
        IrredRep::Char(_) => LineKey::Unram(best.0),
        IrredRep::Abstract(a) => LineKey::Ram(a.label.clone(), best.0),
    };
    (Line { base, order, key }, best.1 % order)
}

/// Semisimplified tensor products of declared abstract irreducibles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FusionTable {
    decls: BTreeMap<String, AbstractIrr>,
    rules: BTreeMap<(String, String), Vec<(i64, IrredRep)>>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl FusionTable {
    pub fn new() -> Self {
        FusionTable::default()
    }

    pub fn declare(&mut self, ctx: &FieldCtx, irr: AbstractIrr) -> Result<()> {
        let irr = AbstractIrr {
            twist: FieldElem::ONE,
            ..irr
        };
        IrredRep::Abstract(irr.clone()).validate(ctx)?;
        if let Some(prev) = self.decls.get(&irr.label) {
            if prev != &irr {
                return Err(Error::InconsistentFusion(format!(
                    "{} declared twice with different data",
                    irr.label
                )));
            }
        }
        self.decls.insert(irr.label.clone(), irr);
        Ok(())
    }

    pub fn decl(&self, label: &str) -> Option<&AbstractIrr> {
        self.decls.get(label)
    }

    pub fn decls(&self) -> impl Iterator<Item = &AbstractIrr> {
        self.decls.values()
    }

    /// Records `Psi_a (x) Psi_b = sum nu^k Theta`, checking dimensions.
    pub fn add_rule(&mut self, a: &str, b: &str, entries: Vec<(i64, IrredRep)>) -> Result<()> {
        let dim = |l: &str| {
            self.decls.get(l).map(|d| d.dim).ok_or_else(|| {
                Error::InconsistentFusion(format!("undeclared irreducible {l}"))
            })
        };
        let expected = dim(a)? * dim(b)?;
        let total: u32 = entries.iter().map(|(_, t)| t.dim()).sum();
        if total != expected {
            return Err(Error::InconsistentFusion(format!(
                "{a} (x) {b}: entries have total dimension {total}, expected {expected}"
            )));
        }
        self.rules.insert(pair_key(a, b), entries);
        Ok(())
    }

    /// Checks that declared duals exist and form an involution.
    pub fn validate(&self) -> Result<()> {
        for d in self.decls.values() {
            let Some(dual) = self.decls.get(&d.dual_label) else {
                return Err(Error::InconsistentFusion(format!(
                    "dual {} of {} is not declared",
                    d.dual_label, d.label
                )));
            };
            if dual.dual_label != d.label || dual.dim != d.dim || dual.order != d.order {
                return Err(Error::InconsistentFusion(format!(
                    "{} and {} are not a consistent dual pair",
                    d.label, dual.label
                )));
            }
        }
        Ok(())
    }

    /// Semisimplification of `psi (x) psi2` as a list of `(k, Theta)` meaning `nu^k Theta`.
    pub fn fuse(
        &self,
        ctx: &FieldCtx,
        psi: &IrredRep,
        psi2: &IrredRep,
    ) -> Result<Vec<(i64, IrredRep)>> {
        match (psi, psi2) {
            (IrredRep::Char(t), IrredRep::Char(s)) => Ok(vec![(0, IrredRep::Char(ctx.mul(*t, *s)))]),
            (IrredRep::Char(t), other) | (other, IrredRep::Char(t)) => {
                Ok(vec![(0, twist_by_char(ctx, other, *t))])
            }
            (IrredRep::Abstract(a), IrredRep::Abstract(b)) => {
                let entries = self.rules.get(&pair_key(&a.label, &b.label)).ok_or_else(|| {
                    Error::MissingFusionRule {
                        left: a.label.clone(),
                        right: b.label.clone(),
                    }
                })?;
                let s = ctx.mul(a.twist, b.twist);
                Ok(entries
                    .iter()
                    .map(|(k, th)| (*k, twist_by_char(ctx, th, s)))
                    .collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_ctx;

    #[test]
    fn twist_examples() {
        let ctx = make_ctx(5, 2, 1).unwrap();
        let one = IrredRep::unram(ctx.one());
        // q^{-1} = 3 in F_5
        assert_eq!(twist(&ctx, &one, 1), IrredRep::unram(ctx.from_int(3)));
        let t = IrredRep::unram(ctx.exp_gen(5));
        assert_eq!(locate(&ctx, &twist(&ctx, &t, 4)), locate(&ctx, &t));
        let psi = IrredRep::abstract_irr("a", 2, 2, "a");
        let (line, a) = locate(&ctx, &twist(&ctx, &psi, 3));
        assert_eq!((line.base(), a), (&psi, 1));
    }

    #[test]
    fn dual_examples() {
        let ctx = make_ctx(5, 2, 1).unwrap();
        let one = IrredRep::unram(ctx.one());
        assert_eq!(dual_irr(&ctx, &one), one);
        assert_eq!(
            dual_irr(&ctx, &IrredRep::unram(ctx.from_int(2))),
            IrredRep::unram(ctx.from_int(3))
        );
        let psi = IrredRep::abstract_irr("a", 2, 4, "b");
        let d = dual_irr(&ctx, &psi);
        assert_eq!(d, IrredRep::abstract_irr("b", 2, 4, "a"));
        assert_eq!(dual_irr(&ctx, &d), psi);
    }

    #[test]
    fn twist_action_and_dual_compatibility() {
        let ctx = make_ctx(3, 2, 1).unwrap();
        for t in ctx.elements().filter(|x| !x.is_zero()) {
            let psi = IrredRep::unram(t);
            for a in -3i64..4 {
                for b in -3i64..4 {
                    assert_eq!(
                        twist(&ctx, &twist(&ctx, &psi, a), b),
                        twist(&ctx, &psi, a + b)
                    );
                }
                assert_eq!(
                    dual_irr(&ctx, &twist(&ctx, &psi, a)),
                    twist(&ctx, &dual_irr(&ctx, &psi), -a)
                );
            }
        }
    }

    #[test]
    fn canonical_base_has_least_log() {
        let ctx = make_ctx(5, 2, 1).unwrap();
        for t in ctx.elements().filter(|x| !x.is_zero()) {
            let (line, a) = locate(&ctx, &IrredRep::unram(t));
            let base = line.base().twist_value();
            assert_eq!(twist(&ctx, line.base(), a as i64), IrredRep::unram(t));
            for j in 0..4 {
                let w = ctx.mul(t, ctx.nu_pow(j));
                assert!(ctx.dlog(base).unwrap() <= ctx.dlog(w).unwrap());
            }
        }
    }

    #[test]
    fn fusion_rules() {
        let ctx = make_ctx(5, 2, 1).unwrap();
        let t = ctx.from_int(2);
        let s = ctx.from_int(3);
        let table = FusionTable::new();
        assert_eq!(
            table.fuse(&ctx, &IrredRep::unram(t), &IrredRep::unram(s)).unwrap(),
            vec![(0, IrredRep::unram(ctx.one()))]
        );
        let psi = IrredRep::abstract_irr("a", 2, 4, "a");
        let fused = table.fuse(&ctx, &IrredRep::unram(t), &psi).unwrap();
        assert_eq!(fused[0].1.twist_value(), t);
        assert!(matches!(
            table.fuse(&ctx, &psi, &psi),
            Err(Error::MissingFusionRule { .. })
        ));

        let mut table = FusionTable::new();
        for (l, d) in [("a", "b"), ("b", "a")] {
            let IrredRep::Abstract(irr) = IrredRep::abstract_irr(l, 1, 4, d) else {
                unreachable!()
            };
            table.declare(&ctx, irr).unwrap();
        }
        table.validate().unwrap();
        let one = IrredRep::unram(ctx.one());
        table
            .add_rule("a", "b", vec![(0, one.clone())])
            .unwrap();
        assert_eq!(
            table.fuse(&ctx, &IrredRep::abstract_irr("b", 1, 4, "a"), &IrredRep::abstract_irr("a", 1, 4, "b")).unwrap(),
            vec![(0, one.clone())]
        );
        assert!(matches!(
            table.add_rule("a", "a", vec![(0, one.clone()), (1, one)]),
            Err(Error::InconsistentFusion(_))
        ));
    }
}
