//! Generic representations of `GL_n` as unlinked multisets of Steinberg
//! segments, their Deligne parameters, and Rankin-Selberg style factors.

use std::collections::BTreeMap;

use crate::deligne::{cv_map, det_class, dsum, tensor_ss, Character, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::factors::{epsilon_factor, gamma_constituent, gamma_factor, l_factor};
use crate::field::{FieldCtx, FieldElem};
use crate::laurent::{euler_factor, FactorExpr, LinearProduct, RationalFraction};
use crate::weil::{dual_irr, locate, twist_by_char, FusionTable, IrredRep, Line};

/// A cuspidal representation, by its supercuspidal line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CuspLabel {
    /// A supercuspidal `nu^a base(line)`, where `a` lives on the segment.
    SuperCusp { line: Line },
    /// `St_k(Z)`: the cuspidal `St(o * ell^k, base(line))`.
    NonSuperCusp { line: Line, k: u32 },
}

impl CuspLabel {
    pub fn line(&self) -> &Line {
        match self {
            CuspLabel::SuperCusp { line } | CuspLabel::NonSuperCusp { line, .. } => line,
        }
    }

    /// Size of the twist orbit of the cuspidal itself.
    pub fn order(&self) -> u32 {
        match self {
            CuspLabel::SuperCusp { line } => line.order(),
            CuspLabel::NonSuperCusp { .. } => 1,
        }
    }
}

/// `St(r, nu^a cusp)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GLSegment {
    pub cusp: CuspLabel,
    pub r: u32,
    pub a: u32,
}

impl GLSegment {
    pub fn render(&self, ctx: &FieldCtx) -> String {
        match &self.cusp {
            CuspLabel::SuperCusp { line } => format!(
                "st(r={}; cusp={}; a={})",
                self.r,
                line.base().render(ctx),
                self.a
            ),
            CuspLabel::NonSuperCusp { line, k } => {
                format!("stk(line={}, k={}; r={})", line.render(ctx), k, self.r)
            }
        }
    }

    /// Supercuspidal support as `(line, twist) -> count`.
    fn support(&self, ctx: &FieldCtx, out: &mut BTreeMap<(Line, u32), u64>) {
        let line = self.cusp.line();
        let o = line.order();
        match &self.cusp {
            CuspLabel::SuperCusp { .. } => {
                for j in 0..self.r {
                    *out.entry((line.clone(), (self.a + j) % o)).or_insert(0) += 1;
                }
            }
            CuspLabel::NonSuperCusp { k, .. } => {
                let per = self.r as u64 * ctx.ell().pow(*k);
                for i in 0..o {
                    *out.entry((line.clone(), i)).or_insert(0) += per;
                }
            }
        }
    }
}

/// Segment as written by a user, before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawSegment {
    /// `St(r, nu^a irr)` for a supercuspidal `irr`.
    St { irr: IrredRep, r: u32, a: i64 },
    /// `St(r, St_k(Z_irr))`.
    Stk { irr: IrredRep, k: u32, r: u32 },
}

/// A generic representation: pairwise unlinked segments.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenericRep {
    segments: BTreeMap<GLSegment, u64>,
}

fn ell_digits(ell: u64, mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % ell);
        n /= ell;
    }
    out
}

/// Longest subsequence of consecutive twists modulo `o`.
fn longest_chain(seq: &[u32], o: u32) -> usize {
    let mut best = vec![1usize; seq.len()];
    for j in 0..seq.len() {
        for i in 0..j {
            if (seq[i] + 1) % o == seq[j] % o {
                best[j] = best[j].max(best[i] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn twists(s: &GLSegment) -> Vec<u32> {
    let o = s.cusp.order();
    (0..s.r).map(|j| (s.a + j) % o).collect()
}

/// Whether `s` precedes `t`: a segment longer than both can be extracted
/// from the sequence `(s, t)`.
fn precedes(s: &GLSegment, t: &GLSegment) -> bool {
    let mut seq = twists(s);
    seq.extend(twists(t));
    longest_chain(&seq, s.cusp.order()) > s.r.max(t.r) as usize
}

/// Segments over distinct cuspidals are always unlinked.
pub fn unlinked(s: &GLSegment, t: &GLSegment) -> bool {
    if s.cusp != t.cusp {
        return true;
    }
    !precedes(s, t) && !precedes(t, s)
}

impl GenericRep {
    pub fn empty() -> Self {
        GenericRep::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GLSegment, u64)> {
        self.segments.iter().map(|(s, &m)| (s, m))
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segment_count(&self) -> u64 {
        self.segments.values().sum()
    }

    /// Validates unlinkedness of already normalized segments.
    pub fn from_segments(items: impl IntoIterator<Item = (GLSegment, u64)>) -> Result<Self> {
        let mut segments: BTreeMap<GLSegment, u64> = BTreeMap::new();
        for (s, m) in items {
            if m > 0 {
                *segments.entry(s).or_insert(0) += m;
            }
        }
        let list: Vec<(&GLSegment, u64)> = segments.iter().map(|(s, &m)| (s, m)).collect();
        for (i, (s, m)) in list.iter().enumerate() {
            if *m > 1 && !unlinked(s, s) {
                return Err(Error::Linked(format!("repeated segment r={}", s.r)));
            }
            for (t, _) in &list[i + 1..] {
                if !unlinked(s, t) {
                    return Err(Error::Linked(format!(
                        "segments of lengths {} and {}",
                        s.r, t.r
                    )));
                }
            }
        }
        Ok(GenericRep { segments })
    }

    /// Supercuspidal support as `(line, twist) -> count`.
    pub fn support(&self, ctx: &FieldCtx) -> BTreeMap<(Line, u32), u64> {
        let mut out = BTreeMap::new();
        for (s, m) in self.iter() {
            let mut one = BTreeMap::new();
            s.support(ctx, &mut one);
            for (k, c) in one {
                *out.entry(k).or_insert(0) += c * m;
            }
        }
        out
    }

    pub fn lines(&self) -> Vec<Line> {
        let mut v: Vec<Line> = self.iter().map(|(s, _)| s.cusp.line().clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        if self.is_empty() {
            return "prod{}".into();
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(s, m)| {
                if m == 1 {
                    s.render(ctx)
                } else {
                    format!("{}*{}", s.render(ctx), m)
                }
            })
            .collect();
        format!("prod{{ {} }}", parts.join(", "))
    }
}

/// Expands each raw segment into linear-independent pieces: a supercuspidal
/// segment of length `r >= o` becomes `St(r mod o) x prod St(a_i, St_i)` from
/// the `ell`-adic digits of `r div o`, and `St(r, St_k)` with `r >= ell`
/// becomes `prod St(a_i, St_{k+i})` from the digits of `r`.
pub fn normalize_rep(ctx: &FieldCtx, raw: &[(RawSegment, u64)]) -> Result<GenericRep> {
    let ell = ctx.ell();
    let mut items = Vec::new();
    let push_tnb = |items: &mut Vec<(GLSegment, u64)>, line: &Line, k0: u32, n: u64, m: u64| {
        for (i, d) in ell_digits(ell, n).into_iter().enumerate() {
            if d > 0 {
                items.push((
                    GLSegment {
                        cusp: CuspLabel::NonSuperCusp {
                            line: line.clone(),
                            k: k0 + i as u32,
                        },
                        r: d as u32,
                        a: 0,
                    },
                    m,
                ));
            }
        }
    };
    for (seg, m) in raw {
        match seg {
            RawSegment::St { irr, r, a } => {
                irr.validate(ctx)?;
                if *r == 0 {
                    return Err(Error::InvalidInput("segment length must be positive".into()));
                }
                let (line, shift) = locate(ctx, irr);
                let o = line.order();
                let a = (shift as i64 + a).rem_euclid(o as i64) as u32;
                let (u, rem) = (r / o, r % o);
                if rem > 0 {
                    items.push((
                        GLSegment {
                            cusp: CuspLabel::SuperCusp { line: line.clone() },
                            r: rem,
                            a,
                        },
                        *m,
                    ));
                }
                push_tnb(&mut items, &line, 0, u as u64, *m);
            }
            RawSegment::Stk { irr, k, r } => {
                irr.validate(ctx)?;
                if *r == 0 {
                    return Err(Error::InvalidInput("segment length must be positive".into()));
                }
                let line = Line::of(ctx, irr);
                push_tnb(&mut items, &line, *k, *r as u64, *m);
            }
        }
    }
    GenericRep::from_segments(items)
}

/// Which kind of cuspidal reduction a lift has.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftKind {
    /// The lift reduces to the supercuspidal `irr`.
    Supercuspidal(IrredRep),
    /// The lift reduces to `St_level(Z_irr)`.
    NonSupercuspidal { irr: IrredRep, level: u32 },
}

/// Reduction of the generic segment `St(k, lift)`.
pub fn j_ell(ctx: &FieldCtx, k: u32, lift: &LiftKind) -> Result<GenericRep> {
    let raw = match lift {
        LiftKind::Supercuspidal(irr) => RawSegment::St {
            irr: irr.clone(),
            r: k,
            a: 0,
        },
        LiftKind::NonSupercuspidal { irr, level } => RawSegment::Stk {
            irr: irr.clone(),
            k: *level,
            r: k,
        },
    };
    normalize_rep(ctx, &[(raw, 1)])
}

/// Splits a representation on one supercuspidal line into its banal and
/// totally non-banal factors.
pub fn banal_tnb_split(pi: &GenericRep) -> Result<(GenericRep, GenericRep)> {
    if pi.lines().len() > 1 {
        return Err(Error::MixedLines);
    }
    let mut banal = GenericRep::empty();
    let mut tnb = GenericRep::empty();
    for (s, m) in pi.iter() {
        let target = match s.cusp {
            CuspLabel::SuperCusp { .. } => &mut banal,
            CuspLabel::NonSuperCusp { .. } => &mut tnb,
        };
        target.segments.insert(s.clone(), m);
    }
    Ok((banal, tnb))
}

fn v_segment(ctx: &FieldCtx, s: &GLSegment) -> DeligneClass {
    let line = s.cusp.line();
    match &s.cusp {
        CuspLabel::SuperCusp { .. } => DeligneClass::single(Indec::Seg {
            line: line.clone(),
            r: s.r,
            a: s.a,
        }),
        CuspLabel::NonSuperCusp { k, .. } => {
            let mult = ctx.ell().pow(*k);
            DeligneClass::from_indecs((0..line.order()).map(|i| {
                (
                    Indec::Seg {
                        line: line.clone(),
                        r: s.r,
                        a: i,
                    },
                    mult,
                )
            }))
        }
    }
}

/// The nilpotent parameter attached to `pi`.
pub fn v_map(ctx: &FieldCtx, pi: &GenericRep) -> DeligneClass {
    pi.iter().fold(DeligneClass::new(), |acc, (s, m)| {
        dsum(&acc, &v_segment(ctx, s).scale(m))
    })
}

/// `CV(V(pi))`.
pub fn c_map(ctx: &FieldCtx, pi: &GenericRep) -> DeligneClass {
    cv_map(&v_map(ctx, pi)).expect("parameters are nilpotent")
}

fn map_segments(pi: &GenericRep, f: impl Fn(&GLSegment) -> GLSegment) -> GenericRep {
    let mut out = GenericRep::empty();
    for (s, m) in pi.iter() {
        *out.segments.entry(f(s)).or_insert(0) += m;
    }
    out
}

fn relocated(ctx: &FieldCtx, irr: &IrredRep, r: u32, a: i64) -> GLSegment {
    let (line, shift) = locate(ctx, irr);
    let o = line.order() as i64;
    GLSegment {
        cusp: CuspLabel::SuperCusp { line },
        r,
        a: (shift as i64 + a).rem_euclid(o) as u32,
    }
}

/// Contragredient: `St(r, rho)^v = St(r, nu^{1-r} rho^v)`.
pub fn dual_rep(ctx: &FieldCtx, pi: &GenericRep) -> GenericRep {
    map_segments(pi, |s| match &s.cusp {
        CuspLabel::SuperCusp { line } => {
            relocated(ctx, &dual_irr(ctx, line.base()), s.r, -(s.a as i64) - s.r as i64 + 1)
        }
        CuspLabel::NonSuperCusp { line, k } => GLSegment {
            cusp: CuspLabel::NonSuperCusp {
                line: line.dual(ctx),
                k: *k,
            },
            r: s.r,
            a: 0,
        },
    })
}

/// Twist by the unramified character `chi_s`.
pub fn twist_rep(ctx: &FieldCtx, pi: &GenericRep, s: FieldElem) -> Result<GenericRep> {
    if s.is_zero() {
        return Err(Error::InvalidInput("twisting character must be nonzero".into()));
    }
    Ok(map_segments(pi, |seg| match &seg.cusp {
        CuspLabel::SuperCusp { line } => {
            relocated(ctx, &twist_by_char(ctx, line.base(), s), seg.r, seg.a as i64)
        }
        CuspLabel::NonSuperCusp { line, k } => GLSegment {
            cusp: CuspLabel::NonSuperCusp {
                line: line.twist_by_char(ctx, s),
                k: *k,
            },
            r: seg.r,
            a: 0,
        },
    }))
}

fn unram_base(line: &Line) -> Result<FieldElem> {
    match line.base() {
        IrredRep::Char(t) => Ok(*t),
        IrredRep::Abstract(_) => Err(Error::RamifiedCuspLine),
    }
}

fn require_unramified(pi: &GenericRep) -> Result<()> {
    for line in pi.lines() {
        unram_base(&line)?;
    }
    Ok(())
}

/// Product of the central character values over the supercuspidal support.
pub fn central_char(ctx: &FieldCtx, pi: &GenericRep) -> Result<Character> {
    require_unramified(pi)?;
    let mut v = ctx.one();
    for ((line, k), c) in pi.support(ctx) {
        let s = line.member(ctx, k as i64).twist_value();
        v = ctx.mul(v, ctx.powu(s, c));
    }
    Ok(Character::unramified(v))
}

/// `L(X, pi, pi')` on unramified lines: totally non-banal factors drop out, and
/// each banal pair `St(n, nu^a chi) x St(m, nu^b chi')` with `m <= n`
/// contributes `prod_{k<m} 1/(1 - s_k X)`, `s_k` the value of
/// `nu^{n-1+a} chi * nu^{k+b} chi'`.
pub fn rs_l_factor(ctx: &FieldCtx, pi: &GenericRep, pi2: &GenericRep) -> Result<RationalFraction> {
    require_unramified(pi)?;
    require_unramified(pi2)?;
    let mut roots = Vec::new();
    for (s, m) in pi.iter() {
        for (s2, m2) in pi2.iter() {
            let (CuspLabel::SuperCusp { line }, CuspLabel::SuperCusp { line: line2 }) =
                (&s.cusp, &s2.cusp)
            else {
                continue;
            };
            let (mut long, mut short) = ((line, s.r, s.a), (line2, s2.r, s2.a));
            if short.1 > long.1 {
                std::mem::swap(&mut long, &mut short);
            }
            let value = |l: &Line, j: i64| l.member(ctx, j).twist_value();
            let top = value(long.0, long.1 as i64 - 1 + long.2 as i64);
            for k in 0..short.1 {
                let v = ctx.mul(top, value(short.0, k as i64 + short.2 as i64));
                roots.extend(std::iter::repeat(v).take((m * m2) as usize));
            }
        }
    }
    Ok(euler_factor(ctx, &roots))
}

/// Product over supercuspidal-support pairs of the gamma factor of the
/// product character.
pub fn rs_gamma_factor(ctx: &FieldCtx, pi: &GenericRep, pi2: &GenericRep) -> Result<FactorExpr> {
    require_unramified(pi)?;
    require_unramified(pi2)?;
    let mut counts: BTreeMap<(Line, u32), i64> = BTreeMap::new();
    let sup2 = pi2.support(ctx);
    for ((line, i), c) in pi.support(ctx) {
        let v = line.member(ctx, i as i64).twist_value();
        for ((line2, j), c2) in &sup2 {
            let v2 = line2.member(ctx, *j as i64).twist_value();
            let key = locate(ctx, &IrredRep::unram(ctx.mul(v, v2)));
            *counts.entry(key).or_insert(0) += (c * c2) as i64;
        }
    }
    let mut lp = LinearProduct::new();
    for ((line, k), e) in counts {
        gamma_constituent(ctx, &line, k, &mut lp, e);
    }
    Ok(lp.into_factor(ctx))
}

pub fn rs_epsilon_factor(ctx: &FieldCtx, pi: &GenericRep, pi2: &GenericRep) -> Result<FactorExpr> {
    let gamma = rs_gamma_factor(ctx, pi, pi2)?;
    let l = FactorExpr::from_fraction(ctx, &rs_l_factor(ctx, pi, pi2)?)?;
    let l_dual = rs_l_factor(ctx, &dual_rep(ctx, pi), &dual_rep(ctx, pi2))?
        .substitute_inv(ctx, ctx.q_inv());
    let l_dual = FactorExpr::from_fraction(ctx, &l_dual)?;
    let eps = gamma.mul(ctx, &l).div(ctx, &l_dual);
    if eps.is_unit().is_none() {
        return Err(Error::EpsilonNotUnit(eps.render(ctx)));
    }
    Ok(eps)
}

/// Both sides of the preservation identities for a pair of representations.
/// The representation side uses the direct segment formulas above and never
/// calls the correspondence, so agreement cross-validates `C`, the
/// semisimple tensor product and the kernel bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationReport {
    pub l_rep: RationalFraction,
    pub l_galois: RationalFraction,
    pub gamma_rep: FactorExpr,
    pub gamma_galois: FactorExpr,
    pub eps_rep: FactorExpr,
    pub eps_galois: FactorExpr,
}

impl PreservationReport {
    pub fn l_holds(&self) -> bool {
        self.l_rep == self.l_galois
    }

    pub fn gamma_holds(&self) -> bool {
        self.gamma_rep == self.gamma_galois
    }

    pub fn eps_holds(&self) -> bool {
        self.eps_rep == self.eps_galois
    }

    pub fn holds(&self) -> bool {
        self.l_holds() && self.gamma_holds() && self.eps_holds()
    }
}

pub fn check_preservation(
    ctx: &FieldCtx,
    pi: &GenericRep,
    pi2: &GenericRep,
) -> Result<PreservationReport> {
    let table = FusionTable::new();
    let galois = tensor_ss(ctx, &c_map(ctx, pi), &c_map(ctx, pi2), &table)?;
    Ok(PreservationReport {
        l_rep: rs_l_factor(ctx, pi, pi2)?,
        l_galois: l_factor(ctx, &galois),
        gamma_rep: rs_gamma_factor(ctx, pi, pi2)?,
        gamma_galois: gamma_factor(ctx, &galois),
        eps_rep: rs_epsilon_factor(ctx, pi, pi2)?,
        eps_galois: epsilon_factor(ctx, &galois)?,
    })
}

/// `L` of the tensor product of the nilpotent parameters, which in general
/// differs from the representation side.
pub fn v_side_l_factor(ctx: &FieldCtx, pi: &GenericRep, pi2: &GenericRep) -> Result<RationalFraction> {
    let table = FusionTable::new();
    let nilpotent = tensor_ss(ctx, &v_map(ctx, pi), &v_map(ctx, pi2), &table)?;
    Ok(l_factor(ctx, &nilpotent))
}

/// `det(C(pi))`.
pub fn det_of_c(ctx: &FieldCtx, pi: &GenericRep) -> Character {
    det_class(ctx, &c_map(ctx, pi))
}
