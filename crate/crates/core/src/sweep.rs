//! Finite populations of classes and representations used by the
//! verification harness.

use std::collections::BTreeSet;

use crate::deligne::{DeligneClass, Indec};
use crate::error::Result;
use crate::field::{make_ctx, FieldCtx};
use crate::gln::{check_preservation, normalize_rep, GenericRep, RawSegment};
use crate::weil::IrredRep;

/// `(ell, q)` pairs covering `o(nu) = 4, 2, 1, 1`.
pub const CONTEXTS: [(u64, u64); 4] = [(5, 2), (3, 2), (2, 3), (3, 4)];

pub fn contexts() -> Result<Vec<FieldCtx>> {
    CONTEXTS.iter().map(|&(ell, q)| make_ctx(ell, q, 1)).collect()
}

/// Bounds for a grid of generic representations on one line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepGrid {
    pub max_segments: usize,
    pub max_len: u32,
    /// Levels `k` of the cuspidal `St_k` allowed as raw segments.
    pub max_level: u32,
}

impl RepGrid {
    pub const SMALL: RepGrid = RepGrid {
        max_segments: 2,
        max_len: 3,
        max_level: 0,
    };
    pub const FULL: RepGrid = RepGrid {
        max_segments: 3,
        max_len: 4,
        max_level: 1,
    };

    pub fn named(name: &str) -> Option<RepGrid> {
        match name {
            "small" => Some(RepGrid::SMALL),
            "full" => Some(RepGrid::FULL),
            _ => None,
        }
    }
}

fn multisets<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<T>)> = vec![(0, Vec::new())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (start, cur) in &frontier {
            for (i, x) in items.iter().enumerate().skip(*start) {
                let mut v = cur.clone();
                v.push(x.clone());
                out.push(v.clone());
                next.push((i, v));
            }
        }
        frontier = next;
    }
    out
}

/// Distinct generic representations on the line of `irr` built from at most
/// `max_segments` raw segments of length at most `max_len`. Raw products that
/// are linked are skipped.
pub fn line_reps(ctx: &FieldCtx, irr: &IrredRep, grid: RepGrid) -> Vec<GenericRep> {
    let o = irr.order(ctx);
    let mut raw = Vec::new();
    for r in 1..=grid.max_len {
        for a in 0..o as i64 {
            raw.push(RawSegment::St { irr: irr.clone(), r, a });
        }
        for k in 0..=grid.max_level {
            raw.push(RawSegment::Stk { irr: irr.clone(), k, r });
        }
    }
    let mut out = BTreeSet::new();
    for pick in multisets(&raw, grid.max_segments) {
        let items: Vec<(RawSegment, u64)> = pick.into_iter().map(|s| (s, 1)).collect();
        if let Ok(rep) = normalize_rep(ctx, &items) {
            out.insert(rep);
        }
    }
    out.into_iter().collect()
}

/// Indecomposables on the line of `irr` with length at most `max_r`.
pub fn line_indecs(ctx: &FieldCtx, irr: &IrredRep, max_r: u32) -> Result<Vec<Indec>> {
    let mut out = Vec::new();
    for r in 1..=max_r {
        for a in 0..irr.order(ctx) as i64 {
            out.push(Indec::seg(ctx, irr, r, a)?);
        }
        out.push(Indec::cyc(ctx, irr, r)?);
    }
    Ok(out)
}

/// Every class on the line of `irr` of dimension between 1 and `max_dim`.
pub fn line_classes(ctx: &FieldCtx, irr: &IrredRep, max_dim: u64) -> Result<Vec<DeligneClass>> {
    let indecs: Vec<Indec> = line_indecs(ctx, irr, max_dim as u32)?
        .into_iter()
        .filter(|x| x.dim() <= max_dim)
        .collect();
    let mut out = Vec::new();
    fn go(
        indecs: &[Indec],
        start: usize,
        budget: u64,
        cur: &mut DeligneClass,
        out: &mut Vec<DeligneClass>,
    ) {
        for i in start..indecs.len() {
            let d = indecs[i].dim();
            if d <= budget {
                cur.insert(indecs[i].clone(), 1);
                out.push(cur.clone());
                go(indecs, i, budget - d, cur, out);
                cur.remove_one(&indecs[i]);
            }
        }
    }
    go(&indecs, 0, max_dim, &mut DeligneClass::new(), &mut out);
    Ok(out)
}

/// Outcome of a preservation sweep over all ordered pairs of a grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub pairs: usize,
    pub l_fail: usize,
    pub gamma_fail: usize,
    pub eps_fail: usize,
    /// Rendered failing pairs, at most a handful.
    pub examples: Vec<String>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.l_fail + self.gamma_fail + self.eps_fail == 0
    }
}

pub fn preservation_sweep(ctx: &FieldCtx, reps: &[GenericRep]) -> Result<SweepSummary> {
    let mut s = SweepSummary::default();
    for p in reps {
        for p2 in reps {
            let rep = check_preservation(ctx, p, p2)?;
            s.pairs += 1;
            s.l_fail += usize::from(!rep.l_holds());
            s.gamma_fail += usize::from(!rep.gamma_holds());
            s.eps_fail += usize::from(!rep.eps_holds());
            if !rep.holds() && s.examples.len() < 5 {
                s.examples.push(format!("{} x {}", p.render(ctx), p2.render(ctx)));
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multisets_count() {
        assert_eq!(multisets(&[1, 2, 3], 2).len(), 1 + 3 + 6);
    }

    #[test]
    fn line_class_counts() {
        // o = 1: pairs of partitions with total size at most 3
        let ctx = make_ctx(2, 3, 1).unwrap();
        let x = IrredRep::unram(ctx.one());
        assert_eq!(line_classes(&ctx, &x, 3).unwrap().len(), 2 + 5 + 10);
        let ctx = make_ctx(5, 2, 1).unwrap();
        let x = IrredRep::unram(ctx.one());
        let all = line_classes(&ctx, &x, 4).unwrap();
        assert!(all.iter().all(|c| c.dim() <= 4));
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn small_grid_is_valid() {
        let ctx = make_ctx(5, 2, 1).unwrap();
        let reps = line_reps(&ctx, &IrredRep::unram(ctx.one()), RepGrid::SMALL);
        assert!(reps.iter().any(GenericRep::is_empty));
        assert!(reps.len() > 20);
    }
}
