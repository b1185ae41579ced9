use proptest::prelude::*;

use wdcalc::deligne::{
    cv_map, dsum, dual_class, seg_tensor_profile, split_cyclic, tensor_ss, twist_class, DeligneClass,
    Indec, Twist,
};
use wdcalc::dsl::{parse_class, parse_rep};
use wdcalc::factors::{epsilon_factor, l_factor};
use wdcalc::gln::{c_map, check_preservation, dual_rep, normalize_rep, unlinked, RawSegment};
use wdcalc::matrix::Matrix;
use wdcalc::matrixmodel::{decompose, dual_matrix, realize, rescale_witness, validate};
use wdcalc::weil::{FusionTable, IrredRep};
use wdcalc::{make_ctx, FieldCtx};

fn ctx_strategy() -> impl Strategy<Value = FieldCtx> {
    prop::sample::select(vec![(5u64, 2u64), (3, 2), (2, 3), (3, 4), (7, 2)])
        .prop_map(|(ell, q)| make_ctx(ell, q, 1).unwrap())
}

/// An indecomposable on an unramified line, from raw choices.
fn indec(ctx: &FieldCtx, code: u32, r: u32, a: i64, cyc: bool) -> Indec {
    let t = ctx.from_code(1 + code % (ctx.size() - 1)).unwrap();
    let x = IrredRep::unram(t);
    if cyc {
        Indec::cyc(ctx, &x, r).unwrap()
    } else {
        Indec::seg(ctx, &x, r, a).unwrap()
    }
}

fn class_of(ctx: &FieldCtx, items: &[(u32, u32, i64, bool)]) -> DeligneClass {
    DeligneClass::from_indecs(items.iter().map(|&(c, r, a, y)| (indec(ctx, c, r, a, y), 1)))
}

fn items(max_len: usize) -> impl Strategy<Value = Vec<(u32, u32, i64, bool)>> {
    prop::collection::vec((0u32..1000, 1u32..4, -6i64..6, prop::bool::weighted(0.25)), 0..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_classes_parse_back(ctx in ctx_strategy(), xs in items(5)) {
        let c = class_of(&ctx, &xs);
        prop_assert_eq!(parse_class(&ctx, &c.render(&ctx), &FusionTable::new()).unwrap(), c);
    }

    #[test]
    fn dual_is_an_involution(ctx in ctx_strategy(), xs in items(5)) {
        let c = class_of(&ctx, &xs);
        prop_assert_eq!(dual_class(&ctx, &dual_class(&ctx, &c)), c.clone());
        prop_assert_eq!(dual_class(&ctx, &c).dim(), c.dim());
    }

    #[test]
    fn nu_twist_has_period_o(ctx in ctx_strategy(), xs in items(5), k in -8i64..8) {
        let c = class_of(&ctx, &xs);
        let o = ctx.o_nu() as i64;
        let moved = twist_class(&ctx, &c, Twist::Nu(k)).unwrap();
        prop_assert_eq!(twist_class(&ctx, &moved, Twist::Nu(o - k.rem_euclid(o))).unwrap(), c);
    }

    #[test]
    fn tensor_is_commutative_bilinear_and_multiplies_dimension(
        ctx in ctx_strategy(), xs in items(3), ys in items(3), zs in items(2)
    ) {
        let table = FusionTable::new();
        let (a, b, c) = (class_of(&ctx, &xs), class_of(&ctx, &ys), class_of(&ctx, &zs));
        let ab = tensor_ss(&ctx, &a, &b, &table).unwrap();
        prop_assert_eq!(&ab, &tensor_ss(&ctx, &b, &a, &table).unwrap());
        prop_assert_eq!(ab.dim(), a.dim() * b.dim());
        let left = tensor_ss(&ctx, &a, &dsum(&b, &c), &table).unwrap();
        let right = dsum(&ab, &tensor_ss(&ctx, &a, &c, &table).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn tensor_commutes_with_duals(ctx in ctx_strategy(), xs in items(3), ys in items(3)) {
        let table = FusionTable::new();
        let (a, b) = (class_of(&ctx, &xs), class_of(&ctx, &ys));
        let lhs = dual_class(&ctx, &tensor_ss(&ctx, &a, &b, &table).unwrap());
        let rhs = tensor_ss(&ctx, &dual_class(&ctx, &a), &dual_class(&ctx, &b), &table).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cv_is_idempotent_and_keeps_dimension(ctx in ctx_strategy(), xs in items(8)) {
        let segs: Vec<_> = xs.into_iter().map(|(_, r, a, _)| (0, r, a, false)).collect();
        let c = class_of(&ctx, &segs);
        let once = cv_map(&c).unwrap();
        prop_assert_eq!(once.dim(), c.dim());
        let (acyclic, _) = split_cyclic(&c).unwrap();
        prop_assert_eq!(cv_map(&acyclic).unwrap(), acyclic);
    }

    #[test]
    fn l_factor_is_multiplicative_over_sums(ctx in ctx_strategy(), xs in items(4), ys in items(4)) {
        let (a, b) = (class_of(&ctx, &xs), class_of(&ctx, &ys));
        let lhs = l_factor(&ctx, &dsum(&a, &b));
        prop_assert_eq!(lhs, l_factor(&ctx, &a).mul(&ctx, &l_factor(&ctx, &b)));
    }

    #[test]
    fn epsilon_is_a_unit(ctx in ctx_strategy(), xs in items(5)) {
        let c = class_of(&ctx, &xs);
        prop_assert!(epsilon_factor(&ctx, &c).unwrap().is_unit().is_some());
    }

    #[test]
    fn realizations_are_valid_and_decompose_back(ctx in ctx_strategy(), xs in items(4)) {
        let c = class_of(&ctx, &xs);
        let m = realize(&ctx, &c).unwrap();
        prop_assert!(validate(&m).is_ok());
        prop_assert_eq!(decompose(&m).unwrap(), c.clone());
        prop_assert_eq!(decompose(&dual_matrix(&m).unwrap()).unwrap(), dual_class(&ctx, &c));
    }

    #[test]
    fn rescale_witness_intertwines(ctx in ctx_strategy(), xs in items(4), code in 1u32..1000) {
        let segs: Vec<_> = xs.into_iter().map(|(c, r, a, _)| (c, r, a, false)).collect();
        let m = realize(&ctx, &class_of(&ctx, &segs)).unwrap();
        let lambda = ctx.from_code(1 + code % (ctx.size() - 1)).unwrap();
        let p = rescale_witness(&m, lambda).unwrap();
        let lhs = p.mul(&ctx, &m.u.scale(&ctx, lambda));
        prop_assert_eq!(lhs, m.u.mul(&ctx, &p));
        prop_assert_eq!(p.mul(&ctx, &m.f), m.f.mul(&ctx, &p));
        prop_assert!(!p.det(&ctx).is_zero() || m.dim() == 0);
    }

    #[test]
    fn profiles_have_nm_total_length(ctx in ctx_strategy(), n in 1u32..8, m in 1u32..8) {
        let profile = seg_tensor_profile(&ctx, n, m);
        prop_assert_eq!(profile.len() as u32, n.min(m));
        prop_assert_eq!(profile.iter().map(|&(c, d)| d - c + 1).sum::<u32>(), n * m);
        prop_assert_eq!(profile, seg_tensor_profile(&ctx, m, n));
    }
}

fn raw_segments(ctx: &FieldCtx, picks: &[(u32, u32, i64, bool)]) -> Vec<(RawSegment, u64)> {
    let x = IrredRep::unram(ctx.one());
    picks
        .iter()
        .map(|&(k, r, a, tnb)| {
            let seg = if tnb {
                RawSegment::Stk { irr: x.clone(), k: k % 2, r }
            } else {
                RawSegment::St { irr: x.clone(), r, a }
            };
            (seg, 1)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generic_reps_round_trip_and_dualize(ctx in ctx_strategy(), picks in items(3)) {
        let Ok(pi) = normalize_rep(&ctx, &raw_segments(&ctx, &picks)) else {
            return Ok(());
        };
        prop_assert_eq!(parse_rep(&ctx, &pi.render(&ctx), &FusionTable::new()).unwrap(), pi.clone());
        prop_assert_eq!(dual_rep(&ctx, &dual_rep(&ctx, &pi)), pi.clone());
        prop_assert_eq!(c_map(&ctx, &dual_rep(&ctx, &pi)), dual_class(&ctx, &c_map(&ctx, &pi)));
        let segs: Vec<_> = pi.iter().map(|(s, _)| s.clone()).collect();
        for s in &segs {
            for t in &segs {
                prop_assert_eq!(unlinked(s, t), unlinked(t, s));
            }
        }
    }

    #[test]
    fn factors_are_preserved(ctx in ctx_strategy(), p in items(3), p2 in items(3)) {
        let (Ok(pi), Ok(pi2)) = (
            normalize_rep(&ctx, &raw_segments(&ctx, &p)),
            normalize_rep(&ctx, &raw_segments(&ctx, &p2)),
        ) else {
            return Ok(());
        };
        prop_assert!(check_preservation(&ctx, &pi, &pi2).unwrap().holds());
    }

    #[test]
    fn conjugated_realizations_decompose_back(
        ctx in ctx_strategy(), xs in items(3), entries in prop::collection::vec(0u32..1000, 144)
    ) {
        let c = class_of(&ctx, &xs);
        let m = realize(&ctx, &c).unwrap();
        let n = m.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| ctx.from_code(entries[(i * n + j) % 144] % ctx.size()).unwrap()).collect())
            .collect();
        let g = if n == 0 { Matrix::identity(0) } else { Matrix::from_rows(rows).unwrap() };
        prop_assume!(!g.det(&ctx).is_zero() || n == 0);
        prop_assert_eq!(decompose(&m.conjugate(&g).unwrap()).unwrap(), c);
    }
}
