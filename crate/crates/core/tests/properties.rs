use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use polycell_core::cells::cell_class_sum;
use polycell_core::{
    cell_shape, decompose, field_of_order, gcd_monic, poly1_class, psi_forward, psi_inverse, signature_of, EnumConfig,
    FqContext, Poly,
};

const ORDERS: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 25];

fn ctx_strategy() -> impl Strategy<Value = FqContext> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|q| field_of_order(q).unwrap())
}

fn poly_in(ctx: &FqContext, max_len: usize) -> impl Strategy<Value = Poly> {
    let ctx = ctx.clone();
    prop::collection::vec(0..ctx.q(), 0..=max_len).prop_map(move |codes| Poly::from_codes(&ctx, codes))
}

fn monic_in(ctx: &FqContext, max_deg: usize) -> impl Strategy<Value = Poly> {
    let ctx = ctx.clone();
    prop::collection::vec(0..ctx.q(), 0..=max_deg).prop_map(move |mut codes| {
        codes.push(1);
        Poly::from_codes(&ctx, codes)
    })
}

proptest! {
    #[test]
    fn field_ring_laws((ctx, x, y, z) in ctx_strategy().prop_flat_map(|ctx| {
        let q = ctx.q();
        (Just(ctx), 0..q, 0..q, 0..q)
    })) {
        let [x, y, z] = [x, y, z].map(|c| ctx.from_code(c).unwrap());
        let add = |a, b| ctx.add(a, b).unwrap();
        let mul = |a, b| ctx.mul(a, b).unwrap();
        prop_assert_eq!(add(add(x, y), z), add(x, add(y, z)));
        prop_assert_eq!(mul(mul(x, y), z), mul(x, mul(y, z)));
        prop_assert_eq!(mul(x, add(y, z)), add(mul(x, y), mul(x, z)));
        prop_assert_eq!(ctx.sub(add(x, y), y).unwrap(), x);
        if !x.is_zero() {
            prop_assert_eq!(mul(x, ctx.inv(x).unwrap()), ctx.one());
        }
        prop_assert_eq!(ctx.pow(x, ctx.q() as u64).unwrap(), x);
    }

    #[test]
    fn divrem_round_trip((a, b) in ctx_strategy().prop_flat_map(|ctx| (poly_in(&ctx, 9), poly_in(&ctx, 6)))) {
        prop_assume!(!b.is_zero());
        let (quot, rem) = a.divrem(&b).unwrap();
        prop_assert_eq!(&(&quot * &b) + &rem, a);
        prop_assert!(rem.degree() < b.degree());
    }

    #[test]
    fn gcd_divides_both((f, g, h) in ctx_strategy().prop_flat_map(|ctx| (monic_in(&ctx, 4), monic_in(&ctx, 4), monic_in(&ctx, 3)))) {
        let (fh, gh) = (&f * &h, &g * &h);
        let d = gcd_monic(&fh, &gh).unwrap();
        prop_assert!(d.is_monic());
        prop_assert!(fh.rem(&d).unwrap().is_zero());
        prop_assert!(gh.rem(&d).unwrap().is_zero());
        prop_assert!(d.rem(&h).unwrap().is_zero());
    }

    #[test]
    fn text_round_trip(p in ctx_strategy().prop_flat_map(|ctx| poly_in(&ctx, 7))) {
        let ctx = p.ctx().clone();
        prop_assert_eq!(Poly::parse(&ctx, &p.to_string()).unwrap(), p.clone());
        prop_assert_eq!(Poly::from_json(&ctx, &p.to_json()).unwrap(), p);
    }

    #[test]
    fn psi_round_trip_and_shift((fs, g) in ctx_strategy().prop_flat_map(|ctx| {
        (prop::collection::vec(monic_in(&ctx, 4), 2..=3), monic_in(&ctx, 2))
    })) {
        let d = fs.iter().skip(1).fold(fs[0].clone(), |acc, f| gcd_monic(&acc, f).unwrap());
        let fs: Vec<Poly> = fs.iter().map(|f| f.divrem(&d).unwrap().0).collect();
        let k = g.deg().unwrap();
        let hs = psi_forward(&fs, &g).unwrap();
        let (back, g_back) = psi_inverse(&hs, k).unwrap();
        prop_assert_eq!(&back, &fs);
        prop_assert_eq!(g_back, g);
        prop_assert_eq!(signature_of(&hs).unwrap(), signature_of(&fs).unwrap().shifted(k));
    }
}
proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cell_classes_sum_to_poly1(d1 in 0usize..=5, d2 in 0usize..=5) {
        prop_assert_eq!(cell_class_sum(&[d1, d2]), poly1_class(d1 as i64, d2 as i64).unwrap());
    }

    #[test]
    fn enumerated_cells_match_symbolic((q, d1, d2) in (prop::sample::select(vec![2u64, 3]), 0usize..=3, 0usize..=3)) {
        let ctx = field_of_order(q).unwrap();
        let dec = decompose(&ctx, &[d1, d2], &EnumConfig::with_workers(2)).unwrap();
        prop_assert!(dec.verified());
        prop_assert_eq!(dec.class_sum(), cell_class_sum(&[d1, d2]));
        let measured = dec.class_sum().count_measure(q).unwrap();
        prop_assert_eq!(&measured, &poly1_class(d1 as i64, d2 as i64).unwrap().count_measure(q).unwrap());
    }

    #[test]
    fn triple_cells_count_the_coprime_locus(
        (q, ds) in (prop::sample::select(vec![2u64, 3]), prop::collection::vec(0usize..=2, 3))
    ) {
        let ctx = field_of_order(q).unwrap();
        let dec = decompose(&ctx, &ds, &EnumConfig::with_workers(3)).unwrap();
        prop_assert!(dec.verified());
        let symbolic = cell_class_sum(&ds).count_measure(q).unwrap();
        prop_assert_eq!(symbolic, BigRational::from_integer(BigInt::from(dec.coprime_total)));
        for sig in dec.cells.keys() {
            prop_assert_eq!(cell_shape(sig).unwrap(), dec.cells[sig].shape);
        }
    }
}
