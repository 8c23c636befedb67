use proptest::prelude::*;

use smoothkit::fractal::FractalCell;
use smoothkit::freq::{f_ones, h0, h1, nu_bl, perron_oracle, solve_ab, Homography, DEFAULT_TOL};
use smoothkit::recoding::{
    expand, induced_derive, induced_derive_n, is_alternating, letter_balance, rec, AlignmentTower,
    RecSymbol,
};
use smoothkit::sequences::{
    column_extract, derive_window, extend_left, integrate, runs, GenColumnEntry, Symbol13, Tag,
};
use smoothkit::typesub::{canonical_element, phi_apply, reconstruct_shift, types_prefix};
use smoothkit::verify::{commutation_holds, gen};
use smoothkit::{AlphabetParams, Closure, PointedWord, PointedWord13, RecWord, TypeBit, TypeSpec};

const P: AlphabetParams = AlphabetParams::ONE_THREE;

fn bits(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<TypeBit>> {
    prop::collection::vec(any::<bool>(), n).prop_map(|v| {
        v.into_iter()
            .map(|b| if b { TypeBit::One } else { TypeBit::Zero })
            .collect()
    })
}

fn tau() -> impl Strategy<Value = TypeSpec> {
    (bits(0..=4), bits(1..=4)).prop_map(|(pre, per)| TypeSpec::new(pre, per))
}

fn alternating() -> impl Strategy<Value = RecWord> {
    (
        any::<bool>(),
        prop::collection::vec(any::<bool>(), 1..40),
        any::<prop::sample::Index>(),
        0u32..3,
        0u32..3,
    )
        .prop_map(|(start_odd, longs, origin, l, r)| {
            let symbols: Vec<RecSymbol> = longs
                .iter()
                .enumerate()
                .map(|(k, &long)| match ((k % 2 == 0) == start_odd, long) {
                    (true, false) => RecSymbol::A,
                    (true, true) => RecSymbol::C,
                    (false, false) => RecSymbol::B,
                    (false, true) => RecSymbol::D,
                })
                .collect();
            let lo = -(origin.index(symbols.len()) as i64);
            PointedWord::new(lo, symbols, Closure { left: l, right: r }).unwrap()
        })
}

fn column() -> impl Strategy<Value = Vec<GenColumnEntry>> {
    prop::collection::vec((any::<bool>(), 0usize..3), 1..8).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(k, (three, t))| {
                if !three {
                    GenColumnEntry::plain(Symbol13::One)
                } else if k == 0 {
                    GenColumnEntry::plain(Symbol13::Three)
                } else {
                    GenColumnEntry::tagged(Symbol13::Three, [Tag::L, Tag::M, Tag::R][t])
                }
            })
            .collect()
    })
}

fn point_in_e() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=0.5f64, 0.0..=0.5f64).prop_filter("a + b <= 3/4", |(a, b)| a + b <= 0.75)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(y in alternating()) {
        let back: RecWord = y.to_text().parse().unwrap();
        prop_assert_eq!(back.symbols(), y.symbols());
        prop_assert_eq!(back.lo(), y.lo());
    }

    #[test]
    fn json_round_trip(y in alternating()) {
        let back = RecWord::from_json(&y.to_json()).unwrap();
        prop_assert_eq!(back, y);
    }

    #[test]
    fn tau_display_round_trip(t in tau()) {
        let back: TypeSpec = t.to_string().parse().unwrap();
        prop_assert_eq!(&back, &t);
        let n = t.normalized();
        for i in 0..40 {
            prop_assert_eq!(n.bit(i), t.bit(i));
        }
    }

    #[test]
    fn generated_runs_are_odd(b in bits(1..=8)) {
        let x = expand(&gen::window(&b));
        let complete: Vec<_> = runs(&x).into_iter().filter(|r| r.complete_left && r.complete_right).collect();
        for r in &complete {
            prop_assert!(r.length == 1 || r.length == 3);
        }
        for w in complete.windows(2) {
            prop_assert_eq!((w[1].start - w[0].start).rem_euclid(2), 1);
        }
    }

    #[test]
    fn column_round_trips(col in column()) {
        let x = integrate(&col).unwrap();
        prop_assert_eq!(column_extract(&x, col.len()).unwrap(), col);
    }

    #[test]
    fn integrate_inverts_extract(b in bits(5..=8), depth in 1usize..5) {
        let x = expand(&gen::window(&b));
        let col = column_extract(&x, depth).unwrap();
        prop_assert!(integrate(&col).unwrap().agrees_with(&x));
    }

    #[test]
    fn extend_left_commutes(b in bits(5..=8), depth in 2usize..5) {
        let x = expand(&gen::window(&b));
        let lhs = derive_window(&extend_left(&x, depth).unwrap()).unwrap();
        let rhs = extend_left(&derive_window(&x).unwrap(), depth - 1).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn rec_commutes_with_derivative(b in bits(2..=8)) {
        let x: PointedWord13 = expand(&gen::window(&b));
        prop_assert_eq!(induced_derive(&rec(&x).unwrap()).unwrap(), rec(&derive_window(&x).unwrap()).unwrap());
    }

    #[test]
    fn phi_right_inverse(y in alternating(), one in any::<bool>()) {
        let t = if one { TypeBit::One } else { TypeBit::Zero };
        prop_assert_eq!(induced_derive(&phi_apply(t, &y, P)).unwrap(), y);
    }

    #[test]
    fn alternation_preserved(b in bits(3..=8), l in 1usize..3) {
        let d = induced_derive_n(&gen::window(&b), l).unwrap();
        prop_assert!(is_alternating(d.symbols()));
    }

    #[test]
    fn commutation(b in bits(4..=7), l in 1usize..=4, picks in prop::collection::vec(any::<prop::sample::Index>(), 10)) {
        let y = gen::window(&b);
        let ns: Vec<i64> = picks.iter().map(|i| i.index(y.len()) as i64).collect();
        prop_assert_eq!(commutation_holds(&y, l, &ns).unwrap(), Ok(()));
    }

    #[test]
    fn sigma_lower_bound(b in bits(4..=8), l in 1usize..=4) {
        let y = gen::window(&b);
        let tower = AlignmentTower::new(&y, l).unwrap();
        let sig = tower.sigma_counts(l, y.hi() as usize).unwrap();
        for (n, s) in sig.iter().enumerate() {
            prop_assert!(*s >= n / 3usize.pow(l as u32));
        }
    }

    #[test]
    fn balance_of_factors(b in bits(3..=8), start in any::<prop::sample::Index>(), len in 1usize..=50) {
        let y = gen::window(&b);
        let s = start.index(y.len());
        let e = (s + len).min(y.len());
        prop_assert!(letter_balance(&y.symbols()[s..e]).unwrap().balanced);
    }

    #[test]
    fn reconstruct_in_range(b in bits(5..=8), l in 1usize..=4, pick in any::<prop::sample::Index>()) {
        let y = gen::window(&b);
        let n = pick.index(y.len()) as i64;
        let i = reconstruct_shift(&y.shift(n).unwrap(), l).unwrap();
        prop_assert!((0..3i64.pow(l as u32)).contains(&i));
    }

    #[test]
    fn canonical_nested(t in tau(), n in 1usize..6) {
        let a = canonical_element(&t, n).unwrap();
        let b = canonical_element(&t, n + 1).unwrap();
        prop_assert!(b.lo() <= a.lo() && b.hi() >= a.hi() && b.agrees_with(&a));
        prop_assert_eq!(types_prefix(&b, n + 1).unwrap(), t.prefix(n + 1).unwrap());
    }

    #[test]
    fn mirror_identity((a, b) in point_in_e()) {
        let (x0, y0) = h0(P, a, b);
        let (x1, y1) = h1(P, a, b);
        prop_assert!((f_ones(P, x0, y0) + f_ones(P, x1, y1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap_relation(alpha in 0u32..5, gap in 1u32..5, a in 0.0..=0.5f64, b in 0.0..=0.5f64) {
        let params = AlphabetParams::new(2 * alpha + 1, 2 * (alpha + gap) + 1).unwrap();
        let (x, y) = h0(params, a, b);
        prop_assert_eq!(h1(params, a, b), (y, x));
    }

    #[test]
    fn contraction_on_e(p in point_in_e(), q in point_in_e(), one in any::<bool>()) {
        let t = if one { TypeBit::One } else { TypeBit::Zero };
        let h = Homography::new(t, P);
        let (x, y) = (h.eval(p.0, p.1), h.eval(q.0, q.1));
        let d = (p.0 - q.0).abs().max((p.1 - q.1).abs());
        let e = (x.0 - y.0).abs().max((x.1 - y.1).abs());
        prop_assert!(e <= 2.0 / 3.0 * d + 1e-15);
    }

    #[test]
    fn defining_recursion(t in tau()) {
        let p = solve_ab(&t, DEFAULT_TOL, P).unwrap();
        let q = solve_ab(&t.shift(1), DEFAULT_TOL, P).unwrap();
        let hq = Homography::new(t.bit(0).unwrap(), P).eval(q.a, q.b);
        prop_assert!((p.a - hq.0).abs().max((p.b - hq.1).abs()) <= p.err + q.err + 1e-15);
    }

    #[test]
    fn perron_matches_solver(per in bits(1..=4)) {
        let a = perron_oracle(&per, P).unwrap().point;
        let b = solve_ab(&TypeSpec::periodic(per), DEFAULT_TOL, P).unwrap();
        prop_assert!(a.dist(&b) < 1e-9);
    }

    #[test]
    fn nu_bl_decreasing(t in tau(), l in 1usize..10) {
        let x = nu_bl(&t, l, DEFAULT_TOL, P).unwrap().value;
        let y = nu_bl(&t, l + 1, DEFAULT_TOL, P).unwrap().value;
        prop_assert!(y < x);
        prop_assert!(x >= 3f64.powi(-(l as i32)) && x <= (2f64 / 3.0).powi(l as i32) + 1e-15);
    }

    #[test]
    fn cells_nest(prefix in bits(1..=10), last in any::<bool>()) {
        let parent = FractalCell::of_prefix(&prefix, P);
        let mut longer = prefix.clone();
        longer.push(if last { TypeBit::One } else { TypeBit::Zero });
        let child = FractalCell::of_prefix(&longer, P);
        for &c in &child.corners {
            prop_assert!(parent.contains(c, 1e-12));
        }
        prop_assert!(child.diameter() <= (2f64 / 3.0).powi(longer.len() as i32 - 1) * 0.5 + 1e-15);
    }
}
