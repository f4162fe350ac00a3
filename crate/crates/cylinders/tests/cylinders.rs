use cylinders::{
    decompose, direction_permutation, search_directions, trace_separatrix, twist_data, twist_permutation, CylError, CylinderDecomposition, Direction,
    RatioClass, DEFAULT_MAX_CROSSINGS,
};
use groups::{generate, iso_class, IsoClass, Perm};
use proptest::prelude::*;
use prototypes::{lambda_of, reduced_h2, reduced_h2_prototype, reduced_prym, reduced_prym_prototype};
use qfield::{rat, QuadExpr};
use surface::{find_involution, make_aminus, make_aplus, make_l, make_p, make_torus, make_z, FlatSurface};

const BUDGET: usize = 5000;

fn perm(s: &str, n: usize) -> Perm {
    Perm::parse(s, n).unwrap()
}

fn p_reduced(e: i64, d: i64) -> FlatSurface {
    let p = reduced_h2_prototype(e, d).unwrap();
    make_p(p.a, p.b, p.c, p.e).unwrap()
}

fn b_of(e: i64, d: i64, denom: i64) -> i64 {
    (d - e * e) / denom
}

/// Ratio of the largest modulus to the smallest.
fn extreme_ratio(dec: &CylinderDecomposition) -> qfield::Rational {
    let m = dec.moduli();
    let max = m.iter().max().unwrap();
    let min = m.iter().min().unwrap();
    max.rational_ratio(min).unwrap()
}

fn perm_of(s: &FlatSurface, dir: &Direction) -> Perm {
    direction_permutation(s, dir, BUDGET).unwrap().2
}

fn int_ratio(r: &qfield::Rational) -> i64 {
    assert!(r.is_integer(), "ratio {r} is not an integer");
    i64::try_from(r.to_integer()).unwrap()
}

#[test]
fn diagonal_closes_on_l9() {
    let s = make_l(-1, 9).unwrap();
    let dir = Direction::from_ints(9, 1, 1).unwrap();
    for ray in 0..3 {
        let sc = trace_separatrix(&s, 0, ray, &dir, BUDGET).unwrap();
        assert!(sc.length.is_positive());
    }
    let (dec, td, p) = direction_permutation(&s, &dir, BUDGET).unwrap();
    assert_eq!(dec.cylinders.len(), 1);
    assert_eq!(td.k, vec![1]);
    assert_eq!(p, perm("(4 5)", 5));
}

#[test]
fn horizontal_separatrix_has_horizontal_holonomy() {
    for d in [5, 8, 12, 13, 17, 21] {
        for e in reduced_h2(d).unwrap() {
            let s = make_l(e, d).unwrap();
            let dir = Direction::horizontal(d as u64);
            let sc = trace_separatrix(&s, 0, 0, &dir, BUDGET).unwrap();
            assert!(sc.holonomy.0.is_positive(), "L_{d}({e})");
            assert!(sc.holonomy.1.is_zero(), "L_{d}({e})");
            for piece in &sc.pieces {
                assert_eq!(piece.from.1, piece.to.1);
            }
        }
    }
}

#[test]
fn golden_slope_never_closes() {
    let one = QuadExpr::one(5);
    let s = make_torus(&one, &one, &QuadExpr::zero(5)).unwrap();
    let golden = (QuadExpr::one(5) + QuadExpr::sqrt_d(5)) / QuadExpr::from_int(5, 2);
    let dir = Direction::new(one, golden).unwrap();
    let err = trace_separatrix(&s, 0, 0, &dir, 10_000).unwrap_err();
    assert!(matches!(err, CylError::NotClosed { budget: 10_000 }));
    assert!(matches!(decompose(&s, &dir, 10_000).unwrap_err(), CylError::NotPeriodic(_)));
}

#[test]
fn zero_direction_is_rejected() {
    assert!(matches!(Direction::from_ints(5, 0, 0), Err(CylError::ZeroDirection)));
}

#[test]
fn direction_normalization() {
    let a = Direction::from_ints(5, -2, -4).unwrap();
    let b = Direction::from_ints(5, 1, 2).unwrap();
    assert_eq!(a, b);
    let c = Direction::from_ints(5, 0, -3).unwrap();
    assert_eq!(c, Direction::vertical(5));
    assert_eq!(Direction::parse("2, 0", 5).unwrap(), Direction::horizontal(5));
    let lam = lambda_of(-1, 33).unwrap();
    let d = Direction::new(-lam.clone(), QuadExpr::from_int(33, -1)).unwrap();
    assert_eq!(d, Direction { u: lam, v: QuadExpr::one(33) });
    assert!(Direction::parse("1", 5).is_err());
}

#[test]
fn l33_lambda_direction() {
    let d = 33;
    let s = make_l(-1, d).unwrap();
    let lam = lambda_of(-1, d).unwrap();
    let dir = Direction::new(lam, QuadExpr::one(d as u64)).unwrap();
    let (dec, _, p) = direction_permutation(&s, &dir, BUDGET).unwrap();
    assert_eq!(dec.cylinders.len(), 2);
    let i = dec.cylinder_of("w4").unwrap();
    assert_eq!(dec.cylinder_of("w5"), Some(i));
    let m = dec.moduli();
    assert_eq!(m[i].rational_ratio(&m[1 - i]).unwrap(), rat(2, 1));
    assert_eq!(p, perm("(4 5)", 5));
}

#[test]
fn l33_slope_three_over_lambda_minus_two() {
    let d = 33;
    let s = make_l(1, d).unwrap();
    let lam = lambda_of(1, d).unwrap();
    let dir = Direction::new(lam - QuadExpr::from_int(d as u64, 2), QuadExpr::from_int(d as u64, 3)).unwrap();
    let res = search_directions(&s, &[dir], BUDGET);
    assert!(res.failed.is_empty());
    assert_eq!(res.found[0].1, perm("(4 5)", 5));
    let dec = decompose(&s, &res.found[0].0, BUDGET).unwrap();
    assert_eq!(extreme_ratio(&dec), rat(2, 1));
}

#[test]
fn z17_direction_two_one() {
    let s = make_z(-3, 17).unwrap();
    let dir = Direction::from_ints(17, 2, 1).unwrap();
    let (dec, _, p) = direction_permutation(&s, &dir, BUDGET).unwrap();
    assert!(dec.cylinders.len() >= 2);
    assert_eq!(extreme_ratio(&dec), rat(2, 1));
    assert_eq!(p, perm("(1 3)", 3));
    let h = perm_of(&s, &Direction::horizontal(17));
    assert_eq!(h, perm("(1 2)", 3));
    assert_eq!(iso_class(&generate(3, &[h, p]).unwrap()), IsoClass::Sym3);
}

#[test]
fn a_minus_25_diagonal_one_cylinder() {
    let p = reduced_prym_prototype(-1, 25).unwrap();
    let s = make_aminus(p.a, p.b, p.c, p.e).unwrap();
    let res = search_directions(&s, &[Direction::from_ints(25, 1, 1).unwrap()], BUDGET);
    let (dir, q) = &res.found[0];
    let dec = decompose(&s, dir, BUDGET).unwrap();
    assert_eq!(dec.cylinders.len(), 1);
    let mut core: Vec<&str> = dec.cylinders[0].core_points.iter().map(|(n, _)| n.as_str()).collect();
    core.sort();
    assert_eq!(core, ["w2", "w3"]);
    assert_eq!(*q, perm("(2 3)", 3));
}

#[test]
fn horizontal_search_matches_direct_computation() {
    let surfaces = [make_l(-1, 17).unwrap(), make_z(-1, 41).unwrap(), p_reduced(0, 12)];
    for s in &surfaces {
        let d = s.d;
        let res = search_directions(s, &[Direction::horizontal(d), Direction::from_ints(d, 1, 0).unwrap()], BUDGET);
        let direct = perm_of(s, &Direction::horizontal(d));
        assert_eq!(res.found.len(), 2);
        assert!(res.found.iter().all(|(_, p)| *p == direct));
    }
}

#[test]
fn search_collects_failures() {
    let one = QuadExpr::one(5);
    let s = make_torus(&one, &one, &QuadExpr::zero(5)).unwrap();
    let golden = (QuadExpr::one(5) + QuadExpr::sqrt_d(5)) / QuadExpr::from_int(5, 2);
    let dirs = [Direction::new(one, golden).unwrap(), Direction::from_ints(5, 1, 2).unwrap()];
    let res = search_directions(&s, &dirs, 1000);
    assert_eq!(res.found.len(), 1);
    assert_eq!(res.failed.len(), 1);
    assert_eq!(res.found[0].1, perm("(2 4)", 4));
}

#[test]
fn single_cylinder_twist_is_one() {
    let one = QuadExpr::one(5);
    let s = make_torus(&one, &one, &QuadExpr::zero(5)).unwrap();
    let dec = decompose(&s, &Direction::horizontal(5), BUDGET).unwrap();
    let td = twist_data(&dec).unwrap();
    assert_eq!(td.k, vec![1]);
    assert_eq!(td.t, dec.cylinders[0].modulus);
    assert!(td.ratios.is_empty());
}

/// Smallest positive integers k_i with k_i·m_i all equal, by brute force.
fn brute_force_k(m: &[QuadExpr]) -> Vec<u64> {
    for k1 in 1..=200u64 {
        let t = m[0].scale(&rat(k1 as i64, 1));
        let ks: Option<Vec<u64>> = m
            .iter()
            .map(|mi| {
                let r = t.rational_ratio(mi)?;
                (r.is_integer() && r > rat(0, 1)).then(|| u64::try_from(r.to_integer()).unwrap())
            })
            .collect();
        if let Some(ks) = ks {
            return ks;
        }
    }
    panic!("no small twist for {m:?}");
}

#[test]
fn twist_data_matches_brute_force() {
    let mut cases = Vec::new();
    for d in [12, 17, 20, 28, 33, 41] {
        for e in reduced_h2(d).unwrap() {
            cases.push(p_reduced(e, d));
        }
        for e in reduced_prym(d).unwrap() {
            cases.push(make_z(e, d).unwrap());
        }
    }
    for s in &cases {
        for dir in [Direction::horizontal(s.d), Direction::vertical(s.d)] {
            let dec = decompose(s, &dir, BUDGET).unwrap();
            let td = twist_data(&dec).unwrap();
            let m = dec.moduli();
            assert_eq!(td.k, brute_force_k(&m));
            for (mi, ki) in m.iter().zip(&td.k) {
                assert_eq!(mi.scale(&rat(*ki as i64, 1)), td.t);
            }
        }
    }
}

#[test]
fn two_cylinder_twist_from_ratio() {
    // m = (b, 1) gives k = (1, b)
    let s = p_reduced(-1, 21);
    let b = b_of(-1, 21, 4);
    let dec = decompose(&s, &Direction::horizontal(21), BUDGET).unwrap();
    let td = twist_data(&dec).unwrap();
    let m = dec.moduli();
    let long = if m[0] > m[1] { 0 } else { 1 };
    assert_eq!(td.k[long], 1);
    assert_eq!(td.k[1 - long], b as u64);
    let pr = &td.ratios[0];
    let r = if long == 0 { pr.ratio.clone() } else { rat(1, 1) / &pr.ratio };
    assert_eq!(r, rat(b, 1));
    assert_eq!(RatioClass::of(&rat(b, 1)), RatioClass::OddOdd);
    assert_eq!(RatioClass::of(&rat(4, 3)), RatioClass::EvenOdd);
    assert_eq!(RatioClass::of(&rat(3, 4)), RatioClass::OddEven);
}

#[test]
fn h2_horizontal_and_vertical_parity() {
    for d in 5..=120 {
        let Ok(es) = reduced_h2(d) else { continue };
        for e in es {
            let s = p_reduced(e, d);
            let b = b_of(e, d, 4);
            let hdec = decompose(&s, &Direction::horizontal(d as u64), BUDGET).unwrap();
            assert_eq!(int_ratio(&extreme_ratio(&hdec)), b, "horizontal ratio on P_{d}({e})");
            let expect_h = if b % 2 == 0 { "(1 2)" } else { "(1 2)(3 5)" };
            assert_eq!(perm_of(&s, &Direction::horizontal(d as u64)), perm(expect_h, 5), "P_{d}({e}) horizontal");

            let rv = b - e - 1;
            let vdec = decompose(&s, &Direction::vertical(d as u64), BUDGET).unwrap();
            assert_eq!(int_ratio(&extreme_ratio(&vdec)), rv, "vertical ratio on P_{d}({e})");
            let expect_v = if rv % 2 == 0 { "(1 3)" } else { "(1 3)(2 4)" };
            assert_eq!(perm_of(&s, &Direction::vertical(d as u64)), perm(expect_v, 5), "P_{d}({e}) vertical");
        }
    }
}

#[test]
fn prym_horizontal_and_vertical_parity() {
    for d in 5..=120 {
        let Ok(es) = reduced_prym(d) else { continue };
        for e in es {
            let p = reduced_prym_prototype(e, d).unwrap();
            let b = b_of(e, d, 8);
            let rv = b - e - 2;
            let plus = make_aplus(p.a, p.b, p.c, p.e).unwrap();
            let minus = make_aminus(p.a, p.b, p.c, p.e).unwrap();
            let dq = d as u64;
            let h = |s: &FlatSurface| perm_of(s, &Direction::horizontal(dq));
            let v = |s: &FlatSurface| perm_of(s, &Direction::vertical(dq));
            let swap_12 = perm("(1 2)", 3);
            let swap_13 = perm("(1 3)", 3);
            let id = Perm::identity(3);
            assert_eq!(h(&plus), if b % 2 == 1 { swap_12.clone() } else { id.clone() }, "A+_{d}({e}) horizontal");
            assert_eq!(h(&minus), swap_12, "A-_{d}({e}) horizontal");
            assert_eq!(v(&plus), swap_13.clone(), "A+_{d}({e}) vertical");
            assert_eq!(v(&minus), if rv % 2 == 1 { swap_13 } else { id }, "A-_{d}({e}) vertical");
            for s in [&plus, &minus] {
                let hd = decompose(s, &Direction::horizontal(dq), BUDGET).unwrap();
                assert_eq!(int_ratio(&extreme_ratio(&hd)), b);
                let vd = decompose(s, &Direction::vertical(dq), BUDGET).unwrap();
                assert_eq!(int_ratio(&extreme_ratio(&vd)), rv);
            }
        }
    }
}

#[test]
fn a_minus_vertical_on_discriminant_25_is_trivial() {
    let p = reduced_prym_prototype(-1, 25).unwrap();
    let s = make_aminus(p.a, p.b, p.c, p.e).unwrap();
    let (dec, td, q) = direction_permutation(&s, &Direction::vertical(25), BUDGET).unwrap();
    let short = dec.cylinder_of("w1").unwrap();
    assert_eq!(dec.cylinder_of("w3"), Some(short));
    assert_eq!(td.k[short], 2);
    assert!(q.is_identity());
}

fn check_invariants(s: &FlatSurface, dec: &CylinderDecomposition) {
    let total = dec.cylinders.iter().fold(QuadExpr::zero(s.d), |acc, c| acc + &c.w * &c.h * dec.direction.norm2());
    assert_eq!(total, s.area());
    for c in &dec.cylinders {
        assert!(c.w.is_positive() && c.h.is_positive());
        assert_eq!(c.modulus, &c.w / &c.h);
        for (_, x) in &c.core_points {
            assert!(!x.is_negative() && x < &c.w);
        }
    }
    let mut seen: Vec<&String> = dec
        .cylinders
        .iter()
        .flat_map(|c| c.core_points.iter().map(|(n, _)| n).chain(&c.boundary_points).chain(c.off_core_points.iter().map(|(n, _)| n)))
        .collect();
    seen.sort();
    let mut names: Vec<&String> = dec.marked.iter().collect();
    names.sort();
    assert_eq!(seen, names, "every marked point lies in exactly one cylinder");
}

fn check_h2(dec: &CylinderDecomposition) {
    assert!(dec.cylinders.len() <= 2);
    for c in &dec.cylinders {
        assert_eq!(c.core_points.len(), 2);
        assert!(c.off_core_points.is_empty());
    }
}

/// Twist permutation commutes with the involution's action on marked points.
fn check_involution_commutes(s: &FlatSurface, p: &Perm) {
    let topo = s.topology().unwrap();
    let inv = find_involution(s).unwrap();
    let names = s.marked_names();
    let images: Vec<usize> = names
        .iter()
        .map(|n| {
            let img = inv.image_name(s, &topo, n).unwrap();
            names.iter().position(|m| *m == img).unwrap()
        })
        .collect();
    let iota = Perm::from_images(images).unwrap();
    assert_eq!(p.compose(&iota), iota.compose(p));
}

fn square_tiled_h2() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for d in [9, 16, 25, 36, 49] {
        for e in reduced_h2(d).unwrap() {
            out.push((e, d));
        }
    }
    out
}

fn coprime_dir() -> impl Strategy<Value = (i64, i64)> {
    (-4i64..=4, -4i64..=4).prop_filter("nonzero coprime", |&(u, v)| {
        (u, v) != (0, 0) && num_integer::Integer::gcd(&u, &v) == 1
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn square_tiled_rational_directions((idx, (u, v)) in (0usize..100, coprime_dir())) {
        let cases = square_tiled_h2();
        let (e, d) = cases[idx % cases.len()];
        let s = make_l(e, d).unwrap();
        let dir = Direction::from_ints(d as u64, u, v).unwrap();
        let (dec, _, p) = direction_permutation(&s, &dir, DEFAULT_MAX_CROSSINGS).unwrap();
        check_invariants(&s, &dec);
        check_h2(&dec);
        check_involution_commutes(&s, &p);
    }

    #[test]
    fn scaling_preserves_combinatorics((idx, (u, v), num, den) in (0usize..100, coprime_dir(), 1i64..6, 1i64..6)) {
        let cases = square_tiled_h2();
        let (e, d) = cases[idx % cases.len()];
        let s = make_l(e, d).unwrap();
        let c = QuadExpr::from_rational(d as u64, rat(num, den));
        let scaled = s.apply_diag(&c, &c).unwrap();
        let dir = Direction::from_ints(d as u64, u, v).unwrap();
        let (a, ta, pa) = direction_permutation(&s, &dir, BUDGET).unwrap();
        let (b, tb, pb) = direction_permutation(&scaled, &dir, BUDGET).unwrap();
        prop_assert_eq!(a.cylinders.len(), b.cylinders.len());
        prop_assert_eq!(ta.k, tb.k);
        prop_assert_eq!(pa, pb);
        prop_assert_eq!(a.moduli(), b.moduli());
        check_invariants(&scaled, &b);
    }

    #[test]
    fn prym_square_tiled_directions((u, v) in coprime_dir(), minus in any::<bool>()) {
        let p = reduced_prym_prototype(-1, 25).unwrap();
        let s = if minus { make_aminus(p.a, p.b, p.c, p.e) } else { make_aplus(p.a, p.b, p.c, p.e) }.unwrap();
        let dir = Direction::from_ints(25, u, v).unwrap();
        let (dec, _, q) = direction_permutation(&s, &dir, DEFAULT_MAX_CROSSINGS).unwrap();
        check_invariants(&s, &dec);
        check_involution_commutes(&s, &q);
        prop_assert!(q.order() <= 2);
    }

    #[test]
    fn torus_rational_directions((u, v) in coprime_dir(), tw in 0i64..4) {
        // the fixed points of a point reflection sit on the core and boundary,
        // or all off the core when the boundary misses them
        let d = 5;
        let s = make_torus(&QuadExpr::from_int(d, 2), &QuadExpr::one(d), &QuadExpr::from_int(d, tw)).unwrap();
        let dir = Direction::from_ints(d, u, v).unwrap();
        let dec = decompose(&s, &dir, BUDGET).unwrap();
        check_invariants(&s, &dec);
        prop_assert_eq!(dec.cylinders.len(), 1);
        let td = twist_data(&dec).unwrap();
        prop_assert_eq!(&td.k, &vec![1]);
        match twist_permutation(&dec, &td) {
            Ok(q) => prop_assert_eq!(q.cycle_type().0.iter().filter(|&&l| l == 2).count(), 1),
            Err(e) => {
                prop_assert!(matches!(e, CylError::OffCorePoint(_)));
                prop_assert_eq!(dec.cylinders[0].off_core_points.len(), 4);
            }
        }
    }}

#[test]
fn irrational_prototype_directions_satisfy_invariants() {
    for d in [5, 8, 12, 13, 17, 20, 21, 24, 28, 29, 33] {
        for e in reduced_h2(d).unwrap() {
            let s = make_l(e, d).unwrap();
            for dir in [Direction::horizontal(d as u64), Direction::vertical(d as u64)] {
                let (dec, _, p) = direction_permutation(&s, &dir, BUDGET).unwrap();
                check_invariants(&s, &dec);
                check_h2(&dec);
                check_involution_commutes(&s, &p);
            }
        }
    }
}
