use prototypes::{lambda_of, reduced_h2, reduced_prym};
use proptest::prelude::*;
use qfield::{rat, QuadExpr};
use surface::*;

fn q(d: u64, n: i64) -> QuadExpr {
    QuadExpr::from_int(d, n)
}

fn qr(d: u64, n: i64, m: i64) -> QuadExpr {
    QuadExpr::from_rational(d, rat(n, m))
}

fn regular_count(s: &FlatSurface) -> (usize, usize) {
    let inv = find_involution(s).expect("involution");
    let fp = involution_fixed_points(s, &inv).unwrap();
    (fp.regular.len(), fp.cone.len())
}

#[test]
fn torus_stratum_and_fixed_points() {
    let t = make_torus(&q(5, 1), &q(5, 1), &q(5, 0)).unwrap();
    let r = validate(&t).unwrap();
    assert_eq!(r.genus, 1);
    assert!(r.zero_orders.is_empty());
    assert_eq!(r.regular_vertices, 1);
    assert_eq!(regular_count(&t), (4, 0));
    let names: Vec<_> = t.marked_names();
    assert_eq!(names, ["w1", "w2", "w3", "w4"]);
}

#[test]
fn twisted_torus_has_two_vertex_classes_and_four_fixed_points() {
    let lam = lambda_of(-1, 5).unwrap();
    let t = make_torus(&q(5, 2), &q(5, 1), &lam).unwrap();
    let r = validate(&t).unwrap();
    assert_eq!((r.genus, r.regular_vertices), (1, 2));
    assert_eq!(regular_count(&t), (4, 0));
}

#[test]
fn l_shape_examples() {
    let lam = lambda_of(1, 73).unwrap();
    let l = make_l(1, 73).unwrap();
    let r = validate(&l).unwrap();
    assert_eq!((r.genus, r.zero_orders.clone()), (2, vec![2]));
    assert_eq!(r.area, &(&lam - &q(73, 1)) + &lam);
    assert_eq!(regular_count(&l), (5, 1));

    // D = 9, e = −1: λ = 1, a 2×1 strip with a 1×1 column
    let l9 = make_l(-1, 9).unwrap();
    assert_eq!(validate(&l9).unwrap().area, q(9, 3));
    let mut dims: Vec<(QuadExpr, QuadExpr)> = l9.rects.iter().map(|r| (r.width.clone(), r.height.clone())).collect();
    dims.sort();
    assert_eq!(dims, vec![(q(9, 1), q(9, 1)), (q(9, 1), q(9, 1)), (q(9, 1), q(9, 1))]);

    assert!(make_l(3, 17).is_err());
}

#[test]
fn l_shape_named_points() {
    let l = make_l(1, 73).unwrap();
    let w1 = l.marked_point("w1").unwrap();
    assert_eq!((w1.x.clone(), w1.y.clone()), (qr(73, 1, 2), qr(73, 1, 2)));
    let names = l.marked_names();
    assert_eq!(names, ["w1", "w2", "w3", "w4", "w5"]);
}

#[test]
fn square_tiled_l_counts_unit_squares() {
    // D = d²: λ + 1 squares up, λ − e squares across
    for d in [5i64, 7, 9] {
        let dd = d * d;
        for e in reduced_h2(dd).unwrap() {
            let lam = (e + d) / 2;
            let area = validate(&make_l(e, dd).unwrap()).unwrap().area;
            assert_eq!(area, q(dd as u64, (lam - e) + lam), "D = {dd}, e = {e}");
        }
    }
}

#[test]
fn prototype_areas_and_strata() {
    let d = 17u64;
    let lam = lambda_of(-1, 17).unwrap();
    let p = make_p(0, 2, 2, -1).unwrap();
    assert_eq!(validate(&p).unwrap().area, &q(d, 4) + &(&lam * &lam));

    let lam73 = lambda_of(-3, 73).unwrap();
    let ap = make_aplus(0, 8, 1, -3).unwrap();
    let r = validate(&ap).unwrap();
    assert_eq!((r.genus, r.zero_orders), (3, vec![4]));
    assert_eq!(r.area, &q(73, 16) + &(&lam73 * &lam73));
    assert_eq!(regular_count(&ap), (3, 1));

    let am = make_aminus(0, 8, 1, -3).unwrap();
    let r = validate(&am).unwrap();
    assert_eq!((r.genus, r.zero_orders), (3, vec![4]));
    assert_eq!(r.area, &q(73, 8) + &(&lam73 * &lam73).scale(&rat(1, 2)));
    assert_eq!(regular_count(&am), (3, 1));

    assert!(make_aplus(1, 4, 2, -3).is_ok());
    assert!(make_aplus(0, 1, 1, 0).is_err());
}

#[test]
fn z_surface_examples() {
    let z = make_z(-2, 100).unwrap();
    assert!(z.rects.iter().all(|r| r.width.is_rational() && r.height.is_rational()));
    let widths: QuadExpr = z.rects.iter().filter(|r| r.height == q(100, 1)).fold(q(100, 0), |a, r| a + r.width.clone());
    // strip width λ − e = 6 with λ = 4
    assert_eq!(widths, q(100, 6));
    assert_eq!(regular_count(&z), (3, 1));
}

#[test]
fn every_reduced_prototype_has_the_expected_fixed_points() {
    for d in (5..=120i64).filter(|d| d % 4 <= 1) {
        for e in reduced_h2(d).unwrap() {
            let l = make_l(e, d).unwrap();
            assert_eq!(regular_count(&l), (5, 1), "L_{d}({e})");
            assert_eq!(validate(&l).unwrap().zero_orders, vec![2]);
        }
    }
    for d in (8..=120i64).filter(|d| d % 4 <= 1) {
        for e in reduced_prym(d).unwrap() {
            let b = (d - e * e) / 8;
            for s in [make_aplus(0, b, 1, e).unwrap(), make_aminus(0, b, 1, e).unwrap(), make_z(e, d).unwrap()] {
                assert_eq!(regular_count(&s), (3, 1), "D = {d}, e = {e}");
                assert_eq!(validate(&s).unwrap().zero_orders, vec![4]);
            }
        }
    }
}

#[test]
fn involution_squares_to_identity_on_points() {
    let s = make_p(1, 2, 2, -1).unwrap();
    let topo = s.topology().unwrap();
    let inv = find_involution(&s).unwrap();
    for r in 0..s.rects.len() {
        let (w, h) = (&s.rects[r].width, &s.rects[r].height);
        for (x, y) in [(w.scale(&rat(1, 3)), h.scale(&rat(1, 5))), (q(17, 0), h.scale(&rat(2, 7))), (w.clone(), h.clone())] {
            let once = inv.apply(&topo, r, &x, &y);
            let twice = inv.apply(&topo, once.0, &once.1, &once.2);
            assert_eq!(twice, topo.canonical(r, &x, &y));
        }
    }
    for m in &s.marked {
        assert_eq!(inv.image_name(&s, &topo, &m.name).as_deref(), Some(m.name.as_str()));
    }
}

#[test]
fn asymmetric_three_rectangle_torus_has_no_rectangle_involution() {
    let d = 5;
    let mut b = Builder::new(d);
    let z = q(d, 0);
    b.rect(z.clone(), z.clone(), q(d, 1), q(d, 1));
    b.rect(q(d, 1), z.clone(), q(d, 2), q(d, 1));
    b.rect(q(d, 3), z.clone(), q(d, 3), q(d, 1));
    b.glue_h(&z, &z, &q(d, 1), &z, &q(d, 6)).unwrap();
    b.glue_v(&z, &z, &q(d, 6), &z, &q(d, 1)).unwrap();
    b.glue_v(&q(d, 1), &z, &q(d, 1), &z, &q(d, 1)).unwrap();
    b.glue_v(&q(d, 3), &z, &q(d, 3), &z, &q(d, 1)).unwrap();
    let s = b.build().unwrap();
    assert_eq!(validate(&s).unwrap().genus, 1);
    assert!(find_involution(&s).is_none());
}

#[test]
fn validation_errors() {
    let d = 5;
    let mut s = make_torus(&q(d, 1), &q(d, 1), &q(d, 0)).unwrap();
    s.gluings[0].side_b.length = qr(d, 1, 2);
    assert!(matches!(validate(&s), Err(SurfaceError::BadGluing(..))));

    let mut s = make_torus(&q(d, 1), &q(d, 1), &q(d, 0)).unwrap();
    s.gluings.pop();
    assert!(matches!(validate(&s), Err(SurfaceError::Coverage { .. })));

    let mut s = make_torus(&q(d, 1), &q(d, 1), &q(d, 0)).unwrap();
    s.gluings[0].side_a.edge = Edge::Left;
    assert!(validate(&s).is_err());

    let mut s = make_torus(&q(d, 1), &q(d, 1), &q(d, 0)).unwrap();
    s.rects[0].height = q(d, 0);
    assert!(matches!(validate(&s), Err(SurfaceError::BadRectangle(0))));

    let mut s = make_torus(&q(d, 1), &q(d, 1), &q(d, 0)).unwrap();
    s.marked[0].x = q(d, 2);
    assert!(matches!(validate(&s), Err(SurfaceError::BadMarkedPoint(..))));

    let mut s = make_torus(&q(d, 1), &q(d, 1), &q(d, 0)).unwrap();
    s.rects[0].width = q(13, 1);
    assert!(matches!(validate(&s), Err(SurfaceError::MixedDiscriminant)));
}

#[test]
fn overlapping_segments_are_rejected() {
    let d = 5;
    let z = q(d, 0);
    let one = q(d, 1);
    let side = |edge, offset: &QuadExpr, length: &QuadExpr| Side { rect: 0, edge, offset: offset.clone(), length: length.clone() };
    let s = FlatSurface {
        d,
        rects: vec![Rect { id: 0, width: q(d, 2), height: one.clone() }],
        gluings: vec![
            EdgeGluing { side_a: side(Edge::Bottom, &z, &q(d, 2)), side_b: side(Edge::Top, &z, &q(d, 2)) },
            EdgeGluing { side_a: side(Edge::Bottom, &one, &one), side_b: side(Edge::Top, &one, &one) },
            EdgeGluing { side_a: side(Edge::Left, &z, &one), side_b: side(Edge::Right, &z, &one) },
        ],
        marked: vec![],
    };
    assert!(matches!(validate(&s), Err(SurfaceError::Coverage { .. })));
}

#[test]
fn json_round_trip_and_errors() {
    let l = make_l(1, 73).unwrap();
    let dir = std::env::temp_dir().join(format!("surface-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l73.json");
    save_surface(&l, &path).unwrap();
    assert_eq!(load_surface(&path).unwrap(), l);

    let text = to_json(&l);
    assert!(text.contains(SCHEMA));
    let broken = text.replacen("\"rect\"", "\"rekt\"", 1);
    let err = from_json(&broken).unwrap_err().to_string();
    assert!(err.contains("line"), "{err}");

    let mut s = l.clone();
    s.gluings[0].side_a.length = &s.gluings[0].side_a.length + &q(73, 1);
    assert!(from_json(&to_json(&s)).is_err());
    assert!(matches!(from_json(&text.replace(SCHEMA, "other/9")), Err(SurfaceError::Parse(_))));
    assert!(matches!(load_surface(dir.join("missing.json")), Err(SurfaceError::Io(_))));
}

#[test]
fn diag_action() {
    let s = make_l(-1, 17).unwrap();
    let one = QuadExpr::one(17);
    assert_eq!(s.apply_diag(&one, &one).unwrap(), s);
    let sx = lambda_of(-1, 17).unwrap();
    let sy = qr(17, 3, 2);
    let t = s.apply_diag(&sx, &sy).unwrap();
    assert_eq!(validate(&t).unwrap().area, &(&validate(&s).unwrap().area * &sx) * &sy);
    assert!(s.apply_diag(&-one.clone(), &one).is_err());

    // the reduced P scaled by 1/λ is the L-shaped table, points included
    let p = make_p(0, 4, 1, -1).unwrap();
    let lam = lambda_of(-1, 17).unwrap();
    let scaled = p.apply_diag(&(&one / &lam), &one).unwrap();
    assert_eq!(scaled, s);
}

fn fixed_of(s: &FlatSurface) -> Vec<(usize, QuadExpr, QuadExpr)> {
    let inv = find_involution(s).unwrap();
    let fp = involution_fixed_points(s, &inv).unwrap();
    fp.regular.into_iter().map(|m| (m.rect, m.x, m.y)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diag_commutes_with_fixed_points(i in 0usize..4, nx in 1i64..6, dx in 1i64..6, ny in 1i64..6, dy in 1i64..6) {
        let s = [make_l(-1, 17), make_p(1, 2, 2, -1), make_aplus(0, 2, 1, -3), make_z(-1, 33)][i].clone().unwrap();
        let d = s.d;
        let (sx, sy) = (qr(d, nx, dx), qr(d, ny, dy));
        let t = s.apply_diag(&sx, &sy).unwrap();
        let scaled: Vec<_> = fixed_of(&s).into_iter().map(|(r, x, y)| (r, &x * &sx, &y * &sy)).collect();
        prop_assert_eq!(fixed_of(&t), scaled);
    }

    #[test]
    fn tori_always_have_four_fixed_points(w in 1i64..5, h in 1i64..5, tn in 0i64..7, irr in proptest::bool::ANY) {
        let d = 13u64;
        let twist = if irr { QuadExpr::new(d, rat(tn, 7), rat(1, 9)).unwrap() } else { qr(d, tn, 7) };
        let t = make_torus(&q(d, w), &q(d, h), &twist).unwrap();
        prop_assert_eq!(validate(&t).unwrap().genus, 1);
        prop_assert_eq!(regular_count(&t), (4, 0));
    }

    #[test]
    fn canonical_points_are_stable(r in 0usize..4, xn in 0i64..=6, yn in 0i64..=6) {
        let s = make_aminus(0, 2, 1, -1).unwrap();
        let topo = s.topology().unwrap();
        let r = r % s.rects.len();
        let rc = &s.rects[r];
        let (x, y) = (rc.width.scale(&rat(xn, 6)), rc.height.scale(&rat(yn, 6)));
        let c = topo.canonical(r, &x, &y);
        prop_assert_eq!(topo.canonical(c.0, &c.1, &c.2), c);
    }
}
