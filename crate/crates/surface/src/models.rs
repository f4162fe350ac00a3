//! Prototypical surfaces and their named involution fixed points.
//!
//! Each horizontal torus of width `b` is cut at `c0 = (a + λ) mod b`, the
//! point where the involution's reflection axis meets the bottom edge, so
//! that the involution maps rectangles onto rectangles.

use prototypes::{lambda_of, reduced_h2_prototype, reduced_prym_prototype, validate_h2, validate_prym, ProtoError};
use qfield::QuadExpr;

use crate::builder::{half, mod_period};
use crate::involution::{find_with, fixed_with};
use crate::{Builder, FlatSurface, MarkedPoint, SurfaceError};

fn params(e: ProtoError) -> SurfaceError {
    SurfaceError::Params(e.to_string())
}

/// Rectangles of a `b × c` torus at height `y0`, cut at `c0` when `c0 ≠ 0`.
fn torus_rects(bld: &mut Builder, y0: &QuadExpr, b: &QuadExpr, c: &QuadExpr, c0: &QuadExpr) {
    let zero = bld.q(0);
    if c0.is_zero() {
        bld.rect(zero, y0.clone(), b.clone(), c.clone());
    } else {
        bld.rect(zero, y0.clone(), c0.clone(), c.clone());
        bld.rect(c0.clone(), y0.clone(), b - c0, c.clone());
    }
}

/// Left/right gluings of a torus at height `y0`, including the cut.
fn torus_sides(bld: &mut Builder, y0: &QuadExpr, b: &QuadExpr, c: &QuadExpr, c0: &QuadExpr) -> Result<(), SurfaceError> {
    let zero = bld.q(0);
    bld.glue_v(&zero, y0, b, y0, c)?;
    if !c0.is_zero() {
        bld.glue_v(c0, y0, c0, y0, c)?;
    }
    Ok(())
}

/// Builds the surface, checks its stratum and involution, and names the
/// regular fixed points after the expected global positions.
fn finish(bld: &Builder, genus: usize, zero_order: usize, expected: &[(&str, QuadExpr, QuadExpr)]) -> Result<FlatSurface, SurfaceError> {
    let mut s = bld.build()?;
    let topo = s.topology()?;
    let report = topo.stratum(&s);
    if report.genus != genus || report.zero_orders != vec![zero_order] {
        return Err(SurfaceError::Postcondition(format!(
            "expected genus {genus} with one zero of order {zero_order}, got genus {} with zeros {:?}",
            report.genus, report.zero_orders
        )));
    }
    let inv = find_with(&topo).ok_or_else(|| SurfaceError::Postcondition("no involution with derivative -I".into()))?;
    let fixed = fixed_with(&topo, &inv);
    if fixed.regular.len() != expected.len() || fixed.cone.len() != 1 {
        return Err(SurfaceError::Postcondition(format!(
            "expected {} regular fixed points and a fixed zero, found {} and {}",
            expected.len(),
            fixed.regular.len(),
            fixed.cone.len()
        )));
    }
    let mut named = Vec::new();
    for (name, x, y) in expected {
        let (r, lx, ly) = bld
            .locate(x, y)
            .ok_or_else(|| SurfaceError::Postcondition(format!("{name} lies outside the surface")))?;
        let (rect, x, y) = topo.canonical(r, &lx, &ly);
        if !fixed.regular.iter().any(|m| m.rect == rect && m.x == x && m.y == y) {
            return Err(SurfaceError::Postcondition(format!("{name} is not a fixed point of the involution")));
        }
        if named.iter().any(|m: &MarkedPoint| m.rect == rect && m.x == x && m.y == y) {
            return Err(SurfaceError::Postcondition(format!("{name} coincides with another fixed point")));
        }
        named.push(MarkedPoint { name: name.to_string(), rect, x, y });
    }
    s.marked = named;
    Ok(s)
}

/// The genus-two prototype `P(a, b, c, e)`: a `b × c` torus with twist `a`
/// and a `λ × λ` square glued into a slit of length `λ` on its top edge.
pub fn make_p(a: i64, b: i64, c: i64, e: i64) -> Result<FlatSurface, SurfaceError> {
    let p = validate_h2(a, b, c, e).map_err(params)?;
    let d = p.d;
    let lam = lambda_of(e, d as i64).map_err(params)?;
    let mut bld = Builder::new(d);
    let (zero, aq, bq, cq) = (bld.q(0), bld.q(a), bld.q(b), bld.q(c));
    let c0 = mod_period(&(&aq + &lam), &bq);
    torus_rects(&mut bld, &zero, &bq, &cq, &c0);
    bld.rect(zero.clone(), cq.clone(), lam.clone(), lam.clone());
    let top = &cq + &lam;
    bld.glue_h(&cq, &zero, &cq, &zero, &lam)?;
    bld.glue_h_mod(&zero, &(&aq + &lam), &cq, &lam, &(&bq - &lam), &bq)?;
    bld.glue_h_mod(&zero, &aq, &top, &zero, &lam, &bq)?;
    bld.glue_v(&zero, &cq, &lam, &cq, &lam)?;
    torus_sides(&mut bld, &zero, &bq, &cq, &c0)?;
    let hc = half(&cq);
    let mid_s = &cq + &half(&lam);
    let expected = [
        ("w1", mod_period(&half(&(&aq + &lam)), &bq), hc.clone()),
        ("w2", mod_period(&half(&(&aq + &lam + &bq)), &bq), hc),
        ("w3", half(&lam), mid_s.clone()),
        ("w4", half(&(&lam + &bq)), cq.clone()),
        ("w5", zero, mid_s),
    ];
    finish(&bld, 2, 2, &expected)
}

/// The L-shaped table `L_D(e)`: `P_D(e)` scaled by `diag(1/λ, 1)`.
pub fn make_l(e: i64, d: i64) -> Result<FlatSurface, SurfaceError> {
    let p = reduced_h2_prototype(e, d).map_err(params)?;
    let lam = lambda_of(e, d).map_err(params)?;
    let s = make_p(p.a, p.b, p.c, p.e)?;
    s.apply_diag(&(QuadExpr::one(p.d) / &lam), &QuadExpr::one(p.d))
}

/// The Prym prototype `A+(a, b, c, e)`: two `b × c` tori joined through a
/// `λ × λ` square.
pub fn make_aplus(a: i64, b: i64, c: i64, e: i64) -> Result<FlatSurface, SurfaceError> {
    let p = validate_prym(a, b, c, e).map_err(params)?;
    let d = p.d;
    let lam = lambda_of(e, d as i64).map_err(params)?;
    let mut bld = Builder::new(d);
    let (zero, aq, bq, cq) = (bld.q(0), bld.q(a), bld.q(b), bld.q(c));
    let c0 = mod_period(&(&aq + &lam), &bq);
    let y2 = &cq + &lam;
    let top = &y2 + &cq;
    torus_rects(&mut bld, &zero, &bq, &cq, &c0);
    bld.rect(zero.clone(), cq.clone(), lam.clone(), lam.clone());
    torus_rects(&mut bld, &y2, &bq, &cq, &c0);
    let rest = &bq - &lam;
    let ar = &aq + &lam;
    bld.glue_h(&cq, &zero, &cq, &zero, &lam)?;
    bld.glue_h_mod(&y2, &aq, &y2, &zero, &lam, &bq)?;
    bld.glue_h_mod(&zero, &aq, &top, &zero, &lam, &bq)?;
    bld.glue_h_mod(&zero, &ar, &cq, &lam, &rest, &bq)?;
    bld.glue_h_mod(&y2, &ar, &top, &lam, &rest, &bq)?;
    bld.glue_v(&zero, &cq, &lam, &cq, &lam)?;
    torus_sides(&mut bld, &zero, &bq, &cq, &c0)?;
    torus_sides(&mut bld, &y2, &bq, &cq, &c0)?;
    let mid_s = &cq + &half(&lam);
    let expected = [
        ("w1", half(&lam), mid_s.clone()),
        ("w2", zero.clone(), mid_s),
        ("w3", mod_period(&(&aq + &half(&lam)), &bq), zero),
    ];
    finish(&bld, 3, 4, &expected)
}

/// The Prym prototype `A−(a, b, c, e)`: a `b × c` torus carrying two
/// `λ/2 × λ/2` squares side by side on a slit of length `λ`.
pub fn make_aminus(a: i64, b: i64, c: i64, e: i64) -> Result<FlatSurface, SurfaceError> {
    let p = validate_prym(a, b, c, e).map_err(params)?;
    let d = p.d;
    let lam = lambda_of(e, d as i64).map_err(params)?;
    let hl = half(&lam);
    let mut bld = Builder::new(d);
    let (zero, aq, bq, cq) = (bld.q(0), bld.q(a), bld.q(b), bld.q(c));
    let c0 = mod_period(&(&aq + &lam), &bq);
    torus_rects(&mut bld, &zero, &bq, &cq, &c0);
    bld.rect(zero.clone(), cq.clone(), hl.clone(), hl.clone());
    bld.rect(hl.clone(), cq.clone(), hl.clone(), hl.clone());
    let top = &cq + &hl;
    bld.glue_h(&cq, &zero, &cq, &zero, &lam)?;
    bld.glue_h_mod(&zero, &(&aq + &lam), &cq, &lam, &(&bq - &lam), &bq)?;
    bld.glue_h_mod(&zero, &aq, &top, &zero, &lam, &bq)?;
    bld.glue_v(&zero, &cq, &hl, &cq, &hl)?;
    bld.glue_v(&hl, &cq, &lam, &cq, &hl)?;
    torus_sides(&mut bld, &zero, &bq, &cq, &c0)?;
    let hc = half(&cq);
    let expected = [
        ("w1", mod_period(&half(&(&aq + &lam + &bq)), &bq), hc.clone()),
        ("w2", mod_period(&half(&(&aq + &lam)), &bq), hc),
        ("w3", half(&(&lam + &bq)), cq),
    ];
    finish(&bld, 3, 4, &expected)
}

/// `Z_D(e)`: the reduced `A−_D(e)` scaled by `diag(2/λ, 1)`.
pub fn make_z(e: i64, d: i64) -> Result<FlatSurface, SurfaceError> {
    let p = reduced_prym_prototype(e, d).map_err(params)?;
    let lam = lambda_of(e, d).map_err(params)?;
    let s = make_aminus(p.a, p.b, p.c, p.e)?;
    s.apply_diag(&(QuadExpr::from_int(p.d, 2) / &lam), &QuadExpr::one(p.d))
}

/// A `w × h` torus whose top edge is glued to the bottom edge shifted by
/// `twist`, marked with its four 2-torsion points `w1…w4`.
pub fn make_torus(w: &QuadExpr, h: &QuadExpr, twist: &QuadExpr) -> Result<FlatSurface, SurfaceError> {
    let d = w.d();
    if !w.is_positive() || !h.is_positive() {
        return Err(SurfaceError::Params("torus sides must be positive".into()));
    }
    let mut bld = Builder::new(d);
    let zero = bld.q(0);
    bld.rect(zero.clone(), zero.clone(), w.clone(), h.clone());
    bld.glue_h_mod(&zero, &mod_period(twist, w), h, &zero, w, w)?;
    bld.glue_v(&zero, &zero, w, &zero, h)?;
    let mut s = bld.build()?;
    let topo = s.topology()?;
    let inv = find_with(&topo).ok_or_else(|| SurfaceError::Postcondition("torus without involution".into()))?;
    s.marked = fixed_with(&topo, &inv).regular;
    debug_assert_eq!(s.marked.len(), 4);
    Ok(s)
}
