//! Cylinder decompositions of rectangle surfaces in a given direction.
//!
//! All separatrices in the direction are traced exactly. Boundary
//! components of cylinders are cycles of saddle connections, chained by
//! keeping the cylinder on the left. Heights come from a perpendicular ray,
//! marked points are located by dropping perpendiculars to the boundary on
//! the right, and the affine twist acts on each core curve by a rotation.

use std::fmt;

use groups::Perm;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use qfield::{QuadExpr, Rational};
use surface::{FlatSurface, SurfaceError, Topology};

mod trace;

pub use trace::Piece;
use trace::{Flow, State, WalkEnd};

/// Crossing budget used when none is given.
pub const DEFAULT_MAX_CROSSINGS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CylError {
    #[error("trajectory did not reach a singularity within {budget} crossings")]
    NotClosed { budget: usize },
    #[error("direction is not periodic: {0}")]
    NotPeriodic(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("moduli {0} and {1} are not rationally related")]
    IrrationalRatio(String, String),
    #[error("no marked point at the twist image of {0}")]
    UnmatchedImage(String),
    #[error("marked point {0} lies inside a cylinder but off its core curve")]
    OffCorePoint(String),
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("no outgoing ray {ray} at vertex orbit {orbit}")]
    BadRay { orbit: usize, ray: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// A direction `(u, v)` in canonical normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Direction {
    pub u: QuadExpr,
    pub v: QuadExpr,
}

fn rq(d: u64, r: Rational) -> QuadExpr {
    QuadExpr::from_rational(d, r)
}

impl Direction {
    /// Normalizes so the first nonzero coordinate is positive; commensurable
    /// coordinates become a primitive integer vector.
    pub fn new(u: QuadExpr, v: QuadExpr) -> Result<Direction, CylError> {
        let d = u.d();
        if v.d() != d {
            return Err(CylError::Surface(SurfaceError::MixedDiscriminant));
        }
        if u.is_zero() && v.is_zero() {
            return Err(CylError::ZeroDirection);
        }
        if u.is_zero() {
            return Ok(Direction { u, v: QuadExpr::one(d) });
        }
        if let Some(r) = v.rational_ratio(&u) {
            // (u, v) ∥ (1, p/q) ∥ (q, p)
            let (p, q) = (r.numer().clone(), r.denom().clone());
            return Ok(Direction { u: rq(d, Rational::from_integer(q)), v: rq(d, Rational::from_integer(p)) });
        }
        if u.is_negative() {
            Ok(Direction { u: -u, v: -v })
        } else {
            Ok(Direction { u, v })
        }
    }

    pub fn from_ints(d: u64, u: i64, v: i64) -> Result<Direction, CylError> {
        Direction::new(QuadExpr::from_int(d, u), QuadExpr::from_int(d, v))
    }

    pub fn horizontal(d: u64) -> Direction {
        Direction { u: QuadExpr::one(d), v: QuadExpr::zero(d) }
    }

    pub fn vertical(d: u64) -> Direction {
        Direction { u: QuadExpr::zero(d), v: QuadExpr::one(d) }
    }

    /// `u² + v²`.
    pub fn norm2(&self) -> QuadExpr {
        &(&self.u * &self.u) + &(&self.v * &self.v)
    }

    /// Left-hand perpendicular `(−v, u)`.
    pub fn perp(&self) -> (QuadExpr, QuadExpr) {
        (-&self.v, self.u.clone())
    }

    /// Parses `u,v` with each coordinate in the qfield text encoding or as
    /// a rational number.
    pub fn parse(s: &str, d: u64) -> Result<Direction, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("direction {s:?} must be `u,v`"))?;
        let coord = |t: &str| -> Result<QuadExpr, String> {
            let t = t.trim();
            if let Some(r) = qfield::parse_rational(t) {
                return Ok(rq(d, r));
            }
            let x = QuadExpr::parse(t).map_err(|e| e.to_string())?;
            if x.d() != d {
                return Err(format!("{t}: discriminant differs from the surface's {d}"));
            }
            Ok(x)
        };
        Direction::new(coord(a)?, coord(b)?).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: &QuadExpr| match x.to_rational() {
            Some(r) if r.is_integer() => r.numer().to_string(),
            _ => x.to_string(),
        };
        write!(f, "({}, {})", show(&self.u), show(&self.v))
    }
}

/// A straight segment between singularities.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SaddleConnection {
    /// Start vertex orbit and angular position of the outgoing ray.
    pub start: (usize, usize),
    /// End vertex orbit and angular position of the incoming ray.
    pub end: (usize, usize),
    pub pieces: Vec<Piece>,
    /// Length in units of the direction vector.
    pub length: QuadExpr,
    pub holonomy: (QuadExpr, QuadExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Cylinder {
    /// Circumference in units of the direction vector.
    pub w: QuadExpr,
    /// Height in the same units.
    pub h: QuadExpr,
    pub modulus: QuadExpr,
    /// Saddle connections of the boundary with the cylinder on their left.
    pub boundary: Vec<usize>,
    pub core_points: Vec<(String, QuadExpr)>,
    pub boundary_points: Vec<String>,
    pub off_core_points: Vec<(String, QuadExpr)>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CylinderDecomposition {
    pub direction: Direction,
    pub saddle_connections: Vec<SaddleConnection>,
    pub cylinders: Vec<Cylinder>,
    /// Marked point names in surface order; permutations act on these.
    pub marked: Vec<String>,
}

impl CylinderDecomposition {
    /// Cylinder index containing a marked point.
    pub fn cylinder_of(&self, name: &str) -> Option<usize> {
        self.cylinders.iter().position(|c| {
            c.core_points.iter().any(|(n, _)| n == name)
                || c.boundary_points.iter().any(|n| n == name)
                || c.off_core_points.iter().any(|(n, _)| n == name)
        })
    }

    pub fn moduli(&self) -> Vec<QuadExpr> {
        self.cylinders.iter().map(|c| c.modulus.clone()).collect()
    }
}

/// Parity pattern of a reduced ratio `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum RatioClass {
    OddOdd,
    EvenOdd,
    OddEven,
}

impl RatioClass {
    pub fn of(r: &Rational) -> RatioClass {
        match (r.numer().is_even(), r.denom().is_even()) {
            (false, false) => RatioClass::OddOdd,
            (true, _) => RatioClass::EvenOdd,
            (false, true) => RatioClass::OddEven,
        }
    }
}

impl fmt::Display for RatioClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioClass::OddOdd => "odd/odd",
            RatioClass::EvenOdd => "even/odd",
            RatioClass::OddEven => "odd/even",
        })
    }
}

/// Minimal common twist `t = k_i·m_i`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TwistData {
    pub t: QuadExpr,
    pub k: Vec<u64>,
    /// `m_i / m_j` for every pair `i < j`.
    pub ratios: Vec<PairRatio>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PairRatio {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "ser_rational")]
    pub ratio: Rational,
    pub class: RatioClass,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

struct Ctx {
    topo: Topology,
    budget: usize,
}

fn stop_set(topo: &Topology, extra: Option<usize>) -> Vec<bool> {
    let mut stop: Vec<bool> = topo.orbits.iter().map(|o| o.is_cone()).collect();
    if let Some(o) = extra {
        stop[o] = true;
    }
    stop
}

/// Orbits where separatrices start and stop: the cone points, or one
/// reference vertex on a torus.
fn singular_orbits(topo: &Topology) -> Vec<usize> {
    let cones = topo.cone_orbits();
    if cones.is_empty() {
        vec![0]
    } else {
        cones
    }
}

fn trace_ray(flow: &Flow, stop: &[bool], orbit: usize, pos: usize, dir: &Direction, budget: usize) -> Result<SaddleConnection, CylError> {
    let start = flow.ray_state(orbit, pos);
    let mut pieces = Vec::new();
    let end = flow.walk(start, &dir.u, &dir.v, budget, &|o| stop[o], &mut |p| {
        pieces.push(p.clone());
        false
    })?;
    let WalkEnd::Vertex { orbit: eo, sector } = end else { unreachable!("the piece callback never stops") };
    let back = (-&dir.u, -&dir.v);
    let epos = flow.ray_position(sector, &back.0, &back.1);
    let d = dir.u.d();
    let length = pieces.iter().fold(QuadExpr::zero(d), |acc, p| acc + p.t.clone());
    let holonomy = (&length * &dir.u, &length * &dir.v);
    Ok(SaddleConnection { start: (orbit, pos), end: (eo, epos), pieces, length, holonomy })
}

/// Traces the `ray`-th outgoing ray (counterclockwise from the orbit's
/// first sector) of a vertex orbit until it reaches a singularity.
pub fn trace_separatrix(s: &FlatSurface, orbit: usize, ray: usize, dir: &Direction, max_crossings: usize) -> Result<SaddleConnection, CylError> {
    let topo = s.topology()?;
    let flow = Flow::new(&topo);
    if orbit >= topo.orbits.len() {
        return Err(CylError::BadRay { orbit, ray });
    }
    let rays = flow.out_rays(orbit, &dir.u, &dir.v);
    let pos = *rays.get(ray).ok_or(CylError::BadRay { orbit, ray })?;
    let stop = stop_set(&topo, Some(orbit));
    trace_ray(&flow, &stop, orbit, pos, dir, max_crossings.max(1))
}

/// Hit of a walk against the saddle connections.
struct Hit {
    /// Distance along the walk.
    s: QuadExpr,
    sc: usize,
    /// Distance along the saddle connection from its start.
    tau: QuadExpr,
}

fn dot(a: (&QuadExpr, &QuadExpr), b: (&QuadExpr, &QuadExpr)) -> QuadExpr {
    &(a.0 * b.0) + &(a.1 * b.1)
}

impl Ctx {
    /// First intersection of a walk piece (direction `n ⟂ dir`) with a
    /// saddle connection, away from the singular endpoints and beyond `min_s`.
    fn first_hit(&self, scs: &[SaddleConnection], dir: &Direction, n: (&QuadExpr, &QuadExpr), piece: &Piece, offset: &QuadExpr, min_s: &QuadExpr) -> Option<Hit> {
        let nn = dir.norm2();
        let mut best: Option<Hit> = None;
        for (i, sc) in scs.iter().enumerate() {
            let mut acc = QuadExpr::zero(self.topo.d);
            for (j, sp) in sc.pieces.iter().enumerate() {
                let start_acc = acc.clone();
                acc = &acc + &sp.t;
                if sp.rect != piece.rect {
                    continue;
                }
                let dx = &sp.from.0 - &piece.from.0;
                let dy = &sp.from.1 - &piece.from.1;
                let s_loc = dot((&dx, &dy), n) / &nn;
                let tau_loc = -(dot((&dx, &dy), (&dir.u, &dir.v)) / &nn);
                if s_loc.is_negative() || s_loc > piece.t || tau_loc.is_negative() || tau_loc > sp.t {
                    continue;
                }
                let at_start = j == 0 && tau_loc.is_zero();
                let at_end = j + 1 == sc.pieces.len() && tau_loc == sp.t;
                if at_start || at_end {
                    continue;
                }
                let s = offset + &s_loc;
                if &s <= min_s {
                    continue;
                }
                if best.as_ref().is_none_or(|b| s < b.s) {
                    best = Some(Hit { s, sc: i, tau: &start_acc + &tau_loc });
                }
            }
        }
        best
    }

    /// Walks from `start` in direction `n` until it meets a saddle
    /// connection (strictly after `min_s`) or a singularity.
    fn probe(&self, flow: &Flow, stop: &[bool], scs: &[SaddleConnection], dir: &Direction, n: (&QuadExpr, &QuadExpr), start: State, min_s: &QuadExpr) -> Result<(QuadExpr, Probe), CylError> {
        let mut offset = QuadExpr::zero(self.topo.d);
        let mut found = None;
        let end = flow.walk(start, n.0, n.1, self.budget, &|o| stop[o], &mut |p| {
            if let Some(h) = self.first_hit(scs, dir, n, p, &offset, min_s) {
                found = Some(h);
                return true;
            }
            offset = &offset + &p.t;
            false
        })?;
        match end {
            WalkEnd::Stopped => {
                let h = found.expect("stopped on a hit");
                Ok((h.s, Probe::Sc(h.sc, h.tau)))
            }
            WalkEnd::Vertex { orbit, sector } => {
                // the walk arrives moving along −n; read the ray back along n
                let back = (-n.0, -n.1);
                let pos = flow.ray_position(sector, &back.0, &back.1);
                Ok((offset, Probe::Cone(orbit, pos)))
            }
        }
    }
}

enum Probe {
    Sc(usize, QuadExpr),
    Cone(usize, usize),
}

/// Decomposes the surface into cylinders in direction `dir`.
pub fn decompose(s: &FlatSurface, dir: &Direction, max_crossings: usize) -> Result<CylinderDecomposition, CylError> {
    let topo = s.topology()?;
    if dir.u.d() != s.d {
        return Err(CylError::Surface(SurfaceError::MixedDiscriminant));
    }
    let ctx = Ctx { topo, budget: max_crossings.max(1) };
    let topo = &ctx.topo;
    let flow = Flow::new(topo);
    let singular = singular_orbits(topo);
    let stop = stop_set(topo, singular.first().copied());
    let d = s.d;

    let mut scs = Vec::new();
    for &o in &singular {
        for pos in flow.out_rays(o, &dir.u, &dir.v) {
            let sc = trace_ray(&flow, &stop, o, pos, dir, ctx.budget).map_err(|e| match e {
                CylError::NotClosed { budget } => CylError::NotPeriodic(format!("separatrix from orbit {o} does not close within {budget} crossings")),
                other => other,
            })?;
            scs.push(sc);
        }
    }
    let starting = |orbit: usize, pos: usize| scs.iter().position(|sc| sc.start == (orbit, pos));
    // keep the cylinder on the left: continue on the outgoing ray π clockwise of the arrival
    let mut left_next = Vec::with_capacity(scs.len());
    for sc in &scs {
        let (o, p) = sc.end;
        let total = flow.orbit_quarters(o);
        let next = starting(o, (p + total - 2) % total)
            .ok_or_else(|| CylError::InternalInconsistency("saddle connection chain is broken".into()))?;
        left_next.push(next);
    }

    let mut owner = vec![usize::MAX; scs.len()];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for i in 0..scs.len() {
        if owner[i] != usize::MAX {
            continue;
        }
        let mut cyc = Vec::new();
        let mut j = i;
        while owner[j] == usize::MAX {
            owner[j] = cycles.len();
            cyc.push(j);
            j = left_next[j];
        }
        if j != i {
            return Err(CylError::InternalInconsistency("boundary chain is not a cycle".into()));
        }
        cycles.push(cyc);
    }

    let (nu, nv) = dir.perp();
    let n = (&nu, &nv);
    let zero = QuadExpr::zero(d);
    let mut cylinders = Vec::new();
    for cyc in &cycles {
        let w = cyc.iter().fold(zero.clone(), |acc, &i| acc + scs[i].length.clone());
        let p0 = &scs[cyc[0]].pieces[0];
        let mx = (&p0.from.0 + &p0.to.0).scale(&qfield::rat(1, 2));
        let my = (&p0.from.1 + &p0.to.1).scale(&qfield::rat(1, 2));
        let start = flow.leave(p0.rect, &mx, &my, &nu, &nv);
        let (h, _) = ctx.probe(&flow, &stop, &scs, dir, n, start, &zero)?;
        if !h.is_positive() {
            return Err(CylError::InternalInconsistency("cylinder of zero height".into()));
        }
        let modulus = &w / &h;
        cylinders.push(Cylinder { w, h, modulus, boundary: cyc.clone(), core_points: vec![], boundary_points: vec![], off_core_points: vec![] });
    }

    let area = cylinders.iter().fold(zero.clone(), |acc, c| acc + &c.w * &c.h) * dir.norm2();
    if area != s.area() {
        return Err(CylError::InternalInconsistency(format!("cylinder area {area} differs from surface area {}", s.area())));
    }

    // offset of each saddle connection along its boundary cycle
    let mut along = vec![zero.clone(); scs.len()];
    for cyc in &cycles {
        let mut acc = zero.clone();
        for &i in cyc {
            along[i] = acc.clone();
            acc = &acc + &scs[i].length;
        }
    }
    let down = (-&nu, -&nv);
    for m in &s.marked {
        if let Some(i) = on_saddle(topo, &scs, dir, m.rect, &m.x, &m.y) {
            cylinders[owner[i]].boundary_points.push(m.name.clone());
            continue;
        }
        let start = flow.leave(m.rect, &m.x, &m.y, &down.0, &down.1);
        let (dist, probe) = ctx.probe(&flow, &stop, &scs, dir, (&down.0, &down.1), start, &zero)?;
        let (sc, tau) = match probe {
            Probe::Sc(sc, tau) => (sc, tau),
            Probe::Cone(o, pos) => {
                let total = flow.orbit_quarters(o);
                let sc = starting(o, (pos + total - 1) % total)
                    .ok_or_else(|| CylError::InternalInconsistency("no boundary ray below a marked point".into()))?;
                (sc, zero.clone())
            }
        };
        let c = &mut cylinders[owner[sc]];
        if &dist + &dist == c.h {
            let x = &along[sc] + &tau;
            c.core_points.push((m.name.clone(), x));
        } else {
            c.off_core_points.push((m.name.clone(), dist));
        }
    }
    Ok(CylinderDecomposition { direction: dir.clone(), saddle_connections: scs, cylinders, marked: s.marked_names() })
}

/// Saddle connection through a point, in any of its rectangle representatives.
fn on_saddle(topo: &Topology, scs: &[SaddleConnection], dir: &Direction, r: usize, x: &QuadExpr, y: &QuadExpr) -> Option<usize> {
    let reps = representatives(topo, r, x, y);
    let nn = dir.norm2();
    scs.iter().position(|sc| {
        sc.pieces.iter().any(|p| {
            reps.iter().any(|(rr, px, py)| {
                if *rr != p.rect {
                    return false;
                }
                let dx = px - &p.from.0;
                let dy = py - &p.from.1;
                let cross = &(&dx * &dir.v) - &(&dy * &dir.u);
                if !cross.is_zero() {
                    return false;
                }
                let tau = dot((&dx, &dy), (&dir.u, &dir.v)) / &nn;
                !tau.is_negative() && tau <= p.t
            })
        })
    })
}

fn representatives(topo: &Topology, r: usize, x: &QuadExpr, y: &QuadExpr) -> Vec<(usize, QuadExpr, QuadExpr)> {
    match topo.classify(r, x, y) {
        surface::PointClass::Interior => vec![(r, x.clone(), y.clone())],
        surface::PointClass::EdgeInterior(e, c) => vec![(r, x.clone(), y.clone()), topo.across(r, e, &c)],
        surface::PointClass::Vertex(s) => topo.orbits[topo.sectors[s].orbit]
            .sectors
            .iter()
            .map(|&t| {
                let sec = &topo.sectors[t];
                (sec.rect, sec.pos.0.clone(), sec.pos.1.clone())
            })
            .collect(),
    }
}

/// Minimal `t` with `t / m_i` a positive integer for every cylinder.
pub fn twist_data(dec: &CylinderDecomposition) -> Result<TwistData, CylError> {
    let m = dec.moduli();
    let Some(m1) = m.first() else {
        return Err(CylError::InternalInconsistency("decomposition without cylinders".into()));
    };
    // r_i = m_i / m_1 = p_i / q_i, so k_1 = lcm(p_i) and k_i = k_1 q_i / p_i
    let mut ratios_to_first = Vec::with_capacity(m.len());
    for mi in &m {
        let r = mi.rational_ratio(m1).ok_or_else(|| CylError::IrrationalRatio(mi.to_string(), m1.to_string()))?;
        ratios_to_first.push(r);
    }
    let k1 = ratios_to_first.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.numer()));
    let ks: Vec<BigInt> = ratios_to_first.iter().map(|r| &k1 * r.denom() / r.numer()).collect();
    let g = ks.iter().fold(BigInt::from(0), |acc, k| acc.gcd(k));
    let ks: Vec<BigInt> = ks.iter().map(|k| k / &g).collect();
    let k: Vec<u64> = ks
        .iter()
        .map(|k| u64::try_from(k.abs()).map_err(|_| CylError::InternalInconsistency("twist multiplier overflow".into())))
        .collect::<Result<_, _>>()?;
    let t = m1.scale(&Rational::from_integer(ks[0].clone()));
    let mut ratios = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let r = &ratios_to_first[i] / &ratios_to_first[j];
            ratios.push(PairRatio { i, j, class: RatioClass::of(&r), ratio: r });
        }
    }
    Ok(TwistData { t, k, ratios })
}

/// Action of the affine multitwist on the marked points.
pub fn twist_permutation(dec: &CylinderDecomposition, td: &TwistData) -> Result<Perm, CylError> {
    let index = |name: &str| dec.marked.iter().position(|n| n == name).expect("decomposition names come from the surface");
    let mut images: Vec<usize> = (0..dec.marked.len()).collect();
    for (c, k) in dec.cylinders.iter().zip(&td.k) {
        if let Some((name, _)) = c.off_core_points.first() {
            return Err(CylError::OffCorePoint(name.clone()));
        }
        let shift = c.w.scale(&Rational::new(BigInt::from(*k), BigInt::from(2)));
        for (name, x) in &c.core_points {
            let target = wrap(&(x + &shift), &c.w);
            let img = c
                .core_points
                .iter()
                .find(|(_, y)| wrap(y, &c.w) == target)
                .ok_or_else(|| CylError::UnmatchedImage(name.clone()))?;
            images[index(name)] = index(&img.0);
        }
    }
    Perm::from_images(images).map_err(|e| CylError::InternalInconsistency(e.to_string()))
}

fn wrap(x: &QuadExpr, w: &QuadExpr) -> QuadExpr {
    let n = (x / w).floor();
    x - &w.scale(&Rational::from_integer(n))
}

/// Decomposition and twist permutation in one call.
pub fn direction_permutation(s: &FlatSurface, dir: &Direction, max_crossings: usize) -> Result<(CylinderDecomposition, TwistData, Perm), CylError> {
    let dec = decompose(s, dir, max_crossings)?;
    let td = twist_data(&dec)?;
    let perm = twist_permutation(&dec, &td)?;
    Ok((dec, td, perm))
}

/// Outcome of one candidate direction.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub found: Vec<(Direction, Perm)>,
    pub failed: Vec<(Direction, CylError)>,
}

/// Twist permutations for every candidate that decomposes.
pub fn search_directions(s: &FlatSurface, candidates: &[Direction], max_crossings: usize) -> SearchResult {
    let mut out = SearchResult { found: Vec::new(), failed: Vec::new() };
    for dir in candidates {
        match direction_permutation(s, dir, max_crossings) {
            Ok((_, _, p)) => out.found.push((dir.clone(), p)),
            Err(e) => out.failed.push((dir.clone(), e)),
        }
    }
    out
}
