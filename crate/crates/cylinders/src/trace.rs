//! Straight-line flow through the rectangle complex.
//!
//! A walk state is a point of a closed rectangle together with a direction
//! that points into that rectangle (half-open sector convention). Each step
//! runs to the rectangle boundary, or to the next segment endpoint when the
//! line runs along an edge.

use qfield::QuadExpr;
use surface::{dir_quarter, Edge, PointClass, Topology};

use crate::CylError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub rect: usize,
    pub x: QuadExpr,
    pub y: QuadExpr,
}

/// A straight run inside one closed rectangle.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Piece {
    pub rect: usize,
    pub from: (QuadExpr, QuadExpr),
    pub to: (QuadExpr, QuadExpr),
    /// Length in units of the direction vector.
    pub t: QuadExpr,
}

enum Exit {
    Crossed(State),
    Vertex { orbit: usize, sector: usize },
}

/// How a walk ended.
pub(crate) enum WalkEnd {
    /// The piece callback asked to stop.
    Stopped,
    /// Reached a stop vertex, arriving through `sector`.
    Vertex { orbit: usize, sector: usize },
}

pub(crate) struct Flow<'a> {
    pub topo: &'a Topology,
    /// Start quarter of each sector inside its orbit's angular coordinate.
    sector_q: Vec<usize>,
}

impl<'a> Flow<'a> {
    pub fn new(topo: &'a Topology) -> Flow<'a> {
        let mut sector_q = vec![0; topo.sectors.len()];
        for orbit in &topo.orbits {
            let mut acc = 0;
            for &s in &orbit.sectors {
                sector_q[s] = acc;
                acc += topo.sectors[s].span as usize;
            }
        }
        Flow { topo, sector_q }
    }

    /// Angular position, in quarter turns within the orbit, of a direction
    /// that points into the closed sector `s`.
    pub fn ray_position(&self, s: usize, u: &QuadExpr, v: &QuadExpr) -> usize {
        let sec = &self.topo.sectors[s];
        let s = if sec.contains_dir(u, v) { s } else { self.topo.ccw_next(s) };
        let sec = &self.topo.sectors[s];
        debug_assert!(sec.contains_dir(u, v));
        self.sector_q[s] + ((dir_quarter(u, v) + 4 - sec.start) % 4) as usize
    }

    /// Positions of the rays leaving an orbit in direction `(u, v)`, ascending.
    pub fn out_rays(&self, orbit: usize, u: &QuadExpr, v: &QuadExpr) -> Vec<usize> {
        let mut out: Vec<usize> = self.topo.orbits[orbit]
            .sectors
            .iter()
            .filter(|&&s| self.topo.sectors[s].contains_dir(u, v))
            .map(|&s| self.ray_position(s, u, v))
            .collect();
        out.sort_unstable();
        out
    }

    /// Start state of the ray at angular position `pos` of an orbit.
    pub fn ray_state(&self, orbit: usize, pos: usize) -> State {
        let s = *self.topo.orbits[orbit]
            .sectors
            .iter()
            .find(|&&s| self.sector_q[s] <= pos && pos < self.sector_q[s] + self.topo.sectors[s].span as usize)
            .expect("position inside the orbit");
        let sec = &self.topo.sectors[s];
        State { rect: sec.rect, x: sec.pos.0.clone(), y: sec.pos.1.clone() }
    }

    pub fn orbit_quarters(&self, orbit: usize) -> usize {
        self.topo.orbits[orbit].quarters
    }

    /// Walk state for leaving a regular point in direction `(u, v)`.
    pub fn leave(&self, r: usize, x: &QuadExpr, y: &QuadExpr, u: &QuadExpr, v: &QuadExpr) -> State {
        match self.topo.classify(r, x, y) {
            PointClass::Interior => State { rect: r, x: x.clone(), y: y.clone() },
            PointClass::EdgeInterior(e, c) => {
                let inward = match e {
                    Edge::Bottom => v.is_positive() || (v.is_zero() && u.is_positive()),
                    Edge::Top => v.is_negative() || (v.is_zero() && u.is_negative()),
                    Edge::Left => u.is_positive() || (u.is_zero() && v.is_negative()),
                    Edge::Right => u.is_negative() || (u.is_zero() && v.is_positive()),
                };
                if inward {
                    State { rect: r, x: x.clone(), y: y.clone() }
                } else {
                    let (q, x2, y2) = self.topo.across(r, e, &c);
                    State { rect: q, x: x2, y: y2 }
                }
            }
            PointClass::Vertex(s) => self.through_regular(self.topo.sectors[s].orbit, u, v),
        }
    }

    /// Continuation through a regular vertex.
    fn through_regular(&self, orbit: usize, u: &QuadExpr, v: &QuadExpr) -> State {
        let s = *self.topo.orbits[orbit]
            .sectors
            .iter()
            .find(|&&s| self.topo.sectors[s].contains_dir(u, v))
            .expect("a regular vertex has one sector per direction");
        let sec = &self.topo.sectors[s];
        State { rect: sec.rect, x: sec.pos.0.clone(), y: sec.pos.1.clone() }
    }

    fn step(&self, st: &State, u: &QuadExpr, v: &QuadExpr) -> (Piece, Exit) {
        let topo = self.topo;
        let (w, h) = &topo.dims[st.rect];
        let d = topo.d;
        let zero = QuadExpr::zero(d);
        let time = |pos: &QuadExpr, speed: &QuadExpr, len: &QuadExpr| -> Option<QuadExpr> {
            match speed.sign() {
                1 => Some((len - pos) / speed),
                -1 => Some((&zero - pos) / speed),
                _ => None,
            }
        };
        let tx = time(&st.x, u, w);
        let ty = time(&st.y, v, h);
        let mut t = match (tx, ty) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!("zero direction"),
        };
        debug_assert!(t.is_positive(), "walk state must point into its rectangle");
        // running along an edge: stop at the first segment endpoint passed
        let along = if u.is_zero() && (st.x.is_zero() || &st.x == w) {
            Some((if st.x.is_zero() { Edge::Left } else { Edge::Right }, &st.y, v))
        } else if v.is_zero() && (st.y.is_zero() || &st.y == h) {
            Some((if st.y.is_zero() { Edge::Bottom } else { Edge::Top }, &st.x, u))
        } else {
            None
        };
        if let Some((e, c0, speed)) = along {
            let c1 = c0 + &(&t * speed);
            for sg in topo.segments(st.rect, e).iter().skip(1) {
                let c = &sg.start;
                let between = if speed.is_positive() { c0 < c && c < &c1 } else { &c1 < c && c < c0 };
                if between {
                    let tc = (c - c0) / speed;
                    if tc < t {
                        t = tc;
                    }
                }
            }
        }
        let ex = &st.x + &(&t * u);
        let ey = &st.y + &(&t * v);
        let piece = Piece { rect: st.rect, from: (st.x.clone(), st.y.clone()), to: (ex.clone(), ey.clone()), t };
        let exit = match topo.classify(st.rect, &ex, &ey) {
            PointClass::Interior => unreachable!("a step ends on the rectangle boundary"),
            PointClass::EdgeInterior(e, c) => {
                let (q, x, y) = topo.across(st.rect, e, &c);
                Exit::Crossed(State { rect: q, x, y })
            }
            PointClass::Vertex(s) => Exit::Vertex { orbit: topo.sectors[s].orbit, sector: s },
        };
        (piece, exit)
    }

    /// Follows the line from `start` until `on_piece` returns true or a
    /// vertex with `stop(orbit)` is reached.
    pub fn walk(
        &self,
        start: State,
        u: &QuadExpr,
        v: &QuadExpr,
        budget: usize,
        stop: &dyn Fn(usize) -> bool,
        on_piece: &mut dyn FnMut(&Piece) -> bool,
    ) -> Result<WalkEnd, CylError> {
        let mut st = start;
        for _ in 0..budget {
            let (piece, exit) = self.step(&st, u, v);
            if on_piece(&piece) {
                return Ok(WalkEnd::Stopped);
            }
            st = match exit {
                Exit::Crossed(next) => next,
                Exit::Vertex { orbit, sector } => {
                    if stop(orbit) {
                        return Ok(WalkEnd::Vertex { orbit, sector });
                    }
                    self.through_regular(orbit, u, v)
                }
            };
        }
        Err(CylError::NotClosed { budget })
    }
}
