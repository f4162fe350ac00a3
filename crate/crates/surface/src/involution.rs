//! Isometries with derivative `−I` that map rectangles onto rectangles by
//! point reflection, and their fixed points.

use std::collections::VecDeque;

use qfield::QuadExpr;

use crate::builder::half;
use crate::topology::{PointClass, Topology};
use crate::{Edge, FlatSurface, MarkedPoint, SurfaceError};

/// Rectangle `r` is carried onto `rect_map[r]` by `(x, y) ↦ (w − x, h − y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    pub rect_map: Vec<usize>,
}

impl Involution {
    /// Image of a point, as a canonical representative.
    pub fn apply(&self, topo: &Topology, r: usize, x: &QuadExpr, y: &QuadExpr) -> (usize, QuadExpr, QuadExpr) {
        let (w, h) = &topo.dims[r];
        topo.canonical(self.rect_map[r], &(w - x), &(h - y))
    }

    /// Image of a marked point, by name, if the image is marked too.
    pub fn image_name(&self, s: &FlatSurface, topo: &Topology, name: &str) -> Option<String> {
        let m = s.marked_point(name)?;
        let img = self.apply(topo, m.rect, &m.x, &m.y);
        s.marked
            .iter()
            .find(|p| topo.canonical(p.rect, &p.x, &p.y) == img)
            .map(|p| p.name.clone())
    }
}

/// Fixed points of an involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoints {
    /// Fixed cone points, as canonical `(rect, x, y)`.
    pub cone: Vec<(usize, QuadExpr, QuadExpr)>,
    /// Regular fixed points named `w1, w2, …` in canonical order.
    pub regular: Vec<MarkedPoint>,
}

impl FixedPoints {
    pub fn total(&self) -> usize {
        self.cone.len() + self.regular.len()
    }
}

/// Searches for an involution with derivative `−I`.
pub fn find_involution(s: &FlatSurface) -> Option<Involution> {
    let topo = s.topology().ok()?;
    find_with(&topo)
}

pub(crate) fn find_with(topo: &Topology) -> Option<Involution> {
    let n = topo.num_rects();
    (0..n)
        .filter(|&c| topo.dims[c] == topo.dims[0])
        .find_map(|c| propagate(topo, c).filter(|m| verify(topo, m)))
        .map(|rect_map| Involution { rect_map })
}

fn edge_len(topo: &Topology, r: usize, e: Edge) -> QuadExpr {
    if e.is_horizontal() {
        topo.dims[r].0.clone()
    } else {
        topo.dims[r].1.clone()
    }
}

/// Extends `0 ↦ first` along gluings, reading the partner rectangle at the
/// reflected midpoint of every segment.
fn propagate(topo: &Topology, first: usize) -> Option<Vec<usize>> {
    let n = topo.num_rects();
    let mut map = vec![usize::MAX; n];
    map[0] = first;
    let mut queue = VecDeque::from([0usize]);
    while let Some(r) = queue.pop_front() {
        let img = map[r];
        for e in Edge::ALL {
            let len = edge_len(topo, r, e);
            for sg in topo.segments(r, e) {
                let mid = half(&(&sg.start + &sg.end));
                let at = &len - &mid;
                let target = topo.seg_forward(img, e.opposite(), &at).partner_rect;
                let q = sg.partner_rect;
                if map[q] == usize::MAX {
                    if topo.dims[q] != topo.dims[target] {
                        return None;
                    }
                    map[q] = target;
                    queue.push_back(q);
                } else if map[q] != target {
                    return None;
                }
            }
        }
    }
    Some(map)
}

fn verify(topo: &Topology, map: &[usize]) -> bool {
    if (0..map.len()).any(|r| map[map[r]] != r || topo.dims[map[r]] != topo.dims[r]) {
        return false;
    }
    for r in 0..map.len() {
        for e in Edge::ALL {
            let len_a = edge_len(topo, r, e);
            for sg in topo.segments(r, e) {
                let rb = sg.partner_rect;
                let len_b = edge_len(topo, rb, sg.partner_edge);
                // reflected side runs over (W_A − end, W_A − start) on the opposite edge
                let lo = &len_a - &sg.end;
                let hi = &len_a - &sg.start;
                let delta = (&len_b - &sg.partner_start) - (&len_a - &sg.start);
                let ok = topo
                    .segments(map[r], e.opposite())
                    .iter()
                    .filter(|t| t.start < hi && t.end > lo)
                    .all(|t| t.partner_rect == map[rb] && t.shift() == delta);
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// All fixed points of `inv`, with regular ones named `w1, w2, …` in order
/// of canonical coordinates.
pub fn involution_fixed_points(s: &FlatSurface, inv: &Involution) -> Result<FixedPoints, SurfaceError> {
    let topo = s.topology()?;
    Ok(fixed_with(&topo, inv))
}

pub(crate) fn fixed_with(topo: &Topology, inv: &Involution) -> FixedPoints {
    let mut regular = Vec::new();
    for r in 0..topo.num_rects() {
        if inv.rect_map[r] == r {
            let (w, h) = &topo.dims[r];
            regular.push((r, half(w), half(h)));
        }
    }
    for r in 0..topo.num_rects() {
        // each gluing once, from its bottom or left side
        for e in [Edge::Bottom, Edge::Left] {
            let len = edge_len(topo, r, e);
            for sg in topo.segments(r, e) {
                if inv.rect_map[r] != sg.partner_rect {
                    continue;
                }
                let s = half(&(&len - &sg.start - &sg.partner_start));
                let seg_len = &sg.end - &sg.start;
                if s.is_positive() && s < seg_len {
                    let c = &sg.start + &s;
                    let p = match e {
                        Edge::Bottom => (c, QuadExpr::zero(topo.d)),
                        _ => (QuadExpr::zero(topo.d), c),
                    };
                    regular.push((r, p.0, p.1));
                }
            }
        }
    }
    let mut cone = Vec::new();
    for (o, orbit) in topo.orbits.iter().enumerate() {
        let sec = &topo.sectors[orbit.sectors[0]];
        let (w, h) = &topo.dims[sec.rect];
        let img = inv.rect_map[sec.rect];
        let fixed = match topo.classify(img, &(w - &sec.pos.0), &(h - &sec.pos.1)) {
            PointClass::Vertex(t) => topo.sectors[t].orbit == o,
            _ => false,
        };
        if fixed {
            if orbit.is_cone() {
                cone.push(topo.orbit_rep(o));
            } else {
                regular.push(topo.orbit_rep(o));
            }
        }
    }
    let mut regular: Vec<_> = regular.into_iter().map(|(r, x, y)| topo.canonical(r, &x, &y)).collect();
    regular.sort();
    regular.dedup();
    cone.sort();
    FixedPoints {
        cone,
        regular: regular
            .into_iter()
            .enumerate()
            .map(|(i, (rect, x, y))| MarkedPoint { name: format!("w{}", i + 1), rect, x, y })
            .collect(),
    }
}
