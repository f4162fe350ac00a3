//! Edge segment index, vertex sectors and vertex orbits.
//!
//! Every rectangle corner and every segment endpoint inside a rectangle
//! edge is a *sector*: the range of directions that point into the closed
//! rectangle from that point, measured in quarter turns from east. Walking
//! counterclockwise from sector to sector around a vertex yields its orbit
//! and total cone angle.

use std::cmp::Ordering;
use std::collections::HashMap;

use qfield::QuadExpr;

use crate::{Edge, FlatSurface, Rect, StratumReport, SurfaceError};

/// One glued segment of a rectangle edge, seen from that rectangle.
#[derive(Debug, Clone)]
pub struct Seg {
    pub start: QuadExpr,
    pub end: QuadExpr,
    pub gluing: usize,
    pub partner_rect: usize,
    pub partner_edge: Edge,
    pub partner_start: QuadExpr,
}

impl Seg {
    pub fn partner_coord(&self, c: &QuadExpr) -> QuadExpr {
        &self.partner_start + &(c - &self.start)
    }

    pub fn shift(&self) -> QuadExpr {
        &self.partner_start - &self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopRight,
    TopLeft,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::BottomLeft, Corner::BottomRight, Corner::TopRight, Corner::TopLeft];

    /// Image under the point reflection of the rectangle.
    pub fn reflected(self) -> Corner {
        Corner::ALL[(self as usize + 2) % 4]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SectorKind {
    Corner(Corner),
    /// A segment endpoint inside an edge, at the given edge coordinate.
    EdgePoint(Edge, QuadExpr),
}

#[derive(Debug, Clone)]
pub struct Sector {
    pub rect: usize,
    pub kind: SectorKind,
    /// First quarter of the direction range.
    pub start: u8,
    /// Number of quarter turns covered.
    pub span: u8,
    pub orbit: usize,
    /// Local coordinates of the vertex.
    pub pos: (QuadExpr, QuadExpr),
}

impl Sector {
    /// Whether the direction lies in the half-open range `[start, start + span)`.
    pub fn contains_dir(&self, u: &QuadExpr, v: &QuadExpr) -> bool {
        (dir_quarter(u, v) + 4 - self.start) % 4 < self.span
    }

    /// Angular position of a direction inside this sector, as a sort key
    /// starting from the clockwise boundary.
    pub fn cmp_in_sector(&self, a: (&QuadExpr, &QuadExpr), b: (&QuadExpr, &QuadExpr)) -> Ordering {
        let qa = (dir_quarter(a.0, a.1) + 4 - self.start) % 4;
        let qb = (dir_quarter(b.0, b.1) + 4 - self.start) % 4;
        qa.cmp(&qb).then_with(|| {
            // same quarter: b counterclockwise of a means a comes first
            let cross = a.0 * b.1 - a.1 * b.0;
            0.cmp(&cross.sign())
        })
    }
}

/// The quarter `0..4` of a nonzero direction, half-open counterclockwise:
/// quarter 0 is `u > 0, v ≥ 0`, quarter 1 is `u ≤ 0, v > 0`, and so on.
pub fn dir_quarter(u: &QuadExpr, v: &QuadExpr) -> u8 {
    let (su, sv) = (u.sign(), v.sign());
    if su > 0 && sv >= 0 {
        0
    } else if su <= 0 && sv > 0 {
        1
    } else if su < 0 && sv <= 0 {
        2
    } else {
        debug_assert!(su >= 0 && sv < 0, "zero direction");
        3
    }
}

#[derive(Debug, Clone)]
pub struct Orbit {
    /// Sectors in counterclockwise order.
    pub sectors: Vec<usize>,
    /// Total angle in quarter turns.
    pub quarters: usize,
}

impl Orbit {
    pub fn is_cone(&self) -> bool {
        self.quarters > 4
    }

    /// Zero order `k`, for cone angle `2π(k+1)`.
    pub fn order(&self) -> usize {
        self.quarters / 4 - 1
    }
}

/// Where a point sits in the rectangle complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    /// On an edge, away from segment endpoints.
    EdgeInterior(Edge, QuadExpr),
    /// A vertex, given by the sector of this rectangle at the point.
    Vertex(usize),
}

/// Validated index over a [`FlatSurface`].
#[derive(Debug, Clone)]
pub struct Topology {
    pub d: u64,
    pub dims: Vec<(QuadExpr, QuadExpr)>,
    segs: Vec<[Vec<Seg>; 4]>,
    pub sectors: Vec<Sector>,
    edge_points: HashMap<(usize, Edge, QuadExpr), usize>,
    pub orbits: Vec<Orbit>,
}

fn corner_start(c: Corner) -> u8 {
    c as u8
}

fn edge_start(e: Edge) -> u8 {
    match e {
        Edge::Bottom => 0,
        Edge::Right => 1,
        Edge::Top => 2,
        Edge::Left => 3,
    }
}

impl Topology {
    pub fn new(s: &FlatSurface) -> Result<Topology, SurfaceError> {
        let d = s.d;
        let zero = QuadExpr::zero(d);
        check_discriminants(s)?;
        for (i, r) in s.rects.iter().enumerate() {
            if r.id != i {
                return Err(SurfaceError::BadRectangleId(r.id, i));
            }
            if !r.width.is_positive() || !r.height.is_positive() {
                return Err(SurfaceError::BadRectangle(i));
            }
        }
        let n = s.rects.len();
        let mut segs: Vec<[Vec<Seg>; 4]> = (0..n).map(|_| Default::default()).collect();
        for (gi, g) in s.gluings.iter().enumerate() {
            let bad = |m: &str| SurfaceError::BadGluing(gi, m.to_string());
            let (a, b) = (&g.side_a, &g.side_b);
            if a.rect >= n || b.rect >= n {
                return Err(bad("unknown rectangle"));
            }
            if a.edge.opposite() != b.edge {
                return Err(bad("sides must be bottom/top or left/right"));
            }
            if a.length != b.length {
                return Err(bad("side lengths differ"));
            }
            if !a.length.is_positive() {
                return Err(bad("non-positive length"));
            }
            for side in [a, b] {
                let len = s.rects[side.rect].edge_len(side.edge);
                if side.offset.is_negative() || &side.end() > len {
                    return Err(bad("segment leaves its edge"));
                }
            }
            for (me, other) in [(a, b), (b, a)] {
                segs[me.rect][me.edge.index()].push(Seg {
                    start: me.offset.clone(),
                    end: me.end(),
                    gluing: gi,
                    partner_rect: other.rect,
                    partner_edge: other.edge,
                    partner_start: other.offset.clone(),
                });
            }
        }
        for (ri, r) in s.rects.iter().enumerate() {
            for e in Edge::ALL {
                let list = &mut segs[ri][e.index()];
                list.sort_by(|x, y| x.start.cmp(&y.start));
                let cov = |problem: String| SurfaceError::Coverage { rect: ri, edge: e, problem };
                let mut at = zero.clone();
                for sg in list.iter() {
                    match sg.start.cmp(&at) {
                        Ordering::Less => return Err(cov(format!("segments overlap near {:.6}", at.to_f64()))),
                        Ordering::Greater => return Err(cov(format!("gap at {:.6}", at.to_f64()))),
                        Ordering::Equal => {}
                    }
                    at = sg.end.clone();
                }
                if &at != r.edge_len(e) {
                    return Err(cov("edge not fully covered".to_string()));
                }
            }
        }
        let dims = s.rects.iter().map(|r| (r.width.clone(), r.height.clone())).collect();
        let mut topo = Topology { d, dims, segs, sectors: Vec::new(), edge_points: HashMap::new(), orbits: Vec::new() };
        topo.build_sectors();
        topo.build_orbits()?;
        topo.check_connected(n)?;
        for m in &s.marked {
            let bad = |msg: &str| SurfaceError::BadMarkedPoint(m.name.clone(), msg.to_string());
            if m.rect >= n {
                return Err(bad("unknown rectangle"));
            }
            let r = &s.rects[m.rect];
            if m.x.is_negative() || m.y.is_negative() || m.x > r.width || m.y > r.height {
                return Err(bad("outside its rectangle"));
            }
        }
        Ok(topo)
    }

    fn build_sectors(&mut self) {
        let d = self.d;
        let zero = QuadExpr::zero(d);
        for r in 0..self.dims.len() {
            let (w, h) = self.dims[r].clone();
            for c in Corner::ALL {
                let pos = match c {
                    Corner::BottomLeft => (zero.clone(), zero.clone()),
                    Corner::BottomRight => (w.clone(), zero.clone()),
                    Corner::TopRight => (w.clone(), h.clone()),
                    Corner::TopLeft => (zero.clone(), h.clone()),
                };
                self.sectors.push(Sector { rect: r, kind: SectorKind::Corner(c), start: corner_start(c), span: 1, orbit: usize::MAX, pos });
            }
        }
        for r in 0..self.dims.len() {
            let (w, h) = self.dims[r].clone();
            for e in Edge::ALL {
                let cuts: Vec<QuadExpr> = self.segs[r][e.index()].iter().skip(1).map(|sg| sg.start.clone()).collect();
                for c in cuts {
                    let pos = match e {
                        Edge::Bottom => (c.clone(), zero.clone()),
                        Edge::Top => (c.clone(), h.clone()),
                        Edge::Left => (zero.clone(), c.clone()),
                        Edge::Right => (w.clone(), c.clone()),
                    };
                    let id = self.sectors.len();
                    self.edge_points.insert((r, e, c.clone()), id);
                    self.sectors.push(Sector { rect: r, kind: SectorKind::EdgePoint(e, c), start: edge_start(e), span: 2, orbit: usize::MAX, pos });
                }
            }
        }
    }

    fn build_orbits(&mut self) -> Result<(), SurfaceError> {
        for s0 in 0..self.sectors.len() {
            if self.sectors[s0].orbit != usize::MAX {
                continue;
            }
            let oi = self.orbits.len();
            let mut list = Vec::new();
            let mut quarters = 0usize;
            let mut cur = s0;
            loop {
                if self.sectors[cur].orbit != usize::MAX {
                    if cur == s0 {
                        break;
                    }
                    // a walk must close up exactly where it started
                    return Err(SurfaceError::Angle { rect: self.sectors[s0].rect, quarters });
                }
                self.sectors[cur].orbit = oi;
                list.push(cur);
                quarters += self.sectors[cur].span as usize;
                cur = self.ccw_next(cur);
            }
            if !quarters.is_multiple_of(4) {
                return Err(SurfaceError::Angle { rect: self.sectors[s0].rect, quarters });
            }
            self.orbits.push(Orbit { sectors: list, quarters });
        }
        Ok(())
    }

    fn check_connected(&self, n: usize) -> Result<(), SurfaceError> {
        if n == 0 {
            return Err(SurfaceError::Disconnected);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(r) = stack.pop() {
            for e in Edge::ALL {
                for sg in &self.segs[r][e.index()] {
                    if !seen[sg.partner_rect] {
                        seen[sg.partner_rect] = true;
                        stack.push(sg.partner_rect);
                    }
                }
            }
        }
        if seen.iter().all(|&b| b) {
            Ok(())
        } else {
            Err(SurfaceError::Disconnected)
        }
    }

    pub fn num_rects(&self) -> usize {
        self.dims.len()
    }

    pub fn segments(&self, r: usize, e: Edge) -> &[Seg] {
        &self.segs[r][e.index()]
    }

    /// Segment with `start ≤ c < end`.
    pub fn seg_forward(&self, r: usize, e: Edge, c: &QuadExpr) -> &Seg {
        self.segs[r][e.index()]
            .iter()
            .find(|sg| &sg.start <= c && c < &sg.end)
            .expect("coverage was validated")
    }

    /// Segment with `start < c ≤ end`.
    pub fn seg_backward(&self, r: usize, e: Edge, c: &QuadExpr) -> &Seg {
        self.segs[r][e.index()]
            .iter()
            .find(|sg| &sg.start < c && c <= &sg.end)
            .expect("coverage was validated")
    }

    pub fn corner_sector(&self, r: usize, c: Corner) -> usize {
        4 * r + c as usize
    }

    pub fn edge_point_sector(&self, r: usize, e: Edge, c: &QuadExpr) -> Option<usize> {
        self.edge_points.get(&(r, e, c.clone())).copied()
    }

    /// Sector reached after crossing the counterclockwise boundary ray.
    pub fn ccw_next(&self, s: usize) -> usize {
        let sec = &self.sectors[s];
        let r = sec.rect;
        let (w, h) = &self.dims[r];
        let zero = QuadExpr::zero(self.d);
        use Corner::*;
        // (edge crossed, coordinate, whether the walk leaves forward along the edge)
        let (edge, c, forward) = match &sec.kind {
            SectorKind::Corner(BottomLeft) => (Edge::Left, zero, true),
            SectorKind::Corner(BottomRight) => (Edge::Bottom, w.clone(), false),
            SectorKind::Corner(TopRight) => (Edge::Right, h.clone(), false),
            SectorKind::Corner(TopLeft) => (Edge::Top, zero, true),
            SectorKind::EdgePoint(Edge::Left, c) => (Edge::Left, c.clone(), true),
            SectorKind::EdgePoint(Edge::Bottom, c) => (Edge::Bottom, c.clone(), false),
            SectorKind::EdgePoint(Edge::Right, c) => (Edge::Right, c.clone(), false),
            SectorKind::EdgePoint(Edge::Top, c) => (Edge::Top, c.clone(), true),
        };
        let sg = if forward { self.seg_forward(r, edge, &c) } else { self.seg_backward(r, edge, &c) };
        let q = sg.partner_rect;
        let c2 = sg.partner_coord(&c);
        let (w2, h2) = &self.dims[q];
        match edge {
            Edge::Left => {
                if c2.is_zero() {
                    self.corner_sector(q, BottomRight)
                } else {
                    self.edge_point_sector(q, Edge::Right, &c2).expect("segment start is a vertex")
                }
            }
            Edge::Bottom => {
                if &c2 == w2 {
                    self.corner_sector(q, TopRight)
                } else {
                    self.edge_point_sector(q, Edge::Top, &c2).expect("segment end is a vertex")
                }
            }
            Edge::Right => {
                if &c2 == h2 {
                    self.corner_sector(q, TopLeft)
                } else {
                    self.edge_point_sector(q, Edge::Left, &c2).expect("segment end is a vertex")
                }
            }
            Edge::Top => {
                if c2.is_zero() {
                    self.corner_sector(q, BottomLeft)
                } else {
                    self.edge_point_sector(q, Edge::Bottom, &c2).expect("segment start is a vertex")
                }
            }
        }
    }

    pub fn stratum(&self, s: &FlatSurface) -> StratumReport {
        let mut zero_orders: Vec<usize> = self.orbits.iter().filter(|o| o.is_cone()).map(Orbit::order).collect();
        zero_orders.sort_unstable_by(|a, b| b.cmp(a));
        let total: usize = zero_orders.iter().sum();
        StratumReport {
            genus: total / 2 + 1,
            zero_orders,
            area: s.area(),
            regular_vertices: self.orbits.iter().filter(|o| !o.is_cone()).count(),
        }
    }

    /// Cone points, as orbit indices.
    pub fn cone_orbits(&self) -> Vec<usize> {
        (0..self.orbits.len()).filter(|&o| self.orbits[o].is_cone()).collect()
    }

    /// Classifies a point of the closed rectangle `r`.
    pub fn classify(&self, r: usize, x: &QuadExpr, y: &QuadExpr) -> PointClass {
        let (w, h) = &self.dims[r];
        let on_l = x.is_zero();
        let on_r = x == w;
        let on_b = y.is_zero();
        let on_t = y == h;
        use Corner::*;
        let corner = match (on_b, on_t, on_l, on_r) {
            (true, _, true, _) => Some(BottomLeft),
            (true, _, _, true) => Some(BottomRight),
            (_, true, _, true) => Some(TopRight),
            (_, true, true, _) => Some(TopLeft),
            _ => None,
        };
        if let Some(c) = corner {
            return PointClass::Vertex(self.corner_sector(r, c));
        }
        let edge = if on_b {
            Some((Edge::Bottom, x))
        } else if on_t {
            Some((Edge::Top, x))
        } else if on_l {
            Some((Edge::Left, y))
        } else if on_r {
            Some((Edge::Right, y))
        } else {
            None
        };
        match edge {
            None => PointClass::Interior,
            Some((e, c)) => match self.edge_point_sector(r, e, c) {
                Some(s) => PointClass::Vertex(s),
                None => PointClass::EdgeInterior(e, c.clone()),
            },
        }
    }

    /// The same point seen from the rectangle across an edge, for a point
    /// inside a glued segment.
    pub fn across(&self, r: usize, e: Edge, c: &QuadExpr) -> (usize, QuadExpr, QuadExpr) {
        let sg = self.seg_forward(r, e, c);
        let q = sg.partner_rect;
        let c2 = sg.partner_coord(c);
        let p = point_on_edge(&self.dims[q], sg.partner_edge, c2, self.d);
        (q, p.0, p.1)
    }

    /// Canonical representative of a point: interior points unchanged, edge
    /// points moved onto a bottom or left edge, vertices to the least
    /// sector position of their orbit.
    pub fn canonical(&self, r: usize, x: &QuadExpr, y: &QuadExpr) -> (usize, QuadExpr, QuadExpr) {
        match self.classify(r, x, y) {
            PointClass::Interior => (r, x.clone(), y.clone()),
            PointClass::EdgeInterior(e, c) => match e {
                Edge::Bottom | Edge::Left => (r, x.clone(), y.clone()),
                Edge::Top | Edge::Right => self.across(r, e, &c),
            },
            PointClass::Vertex(s) => self.orbit_rep(self.sectors[s].orbit),
        }
    }

    /// Least `(rect, x, y)` among the sectors of an orbit.
    pub fn orbit_rep(&self, o: usize) -> (usize, QuadExpr, QuadExpr) {
        self.orbits[o]
            .sectors
            .iter()
            .map(|&s| {
                let sec = &self.sectors[s];
                (sec.rect, sec.pos.0.clone(), sec.pos.1.clone())
            })
            .min()
            .expect("orbits are nonempty")
    }

    /// Orbit index of a vertex point, if the point is a vertex.
    pub fn vertex_orbit(&self, r: usize, x: &QuadExpr, y: &QuadExpr) -> Option<usize> {
        match self.classify(r, x, y) {
            PointClass::Vertex(s) => Some(self.sectors[s].orbit),
            _ => None,
        }
    }

    /// Position of every rectangle's lower-left corner in a development of
    /// the surface along a breadth-first spanning tree of gluings.
    pub fn development(&self) -> Vec<(QuadExpr, QuadExpr)> {
        let n = self.num_rects();
        let zero = QuadExpr::zero(self.d);
        let mut pos: Vec<Option<(QuadExpr, QuadExpr)>> = vec![None; n];
        pos[0] = Some((zero.clone(), zero));
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(r) = queue.pop_front() {
            let pr = pos[r].clone().expect("queued rectangles are placed");
            for e in Edge::ALL {
                for sg in &self.segs[r][e.index()] {
                    let q = sg.partner_rect;
                    if pos[q].is_some() {
                        continue;
                    }
                    let a = point_on_edge(&self.dims[r], e, sg.start.clone(), self.d);
                    let b = point_on_edge(&self.dims[q], sg.partner_edge, sg.partner_start.clone(), self.d);
                    pos[q] = Some((&pr.0 + &a.0 - &b.0, &pr.1 + &a.1 - &b.1));
                    queue.push_back(q);
                }
            }
        }
        pos.into_iter().map(|p| p.expect("surface is connected")).collect()
    }
}

/// Local coordinates of the point at coordinate `c` along edge `e`.
pub fn point_on_edge(dims: &(QuadExpr, QuadExpr), e: Edge, c: QuadExpr, d: u64) -> (QuadExpr, QuadExpr) {
    let zero = QuadExpr::zero(d);
    match e {
        Edge::Bottom => (c, zero),
        Edge::Top => (c, dims.1.clone()),
        Edge::Left => (zero, c),
        Edge::Right => (dims.0.clone(), c),
    }
}

fn check_discriminants(s: &FlatSurface) -> Result<(), SurfaceError> {
    let d = s.d;
    let ok_rect = |r: &Rect| r.width.d() == d && r.height.d() == d;
    let ok = s.rects.iter().all(ok_rect)
        && s.gluings.iter().all(|g| {
            [&g.side_a, &g.side_b].iter().all(|sd| sd.offset.d() == d && sd.length.d() == d)
        })
        && s.marked.iter().all(|m| m.x.d() == d && m.y.d() == d);
    if ok {
        Ok(())
    } else {
        Err(SurfaceError::MixedDiscriminant)
    }
}
