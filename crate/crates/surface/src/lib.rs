//! Translation surfaces built from axis-parallel rectangles.
//!
//! Each rectangle `r` has local coordinates `[0, w] × [0, h]`. A gluing
//! identifies a segment of one rectangle edge with an equal-length segment
//! of the opposite edge type by translation: the point at `offset + t` on
//! side A is the point at `offset + t` on side B.

use std::fmt;

use qfield::QuadExpr;

mod builder;
mod involution;
mod io;
mod models;
mod topology;

pub use builder::Builder;
pub use involution::{find_involution, involution_fixed_points, FixedPoints, Involution};
pub use io::{from_json, load_surface, save_surface, to_json, SCHEMA};
pub use models::{make_aminus, make_aplus, make_l, make_p, make_torus, make_z};
pub use topology::{dir_quarter, PointClass, Sector, SectorKind, Topology};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("rectangle {0} has non-positive dimensions")]
    BadRectangle(usize),
    #[error("rectangle ids must be 0..n in order; found {0} at position {1}")]
    BadRectangleId(usize, usize),
    #[error("gluing {0}: {1}")]
    BadGluing(usize, String),
    #[error("rectangle {rect} {edge} edge: {problem}")]
    Coverage { rect: usize, edge: Edge, problem: String },
    #[error("vertex orbit at rectangle {rect} has angle {quarters}·π/2, not a multiple of 2π")]
    Angle { rect: usize, quarters: usize },
    #[error("the rectangles do not form a connected surface")]
    Disconnected,
    #[error("marked point {0}: {1}")]
    BadMarkedPoint(String, String),
    #[error("mixed discriminants in surface data")]
    MixedDiscriminant,
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("invalid construction parameters: {0}")]
    Params(String),
    #[error("construction postcondition failed: {0}")]
    Postcondition(String),
    #[error("scale factors must be positive")]
    NonPositiveScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Bottom, Edge::Right, Edge::Top, Edge::Left];

    pub fn opposite(self) -> Edge {
        match self {
            Edge::Bottom => Edge::Top,
            Edge::Top => Edge::Bottom,
            Edge::Left => Edge::Right,
            Edge::Right => Edge::Left,
        }
    }

    /// Bottom and top edges run along x.
    pub fn is_horizontal(self) -> bool {
        matches!(self, Edge::Bottom | Edge::Top)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Edge::Bottom => "bottom",
            Edge::Right => "right",
            Edge::Top => "top",
            Edge::Left => "left",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub id: usize,
    pub width: QuadExpr,
    pub height: QuadExpr,
}

impl Rect {
    /// Length of an edge.
    pub fn edge_len(&self, e: Edge) -> &QuadExpr {
        if e.is_horizontal() {
            &self.width
        } else {
            &self.height
        }
    }

    pub fn area(&self) -> QuadExpr {
        &self.width * &self.height
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Side {
    pub rect: usize,
    pub edge: Edge,
    pub offset: QuadExpr,
    pub length: QuadExpr,
}

impl Side {
    pub fn end(&self) -> QuadExpr {
        &self.offset + &self.length
    }

    /// Local coordinates of the point at `offset + t`.
    pub fn point_at(&self, rect: &Rect, t: &QuadExpr) -> (QuadExpr, QuadExpr) {
        let c = &self.offset + t;
        let zero = QuadExpr::zero(c.d());
        match self.edge {
            Edge::Bottom => (c, zero),
            Edge::Top => (c, rect.height.clone()),
            Edge::Left => (zero, c),
            Edge::Right => (rect.width.clone(), c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EdgeGluing {
    #[serde(rename = "sideA")]
    pub side_a: Side,
    #[serde(rename = "sideB")]
    pub side_b: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MarkedPoint {
    pub name: String,
    pub rect: usize,
    pub x: QuadExpr,
    pub y: QuadExpr,
}

/// A translation surface as a rectangle complex with marked points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSurface {
    pub d: u64,
    pub rects: Vec<Rect>,
    pub gluings: Vec<EdgeGluing>,
    pub marked: Vec<MarkedPoint>,
}

/// Stratum data computed by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct StratumReport {
    pub genus: usize,
    /// Orders of the zeros, in decreasing order.
    pub zero_orders: Vec<usize>,
    pub area: QuadExpr,
    /// Rectangle vertices that are regular points.
    pub regular_vertices: usize,
}

impl FlatSurface {
    pub fn area(&self) -> QuadExpr {
        self.rects.iter().fold(QuadExpr::zero(self.d), |acc, r| acc + r.area())
    }

    pub fn rect(&self, id: usize) -> &Rect {
        &self.rects[id]
    }

    pub fn marked_point(&self, name: &str) -> Option<&MarkedPoint> {
        self.marked.iter().find(|m| m.name == name)
    }

    pub fn marked_names(&self) -> Vec<String> {
        self.marked.iter().map(|m| m.name.clone()).collect()
    }

    /// Index for geometric queries; validates first.
    pub fn topology(&self) -> Result<Topology, SurfaceError> {
        Topology::new(self)
    }

    /// Scales the surface by `diag(sx, sy)`, transporting marked points.
    pub fn apply_diag(&self, sx: &QuadExpr, sy: &QuadExpr) -> Result<FlatSurface, SurfaceError> {
        apply_diag(self, sx, sy)
    }
}

/// Checks every structural invariant and computes stratum data.
pub fn validate(s: &FlatSurface) -> Result<StratumReport, SurfaceError> {
    let topo = Topology::new(s)?;
    Ok(topo.stratum(s))
}

/// Scales the surface by `diag(sx, sy)`.
pub fn apply_diag(s: &FlatSurface, sx: &QuadExpr, sy: &QuadExpr) -> Result<FlatSurface, SurfaceError> {
    if !sx.is_positive() || !sy.is_positive() {
        return Err(SurfaceError::NonPositiveScale);
    }
    let side = |sd: &Side| {
        let k = if sd.edge.is_horizontal() { sx } else { sy };
        Side { rect: sd.rect, edge: sd.edge, offset: &sd.offset * k, length: &sd.length * k }
    };
    Ok(FlatSurface {
        d: s.d,
        rects: s
            .rects
            .iter()
            .map(|r| Rect { id: r.id, width: &r.width * sx, height: &r.height * sy })
            .collect(),
        gluings: s
            .gluings
            .iter()
            .map(|g| EdgeGluing { side_a: side(&g.side_a), side_b: side(&g.side_b) })
            .collect(),
        marked: s
            .marked
            .iter()
            .map(|m| MarkedPoint { name: m.name.clone(), rect: m.rect, x: &m.x * sx, y: &m.y * sy })
            .collect(),
    })
}
