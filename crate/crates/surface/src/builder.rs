//! Assembles rectangle complexes from rectangles placed in the plane.
//!
//! Gluings are stated between global horizontal or vertical segments and
//! cut automatically at rectangle boundaries.

use qfield::{rat, QuadExpr};

use crate::{Edge, EdgeGluing, FlatSurface, MarkedPoint, Rect, Side, SurfaceError};

#[derive(Debug, Clone)]
struct Placed {
    x0: QuadExpr,
    y0: QuadExpr,
    w: QuadExpr,
    h: QuadExpr,
}

#[derive(Debug, Clone)]
pub struct Builder {
    d: u64,
    rects: Vec<Placed>,
    gluings: Vec<EdgeGluing>,
    marks: Vec<(String, QuadExpr, QuadExpr)>,
}

/// `x mod p` in `[0, p)`.
pub fn mod_period(x: &QuadExpr, p: &QuadExpr) -> QuadExpr {
    let n = (x / p).floor();
    let n = QuadExpr::from_rational(x.d(), qfield::Rational::from_integer(n));
    x - &(p * &n)
}

pub fn half(x: &QuadExpr) -> QuadExpr {
    x.scale(&rat(1, 2))
}

#[derive(Clone, Copy)]
enum Axis {
    Horizontal,
    Vertical,
}

impl Builder {
    pub fn new(d: u64) -> Builder {
        Builder { d, rects: Vec::new(), gluings: Vec::new(), marks: Vec::new() }
    }

    pub fn q(&self, n: i64) -> QuadExpr {
        QuadExpr::from_int(self.d, n)
    }

    /// Places a rectangle with lower-left corner `(x0, y0)`; returns its id.
    pub fn rect(&mut self, x0: QuadExpr, y0: QuadExpr, w: QuadExpr, h: QuadExpr) -> usize {
        self.rects.push(Placed { x0, y0, w, h });
        self.rects.len() - 1
    }

    /// Glues the segment `[bx, bx+len]` at height `bottom_y` (bottom edges
    /// of rectangles above it) to `[tx, tx+len]` at height `top_y` (top
    /// edges of rectangles below it).
    pub fn glue_h(&mut self, bottom_y: &QuadExpr, bx: &QuadExpr, top_y: &QuadExpr, tx: &QuadExpr, len: &QuadExpr) -> Result<&mut Self, SurfaceError> {
        self.glue(Axis::Horizontal, bottom_y, bx, top_y, tx, len, None)
    }

    /// Like [`Builder::glue_h`] with x coordinates taken modulo `period`.
    pub fn glue_h_mod(
        &mut self,
        bottom_y: &QuadExpr,
        bx: &QuadExpr,
        top_y: &QuadExpr,
        tx: &QuadExpr,
        len: &QuadExpr,
        period: &QuadExpr,
    ) -> Result<&mut Self, SurfaceError> {
        self.glue(Axis::Horizontal, bottom_y, bx, top_y, tx, len, Some(period))
    }

    /// Glues `[ly, ly+len]` on the line `x = left_x` (left edges of
    /// rectangles to its right) to `[ry, ry+len]` on `x = right_x` (right
    /// edges of rectangles to its left).
    pub fn glue_v(&mut self, left_x: &QuadExpr, ly: &QuadExpr, right_x: &QuadExpr, ry: &QuadExpr, len: &QuadExpr) -> Result<&mut Self, SurfaceError> {
        self.glue(Axis::Vertical, left_x, ly, right_x, ry, len, None)
    }

    /// Adds a marked point at global coordinates.
    pub fn mark(&mut self, name: &str, x: QuadExpr, y: QuadExpr) -> &mut Self {
        self.marks.push((name.to_string(), x, y));
        self
    }

    /// The first rectangle whose closure contains the global point, with
    /// local coordinates.
    pub fn locate(&self, x: &QuadExpr, y: &QuadExpr) -> Option<(usize, QuadExpr, QuadExpr)> {
        self.rects.iter().enumerate().find_map(|(i, r)| {
            let lx = x - &r.x0;
            let ly = y - &r.y0;
            let inside = !lx.is_negative() && !ly.is_negative() && lx <= r.w && ly <= r.h;
            inside.then_some((i, lx, ly))
        })
    }

    /// Validates the complex and moves marked points to canonical
    /// representatives.
    pub fn build(&self) -> Result<FlatSurface, SurfaceError> {
        let mut s = FlatSurface {
            d: self.d,
            rects: self
                .rects
                .iter()
                .enumerate()
                .map(|(id, r)| Rect { id, width: r.w.clone(), height: r.h.clone() })
                .collect(),
            gluings: self.gluings.clone(),
            marked: Vec::new(),
        };
        let topo = s.topology()?;
        for (name, x, y) in &self.marks {
            let (r, lx, ly) = self
                .locate(x, y)
                .ok_or_else(|| SurfaceError::BadMarkedPoint(name.clone(), "not inside any rectangle".into()))?;
            let (r, x, y) = topo.canonical(r, &lx, &ly);
            s.marked.push(MarkedPoint { name: name.clone(), rect: r, x, y });
        }
        Ok(s)
    }

    #[allow(clippy::too_many_arguments)]
    fn glue(
        &mut self,
        axis: Axis,
        lo_level: &QuadExpr,
        lo_start: &QuadExpr,
        hi_level: &QuadExpr,
        hi_start: &QuadExpr,
        len: &QuadExpr,
        period: Option<&QuadExpr>,
    ) -> Result<&mut Self, SurfaceError> {
        // (start coordinate, extent) along the line, and the level of the edge
        let along = |r: &Placed| match axis {
            Axis::Horizontal => (r.x0.clone(), r.w.clone()),
            Axis::Vertical => (r.y0.clone(), r.h.clone()),
        };
        let lo_edge_level = |r: &Placed| match axis {
            Axis::Horizontal => r.y0.clone(),
            Axis::Vertical => r.x0.clone(),
        };
        let hi_edge_level = |r: &Placed| match axis {
            Axis::Horizontal => &r.y0 + &r.h,
            Axis::Vertical => &r.x0 + &r.w,
        };
        let lo_rects: Vec<usize> = (0..self.rects.len()).filter(|&i| &lo_edge_level(&self.rects[i]) == lo_level).collect();
        let hi_rects: Vec<usize> = (0..self.rects.len()).filter(|&i| &hi_edge_level(&self.rects[i]) == hi_level).collect();
        let wrap = |x: QuadExpr| match period {
            Some(p) => mod_period(&x, p),
            None => x,
        };
        let zero = QuadExpr::zero(self.d);
        // cut parameters t in (0, len)
        let mut cuts = vec![zero.clone(), len.clone()];
        let mut add_cuts = |rects: &[usize], start: &QuadExpr| {
            for &i in rects {
                let (a, ext) = along(&self.rects[i]);
                for bound in [a.clone(), &a + &ext] {
                    // t with start + t ≡ bound
                    let base = &bound - start;
                    let shifts: Vec<QuadExpr> = match period {
                        Some(p) => (-2..=2).map(|k| &base + &p.scale(&rat(k, 1))).collect(),
                        None => vec![base],
                    };
                    for t in shifts {
                        if t.is_positive() && &t < len {
                            cuts.push(t);
                        }
                    }
                }
            }
        };
        add_cuts(&lo_rects, lo_start);
        add_cuts(&hi_rects, hi_start);
        cuts.sort();
        cuts.dedup();
        let find = |rects: &[usize], c: &QuadExpr| -> Option<(usize, QuadExpr)> {
            rects.iter().find_map(|&i| {
                let (a, ext) = along(&self.rects[i]);
                let off = c - &a;
                (!off.is_negative() && off < ext).then_some((i, off))
            })
        };
        let (lo_edge, hi_edge) = match axis {
            Axis::Horizontal => (Edge::Bottom, Edge::Top),
            Axis::Vertical => (Edge::Left, Edge::Right),
        };
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (t0, t1) = (&w[0], &w[1]);
            let piece = t1 - t0;
            let lo_c = wrap(lo_start + t0);
            let hi_c = wrap(hi_start + t0);
            let missing = |what: &str, c: &QuadExpr| {
                SurfaceError::Params(format!("no {what} edge at level {:.6}, coordinate {:.6}", lo_level.to_f64(), c.to_f64()))
            };
            let (lr, lo_off) = find(&lo_rects, &lo_c).ok_or_else(|| missing(&lo_edge.to_string(), &lo_c))?;
            let (hr, hi_off) = find(&hi_rects, &hi_c).ok_or_else(|| missing(&hi_edge.to_string(), &hi_c))?;
            pieces.push(EdgeGluing {
                side_a: Side { rect: lr, edge: lo_edge, offset: lo_off, length: piece.clone() },
                side_b: Side { rect: hr, edge: hi_edge, offset: hi_off, length: piece },
            });
        }
        self.gluings.extend(pieces);
        Ok(self)
    }
}
