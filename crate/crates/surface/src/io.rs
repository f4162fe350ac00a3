//! JSON surface files.

use std::path::Path;

use crate::{validate, EdgeGluing, FlatSurface, MarkedPoint, Rect, SurfaceError};

/// Schema tag written to and required in every surface file.
pub const SCHEMA: &str = "flatperm-surface/1";

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceFile {
    schema: String,
    #[serde(rename = "D")]
    d: u64,
    rectangles: Vec<Rect>,
    gluings: Vec<EdgeGluing>,
    #[serde(default)]
    marked_points: Vec<MarkedPoint>,
}

pub fn to_json(s: &FlatSurface) -> String {
    let file = SurfaceFile {
        schema: SCHEMA.to_string(),
        d: s.d,
        rectangles: s.rects.clone(),
        gluings: s.gluings.clone(),
        marked_points: s.marked.clone(),
    };
    serde_json::to_string_pretty(&file).expect("surface data always serializes")
}

/// Parses and validates a surface document.
pub fn from_json(text: &str) -> Result<FlatSurface, SurfaceError> {
    let file: SurfaceFile = serde_json::from_str(text).map_err(|e| SurfaceError::Parse(e.to_string()))?;
    if file.schema != SCHEMA {
        return Err(SurfaceError::Parse(format!("unsupported schema {:?}, expected {SCHEMA:?}", file.schema)));
    }
    let s = FlatSurface { d: file.d, rects: file.rectangles, gluings: file.gluings, marked: file.marked_points };
    validate(&s)?;
    Ok(s)
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<FlatSurface, SurfaceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SurfaceError::Io(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| match e {
        SurfaceError::Parse(m) => SurfaceError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn save_surface(s: &FlatSurface, path: impl AsRef<Path>) -> Result<(), SurfaceError> {
    let path = path.as_ref();
    std::fs::write(path, to_json(s) + "\n").map_err(|e| SurfaceError::Io(format!("{}: {e}", path.display())))
}
