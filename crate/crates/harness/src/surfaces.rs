//! Named surface constructions shared by reports, recipes and the CLI.

use std::fmt;

use groups::Perm;
use prototypes::{lambda_of, reduced_h2_prototype, reduced_prym_prototype, Model};
use qfield::QuadExpr;
use surface::{make_aminus, make_aplus, make_l, make_p, make_z, FlatSurface};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Kind {
    P,
    L,
    APlus,
    AMinus,
    Z,
}

impl Kind {
    pub fn parse(s: &str) -> Result<Kind, HarnessError> {
        match s {
            "P" => Ok(Kind::P),
            "L" => Ok(Kind::L),
            "A+" => Ok(Kind::APlus),
            "A-" => Ok(Kind::AMinus),
            "Z" => Ok(Kind::Z),
            _ => Err(HarnessError::Input(format!("unknown surface kind {s:?}; expected P, L, A+, A- or Z"))),
        }
    }

    pub fn is_prym(self) -> bool {
        matches!(self, Kind::APlus | Kind::AMinus | Kind::Z)
    }

    pub fn model(self) -> Option<Model> {
        match self {
            Kind::APlus => Some(Model::Plus),
            Kind::AMinus | Kind::Z => Some(Model::Minus),
            Kind::P | Kind::L => None,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Kind::P => "P",
            Kind::L => "L",
            Kind::APlus => "A+",
            Kind::AMinus => "A-",
            Kind::Z => "Z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Params {
    /// A splitting prototype `(a, b, c, e)`.
    Prototype { a: i64, b: i64, c: i64, e: i64 },
    /// The reduced prototype of discriminant `d` with parameter `e`.
    Reduced { e: i64, d: i64 },
}

/// A surface given by its construction, so it can be named in reports and
/// rebuilt on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct SurfaceSpec {
    pub kind: Kind,
    pub params: Params,
}

impl SurfaceSpec {
    pub const fn reduced(kind: Kind, e: i64, d: i64) -> SurfaceSpec {
        SurfaceSpec { kind, params: Params::Reduced { e, d } }
    }

    pub const fn prototype(kind: Kind, a: i64, b: i64, c: i64, e: i64) -> SurfaceSpec {
        SurfaceSpec { kind, params: Params::Prototype { a, b, c, e } }
    }

    /// Parses the CLI form: a kind (`P`, `L`, `A+`, `A-`, `Z`) and either
    /// `a,b,c,e` or `e,D`.
    pub fn parse(kind: &str, params: &str) -> Result<SurfaceSpec, HarnessError> {
        let kind = Kind::parse(kind)?;
        let nums: Vec<i64> = params
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| HarnessError::Input(format!("parameters {params:?} must be comma-separated integers")))?;
        let params = match nums[..] {
            [a, b, c, e] => Params::Prototype { a, b, c, e },
            [e, d] => Params::Reduced { e, d },
            _ => return Err(HarnessError::Input(format!("expected a,b,c,e or e,D, got {params:?}"))),
        };
        if matches!((kind, params), (Kind::L | Kind::Z, Params::Prototype { .. })) {
            return Err(HarnessError::Input(format!("{} surfaces take e,D", kind.symbol())));
        }
        Ok(SurfaceSpec { kind, params })
    }

    pub fn discriminant(&self) -> i64 {
        match self.params {
            Params::Reduced { d, .. } => d,
            Params::Prototype { b, c, e, .. } => e * e + if self.kind.is_prym() { 8 } else { 4 } * b * c,
        }
    }

    pub fn e(&self) -> i64 {
        match self.params {
            Params::Reduced { e, .. } | Params::Prototype { e, .. } => e,
        }
    }

    pub fn lambda(&self) -> Result<QuadExpr, HarnessError> {
        lambda_of(self.e(), self.discriminant()).map_err(|err| HarnessError::Input(err.to_string()))
    }

    pub fn build(&self) -> Result<FlatSurface, HarnessError> {
        let wrap = |err: String| HarnessError::Build { surface: self.to_string(), message: err };
        let proto = |e: i64, d: i64| -> Result<(i64, i64, i64, i64), HarnessError> {
            let found = if self.kind.is_prym() {
                reduced_prym_prototype(e, d).map(|p| (p.a, p.b, p.c, p.e))
            } else {
                reduced_h2_prototype(e, d).map(|p| (p.a, p.b, p.c, p.e))
            };
            found.map_err(|err| wrap(err.to_string()))
        };
        let (a, b, c, e) = match self.params {
            Params::Prototype { a, b, c, e } => (a, b, c, e),
            Params::Reduced { e, d } => match self.kind {
                Kind::L => return make_l(e, d).map_err(|err| wrap(err.to_string())),
                Kind::Z => return make_z(e, d).map_err(|err| wrap(err.to_string())),
                _ => proto(e, d)?,
            },
        };
        let built = match self.kind {
            Kind::P => make_p(a, b, c, e),
            Kind::APlus => make_aplus(a, b, c, e),
            Kind::AMinus => make_aminus(a, b, c, e),
            Kind::L | Kind::Z => unreachable!("rejected by the constructors"),
        };
        built.map_err(|err| wrap(err.to_string()))
    }

    /// Relabeling from engine names to the figure labels used for the
    /// small-discriminant surfaces. The engine's `A−` labels put `w1, w2` on
    /// the long horizontal core; the figures swap `w1` and `w2`. `Z`
    /// inherits the labels of `A−`.
    pub fn figure_relabeling(&self) -> Option<Perm> {
        match self.kind {
            Kind::AMinus | Kind::Z => Some(Perm::transposition(3, 0, 1)),
            _ => None,
        }
    }

    /// A permutation in figure labels.
    pub fn in_figure_labels(&self, p: &Perm) -> Perm {
        match self.figure_relabeling() {
            Some(f) => p.conjugate_by(&f),
            None => p.clone(),
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params {
            Params::Reduced { e, d } => write!(f, "{}_{d}({e})", self.kind.symbol()),
            Params::Prototype { a, b, c, e } => write!(f, "{}({a},{b},{c},{e})", self.kind.symbol()),
        }
    }
}
