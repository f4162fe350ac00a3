//! Explicit directions quoted from the exceptional small-discriminant cases.

use cylinders::{direction_permutation, Direction};
use groups::Perm;
use qfield::QuadExpr;

use crate::surfaces::{Kind, SurfaceSpec};
use crate::{HarnessError, Locus};

/// A coordinate `int + lambda·λ`, with `λ` the surface's prototype parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct LambdaCoord {
    pub int: i64,
    pub lambda: i64,
}

impl LambdaCoord {
    pub const fn int(n: i64) -> LambdaCoord {
        LambdaCoord { int: n, lambda: 0 }
    }

    pub const fn lambda_plus(n: i64) -> LambdaCoord {
        LambdaCoord { int: n, lambda: 1 }
    }

    pub fn eval(&self, lam: &QuadExpr) -> QuadExpr {
        let d = lam.d();
        QuadExpr::from_int(d, self.int) + lam * &QuadExpr::from_int(d, self.lambda)
    }
}

/// A direction on a named surface together with what it must produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DirectionRecipe {
    pub locus: Locus,
    pub surface: SurfaceSpec,
    pub direction: (LambdaCoord, LambdaCoord),
    /// Expected twist permutation, in figure labels.
    pub permutation: &'static str,
    /// Expected ratio of the largest to the smallest modulus.
    pub ratio: Option<i64>,
    pub cylinders: Option<usize>,
    pub note: &'static str,
}

pub const RECIPES: &[DirectionRecipe] = &[
    DirectionRecipe {
        locus: Locus::H2,
        surface: SurfaceSpec::reduced(Kind::L, -1, 9),
        direction: (LambdaCoord::int(1), LambdaCoord::int(1)),
        permutation: "(4 5)",
        ratio: None,
        cylinders: Some(1),
        note: "diagonal one-cylinder direction on L_9(-1)",
    },
    DirectionRecipe {
        locus: Locus::H2,
        surface: SurfaceSpec::reduced(Kind::L, -1, 33),
        direction: (LambdaCoord::lambda_plus(0), LambdaCoord::int(1)),
        permutation: "(4 5)",
        ratio: Some(2),
        cylinders: Some(2),
        note: "slope 1/λ on L_33(-1)",
    },
    DirectionRecipe {
        locus: Locus::H2,
        surface: SurfaceSpec::reduced(Kind::L, 1, 33),
        direction: (LambdaCoord::lambda_plus(-2), LambdaCoord::int(3)),
        permutation: "(4 5)",
        ratio: Some(2),
        cylinders: Some(2),
        note: "slope 3/(λ-2) on L_33(1)",
    },
    DirectionRecipe {
        locus: Locus::Prym,
        surface: SurfaceSpec::reduced(Kind::Z, -3, 17),
        direction: (LambdaCoord::int(2), LambdaCoord::int(1)),
        permutation: "(2 3)",
        ratio: Some(2),
        cylinders: None,
        note: "direction (2,1) on Z_17(-3); the narrow cylinder carries w2 and w3",
    },
    DirectionRecipe {
        locus: Locus::Prym,
        surface: SurfaceSpec::reduced(Kind::AMinus, -1, 25),
        direction: (LambdaCoord::int(1), LambdaCoord::int(1)),
        permutation: "(1 3)",
        ratio: None,
        cylinders: Some(1),
        note: "diagonal one-cylinder direction on A-_25(-1)",
    },
];

/// Recipes for one locus and discriminant.
pub fn recipes_for(locus: Locus, d: i64) -> Vec<&'static DirectionRecipe> {
    RECIPES.iter().filter(|r| r.locus == locus && r.surface.discriminant() == d).collect()
}

/// What a recipe produced.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RecipeOutcome {
    pub surface: String,
    pub direction: String,
    /// Permutation in engine labels.
    pub permutation: Perm,
    /// Permutation in figure labels.
    pub figure_permutation: Perm,
    pub cylinders: usize,
    /// Largest over smallest modulus, when the moduli are commensurable and
    /// there are at least two cylinders.
    pub ratio: Option<String>,
    pub ok: bool,
}

impl DirectionRecipe {
    pub fn degree(&self) -> usize {
        if self.surface.kind.is_prym() {
            3
        } else {
            5
        }
    }

    pub fn direction(&self) -> Result<Direction, HarnessError> {
        let lam = self.surface.lambda()?;
        let (u, v) = self.direction;
        Direction::new(u.eval(&lam), v.eval(&lam)).map_err(|e| HarnessError::Input(e.to_string()))
    }

    pub fn expected(&self) -> Perm {
        Perm::parse(self.permutation, self.degree()).expect("recipe permutations are well formed")
    }

    pub fn run(&self, max_crossings: usize) -> Result<RecipeOutcome, HarnessError> {
        let s = self.surface.build()?;
        let dir = self.direction()?;
        let (dec, _, perm) = direction_permutation(&s, &dir, max_crossings).map_err(|e| HarnessError::Engine {
            d: self.surface.discriminant(),
            surface: self.surface.to_string(),
            direction: dir.to_string(),
            message: e.to_string(),
        })?;
        let moduli = dec.moduli();
        let ratio = match (moduli.iter().max(), moduli.iter().min()) {
            (Some(hi), Some(lo)) if moduli.len() > 1 => hi.rational_ratio(lo),
            _ => None,
        };
        let figure = self.surface.in_figure_labels(&perm);
        let ratio_ok = match self.ratio {
            Some(r) => ratio.as_ref().is_some_and(|q| q.is_integer() && *q.numer() == r.into()),
            None => true,
        };
        let count_ok = self.cylinders.is_none_or(|n| n == dec.cylinders.len());
        Ok(RecipeOutcome {
            surface: self.surface.to_string(),
            direction: dir.to_string(),
            ok: figure == self.expected() && ratio_ok && count_ok,
            permutation: perm,
            figure_permutation: figure,
            cylinders: dec.cylinders.len(),
            ratio: ratio.map(|q| q.to_string()),
        })
    }
}
