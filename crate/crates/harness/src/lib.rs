//! End-to-end verification of the permutation groups induced by Veech-group
//! parabolics on Weierstrass points (genus two) and on Prym fixed points
//! (the Prym locus in genus three).
//!
//! For each discriminant and each component, a witness surface provides a
//! lower bound `L` generated by twist permutations, two-torsion invariants
//! provide an upper bound `U`, and cycle-type facts observed on other
//! surfaces of the component pin down the group between them.

use std::fmt;
use std::path::PathBuf;

pub mod oracle;
pub mod recipes;
pub mod report;
pub mod surfaces;
pub mod verify;
pub mod witness;

pub use recipes::{recipes_for, DirectionRecipe, LambdaCoord, RecipeOutcome, RECIPES};
pub use report::{render_text, render_tsv};
pub use surfaces::{Kind, Params, SurfaceSpec};
pub use verify::{
    verify_disc, verify_h2, verify_prym, verify_range, ComponentReport, Conclusion, DiscReport, Fact, Generator, RangeReport, Status, Summary,
};
pub use witness::{two_parabolic_witness, ComponentWitness, ParabolicSet, RatioCheck, TwoParabolicReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    H2,
    Prym,
}

impl Locus {
    pub fn parse(s: &str) -> Result<Locus, HarnessError> {
        match s {
            "h2" => Ok(Locus::H2),
            "prym" => Ok(Locus::Prym),
            _ => Err(HarnessError::Input(format!("unknown locus {s:?}; expected h2 or prym"))),
        }
    }

    /// Discriminants the verifier runs on.
    pub fn is_valid(self, d: i64) -> bool {
        match self {
            Locus::H2 => d >= 5 && matches!(d.rem_euclid(4), 0 | 1),
            Locus::Prym => d > 0 && invariants::prym_locus_nonempty(d as u64),
        }
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locus::H2 => "h2",
            Locus::Prym => "prym",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Input(String),
    #[error("cannot build {surface}: {message}")]
    Build { surface: String, message: String },
    #[error("D = {d}, {surface}, direction {direction}: {message}")]
    Engine { d: i64, surface: String, direction: String, message: String },
    #[error("D = {d}, {surface}: {message}")]
    Invariant { d: i64, surface: String, message: String },
    #[error("D = {d}: {message}")]
    Group { d: i64, message: String },
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub max_crossings: usize,
    /// Surface file for `B_8(0)`, the only known representative of the
    /// discriminant-8 Prym locus.
    pub b8_file: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> VerifyConfig {
        VerifyConfig { max_crossings: cylinders::DEFAULT_MAX_CROSSINGS, b8_file: None }
    }
}

pub(crate) fn ser_display<T: fmt::Display, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}
