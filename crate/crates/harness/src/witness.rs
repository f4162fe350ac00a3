//! Explicit generating sets of parabolic twists for the genus-two groups.

use std::collections::HashSet;

use cylinders::{decompose, direction_permutation, twist_data, Direction, RatioClass};
use groups::{generate, IsoClass, Perm};
use prototypes::{enumerate_h2, odd_ratio_family, reduced_h2, reduced_h2_prototype, spin, spin_class, SpinClass};
use qfield::QuadExpr;
use rayon::prelude::*;

use crate::recipes::recipes_for;
use crate::surfaces::{Kind, SurfaceSpec};
use crate::verify::Generator;
use crate::{ser_display, HarnessError, Locus, VerifyConfig};

/// Crossing budget per candidate in the direction search; periodic
/// directions of the prototypes close within a few hundred crossings.
pub const SEARCH_CROSSINGS: usize = 1000;
/// Coefficient bound for candidate directions `(p₁ + q₁λ, p₂ + q₂λ)`.
pub const SEARCH_COEFF: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ParabolicSet {
    pub label: String,
    pub surface: String,
    pub generators: Vec<Generator>,
    #[serde(serialize_with = "ser_display")]
    pub generated: IsoClass,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ComponentWitness {
    Found(ParabolicSet),
    NotFoundWithinBudget { label: String, surface: String, tried: usize },
}

impl ComponentWitness {
    pub fn found(&self) -> Option<&ParabolicSet> {
        match self {
            ComponentWitness::Found(p) => Some(p),
            ComponentWitness::NotFoundWithinBudget { .. } => None,
        }
    }
}

/// Horizontal moduli ratio class of a splitting prototype.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RatioCheck {
    pub prototype: String,
    pub ratio: String,
    pub class: RatioClass,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TwoParabolicReport {
    #[serde(rename = "D")]
    pub d: i64,
    /// Number of parabolic twists the witnesses use.
    pub parabolics: usize,
    pub components: Vec<ComponentWitness>,
    /// Exhaustive over all splitting prototypes, for the discriminants
    /// where two parabolics do not suffice.
    pub ratio_checks: Vec<RatioCheck>,
}

impl TwoParabolicReport {
    pub fn all_found(&self) -> bool {
        self.components.iter().all(|c| c.found().is_some())
    }

    pub fn no_odd_ratio(&self) -> bool {
        self.ratio_checks.iter().all(|r| r.class != RatioClass::OddOdd)
    }
}

fn engine(d: i64, spec: &SurfaceSpec, dir: &Direction, e: cylinders::CylError) -> HarnessError {
    HarnessError::Engine { d, surface: spec.to_string(), direction: dir.to_string(), message: e.to_string() }
}

fn group_order(d: i64, perms: &[Perm]) -> Result<(IsoClass, usize), HarnessError> {
    let g = generate(5, perms).map_err(|e| HarnessError::Group { d, message: e.to_string() })?;
    Ok((g.iso_class, g.order))
}

/// Candidate directions ordered by coefficient size, vertical first.
pub fn candidate_directions(lam: &QuadExpr, bound: i64) -> Vec<Direction> {
    let d = lam.d();
    let mut coeffs = Vec::new();
    for p1 in -bound..=bound {
        for q1 in -bound..=bound {
            for p2 in -bound..=bound {
                for q2 in -bound..=bound {
                    coeffs.push([p1, q1, p2, q2]);
                }
            }
        }
    }
    coeffs.sort_by_key(|c| (c.iter().map(|x| x.abs()).max(), c.iter().map(|x| x.abs()).sum::<i64>(), *c));
    let mut seen = HashSet::new();
    let mut out = vec![Direction::vertical(d)];
    seen.insert(Direction::horizontal(d));
    seen.insert(Direction::vertical(d));
    let at = |p: i64, q: i64| QuadExpr::from_int(d, p) + lam * &QuadExpr::from_int(d, q);
    for [p1, q1, p2, q2] in coeffs {
        if let Ok(dir) = Direction::new(at(p1, q1), at(p2, q2)) {
            if seen.insert(dir.clone()) {
                out.push(dir);
            }
        }
    }
    out
}

/// Generating sets of parabolic twists: two on the reduced prototype when
/// they suffice, a searched second direction on an odd-ratio prototype for
/// `D ≡ 1 mod 8`, and three directions for `D ∈ {9, 33}`.
pub fn two_parabolic_witness(d: i64, cfg: &VerifyConfig) -> Result<TwoParabolicReport, HarnessError> {
    let es = reduced_h2(d).map_err(|e| HarnessError::Input(e.to_string()))?;
    let dq = d as u64;
    let h = Direction::horizontal(dq);
    let v = Direction::vertical(dq);
    let recipes = recipes_for(Locus::H2, d);
    if !recipes.is_empty() {
        let mut ratio_checks = Vec::new();
        for p in enumerate_h2(d).map_err(|e| HarnessError::Input(e.to_string()))? {
            let spec = SurfaceSpec::prototype(Kind::P, p.a, p.b, p.c, p.e);
            let s = spec.build()?;
            let dec = decompose(&s, &h, cfg.max_crossings).map_err(|e| engine(d, &spec, &h, e))?;
            let td = twist_data(&dec).map_err(|e| engine(d, &spec, &h, e))?;
            for r in td.ratios {
                ratio_checks.push(RatioCheck { prototype: spec.to_string(), ratio: r.ratio.to_string(), class: r.class });
            }
        }
        let mut components = Vec::new();
        for r in recipes {
            let spec = r.surface;
            let s = spec.build()?;
            let mut generators = Vec::new();
            for dir in [h.clone(), v.clone(), r.direction()?] {
                let (_, _, p) = direction_permutation(&s, &dir, cfg.max_crossings).map_err(|e| engine(d, &spec, &dir, e))?;
                generators.push(Generator { direction: dir.to_string(), permutation: p });
            }
            let perms: Vec<Perm> = generators.iter().map(|g| g.permutation.clone()).collect();
            let (generated, order) = group_order(d, &perms)?;
            let label = spin_class(&reduced_h2_prototype(spec.e(), d).map_err(|e| HarnessError::Input(e.to_string()))?).to_string();
            components.push(ComponentWitness::Found(ParabolicSet { label, surface: spec.to_string(), generators, generated, order }));
        }
        return Ok(TwoParabolicReport { d, parabolics: 3, components, ratio_checks });
    }
    if d.rem_euclid(8) != 1 {
        let spec = SurfaceSpec::reduced(Kind::P, es[0], d);
        let s = spec.build()?;
        let mut generators = Vec::new();
        for dir in [h.clone(), v.clone()] {
            let (_, _, p) = direction_permutation(&s, &dir, cfg.max_crossings).map_err(|e| engine(d, &spec, &dir, e))?;
            generators.push(Generator { direction: dir.to_string(), permutation: p });
        }
        let perms: Vec<Perm> = generators.iter().map(|g| g.permutation.clone()).collect();
        let (generated, order) = group_order(d, &perms)?;
        let set = ParabolicSet { label: SpinClass { value: None }.to_string(), surface: spec.to_string(), generators, generated, order };
        return Ok(TwoParabolicReport { d, parabolics: 2, components: vec![ComponentWitness::Found(set)], ratio_checks: Vec::new() });
    }
    let budget = cfg.max_crossings.min(SEARCH_CROSSINGS);
    let mut components = Vec::new();
    for sp in [0u8, 1] {
        let Some(p) = odd_ratio_family(d).into_iter().find(|p| spin(p).ok() == Some(sp)) else {
            return Err(HarnessError::Input(format!("no odd-ratio prototype of spin {sp} for D = {d}")));
        };
        let spec = SurfaceSpec::prototype(Kind::P, p.a, p.b, p.c, p.e);
        let s = spec.build()?;
        let (_, _, th) = direction_permutation(&s, &h, cfg.max_crossings).map_err(|e| engine(d, &spec, &h, e))?;
        let label = SpinClass { value: Some(sp) }.to_string();
        let candidates = candidate_directions(&spec.lambda()?, SEARCH_COEFF);
        let hit = candidates.par_iter().find_map_first(|dir| {
            let (_, _, p) = direction_permutation(&s, dir, budget).ok()?;
            let g = generate(5, &[th.clone(), p.clone()]).ok()?;
            (g.order == 12).then(|| (dir.clone(), p, g))
        });
        let outcome = match hit {
            Some((dir, p, g)) => {
                let generators = vec![
                    Generator { direction: h.to_string(), permutation: th.clone() },
                    Generator { direction: dir.to_string(), permutation: p },
                ];
                ComponentWitness::Found(ParabolicSet { label, surface: spec.to_string(), generators, generated: g.iso_class, order: g.order })
            }
            None => ComponentWitness::NotFoundWithinBudget { label, surface: spec.to_string(), tried: candidates.len() },
        };
        components.push(outcome);
    }
    Ok(TwoParabolicReport { d, parabolics: 2, components, ratio_checks: Vec::new() })
}
