//! Per-discriminant, per-component verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use cylinders::{direction_permutation, Direction, RatioClass};
use groups::{force_classification, generate, symmetric, verify_dih5_maximality, CycleType, Forced, IsoClass, Perm, PermGroupInfo};
use invariants::{
    prym_locus_nonempty, prym_parity_class, torsion_types_h2, torsion_types_prym, upper_bound_group, BasisChoice, PrymParity, Reduction,
};
use prototypes::{odd_ratio_family, prym_component, reduced_h2, reduced_h2_prototype, reduced_prym, spin, spin_class, Model, PrymComponentLabel, SpinClass};
use rayon::prelude::*;
use surface::{find_involution, involution_fixed_points, load_surface, FlatSurface};

use crate::recipes::{recipes_for, DirectionRecipe};
use crate::surfaces::{Kind, SurfaceSpec};
use crate::{ser_display, HarnessError, Locus, VerifyConfig};

/// A twist permutation used as a generator of the lower bound.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Generator {
    pub direction: String,
    pub permutation: Perm,
}

/// An element cycle type known to occur in the component, observed on a
/// surface other than the witness.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Fact {
    pub cycle_type: CycleType,
    pub surface: String,
    pub direction: String,
    pub reason: String,
}

/// Outcome of the classification between the bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conclusion {
    Class(IsoClass),
    /// Several classes remain possible (or none, if the bounds conflict).
    Undetermined(Vec<IsoClass>),
}

impl From<Forced> for Conclusion {
    fn from(f: Forced) -> Conclusion {
        match f {
            Forced::Class(c) => Conclusion::Class(c),
            Forced::Undetermined(cs) => Conclusion::Undetermined(cs),
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Class(c) => write!(f, "{c}"),
            Conclusion::Undetermined(cs) => {
                let names: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "undetermined[{}]", names.join(","))
            }
        }
    }
}

impl serde::Serialize for Conclusion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ComponentReport {
    pub label: String,
    pub witness: String,
    pub generators: Vec<Generator>,
    #[serde(rename = "L", serialize_with = "ser_display")]
    pub lower: IsoClass,
    pub lower_order: usize,
    #[serde(rename = "U", serialize_with = "ser_display")]
    pub upper: IsoClass,
    pub upper_order: usize,
    pub upper_route: String,
    pub facts: Vec<Fact>,
    pub concluded: Conclusion,
    #[serde(serialize_with = "ser_display")]
    pub expected: IsoClass,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Match,
    Mismatch,
    /// Computed but outside the theorem's range.
    Informational,
    SkippedNeedsData,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Match => "match",
            Status::Mismatch => "mismatch",
            Status::Informational => "informational",
            Status::SkippedNeedsData => "skipped_needs_data",
            Status::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DiscReport {
    #[serde(rename = "D")]
    pub d: i64,
    pub locus: Locus,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub components: Vec<ComponentReport>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Summary {
    pub matched: usize,
    pub mismatched: usize,
    pub informational: usize,
    pub skipped: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RangeReport {
    pub locus: Locus,
    pub from: i64,
    pub to: i64,
    pub summary: Summary,
    pub reports: Vec<DiscReport>,
}

impl RangeReport {
    /// No mismatch and no engine error.
    pub fn ok(&self) -> bool {
        self.summary.mismatched == 0 && self.summary.errors == 0
    }
}

fn group_err(d: i64) -> impl Fn(groups::GroupError) -> HarnessError {
    move |e| HarnessError::Group { d, message: e.to_string() }
}

fn invariant_err(d: i64, surface: &SurfaceSpec) -> impl Fn(invariants::InvError) -> HarnessError + '_ {
    move |e| HarnessError::Invariant { d, surface: surface.to_string(), message: e.to_string() }
}

/// Twist permutation of a direction, with engine errors annotated.
fn twist(d: i64, name: &str, s: &FlatSurface, dir: &Direction, cfg: &VerifyConfig) -> Result<(Perm, Vec<RatioClass>), HarnessError> {
    let (_, td, p) = direction_permutation(s, dir, cfg.max_crossings).map_err(|e| HarnessError::Engine {
        d,
        surface: name.to_string(),
        direction: dir.to_string(),
        message: e.to_string(),
    })?;
    Ok((p, td.ratios.iter().map(|r| r.class).collect()))
}

/// Lower bound from the horizontal and vertical twists and an optional
/// recipe direction on the same surface.
fn lower_bound(
    d: i64,
    spec: &SurfaceSpec,
    s: &FlatSurface,
    recipe: Option<&DirectionRecipe>,
    cfg: &VerifyConfig,
) -> Result<(Vec<Generator>, PermGroupInfo), HarnessError> {
    let dq = d as u64;
    let mut dirs = vec![Direction::horizontal(dq), Direction::vertical(dq)];
    if let Some(r) = recipe {
        dirs.push(r.direction()?);
    }
    let mut gens = Vec::new();
    for dir in &dirs {
        let (p, _) = twist(d, &spec.to_string(), s, dir, cfg)?;
        gens.push(Generator { direction: dir.to_string(), permutation: p });
    }
    let perms: Vec<Perm> = gens.iter().map(|g| g.permutation.clone()).collect();
    let degree = s.marked.len();
    let lower = generate(degree, &perms).map_err(group_err(d))?;
    Ok((gens, lower))
}

fn h2_expected(d: i64) -> IsoClass {
    match d.rem_euclid(8) {
        0 | 4 => IsoClass::Dih4,
        5 => IsoClass::Dih5,
        _ => IsoClass::Dih6,
    }
}

/// Whether the theorem covers this discriminant; smaller ones are computed
/// and reported outside the tally.
fn h2_in_theorem_range(d: i64) -> bool {
    d >= 9
}

fn disc_status(components: &[ComponentReport], informational: bool) -> Status {
    if informational {
        Status::Informational
    } else if components.iter().all(|c| c.matched) {
        Status::Match
    } else {
        Status::Mismatch
    }
}

/// Verifies the genus-two classification for one discriminant.
pub fn verify_h2(d: i64, cfg: &VerifyConfig) -> Result<DiscReport, HarnessError> {
    let es = reduced_h2(d).map_err(|e| HarnessError::Input(e.to_string()))?;
    let mut by_spin: BTreeMap<Option<u8>, Vec<i64>> = BTreeMap::new();
    for e in es {
        let p = reduced_h2_prototype(e, d).map_err(|e| HarnessError::Input(e.to_string()))?;
        by_spin.entry(spin_class(&p).value).or_default().push(e);
    }
    let expected = h2_expected(d);
    let recipes = recipes_for(Locus::H2, d);
    let mut components = Vec::new();
    for (sp, es) in by_spin {
        let recipe = recipes.iter().copied().find(|r| es.contains(&r.surface.e()));
        let spec = recipe.map_or(SurfaceSpec::reduced(Kind::L, es[0], d), |r| r.surface);
        let s = spec.build()?;
        let (generators, lower) = lower_bound(d, &spec, &s, recipe, cfg)?;
        let mut facts = Vec::new();
        let (upper, upper_route, concluded) = if d.rem_euclid(8) == 5 {
            match verify_dih5_maximality(&lower) {
                Ok(true) => (
                    lower.clone(),
                    "Dih5 is the only overgroup of L whose w1-stabilizer preserves {w2,w3} and {w4,w5}".to_string(),
                    Conclusion::Class(IsoClass::Dih5),
                ),
                Ok(false) => (symmetric(5), "L is not maximal under the w1-stabilizer condition".to_string(), Conclusion::Undetermined(Vec::new())),
                Err(e) => (symmetric(5), format!("stabilizer route unavailable: {e}"), Conclusion::Undetermined(Vec::new())),
            }
        } else {
            let basis = BasisChoice::canonical(d as u64, Reduction::H2).map_err(invariant_err(d, &spec))?;
            let types: Vec<_> = torsion_types_h2(&s, &basis).map_err(invariant_err(d, &spec))?.into_iter().map(|(_, t)| t).collect();
            let upper = upper_bound_group(&types).map_err(invariant_err(d, &spec))?;
            if recipe.is_none() {
                if let Some(sp) = sp {
                    facts.extend(double_transposition_fact(d, sp, cfg)?);
                }
            }
            let cycle_types: Vec<CycleType> = facts.iter().map(|f: &Fact| f.cycle_type.clone()).collect();
            let forced = force_classification(&upper, &lower, &cycle_types).map_err(group_err(d))?;
            let names: Vec<String> = types.iter().map(|t| t.to_string()).collect();
            (upper, format!("two-torsion types ({}) with basis d = {}", names.join(","), basis.d), forced.into())
        };
        components.push(ComponentReport {
            label: SpinClass { value: sp }.to_string(),
            witness: spec.to_string(),
            generators,
            lower: lower.iso_class.clone(),
            lower_order: lower.order,
            upper: upper.iso_class.clone(),
            upper_order: upper.order,
            upper_route,
            facts,
            matched: concluded == Conclusion::Class(expected.clone()),
            concluded,
            expected: expected.clone(),
        });
    }
    let informational = !h2_in_theorem_range(d);
    let note = informational.then(|| format!("D = {d} is below the theorem's range; reported without assertion"));
    Ok(DiscReport { d, locus: Locus::H2, status: disc_status(&components, informational), note, components })
}

/// A `2+2` element from the horizontal twist of an odd-ratio prototype
/// `(a, 4k+2, 2, e)` of the given spin.
fn double_transposition_fact(d: i64, sp: u8, cfg: &VerifyConfig) -> Result<Option<Fact>, HarnessError> {
    for p in odd_ratio_family(d) {
        if spin(&p).ok() != Some(sp) {
            continue;
        }
        let spec = SurfaceSpec::prototype(Kind::P, p.a, p.b, p.c, p.e);
        let s = spec.build()?;
        let (perm, classes) = twist(d, &spec.to_string(), &s, &Direction::horizontal(d as u64), cfg)?;
        if classes.contains(&RatioClass::OddOdd) {
            return Ok(Some(Fact {
                cycle_type: perm.cycle_type(),
                surface: spec.to_string(),
                direction: Direction::horizontal(d as u64).to_string(),
                reason: "horizontal moduli ratio is odd/odd".into(),
            }));
        }
    }
    Ok(None)
}

fn prym_expected(d: i64) -> Result<IsoClass, HarnessError> {
    match prym_parity_class(d as u64).map_err(|e| HarnessError::Input(e.to_string()))? {
        PrymParity::Sym2Expected => Ok(IsoClass::Sym2),
        PrymParity::Sym3Expected => Ok(IsoClass::Sym3),
    }
}

fn component_of(spec: &SurfaceSpec, d: i64) -> Result<PrymComponentLabel, HarnessError> {
    let model = spec.kind.model().ok_or_else(|| HarnessError::Input(format!("{spec} is not a Prym surface")))?;
    prym_component(model, spec.e(), d).map_err(|e| HarnessError::Input(e.to_string()))
}

/// Verifies the Prym classification for one discriminant.
pub fn verify_prym(d: i64, cfg: &VerifyConfig) -> Result<DiscReport, HarnessError> {
    if d <= 0 || !prym_locus_nonempty(d as u64) {
        return Err(HarnessError::Input(format!("the Prym locus of discriminant {d} is empty")));
    }
    let expected = prym_expected(d)?;
    if d == 8 {
        return verify_b8(cfg, expected);
    }
    let mut comps: BTreeMap<PrymComponentLabel, Vec<SurfaceSpec>> = BTreeMap::new();
    for e in reduced_prym(d).map_err(|e| HarnessError::Input(e.to_string()))? {
        for (model, kind) in [(Model::Plus, Kind::APlus), (Model::Minus, Kind::AMinus)] {
            let label = prym_component(model, e, d).map_err(|e| HarnessError::Input(e.to_string()))?;
            comps.entry(label).or_default().push(SurfaceSpec::reduced(kind, e, d));
        }
    }
    let recipes = recipes_for(Locus::Prym, d);
    let mut components = Vec::new();
    for (label, candidates) in comps {
        let mut recipe = None;
        for r in &recipes {
            if component_of(&r.surface, d)? == label {
                recipe = Some(*r);
                break;
            }
        }
        let (spec, generators, lower) = match recipe {
            Some(r) => {
                let s = r.surface.build()?;
                let (g, l) = lower_bound(d, &r.surface, &s, Some(r), cfg)?;
                (r.surface, g, l)
            }
            None => {
                let mut best: Option<(SurfaceSpec, Vec<Generator>, PermGroupInfo)> = None;
                for spec in candidates {
                    let s = spec.build()?;
                    let (g, l) = lower_bound(d, &spec, &s, None, cfg)?;
                    if best.as_ref().is_none_or(|b| l.order > b.2.order) {
                        best = Some((spec, g, l));
                    }
                }
                best.expect("every component has a reduced prototype")
            }
        };
        let (upper, upper_route, concluded) = if expected == IsoClass::Sym2 {
            sym2_upper_bound(d, &spec, &lower)?
        } else {
            let upper = symmetric(3);
            let forced = force_classification(&upper, &lower, &[]).map_err(group_err(d))?;
            (upper, "no restriction".to_string(), forced.into())
        };
        components.push(ComponentReport {
            label: label.to_string(),
            witness: spec.to_string(),
            generators,
            lower: lower.iso_class.clone(),
            lower_order: lower.order,
            upper: upper.iso_class.clone(),
            upper_order: upper.order,
            upper_route,
            facts: Vec::new(),
            matched: concluded == Conclusion::Class(expected.clone()),
            concluded,
            expected: expected.clone(),
        });
    }
    Ok(DiscReport { d, locus: Locus::Prym, status: disc_status(&components, false), note: None, components })
}

/// Upper bound on the witness from the two-torsion table of `Z_D(e)`,
/// which lies in the same (connected) locus. The witness's group is a
/// relabeling of the group of `Z_D(e)`, so every conjugate of the table
/// bound that contains `L` is admissible and all must agree.
fn sym2_upper_bound(d: i64, witness: &SurfaceSpec, lower: &PermGroupInfo) -> Result<(PermGroupInfo, String, Conclusion), HarnessError> {
    let zspec = SurfaceSpec::reduced(Kind::Z, witness.e(), d);
    let z = zspec.build()?;
    let basis = BasisChoice::canonical(d as u64, Reduction::Prym).map_err(invariant_err(d, &zspec))?;
    let types: Vec<_> = torsion_types_prym(&z, &basis).map_err(invariant_err(d, &zspec))?.into_iter().map(|(_, t)| t).collect();
    let table = upper_bound_group(&types).map_err(invariant_err(d, &zspec))?;
    let mut seen = BTreeSet::new();
    let mut admissible = Vec::new();
    for sigma in &symmetric(3).elements {
        let conj: Vec<Perm> = table.elements.iter().map(|g| g.conjugate_by(sigma)).collect();
        let u = generate(3, &conj).map_err(group_err(d))?;
        if lower.is_subgroup_of(&u) && seen.insert(u.element_set()) {
            admissible.push(u);
        }
    }
    let names: Vec<String> = types.iter().map(|t| t.to_string()).collect();
    let route = format!("two-torsion types ({}) on {zspec} with basis d = {}, transported by relabeling", names.join(","), basis.d);
    let Some(first) = admissible.first().cloned() else {
        return Ok((table, route, Conclusion::Undetermined(Vec::new())));
    };
    let mut classes = BTreeSet::new();
    for u in &admissible {
        match force_classification(u, lower, &[]).map_err(group_err(d))? {
            Forced::Class(c) => {
                classes.insert(c);
            }
            Forced::Undetermined(cs) => classes.extend(cs),
        }
    }
    let concluded = if classes.len() == 1 {
        Conclusion::Class(classes.into_iter().next().expect("one class"))
    } else {
        Conclusion::Undetermined(classes.into_iter().collect())
    };
    Ok((first, route, concluded))
}

/// Discriminant 8 has no reduced Prym prototype; its known representative
/// must be supplied as a surface file.
fn verify_b8(cfg: &VerifyConfig, expected: IsoClass) -> Result<DiscReport, HarnessError> {
    let Some(path) = &cfg.b8_file else {
        return Ok(DiscReport {
            d: 8,
            locus: Locus::Prym,
            status: Status::SkippedNeedsData,
            note: Some("no reduced prototype exists; supply the B_8(0) surface with --b8-file".into()),
            components: Vec::new(),
        });
    };
    let name = format!("B_8(0) from {}", path.display());
    let bad = |m: String| HarnessError::Invariant { d: 8, surface: name.clone(), message: m };
    let s = load_surface(path).map_err(|e| bad(e.to_string()))?;
    check_b8(&s).map_err(bad)?;
    let spec_name = name.clone();
    let dq = 8u64;
    let mut generators = Vec::new();
    for dir in [Direction::horizontal(dq), Direction::vertical(dq)] {
        let (dec, _, p) = direction_permutation(&s, &dir, cfg.max_crossings).map_err(|e| HarnessError::Engine {
            d: 8,
            surface: spec_name.clone(),
            direction: dir.to_string(),
            message: e.to_string(),
        })?;
        let m = dec.moduli();
        if m.iter().any(|x| x != &m[0]) {
            return Err(bad(format!("moduli in direction {dir} are not all equal")));
        }
        generators.push(Generator { direction: dir.to_string(), permutation: p });
    }
    let perms: Vec<Perm> = generators.iter().map(|g| g.permutation.clone()).collect();
    let lower = generate(3, &perms).map_err(group_err(8))?;
    let upper = symmetric(3);
    let concluded: Conclusion = force_classification(&upper, &lower, &[]).map_err(group_err(8))?.into();
    let component = ComponentReport {
        label: PrymComponentLabel::Unique.to_string(),
        witness: name,
        generators,
        lower: lower.iso_class.clone(),
        lower_order: lower.order,
        upper: upper.iso_class.clone(),
        upper_order: upper.order,
        upper_route: "no restriction".into(),
        facts: Vec::new(),
        matched: concluded == Conclusion::Class(expected.clone()),
        concluded,
        expected,
    };
    let components = vec![component];
    Ok(DiscReport { d: 8, locus: Locus::Prym, status: disc_status(&components, false), note: None, components })
}

/// Structural checks on a supplied `B_8(0)`: genus three with a single zero
/// of order four and three marked points that are the regular fixed points
/// of the involution.
fn check_b8(s: &FlatSurface) -> Result<(), String> {
    if s.d != 8 {
        return Err(format!("surface has discriminant {}, expected 8", s.d));
    }
    let report = surface::validate(s).map_err(|e| e.to_string())?;
    if report.genus != 3 || report.zero_orders != vec![4] {
        return Err(format!("expected genus 3 with one zero of order 4, got genus {} with zeros {:?}", report.genus, report.zero_orders));
    }
    let inv = find_involution(s).ok_or("no involution with derivative -I")?;
    let fixed = involution_fixed_points(s, &inv).map_err(|e| e.to_string())?;
    if fixed.regular.len() != 3 || s.marked.len() != 3 {
        return Err(format!("expected three regular fixed points, found {} and {} marked", fixed.regular.len(), s.marked.len()));
    }
    for m in &s.marked {
        if !fixed.regular.iter().any(|f| f.rect == m.rect && f.x == m.x && f.y == m.y) {
            return Err(format!("{} is not a fixed point of the involution", m.name));
        }
    }
    Ok(())
}

/// Dispatches on the locus.
pub fn verify_disc(locus: Locus, d: i64, cfg: &VerifyConfig) -> Result<DiscReport, HarnessError> {
    match locus {
        Locus::H2 => verify_h2(d, cfg),
        Locus::Prym => verify_prym(d, cfg),
    }
}

/// Runs every valid discriminant in `from..=to` in parallel; the result is
/// sorted by discriminant. Engine errors become `Error` entries.
pub fn verify_range(locus: Locus, from: i64, to: i64, cfg: &VerifyConfig) -> RangeReport {
    let ds: Vec<i64> = (from..=to).filter(|&d| locus.is_valid(d)).collect();
    let mut reports: Vec<DiscReport> = ds
        .par_iter()
        .map(|&d| {
            verify_disc(locus, d, cfg).unwrap_or_else(|e| DiscReport {
                d,
                locus,
                status: Status::Error,
                note: Some(e.to_string()),
                components: Vec::new(),
            })
        })
        .collect();
    reports.sort_by_key(|r| r.d);
    let mut summary = Summary::default();
    for r in &reports {
        match r.status {
            Status::Match => summary.matched += 1,
            Status::Mismatch => summary.mismatched += 1,
            Status::Informational => summary.informational += 1,
            Status::SkippedNeedsData => summary.skipped += 1,
            Status::Error => summary.errors += 1,
        }
    }
    RangeReport { locus, from, to, summary, reports }
}
