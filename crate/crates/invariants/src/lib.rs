//! Two-torsion types of marked points relative to the zero.
//!
//! A marked point's displacement from the zero is taken modulo the period
//! lattice. Writing each coordinate as `p + qρ` and keeping `p mod 1` gives a
//! point of `{0, 1/2}²` whenever the surface is one of the prototypical
//! models, and affine maps act on these points through an invertible matrix
//! mod 2. The resulting type partition bounds the permutation group.

use std::fmt;

use groups::{generate, symmetric, verify_dih5_maximality, GroupError, IsoClass, Perm, PermGroupInfo};
use qfield::{exact_sqrt, frac, fr, rat, QuadExpr, Rational};
use surface::{FlatSurface, SurfaceError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InvError {
    #[error("the surface has {0} zeros; displacements need a unique zero")]
    MultipleZeros(usize),
    #[error("d = {d} is not a valid basis for D = {disc}: {reason}")]
    InvalidBasis { disc: u64, d: i64, reason: String },
    #[error("D = {0} is not a quadratic residue modulo {1}")]
    NotResidue(u64, u64),
    #[error("marked point {name} has fractional parts ({x}, {y}), not a two-torsion point")]
    NotTwoTorsion { name: String, x: String, y: String },
    #[error("more than five marked points")]
    TooManyPoints,
    #[error("the order-10 group is not maximal under the point-1 stabilizer condition")]
    Dih5NotMaximal,
    #[error("E_D(4) is empty for D = {0}")]
    EmptyPrymLocus(u64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The two-torsion class of a point: integral, half-horizontal,
/// half-vertical or center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum TorsionType {
    I,
    H,
    V,
    C,
}

impl TorsionType {
    /// Type of a fractional-part pair, if both parts lie in `{0, 1/2}`.
    pub fn from_fr(x: &Rational, y: &Rational) -> Option<TorsionType> {
        let half = rat(1, 2);
        let zero = rat(0, 1);
        let bit = |r: &Rational| {
            if *r == zero {
                Some(false)
            } else if *r == half {
                Some(true)
            } else {
                None
            }
        };
        Some(match (bit(x)?, bit(y)?) {
            (false, false) => TorsionType::I,
            (true, false) => TorsionType::H,
            (false, true) => TorsionType::V,
            (true, true) => TorsionType::C,
        })
    }
}

impl fmt::Display for TorsionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorsionType::I => "0",
            TorsionType::H => "h",
            TorsionType::V => "v",
            TorsionType::C => "c",
        })
    }
}

/// Number of integral points and the unordered counts of the three nonzero
/// types, stored in decreasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct HlkInvariant {
    pub n_integral: usize,
    pub counts: [usize; 3],
}

impl HlkInvariant {
    pub fn new(n_integral: usize, mut counts: [usize; 3]) -> HlkInvariant {
        counts.sort_unstable_by(|a, b| b.cmp(a));
        HlkInvariant { n_integral, counts }
    }

    pub fn of(types: &[TorsionType]) -> HlkInvariant {
        let count = |t| types.iter().filter(|&&x| x == t).count();
        HlkInvariant::new(count(TorsionType::I), [count(TorsionType::H), count(TorsionType::V), count(TorsionType::C)])
    }
}

impl fmt::Display for HlkInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.counts;
        write!(f, "({}, [{a}, {b}, {c}])", self.n_integral)
    }
}

/// Which lattice reduction a basis serves: genus two needs `D ≡ d² mod 8`,
/// the Prym locus `D ≡ d² mod 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Reduction {
    H2,
    Prym,
}

impl Reduction {
    pub fn modulus(self) -> u64 {
        match self {
            Reduction::H2 => 8,
            Reduction::Prym => 16,
        }
    }
}

/// The generator `ρ = (√D − d)/2` of the order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisChoice {
    pub disc: u64,
    pub d: i64,
    pub rho: QuadExpr,
    pub reduction: Reduction,
}

impl BasisChoice {
    pub fn new(disc: u64, d: i64, reduction: Reduction) -> Result<BasisChoice, InvError> {
        let invalid = |reason: String| InvError::InvalidBasis { disc, d, reason };
        if (disc as i64 - d).rem_euclid(2) != 0 {
            return Err(invalid("d and D must have the same parity".into()));
        }
        let m = reduction.modulus() as i64;
        if (disc as i64 - d * d).rem_euclid(m) != 0 {
            return Err(invalid(format!("D ≢ d² mod {m}")));
        }
        let rho = QuadExpr::new(disc, rat(-d, 2), rat(1, 2)).map_err(|e| invalid(e.to_string()))?;
        Ok(BasisChoice { disc, d, rho, reduction })
    }

    /// `d = 0, 2, 1` for `D ≡ 0, 4, 1 mod 8`, and `d = 0, 2` for
    /// `D ≡ 0, 4 mod 16`.
    pub fn canonical(disc: u64, reduction: Reduction) -> Result<BasisChoice, InvError> {
        let d = match (reduction, disc % reduction.modulus()) {
            (_, 0) => 0,
            (_, 4) => 2,
            (Reduction::H2, 1) => 1,
            _ => return Err(InvError::NotResidue(disc, reduction.modulus())),
        };
        BasisChoice::new(disc, d, reduction)
    }

    /// Fractional part of the rational component of `x`. For square `D`
    /// the generator is an integer and this is the plain fractional part.
    pub fn fr(&self, x: &QuadExpr) -> Rational {
        if exact_sqrt(self.disc).is_some() {
            let r = x.to_rational().expect("square discriminants fold to rationals");
            frac(&r)
        } else {
            fr(x, &self.rho).expect("ρ has an irrational part")
        }
    }
}

/// Displacement of a marked point from the zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Displacement {
    pub name: String,
    pub x: QuadExpr,
    pub y: QuadExpr,
}

/// Displacement of every marked point from the zero in one development of
/// the surface. On a torus the reference is the vertex orbit used by the
/// rectangle model.
pub fn marked_displacements(s: &FlatSurface) -> Result<Vec<Displacement>, InvError> {
    let topo = s.topology()?;
    let cones = topo.cone_orbits();
    if cones.len() > 1 {
        return Err(InvError::MultipleZeros(cones.len()));
    }
    let origin = cones.first().copied().unwrap_or(0);
    let dev = topo.development();
    let (r0, x0, y0) = topo.orbit_rep(origin);
    let ox = &dev[r0].0 + &x0;
    let oy = &dev[r0].1 + &y0;
    Ok(s.marked
        .iter()
        .map(|m| Displacement {
            name: m.name.clone(),
            x: &(&dev[m.rect].0 + &m.x) - &ox,
            y: &(&dev[m.rect].1 + &m.y) - &oy,
        })
        .collect())
}

/// Fractional parts of each marked point's displacement.
pub fn displacement_fr(s: &FlatSurface, basis: &BasisChoice) -> Result<Vec<(String, Rational, Rational)>, InvError> {
    check_basis(s, basis)?;
    Ok(marked_displacements(s)?
        .into_iter()
        .map(|v| {
            let (fx, fy) = (basis.fr(&v.x), basis.fr(&v.y));
            (v.name, fx, fy)
        })
        .collect())
}

fn check_basis(s: &FlatSurface, basis: &BasisChoice) -> Result<(), InvError> {
    if s.d != basis.disc {
        return Err(InvError::InvalidBasis { disc: s.d, d: basis.d, reason: format!("basis is for D = {}", basis.disc) });
    }
    Ok(())
}

fn torsion_types(s: &FlatSurface, basis: &BasisChoice) -> Result<Vec<(String, TorsionType)>, InvError> {
    displacement_fr(s, basis)?
        .into_iter()
        .map(|(name, x, y)| match TorsionType::from_fr(&x, &y) {
            Some(t) => Ok((name, t)),
            None => Err(InvError::NotTwoTorsion { name, x: x.to_string(), y: y.to_string() }),
        })
        .collect()
}

/// Torsion type of every marked point of a genus-two surface.
pub fn torsion_types_h2(s: &FlatSurface, basis: &BasisChoice) -> Result<Vec<(String, TorsionType)>, InvError> {
    if basis.reduction != Reduction::H2 {
        return Err(InvError::InvalidBasis { disc: basis.disc, d: basis.d, reason: "a mod-8 basis is required".into() });
    }
    torsion_types(s, basis)
}

/// Torsion type of every marked point of a Prym surface; the basis must
/// satisfy `D ≡ d² mod 16`.
pub fn torsion_types_prym(s: &FlatSurface, basis: &BasisChoice) -> Result<Vec<(String, TorsionType)>, InvError> {
    if basis.reduction != Reduction::Prym {
        return Err(InvError::InvalidBasis { disc: basis.disc, d: basis.d, reason: "a mod-16 basis is required".into() });
    }
    torsion_types(s, basis)
}

pub fn hlk(s: &FlatSurface, basis: &BasisChoice) -> Result<HlkInvariant, InvError> {
    let types: Vec<TorsionType> = torsion_types_h2(s, basis)?.into_iter().map(|(_, t)| t).collect();
    Ok(HlkInvariant::of(&types))
}

/// Whether `sigma` maps integral points to integral points and induces a
/// bijection of the nonzero types.
pub fn respects_types(sigma: &Perm, types: &[TorsionType]) -> bool {
    let mut image: [Option<TorsionType>; 4] = [None; 4];
    let slot = |t: TorsionType| t as usize;
    for (i, &t) in types.iter().enumerate() {
        let u = types[sigma.apply(i)];
        if (t == TorsionType::I) != (u == TorsionType::I) {
            return false;
        }
        match image[slot(t)] {
            Some(prev) if prev != u => return false,
            _ => image[slot(t)] = Some(u),
        }
    }
    let mut targets: Vec<TorsionType> = image.iter().flatten().copied().collect();
    let n = targets.len();
    targets.sort_unstable();
    targets.dedup();
    targets.len() == n
}

/// All permutations of the marked points compatible with their types.
pub fn upper_bound_group(types: &[TorsionType]) -> Result<PermGroupInfo, InvError> {
    let n = types.len();
    if n > 5 {
        return Err(InvError::TooManyPoints);
    }
    let allowed: Vec<Perm> = symmetric(n).elements.into_iter().filter(|p| respects_types(p, types)).collect();
    Ok(generate(n, &allowed)?)
}

/// The upper bound for `D ≡ 5 mod 8`: the order-10 group generated by the
/// horizontal and vertical twists is maximal among groups whose point-1
/// stabilizer only pairs `{2, 3}` and `{4, 5}`.
pub fn d5_constraint_upper_bound(lower: &PermGroupInfo) -> Result<IsoClass, InvError> {
    if verify_dih5_maximality(lower)? {
        Ok(IsoClass::Dih5)
    } else {
        Err(InvError::Dih5NotMaximal)
    }
}

/// Group predicted for the Prym locus of discriminant `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum PrymParity {
    Sym2Expected,
    Sym3Expected,
}

impl fmt::Display for PrymParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrymParity::Sym2Expected => "Sym2",
            PrymParity::Sym3Expected => "Sym3",
        })
    }
}

/// Whether `E_D(4)` is nonempty: `D ≡ 0 mod 4` or `D ≡ 1 mod 8`, with
/// `D ≥ 17` or `D ∈ {8, 12}`.
pub fn prym_locus_nonempty(disc: u64) -> bool {
    (disc.is_multiple_of(4) || disc % 8 == 1) && (disc >= 17 || disc == 8 || disc == 12)
}

/// `Sym2` exactly when `D` is even and a square modulo 16.
pub fn prym_parity_class(disc: u64) -> Result<PrymParity, InvError> {
    if !prym_locus_nonempty(disc) {
        return Err(InvError::EmptyPrymLocus(disc));
    }
    Ok(if disc.is_multiple_of(16) || disc % 16 == 4 { PrymParity::Sym2Expected } else { PrymParity::Sym3Expected })
}
