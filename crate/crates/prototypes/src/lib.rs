//! Splitting prototypes `(a, b, c, e)`.
//!
//! Genus two uses `D = e² + 4bc`, the Prym locus in genus three uses
//! `D = e² + 8bc`. Reduced prototypes have `a = 0`, `c = 1` and are
//! determined by `e`.

use std::fmt;

use num_integer::Integer;
use qfield::{conductor, rat, QuadExpr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtoError {
    #[error("prototype ({a},{b},{c},{e}) violates {rule}")]
    Constraint { a: i64, b: i64, c: i64, e: i64, rule: &'static str },
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct H2Prototype {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub e: i64,
    pub d: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct PrymPrototype {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub e: i64,
    pub d: u64,
}

/// Which of the two Prym prototype models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Model {
    Plus,
    Minus,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Plus => "A+",
            Model::Minus => "A-",
        })
    }
}

/// Spin parity; `None` when the locus is irreducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct SpinClass {
    pub value: Option<u8>,
}

impl fmt::Display for SpinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "spin {v}"),
            None => write!(f, "unique"),
        }
    }
}

/// Component label of a Prym prototype surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum PrymComponentLabel {
    /// Even discriminant: a single component.
    Unique,
    /// Odd discriminant: the residue mod 4 of `e` for the `A+` model.
    Residue(u8),
}

impl fmt::Display for PrymComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrymComponentLabel::Unique => write!(f, "unique"),
            PrymComponentLabel::Residue(r) => write!(f, "A+ e≡{r} mod 4"),
        }
    }
}

fn gcd4(a: i64, b: i64, c: i64, e: i64) -> i64 {
    a.gcd(&b).gcd(&c).gcd(&e)
}

fn check_common(a: i64, b: i64, c: i64, e: i64) -> Result<(), ProtoError> {
    let err = |rule| Err(ProtoError::Constraint { a, b, c, e, rule });
    if b <= 0 {
        return err("0 < b");
    }
    if c <= 0 {
        return err("0 < c");
    }
    if a < 0 || a >= b.gcd(&c) {
        return err("0 <= a < gcd(b,c)");
    }
    if gcd4(a, b, c, e) != 1 {
        return err("gcd(a,b,c,e) = 1");
    }
    Ok(())
}

pub fn validate_h2(a: i64, b: i64, c: i64, e: i64) -> Result<H2Prototype, ProtoError> {
    check_common(a, b, c, e)?;
    if c + e >= b {
        return Err(ProtoError::Constraint { a, b, c, e, rule: "c + e < b" });
    }
    let d = (e * e + 4 * b * c) as u64;
    Ok(H2Prototype { a, b, c, e, d })
}

pub fn validate_prym(a: i64, b: i64, c: i64, e: i64) -> Result<PrymPrototype, ProtoError> {
    check_common(a, b, c, e)?;
    if 2 * c + e >= b {
        return Err(ProtoError::Constraint { a, b, c, e, rule: "2c + e < b" });
    }
    let d = (e * e + 8 * b * c) as u64;
    Ok(PrymPrototype { a, b, c, e, d })
}

fn check_disc(d: i64, min: i64) -> Result<(), ProtoError> {
    if d < min || d.rem_euclid(4) > 1 {
        return Err(ProtoError::InvalidDiscriminant(d));
    }
    Ok(())
}

/// Candidate values of `e` with `e ≡ D (mod 2)` and `e² < D`, ascending.
fn e_range(d: i64) -> impl Iterator<Item = i64> {
    let r = (d as f64).sqrt() as i64 + 1;
    (-r..=r).filter(move |e| (e - d).rem_euclid(2) == 0 && e * e < d)
}

/// All genus-two splitting prototypes of discriminant `d`, by `e`, `b`, `c`, `a`.
pub fn enumerate_h2(d: i64) -> Result<Vec<H2Prototype>, ProtoError> {
    check_disc(d, 5).or_else(|e| if d == 4 { Ok(()) } else { Err(e) })?;
    let mut out = Vec::new();
    for e in e_range(d) {
        let bc = (d - e * e) / 4;
        for b in 1..=bc {
            if bc % b != 0 {
                continue;
            }
            let c = bc / b;
            for a in 0..b.gcd(&c) {
                if let Ok(p) = validate_h2(a, b, c, e) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// All Prym splitting prototypes of discriminant `d`, by `e`, `b`, `c`, `a`.
pub fn enumerate_prym(d: i64) -> Result<Vec<PrymPrototype>, ProtoError> {
    check_disc(d, 8)?;
    let mut out = Vec::new();
    for e in e_range(d) {
        if (d - e * e) % 8 != 0 {
            continue;
        }
        let bc = (d - e * e) / 8;
        for b in 1..=bc {
            if bc % b != 0 {
                continue;
            }
            let c = bc / b;
            for a in 0..b.gcd(&c) {
                if let Ok(p) = validate_prym(a, b, c, e) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// `R_D`: values of `e` for reduced genus-two prototypes.
pub fn reduced_h2(d: i64) -> Result<Vec<i64>, ProtoError> {
    check_disc(d, 5)?;
    Ok(r_set(d))
}

/// The defining formula of `R_n` without the discriminant check; used for
/// `n = D/4`, which need not be a discriminant.
pub fn r_set(n: i64) -> Vec<i64> {
    e_range(n).filter(|e| (e + 2) * (e + 2) < n).collect()
}

/// `S_D`: values of `e` for reduced Prym prototypes.
pub fn reduced_prym(d: i64) -> Result<Vec<i64>, ProtoError> {
    check_disc(d, 8)?;
    Ok(e_range(d)
        .filter(|e| (e * e - d).rem_euclid(8) == 0 && (e + 4) * (e + 4) < d)
        .collect())
}

/// The reduced prototype `(0, (D−e²)/4, 1, e)`.
pub fn reduced_h2_prototype(e: i64, d: i64) -> Result<H2Prototype, ProtoError> {
    if !reduced_h2(d)?.contains(&e) {
        return Err(ProtoError::Domain(format!("{e} is not in R_{d}")));
    }
    validate_h2(0, (d - e * e) / 4, 1, e)
}

/// The reduced prototype `(0, (D−e²)/8, 1, e)`.
pub fn reduced_prym_prototype(e: i64, d: i64) -> Result<PrymPrototype, ProtoError> {
    if !reduced_prym(d)?.contains(&e) {
        return Err(ProtoError::Domain(format!("{e} is not in S_{d}")));
    }
    validate_prym(0, (d - e * e) / 8, 1, e)
}

/// Whether the genus-two locus of discriminant `d` splits by spin.
pub fn has_spin(d: i64) -> bool {
    d > 9 && d.rem_euclid(8) == 1
}

/// Spin parity `(e−f)/2 + (c+1)(a+b+ab) mod 2`, `f` the conductor.
pub fn spin(p: &H2Prototype) -> Result<u8, ProtoError> {
    if !has_spin(p.d as i64) {
        return Err(ProtoError::Domain(format!("spin is defined for D ≡ 1 mod 8, D > 9; got {}", p.d)));
    }
    let f = conductor(p.d).map_err(|e| ProtoError::Domain(e.to_string()))? as i64;
    let v = (p.e - f) / 2 + (p.c + 1) * (p.a + p.b + p.a * p.b);
    Ok(v.rem_euclid(2) as u8)
}

/// Spin class of the component containing `p`.
pub fn spin_class(p: &H2Prototype) -> SpinClass {
    SpinClass { value: spin(p).ok() }
}

/// Canonical component label, normalized to the `A+` model.
pub fn prym_component(model: Model, e: i64, d: i64) -> Result<PrymComponentLabel, ProtoError> {
    if !reduced_prym(d)?.contains(&e) {
        return Err(ProtoError::Domain(format!("{e} is not in S_{d}")));
    }
    if d % 2 == 0 {
        return Ok(PrymComponentLabel::Unique);
    }
    let r = match model {
        Model::Plus => e.rem_euclid(4),
        Model::Minus => (-e).rem_euclid(4),
    };
    Ok(PrymComponentLabel::Residue(r as u8))
}

/// `λ = (e + √D)/2`.
pub fn lambda_of(e: i64, d: i64) -> Result<QuadExpr, ProtoError> {
    if (e - d).rem_euclid(2) != 0 {
        return Err(ProtoError::Domain(format!("e = {e} and D = {d} have different parity")));
    }
    QuadExpr::new(d as u64, rat(e, 2), rat(1, 2)).map_err(|err| ProtoError::Domain(err.to_string()))
}

/// Prototypes `(a, 4k+2, 2, e)` with `a ∈ {0, 1}`, `e ∈ {−1, −3, −5, −7}`
/// of discriminant `d`: their horizontal moduli ratio `2k+1` is odd over
/// odd, and the two values of `a` have opposite spins.
pub fn odd_ratio_family(d: i64) -> Vec<H2Prototype> {
    let mut out = Vec::new();
    for e in [-7i64, -5, -3, -1] {
        let rest = d - e * e - 16;
        if rest < 0 || rest % 32 != 0 {
            continue;
        }
        let k = rest / 32;
        for a in 0..2 {
            if let Ok(p) = validate_h2(a, 4 * k + 2, 2, e) {
                out.push(p);
            }
        }
    }
    out
}

impl fmt::Display for H2Prototype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({},{},{},{})", self.a, self.b, self.c, self.e)
    }
}

impl fmt::Display for PrymPrototype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.e)
    }
}
