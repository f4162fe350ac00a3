//! Horizontal and vertical twist permutations predicted from prototype
//! parameters alone, by the parity of the moduli ratios.

use groups::Perm;
use prototypes::{reduced_h2_prototype, reduced_prym_prototype, Model};

use crate::HarnessError;

fn perm(s: &str, n: usize) -> Perm {
    Perm::parse(s, n).expect("fixed notation")
}

fn domain(e: prototypes::ProtoError) -> HarnessError {
    HarnessError::Input(e.to_string())
}

/// `(τ_h, τ_v)` on `P_D(e)`: the horizontal ratio is `b`, the vertical
/// ratio is `b − e − 1`; an odd ratio adds the second transposition.
pub fn h2_twist_prediction(e: i64, d: i64) -> Result<(Perm, Perm), HarnessError> {
    let p = reduced_h2_prototype(e, d).map_err(domain)?;
    let rv = p.b - e - 1;
    let h = if p.b % 2 == 0 { perm("(1 2)", 5) } else { perm("(1 2)(3 5)", 5) };
    let v = if rv % 2 == 0 { perm("(1 3)", 5) } else { perm("(1 3)(2 4)", 5) };
    Ok((h, v))
}

/// `(τ_h, τ_v)` on `A±_D(e)`. With `b = (D − e²)/8` and `r = b − e − 2`:
/// on `A+` the horizontal twist is `(1 2)` for odd `b` and trivial
/// otherwise, the vertical twist is `(1 3)`; on `A−` the horizontal twist
/// is `(1 2)`, the vertical twist is `(1 3)` for odd `r` and trivial
/// otherwise.
pub fn prym_twist_prediction(model: Model, e: i64, d: i64) -> Result<(Perm, Perm), HarnessError> {
    let p = reduced_prym_prototype(e, d).map_err(domain)?;
    let r = p.b - e - 2;
    let id = Perm::identity(3);
    Ok(match model {
        Model::Plus => (if p.b % 2 == 1 { perm("(1 2)", 3) } else { id }, perm("(1 3)", 3)),
        Model::Minus => (perm("(1 2)", 3), if r % 2 == 1 { perm("(1 3)", 3) } else { id }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        // P_13(-1): b = 3, r_v = 3
        let (h, v) = h2_twist_prediction(-1, 13).unwrap();
        assert_eq!(h, perm("(1 2)(3 5)", 5));
        assert_eq!(v, perm("(1 3)(2 4)", 5));
        // A+_17(-3): b = 1
        let (h, _) = prym_twist_prediction(Model::Plus, -3, 17).unwrap();
        assert_eq!(h, perm("(1 2)", 3));
        // A+_20(-2): b = 2
        let (h, _) = prym_twist_prediction(Model::Plus, -2, 20).unwrap();
        assert!(h.is_identity());
        assert!(h2_twist_prediction(0, 13).is_err());
    }
}
