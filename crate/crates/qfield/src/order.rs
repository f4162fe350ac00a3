use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::{check_discriminant, exact_sqrt, QError, QuadExpr, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum OrderKind {
    /// The order `O_D` itself.
    Full,
    /// `½·O_D`.
    Half,
    /// `O_{D/4}`, defined when `4 | D`.
    Quarter,
}

/// One of the lattices `O_D`, `½O_D`, `O_{D/4}` inside `Q(√D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderSpec {
    pub kind: OrderKind,
    pub d: u64,
}

impl OrderSpec {
    pub fn new(kind: OrderKind, d: u64) -> Result<Self, QError> {
        check_discriminant(d)?;
        if kind == OrderKind::Quarter && !d.is_multiple_of(4) {
            return Err(QError::Domain(format!("O_(D/4) needs 4 | D, got D = {d}")));
        }
        Ok(OrderSpec { kind, d })
    }

    /// Exact membership test.
    pub fn contains(&self, x: &QuadExpr) -> bool {
        if x.d() != self.d {
            return false;
        }
        match self.kind {
            OrderKind::Full => in_order(x.p(), x.q(), self.d),
            OrderKind::Half => {
                let two = Rational::from_integer(BigInt::from(2));
                in_order(&(x.p() * &two), &(x.q() * &two), self.d)
            }
            OrderKind::Quarter => {
                // p + q√D = p + 2q√(D/4)
                let two = Rational::from_integer(BigInt::from(2));
                in_order(x.p(), &(x.q() * two), self.d / 4)
            }
        }
    }
}

/// Is `p + q√D` of the form `(m + n√D)/2` with `m ≡ nD (mod 2)`?
fn in_order(p: &Rational, q: &Rational, d: u64) -> bool {
    if exact_sqrt(d).is_some() {
        // the order of a square discriminant degenerates to Z inside Q
        return q.is_zero() && p.is_integer();
    }
    let two = Rational::from_integer(BigInt::from(2));
    let m = p * &two;
    let n = q * &two;
    if !m.is_integer() || !n.is_integer() {
        return false;
    }
    let diff = m.to_integer() - n.to_integer() * BigInt::from(d);
    diff.is_even()
}

/// Largest `f ≥ 1` with `f² | D`, restricted to odd `D ≡ 1 (mod 8)`.
pub fn conductor(d: u64) -> Result<u64, QError> {
    if d % 8 != 1 {
        return Err(QError::Domain(format!("conductor is only used for D ≡ 1 mod 8, got {d}")));
    }
    let mut f = 1;
    let mut k = 3;
    while k * k <= d {
        if d.is_multiple_of(k * k) {
            f = k;
        }
        k += 2;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    #[test]
    fn lambda_is_in_the_order() {
        let lam = QuadExpr::new(17, rat(-1, 2), rat(1, 2)).unwrap();
        let o = OrderSpec::new(OrderKind::Full, 17).unwrap();
        assert!(o.contains(&lam));
        assert!(!o.contains(&QuadExpr::from_rational(17, rat(1, 2))));
        assert!(o.contains(&QuadExpr::sqrt_d(17)));
    }

    #[test]
    fn half_and_quarter() {
        let h = OrderSpec::new(OrderKind::Half, 17).unwrap();
        assert!(h.contains(&QuadExpr::from_rational(17, rat(1, 2))));
        assert!(!h.contains(&QuadExpr::from_rational(17, rat(1, 4))));
        let q = OrderSpec::new(OrderKind::Quarter, 20).unwrap();
        // √5 = √20 / 2 lies in O_5
        assert!(q.contains(&QuadExpr::new(20, rat_int(0), rat(1, 2)).unwrap()));
        // (1 + √5)/2 too
        assert!(q.contains(&QuadExpr::new(20, rat(1, 2), rat(1, 4)).unwrap()));
        assert!(OrderSpec::new(OrderKind::Quarter, 17).is_err());
    }

    #[test]
    fn conductor_domain() {
        assert_eq!(conductor(9).unwrap(), 3);
        assert_eq!(conductor(33).unwrap(), 1);
        assert_eq!(conductor(153).unwrap(), 3);
        assert_eq!(conductor(225).unwrap(), 15);
        assert!(conductor(12).is_err());
        assert!(conductor(13).is_err());
    }

    #[test]
    fn zero_is_everywhere() {
        for kind in [OrderKind::Full, OrderKind::Half, OrderKind::Quarter] {
            let o = OrderSpec::new(kind, 32).unwrap();
            assert!(o.contains(&QuadExpr::zero(32)));
        }
        assert!(Rational::zero().is_integer());
    }
}
