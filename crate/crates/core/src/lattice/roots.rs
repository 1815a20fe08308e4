use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::{QPoly, ZPoly};
use super::LatticeError;

/// All rational roots of a polynomial of degree ≤ 2, with multiplicity,
/// ascending.
pub fn rational_roots(p: &QPoly) -> Result<Vec<BigRational>, LatticeError> {
    let (z, _) = p.clear_denominators();
    match z.degree() {
        None => Err(LatticeError::ZeroPolynomial),
        Some(d) if d > 2 => Err(LatticeError::DegreeTooHigh(d)),
        Some(_) => Ok(integer_poly_rational_roots(&z).unwrap_or_default()),
    }
}

/// Rational roots of an integer polynomial of degree ≤ 2; `None` for the
/// zero polynomial or higher degree.
pub(crate) fn integer_poly_rational_roots(p: &ZPoly) -> Option<Vec<BigRational>> {
    let out = match p.degree()? {
        0 => Vec::new(),
        1 => vec![BigRational::new(-p.coeff(0), p.coeff(1))],
        2 => {
            let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
            let disc: BigInt = &b * &b - BigInt::from(4) * &a * &c;
            if disc.is_negative() {
                return Some(Vec::new());
            }
            let s = disc.sqrt();
            if &s * &s != disc {
                return Some(Vec::new());
            }
            let two_a = BigInt::from(2) * &a;
            let mut r = vec![
                BigRational::new(-&b - &s, two_a.clone()),
                BigRational::new(-&b + &s, two_a),
            ];
            r.sort();
            r
        }
        _ => return None,
    };
    Some(out)
}

/// `p(r)` is exactly zero.
pub fn is_root(p: &QPoly, r: &BigRational) -> bool {
    p.eval(r).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn quadratics() {
        let cases = [
            ([576, -272, 32], [q(4, 1), q(9, 2)]),
            ([2304, -544, 32], [q(8, 1), q(9, 1)]),
            ([1920, -496, 32], [q(15, 2), q(8, 1)]),
        ];
        for (c, mut want) in cases {
            want.sort();
            assert_eq!(rational_roots(&QPoly::from_i64s(&c)).unwrap(), want.to_vec());
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(rational_roots(&QPoly::from_i64s(&[0, 1])).unwrap(), vec![q(0, 1)]);
        assert_eq!(rational_roots(&QPoly::from_i64s(&[5])).unwrap(), vec![]);
        assert!(matches!(rational_roots(&QPoly::zero()), Err(LatticeError::ZeroPolynomial)));
        assert!(matches!(
            rational_roots(&QPoly::from_i64s(&[0, 0, 0, 1])),
            Err(LatticeError::DegreeTooHigh(3))
        ));
        // irrational and double roots
        assert_eq!(rational_roots(&QPoly::from_i64s(&[-2, 0, 1])).unwrap(), vec![]);
        assert_eq!(
            rational_roots(&QPoly::from_i64s(&[25, -10, 1])).unwrap(),
            vec![q(5, 1), q(5, 1)]
        );
    }
}
