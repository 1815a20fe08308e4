use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::poly::{QPoly, ZPoly};
use super::space::{DivisorClass, IntersectionSpace};
use super::LatticeError;

/// Matrix of pairings `classes[i] . classes[j]`.
pub fn gram_matrix(
    space: &IntersectionSpace,
    classes: &[DivisorClass],
) -> Result<Vec<Vec<QPoly>>, LatticeError> {
    let n = classes.len();
    let mut m = vec![vec![QPoly::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let p = space.pair(&classes[i], &classes[j])?;
            m[j][i] = p.clone();
            m[i][j] = p;
        }
    }
    Ok(m)
}

/// Exact determinant. Row denominators are cleared first, the integer
/// matrix goes through cofactor expansion below size 6 and Bareiss above.
/// The empty matrix has determinant 1.
pub fn det_poly(m: &[Vec<QPoly>]) -> Result<QPoly, LatticeError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(LatticeError::NotSquare);
    }
    let mut denom = BigInt::one();
    let mut z: Vec<Vec<ZPoly>> = Vec::with_capacity(n);
    for row in m {
        let d = row
            .iter()
            .map(|p| p.clear_denominators().1)
            .fold(BigInt::one(), num_integer::lcm);
        let scale = BigRational::from_integer(d.clone());
        z.push(
            row.iter()
                .map(|p| p.scale(&scale).as_integral().expect("denominators cleared"))
                .collect(),
        );
        denom *= d;
    }
    let det = if n < 6 { det_cofactor(&z) } else { det_bareiss(&z) };
    Ok(det.to_q().scale(&BigRational::new(BigInt::one(), denom)))
}

/// Laplace expansion along the first row.
pub fn det_cofactor(m: &[Vec<ZPoly>]) -> ZPoly {
    let n = m.len();
    if n == 0 {
        return ZPoly::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = ZPoly::zero();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<ZPoly>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let t = a * &det_cofactor(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// Fraction-free Bareiss elimination over `Z[x]` with row pivoting.
pub fn det_bareiss(m: &[Vec<ZPoly>]) -> ZPoly {
    let n = m.len();
    if n == 0 {
        return ZPoly::one();
    }
    let mut a: Vec<Vec<ZPoly>> = m.to_vec();
    let mut prev = ZPoly::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return ZPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss quotient is exact in an integral domain");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zm(rows: &[&[i64]]) -> Vec<Vec<ZPoly>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| ZPoly::from_i64s(&[v])).collect())
            .collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(det_cofactor(&zm(&[&[1, 0], &[0, 1]])), ZPoly::one());
        assert_eq!(det_poly(&[]).unwrap(), QPoly::one());
        let m = zm(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]]);
        assert_eq!(det_bareiss(&m), det_cofactor(&m));
        assert_eq!(det_cofactor(&m), ZPoly::from_i64s(&[-3]));
    }

    #[test]
    fn polynomial_entries() {
        let x = ZPoly::x();
        let c = |v| ZPoly::from_i64s(&[v]);
        // [[x, 1, 0], [1, x, 1], [0, 1, x]] has det x^3 - 2x
        let m = vec![
            vec![x.clone(), c(1), c(0)],
            vec![c(1), x.clone(), c(1)],
            vec![c(0), c(1), x.clone()],
        ];
        assert_eq!(det_cofactor(&m), ZPoly::from_i64s(&[0, -2, 0, 1]));
        assert_eq!(det_bareiss(&m), det_cofactor(&m));
    }

    #[test]
    fn rational_rows() {
        let h = QPoly::constant(BigRational::new(1.into(), 2.into()));
        let m = vec![vec![h.clone(), QPoly::zero()], vec![QPoly::zero(), QPoly::from_i64s(&[3])]];
        assert_eq!(det_poly(&m).unwrap(), QPoly::constant(BigRational::new(3.into(), 2.into())));
        assert!(matches!(det_poly(&[vec![QPoly::one()], vec![]]), Err(LatticeError::NotSquare)));
    }
}
