//! Closed-form surface formulas: adjunction, Riemann–Roch, arithmetic
//! genus, the `M_j = jK + D` table, covering parity and Riemann–Hurwitz.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("{0} is not even")]
    IntegralityViolation(String),
    #[error("empty component list")]
    EmptyList,
    #[error("invalid ramification data: {0}")]
    InvalidProfile(String),
    #[error("inconsistent invariants: {0}")]
    Inconsistent(String),
}

/// Numerical invariants of the resolved quotient, with `D = 2K + B0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceInvariants {
    pub k: i64,
    #[serde(rename = "KK")]
    pub kk: i64,
    #[serde(rename = "KD")]
    pub kd: i64,
    #[serde(rename = "DD")]
    pub dd: i64,
    #[serde(rename = "KB")]
    pub kb: i64,
    #[serde(rename = "BB")]
    pub bb: i64,
    #[serde(rename = "chiO")]
    pub chi_o: i64,
    pub rho: i64,
}

impl SurfaceInvariants {
    /// Fills in `KD` and `DD` from `D = 2K + B0`.
    pub fn from_branch(k: i64, kk: i64, kb: i64, bb: i64, chi_o: i64, rho: i64) -> Self {
        Self {
            k,
            kk,
            kd: 2 * kk + kb,
            dd: 4 * kk + 4 * kb + bb,
            kb,
            bb,
            chi_o,
            rho,
        }
    }

    pub fn check(&self) -> Result<(), SurfaceError> {
        if self.dd != 4 * self.kk + 4 * self.kb + self.bb {
            return Err(SurfaceError::Inconsistent(format!(
                "DD = {} but 4KK+4KB+BB = {}",
                self.dd,
                4 * self.kk + 4 * self.kb + self.bb
            )));
        }
        if self.kd != 2 * self.kk + self.kb {
            return Err(SurfaceError::Inconsistent(format!(
                "KD = {} but 2KK+KB = {}",
                self.kd,
                2 * self.kk + self.kb
            )));
        }
        if self.rho < 1 {
            return Err(SurfaceError::Inconsistent("rho must be positive".into()));
        }
        Ok(())
    }

    pub fn pa(&self) -> Result<i64, SurfaceError> {
        pa_branch(self.bb, self.kb)
    }
}

fn half_even(n: i64, what: &str) -> Result<i64, SurfaceError> {
    if n.is_odd() {
        return Err(SurfaceError::IntegralityViolation(format!("{what} = {n}")));
    }
    Ok(n / 2)
}

/// `(K.C + C²)/2 + 1`.
pub fn adjunction_genus(kc: i64, cc: i64) -> BigRational {
    BigRational::new(BigInt::from(kc + cc), BigInt::from(2)) + BigRational::from_integer(1.into())
}

/// `K.C` of a smooth curve of genus `g` with `C² = ss`.
pub fn canonical_degree(g: i64, ss: i64) -> i64 {
    2 * g - 2 - ss
}

/// `χ(O) + (D² − K.D)/2`.
pub fn riemann_roch_chi(chi_o: i64, dd: i64, kd: i64) -> Result<i64, SurfaceError> {
    Ok(chi_o + half_even(dd - kd, "D^2 - K.D")?)
}

/// `(K.M_j, D.M_j, M_j²)`.
pub fn mj_invariants(j: i64, inv: &SurfaceInvariants) -> (i64, i64, i64) {
    (
        j * inv.kk + inv.kd,
        j * inv.kd + inv.dd,
        j * j * inv.kk + 2 * j * inv.kd + inv.dd,
    )
}

/// `p_a(B0) = (B0² + K.B0)/2 + 1`.
pub fn pa_branch(bb: i64, kb: i64) -> Result<i64, SurfaceError> {
    Ok(half_even(bb + kb, "B0^2 + K.B0")? + 1)
}

/// Arithmetic genus of a disjoint union of smooth curves.
pub fn genus_additivity(genera: &[i64]) -> Result<i64, SurfaceError> {
    if genera.is_empty() {
        return Err(SurfaceError::EmptyList);
    }
    Ok(genera.iter().sum::<i64>() - (genera.len() as i64 - 1))
}

/// Pairing of an integral class with `B0 + ΣN_i` must be even.
pub fn parity_check(cb: i64, cn: &[i64]) -> Certificate {
    let total = cb + cn.iter().sum::<i64>();
    let mut c = Certificate::new("parity", "double-cover/parity");
    c.premise("C.B0", cb);
    let cn_txt: Vec<String> = cn.iter().map(|v| v.to_string()).collect();
    c.premise("C.N_i", format!("[{}]", cn_txt.join(",")));
    c.premise("C.(B0+sum N_i)", total);
    if total % 2 == 0 {
        c.conclude(format!("{total} is even"), Verdict::Satisfied)
    } else {
        c.conclude(format!("{total} is odd"), Verdict::Violation)
    }
}

/// Degree of a map to the line plus lower bounds for ramification over
/// selected points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamificationProfile {
    degree: i64,
    contributions: Vec<BigRational>,
}

impl RamificationProfile {
    pub fn new(degree: i64, contributions: Vec<BigRational>) -> Result<Self, SurfaceError> {
        if degree < 1 {
            return Err(SurfaceError::InvalidProfile(format!("degree {degree}")));
        }
        if contributions.iter().any(|c| c.is_negative()) {
            return Err(SurfaceError::InvalidProfile("negative contribution".into()));
        }
        Ok(Self { degree, contributions })
    }

    /// `count` equal contributions.
    pub fn uniform(degree: i64, count: usize, each: BigRational) -> Result<Self, SurfaceError> {
        Self::new(degree, vec![each; count])
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn total(&self) -> BigRational {
        self.contributions.iter().fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Least `g ≥ 0` with `2g − 2 ≥ −2·degree + Σ contributions`.
pub fn rh_min_genus(profile: &RamificationProfile) -> i64 {
    let rhs = BigRational::from_integer(BigInt::from(2 - 2 * profile.degree)) + profile.total();
    let g = (rhs / BigRational::from_integer(2.into())).ceil().to_integer();
    let g: i64 = g.try_into().expect("genus bound fits in i64");
    g.max(0)
}

/// Riemann–Hurwitz for a degree-`degree` map from a curve of arithmetic
/// genus `pa`; fails when the ramification already exceeds what `pa` allows.
pub fn rh_exclusion(pa: i64, degree: i64, ram_total: &BigRational) -> Certificate {
    let lhs = BigRational::from_integer(BigInt::from(2 * pa - 2));
    let rhs = BigRational::from_integer(BigInt::from(-2 * degree)) + ram_total;
    let mut c = Certificate::new("rh_exclusion", "riemann-hurwitz/exclusion");
    c.premise("p_a", pa);
    c.premise("degree", degree);
    c.premise("ramification lower bound", ram_total);
    c.premise("2p_a-2", &lhs);
    c.premise("-2*degree+ramification", &rhs);
    if lhs < rhs {
        c.conclude(format!("{lhs} >= {rhs} fails"), Verdict::Violation)
    } else {
        c.conclude(format!("{lhs} >= {rhs}"), Verdict::Satisfied)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn k9() -> SurfaceInvariants {
        SurfaceInvariants::from_branch(9, -2, 6, -2, 1, 12)
    }

    #[test]
    fn adjunction_examples() {
        assert_eq!(adjunction_genus(-1, -1), q(0));
        assert_eq!(adjunction_genus(0, -2), q(0));
        assert_eq!(adjunction_genus(4, 0), q(3));
    }

    #[test]
    fn riemann_roch_examples() {
        assert_eq!(riemann_roch_chi(1, 16, 0), Ok(9));
        assert_eq!(riemann_roch_chi(1, -2, -6), Ok(3));
        assert_eq!(riemann_roch_chi(1, -2, -8), Ok(4));
        assert_eq!(riemann_roch_chi(1, 0, 0), Ok(1));
        assert!(riemann_roch_chi(1, 1, 0).is_err());
    }

    #[test]
    fn mj_examples() {
        let k9 = k9();
        assert_eq!((k9.kd, k9.dd), (2, 14));
        assert_eq!(mj_invariants(4, &k9), (-6, 22, -2));
        let k11 = SurfaceInvariants::from_branch(11, -4, 8, -2, 1, 14);
        assert_eq!(mj_invariants(2, &k11), (-8, 14, -2));
        assert_eq!(mj_invariants(0, &k11), (k11.kd, k11.dd, k11.dd));
        for j in 1..=4 {
            assert_eq!(mj_invariants(j, &k9), (-2 * j + 2, 2 * j + 14, -2 * j * j + 4 * j + 14));
        }
    }

    #[test]
    fn genus_examples() {
        assert_eq!(pa_branch(-2, 8), Ok(4));
        assert_eq!(pa_branch(-2, 6), Ok(3));
        assert_eq!(pa_branch(-2, 0), Ok(0));
        assert!(pa_branch(-1, 0).is_err());
        assert_eq!(genus_additivity(&[3, 2]), Ok(4));
        assert_eq!(genus_additivity(&[2, 2, 1]), Ok(3));
        assert_eq!(genus_additivity(&[7]), Ok(7));
        assert_eq!(genus_additivity(&[]), Err(SurfaceError::EmptyList));
    }

    #[test]
    fn parity_examples() {
        let mut cn = vec![0; 11];
        cn[0] = 1;
        assert_eq!(parity_check(3, &cn).verdict, Verdict::Satisfied);
        assert_eq!(parity_check(5, &cn[..9]).verdict, Verdict::Satisfied);
        assert_eq!(parity_check(1, &[]).verdict, Verdict::Violation);
    }

    #[test]
    fn riemann_hurwitz_examples() {
        let p = RamificationProfile::uniform(4, 4, q(2)).unwrap();
        assert_eq!(rh_min_genus(&p), 1);
        let p = RamificationProfile::uniform(2, 5, q(1)).unwrap();
        assert_eq!(rh_min_genus(&p), 2);
        let p = RamificationProfile::new(1, vec![]).unwrap();
        assert_eq!(rh_min_genus(&p), 0);
        assert!(RamificationProfile::new(0, vec![]).is_err());
        assert!(RamificationProfile::new(1, vec![q(-1)]).is_err());

        assert_eq!(rh_exclusion(3, 12, &q(29)).verdict, Verdict::Violation);
        assert_eq!(rh_exclusion(4, 8, &q(23)).verdict, Verdict::Violation);
        assert_eq!(rh_exclusion(4, 8, &q(22)).verdict, Verdict::Satisfied);
    }

    #[test]
    fn invariant_consistency() {
        assert!(k9().check().is_ok());
        let mut bad = k9();
        bad.dd = 15;
        assert!(bad.check().is_err());
    }
}
