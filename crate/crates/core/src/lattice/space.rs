use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{QPoly, ZPoly};
use super::LatticeError;

/// One entry of the Gram data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GramEntry {
    /// Integer polynomial of degree ≤ 1 in the space's unknown.
    Known(ZPoly),
    /// Declared but deliberately left unknown; touching it is an error.
    Opaque,
}

/// Formal rational combination of symbols. Zero coefficients never appear.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    coeffs: BTreeMap<String, BigRational>,
}

impl DivisorClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn symbol(name: &str) -> Self {
        Self::term(name, BigRational::one())
    }

    pub fn term(name: &str, c: BigRational) -> Self {
        let mut out = Self::zero();
        out.add_term(name, c);
        out
    }

    pub fn from_ints(terms: &[(&str, i64)]) -> Self {
        let mut out = Self::zero();
        for (s, c) in terms {
            out.add_term(s, BigRational::from_integer(BigInt::from(*c)));
        }
        out
    }

    pub fn add_term(&mut self, name: &str, c: BigRational) {
        let slot = self.coeffs.entry(name.to_string()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(name);
        }
    }

    pub fn coeff(&self, name: &str) -> BigRational {
        self.coeffs.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero();
        if q.is_zero() {
            return out;
        }
        for (s, c) in &self.coeffs {
            out.coeffs.insert(s.clone(), c * q);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(n.into()))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_term(s, c.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale_int(-1))
    }

    /// Renders in the space's symbol order, e.g. `-6K+2F+2G+N0`.
    pub fn render(&self, space: &IntersectionSpace) -> String {
        let mut keys: Vec<&String> = self.coeffs.keys().collect();
        keys.sort_by_key(|k| space.index_of(k).unwrap_or(usize::MAX));
        self.render_keys(&keys)
    }

    fn render_keys(&self, keys: &[&String]) -> String {
        if keys.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, k) in keys.iter().enumerate() {
            let c = &self.coeffs[*k];
            if c.is_negative() {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            let a = c.abs();
            if a.is_integer() {
                if !a.is_one() {
                    let _ = write!(out, "{a}");
                }
            } else {
                let _ = write!(out, "{a}*");
            }
            out.push_str(k);
        }
        out
    }
}

impl std::fmt::Display for DivisorClass {
    /// Alphabetical rendering; use [`DivisorClass::render`] for symbol order.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let keys: Vec<&String> = self.coeffs.keys().collect();
        f.write_str(&self.render_keys(&keys))
    }
}

/// Named symbols with a symmetric pairing that may involve one unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionSpace {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    gram: Vec<Vec<Option<GramEntry>>>,
    unknown: Option<String>,
    rank_bound: Option<usize>,
}

impl IntersectionSpace {
    pub fn new<S: AsRef<str>>(symbols: &[S], rank_bound: Option<usize>) -> Result<Self, LatticeError> {
        if rank_bound == Some(0) {
            return Err(LatticeError::RankBound);
        }
        let mut index = HashMap::new();
        let mut names = Vec::new();
        for s in symbols {
            let s = s.as_ref().to_string();
            if index.insert(s.clone(), names.len()).is_some() {
                return Err(LatticeError::DuplicateSymbol(s));
            }
            names.push(s);
        }
        let n = names.len();
        Ok(Self {
            symbols: names,
            index,
            gram: vec![vec![None; n]; n],
            unknown: None,
            rank_bound,
        })
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn rank_bound(&self) -> Option<usize> {
        self.rank_bound
    }

    pub fn unknown(&self) -> Option<&str> {
        self.unknown.as_deref()
    }

    pub fn has_symbol(&self, s: &str) -> bool {
        self.index.contains_key(s)
    }

    pub fn index_of(&self, s: &str) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn idx(&self, s: &str) -> Result<usize, LatticeError> {
        self.index_of(s).ok_or_else(|| LatticeError::UnknownSymbol(s.to_string()))
    }

    /// Class of a single base symbol, checked against the space.
    pub fn class(&self, s: &str) -> Result<DivisorClass, LatticeError> {
        self.idx(s)?;
        Ok(DivisorClass::symbol(s))
    }

    pub fn set_int(&mut self, a: &str, b: &str, v: i64) -> Result<(), LatticeError> {
        self.set(a, b, GramEntry::Known(ZPoly::from_i64s(&[v])))
    }

    /// Entry `scale*name + offset`; only one unknown name per space.
    pub fn set_unknown(
        &mut self,
        a: &str,
        b: &str,
        name: &str,
        scale: i64,
        offset: i64,
    ) -> Result<(), LatticeError> {
        match &self.unknown {
            Some(u) if u != name => {
                return Err(LatticeError::MixedUnknowns(u.clone(), name.to_string()))
            }
            _ => self.unknown = Some(name.to_string()),
        }
        self.set(a, b, GramEntry::Known(ZPoly::from_i64s(&[offset, scale])))
    }

    pub fn set(&mut self, a: &str, b: &str, e: GramEntry) -> Result<(), LatticeError> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        if let GramEntry::Known(p) = &e {
            if p.degree().unwrap_or(0) > 1 {
                return Err(LatticeError::EntryDegree(a.into(), b.into()));
            }
        }
        self.gram[i][j] = Some(e.clone());
        self.gram[j][i] = Some(e);
        Ok(())
    }

    pub fn entry(&self, a: &str, b: &str) -> Result<&GramEntry, LatticeError> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        self.gram[i][j]
            .as_ref()
            .ok_or_else(|| LatticeError::UndeclaredPairing(a.into(), b.into()))
    }

    /// Pairs whose entry has not been declared, in symbol order.
    pub fn undeclared(&self) -> Vec<(String, String)> {
        let n = self.symbols.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                if self.gram[i][j].is_none() {
                    out.push((self.symbols[i].clone(), self.symbols[j].clone()));
                }
            }
        }
        out
    }

    /// Bilinear expansion of the pairing.
    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Result<QPoly, LatticeError> {
        let mut acc = QPoly::zero();
        for (s, cs) in a.terms() {
            for (t, ct) in b.terms() {
                let p = match self.entry(s, t)? {
                    GramEntry::Known(p) => p,
                    GramEntry::Opaque => {
                        return Err(LatticeError::UnknownPairing(s.clone(), t.clone()))
                    }
                };
                if p.is_zero() {
                    continue;
                }
                acc = &acc + &p.to_q().scale(&(cs * ct));
            }
        }
        Ok(acc)
    }

    /// Pairing that must not depend on the unknown.
    pub fn pair_const(&self, a: &DivisorClass, b: &DivisorClass) -> Result<BigRational, LatticeError> {
        let p = self.pair(a, b)?;
        p.as_constant().ok_or_else(|| {
            LatticeError::UnknownPairing(a.render(self), b.render(self))
        })
    }

    pub fn pair_sym(&self, a: &str, b: &str) -> Result<QPoly, LatticeError> {
        self.pair(&self.class(a)?, &self.class(b)?)
    }

    /// The same space with the unknown replaced by `value`.
    pub fn substitute(&self, value: &BigInt) -> IntersectionSpace {
        let mut out = self.clone();
        for row in out.gram.iter_mut() {
            for e in row.iter_mut() {
                if let Some(GramEntry::Known(p)) = e {
                    *p = ZPoly::constant(p.eval(value));
                }
            }
        }
        out.unknown = None;
        out
    }

    /// Renders a pairing value with the space's unknown name.
    pub fn render_value(&self, p: &QPoly) -> String {
        p.render(self.unknown.as_deref().unwrap_or("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> IntersectionSpace {
        let mut s = IntersectionSpace::new(&["K", "D", "F"], Some(3)).unwrap();
        s.set_int("K", "K", -2).unwrap();
        s.set_int("K", "D", 2).unwrap();
        s.set_int("D", "D", 14).unwrap();
        s.set_int("K", "F", -2).unwrap();
        s.set_int("F", "F", 0).unwrap();
        s.set_unknown("D", "F", "x", 1, 0).unwrap();
        s
    }

    #[test]
    fn pairs_and_unknown() {
        let s = tiny();
        let d = DivisorClass::symbol("D");
        let m1 = DivisorClass::from_ints(&[("K", 1), ("D", 1)]);
        assert_eq!(s.pair(&d, &d).unwrap(), QPoly::from_i64s(&[14]));
        assert_eq!(s.pair(&DivisorClass::symbol("K"), &m1).unwrap(), QPoly::zero());
        assert_eq!(s.pair(&d, &DivisorClass::symbol("F")).unwrap(), QPoly::from_i64s(&[0, 1]));
        assert_eq!(s.pair(&d, &DivisorClass::zero()).unwrap(), QPoly::zero());
        let t = s.substitute(&BigInt::from(8));
        assert_eq!(t.pair_sym("D", "F").unwrap(), QPoly::from_i64s(&[8]));
        assert_eq!(t.unknown(), None);
    }

    #[test]
    fn errors() {
        let mut s = IntersectionSpace::new(&["A", "B"], None).unwrap();
        s.set_int("A", "A", 1).unwrap();
        assert!(matches!(s.pair_sym("A", "B"), Err(LatticeError::UndeclaredPairing(..))));
        s.set_unknown("A", "B", "x", 1, 0).unwrap();
        assert!(matches!(
            s.set_unknown("B", "B", "y", 1, 0),
            Err(LatticeError::MixedUnknowns(..))
        ));
        s.set("B", "B", GramEntry::Opaque).unwrap();
        assert!(matches!(s.pair_sym("B", "B"), Err(LatticeError::UnknownPairing(..))));
        assert!(matches!(IntersectionSpace::new(&["A", "A"], None), Err(LatticeError::DuplicateSymbol(_))));
        assert!(matches!(IntersectionSpace::new(&["A"], Some(0)), Err(LatticeError::RankBound)));
    }

    #[test]
    fn class_rendering() {
        let s = tiny();
        let c = DivisorClass::from_ints(&[("F", 2), ("K", -6)]);
        assert_eq!(c.render(&s), "-6K+2F");
        let h = DivisorClass::term("D", BigRational::new(1.into(), 2.into()));
        assert_eq!(h.render(&s), "1/2*D");
        assert_eq!(c.minus(&c).render(&s), "0");
    }
}
