//! Dense univariate polynomials with exact coefficients.
//!
//! Gram entries and determinants live in `ZPoly` (integer coefficients);
//! pairings of classes with rational coefficients live in `QPoly`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial in a single unknown, coefficients in ascending degree.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector and equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

pub type ZPoly = UniPoly<BigInt>;
pub type QPoly = UniPoly<BigRational>;

impl<T> UniPoly<T>
where
    T: Clone + Zero + One + PartialEq,
{
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    /// `a*x + b`.
    pub fn linear(a: T, b: T) -> Self {
        Self::new(vec![b, a])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// The value if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<T> {
        match self.coeffs.len() {
            0 => Some(T::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &T) -> Self
    where
        for<'a> &'a T: Mul<&'a T, Output = T>,
    {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, at: &T) -> T
    where
        for<'a> &'a T: Mul<&'a T, Output = T>,
        for<'a> &'a T: Add<&'a T, Output = T>,
    {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * at) + c;
        }
        acc
    }
}

impl<'a, T> Add<&'a UniPoly<T>> for &'a UniPoly<T>
where
    T: Clone + Zero + One + PartialEq,
    for<'b> &'b T: Add<&'b T, Output = T>,
{
    type Output = UniPoly<T>;

    fn add(self, rhs: &'a UniPoly<T>) -> UniPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let out = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => T::zero(),
            })
            .collect();
        UniPoly::new(out)
    }
}

impl<'a, T> Sub<&'a UniPoly<T>> for &'a UniPoly<T>
where
    T: Clone + Zero + One + PartialEq,
    for<'b> &'b T: Sub<&'b T, Output = T>,
{
    type Output = UniPoly<T>;

    fn sub(self, rhs: &'a UniPoly<T>) -> UniPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = T::zero();
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = rhs.coeffs.get(i).unwrap_or(&zero);
                a - b
            })
            .collect();
        UniPoly::new(out)
    }
}

impl<'a, T> Mul<&'a UniPoly<T>> for &'a UniPoly<T>
where
    T: Clone + Zero + One + PartialEq,
    for<'b> &'b T: Mul<&'b T, Output = T>,
    for<'b> &'b T: Add<&'b T, Output = T>,
{
    type Output = UniPoly<T>;

    fn mul(self, rhs: &'a UniPoly<T>) -> UniPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(out)
    }
}

impl<T> Neg for &UniPoly<T>
where
    T: Clone + Zero + One + PartialEq,
    for<'b> &'b T: Neg<Output = T>,
{
    type Output = UniPoly<T>;

    fn neg(self) -> UniPoly<T> {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T> $tr<UniPoly<T>> for UniPoly<T>
        where
            T: Clone + Zero + One + PartialEq,
            for<'a> &'a UniPoly<T>: $tr<&'a UniPoly<T>, Output = UniPoly<T>>,
        {
            type Output = UniPoly<T>;
            fn $m(self, rhs: UniPoly<T>) -> UniPoly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl ZPoly {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn to_q(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Non-negative gcd of all coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder in `Z[x]`.
    pub fn div_exact(&self, divisor: &ZPoly) -> Option<ZPoly> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        let lead = divisor.leading()?.clone();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n < dd + 1 {
            return None;
        }
        let mut quot = vec![BigInt::zero(); n - dd];
        for i in (0..n - dd).rev() {
            let top = rem[i + dd].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * d;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(ZPoly::new(quot))
    }
}

impl QPoly {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        ZPoly::from_i64s(coeffs).to_q()
    }

    /// Returns `(p, d)` with `self = p / d`, `p` integral and `d > 0` the lcm
    /// of the coefficient denominators.
    pub fn clear_denominators(&self) -> (ZPoly, BigInt) {
        let d = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let p = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        (ZPoly::new(p), d)
    }

    pub fn as_integral(&self) -> Option<ZPoly> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(ZPoly::new(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Renders with the given unknown name, e.g. `32x^2 - 272x + 576`.
    pub fn render(&self, var: &str) -> String {
        render_terms(
            self.coeffs.iter().map(|c| (c.is_negative(), c.abs().to_string(), c.abs().is_one())),
            var,
        )
    }

    /// Factored rendering over `Q`: integer content, linear factors for the
    /// rational roots, and any irreducible remainder. `2^12*(x-8)`.
    pub fn render_factored(&self, var: &str) -> String {
        let (p, _) = self.clear_denominators();
        if p.degree().unwrap_or(0) == 0 {
            return self.render(var);
        }
        let mut rest = p.clone();
        let mut factors: Vec<String> = Vec::new();
        // rational roots r = num/den become primitive factors (den*x - num),
        // smallest |r| first
        let mut roots = super::roots::integer_poly_rational_roots(&rest).unwrap_or_default();
        roots.sort_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)));
        for r in roots {
            let lin = ZPoly::new(vec![-r.numer().clone(), r.denom().clone()]);
            if let Some(q) = rest.div_exact(&lin) {
                factors.push(format!("({})", lin.to_q().render(var).replace(' ', "")));
                rest = q;
            }
        }
        let content = rest.content();
        let sign_neg = rest.leading().is_some_and(|l| l.is_negative());
        let mut unit = content.clone();
        if sign_neg {
            unit = -unit;
        }
        if rest.degree().unwrap_or(0) > 0 {
            let prim = rest.div_exact(&ZPoly::new(vec![unit.clone()])).unwrap_or(rest.clone());
            factors.push(format!("({})", prim.to_q().render(var).replace(' ', "")));
        }
        // rational scale from clearing denominators
        let (_, den) = self.clear_denominators();
        let scale = BigRational::new(unit, den);
        let mut head = render_scalar(&scale);
        if factors.is_empty() {
            return head;
        }
        let body = factors.join("*");
        if scale.is_one() {
            return body;
        }
        if (-scale.clone()).is_one() {
            return format!("-{body}");
        }
        head.push('*');
        head + &body
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_q().render("x"))
    }
}

/// Powers of two from 2^8 upward are written as `2^k`; everything else in
/// lowest terms.
fn render_scalar(q: &BigRational) -> String {
    if q.is_integer() {
        let n = q.to_integer();
        let a = n.abs();
        if a >= BigInt::from(256) && (&a & (&a - BigInt::one())).is_zero() {
            let k = a.bits() - 1;
            return if n.is_negative() { format!("-2^{k}") } else { format!("2^{k}") };
        }
        return n.to_string();
    }
    q.to_string()
}

fn render_terms<I>(terms: I, var: &str) -> String
where
    I: Iterator<Item = (bool, String, bool)>,
{
    let terms: Vec<_> = terms.collect();
    let mut out = String::new();
    for (i, (neg, mag, is_one)) in terms.iter().enumerate().rev() {
        if mag == "0" {
            continue;
        }
        if out.is_empty() {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if i == 0 || !is_one {
            out.push_str(mag);
        }
        out.push_str(&mono);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
