//! Exact univariate polynomials and rational functions over big rationals.
//!
//! The indeterminate is the symbolic permutation size `N`. Rational
//! functions are kept in canonical form (coprime numerator/denominator,
//! monic denominator) so that equality is structural and the degree, the
//! quantity every decay bound is checked against, is well defined.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{rat_int, Rat};

/// Largest list length accepted by [`alternating_product`]; the product
/// has `2^len` factors.
pub const MAX_ALTERNATING_LEN: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatFunError {
    /// Division by the zero rational function.
    DivisionByZero,
    /// Evaluation at a pole.
    Pole(Rat),
    /// Alternating product over too long a list.
    ListTooLong(usize),
}

impl fmt::Display for RatFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatFunError::DivisionByZero => write!(f, "division by zero rational function"),
            RatFunError::Pole(x) => write!(f, "pole at {x}"),
            RatFunError::ListTooLong(l) => {
                write!(f, "alternating product over {l} terms exceeds {MAX_ALTERNATING_LEN}")
            }
        }
    }
}

/// Degree with a distinguished minus-infinity for the zero function, which
/// compares below every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInf,
    Finite(i64),
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Polynomial with exact rational coefficients, ascending by degree. The
/// zero polynomial has no coefficients; otherwise the leading coefficient
/// is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(alloc::vec![c])
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Poly::from_coeffs(alloc::vec![Rat::zero(), Rat::one()])
    }

    /// `c0 + c1 * N`.
    pub fn linear(c0: Rat, c1: Rat) -> Self {
        Poly::from_coeffs(alloc::vec![c0, c1])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        if self.is_zero() {
            Degree::NegInf
        } else {
            Degree::Finite(self.coeffs.len() as i64 - 1)
        }
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Monic multiple of self (zero stays zero).
    fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&(Rat::one() / l)),
        }
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len();
        if self.coeffs.len() < dd {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = alloc::vec![Rat::zero(); self.coeffs.len() - dd + 1];
        let lead = divisor.leading().unwrap().clone();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd - 1] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let t = b * &c;
                rem[k + j] = &rem[k + j] - t;
            }
            quot[k] = c;
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor over the rational field.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero);
            let b = rhs.coeffs.get(k).cloned().unwrap_or_else(Rat::zero);
            out.push(a + b);
        }
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = alloc::vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        if self.is_zero() {
            write!(f, "0")?;
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Rational function in canonical form: coprime numerator and denominator,
/// monic denominator. The degree of the zero function is minus infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        Ok(RatFun::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFun {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() > Degree::Finite(0) {
            (num.divrem(&g).0, den.divrem(&g).0)
        } else {
            (num, den)
        };
        let lead = den.leading().unwrap().clone();
        let inv = Rat::one() / lead;
        RatFun {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RatFun {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFun {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFun {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    /// The indeterminate `N`.
    pub fn x() -> Self {
        RatFun::from_poly(Poly::x())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero_fn(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg(num) - deg(den)`; minus infinity for the zero function.
    pub fn degree(&self) -> Degree {
        match self.num.degree() {
            Degree::NegInf => Degree::NegInf,
            Degree::Finite(dn) => match self.den.degree() {
                Degree::Finite(dd) => Degree::Finite(dn - dd),
                Degree::NegInf => unreachable!("zero denominator"),
            },
        }
    }

    pub fn recip(&self) -> Result<RatFun, RatFunError> {
        if self.is_zero_fn() {
            return Err(RatFunError::DivisionByZero);
        }
        Ok(RatFun::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat, RatFunError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(RatFunError::Pole(x.clone()));
        }
        Ok(self.num.eval(x) / d)
    }

    /// Factored display when numerator and denominator split into linear
    /// factors with small rational roots, e.g. `1/(N^2 (N - 1))`.
    pub fn to_factored_string(&self) -> Option<String> {
        use core::fmt::Write;
        if self.is_zero_fn() {
            return Some(String::from("0"));
        }
        let (num, num_tokens) = factored_part(&self.num)?;
        let (den, den_tokens) = factored_part(&self.den)?;
        let mut out = String::new();
        if num_tokens > 1 {
            let _ = write!(out, "({num})");
        } else {
            let _ = write!(out, "{num}");
        }
        if den != "1" {
            let _ = write!(out, "/");
            if den_tokens > 1 {
                let _ = write!(out, "({den})");
            } else {
                let _ = write!(out, "{den}");
            }
        }
        Some(out)
    }
}

/// Renders a nonzero polynomial as `c (N - r1)^m1 ...` when it splits into
/// linear factors over small rationals; also reports the number of
/// printed factors so callers can decide on outer parentheses.
fn factored_part(p: &Poly) -> Option<(String, usize)> {
    use core::fmt::Write;
    let roots = rational_roots(p)?;
    let lead = p.leading().expect("nonzero");
    let mut out = String::new();
    let mut tokens = 0;
    if !lead.is_one() || roots.is_empty() {
        let _ = write!(out, "{lead}");
        tokens += 1;
    }
    for (root, mult) in roots {
        if !out.is_empty() {
            let _ = write!(out, " ");
        }
        if root.is_zero() {
            let _ = write!(out, "N");
        } else if root.is_positive() {
            let _ = write!(out, "(N - {root})");
        } else {
            let _ = write!(out, "(N + {})", -&root);
        }
        if mult > 1 {
            let _ = write!(out, "^{mult}");
        }
        tokens += 1;
    }
    Some((out, tokens))
}

/// Complete list of rational roots with multiplicities, or `None` when the
/// polynomial does not split into linear factors with desk-sized roots.
fn rational_roots(p: &Poly) -> Option<Vec<(Rat, usize)>> {
    let mut work = p.clone();
    let mut roots: Vec<(Rat, usize)> = Vec::new();
    while work.degree() > Degree::Finite(0) {
        let root = find_rational_root(&work)?;
        let factor = Poly::linear(-root.clone(), Rat::one());
        let mut mult = 0;
        loop {
            let (q, r) = work.divrem(&factor);
            if r.is_zero() {
                work = q;
                mult += 1;
            } else {
                break;
            }
        }
        roots.push((root, mult));
        if roots.len() > 64 {
            return None;
        }
    }
    Some(roots)
}

fn find_rational_root(p: &Poly) -> Option<Rat> {
    // Clear denominators, then try p/q with p | constant, q | leading.
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let first_nonzero = ints.iter().position(|c| !c.is_zero())?;
    if first_nonzero > 0 {
        return Some(Rat::zero());
    }
    let a0 = ints.first()?.abs().to_i64().filter(|&v| v <= 1_000_000)?;
    let ad = ints.last()?.abs().to_i64().filter(|&v| v <= 1_000_000)?;
    for p_div in divisors(a0) {
        for q_div in divisors(ad) {
            for sign in [1i64, -1] {
                let cand = crate::rat(sign * p_div, q_div);
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn divisors(v: i64) -> Vec<i64> {
    let v = v.abs().max(1);
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            if d != v / d {
                out.push(v / d);
            }
        }
        d += 1;
    }
    out
}

impl Add for RatFun {
    type Output = RatFun;
    fn add(self, rhs: RatFun) -> RatFun {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFun::canonical(num, den)
    }
}

impl Sub for RatFun {
    type Output = RatFun;
    fn sub(self, rhs: RatFun) -> RatFun {
        self + (-rhs)
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Mul for RatFun {
    type Output = RatFun;
    fn mul(self, rhs: RatFun) -> RatFun {
        let num = &self.num * &rhs.num;
        let den = &self.den * &rhs.den;
        RatFun::canonical(num, den)
    }
}

impl Div for RatFun {
    type Output = RatFun;
    /// Panics on a zero divisor; use [`RatFun::recip`] for checked division.
    fn div(self, rhs: RatFun) -> RatFun {
        let r = rhs.recip().expect("division by zero rational function");
        self * r
    }
}

impl Zero for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn is_zero(&self) -> bool {
        self.is_zero_fn()
    }
}

impl One for RatFun {
    fn one() -> Self {
        RatFun::one()
    }
}

impl crate::setpart::CumulantRing for RatFun {
    fn from_i64(v: i64) -> Self {
        RatFun::constant(rat_int(v))
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The alternating subset product `R(X) = prod over subsets d of the index
/// set of (X - sum_{j in d} a_j)^((-1)^|d|)`: even subsets multiply the
/// numerator, odd ones the denominator. The empty list gives the constant
/// one. `R - 1` has degree at most `-len(a)`.
pub fn alternating_product(a: &[u64]) -> Result<RatFun, RatFunError> {
    if a.len() > MAX_ALTERNATING_LEN {
        return Err(RatFunError::ListTooLong(a.len()));
    }
    if a.is_empty() {
        return Ok(RatFun::one());
    }
    let mut num = Poly::one();
    let mut den = Poly::one();
    for mask in 0u32..(1 << a.len()) {
        let total: u64 = (0..a.len()).filter(|&j| mask >> j & 1 == 1).map(|j| a[j]).sum();
        let factor = Poly::linear(rat_int(-(total as i64)), Rat::one());
        if mask.count_ones() % 2 == 0 {
            num = &num * &factor;
        } else {
            den = &den * &factor;
        }
    }
    RatFun::new(num, den)
}
