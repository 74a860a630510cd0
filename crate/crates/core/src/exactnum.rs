//! Exact arithmetic: canonical rationals, the quadratic field Q(√5), and
//! rational intervals used for certified enclosures.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number in lowest terms with a positive denominator.
///
/// Normalization happens in every constructor, so two equal values always
/// have identical `(num, den)` pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num.into(), den))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        self.0.numer().sign_ord()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn square(&self) -> Rat {
        Rat(&self.0 * &self.0)
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Rat {
        Rat(num_traits::pow(self.0.clone(), e as usize))
    }

    /// Nearest `f64`; only for display and rendering.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `n/d` or a bare integer `n`.
    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::Parse {
            what: "rational",
            input: s.to_string(),
        };
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat((&self.0).$m(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

/// `a + b·√5` with rational `a`, `b`.
///
/// Since √5 is irrational the pair `(a, b)` is unique, so structural
/// equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QuadNum {
    pub a: Rat,
    pub b: Rat,
}

impl QuadNum {
    pub fn new(a: Rat, b: Rat) -> QuadNum {
        QuadNum { a, b }
    }

    pub fn from_rat(a: Rat) -> QuadNum {
        QuadNum { a, b: Rat::zero() }
    }

    pub fn sqrt5() -> QuadNum {
        QuadNum {
            a: Rat::zero(),
            b: Rat::one(),
        }
    }

    /// (√5 − 1)/2, the reciprocal of the golden ratio.
    pub fn golden_conjugate() -> QuadNum {
        QuadNum {
            a: Rat::new(-1, 2),
            b: Rat::new(1, 2),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, k: &Rat) -> QuadNum {
        QuadNum {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * 5f64.sqrt()
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.signum() == Ordering::Less {
            write!(f, "{}-{}√5", self.a, -&self.b)
        } else {
            write!(f, "{}+{}√5", self.a, self.b)
        }
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadNum {
    type Err = Error;

    /// Parses `a`, `b√5`, or `a±b√5`; `sqrt5` may stand in for `√5` and a
    /// missing `b` means 1, as in `1/2+√5`.
    fn from_str(s: &str) -> Result<QuadNum> {
        let bad = || Error::Parse {
            what: "quadratic number",
            input: s.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = t
            .strip_suffix("√5")
            .or_else(|| t.strip_suffix("sqrt5"))
            .or_else(|| t.strip_suffix("sqrt(5)"));
        let Some(body) = body else {
            return Ok(QuadNum::from_rat(t.parse().map_err(|_| bad())?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (a_str, b_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let b = match b_str {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            other => other.trim_start_matches('+').parse().map_err(|_| bad())?,
        };
        let a = a_str.parse().map_err(|_| bad())?;
        Ok(QuadNum { a, b })
    }
}

impl Add for QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: QuadNum) -> QuadNum {
        QuadNum {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl Sub for QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: QuadNum) -> QuadNum {
        QuadNum {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl Mul for QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: QuadNum) -> QuadNum {
        let five = Rat::from(5);
        QuadNum {
            a: &self.a * &rhs.a + five * (&self.b * &rhs.b),
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum {
            a: -self.a,
            b: -self.b,
        }
    }
}

/// Exact sign of `a + b√5`.
pub fn quad_sign(x: &QuadNum) -> Ordering {
    let sa = x.a.signum();
    let sb = x.b.signum();
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // Opposite signs: |a| vs |b|√5, compared on squares.
    match x.a.square().cmp(&(Rat::from(5) * x.b.square())) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => unreachable!("a^2 = 5 b^2 with b != 0"),
    }
}

pub fn quad_cmp_rat(x: &QuadNum, q: &Rat) -> Ordering {
    quad_sign(&QuadNum {
        a: &x.a - q,
        b: x.b.clone(),
    })
}

/// Ordered field elements the geometric predicates can run over.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rat(r: Rat) -> Self;
    fn sign(&self) -> Ordering;

    fn zero() -> Self {
        Self::from_rat(Rat::zero())
    }
}

impl Scalar for Rat {
    fn from_rat(r: Rat) -> Rat {
        r
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
}

impl Scalar for QuadNum {
    fn from_rat(r: Rat) -> QuadNum {
        QuadNum::from_rat(r)
    }
    fn sign(&self) -> Ordering {
        quad_sign(self)
    }
}

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Result<RatInterval> {
        if lo > hi {
            return Err(Error::EmptyInterval);
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: Rat) -> RatInterval {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    /// Smallest interval holding every value in `xs`.
    pub fn hull<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Option<RatInterval> {
        let mut it = xs.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for x in it {
            if *x < lo {
                lo = x.clone();
            }
            if *x > hi {
                hi = x.clone();
            }
        }
        Some(RatInterval { lo, hi })
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn shift(&self, k: &Rat) -> RatInterval {
        RatInterval {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    pub fn scale(&self, k: &Rat) -> RatInterval {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        RatInterval::hull(c.iter()).expect("four candidates")
    }

    /// Tight square: `[0, max²]` when the interval straddles zero.
    pub fn square(&self) -> RatInterval {
        let (l2, h2) = (self.lo.square(), self.hi.square());
        if self.lo.signum() != Ordering::Greater && self.hi.signum() != Ordering::Less {
            RatInterval {
                lo: Rat::zero(),
                hi: l2.max(h2),
            }
        } else if l2 <= h2 {
            RatInterval { lo: l2, hi: h2 }
        } else {
            RatInterval { lo: h2, hi: l2 }
        }
    }

    /// Division by an interval that lies strictly above zero.
    pub fn div_positive(&self, o: &RatInterval) -> Option<RatInterval> {
        if o.lo.signum() != Ordering::Greater {
            return None;
        }
        let c = [
            &self.lo / &o.lo,
            &self.lo / &o.hi,
            &self.hi / &o.lo,
            &self.hi / &o.hi,
        ];
        RatInterval::hull(c.iter())
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Rational `r ≥ √q` with `r² − q ≤ 2^(−precision)·max(1, q)`.
pub fn interval_sqrt_upper(q: &Rat, precision: u32) -> Result<Rat> {
    if q.signum() == Ordering::Less {
        return Err(Error::NegativeSqrt);
    }
    if q.is_zero() {
        return Ok(Rat::zero());
    }
    // r = ceil(sqrt(ceil(q·4^s))) / 2^s
    let s = precision as usize + 3;
    let scale = BigInt::one() << s;
    let scaled = q * Rat::from_int(&scale * &scale);
    let n = ceil_int(&scaled);
    let mut root = n.sqrt();
    if &root * &root < n {
        root += 1;
    }
    Ok(Rat::new(root, scale))
}

fn ceil_int(x: &Rat) -> BigInt {
    let (q, r) = num_integer::Integer::div_mod_floor(x.numer(), x.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn q(a: Rat, b: Rat) -> QuadNum {
        QuadNum::new(a, b)
    }

    #[test]
    fn rat_is_canonical() {
        let x = r(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!("-3/2".parse::<Rat>().unwrap(), x);
        assert_eq!("7".parse::<Rat>().unwrap(), r(7, 1));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x/2".parse::<Rat>().is_err());
    }

    #[test]
    fn quad_sign_examples() {
        assert_eq!(quad_sign(&QuadNum::default()), Ordering::Equal);
        assert_eq!(quad_sign(&q(r(-2, 1), r(1, 1))), Ordering::Greater);
        assert_eq!(quad_sign(&q(r(9, 4), r(-1, 1))), Ordering::Greater);
        assert_eq!(quad_sign(&q(r(-3, 1), r(1, 1))), Ordering::Less);
        assert_eq!(quad_sign(&q(r(0, 1), r(-1, 7))), Ordering::Less);
    }

    #[test]
    fn quad_cmp_rat_examples() {
        let s5 = QuadNum::sqrt5();
        assert_eq!(quad_cmp_rat(&s5, &r(2, 1)), Ordering::Greater);
        assert_eq!(quad_cmp_rat(&s5, &r(3, 1)), Ordering::Less);
        assert_eq!(
            quad_cmp_rat(&QuadNum::from_rat(r(1, 2)), &r(1, 2)),
            Ordering::Equal
        );
    }

    #[test]
    fn quad_parse_and_display() {
        let x: QuadNum = "-1/4+1/4√5".parse().unwrap();
        assert_eq!(x, q(r(-1, 4), r(1, 4)));
        assert_eq!(x.to_string(), "-1/4+1/4√5");
        assert_eq!(
            "1/4".parse::<QuadNum>().unwrap(),
            QuadNum::from_rat(r(1, 4))
        );
        assert_eq!("-sqrt5".parse::<QuadNum>().unwrap(), q(r(0, 1), r(-1, 1)));
        assert_eq!(
            "2-3/2*sqrt5".parse::<QuadNum>().unwrap(),
            q(r(2, 1), r(-3, 2))
        );
        assert_eq!("1/2+√5".parse::<QuadNum>().unwrap(), q(r(1, 2), r(1, 1)));
        let y = q(r(3, 5), r(-7, 9));
        assert_eq!(y.to_string().parse::<QuadNum>().unwrap(), y);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"a":"-1/4","b":"1/4"}"#);
    }

    #[test]
    fn golden_conjugate_value() {
        let g = QuadNum::golden_conjugate();
        assert!((g.to_f64() - 0.618_033_988_749_895).abs() < 1e-12);
        // g^2 + g - 1 = 0
        let z = g.clone() * g.clone() + g - QuadNum::from_rat(Rat::one());
        assert_eq!(z, QuadNum::default());
    }

    /// Bisection oracle for √q on rationals, independent of the integer-root path.
    fn bisect_sqrt(q: &Rat, iters: usize) -> (Rat, Rat) {
        let mut lo = Rat::zero();
        let mut hi = if *q > Rat::one() {
            q.clone()
        } else {
            Rat::one()
        };
        for _ in 0..iters {
            let mid = (&lo + &hi) / Rat::from(2);
            if mid.square() <= *q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    #[test]
    fn sqrt_upper_examples() {
        assert_eq!(interval_sqrt_upper(&Rat::zero(), 10).unwrap(), Rat::zero());
        for prec in [0, 5, 30] {
            let v = interval_sqrt_upper(&r(4, 1), prec).unwrap();
            assert!(v >= r(2, 1));
            assert!(v <= r(2, 1) + Rat::new(4, BigInt::one() << prec));
        }
        let v = interval_sqrt_upper(&r(2, 1), 20).unwrap();
        let (lo, _) = bisect_sqrt(&r(2, 1), 80);
        assert!(v >= lo);
        assert!(v.square() >= r(2, 1));
        assert!(v.square() - r(2, 1) <= Rat::new(2, BigInt::one() << 20));
        assert_eq!(interval_sqrt_upper(&r(-1, 3), 4), Err(Error::NegativeSqrt));
    }

    #[test]
    fn interval_ops() {
        let a = RatInterval::new(r(-1, 1), r(2, 1)).unwrap();
        assert_eq!(a.square(), RatInterval::new(r(0, 1), r(4, 1)).unwrap());
        let b = RatInterval::new(r(-3, 1), r(-2, 1)).unwrap();
        assert_eq!(b.square(), RatInterval::new(r(4, 1), r(9, 1)).unwrap());
        assert_eq!(a.mul(&b), RatInterval::new(r(-6, 1), r(3, 1)).unwrap());
        assert!(a.div_positive(&b).is_none());
        assert!(RatInterval::new(r(1, 1), r(0, 1)).is_err());
        assert_eq!(a.sub(&b), RatInterval::new(r(1, 1), r(5, 1)).unwrap());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| Rat::new(n, d))
    }

    fn quad() -> impl Strategy<Value = QuadNum> {
        (small_rat(), small_rat()).prop_map(|(a, b)| QuadNum::new(a, b))
    }

    /// √5 truncated to 128 fractional bits, via integer square root of 5·2^256.
    fn sqrt5_fixed128() -> Rat {
        let scaled: BigInt = BigInt::from(5) << 256;
        Rat::new(scaled.sqrt(), BigInt::one() << 128)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn quad_sign_matches_128bit_evaluation(x in quad()) {
            let approx = &x.a + &x.b * sqrt5_fixed128();
            let margin = Rat::new(1, BigInt::one() << 64);
            if approx.abs() > margin {
                prop_assert_eq!(quad_sign(&x), approx.signum());
            }
        }
    }

    proptest! {
        #[test]
        fn quad_distributive(x in quad(), y in quad(), z in quad()) {
            let lhs = (x.clone() + y.clone()) * z.clone();
            let rhs = x * z.clone() + y * z;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sqrt_upper_is_one_sided(n in 0i64..1_000_000, d in 1i64..10_000, prec in 0u32..80) {
            let x = Rat::new(n, d);
            let s = interval_sqrt_upper(&x, prec).unwrap();
            prop_assert!(s.square() >= x);
            let slack = Rat::new(1, BigInt::one() << prec) * x.clone().max(Rat::one());
            prop_assert!(s.square() - x <= slack);
        }
    }
}
