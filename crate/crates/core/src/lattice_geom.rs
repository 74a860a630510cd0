//! Regular cones in Z³, their cross-section triangles on the plane z = 1,
//! dual cones, and exact angle/line predicates.
//!
//! Every comparison is done on squared quantities so that predicates stay in
//! exact rational (or Q(√5)) arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{QuadNum, Rat, Scalar};

/// Nonzero integer vector with coprime entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveVector {
    p: BigInt,
    q: BigInt,
    r: BigInt,
}

impl PrimitiveVector {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, r: impl Into<BigInt>) -> Result<Self> {
        let v = PrimitiveVector {
            p: p.into(),
            q: q.into(),
            r: r.into(),
        };
        if v.content() != BigInt::one() {
            return Err(Error::NotPrimitive);
        }
        Ok(v)
    }

    /// Caller guarantees primitivity (e.g. sums of generators of a regular cone).
    pub(crate) fn new_unchecked(p: BigInt, q: BigInt, r: BigInt) -> Self {
        PrimitiveVector { p, q, r }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// gcd of the three coordinates (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.p.gcd(&self.q).gcd(&self.r)
    }

    pub fn in_upper_half_space(&self) -> bool {
        self.r.is_positive()
    }

    pub fn coords(&self) -> [&BigInt; 3] {
        [&self.p, &self.q, &self.r]
    }

    /// Componentwise `self + k·other`, unchecked for primitivity.
    pub(crate) fn add_scaled(&self, other: &PrimitiveVector, k: &BigInt) -> PrimitiveVector {
        PrimitiveVector {
            p: &self.p + k * &other.p,
            q: &self.q + k * &other.q,
            r: &self.r + k * &other.r,
        }
    }

    pub fn dot(&self, o: &PrimitiveVector) -> BigInt {
        &self.p * &o.p + &self.q * &o.q + &self.r * &o.r
    }

    pub(crate) fn cross(&self, o: &PrimitiveVector) -> [BigInt; 3] {
        [
            &self.q * &o.r - &self.r * &o.q,
            &self.r * &o.p - &self.p * &o.r,
            &self.p * &o.q - &self.q * &o.p,
        ]
    }

    /// The point where the ray through `self` meets z = 1, projected to z = 0.
    pub fn point(&self) -> RatPoint2 {
        assert!(!self.r.is_zero(), "vector parallel to the plane z = 1");
        RatPoint2::new(
            Rat::new(self.p.clone(), self.r.clone()),
            Rat::new(self.q.clone(), self.r.clone()),
        )
    }
}

impl fmt::Debug for PrimitiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

impl Serialize for PrimitiveVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.p.to_string(), self.q.to_string(), self.r.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrimitiveVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [p, q, r] =
            parse_int_triple(<[String; 3]>::deserialize(d)?).map_err(D::Error::custom)?;
        PrimitiveVector::new(p, q, r).map_err(D::Error::custom)
    }
}

pub(crate) fn parse_int_triple(raw: [String; 3]) -> Result<[BigInt; 3]> {
    let parse = |s: &String| {
        s.trim().parse::<BigInt>().map_err(|_| Error::Parse {
            what: "integer",
            input: s.clone(),
        })
    };
    Ok([parse(&raw[0])?, parse(&raw[1])?, parse(&raw[2])?])
}

pub fn det3(a: &PrimitiveVector, b: &PrimitiveVector, c: &PrimitiveVector) -> BigInt {
    let [x, y, z] = b.cross(c);
    &a.p * x + &a.q * y + &a.r * z
}

/// Simplicial cone whose three primitive generators form a basis of Z³.
///
/// Generator order is significant for the construction (it records which
/// vertex plays which role), but `==` compares the generator sets.
#[derive(Clone)]
pub struct RegularCone {
    v: [PrimitiveVector; 3],
}

impl RegularCone {
    /// A regular cone inside z > 0.
    pub fn new(v: [PrimitiveVector; 3]) -> Result<Self> {
        if !v.iter().all(PrimitiveVector::in_upper_half_space) {
            return Err(Error::NotInUpperHalfSpace);
        }
        Self::from_basis(v)
    }

    /// A unimodular basis with no half-space requirement.
    pub fn from_basis(v: [PrimitiveVector; 3]) -> Result<Self> {
        let det = det3(&v[0], &v[1], &v[2]);
        if det.abs() != BigInt::one() {
            return Err(Error::NotRegular { det });
        }
        Ok(RegularCone { v })
    }

    pub(crate) fn new_unchecked(v: [PrimitiveVector; 3]) -> Self {
        RegularCone { v }
    }

    pub fn generators(&self) -> &[PrimitiveVector; 3] {
        &self.v
    }

    pub fn generator(&self, i: usize) -> &PrimitiveVector {
        &self.v[i]
    }

    pub fn det(&self) -> BigInt {
        det3(&self.v[0], &self.v[1], &self.v[2])
    }

    pub fn in_upper_half_space(&self) -> bool {
        self.v.iter().all(PrimitiveVector::in_upper_half_space)
    }

    /// Same generators in the same order.
    pub fn same_order(&self, other: &RegularCone) -> bool {
        self.v == other.v
    }

    pub fn permuted(&self, order: [usize; 3]) -> RegularCone {
        RegularCone {
            v: order.map(|i| self.v[i].clone()),
        }
    }

    pub fn triangle(&self) -> RatTriangle {
        triangle_of_cone(self)
    }

    /// Vertex denominators r₁, r₂, r₃.
    pub fn denominators(&self) -> [&BigInt; 3] {
        [&self.v[0].r, &self.v[1].r, &self.v[2].r]
    }

    pub fn max_denominator(&self) -> &BigInt {
        self.denominators()
            .into_iter()
            .max()
            .expect("three generators")
    }

    fn sorted(&self) -> [&PrimitiveVector; 3] {
        let mut s = [&self.v[0], &self.v[1], &self.v[2]];
        s.sort();
        s
    }
}

impl PartialEq for RegularCone {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

impl Eq for RegularCone {}

impl fmt::Debug for RegularCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, {:?}, {:?}>", self.v[0], self.v[1], self.v[2])
    }
}

#[derive(Serialize, Deserialize)]
struct ConeJson<T> {
    v: [T; 3],
}

impl Serialize for RegularCone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConeJson { v: self.v.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegularCone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ConeJson::<PrimitiveVector>::deserialize(d)?;
        RegularCone::new(raw.v).map_err(D::Error::custom)
    }
}

/// A point of the plane with coordinates in an ordered field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

pub type RatPoint2 = Point2<Rat>;
pub type QuadPoint2 = Point2<QuadNum>;

impl<T> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }
}

impl<T: fmt::Display> fmt::Debug for Point2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl RatPoint2 {
    pub fn to_quad(&self) -> QuadPoint2 {
        Point2::new(
            QuadNum::from_rat(self.x.clone()),
            QuadNum::from_rat(self.y.clone()),
        )
    }

    pub fn dist2(&self, o: &RatPoint2) -> Rat {
        (&self.x - &o.x).square() + (&self.y - &o.y).square()
    }

    /// Least common denominator of the two coordinates.
    pub fn denominator(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }
}

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
pub fn orient<T: Scalar>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> T {
    (b.x.clone() - a.x.clone()) * (c.y.clone() - a.y.clone())
        - (b.y.clone() - a.y.clone()) * (c.x.clone() - a.x.clone())
}

/// True iff `p` lies in the open interior of triangle (a, b, c).
pub fn strictly_inside<T: Scalar>(p: &Point2<T>, tri: [&Point2<T>; 3]) -> bool {
    (0..3).all(|i| {
        let (a, b, c) = (tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]);
        let want = orient(a, b, c).sign();
        want != Ordering::Equal && orient(a, b, p).sign() == want
    })
}

/// Non-degenerate triangle with rational vertices.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct RatTriangle {
    v: [RatPoint2; 3],
}

impl RatTriangle {
    pub fn new(a: RatPoint2, b: RatPoint2, c: RatPoint2) -> Result<Self> {
        if orient(&a, &b, &c).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(RatTriangle { v: [a, b, c] })
    }

    pub fn unit() -> RatTriangle {
        let p = |x: i64, y: i64| RatPoint2::new(Rat::from(x), Rat::from(y));
        RatTriangle {
            v: [p(0, 0), p(1, 0), p(0, 1)],
        }
    }

    pub fn vertices(&self) -> &[RatPoint2; 3] {
        &self.v
    }

    pub fn vertex(&self, i: usize) -> &RatPoint2 {
        &self.v[i]
    }

    fn refs(&self) -> [&RatPoint2; 3] {
        [&self.v[0], &self.v[1], &self.v[2]]
    }

    /// Shoelace area.
    pub fn area(&self) -> Rat {
        orient(&self.v[0], &self.v[1], &self.v[2]).abs() / Rat::from(2)
    }

    /// Squared length of the side opposite vertex `i`.
    pub fn opposite_side2(&self, i: usize) -> Rat {
        self.v[(i + 1) % 3].dist2(&self.v[(i + 2) % 3])
    }

    pub fn contains_strictly(&self, p: &RatPoint2) -> bool {
        strictly_inside(p, self.refs())
    }

    pub fn contains_strictly_quad(&self, p: &QuadPoint2) -> bool {
        let q = self.v.clone().map(|v| v.to_quad());
        strictly_inside(p, [&q[0], &q[1], &q[2]])
    }

    /// True iff every vertex of `inner` lies in the open interior of `self`.
    pub fn strictly_contains_triangle(&self, inner: &RatTriangle) -> bool {
        inner.v.iter().all(|p| self.contains_strictly(p))
    }

    /// Axis-aligned bounding box as (x-range, y-range).
    pub fn bounding_box(&self) -> (crate::exactnum::RatInterval, crate::exactnum::RatInterval) {
        use crate::exactnum::RatInterval;
        let xs = RatInterval::hull(self.v.iter().map(|p| &p.x)).expect("three vertices");
        let ys = RatInterval::hull(self.v.iter().map(|p| &p.y)).expect("three vertices");
        (xs, ys)
    }

    /// Vertex indices sorted by increasing interior angle (ties by index).
    pub fn angle_order(&self) -> [usize; 3] {
        let sides = [
            self.opposite_side2(0),
            self.opposite_side2(1),
            self.opposite_side2(2),
        ];
        let mut idx = [0, 1, 2];
        idx.sort_by(|&i, &j| sides[i].cmp(&sides[j]).then(i.cmp(&j)));
        idx
    }
}

impl fmt::Debug for RatTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}, {:?}]", self.v[0], self.v[1], self.v[2])
    }
}

#[derive(Deserialize)]
struct TriangleJson {
    v: [[Rat; 2]; 3],
}

impl<T: Serialize> Serialize for Point2<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.x, &self.y].serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Point2<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[T; 2]>::deserialize(d)?;
        Ok(Point2 { x, y })
    }
}

impl<'de> Deserialize<'de> for RatTriangle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TriangleJson::deserialize(d)?;
        let [a, b, c] = raw.v.map(|[x, y]| RatPoint2::new(x, y));
        RatTriangle::new(a, b, c).map_err(D::Error::custom)
    }
}

impl std::str::FromStr for RatTriangle {
    type Err = Error;

    /// `"x,y x,y x,y"` with rational coordinates, e.g. `"0/1,0/1 1/1,0/1 0/1,1/1"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "triangle",
            input: s.to_string(),
        };
        let pts: Vec<RatPoint2> = s
            .split_whitespace()
            .map(|tok| {
                let (x, y) = tok.split_once(',').ok_or_else(bad)?;
                Ok(RatPoint2::new(x.parse()?, y.parse()?))
            })
            .collect::<Result<_>>()?;
        let [a, b, c]: [RatPoint2; 3] = pts.try_into().map_err(|_| bad())?;
        RatTriangle::new(a, b, c)
    }
}

/// Homogenize each vertex `(p/d, q/d)` to the primitive vector `(p, q, d)`.
pub fn cone_from_triangle(t: &RatTriangle) -> Result<RegularCone> {
    let v = t.v.clone().map(|pt| {
        let d = pt.denominator();
        let p = pt.x.numer() * (&d / pt.x.denom());
        let q = pt.y.numer() * (&d / pt.y.denom());
        PrimitiveVector::new_unchecked(p, q, d)
    });
    RegularCone::new(v)
}

pub fn triangle_of_cone(c: &RegularCone) -> RatTriangle {
    RatTriangle {
        v: c.v.clone().map(|g| g.point()),
    }
}

/// Area of a regular triangle from its denominators: 1/(2 r₁ r₂ r₃).
pub fn area_regular(c: &RegularCone) -> Rat {
    let [a, b, d] = c.denominators();
    Rat::new(1, BigInt::from(2) * a * b * d)
}

/// Rows of the transpose inverse of the generator matrix, with δᵢ² = aᵢ² + bᵢ².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCone {
    pub rows: [[BigInt; 3]; 3],
    pub delta2: [Rat; 3],
}

impl DualCone {
    /// fᵢ(x, y) = aᵢx + bᵢy + cᵢ.
    pub fn functional(&self, i: usize, p: &RatPoint2) -> Rat {
        let [a, b, c] = &self.rows[i];
        Rat::from(a.clone()) * &p.x + Rat::from(b.clone()) * &p.y + Rat::from(c.clone())
    }
}

pub fn dual_of(c: &RegularCone) -> DualCone {
    let det = c.det();
    let v = &c.v;
    let rows = [0, 1, 2].map(|i| v[(i + 1) % 3].cross(&v[(i + 2) % 3]).map(|x| x * &det));
    let delta2 = rows.clone().map(|[a, b, _]| Rat::from(&a * &a + &b * &b));
    DualCone { rows, delta2 }
}

/// An angle τ ∈ [0, π/2] stored as the exact pair (sin²τ, cos²τ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleThreshold {
    sin2: Rat,
    cos2: Rat,
}

impl AngleThreshold {
    pub fn from_cos2(cos2: Rat) -> Result<Self> {
        if cos2.signum() == Ordering::Less || cos2 > Rat::one() {
            return Err(Error::Parse {
                what: "cos^2 in [0, 1]",
                input: cos2.to_string(),
            });
        }
        Ok(AngleThreshold {
            sin2: Rat::one() - &cos2,
            cos2,
        })
    }

    /// arcsin(√23/6): cos² = 13/36.
    pub fn theta_star() -> Self {
        Self::from_cos2(Rat::new(13, 36)).expect("valid")
    }

    pub fn pi_over_3() -> Self {
        Self::from_cos2(Rat::new(1, 4)).expect("valid")
    }

    pub fn pi_over_4() -> Self {
        Self::from_cos2(Rat::new(1, 2)).expect("valid")
    }

    pub fn sin2(&self) -> &Rat {
        &self.sin2
    }

    pub fn cos2(&self) -> &Rat {
        &self.cos2
    }

    /// c_θ² = 1/(9 sin²θ).
    pub fn c_theta_squared(&self) -> Rat {
        (Rat::from(9) * &self.sin2).recip()
    }

    /// π/4 < τ < π/3.
    pub fn in_construction_range(&self) -> bool {
        self.cos2 > Rat::new(1, 4) && self.cos2 < Rat::new(1, 2)
    }
}

/// Compares the angle ∠(p, apex, q) with τ exactly.
pub fn angle_cmp_at<T: Scalar>(
    apex: &Point2<T>,
    p: &Point2<T>,
    q: &Point2<T>,
    tau: &AngleThreshold,
) -> Result<Ordering> {
    let (ux, uy) = (p.x.clone() - apex.x.clone(), p.y.clone() - apex.y.clone());
    let (vx, vy) = (q.x.clone() - apex.x.clone(), q.y.clone() - apex.y.clone());
    if (ux.clone() * vy.clone() - uy.clone() * vx.clone()).sign() == Ordering::Equal {
        return Err(Error::Degenerate);
    }
    let d = ux.clone() * vx.clone() + uy.clone() * vy.clone();
    Ok(match d.sign() {
        // obtuse; τ ≤ π/2
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => {
            if tau.cos2.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Greater
            }
        }
        Ordering::Greater => {
            let n2 = (ux.clone() * ux + uy.clone() * uy) * (vx.clone() * vx + vy.clone() * vy);
            (T::from_rat(tau.cos2.clone()) * n2 - d.clone() * d).sign()
        }
    })
}

/// cos² of the angle ∠(p, apex, q).
pub fn angle_cos2_at(apex: &RatPoint2, p: &RatPoint2, q: &RatPoint2) -> Rat {
    let (ux, uy) = (&p.x - &apex.x, &p.y - &apex.y);
    let (vx, vy) = (&q.x - &apex.x, &q.y - &apex.y);
    let d = &ux * &vx + &uy * &vy;
    d.square() / ((ux.square() + uy.square()) * (vx.square() + vy.square()))
}

fn others(i: usize) -> (usize, usize) {
    ((i + 1) % 3, (i + 2) % 3)
}

pub fn angle_cmp(t: &RatTriangle, vertex: usize, tau: &AngleThreshold) -> Result<Ordering> {
    let (j, k) = others(vertex);
    angle_cmp_at(&t.v[vertex], &t.v[j], &t.v[k], tau)
}

/// Strict: the interior angle at `vertex` exceeds τ.
pub fn angle_gt(t: &RatTriangle, vertex: usize, tau: &AngleThreshold) -> Result<bool> {
    Ok(angle_cmp(t, vertex, tau)? == Ordering::Greater)
}

pub fn angle_lt(t: &RatTriangle, vertex: usize, tau: &AngleThreshold) -> Result<bool> {
    Ok(angle_cmp(t, vertex, tau)? == Ordering::Less)
}

pub fn angle_cos2(t: &RatTriangle, vertex: usize) -> Rat {
    let (j, k) = others(vertex);
    angle_cos2_at(&t.v[vertex], &t.v[j], &t.v[k])
}

/// cos² of the smallest angle (always acute).
pub fn min_angle_cos2(t: &RatTriangle) -> Rat {
    angle_cos2(t, t.angle_order()[0])
}

pub fn all_angles_gt(t: &RatTriangle, tau: &AngleThreshold) -> bool {
    (0..3).all(|i| matches!(angle_gt(t, i, tau), Ok(true)))
}

pub fn diam2(t: &RatTriangle) -> Rat {
    (0..3)
        .map(|i| t.opposite_side2(i))
        .max()
        .expect("three sides")
}

/// The line a·x + b·y + c = 0, primitive and sign-normalized.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalLine {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl RationalLine {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let (mut a, mut b, mut c) = (a.into(), b.into(), c.into());
        if a.is_zero() && b.is_zero() {
            return Err(Error::LineAtInfinity);
        }
        let g = a.gcd(&b).gcd(&c);
        a /= &g;
        b /= &g;
        c /= &g;
        let lead = if a.is_zero() { &b } else { &a };
        if lead.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(RationalLine { a, b, c })
    }

    /// The line through the points of two vectors (the plane they span, cut with z = 1).
    pub fn through(u: &PrimitiveVector, v: &PrimitiveVector) -> Result<Self> {
        let [a, b, c] = u.cross(v);
        RationalLine::new(a, b, c)
    }

    pub fn coeffs(&self) -> [&BigInt; 3] {
        [&self.a, &self.b, &self.c]
    }

    /// Max-norm max(|a|, |b|, |c|).
    pub fn height(&self) -> BigInt {
        self.a.abs().max(self.b.abs()).max(self.c.abs())
    }
}

impl fmt::Debug for RationalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

pub fn line_side<T: Scalar>(l: &RationalLine, p: &Point2<T>) -> Ordering {
    let k = |n: &BigInt| T::from_rat(Rat::from(n.clone()));
    (k(&l.a) * p.x.clone() + k(&l.b) * p.y.clone() + k(&l.c)).sign()
}

/// Whether the closed triangle touches the line.
pub fn line_meets_triangle(l: &RationalLine, t: &RatTriangle) -> bool {
    let s = t.v.clone().map(|p| line_side(l, &p));
    !(s[0] != Ordering::Equal && s[0] == s[1] && s[1] == s[2])
}

pub fn line_contains_segment(l: &RationalLine, a: &RatPoint2, b: &RatPoint2) -> bool {
    line_side(l, a) == Ordering::Equal && line_side(l, b) == Ordering::Equal
}

/// Every rational line of the plane exactly once: primitive (a, b, c) with
/// |a| + |b| > 0 and first nonzero entry positive, ordered by
/// max(|a|, |b|, |c|) and then lexicographically.
#[derive(Clone, Debug, Default)]
pub struct LineEnumerator {
    height: i64,
    block: Vec<RationalLine>,
    pos: usize,
}

impl LineEnumerator {
    pub fn new() -> Self {
        Self::default()
    }

    fn block(h: i64) -> Vec<RationalLine> {
        let mut out = Vec::new();
        for a in 0..=h {
            for b in -h..=h {
                if a == 0 && b <= 0 {
                    continue;
                }
                for c in -h..=h {
                    if a.max(b.abs()).max(c.abs()) != h || a.gcd(&b).gcd(&c) != 1 {
                        continue;
                    }
                    out.push(RationalLine {
                        a: a.into(),
                        b: b.into(),
                        c: c.into(),
                    });
                }
            }
        }
        out
    }
}

impl Iterator for LineEnumerator {
    type Item = RationalLine;

    fn next(&mut self) -> Option<RationalLine> {
        while self.pos >= self.block.len() {
            self.height += 1;
            self.block = Self::block(self.height);
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.block[self.pos - 1].clone())
    }
}

/// Λₙ, the n-th line of the fixed enumeration.
pub fn enumerate_lines(n: usize) -> RationalLine {
    LineEnumerator::new()
        .nth(n)
        .expect("enumeration is infinite")
}

/// Index of `l` in the enumeration.
pub fn line_index(l: &RationalLine) -> usize {
    LineEnumerator::new()
        .position(|m| m == *l)
        .expect("every line is enumerated")
}
