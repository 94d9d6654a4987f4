//! Exact planar primitives over arbitrary-precision rationals.
//!
//! Every legality and scoring decision in the engines goes through these
//! predicates, so nothing here ever rounds. Floats only appear in
//! [`Rat::to_f64`], which is used for rendering.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("query point coincides with a segment endpoint")]
    EndpointQuery,
    #[error("polygon is not simple")]
    NonSimplePolygon,
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

/// Canonically reduced rational number (denominator > 0).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).abs();
        let (n, d) = if den < 0 { (-num / g, -den / g) } else { (num / g, den / g) };
        Rat(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rat(BigRational::new(num, den))
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn signum(&self) -> i8 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn half(&self) -> Rat {
        Rat(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

impl From<BigRational> for Rat {
    fn from(v: BigRational) -> Self {
        Rat(v)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
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

impl<'a> Neg for &'a Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeometryError::BadRational(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rat(BigRational::new(n, d)))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rat(BigRational::from_integer(n)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        // Accept integers too, so hand-written instance files can say `3`.
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Rat::from_int(i)),
                None => Err(serde::de::Error::custom(
                    "non-integer JSON numbers are not exact; use a \"num/den\" string",
                )),
            },
            other => Err(serde::de::Error::custom(format!(
                "expected rational string, got {other}"
            ))),
        }
    }
}

/// Build with [`Point::new`]; the coordinates are not meant to be mutated.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
    /// `(x·d, y·d, d)` when small, for overflow-free machine predicates.
    fast: Option<(i64, i64, i64)>,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        let fast = small_pair(&x, &y);
        Point { x, y, fast }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::new(Rat::from_int(x), Rat::from_int(y))
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        if let (Some(a), Some(b)) = (self.fast, other.fast) {
            let l = a.2 / gcd(a.2, b.2) * b.2;
            let (ka, kb) = (l / a.2, l / b.2);
            return Point::new(Rat::new(a.0 * ka + b.0 * kb, 2 * l), Rat::new(a.1 * ka + b.1 * kb, 2 * l));
        }
        Point::new((&self.x + &other.x).half(), (&self.y + &other.y).half())
    }

    /// Compare x coordinates.
    pub fn cmp_x(&self, other: &Point) -> Ordering {
        match (self.fast, other.fast) {
            (Some(a), Some(b)) => (i128::from(a.0) * i128::from(b.2)).cmp(&(i128::from(b.0) * i128::from(a.2))),
            _ => self.x.cmp(&other.x),
        }
    }

    /// Compare y coordinates.
    pub fn cmp_y(&self, other: &Point) -> Ordering {
        match (self.fast, other.fast) {
            (Some(a), Some(b)) => (i128::from(a.1) * i128::from(b.2)).cmp(&(i128::from(b.1) * i128::from(a.2))),
            _ => self.y.cmp(&other.y),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Serialized as a two-element array of rational strings.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.x, &self.y).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (x, y) = <(Rat, Rat)>::deserialize(deserializer)?;
        Ok(Point::new(x, y))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        debug_assert!(a != b, "degenerate segment");
        Segment { a, b }
    }

    pub fn has_endpoint(&self, p: &Point) -> bool {
        &self.a == p || &self.b == p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }
}

/// Twice the signed area of triangle `pqr`.
pub fn cross(p: &Point, q: &Point, r: &Point) -> Rat {
    let ux = &q.x - &p.x;
    let uy = &q.y - &p.y;
    let vx = &r.x - &p.x;
    let vy = &r.y - &p.y;
    ux * vy - uy * vx
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const FAST_COORD: i64 = 1 << 40;
const FAST_DEN: i64 = 1 << 20;

fn small_pair(x: &Rat, y: &Rat) -> Option<(i64, i64, i64)> {
    let (xn, xd) = (x.numer().to_i64()?, x.denom().to_i64()?);
    let (yn, yd) = (y.numer().to_i64()?, y.denom().to_i64()?);
    if xd >= FAST_DEN || yd >= FAST_DEN {
        return None;
    }
    let d = xd / gcd(xd, yd) * yd;
    let (fx, fy) = (xn.checked_mul(d / xd)?, yn.checked_mul(d / yd)?);
    (d < FAST_DEN && fx.abs() < FAST_COORD && fy.abs() < FAST_COORD).then_some((fx, fy, d))
}

/// Sign of the cross product in machine arithmetic, when the coordinates
/// are small enough to rule out overflow.
fn cross_sign_fast(p: &Point, q: &Point, r: &Point) -> Option<i8> {
    let (a, b, c) = (p.fast?, q.fast?, r.fast?);
    let v = if a.2 == 1 && b.2 == 1 && c.2 == 1 {
        [a.0, a.1, b.0, b.1, c.0, c.1].map(i128::from)
    } else {
        let l = a.2 / gcd(a.2, b.2) * b.2;
        let l = l / gcd(l, c.2) * c.2;
        if l >= FAST_DEN {
            return None;
        }
        let (ka, kb, kc) = (l / a.2, l / b.2, l / c.2);
        [a.0 * ka, a.1 * ka, b.0 * kb, b.1 * kb, c.0 * kc, c.1 * kc].map(i128::from)
    };
    let (ux, uy, vx, vy) = (v[2] - v[0], v[3] - v[1], v[4] - v[0], v[5] - v[1]);
    Some((ux * vy - uy * vx).signum() as i8)
}

pub fn orient(p: &Point, q: &Point, r: &Point) -> Orientation {
    let sign = cross_sign_fast(p, q, r).unwrap_or_else(|| cross(p, q, r).signum());
    match sign {
        -1 => Orientation::Clockwise,
        0 => Orientation::Collinear,
        _ => Orientation::CounterClockwise,
    }
}

/// `p` lies on the closed segment `ab`, given that it is collinear with it.
fn within_box(a: &Point, b: &Point, p: &Point) -> bool {
    let (lx, hx) = if a.cmp_x(b).is_le() { (a, b) } else { (b, a) };
    let (ly, hy) = if a.cmp_y(b).is_le() { (a, b) } else { (b, a) };
    lx.cmp_x(p).is_le() && p.cmp_x(hx).is_le() && ly.cmp_y(p).is_le() && p.cmp_y(hy).is_le()
}

pub fn on_closed_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient(a, b, p) == Orientation::Collinear && within_box(a, b, p)
}

/// True iff the segments share any point other than a common endpoint:
/// proper crossings, collinear overlaps and T-junctions all conflict.
pub fn segments_conflict(s: &Segment, t: &Segment) -> bool {
    points_conflict(&s.a, &s.b, &t.a, &t.b)
}

/// [`segments_conflict`] for the segments `ab` and `cd`.
pub fn points_conflict(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    if o1 == Orientation::Collinear && o2 == Orientation::Collinear {
        // Collinear: compare as intervals along the line.
        let (slo, shi) = if a <= b { (a, b) } else { (b, a) };
        let (tlo, thi) = if c <= d { (c, d) } else { (d, c) };
        let lo = slo.max(tlo);
        let hi = shi.min(thi);
        // A single touching point is necessarily an endpoint of both.
        return lo < hi;
    }
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let straddles = |x: Orientation, y: Orientation| x.sign() * y.sign() <= 0;
    if !(straddles(o1, o2) && straddles(o3, o4)) {
        return false;
    }
    // Non-collinear segments meet in at most one point; if they share an
    // endpoint, that is the point.
    let shared = a == c || a == d || b == c || b == d;
    !shared
}

pub fn segment_blocked_by_point(s: &Segment, p: &Point) -> Result<bool, GeometryError> {
    if s.has_endpoint(p) {
        return Err(GeometryError::EndpointQuery);
    }
    Ok(on_closed_segment(&s.a, &s.b, p))
}

/// Closed polygonal boundary, counterclockwise by convention.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolygonCycle {
    pub vertices: Vec<Point>,
}

impl PolygonCycle {
    pub fn new(vertices: Vec<Point>) -> Self {
        debug_assert!(vertices.len() >= 3);
        PolygonCycle { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn reversed(&self) -> PolygonCycle {
        let mut v = self.vertices.clone();
        v.reverse();
        PolygonCycle { vertices: v }
    }

    /// No repeated vertex, no two non-adjacent edges touching, no vertex on
    /// a non-incident edge.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.vertices[i] == self.vertices[j] {
                    return false;
                }
            }
        }
        let segs: Vec<Segment> = self
            .edges()
            .map(|(a, b)| Segment::new(a.clone(), b.clone()))
            .collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges may only share their common vertex.
                    let (s, t) = (&segs[i], &segs[j]);
                    let common = if j == i + 1 { &s.b } else { &s.a };
                    let other_s = if j == i + 1 { &s.a } else { &s.b };
                    let other_t = if j == i + 1 { &t.b } else { &t.a };
                    if orient(other_s, common, other_t) == Orientation::Collinear
                        && (on_closed_segment(common, other_t, other_s)
                            || on_closed_segment(common, other_s, other_t))
                    {
                        return false;
                    }
                } else if segments_conflict(&segs[i], &segs[j])
                    || segs[i].has_endpoint(&segs[j].a)
                    || segs[i].has_endpoint(&segs[j].b)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Shoelace sum; positive for counterclockwise cycles.
pub fn signed_area(c: &PolygonCycle) -> Rat {
    walk_signed_area(&c.vertices)
}

/// Shoelace area of an arbitrary closed vertex walk.
pub fn walk_signed_area(walk: &[Point]) -> Rat {
    let n = walk.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        let p = &walk[i];
        let q = &walk[(i + 1) % n];
        acc += &(&p.x * &q.y - &q.x * &p.y);
    }
    acc.half()
}

/// Winding number of `walk` around `p`; `p` must not lie on the walk.
/// Edges traversed once in each direction cancel, so dangling edges in a
/// face boundary walk do not disturb the count.
pub fn winding_number(p: &Point, walk: &[Point]) -> i64 {
    let n = walk.len();
    let mut wn = 0;
    for i in 0..n {
        let a = &walk[i];
        let b = &walk[(i + 1) % n];
        if a.cmp_y(p).is_le() {
            if b.cmp_y(p).is_gt() && orient(a, b, p) == Orientation::CounterClockwise {
                wn += 1;
            }
        } else if b.cmp_y(p).is_le() && orient(a, b, p) == Orientation::Clockwise {
            wn -= 1;
        }
    }
    wn
}

pub fn on_walk(p: &Point, walk: &[Point]) -> bool {
    let n = walk.len();
    (0..n).any(|i| on_closed_segment(&walk[i], &walk[(i + 1) % n], p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

pub fn point_in_polygon(p: &Point, c: &PolygonCycle) -> Result<Location, GeometryError> {
    if !c.is_simple() {
        return Err(GeometryError::NonSimplePolygon);
    }
    Ok(locate_in_walk(p, &c.vertices))
}

/// Like [`point_in_polygon`] but without the simplicity check.
pub fn locate_in_walk(p: &Point, walk: &[Point]) -> Location {
    if on_walk(p, walk) {
        Location::Boundary
    } else if winding_number(p, walk) != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Counterclockwise hull starting at the lexicographically smallest point.
/// Points lying on hull edges are kept as vertices since they are playable.
pub fn convex_hull(pts: &[Point]) -> Result<PolygonCycle, GeometryError> {
    let mut sorted: Vec<Point> = pts.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() < 3 {
        return Err(GeometryError::Degenerate("fewer than three distinct points"));
    }
    // Strict monotone chain first.
    let mut lower: Vec<Point> = Vec::new();
    for p in &sorted {
        while lower.len() >= 2
            && orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p)
                != Orientation::CounterClockwise
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in sorted.iter().rev() {
        while upper.len() >= 2
            && orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p)
                != Orientation::CounterClockwise
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    let mut strict = lower;
    strict.extend(upper);
    if strict.len() < 3 {
        return Err(GeometryError::Degenerate("all points collinear"));
    }
    // Re-insert boundary points along each strict edge, ordered by distance.
    let n = strict.len();
    let mut out = Vec::with_capacity(sorted.len());
    for i in 0..n {
        let a = &strict[i];
        let b = &strict[(i + 1) % n];
        out.push(a.clone());
        let mut between: Vec<&Point> = sorted
            .iter()
            .filter(|p| *p != a && *p != b && on_closed_segment(a, b, p))
            .collect();
        let key = |p: &Point| (&p.x - &a.x).abs() + (&p.y - &a.y).abs();
        between.sort_by_key(|p| key(p));
        out.extend(between.into_iter().cloned());
    }
    Ok(PolygonCycle::new(out))
}
