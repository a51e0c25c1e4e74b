//! Rational functions in `t` over Q, always kept reduced with a monic
//! denominator so that equality is structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Poly;
use super::rat::{self, Rat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    /// Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFun::zero();
        }
        let (_, n, d) = Poly::gcd_cofactors(&num, &den);
        RatFun::monic_den(n, d)
    }

    /// From coprime `num` and `den`; only rescales to a monic denominator.
    fn monic_den(num: Poly, den: Poly) -> Self {
        let lead = den.leading();
        if lead.is_one() {
            return RatFun { num, den };
        }
        let inv = lead.recip();
        RatFun { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFun { num: Poly::one(), den: Poly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        RatFun { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        RatFun::constant(rat::int(c))
    }

    pub fn t() -> Self {
        RatFun::from(Poly::t())
    }

    /// `(t - a)^(-m)`.
    pub fn inverse_power(a: &Rat, m: u32) -> Self {
        RatFun { num: Poly::one(), den: Poly::linear_root(a).pow(m) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The constant value, if this is a constant.
    pub fn as_constant(&self) -> Option<Rat> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn scale(&self, c: &Rat) -> RatFun {
        if c.is_zero() {
            return RatFun::zero();
        }
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Option<RatFun> {
        (!self.is_zero()).then(|| RatFun::new(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &RatFun) -> Option<RatFun> {
        rhs.inv().map(|r| self * &r)
    }

    /// d/dt.
    pub fn derivative(&self) -> RatFun {
        if self.is_zero() {
            return RatFun::zero();
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFun::new(n, &self.den * &self.den)
    }

    /// Value at a rational point, `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    /// `ord_inf = deg(den) - deg(num)`; `None` for zero.
    pub fn order_at_infinity(&self) -> Option<i64> {
        let n = self.num.degree()? as i64;
        Some(self.den.degree().unwrap() as i64 - n)
    }

    /// Valuation at a finite rational point; `None` for zero.
    pub fn order_at(&self, a: &Rat) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.root_multiplicity(a) as i64 - self.den.root_multiplicity(a) as i64)
    }

    pub fn powi(&self, k: u32) -> RatFun {
        RatFun { num: self.num.pow(k), den: self.den.pow(k) }
    }
}

impl From<Poly> for RatFun {
    fn from(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }
}

impl From<Rat> for RatFun {
    fn from(c: Rat) -> Self {
        RatFun::constant(c)
    }
}

impl Default for RatFun {
    fn default() -> Self {
        RatFun::zero()
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFun::new(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() || rhs.den.is_one() {
            // no common factor can arise
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFun::monic_den(num, &self.den * &rhs.den);
        }
        // only factors of g = gcd(den1, den2) can cancel
        let (g, d1, d2) = Poly::gcd_cofactors(&self.den, &rhs.den);
        let num = &(&self.num * &d2) + &(&rhs.num * &d1);
        if num.is_zero() {
            return RatFun::zero();
        }
        let (_, num, g) = Poly::gcd_cofactors(&num, &g);
        RatFun::monic_den(num, &(&d1 * &d2) * &g)
    }
}

impl Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        self + &(-rhs)
    }
}

impl Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        if self.is_zero() || rhs.is_zero() {
            return RatFun::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFun { num: &self.num * &rhs.num, den: Poly::one() };
        }
        // both inputs are reduced, so only cross factors can cancel
        let (_, n1, d2) = Poly::gcd_cofactors(&self.num, &rhs.den);
        let (_, n2, d1) = Poly::gcd_cofactors(&rhs.num, &self.den);
        RatFun::monic_den(&n1 * &n2, &d1 * &d2)
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFun {
            type Output = RatFun;
            fn $m(self, rhs: RatFun) -> RatFun {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

#[derive(Serialize, Deserialize)]
struct Wire {
    num: Poly,
    #[serde(default = "Poly::one")]
    den: Poly,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyWire {
    Full(Wire),
    Poly(Poly),
    Constant(String),
}

impl Serialize for RatFun {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { num: self.num.clone(), den: self.den.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFun {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match AnyWire::deserialize(d)? {
            AnyWire::Full(w) => {
                if w.den.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(RatFun::new(w.num, w.den))
            }
            AnyWire::Poly(p) => Ok(RatFun::from(p)),
            AnyWire::Constant(s) => rat::parse_rat(&s)
                .map(RatFun::constant)
                .ok_or_else(|| D::Error::custom(format!("invalid rational `{s}`"))),
        }
    }
}
