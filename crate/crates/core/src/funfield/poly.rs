//! Dense univariate polynomials over Q, coefficients lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{self, format_rat, int, Rat};

/// A polynomial with no trailing zero coefficient. The zero polynomial has
/// no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// `t - a`.
    pub fn linear_root(a: &Rat) -> Self {
        Poly::new(vec![-a.clone(), Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.leading().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Quotient if the division is exact. Runs in `Z[t]` on primitive
    /// parts, where by Gauss's lemma the quotient must again be integral.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (ca, ia) = modular::split(self);
        let (cb, ib) = modular::split(divisor);
        let q = modular::div_exact(&ia, &ib)?;
        Some(modular::from_ints(&q).scale(&(ca / cb)))
    }

    /// Monic gcd; `gcd(0, 0) = 0`. Computed modulo word-size primes and
    /// lifted by Chinese remaindering, with an exact division check.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        Poly::gcd_cofactors(a, b).0
    }

    /// `(g, a/g, b/g)` with `g` the monic gcd of nonzero `a` and `b`.
    pub fn gcd_cofactors(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        if a.is_constant() || b.is_constant() {
            return (Poly::one(), a.clone(), b.clone());
        }
        if a == b {
            let lead = a.leading();
            return (a.monic(), Poly::constant(lead.clone()), Poly::constant(lead));
        }
        let (ca, ia) = modular::split(a);
        let (cb, ib) = modular::split(b);
        match modular::gcd(&ia, &ib) {
            Some((g, qa, qb)) => {
                // a = ca·g·qa, and g = lead·monic(g)
                let lead = Rat::from_integer(g.last().unwrap().clone());
                let cofactor = |c: &Rat, q: &[BigInt]| modular::from_ints(q).scale(&(c * &lead));
                (modular::from_ints(&g).monic(), cofactor(&ca, &qa), cofactor(&cb, &qb))
            }
            None => {
                let g = Poly::euclid_gcd(a, b);
                let (qa, qb) = (a.div_rem(&g).0, b.div_rem(&g).0);
                (g, qa, qb)
            }
        }
    }

    fn euclid_gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Monic lcm of two nonzero polynomials.
    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        let g = Poly::gcd(a, b);
        (a * b).div_exact(&g).expect("gcd divides").monic()
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &Rat) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::linear_root(a);
        let mut p = self.clone();
        let mut k = 0;
        while let Some(q) = p.div_exact(&lin) {
            p = q;
            k += 1;
        }
        k
    }

    /// Removes every factor `t - a` for the given points, returning the
    /// cofactor and the multiplicities.
    pub fn strip_roots(&self, points: &[Rat]) -> (Poly, Vec<usize>) {
        let mut p = self.clone();
        let mut mult = Vec::with_capacity(points.len());
        for a in points {
            let lin = Poly::linear_root(a);
            let mut k = 0;
            while let Some(q) = p.div_exact(&lin) {
                p = q;
                k += 1;
            }
            mult.push(k);
        }
        (p, mult)
    }

    /// Substitutes `t -> t + a`.
    pub fn translate(&self, a: &Rat) -> Poly {
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![a.clone(), Rat::one()]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Rational roots, each listed once, in increasing order.
    ///
    /// Exact and complete: the roots of the squarefree part modulo a prime
    /// `p` where it stays squarefree are Hensel-lifted until `p^k` exceeds
    /// `2·|a_0|·|a_n|`, then rationally reconstructed and checked. Every
    /// rational root `a/b` has `a | a_0` and `b | a_n`, so none is missed.
    pub fn rational_roots(&self) -> Vec<Rat> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut p = self.clone();
        if p.coeff(0).is_zero() {
            roots.push(Rat::zero());
            while p.coeff(0).is_zero() {
                p = Poly::new(p.coeffs[1..].to_vec());
            }
        }
        if p.degree().unwrap_or(0) > 0 {
            // squarefree modulo some small prime already certifies squarefree
            let ints = modular::integer_coeffs(&p);
            let ints = if modular::good_prime(&ints, 64).is_some() {
                ints
            } else {
                modular::integer_coeffs(&p.div_exact(&Poly::gcd(&p, &p.derivative())).expect("gcd divides"))
            };
            roots.extend(modular::rational_roots(&ints));
        }
        roots.sort();
        roots
    }
}

mod modular {
    use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

    use super::Rat;
    use crate::linalg::{is_prime, mul_mod, pow_mod};

    /// Primitive integer coefficients of a nonzero polynomial.
    pub fn integer_coeffs(p: &super::Poly) -> Vec<BigInt> {
        split(p).1
    }

    /// `p = content · primitive`, with a primitive integer part.
    pub fn split(p: &super::Poly) -> (Rat, Vec<BigInt>) {
        let (den, ints) = super::scaled_integers(&p.coeffs);
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let prim = if content.is_one() { ints } else { ints.into_iter().map(|c| c / &content).collect() };
        (Rat::new(content, den), prim)
    }

    pub fn from_ints(c: &[BigInt]) -> super::Poly {
        super::Poly::new(c.iter().map(|x| Rat::from_integer(x.clone())).collect())
    }

    /// `a / b` in `Z[t]` if exact.
    pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
        if a.len() < b.len() {
            return None;
        }
        let lead = b.last().unwrap();
        let mut rem = a.to_vec();
        let mut quot = vec![BigInt::zero(); a.len() - b.len() + 1];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + b.len() - 1];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, bj) in b.iter().enumerate() {
                rem[k + j] -= &q * bj;
            }
            quot[k] = q;
        }
        rem.iter().all(Zero::is_zero).then_some(quot)
    }

    fn reduce(c: &[BigInt], p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut out: Vec<u64> = c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    fn rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while r.len() >= b.len() {
            let c = mul_mod(*r.last().unwrap(), inv, p);
            let shift = r.len() - b.len();
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - mul_mod(c, *bj, p)) % p;
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        r
    }

    fn squarefree_mod(c: &[u64], p: u64) -> bool {
        let deriv: Vec<u64> = c.iter().enumerate().skip(1).map(|(i, x)| mul_mod(*x, i as u64 % p, p)).collect();
        let mut deriv = deriv;
        while deriv.last() == Some(&0) {
            deriv.pop();
        }
        if deriv.is_empty() {
            return false;
        }
        let (mut a, mut b) = (c.to_vec(), deriv);
        while !b.is_empty() {
            let r = rem_mod(&a, &b, p);
            a = b;
            b = r;
        }
        a.len() == 1
    }

    /// Primes just below `2^31`, largest first.
    fn word_primes() -> &'static [u64] {
        static PRIMES: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
        PRIMES.get_or_init(|| (0..(1u64 << 31)).rev().filter(|&n| is_prime(n)).take(256).collect())
    }

    fn monic_gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let r = rem_mod(&x, &y, p);
            x = y;
            y = r;
        }
        let inv = pow_mod(*x.last().unwrap(), p - 2, p);
        x.iter().map(|&c| mul_mod(c, inv, p)).collect()
    }

    /// Combines `g mod m` with `h mod p` into symmetric residues mod `m·p`.
    fn crt(g: &[BigInt], m: &BigInt, h: &[u64], p: u64) -> Vec<BigInt> {
        let pb = BigInt::from(p);
        let inv = inv_big(m, &pb).expect("distinct primes");
        let mp = m * &pb;
        let half = &mp / 2;
        g.iter()
            .zip(h)
            .map(|(gi, &hi)| {
                let t = ((BigInt::from(hi) - gi) * &inv).mod_floor(&pb);
                let mut x = (gi + m * t).mod_floor(&mp);
                if x > half {
                    x -= &mp;
                }
                x
            })
            .collect()
    }

    fn primitive(c: Vec<BigInt>) -> Vec<BigInt> {
        let content = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        c.into_iter().map(|x| x / &content).collect()
    }

    /// Primitive gcd in `Z[t]` of primitive `a`, `b` of positive degree,
    /// with both cofactors. `None` if the prime table runs out before the
    /// result stabilizes.
    #[allow(clippy::type_complexity)]
    pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>, Vec<BigInt>)> {
        let gamma = a.last().unwrap().gcd(b.last().unwrap());
        let mut degree = a.len().min(b.len());
        let mut acc: Option<(Vec<BigInt>, BigInt)> = None;
        for &p in word_primes() {
            let pb = BigInt::from(p);
            if (a.last().unwrap() % &pb).is_zero() || (b.last().unwrap() % &pb).is_zero() {
                continue;
            }
            let gp = monic_gcd_mod(&reduce(a, p), &reduce(b, p), p);
            if gp.len() == 1 {
                return Some((vec![BigInt::one()], a.to_vec(), b.to_vec()));
            }
            if gp.len() > degree {
                continue;
            }
            let lead = gamma.mod_floor(&pb).to_u64().unwrap();
            let gp: Vec<u64> = gp.iter().map(|&c| mul_mod(c, lead, p)).collect();
            let next = match acc.take() {
                Some((g, m)) if gp.len() == degree => {
                    let combined = crt(&g, &m, &gp, p);
                    if combined == g {
                        let cand = primitive(g.clone());
                        if let Some(qa) = div_exact(a, &cand) {
                            if let Some(qb) = div_exact(b, &cand) {
                                return Some((cand, qa, qb));
                            }
                        }
                    }
                    (combined, m * pb)
                }
                _ => {
                    degree = gp.len();
                    let half = p / 2;
                    let g = gp.iter().map(|&c| if c > half { BigInt::from(c) - &pb } else { BigInt::from(c) }).collect();
                    (g, pb)
                }
            };
            acc = Some(next);
        }
        None
    }

    fn eval_big(c: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
        c.iter().rev().fold(BigInt::zero(), |acc, a| (acc * x + a).mod_floor(m))
    }

    /// Inverse modulo `m`, if it exists.
    fn inv_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
        let e = a.mod_floor(m).extended_gcd(m);
        e.gcd.is_one().then(|| e.x.mod_floor(m))
    }

    /// `a/b ≡ u (mod m)` with `|a| ≤ n`, `0 < b ≤ d`, unique when `2nd < m`.
    fn reconstruct(u: &BigInt, m: &BigInt, n: &BigInt, d: &BigInt) -> Option<Rat> {
        let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
        let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
        while &r1 > n {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let s2 = &s0 - &q * &s1;
            r0 = std::mem::replace(&mut r1, r2);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if s1.is_zero() || &s1.abs() > d {
            return None;
        }
        Some(Rat::new(r1, s1))
    }

    /// A prime not dividing the leading coefficient modulo which `c` is
    /// squarefree, among the first `tries` primes above 1000.
    pub fn good_prime(c: &[BigInt], tries: usize) -> Option<u64> {
        (1009u64..).filter(|&p| is_prime(p)).take(tries).find(|&p| {
            let r = reduce(c, p);
            r.len() == c.len() && squarefree_mod(&r, p)
        })
    }

    pub fn rational_roots(c: &[BigInt]) -> Vec<Rat> {
        let lead = c.last().unwrap().abs();
        let constant = c[0].abs();
        let prime = good_prime(c, usize::MAX).expect("a squarefree polynomial stays squarefree modulo almost every prime");
        let small = reduce(c, prime);
        let limit = BigInt::from(2) * &constant * &lead;
        let deriv: Vec<BigInt> = c.iter().enumerate().skip(1).map(|(i, x)| x * BigInt::from(i)).collect();
        let mut found = Vec::new();
        for x0 in 0..prime {
            let v = small.iter().rev().fold(0u64, |acc, a| (mul_mod(acc, x0, prime) + a) % prime);
            if v != 0 {
                continue;
            }
            // Newton lifting doubles the precision each round
            let mut m = BigInt::from(prime);
            let mut x = BigInt::from(x0);
            while m <= limit {
                m = &m * &m;
                let fx = eval_big(c, &x, &m);
                let dfx = eval_big(&deriv, &x, &m);
                let inv = inv_big(&dfx, &m).expect("simple root modulo p");
                x = (&x - fx * inv).mod_floor(&m);
            }
            if let Some(r) = reconstruct(&x, &m, &constant, &lead) {
                let value = c.iter().rev().fold(Rat::zero(), |acc, a| acc * &r + Rat::from_integer(a.clone()));
                if value.is_zero() && !found.contains(&r) {
                    found.push(r);
                }
            }
        }
        found
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rat(c))?,
                1 => write!(f, "({})*t", format_rat(c))?,
                _ => write!(f, "({})*t^{}", format_rat(c), i)?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        // integer convolution, so fractions are normalized once per output coefficient
        let (da, ia) = scaled_integers(&self.coeffs);
        let (db, ib) = scaled_integers(&rhs.coeffs);
        let mut out = vec![BigInt::zero(); ia.len() + ib.len() - 1];
        for (i, a) in ia.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in ib.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        let den = da * db;
        Poly::new(out.into_iter().map(|c| Rat::new(c, den.clone())).collect())
    }
}

/// `(d, c·d)` with `d` the lcm of the denominators of `c`.
fn scaled_integers(c: &[Rat]) -> (BigInt, Vec<BigInt>) {
    use num::Integer;
    let d = c.iter().fold(BigInt::one(), |acc, x| if x.denom().is_one() { acc } else { acc.lcm(x.denom()) });
    let ints = c.iter().map(|x| if x.denom() == &d { x.numer().clone() } else { x.numer() * (&d / x.denom()) }).collect();
    (d, ints)
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rat::vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rat::vec::deserialize(d).map(Poly::new)
    }
}
