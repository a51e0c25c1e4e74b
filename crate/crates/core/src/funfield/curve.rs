//! The punctured projective line `X = P^1 \ D`, the graded section spaces
//! `k^d[X]` of functions with poles of order at most `d` along `D`, and the
//! derivation `nu = u d/dt`.

use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rat::{format_rat, parse_rat, Rat};
use super::ratfun::RatFun;
use super::FunFieldError;
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Puncture {
    Infinity,
    Finite(Rat),
}

impl fmt::Display for Puncture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Puncture::Infinity => write!(f, "inf"),
            Puncture::Finite(a) => write!(f, "{}", format_rat(a)),
        }
    }
}

impl Serialize for Puncture {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Puncture {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "inf" | "infinity" | "∞" => Ok(Puncture::Infinity),
            _ => parse_rat(&s)
                .map(Puncture::Finite)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid puncture `{s}`"))),
        }
    }
}

/// A genus-0 curve with an explicit puncture set containing infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuncturedCurve {
    finite: Vec<Rat>,
}

impl PuncturedCurve {
    pub fn new(punctures: Vec<Puncture>) -> Result<Self, FunFieldError> {
        let mut has_inf = false;
        let mut finite = Vec::new();
        for p in punctures {
            match p {
                Puncture::Infinity if has_inf => return Err(FunFieldError::DuplicatePuncture("inf".into())),
                Puncture::Infinity => has_inf = true,
                Puncture::Finite(a) => {
                    if finite.contains(&a) {
                        return Err(FunFieldError::DuplicatePuncture(format_rat(&a)));
                    }
                    finite.push(a);
                }
            }
        }
        if !has_inf {
            return Err(FunFieldError::MissingInfinity);
        }
        Ok(PuncturedCurve { finite })
    }

    /// `A^1`, i.e. `D = {inf}`.
    pub fn affine_line() -> Self {
        PuncturedCurve { finite: Vec::new() }
    }

    /// `D = {inf} ∪ finite`.
    pub fn with_finite(finite: &[Rat]) -> Result<Self, FunFieldError> {
        let mut p = vec![Puncture::Infinity];
        p.extend(finite.iter().cloned().map(Puncture::Finite));
        PuncturedCurve::new(p)
    }

    pub fn finite_punctures(&self) -> &[Rat] {
        &self.finite
    }

    pub fn punctures(&self) -> Vec<Puncture> {
        let mut p = vec![Puncture::Infinity];
        p.extend(self.finite.iter().cloned().map(Puncture::Finite));
        p
    }

    /// `|D|`.
    pub fn num_punctures(&self) -> usize {
        self.finite.len() + 1
    }

    pub fn genus(&self) -> i64 {
        0
    }

    /// `dim k^d[X] = d|D| - g + 1`.
    pub fn space_dim(&self, d: i64) -> Result<usize, FunFieldError> {
        if d < 0 {
            return Err(FunFieldError::NegativeGrade(d));
        }
        Ok((d * self.num_punctures() as i64 - self.genus() + 1) as usize)
    }

    /// Explicit basis of `k^d[X]`. Grade-major: `1`, then for each
    /// `m = 1..=d` the element `t^m` followed by `(t - a)^(-m)` for each
    /// finite puncture in declaration order, so the basis of grade `d` is a
    /// prefix of the basis of grade `d + 1`.
    pub fn space_basis(&self, d: i64) -> Result<SectionSpace, FunFieldError> {
        if d < 0 {
            return Err(FunFieldError::NegativeGrade(d));
        }
        let d = d as usize;
        let mut basis = vec![RatFun::one()];
        for m in 1..=d {
            basis.push(RatFun::from(Poly::monomial(Rat::one(), m)));
            for a in &self.finite {
                basis.push(RatFun::inverse_power(a, m as u32));
            }
        }
        Ok(SectionSpace::build(self.clone(), d, basis))
    }

    /// Whether `f` has no pole on `X`.
    pub fn is_regular(&self, f: &RatFun) -> bool {
        let (rest, _) = f.den().strip_roots(&self.finite);
        rest.is_constant()
    }

    /// The least `d` with `f ∈ k^d[X]`: the largest pole order along `D`.
    /// Zero has grade 0.
    pub fn grade(&self, f: &RatFun) -> Result<usize, FunFieldError> {
        if f.is_zero() {
            return Ok(0);
        }
        let (rest, mult) = f.den().strip_roots(&self.finite);
        if !rest.is_constant() {
            return Err(FunFieldError::PoleOutsideD(f.to_string()));
        }
        let at_inf = (-f.order_at_infinity().unwrap()).max(0) as usize;
        Ok(mult.into_iter().fold(at_inf, usize::max))
    }

    /// Whether `f` is a unit of `k[X]`: nonzero, with zeros and poles only
    /// along `D`.
    pub fn is_unit(&self, f: &RatFun) -> bool {
        if f.is_zero() {
            return false;
        }
        let (n, _) = f.num().strip_roots(&self.finite);
        let (d, _) = f.den().strip_roots(&self.finite);
        n.is_constant() && d.is_constant()
    }
}

/// `nu = u d/dt` for a unit `u` of `k[X]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    unit: RatFun,
    d_nu: usize,
}

impl Derivation {
    pub fn new(curve: &PuncturedCurve, unit: RatFun) -> Result<Self, FunFieldError> {
        if !curve.is_unit(&unit) {
            return Err(FunFieldError::InvalidUnit(unit.to_string()));
        }
        let d_nu = compute_d_nu(curve, &unit)?;
        Ok(Derivation { unit, d_nu })
    }

    /// `d/dt`; a unit on every admissible curve since infinity is punctured.
    pub fn standard(curve: &PuncturedCurve) -> Self {
        Derivation::new(curve, RatFun::one()).expect("1 is a unit")
    }

    pub fn unit(&self) -> &RatFun {
        &self.unit
    }

    pub fn d_nu(&self) -> usize {
        self.d_nu
    }

    /// `u * df/dt`, without a regularity check.
    pub fn apply(&self, f: &RatFun) -> RatFun {
        &self.unit * &f.derivative()
    }
}

/// `nu(f)` for `f` regular on `X`.
pub fn apply_nu(curve: &PuncturedCurve, nu: &Derivation, f: &RatFun) -> Result<RatFun, FunFieldError> {
    if !curve.is_regular(f) {
        return Err(FunFieldError::PoleOutsideD(f.to_string()));
    }
    Ok(nu.apply(f))
}

/// The least `b ≥ 0` with `grade(nu(e)) ≤ grade(e) + b` for every basis
/// element of every `k^d[X]`.
///
/// For the families `t^m` and `(t-a)^(-m)` the excess
/// `grade(nu(e)) - grade(e)` is a maximum of terms that are either constant
/// or strictly decreasing in `m`, so the supremum is attained for small `m`;
/// scanning `m` up to `grade(u) + 2` covers it.
pub fn compute_d_nu(curve: &PuncturedCurve, unit: &RatFun) -> Result<usize, FunFieldError> {
    if !curve.is_unit(unit) {
        return Err(FunFieldError::InvalidUnit(unit.to_string()));
    }
    let nu = |f: &RatFun| unit * &f.derivative();
    let scan = curve.grade(unit)? + 2;
    let mut best: i64 = 0;
    for m in 1..=scan {
        let mut shapes = vec![RatFun::from(Poly::monomial(Rat::one(), m))];
        shapes.extend(curve.finite.iter().map(|a| RatFun::inverse_power(a, m as u32)));
        for e in shapes {
            let excess = curve.grade(&nu(&e))? as i64 - m as i64;
            best = best.max(excess);
        }
    }
    Ok(best as usize)
}

/// `k^d[X]` with its basis and a coordinate decoder.
///
/// Multiplying by `Q = prod_{a finite} (t - a)^d` identifies `k^d[X]` with
/// polynomials of degree at most `d|D|`; coordinates are recovered by
/// inverting that square change of basis once.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    curve: PuncturedCurve,
    d: usize,
    basis: Vec<RatFun>,
    clearing: Poly,
    decode: Matrix<Rat>,
}

impl SectionSpace {
    fn build(curve: PuncturedCurve, d: usize, basis: Vec<RatFun>) -> Self {
        let clearing = curve
            .finite
            .iter()
            .fold(Poly::one(), |acc, a| &acc * &Poly::linear_root(a).pow(d as u32));
        let n = basis.len();
        let cleared: Vec<Poly> = basis
            .iter()
            .map(|b| {
                let p = b.num() * &clearing;
                p.div_exact(b.den()).expect("basis element clears")
            })
            .collect();
        let encode = Matrix::from_fn(n, n, |i, j| cleared[j].coeff(i));
        let decode = encode.inverse().expect("cleared basis is a basis of polynomials of degree ≤ d|D|");
        SectionSpace { curve, d, basis, clearing, decode }
    }

    pub fn curve(&self) -> &PuncturedCurve {
        &self.curve
    }

    pub fn grade(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &[RatFun] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `f` in the basis; fails if `f ∉ k^d[X]`.
    pub fn coordinates(&self, f: &RatFun) -> Result<Vec<Rat>, FunFieldError> {
        let n = self.dim();
        if f.is_zero() {
            return Ok(vec![Rat::zero(); n]);
        }
        let grade = self.curve.grade(f)?;
        if grade > self.d {
            return Err(FunFieldError::GradeExceeded { grade, bound: self.d });
        }
        let cleared = (f.num() * &self.clearing)
            .div_exact(f.den())
            .ok_or_else(|| FunFieldError::PoleOutsideD(f.to_string()))?;
        let coeffs: Vec<Rat> = (0..n).map(|i| cleared.coeff(i)).collect();
        Ok(self.decode.mul_vec(&coeffs))
    }

    pub fn element(&self, coords: &[Rat]) -> RatFun {
        assert_eq!(coords.len(), self.dim());
        let mut num = Poly::zero();
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            let p = (b.num() * &self.clearing).div_exact(b.den()).unwrap();
            num = &num + &p.scale(c);
        }
        RatFun::new(num, self.clearing.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funfield::rat::{int, rat};

    fn curve(finite: &[i64]) -> PuncturedCurve {
        PuncturedCurve::with_finite(&finite.iter().map(|&a| int(a)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(curve(&[]).space_dim(5).unwrap(), 6);
        assert_eq!(curve(&[0]).space_dim(0).unwrap(), 1);
        assert_eq!(curve(&[0, 1]).space_dim(4).unwrap(), 13);
        assert!(matches!(curve(&[]).space_dim(-1), Err(FunFieldError::NegativeGrade(-1))));
    }

    #[test]
    fn dimension_matches_partial_fraction_count() {
        // {1} ∪ {t^m} ∪ {(t-a)^{-m}} for D = {0, 1, inf}, d = 4
        let count = 1 + 4 + 2 * 4;
        assert_eq!(curve(&[0, 1]).space_basis(4).unwrap().dim(), count);
    }

    #[test]
    fn basis_examples() {
        let b = curve(&[]).space_basis(2).unwrap();
        assert_eq!(b.basis(), &[RatFun::one(), RatFun::t(), RatFun::t().powi(2)]);
        let b = curve(&[0]).space_basis(1).unwrap();
        assert_eq!(b.basis(), &[RatFun::one(), RatFun::t(), RatFun::inverse_power(&int(0), 1)]);
        assert_eq!(curve(&[]).space_basis(0).unwrap().basis(), &[RatFun::one()]);
    }

    #[test]
    fn grade_examples() {
        assert_eq!(curve(&[]).grade(&RatFun::t().powi(3)).unwrap(), 3);
        assert_eq!(curve(&[0]).grade(&RatFun::inverse_power(&int(0), 2)).unwrap(), 2);
        assert_eq!(curve(&[]).grade(&RatFun::from_int(5)).unwrap(), 0);
        assert!(matches!(
            curve(&[]).grade(&RatFun::inverse_power(&int(1), 1)),
            Err(FunFieldError::PoleOutsideD(_))
        ));
    }

    #[test]
    fn nu_examples() {
        let c0 = curve(&[0]);
        let nu = Derivation::standard(&c0);
        assert_eq!(apply_nu(&c0, &nu, &RatFun::t().powi(2)).unwrap(), RatFun::t().scale(&int(2)));
        assert_eq!(
            apply_nu(&c0, &nu, &RatFun::inverse_power(&int(0), 1)).unwrap(),
            -RatFun::inverse_power(&int(0), 2)
        );
        assert!(apply_nu(&c0, &nu, &RatFun::from_int(7)).unwrap().is_zero());
        assert!(apply_nu(&c0, &nu, &RatFun::inverse_power(&int(2), 1)).is_err());
    }

    #[test]
    fn d_nu_examples() {
        assert_eq!(compute_d_nu(&curve(&[]), &RatFun::one()).unwrap(), 0);
        assert_eq!(compute_d_nu(&curve(&[0]), &RatFun::one()).unwrap(), 1);
        assert_eq!(compute_d_nu(&curve(&[0]), &RatFun::t()).unwrap(), 0);
        assert!(matches!(compute_d_nu(&curve(&[]), &RatFun::t()), Err(FunFieldError::InvalidUnit(_))));
    }

    #[test]
    fn curve_validation() {
        assert!(matches!(
            PuncturedCurve::new(vec![Puncture::Finite(int(0))]),
            Err(FunFieldError::MissingInfinity)
        ));
        assert!(PuncturedCurve::new(vec![Puncture::Infinity, Puncture::Finite(rat(1, 2)), Puncture::Finite(rat(2, 4))]).is_err());
    }

    #[test]
    fn coordinates_roundtrip() {
        let c = curve(&[0, 3]);
        let space = c.space_basis(3).unwrap();
        for (k, b) in space.basis().iter().enumerate() {
            let coords = space.coordinates(b).unwrap();
            for (j, x) in coords.iter().enumerate() {
                assert_eq!(x, &if j == k { int(1) } else { int(0) });
            }
        }
        let f = &(&RatFun::t().powi(2) + &RatFun::inverse_power(&int(3), 2).scale(&rat(-2, 5)))
            + &RatFun::inverse_power(&int(0), 1);
        let coords = space.coordinates(&f).unwrap();
        assert_eq!(space.element(&coords), f);
        assert!(matches!(
            space.coordinates(&RatFun::t().powi(4)),
            Err(FunFieldError::GradeExceeded { grade: 4, bound: 3 })
        ));
    }
}
