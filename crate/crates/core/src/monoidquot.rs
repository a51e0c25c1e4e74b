//! The monoid of scalar sections acting on coordinate vectors, and the
//! cross-multiplication witness identifying two vectors with the same image
//! line. Families over a one-parameter base `Q[s]` are supported.
//!
//! Monoid elements and line sections are compared up to a nonzero constant
//! from Q.

use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funfield::{FunFieldError, Poly, PuncturedCurve, Rat, RatFun};
use crate::opers::{LineSection, OperError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("monoid elements must be nonzero")]
    ZeroScalar,
    #[error("the two sections have different image lines")]
    NotSameImage,
    #[error("no index with a nonzero coordinate on both sides")]
    NoValidIndex,
    #[error("sections live at grades {0} and {1}")]
    GradeMismatch(usize, usize),
    #[error("family coordinates share the nonconstant factor {0}")]
    NonPrimitiveFamily(String),
    #[error("family specializes to zero at s = {0}")]
    DegenerateFamily(String),
    #[error("families have {0} and {1} coordinates")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Oper(#[from] OperError),
    #[error(transparent)]
    FunField(#[from] FunFieldError),
}

/// A nonzero element of `k^e[X]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidElt {
    e: usize,
    m: RatFun,
}

impl MonoidElt {
    pub fn new(curve: &PuncturedCurve, e: usize, m: RatFun) -> Result<Self, MonoidError> {
        if m.is_zero() {
            return Err(MonoidError::ZeroScalar);
        }
        let grade = curve.grade(&m)?;
        if grade > e {
            return Err(FunFieldError::GradeExceeded { grade, bound: e }.into());
        }
        Ok(MonoidElt { e, m })
    }

    pub fn identity() -> Self {
        MonoidElt { e: 0, m: RatFun::one() }
    }

    pub fn grade(&self) -> usize {
        self.e
    }

    pub fn value(&self) -> &RatFun {
        &self.m
    }

    pub fn mul(&self, other: &MonoidElt) -> MonoidElt {
        MonoidElt { e: self.e + other.e, m: &self.m * &other.m }
    }

    /// Equality in the projective space of `k^e[X]`.
    pub fn proj_eq(&self, other: &MonoidElt) -> bool {
        self.e == other.e && proportional(std::slice::from_ref(&self.m), std::slice::from_ref(&other.m))
    }
}

/// `b = c·a` for a nonzero constant `c`.
pub fn proportional(a: &[RatFun], b: &[RatFun]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(i) = a.iter().position(|x| !x.is_zero()) else {
        return b.iter().all(RatFun::is_zero);
    };
    let Some(c) = b[i].checked_div(&a[i]).and_then(|q| q.as_constant()) else {
        return false;
    };
    !c.is_zero() && a.iter().zip(b).all(|(x, y)| &x.scale(&c) == y)
}

pub fn act(curve: &PuncturedCurve, m: &MonoidElt, line: &LineSection) -> Result<LineSection, MonoidError> {
    if m.m.is_zero() {
        return Err(MonoidError::ZeroScalar);
    }
    let g = line.g().iter().map(|x| &m.m * x).collect();
    Ok(LineSection::new(curve, line.grade() + m.e, g)?)
}

/// Proportionality over the function field: `f_i·g_j = f_j·g_i` for all `i < j`.
pub fn same_image(f: &LineSection, g: &LineSection) -> bool {
    cross_equal(f.g(), g.g(), |a, b| a * b)
}

fn cross_equal<T: PartialEq>(f: &[T], g: &[T], mul: impl Fn(&T, &T) -> T) -> bool {
    if f.len() != g.len() {
        return false;
    }
    let n = f.len();
    (0..n).all(|i| (i + 1..n).all(|j| mul(&f[i], &g[j]) == mul(&f[j], &g[i])))
}

/// Returns true when `m·f = m'·f` (projectively) forces `m = m'` (projectively).
pub fn freeness_check(curve: &PuncturedCurve, m: &MonoidElt, m2: &MonoidElt, f: &LineSection) -> Result<bool, MonoidError> {
    let a = act(curve, m, f)?;
    let b = act(curve, m2, f)?;
    let images_equal = a.grade() == b.grade() && proportional(a.g(), b.g());
    Ok(!images_equal || m.proj_eq(m2))
}

/// `m1·f = m2·g`, at grade `2d`. `localizer` is 1 over Q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    pub m1: MonoidElt,
    pub m2: MonoidElt,
    pub localizer: Poly,
}

/// Cross-multiplication witness: with `i` the smallest index where `f_i ≠ 0`,
/// `m1 = g_i` and `m2 = f_i`.
pub fn find_witness(curve: &PuncturedCurve, f: &LineSection, g: &LineSection) -> Result<WitnessPair, MonoidError> {
    if f.grade() != g.grade() {
        return Err(MonoidError::GradeMismatch(f.grade(), g.grade()));
    }
    if !same_image(f, g) {
        return Err(MonoidError::NotSameImage);
    }
    let i = f.g().iter().position(|x| !x.is_zero()).ok_or(OperError::ZeroLine)?;
    if g.g()[i].is_zero() {
        return Err(MonoidError::NoValidIndex);
    }
    let d = f.grade();
    let m1 = MonoidElt::new(curve, d, g.g()[i].clone())?;
    let m2 = MonoidElt::new(curve, d, f.g()[i].clone())?;
    let lhs = act(curve, &m1, f)?;
    let rhs = act(curve, &m2, g)?;
    assert_eq!(lhs, rhs, "cross-multiplication identity");
    Ok(WitnessPair { m1, m2, localizer: Poly::one() })
}

/// An element of `Q[s] ⊗ k(t)`, stored as its coefficients in powers of `s`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FamilyFun {
    s_coeffs: Vec<RatFun>,
}

impl FamilyFun {
    pub fn new(mut s_coeffs: Vec<RatFun>) -> Self {
        while s_coeffs.last().is_some_and(RatFun::is_zero) {
            s_coeffs.pop();
        }
        FamilyFun { s_coeffs }
    }

    pub fn constant(f: RatFun) -> Self {
        FamilyFun::new(vec![f])
    }

    /// The parameter `s`.
    pub fn s() -> Self {
        FamilyFun::new(vec![RatFun::zero(), RatFun::one()])
    }

    pub fn s_coeffs(&self) -> &[RatFun] {
        &self.s_coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.s_coeffs.is_empty()
    }

    pub fn add(&self, other: &FamilyFun) -> FamilyFun {
        let n = self.s_coeffs.len().max(other.s_coeffs.len());
        let zero = RatFun::zero();
        FamilyFun::new(
            (0..n)
                .map(|k| self.s_coeffs.get(k).unwrap_or(&zero) + other.s_coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &FamilyFun) -> FamilyFun {
        if self.is_zero() || other.is_zero() {
            return FamilyFun::default();
        }
        let mut out = vec![RatFun::zero(); self.s_coeffs.len() + other.s_coeffs.len() - 1];
        for (i, a) in self.s_coeffs.iter().enumerate() {
            for (j, b) in other.s_coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        FamilyFun::new(out)
    }

    pub fn specialize(&self, s0: &Rat) -> RatFun {
        let mut acc = RatFun::zero();
        for c in self.s_coeffs.iter().rev() {
            acc = &(&acc * &RatFun::constant(s0.clone())) + c;
        }
        acc
    }

    pub fn grade(&self, curve: &PuncturedCurve) -> Result<usize, FunFieldError> {
        self.s_coeffs.iter().try_fold(0, |acc, c| Ok(acc.max(curve.grade(c)?)))
    }

    /// Coefficients `h_b(s)` with `self = sum_b h_b(s)·basis_b` in `k^d[X]`.
    pub fn basis_coefficients(&self, curve: &PuncturedCurve, d: usize) -> Result<Vec<Poly>, FunFieldError> {
        let space = curve.space_basis(d as i64)?;
        let per_power: Vec<Vec<Rat>> = self.s_coeffs.iter().map(|c| space.coordinates(c)).collect::<Result<_, _>>()?;
        Ok((0..space.dim())
            .map(|b| Poly::new(per_power.iter().map(|coords| coords[b].clone()).collect()))
            .collect())
    }
}

/// A coordinate vector of family functions at grade `d`, primitive in `s`:
/// the gcd of every coordinate coefficient is a nonzero constant, so no
/// specialization vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyLine {
    d: usize,
    g: Vec<FamilyFun>,
}

impl FamilyLine {
    pub fn new(curve: &PuncturedCurve, d: usize, g: Vec<FamilyFun>) -> Result<Self, MonoidError> {
        let mut content = Poly::zero();
        for x in &g {
            for h in x.basis_coefficients(curve, d)? {
                content = Poly::gcd(&content, &h);
            }
        }
        if content.is_zero() {
            return Err(OperError::ZeroLine.into());
        }
        if !content.is_constant() {
            return Err(MonoidError::NonPrimitiveFamily(format!("{content:?}")));
        }
        Ok(FamilyLine { d, g })
    }

    pub fn grade(&self) -> usize {
        self.d
    }

    pub fn g(&self) -> &[FamilyFun] {
        &self.g
    }

    pub fn act(&self, curve: &PuncturedCurve, m: &FamilyFun, e: usize) -> Result<FamilyLine, MonoidError> {
        if m.is_zero() {
            return Err(MonoidError::ZeroScalar);
        }
        FamilyLine::new(curve, self.d + e, self.g.iter().map(|x| m.mul(x)).collect())
    }
}

pub fn family_specialize(curve: &PuncturedCurve, line: &FamilyLine, s0: &Rat) -> Result<LineSection, MonoidError> {
    let g: Vec<RatFun> = line.g.iter().map(|x| x.specialize(s0)).collect();
    match LineSection::new(curve, line.d, g) {
        Err(OperError::ZeroLine) => Err(MonoidError::DegenerateFamily(crate::funfield::rat::format_rat(s0))),
        other => Ok(other?),
    }
}

pub fn family_same_image(f: &FamilyLine, g: &FamilyLine) -> bool {
    cross_equal(&f.g, &g.g, FamilyFun::mul)
}

/// Witness over `Q[s]`: `m1·f = m2·g` identically, and on the principal open
/// `h(s) ≠ 0` both `m1` and `m2` have nonzero fibers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyWitness {
    pub e: usize,
    pub m1: FamilyFun,
    pub m2: FamilyFun,
    pub localizer: Poly,
}

impl FamilyWitness {
    /// The fiber at `s0`; requires `h(s0) ≠ 0`.
    pub fn specialize(&self, curve: &PuncturedCurve, s0: &Rat) -> Result<WitnessPair, MonoidError> {
        if self.localizer.eval(s0).is_zero() {
            return Err(MonoidError::DegenerateFamily(crate::funfield::rat::format_rat(s0)));
        }
        Ok(WitnessPair {
            m1: MonoidElt::new(curve, self.e, self.m1.specialize(s0))?,
            m2: MonoidElt::new(curve, self.e, self.m2.specialize(s0))?,
            localizer: Poly::one(),
        })
    }
}

/// As [`find_witness`], with `h` the first nonzero basis coefficient of
/// `f_i·g_i` in `k^{2d}[X]`.
pub fn find_family_witness(curve: &PuncturedCurve, f: &FamilyLine, g: &FamilyLine) -> Result<FamilyWitness, MonoidError> {
    if f.d != g.d {
        return Err(MonoidError::GradeMismatch(f.d, g.d));
    }
    if f.g.len() != g.g.len() {
        return Err(MonoidError::LengthMismatch(f.g.len(), g.g.len()));
    }
    if !family_same_image(f, g) {
        return Err(MonoidError::NotSameImage);
    }
    let i = f.g.iter().position(|x| !x.is_zero()).ok_or(OperError::ZeroLine)?;
    if g.g[i].is_zero() {
        return Err(MonoidError::NoValidIndex);
    }
    let m1 = g.g[i].clone();
    let m2 = f.g[i].clone();
    let product = m1.mul(&m2);
    let localizer = product
        .basis_coefficients(curve, 2 * f.d)?
        .into_iter()
        .find(|h| !h.is_zero())
        .ok_or(MonoidError::NoValidIndex)?;
    let lhs: Vec<FamilyFun> = f.g.iter().map(|x| m1.mul(x)).collect();
    let rhs: Vec<FamilyFun> = g.g.iter().map(|x| m2.mul(x)).collect();
    assert_eq!(lhs, rhs, "cross-multiplication identity");
    Ok(FamilyWitness { e: f.d, m1, m2, localizer: localizer.monic() })
}
