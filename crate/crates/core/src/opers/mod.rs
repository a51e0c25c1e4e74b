//! Oper machinery: flag completion for GL(n), the quadric systems cutting
//! out Sp/SO opers, and the dimension counts behind the connectivity bound.

mod counting;
mod flag;
mod quadrics;
mod search;

pub use counting::{count_and_bound, g2_counting_report, ConnectivityReport, G2Report};
pub use flag::{complete_flag, verify_oper_gl, Flag, GlCertificate};
pub use quadrics::{compute_c3, full_pairing_matrix, gen_so_equations, gen_sp_equations, QuadEquation, QuadraticSystem};
pub use search::{find_sp_oper, verify_oper_sp, SpCertificate};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::funfield::{FunFieldError, PuncturedCurve, Rat, RatFun};
use crate::localsys::{FormKind, LocalSysError, SectionVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", content = "index", rename_all = "lowercase")]
pub enum Condition {
    /// The first `k+1` rows are not independent.
    Rank(usize),
    /// `nabla(row_k)` leaves the span of rows `0..=k+1`.
    Containment(usize),
    /// `nabla(row_k)` stays inside the span of rows `0..=k`.
    Quotient(usize),
    /// `<nabla^i g, nabla^j g> ≠ 0`.
    Pairing(usize, usize),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Rank(k) => write!(f, "rank at step {k}"),
            Condition::Containment(k) => write!(f, "containment at step {k}"),
            Condition::Quotient(k) => write!(f, "quotient map at step {k}"),
            Condition::Pairing(i, j) => write!(f, "pairing ({i},{j})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperError {
    #[error("rows become dependent at step {step}")]
    DegenerateFlag { step: usize },
    #[error("condition failed: {0}")]
    ConditionFailed(Condition),
    #[error("the system carries no bilinear form")]
    NoForm,
    #[error("expected a {expected:?} form, found {found:?}")]
    WrongKind { expected: FormKind, found: FormKind },
    #[error("flag length {r} outside 1..={rank}")]
    InvalidLength { r: usize, rank: usize },
    #[error("line section is zero")]
    ZeroLine,
    #[error("line section has {got} entries, system rank is {rank}")]
    RankMismatch { got: usize, rank: usize },
    #[error(transparent)]
    LocalSys(#[from] LocalSysError),
    #[error(transparent)]
    FunField(#[from] FunFieldError),
}

/// A generic line in coordinates: a nonzero vector `g` with entries in
/// `k^d[X]`. Its coordinate vector lists, entry by entry, the coefficients
/// in the `space_basis(d)` basis, so variable `p = entry·dim + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSection {
    d: usize,
    g: SectionVector,
}

impl LineSection {
    pub fn new(curve: &PuncturedCurve, d: usize, g: SectionVector) -> Result<Self, OperError> {
        if g.iter().all(RatFun::is_zero) {
            return Err(OperError::ZeroLine);
        }
        for x in &g {
            let grade = curve.grade(x)?;
            if grade > d {
                return Err(FunFieldError::GradeExceeded { grade, bound: d }.into());
            }
        }
        Ok(LineSection { d, g })
    }

    pub fn from_coordinates(curve: &PuncturedCurve, d: usize, rank: usize, coords: &[Rat]) -> Result<Self, OperError> {
        let space = curve.space_basis(d as i64)?;
        let dim = space.dim();
        if coords.len() != rank * dim {
            return Err(OperError::RankMismatch { got: coords.len() / dim.max(1), rank });
        }
        let g = coords.chunks(dim).map(|c| space.element(c)).collect();
        LineSection::new(curve, d, g)
    }

    pub fn grade(&self) -> usize {
        self.d
    }

    pub fn g(&self) -> &[RatFun] {
        &self.g
    }

    pub fn coordinates(&self, curve: &PuncturedCurve) -> Vec<Rat> {
        let space = curve.space_basis(self.d as i64).expect("grade is nonnegative");
        self.g
            .iter()
            .flat_map(|x| space.coordinates(x).expect("entries lie in the grade-d space"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().all(|x| x.num().is_zero())
    }
}

/// Rationals as strings inside JSON matrices.
pub(crate) mod rat_matrix {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::funfield::rat::{format_rat, parse_rat};
    use crate::funfield::Rat;
    use crate::linalg::Matrix;

    pub fn serialize<S: Serializer>(m: &Matrix<Rat>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..m.rows()).map(|i| m.row(i).iter().map(format_rat).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix<Rat>, D::Error> {
        use serde::de::Error;
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_rat(x).ok_or_else(|| D::Error::custom(format!("invalid rational `{x}`")))).collect())
            .collect::<Result<Vec<Vec<Rat>>, _>>()?;
        if parsed.iter().any(|r| r.len() != parsed.first().map_or(0, Vec::len)) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(Matrix::from_rows(parsed))
    }
}
