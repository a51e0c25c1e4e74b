//! Exact arithmetic on the function field of a punctured projective line.

mod curve;
mod poly;
pub mod rat;
mod ratfun;

pub use curve::{apply_nu, compute_d_nu, Derivation, Puncture, PuncturedCurve, SectionSpace};
pub use poly::Poly;
pub use rat::Rat;
pub use ratfun::RatFun;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunFieldError {
    #[error("negative grade {0}")]
    NegativeGrade(i64),
    #[error("{0} has a pole outside the puncture set")]
    PoleOutsideD(String),
    #[error("{0} is not a unit supported on the puncture set")]
    InvalidUnit(String),
    #[error("the puncture set must contain infinity")]
    MissingInfinity,
    #[error("puncture {0} listed twice")]
    DuplicatePuncture(String),
    #[error("element of grade {grade} does not lie in the grade-{bound} section space")]
    GradeExceeded { grade: usize, bound: usize },
}

/// Wire form of a curve together with its derivation:
/// `{"punctures": ["inf", "0", "3/2"], "derivation_unit": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSpec {
    pub punctures: Vec<Puncture>,
    #[serde(default = "RatFun::one")]
    pub derivation_unit: RatFun,
}

impl CurveSpec {
    pub fn build(&self) -> Result<(PuncturedCurve, Derivation), FunFieldError> {
        let curve = PuncturedCurve::new(self.punctures.clone())?;
        let nu = Derivation::new(&curve, self.derivation_unit.clone())?;
        Ok((curve, nu))
    }

    pub fn from_parts(curve: &PuncturedCurve, nu: &Derivation) -> Self {
        CurveSpec { punctures: curve.punctures(), derivation_unit: nu.unit().clone() }
    }
}
