use serde::Serialize;

use super::{Condition, LineSection, OperError};
use crate::funfield::{rat, Rat, RatFun};
use crate::linalg::Matrix;
use crate::localsys::{LocalSystem, SectionVector};

/// The partial flag spanned by `g, nabla g, ..., nabla^(r-1) g`.
///
/// `discriminant` is the product of the minors `det(rows[0..k] x cols[0..k])`
/// for `k = 1..=r`, where `cols` is chosen greedily: at step `k` the leftmost
/// column not yet used that keeps the minor nonzero is appended. The flag is
/// a flag of sub-bundles exactly where the discriminant is a unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub r: usize,
    pub rows: Vec<SectionVector>,
    pub columns: Vec<usize>,
    pub discriminant: RatFun,
}

impl Flag {
    /// Wraps arbitrary rows, for verification of externally produced flags.
    /// Fails if the rows are dependent.
    pub fn from_rows(rows: Vec<SectionVector>) -> Result<Self, OperError> {
        let (columns, discriminant) = leading_minors(&rows)?;
        Ok(Flag { r: rows.len(), rows, columns, discriminant })
    }
}

fn minor(rows: &[SectionVector], cols: &[usize]) -> RatFun {
    let k = cols.len();
    Matrix::from_fn(k, k, |i, j| rows[i][cols[j]].clone()).determinant()
}

fn leading_minors(rows: &[SectionVector]) -> Result<(Vec<usize>, RatFun), OperError> {
    let n = rows.first().map_or(0, Vec::len);
    let mut cols: Vec<usize> = Vec::new();
    let mut disc = RatFun::one();
    for k in 1..=rows.len() {
        let mut found = None;
        for c in (0..n).filter(|c| !cols.contains(c)) {
            let mut trial = cols.clone();
            trial.push(c);
            let m = minor(&rows[..k], &trial);
            if !m.is_zero() {
                found = Some((c, m));
                break;
            }
        }
        let (c, m) = found.ok_or(OperError::DegenerateFlag { step: k - 1 })?;
        cols.push(c);
        disc = &disc * &m;
    }
    Ok((cols, disc))
}

pub fn complete_flag(sys: &LocalSystem, line: &LineSection, r: usize) -> Result<Flag, OperError> {
    let n = sys.rank();
    if line.g().len() != n {
        return Err(OperError::RankMismatch { got: line.g().len(), rank: n });
    }
    if r == 0 || r > n {
        return Err(OperError::InvalidLength { r, rank: n });
    }
    let mut rows = vec![line.g().to_vec()];
    while rows.len() < r {
        let next = sys.nabla(rows.last().unwrap())?;
        rows.push(next);
    }
    Flag::from_rows(rows)
}

/// Output of [`verify_oper_gl`]. The certified domain is the locus of `X`
/// where `discriminant` is regular and nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlCertificate {
    pub discriminant: RatFun,
    /// Rational points of `X` where the discriminant vanishes.
    #[serde(with = "rat::vec")]
    pub excluded_points: Vec<Rat>,
    /// Whether the discriminant is a unit of `k[X]`, i.e. `U = X`.
    pub whole_curve: bool,
}

fn rank_of(rows: &[SectionVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows.to_vec()).rank()
}

pub fn verify_oper_gl(sys: &LocalSystem, flag: &Flag) -> Result<GlCertificate, OperError> {
    let rows = &flag.rows;
    for (k, row) in rows.iter().enumerate() {
        if row.len() != sys.rank() {
            return Err(OperError::RankMismatch { got: row.len(), rank: sys.rank() });
        }
        if rank_of(&rows[..=k]) != k + 1 {
            return Err(OperError::ConditionFailed(Condition::Rank(k)));
        }
    }
    for k in 0..rows.len().saturating_sub(1) {
        let image = sys.nabla(&rows[k])?;
        let mut upto_next = rows[..=k + 1].to_vec();
        upto_next.push(image.clone());
        if rank_of(&upto_next) != k + 2 {
            return Err(OperError::ConditionFailed(Condition::Containment(k)));
        }
        let mut upto_k = rows[..=k].to_vec();
        upto_k.push(image);
        if rank_of(&upto_k) != k + 2 {
            return Err(OperError::ConditionFailed(Condition::Quotient(k)));
        }
    }
    let (_, discriminant) = leading_minors(rows).map_err(|_| OperError::ConditionFailed(Condition::Rank(rows.len() - 1)))?;
    let curve = sys.curve();
    let excluded_points: Vec<Rat> = discriminant
        .num()
        .rational_roots()
        .into_iter()
        .filter(|a| !curve.finite_punctures().contains(a))
        .collect();
    let whole_curve = curve.is_unit(&discriminant);
    Ok(GlCertificate { discriminant, excluded_points, whole_curve })
}
