use num::Zero;
use serde::Serialize;

use super::{complete_flag, full_pairing_matrix, gen_sp_equations, verify_oper_gl, Condition, LineSection, OperError};
use crate::funfield::{rat, Rat, RatFun};
use crate::localsys::{FormKind, LocalSystem};
use crate::numeric::{search_rational_point, SearchConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpCertificate {
    pub discriminant: RatFun,
    #[serde(with = "rat::vec")]
    pub excluded_points: Vec<Rat>,
    pub whole_curve: bool,
}

/// Exact check that `line` generates a symplectic oper: the first `m` rows of
/// its flag are isotropic, the flag completes to full rank, and the GL oper
/// conditions hold.
pub fn verify_oper_sp(sys: &LocalSystem, line: &LineSection) -> Result<SpCertificate, OperError> {
    let form = sys.form().ok_or(OperError::NoForm)?;
    if form.kind != FormKind::Symplectic {
        return Err(OperError::WrongKind { expected: FormKind::Symplectic, found: form.kind });
    }
    let m = sys.rank() / 2;
    let pairings = full_pairing_matrix(sys, line, m - 1)?;
    for i in 0..m {
        for j in 0..m {
            if !pairings[(i, j)].is_zero() {
                return Err(OperError::ConditionFailed(Condition::Pairing(i, j)));
            }
        }
    }
    let flag = complete_flag(sys, line, sys.rank())?;
    let gl = verify_oper_gl(sys, &flag)?;
    Ok(SpCertificate { discriminant: gl.discriminant, excluded_points: gl.excluded_points, whole_curve: gl.whole_curve })
}

/// Seeded search for a grade-`d` line generating a symplectic oper. Only
/// exactly verified lines are returned.
pub fn find_sp_oper(
    sys: &LocalSystem,
    d: usize,
    seed: u64,
    tries: usize,
) -> Result<Option<(LineSection, SpCertificate)>, OperError> {
    let system = gen_sp_equations(sys, d)?;
    let equations = system.to_mpolys();
    let curve = sys.curve();
    let rank = sys.rank();
    let accept = |x: &[Rat]| {
        LineSection::from_coordinates(curve, d, rank, x)
            .map(|line| verify_oper_sp(sys, &line).is_ok())
            .unwrap_or(false)
    };
    let found = search_rational_point(&equations, system.n_vars, seed, &SearchConfig::with_tries(tries), accept);
    let Some(x) = found else { return Ok(None) };
    debug_assert!(x.iter().any(|v| !v.is_zero()));
    let line = LineSection::from_coordinates(curve, d, rank, &x)?;
    let cert = verify_oper_sp(sys, &line)?;
    Ok(Some((line, cert)))
}
