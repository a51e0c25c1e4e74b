use serde::{Deserialize, Serialize};

use super::{compute_c3, OperError};
use crate::localsys::LocalSystem;

/// `L_d = P^N` is cut out by `r` forms, so the pair is `(N - r)`-connected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    #[serde(rename = "N")]
    pub n: i64,
    pub r: i64,
    pub bound: i64,
    /// Coefficient of `d` in `bound` for large `d`.
    pub slope: i64,
}

pub fn count_and_bound(sys: &LocalSystem, d: usize) -> Result<ConnectivityReport, OperError> {
    let kind = sys.form().ok_or(OperError::NoForm)?.kind;
    let c3 = compute_c3(sys, kind)?;
    let curve = sys.curve();
    let rank = sys.rank() as i64;
    let punctures = curve.num_punctures() as i64;
    // both families use pair indices 0..m-1
    let indices = (sys.rank() / 2).saturating_sub(1) as i64;
    let n = rank * curve.space_dim(d as i64)? as i64 - 1;
    let r = indices * curve.space_dim((2 * d + c3) as i64)? as i64;
    Ok(ConnectivityReport { n, r, bound: n - r, slope: rank * punctures - indices * 2 * punctures })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct G2Report {
    pub ambient: i64,
    pub degrees: Vec<i64>,
    pub punctures: i64,
    pub slope: i64,
    /// `"diverges"` if the slack grows with `d`, `"fails"` otherwise.
    pub verdict: String,
}

/// Slack slope `(ambient - sum(degrees))·|D|` of the counting strategy.
pub fn g2_counting_report(punctures: usize, degrees: &[i64], ambient: i64) -> G2Report {
    let punctures = punctures as i64;
    let slope = (ambient - degrees.iter().sum::<i64>()) * punctures;
    let verdict = if slope > 0 { "diverges" } else { "fails" }.to_string();
    G2Report { ambient, degrees: degrees.to_vec(), punctures, slope, verdict }
}
