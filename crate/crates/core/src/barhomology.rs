//! Bar constructions `B(M, A)_n = M^n × A` for finite or grade-truncated
//! commutative monoid actions, the category `A//M`, and exact homology over
//! Q or F_p.
//!
//! Graded inputs are truncated at a cap `G`: only cells of total grade at
//! most `G` are kept. Faces never raise the total grade, so the truncation
//! is a subcomplex.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funfield::PuncturedCurve;
use crate::linalg::{bareiss_rank, is_prime, rank_mod_p};
use crate::monoidquot::{act, proportional, MonoidElt, MonoidError};
use crate::opers::LineSection;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarError {
    #[error("invalid action table: {0}")]
    InvalidTable(String),
    #[error("law fails: {0}")]
    LawViolated(String),
    #[error("a face of a cell in degree {degree} leaves the grade cap")]
    TruncationUnsound { degree: usize },
    #[error("simplicial degree cap must be at least 1")]
    ZeroTruncation,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// A commutative monoid acting on a set, by tables. `None` entries are
/// products beyond the grade cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidAction {
    pub elements: Vec<String>,
    pub identity: usize,
    pub mul: Vec<Vec<Option<usize>>>,
    pub points: Vec<String>,
    pub act: Vec<Vec<Option<usize>>>,
    /// Grade of each monoid element; all zero for ungraded monoids.
    #[serde(default)]
    pub grade: Vec<u32>,
    /// Grade of each point; all zero when absent.
    #[serde(default)]
    pub point_grade: Vec<u32>,
    /// Cap on the total grade of bar cells; `None` keeps everything.
    #[serde(default)]
    pub grade_cap: Option<u32>,
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl MonoidAction {
    /// Validates shapes and the monoid and action laws wherever the tables
    /// are defined.
    pub fn new(action: MonoidAction) -> Result<Self, BarError> {
        let mut a = action;
        let (nm, na) = (a.elements.len(), a.points.len());
        if a.grade.is_empty() {
            a.grade = vec![0; nm];
        }
        if a.point_grade.is_empty() {
            a.point_grade = vec![0; na];
        }
        let shape_ok = nm > 0
            && a.identity < nm
            && a.grade.len() == nm
            && a.point_grade.len() == na
            && a.mul.len() == nm
            && a.mul.iter().all(|r| r.len() == nm && r.iter().flatten().all(|&x| x < nm))
            && a.act.len() == nm
            && a.act.iter().all(|r| r.len() == na && r.iter().flatten().all(|&x| x < na));
        if !shape_ok {
            return Err(BarError::InvalidTable("table shapes or indices out of range".into()));
        }
        let e = a.identity;
        for m in 0..nm {
            if a.mul[e][m] != Some(m) || a.mul[m][e] != Some(m) {
                return Err(BarError::LawViolated(format!("identity times {}", a.elements[m])));
            }
            for n in 0..nm {
                if a.mul[m][n] != a.mul[n][m] {
                    return Err(BarError::LawViolated(format!("commutativity at ({m},{n})")));
                }
                if let Some(p) = a.mul[m][n] {
                    if a.grade[p] != a.grade[m] + a.grade[n] {
                        return Err(BarError::LawViolated(format!("grade of ({m},{n})")));
                    }
                }
                for k in 0..nm {
                    let left = a.mul[m][n].and_then(|p| a.mul[p][k]);
                    let right = a.mul[n][k].and_then(|q| a.mul[m][q]);
                    if left.is_some() && right.is_some() && left != right {
                        return Err(BarError::LawViolated(format!("associativity at ({m},{n},{k})")));
                    }
                }
                for x in 0..na {
                    let left = a.mul[m][n].and_then(|p| a.act[p][x]);
                    let right = a.act[n][x].and_then(|y| a.act[m][y]);
                    if left.is_some() && right.is_some() && left != right {
                        return Err(BarError::LawViolated(format!("action law at ({m},{n},{x})")));
                    }
                }
            }
        }
        for x in 0..na {
            if a.act[e][x] != Some(x) {
                return Err(BarError::LawViolated(format!("identity on {}", a.points[x])));
            }
            for m in 0..nm {
                if let Some(y) = a.act[m][x] {
                    if a.point_grade[y] != a.grade[m] + a.point_grade[x] {
                        return Err(BarError::LawViolated(format!("grade of {m}·{x}")));
                    }
                }
            }
        }
        Ok(a)
    }

    /// The trivial monoid on `k` points.
    pub fn trivial(k: usize) -> Self {
        MonoidAction::new(MonoidAction {
            elements: vec!["1".into()],
            identity: 0,
            mul: vec![vec![Some(0)]],
            points: labels("a", k),
            act: vec![(0..k).map(Some).collect()],
            grade: vec![],
            point_grade: vec![],
            grade_cap: None,
        })
        .unwrap()
    }

    /// `Z/n` acting on itself by translation.
    pub fn cyclic_regular(n: usize) -> Self {
        let table: Vec<Vec<Option<usize>>> = (0..n).map(|i| (0..n).map(|j| Some((i + j) % n)).collect()).collect();
        MonoidAction::new(MonoidAction {
            elements: labels("g", n),
            identity: 0,
            mul: table.clone(),
            points: labels("x", n),
            act: table,
            grade: vec![],
            point_grade: vec![],
            grade_cap: None,
        })
        .unwrap()
    }

    /// `Z/n` acting trivially on a point.
    pub fn cyclic_on_point(n: usize) -> Self {
        MonoidAction::new(MonoidAction {
            elements: labels("g", n),
            identity: 0,
            mul: (0..n).map(|i| (0..n).map(|j| Some((i + j) % n)).collect()).collect(),
            points: vec!["pt".into()],
            act: vec![vec![Some(0)]; n],
            grade: vec![],
            point_grade: vec![],
            grade_cap: None,
        })
        .unwrap()
    }

    /// The graded monoid `N` acting on `N` by addition, truncated at `cap`.
    pub fn naturals(cap: u32) -> Self {
        let n = cap as usize + 1;
        let table: Vec<Vec<Option<usize>>> = (0..n).map(|i| (0..n).map(|j| (i + j < n).then_some(i + j)).collect()).collect();
        MonoidAction::new(MonoidAction {
            elements: (0..n).map(|i| i.to_string()).collect(),
            identity: 0,
            mul: table.clone(),
            points: (0..n).map(|i| i.to_string()).collect(),
            act: table,
            grade: (0..=cap).collect(),
            point_grade: (0..=cap).collect(),
            grade_cap: Some(cap),
        })
        .unwrap()
    }

    /// Disjoint union of two actions of the same monoid.
    pub fn disjoint_union(&self, other: &MonoidAction) -> Result<Self, BarError> {
        if self.mul != other.mul || self.identity != other.identity || self.grade != other.grade {
            return Err(BarError::InvalidTable("actions of different monoids".into()));
        }
        let offset = self.points.len();
        let act = self
            .act
            .iter()
            .zip(&other.act)
            .map(|(r, s)| r.iter().copied().chain(s.iter().map(|x| x.map(|y| y + offset))).collect())
            .collect();
        let mut points = self.points.clone();
        points.extend(other.points.iter().map(|p| format!("{p}'")));
        let mut point_grade = self.point_grade.clone();
        point_grade.extend(&other.point_grade);
        let grade_cap = match (self.grade_cap, other.grade_cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        MonoidAction::new(MonoidAction {
            elements: self.elements.clone(),
            identity: self.identity,
            mul: self.mul.clone(),
            points,
            act,
            grade: self.grade.clone(),
            point_grade,
            grade_cap,
        })
    }

    /// A finite sub-action of scalar sections acting on line sections:
    /// monoid elements are the products of `generators` (compared up to a
    /// constant) of grade at most `cap`, and points are their images of
    /// `base`. Grades are the section grades, shifted so `base` has grade 0.
    pub fn from_scalar_sample(
        curve: &PuncturedCurve,
        generators: &[MonoidElt],
        base: &LineSection,
        cap: u32,
    ) -> Result<Self, BarError> {
        let mut elts = vec![MonoidElt::identity()];
        let mut frontier = vec![MonoidElt::identity()];
        while let Some(m) = frontier.pop() {
            for g in generators {
                let p = m.mul(g);
                if p.grade() as u32 <= cap && !elts.iter().any(|x| x.proj_eq(&p)) {
                    elts.push(p.clone());
                    frontier.push(p);
                }
            }
        }
        let find_elt = |p: &MonoidElt| elts.iter().position(|x| x.proj_eq(p));
        let mut pts: Vec<LineSection> = Vec::new();
        for m in &elts {
            let v = act(curve, m, base)?;
            if !pts.iter().any(|x| x.grade() == v.grade() && proportional(x.g(), v.g())) {
                pts.push(v);
            }
        }
        let find_pt = |v: &LineSection| pts.iter().position(|x| x.grade() == v.grade() && proportional(x.g(), v.g()));
        let mul = elts
            .iter()
            .map(|m| elts.iter().map(|n| find_elt(&m.mul(n))).collect())
            .collect();
        let mut act_table = Vec::with_capacity(elts.len());
        for m in &elts {
            let mut row = Vec::with_capacity(pts.len());
            for x in &pts {
                let v = act(curve, m, x)?;
                row.push(if (v.grade() - base.grade()) as u32 <= cap { find_pt(&v) } else { None });
            }
            act_table.push(row);
        }
        MonoidAction::new(MonoidAction {
            elements: elts.iter().map(|m| m.value().to_string()).collect(),
            identity: 0,
            mul,
            points: pts.iter().map(|v| format!("{:?}", v.g())).collect(),
            act: act_table,
            grade: elts.iter().map(|m| m.grade() as u32).collect(),
            point_grade: pts.iter().map(|v| (v.grade() - base.grade()) as u32).collect(),
            grade_cap: Some(cap),
        })
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessReport {
    pub free: bool,
    /// `(m, n, a)` with `m ≠ n` and `m·a = n·a`.
    pub counterexample: Option<(usize, usize, usize)>,
}

pub fn check_free(action: &MonoidAction) -> FreenessReport {
    let nm = action.num_elements();
    for a in 0..action.num_points() {
        for m in 0..nm {
            for n in m + 1..nm {
                if action.act[m][a].is_some() && action.act[m][a] == action.act[n][a] {
                    return FreenessReport { free: false, counterexample: Some((m, n, a)) };
                }
            }
        }
    }
    FreenessReport { free: true, counterexample: None }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitivityReport {
    pub w_transitive: bool,
    /// `(a, b)` admitting no `m, n` with `m·a = n·b`.
    pub counterexample: Option<(usize, usize)>,
}

pub fn check_w_transitive(action: &MonoidAction) -> TransitivityReport {
    let na = action.num_points();
    let orbit = |a: usize| -> Vec<usize> { action.act.iter().filter_map(|row| row[a]).collect() };
    let orbits: Vec<Vec<usize>> = (0..na).map(orbit).collect();
    for a in 0..na {
        for b in a + 1..na {
            if !orbits[a].iter().any(|x| orbits[b].contains(x)) {
                return TransitivityReport { w_transitive: false, counterexample: Some((a, b)) };
            }
        }
    }
    TransitivityReport { w_transitive: true, counterexample: None }
}

/// The category `A//M`: objects are points, `Mor(a, b) = {m | m·a = b}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NervePoset {
    pub objects: usize,
    pub morphisms: Vec<Vec<Vec<usize>>>,
    pub is_poset: bool,
}

pub fn nerve_poset(action: &MonoidAction) -> NervePoset {
    let na = action.num_points();
    let mut morphisms = vec![vec![Vec::new(); na]; na];
    for (m, row) in action.act.iter().enumerate() {
        for (a, b) in row.iter().enumerate() {
            if let Some(b) = b {
                morphisms[a][*b].push(m);
            }
        }
    }
    let is_poset = morphisms.iter().flatten().all(|s| s.len() <= 1);
    if check_free(action).free {
        assert!(is_poset, "a free action has at most one morphism between two points");
    }
    NervePoset { objects: na, morphisms, is_poset }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffField {
    Rational,
    Prime(u64),
}

impl CoeffField {
    pub fn prime(p: u64) -> Result<Self, BarError> {
        if is_prime(p) {
            Ok(CoeffField::Prime(p))
        } else {
            Err(BarError::NotPrime(p))
        }
    }
}

impl fmt::Display for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffField::Rational => write!(f, "Q"),
            CoeffField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for CoeffField {
    type Err = String;

    /// Accepts `Q`, `F2`, `F_2` or a bare prime.
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(CoeffField::Rational);
        }
        let digits = t.trim_start_matches(['F', 'f']).trim_start_matches('_');
        let p: u64 = digits.parse().map_err(|_| format!("unknown field `{s}`"))?;
        CoeffField::prime(p).map_err(|e| e.to_string())
    }
}

impl Serialize for CoeffField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A cell `(m_1, ..., m_n, a)`.
pub type Cell = (Vec<usize>, usize);

/// The truncated bar complex. `boundaries[n]` maps degree `n` to degree
/// `n-1` as a dense integer matrix with rows indexed by `cells[n-1]`;
/// `boundaries[0]` is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarComplex {
    pub truncation: usize,
    pub normalized: bool,
    pub field: CoeffField,
    pub cells: Vec<Vec<Cell>>,
    /// `|M|^n·|A|`-style counts before discarding degenerate cells.
    pub raw_counts: Vec<usize>,
    pub boundaries: Vec<Vec<Vec<i64>>>,
}

fn cell_grade(action: &MonoidAction, cell: &Cell) -> u32 {
    cell.0.iter().map(|&m| action.grade[m]).sum::<u32>() + action.point_grade[cell.1]
}

fn enumerate_cells(action: &MonoidAction, n: usize, skip_identity: bool) -> Vec<Cell> {
    let cap = action.grade_cap.unwrap_or(u32::MAX);
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    fn rec(action: &MonoidAction, n: usize, skip: bool, cap: u32, used: u32, word: &mut Vec<usize>, out: &mut Vec<Cell>) {
        if word.len() == n {
            for a in 0..action.num_points() {
                if used + action.point_grade[a] <= cap {
                    out.push((word.clone(), a));
                }
            }
            return;
        }
        for m in 0..action.num_elements() {
            if skip && m == action.identity {
                continue;
            }
            let g = used + action.grade[m];
            if g <= cap {
                word.push(m);
                rec(action, n, skip, cap, g, word, out);
                word.pop();
            }
        }
    }
    rec(action, n, skip_identity, cap, 0, &mut word, &mut out);
    out
}

/// Faces `d_0, ..., d_n` of a cell in degree `n ≥ 1`: drop `m_1`, multiply
/// `m_i·m_(i+1)`, act by `m_n` on `a`.
fn faces(action: &MonoidAction, cell: &Cell) -> Option<Vec<Cell>> {
    let (word, a) = cell;
    let n = word.len();
    let mut out = Vec::with_capacity(n + 1);
    out.push((word[1..].to_vec(), *a));
    for i in 0..n - 1 {
        let p = action.mul[word[i]][word[i + 1]]?;
        let mut w = word[..i].to_vec();
        w.push(p);
        w.extend_from_slice(&word[i + 2..]);
        out.push((w, *a));
    }
    let b = action.act[word[n - 1]][*a]?;
    out.push((word[..n - 1].to_vec(), b));
    Some(out)
}

/// Builds the complex in degrees `0..=n_max` with the alternating face sum,
/// and checks `∂∂ = 0`. The normalized complex drops cells containing the
/// identity and sends faces landing on them to zero.
pub fn bar_complex(action: &MonoidAction, n_max: usize, field: CoeffField, normalized: bool) -> Result<BarComplex, BarError> {
    if n_max == 0 {
        return Err(BarError::ZeroTruncation);
    }
    let cells: Vec<Vec<Cell>> = (0..=n_max).map(|n| enumerate_cells(action, n, normalized)).collect();
    let raw_counts = (0..=n_max).map(|n| enumerate_cells(action, n, false).len()).collect();
    let mut boundaries = vec![Vec::new()];
    for n in 1..=n_max {
        let index: HashMap<&Cell, usize> = cells[n - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut d = vec![vec![0i64; cells[n].len()]; cells[n - 1].len()];
        for (j, cell) in cells[n].iter().enumerate() {
            let fs = faces(action, cell).ok_or(BarError::TruncationUnsound { degree: n })?;
            for (i, face) in fs.iter().enumerate() {
                if cell_grade(action, face) > cell_grade(action, cell) {
                    return Err(BarError::TruncationUnsound { degree: n });
                }
                let sign = if i % 2 == 0 { 1 } else { -1 };
                match index.get(face) {
                    Some(&row) => d[row][j] += sign,
                    None if normalized && face.0.contains(&action.identity) => {}
                    None => return Err(BarError::TruncationUnsound { degree: n }),
                }
            }
        }
        boundaries.push(d);
    }
    let complex = BarComplex { truncation: n_max, normalized, field, cells, raw_counts, boundaries };
    assert!(complex.boundary_squares_to_zero(), "bar differential squares to zero");
    Ok(complex)
}

impl BarComplex {
    /// Exact integer check of `∂_(n-1)·∂_n = 0` for all `n`.
    pub fn boundary_squares_to_zero(&self) -> bool {
        (2..=self.truncation).all(|n| {
            let (a, b) = (&self.boundaries[n - 1], &self.boundaries[n]);
            let rows = a.len();
            let cols = self.cells[n].len();
            let mid = self.cells[n - 1].len();
            (0..rows).all(|i| (0..cols).all(|j| (0..mid).map(|k| a[i][k] * b[k][j]).sum::<i64>() == 0))
        })
    }

    fn boundary_rank(&self, n: usize) -> usize {
        if n == 0 || n > self.truncation {
            return 0;
        }
        let d = &self.boundaries[n];
        if d.is_empty() || d[0].is_empty() {
            return 0;
        }
        match self.field {
            CoeffField::Rational => bareiss_rank(d.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()),
            CoeffField::Prime(p) => rank_mod_p(d, p),
        }
    }

    /// `dim C_i − rank ∂_i − rank ∂_(i+1)` for `i < N − 1`, the range not
    /// affected by the truncation.
    pub fn homology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.truncation).map(|n| self.boundary_rank(n)).collect();
        (0..self.truncation.saturating_sub(1))
            .map(|i| self.cells[i].len() - ranks[i] - ranks[i + 1])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractibilityReport {
    pub free: bool,
    pub w_transitive: bool,
    pub nonempty: bool,
    pub field: CoeffField,
    pub betti: Vec<usize>,
    /// Set when all three hypotheses hold: whether the Betti numbers are
    /// `(1, 0, ..., 0)`.
    pub contractible_below_boundary: Option<bool>,
}

pub fn contractibility_report(action: &MonoidAction, n_max: usize, field: CoeffField) -> Result<ContractibilityReport, BarError> {
    let free = check_free(action).free;
    let w_transitive = check_w_transitive(action).w_transitive;
    let nonempty = action.num_points() > 0;
    let betti = bar_complex(action, n_max, field, true)?.homology();
    let contractible_below_boundary =
        (free && w_transitive && nonempty).then(|| betti.iter().enumerate().all(|(i, &b)| b == usize::from(i == 0)));
    Ok(ContractibilityReport { free, w_transitive, nonempty, field, betti, contractible_below_boundary })
}
