//! Sections of intersections of projective hypersurfaces over `k(t)`, with
//! polynomial coordinates of degree at most `e` (poles only at infinity).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funfield::{Poly, Rat};
use crate::mpoly::MPoly;
use crate::numeric::{search_rational_point, SearchConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TsenError {
    #[error("a system needs at least one form")]
    NoForms,
    #[error("form {form}: monomial has {got} exponents, expected {expected}")]
    ExponentLength { form: usize, got: usize, expected: usize },
    #[error("form {0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("form {0} is zero or constant")]
    DegreeZero(usize),
    #[error("section has {got} coordinates, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("coordinate of degree {degree} exceeds the ansatz degree {e}")]
    DegreeExceeded { degree: usize, e: usize },
    #[error("all coordinates are zero")]
    ZeroSection,
}

/// `coeff(t) · x^exponents`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemWire", into = "SystemWire")]
pub struct ProjectiveSystem {
    n: usize,
    forms: Vec<Vec<Monomial>>,
    degrees: Vec<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct SystemWire {
    ambient: usize,
    forms: Vec<Vec<Monomial>>,
}

impl TryFrom<SystemWire> for ProjectiveSystem {
    type Error = TsenError;

    fn try_from(w: SystemWire) -> Result<Self, TsenError> {
        ProjectiveSystem::new(w.ambient, w.forms)
    }
}

impl From<ProjectiveSystem> for SystemWire {
    fn from(s: ProjectiveSystem) -> Self {
        SystemWire { ambient: s.n, forms: s.forms }
    }
}

impl ProjectiveSystem {
    /// Forms in the coordinates `x_0..x_n`. Zero monomials are dropped.
    pub fn new(n: usize, forms: Vec<Vec<Monomial>>) -> Result<Self, TsenError> {
        if forms.is_empty() {
            return Err(TsenError::NoForms);
        }
        let mut cleaned = Vec::with_capacity(forms.len());
        let mut degrees = Vec::with_capacity(forms.len());
        for (i, form) in forms.into_iter().enumerate() {
            let form: Vec<Monomial> = form.into_iter().filter(|m| !m.coeff.is_zero()).collect();
            let mut degree = None;
            for m in &form {
                if m.exponents.len() != n + 1 {
                    return Err(TsenError::ExponentLength { form: i, got: m.exponents.len(), expected: n + 1 });
                }
                let d = m.exponents.iter().sum::<u32>() as usize;
                if *degree.get_or_insert(d) != d {
                    return Err(TsenError::NotHomogeneous(i));
                }
            }
            match degree {
                Some(d) if d >= 1 => degrees.push(d),
                _ => return Err(TsenError::DegreeZero(i)),
            }
            cleaned.push(form);
        }
        Ok(ProjectiveSystem { n, forms: cleaned, degrees })
    }

    /// Parses each form from `(coefficient, exponents)` pairs with integer
    /// coefficients of `t`, lowest first.
    pub fn from_int_forms(n: usize, forms: &[&[(&[i64], &[u32])]]) -> Result<Self, TsenError> {
        let forms = forms
            .iter()
            .map(|f| f.iter().map(|(c, e)| Monomial { exponents: e.to_vec(), coeff: Poly::from_ints(c) }).collect())
            .collect();
        ProjectiveSystem::new(n, forms)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn forms(&self) -> &[Vec<Monomial>] {
        &self.forms
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Largest `t`-degree among the coefficients of each form.
    pub fn t_degrees(&self) -> Vec<usize> {
        self.forms.iter().map(|f| f.iter().filter_map(|m| m.coeff.degree()).max().unwrap_or(0)).collect()
    }

    /// Evaluates form `i` at polynomial coordinates.
    pub fn eval_form(&self, i: usize, coords: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for m in &self.forms[i] {
            let mut term = m.coeff.clone();
            for (x, &k) in coords.iter().zip(&m.exponents) {
                term = &term * &x.pow(k);
            }
            acc = &acc + &term;
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TsenCount {
    pub unknowns: i64,
    pub equations: i64,
    pub slack: i64,
    /// `(n+1) − sum d_i`, the growth of the slack per unit of `e`.
    pub slope: i64,
    pub diverges: bool,
}

pub fn tsen_count(system: &ProjectiveSystem, e: usize) -> TsenCount {
    let n = system.n as i64;
    let e = e as i64;
    let unknowns = (n + 1) * (e + 1) - 1;
    let equations: i64 = system
        .degrees
        .iter()
        .zip(system.t_degrees())
        .map(|(&d, c)| d as i64 * e + c as i64 + 1)
        .sum();
    let slope = n + 1 - system.degrees.iter().sum::<usize>() as i64;
    TsenCount { unknowns, equations, slack: unknowns - equations, slope, diverges: slope > 0 }
}

/// Polynomial coordinates `x_0..x_n` of degree at most `e`; primitive and
/// nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCandidate {
    pub e: usize,
    pub coords: Vec<Poly>,
}

impl SectionCandidate {
    /// Divides out the common factor and normalizes the first nonzero
    /// coordinate to be monic.
    pub fn new(system: &ProjectiveSystem, e: usize, coords: Vec<Poly>) -> Result<Self, TsenError> {
        if coords.len() != system.n + 1 {
            return Err(TsenError::WrongLength { got: coords.len(), expected: system.n + 1 });
        }
        if let Some(degree) = coords.iter().filter_map(Poly::degree).find(|&d| d > e) {
            return Err(TsenError::DegreeExceeded { degree, e });
        }
        let g = coords.iter().fold(Poly::zero(), |acc, x| Poly::gcd(&acc, x));
        if g.is_zero() {
            return Err(TsenError::ZeroSection);
        }
        let lead = coords.iter().find(|x| !x.is_zero()).unwrap().leading() / g.leading();
        let scale = lead.recip();
        let coords = coords.iter().map(|x| x.div_exact(&g).expect("gcd divides").scale(&scale)).collect();
        Ok(SectionCandidate { e, coords })
    }
}

/// Exact check that every form vanishes identically at the coordinates.
pub fn verify_section(system: &ProjectiveSystem, coords: &[Poly]) -> bool {
    coords.len() == system.n + 1
        && coords.iter().any(|x| !x.is_zero())
        && (0..system.forms.len()).all(|i| system.eval_form(i, coords).is_zero())
}

/// Variable of the `t^k` coefficient of `x_j`.
pub fn ansatz_var(e: usize, j: usize, k: usize) -> usize {
    j * (e + 1) + k
}

fn tpoly_mul(a: &[MPoly], b: &[MPoly], nvars: usize) -> Vec<MPoly> {
    let mut out = vec![MPoly::zero(nvars); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// One equation per form and per power `t^p` with `p ≤ d_i·e + c_i`, in the
/// variables of [`ansatz_var`].
pub fn assemble_system(system: &ProjectiveSystem, e: usize) -> Vec<MPoly> {
    let nvars = (system.n + 1) * (e + 1);
    let coords: Vec<Vec<MPoly>> = (0..=system.n)
        .map(|j| (0..=e).map(|k| MPoly::var(nvars, ansatz_var(e, j, k))).collect())
        .collect();
    let mut equations = Vec::new();
    for (i, form) in system.forms.iter().enumerate() {
        let len = system.degrees[i] * e + system.t_degrees()[i] + 1;
        let mut acc = vec![MPoly::zero(nvars); len];
        for m in form {
            let mut term: Vec<MPoly> = m.coeff.coeffs().iter().map(|c| MPoly::constant(nvars, c.clone())).collect();
            for (j, &k) in m.exponents.iter().enumerate() {
                for _ in 0..k {
                    term = tpoly_mul(&term, &coords[j], nvars);
                }
            }
            for (p, c) in term.into_iter().enumerate() {
                acc[p] = acc[p].add(&c);
            }
        }
        equations.extend(acc);
    }
    equations
}

fn coords_from_vars(system: &ProjectiveSystem, e: usize, x: &[Rat]) -> Vec<Poly> {
    (0..=system.n).map(|j| Poly::new((0..=e).map(|k| x[ansatz_var(e, j, k)].clone()).collect())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub section: Option<SectionCandidate>,
    pub warnings: Vec<String>,
}

/// Seeded multi-start search; only exactly verified sections are returned.
/// Over Q a section may fail to exist even when one exists over the
/// algebraic closure, so `None` never means the locus is empty.
pub fn solve_section(system: &ProjectiveSystem, e: usize, seed: u64, tries: usize) -> SolveOutcome {
    let mut warnings = Vec::new();
    let count = tsen_count(system, e);
    if count.slack < 1 {
        warnings.push(format!("slack {} at e = {e}: the ansatz is not expected to have solutions", count.slack));
    }
    let total: usize = system.degrees.iter().sum();
    if total > system.n {
        warnings.push(format!("sum of degrees {total} exceeds n = {}: no existence guarantee", system.n));
    }
    let equations = assemble_system(system, e);
    let nvars = (system.n + 1) * (e + 1);
    let accept = |x: &[Rat]| verify_section(system, &coords_from_vars(system, e, x));
    let found = search_rational_point(&equations, nvars, seed, &SearchConfig::with_tries(tries), accept);
    let section = found.map(|x| {
        let c = SectionCandidate::new(system, e, coords_from_vars(system, e, &x)).expect("accepted points are nonzero");
        assert!(verify_section(system, &c.coords));
        c
    });
    if section.is_none() {
        warnings.push(format!("no rational section found in {tries} starts"));
    }
    SolveOutcome { section, warnings }
}
