//! Local systems in coordinates: a trivial bundle with connection matrix
//! `A` and an optional bilinear form `M`.
//!
//! Sections are row vectors and `nabla(v) = nu(v) + v·A`. Under this
//! convention the compatibility of the form with the connection,
//! `nu<a,b> = <nabla a, b> + <a, nabla b>` with `<u,v> = u·M·v^T`, reads
//! `nu(M) = A·M + M·A^T`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funfield::{CurveSpec, Derivation, FunFieldError, Poly, PuncturedCurve, RatFun};
use crate::linalg::Matrix;
use crate::mpoly::MPoly;
use crate::numeric::{search_rational_point, SearchConfig};

pub type SectionVector = Vec<RatFun>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalSysError {
    #[error("expected a vector of length {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("the system carries no bilinear form")]
    NoForm,
    #[error("matrix {name} must be {rank}x{rank}")]
    Shape { name: String, rank: usize },
    #[error("entry ({row},{col}) of {name} has a pole on X")]
    NotRegular { name: String, row: usize, col: usize },
    #[error("a symplectic form needs even rank, got {0}")]
    OddRank(usize),
    #[error("form matrix is not {0}")]
    FormSymmetry(String),
    #[error("det(M) = {0} is not a unit of k[X]")]
    DegenerateForm(String),
    #[error(transparent)]
    FunField(#[from] FunFieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Symplectic,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub kind: FormKind,
    pub m: Matrix<RatFun>,
}

#[derive(Clone, Debug)]
pub struct LocalSystem {
    rank: usize,
    curve: PuncturedCurve,
    nu: Derivation,
    a: Matrix<RatFun>,
    form: Option<BilinearForm>,
    c1: usize,
    c2: usize,
    /// `A = a_num / a_den` over one common denominator.
    a_num: Vec<Vec<Poly>>,
    a_den: Poly,
}

/// Result of the compatibility check; `violation` is the first entry of
/// `nu(M) - A·M - M·A^T` in row-major order that is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Compatibility {
    pub compatible: bool,
    pub violation: Option<(usize, usize)>,
}

fn max_grade(curve: &PuncturedCurve, m: &Matrix<RatFun>, name: &str) -> Result<usize, LocalSysError> {
    let mut best = 0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let g = curve
                .grade(&m[(i, j)])
                .map_err(|_| LocalSysError::NotRegular { name: name.to_string(), row: i, col: j })?;
            best = best.max(g);
        }
    }
    Ok(best)
}

impl LocalSystem {
    /// Validates shapes, regularity, the symmetry type of `M` and that
    /// `det(M)` is a unit. Compatibility is not enforced here; see
    /// [`LocalSystem::check_compatibility`].
    pub fn new(
        curve: PuncturedCurve,
        nu: Derivation,
        a: Matrix<RatFun>,
        form: Option<BilinearForm>,
    ) -> Result<Self, LocalSysError> {
        let rank = a.rows();
        if !a.is_square() {
            return Err(LocalSysError::Shape { name: "A".into(), rank });
        }
        let c2 = max_grade(&curve, &a, "A")?;
        let mut c1 = 0;
        if let Some(f) = &form {
            if f.m.rows() != rank || f.m.cols() != rank {
                return Err(LocalSysError::Shape { name: "M".into(), rank });
            }
            c1 = max_grade(&curve, &f.m, "M")?;
            let mt = f.m.transpose();
            match f.kind {
                FormKind::Symplectic => {
                    if !rank.is_multiple_of(2) {
                        return Err(LocalSysError::OddRank(rank));
                    }
                    if mt != f.m.map(|x| -x) {
                        return Err(LocalSysError::FormSymmetry("antisymmetric".into()));
                    }
                }
                FormKind::Symmetric => {
                    if mt != f.m {
                        return Err(LocalSysError::FormSymmetry("symmetric".into()));
                    }
                }
            }
            let det = f.m.determinant();
            if !curve.is_unit(&det) {
                return Err(LocalSysError::DegenerateForm(det.to_string()));
            }
        }
        let a_den = a.entries().fold(Poly::one(), |acc, x| Poly::lcm(&acc, x.den()));
        let a_num = (0..rank)
            .map(|i| (0..rank).map(|j| a[(i, j)].num() * &a_den.div_exact(a[(i, j)].den()).unwrap()).collect())
            .collect();
        Ok(LocalSystem { rank, curve, nu, a, form, c1, c2, a_num, a_den })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn curve(&self) -> &PuncturedCurve {
        &self.curve
    }

    pub fn nu(&self) -> &Derivation {
        &self.nu
    }

    pub fn a(&self) -> &Matrix<RatFun> {
        &self.a
    }

    pub fn form(&self) -> Option<&BilinearForm> {
        self.form.as_ref()
    }

    pub fn c1(&self) -> usize {
        self.c1
    }

    pub fn c2(&self) -> usize {
        self.c2
    }

    /// `max(d_nu, C2)`: the grade increase of one covariant derivative.
    pub fn beta(&self) -> usize {
        self.nu.d_nu().max(self.c2)
    }

    fn check_len(&self, v: &[RatFun]) -> Result<(), LocalSysError> {
        if v.len() != self.rank {
            return Err(LocalSysError::RankMismatch { expected: self.rank, got: v.len() });
        }
        Ok(())
    }

    /// `nu(v) + v·A`, computed over one common denominator: with `v = w/E`,
    /// `A = N/D` and `u = p/q` the unit of `nu`, entry `j` is
    /// `(p·D·(w_j'·E − w_j·E') + q·E·(w·N)_j) / (q·E²·D)`.
    pub fn nabla(&self, v: &[RatFun]) -> Result<SectionVector, LocalSysError> {
        self.check_len(v)?;
        let e = v.iter().fold(Poly::one(), |acc, x| if x.is_zero() { acc } else { Poly::lcm(&acc, x.den()) });
        let w: Vec<Poly> = v.iter().map(|x| x.num() * &e.div_exact(x.den()).unwrap()).collect();
        let de = e.derivative();
        let (p, q) = (self.nu.unit().num(), self.nu.unit().den());
        let pd = p * &self.a_den;
        let qe = q * &e;
        let den = &(&qe * &e) * &self.a_den;
        Ok((0..self.rank)
            .map(|j| {
                let wn = (0..self.rank).fold(Poly::zero(), |acc, i| {
                    if w[i].is_zero() || self.a_num[i][j].is_zero() {
                        acc
                    } else {
                        &acc + &(&w[i] * &self.a_num[i][j])
                    }
                });
                let deriv = &(&w[j].derivative() * &e) - &(&w[j] * &de);
                RatFun::new(&(&pd * &deriv) + &(&qe * &wn), den.clone())
            })
            .collect())
    }

    pub fn nabla_iter(&self, v: &[RatFun], i: usize) -> Result<SectionVector, LocalSysError> {
        self.check_len(v)?;
        let mut cur = v.to_vec();
        for _ in 0..i {
            cur = self.nabla(&cur)?;
        }
        Ok(cur)
    }

    /// `u·M·v^T`.
    pub fn pairing(&self, u: &[RatFun], v: &[RatFun]) -> Result<RatFun, LocalSysError> {
        let form = self.form.as_ref().ok_or(LocalSysError::NoForm)?;
        self.check_len(u)?;
        self.check_len(v)?;
        let um = form.m.vec_mul(u);
        Ok(um.iter().zip(v).fold(RatFun::zero(), |acc, (x, y)| &acc + &(x * y)))
    }

    pub fn check_compatibility(&self) -> Result<Compatibility, LocalSysError> {
        let form = self.form.as_ref().ok_or(LocalSysError::NoForm)?;
        let m = &form.m;
        let rhs = self.a.mul(m).add(&m.mul(&self.a.transpose()));
        for i in 0..self.rank {
            for j in 0..self.rank {
                if self.nu.apply(&m[(i, j)]) != rhs[(i, j)] {
                    return Ok(Compatibility { compatible: false, violation: Some((i, j)) });
                }
            }
        }
        Ok(Compatibility { compatible: true, violation: None })
    }

    /// Whether `v ≠ 0` spans a ∇-stable line, i.e. `[v; nabla v]` has rank 1.
    pub fn is_invariant_line(&self, v: &[RatFun]) -> Result<bool, LocalSysError> {
        let w = self.nabla(v)?;
        if v.iter().all(RatFun::is_zero) {
            return Ok(false);
        }
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                if &v[i] * &w[j] != &v[j] * &w[i] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Best-effort search for a ∇-invariant line spanned by a polynomial
    /// vector of degree at most `deg_bound`. A returned witness is exact and
    /// proves reducibility; `None` proves nothing.
    pub fn invariant_line_falsifier(&self, deg_bound: usize, seed: u64, tries: usize) -> Option<SectionVector> {
        let n = self.rank;
        let per = deg_bound + 1;
        let nvars = n * per;
        // variable p = i*per + k stands for t^k in slot i
        let unit: Vec<SectionVector> = (0..nvars)
            .map(|p| {
                let mut e = vec![RatFun::zero(); n];
                e[p / per] = RatFun::from(Poly::monomial(num::One::one(), p % per));
                e
            })
            .collect();
        let images: Vec<SectionVector> = unit.iter().map(|e| self.nabla(e).expect("rank fixed")).collect();

        let mut equations = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let bracket = |p: usize, q: usize| &(&unit[p][i] * &images[q][j]) - &(&unit[p][j] * &images[q][i]);
                let table: Vec<Vec<RatFun>> = (0..nvars).map(|p| (0..nvars).map(|q| bracket(p, q)).collect()).collect();
                let clearing = table.iter().flatten().fold(Poly::one(), |acc, f| Poly::lcm(&acc, f.den()));
                let cleared: Vec<Vec<Poly>> = table
                    .iter()
                    .map(|row| row.iter().map(|f| (f.num() * &clearing).div_exact(f.den()).expect("lcm")).collect())
                    .collect();
                let top = cleared.iter().flatten().filter_map(Poly::degree).max();
                let Some(top) = top else { continue };
                for c in 0..=top {
                    let form = Matrix::from_fn(nvars, nvars, |p, q| cleared[p][q].coeff(c));
                    let eq = MPoly::from_quadratic_form(&form);
                    if !eq.is_zero() {
                        equations.push(eq);
                    }
                }
            }
        }

        let to_vector = |x: &[crate::funfield::Rat]| -> SectionVector {
            (0..n)
                .map(|i| RatFun::from(Poly::new(x[i * per..(i + 1) * per].to_vec())))
                .collect()
        };
        let config = SearchConfig::with_tries(tries);
        let point = search_rational_point(&equations, nvars, seed, &config, |x| {
            self.is_invariant_line(&to_vector(x)).unwrap_or(false)
        })?;
        let v = to_vector(&point);
        debug_assert!(v.iter().any(|x| !x.is_zero()));
        Some(v)
    }

    /// The same system in the frame where old coordinates are `w·P`:
    /// `A' = (nu(P) + P·A)·P^-1` and `M' = P·M·P^T`. A section `v` becomes
    /// `v·P^-1`. `P` must be invertible over `k[X]`.
    pub fn gauge_transform(&self, p: &Matrix<RatFun>) -> Result<LocalSystem, LocalSysError> {
        if p.rows() != self.rank || !p.is_square() {
            return Err(LocalSysError::Shape { name: "P".into(), rank: self.rank });
        }
        let det = p.determinant();
        if !self.curve.is_unit(&det) {
            return Err(LocalSysError::DegenerateForm(det.to_string()));
        }
        let p_inv = p.inverse().expect("unit determinant");
        let nu_p = p.map(|x| self.nu.apply(x));
        let a = nu_p.add(&p.mul(&self.a)).mul(&p_inv);
        let form = self
            .form
            .as_ref()
            .map(|f| BilinearForm { kind: f.kind, m: p.mul(&f.m).mul(&p.transpose()) });
        LocalSystem::new(self.curve.clone(), self.nu.clone(), a, form)
    }

    pub fn to_spec(&self) -> LocalSystemSpec {
        LocalSystemSpec {
            curve: CurveSpec::from_parts(&self.curve, &self.nu),
            rank: self.rank,
            a: self.a.to_rows(),
            form: self.form.as_ref().map(|f| FormSpec { kind: f.kind, m: f.m.to_rows() }),
        }
    }
}

/// Wire form: `{"curve", "rank", "A", "form": {"kind", "M"}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalSystemSpec {
    #[serde(default = "default_curve")]
    pub curve: CurveSpec,
    pub rank: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<RatFun>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormSpec {
    pub kind: FormKind,
    #[serde(rename = "M")]
    pub m: Vec<Vec<RatFun>>,
}

fn default_curve() -> CurveSpec {
    CurveSpec::from_parts(&PuncturedCurve::affine_line(), &Derivation::standard(&PuncturedCurve::affine_line()))
}

fn square(rows: Vec<Vec<RatFun>>, name: &str, rank: usize) -> Result<Matrix<RatFun>, LocalSysError> {
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        return Err(LocalSysError::Shape { name: name.into(), rank });
    }
    Ok(Matrix::from_rows(rows))
}

impl LocalSystemSpec {
    pub fn build(&self) -> Result<LocalSystem, LocalSysError> {
        let (curve, nu) = self.curve.build()?;
        let a = square(self.a.clone(), "A", self.rank)?;
        let form = match &self.form {
            Some(f) => Some(BilinearForm { kind: f.kind, m: square(f.m.clone(), "M", self.rank)? }),
            None => None,
        };
        LocalSystem::new(curve, nu, a, form)
    }
}

/// The standard symplectic matrix `[[0, I], [-I, 0]]` of size `2m`.
pub fn standard_symplectic(m: usize) -> Matrix<RatFun> {
    Matrix::from_fn(2 * m, 2 * m, |i, j| {
        if j == i + m {
            RatFun::one()
        } else if i == j + m {
            -RatFun::one()
        } else {
            RatFun::zero()
        }
    })
}

/// The antidiagonal matrix with ones.
pub fn antidiagonal(n: usize) -> Matrix<RatFun> {
    Matrix::from_fn(n, n, |i, j| if i + j == n - 1 { RatFun::one() } else { RatFun::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> RatFun {
        RatFun::from_int(n)
    }

    fn sys(a: Vec<Vec<RatFun>>, form: Option<BilinearForm>) -> LocalSystem {
        let curve = PuncturedCurve::affine_line();
        let nu = Derivation::standard(&curve);
        LocalSystem::new(curve, nu, Matrix::from_rows(a), form).unwrap()
    }

    fn nilpotent() -> LocalSystem {
        sys(vec![vec![c(0), c(1)], vec![c(0), c(0)]], None)
    }

    #[test]
    fn nabla_examples() {
        let zero = sys(vec![vec![c(0), c(0)], vec![c(0), c(0)]], None);
        assert_eq!(zero.nabla(&[c(1), RatFun::t()]).unwrap(), vec![c(0), c(1)]);
        let s = nilpotent();
        assert_eq!(s.nabla(&[c(1), c(0)]).unwrap(), vec![c(0), c(1)]);
        assert_eq!(s.nabla(&[RatFun::t(), c(1)]).unwrap(), vec![c(1), RatFun::t()]);
        assert_eq!(zero.nabla_iter(&[c(1), RatFun::t()], 2).unwrap(), vec![c(0), c(0)]);
        assert_eq!(s.nabla_iter(&[c(1), c(0)], 2).unwrap(), vec![c(0), c(0)]);
        assert_eq!(s.nabla_iter(&[RatFun::t(), c(3)], 0).unwrap(), vec![RatFun::t(), c(3)]);
        assert!(matches!(s.nabla(&[c(1)]), Err(LocalSysError::RankMismatch { .. })));
    }

    fn sp4(a: Vec<Vec<RatFun>>) -> LocalSystem {
        sys(a, Some(BilinearForm { kind: FormKind::Symplectic, m: standard_symplectic(2) }))
    }

    fn e(i: usize) -> SectionVector {
        (0..4).map(|j| if i == j { c(1) } else { c(0) }).collect()
    }

    #[test]
    fn pairing_examples() {
        let s = sp4(vec![vec![c(0); 4]; 4]);
        assert_eq!(s.pairing(&e(0), &e(2)).unwrap(), c(1));
        assert_eq!(s.pairing(&e(0), &e(1)).unwrap(), c(0));
        let v = vec![RatFun::t(), c(3), c(-1), RatFun::t()];
        assert!(s.pairing(&v, &v).unwrap().is_zero());
        assert_eq!(nilpotent().pairing(&e(0)[..2], &e(1)[..2]), Err(LocalSysError::NoForm));
    }

    #[test]
    fn compatibility_examples() {
        let zero = sp4(vec![vec![c(0); 4]; 4]);
        assert!(zero.check_compatibility().unwrap().compatible);
        let diag = |d: [i64; 4]| (0..4).map(|i| (0..4).map(|j| if i == j { c(d[i]) } else { c(0) }).collect()).collect();
        assert!(sp4(diag([2, 5, -2, -5])).check_compatibility().unwrap().compatible);
        let bad = sp4(diag([1, 0, 0, 0])).check_compatibility().unwrap();
        assert_eq!(bad, Compatibility { compatible: false, violation: Some((0, 2)) });
    }

    #[test]
    fn form_validation() {
        let curve = PuncturedCurve::affine_line();
        let nu = Derivation::standard(&curve);
        let a = Matrix::from_rows(vec![vec![c(0); 2]; 2]);
        let sym = BilinearForm { kind: FormKind::Symplectic, m: antidiagonal(2) };
        assert!(matches!(LocalSystem::new(curve.clone(), nu.clone(), a.clone(), Some(sym)), Err(LocalSysError::FormSymmetry(_))));
        let tm = Matrix::from_rows(vec![vec![c(0), RatFun::t()], vec![-RatFun::t(), c(0)]]);
        let degenerate = BilinearForm { kind: FormKind::Symplectic, m: tm };
        assert!(matches!(LocalSystem::new(curve, nu, a, Some(degenerate)), Err(LocalSysError::DegenerateForm(_))));
    }

    #[test]
    fn falsifier_examples() {
        let zero = sys(vec![vec![c(0), c(0)], vec![c(0), c(0)]], None);
        assert_eq!(zero.invariant_line_falsifier(0, 1, 10), Some(vec![c(1), c(0)]));
        assert_eq!(nilpotent().invariant_line_falsifier(0, 1, 10), Some(vec![c(0), c(1)]));
    }

    #[test]
    fn spec_round_trip() {
        let s = sp4(vec![vec![c(0); 4]; 4]);
        let json = serde_json::to_string(&s.to_spec()).unwrap();
        let back: LocalSystemSpec = serde_json::from_str(&json).unwrap();
        let s2 = back.build().unwrap();
        assert_eq!(s2.form().unwrap().m, s.form().unwrap().m);
        assert_eq!(s2.a(), s.a());
    }
}
