use num::Zero;
use serde::{Deserialize, Serialize};

use super::{rat_matrix, LineSection, OperError};
use crate::funfield::{Rat, RatFun};
use crate::linalg::Matrix;
use crate::localsys::{FormKind, LocalSystem, SectionVector};
use crate::mpoly::MPoly;

fn form_kind(sys: &LocalSystem) -> Result<FormKind, OperError> {
    sys.form().map(|f| f.kind).ok_or(OperError::NoForm)
}

/// Grade offset `C3` with every generated pairing in `k^(2d + C3)[X]`.
///
/// With `beta = max(d_nu, C2)` and `m = rank/2`: the symplectic pairings
/// `<nabla^i g, nabla^(i+1) g>` for `i ≤ m-2` have grade at most
/// `2d + (2m-3)·beta + C1`; the orthogonal pairings `<nabla^i g, nabla^i g>`
/// at most `2d + 2(m-2)·beta + C1`.
pub fn compute_c3(sys: &LocalSystem, kind: FormKind) -> Result<usize, OperError> {
    if sys.form().is_none() {
        return Err(OperError::NoForm);
    }
    let m = sys.rank() / 2;
    let beta = sys.beta();
    let c1 = sys.c1();
    Ok(match (kind, m >= 2) {
        (_, false) => c1,
        (FormKind::Symplectic, true) => (2 * m - 3) * beta + c1,
        (FormKind::Symmetric, true) => 2 * (m - 2) * beta + c1,
    })
}

/// One coefficient of one pairing, as the symmetric matrix `S` of the
/// quadratic form `x^T S x` in the coordinates of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadEquation {
    pub pair_index: usize,
    pub basis_index: usize,
    #[serde(with = "rat_matrix")]
    pub matrix: Matrix<Rat>,
}

impl QuadEquation {
    pub fn is_zero(&self) -> bool {
        self.matrix.entries().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let sx = self.matrix.mul_vec(x);
        x.iter().zip(&sx).map(|(a, b)| a * b).sum()
    }

    pub fn to_mpoly(&self) -> MPoly {
        MPoly::from_quadratic_form(&self.matrix)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSystem {
    pub kind: FormKind,
    pub d: usize,
    pub n_vars: usize,
    #[serde(rename = "C3")]
    pub c3: usize,
    pub beta: usize,
    pub raw_count: usize,
    pub reduced_count: usize,
    pub equations: Vec<QuadEquation>,
}

impl QuadraticSystem {
    pub fn nonzero_equations(&self) -> impl Iterator<Item = &QuadEquation> {
        self.equations.iter().filter(|e| !e.is_zero())
    }

    pub fn to_mpolys(&self) -> Vec<MPoly> {
        self.nonzero_equations().map(QuadEquation::to_mpoly).collect()
    }

    pub fn is_satisfied(&self, x: &[Rat]) -> bool {
        self.nonzero_equations().all(|e| e.eval(x).is_zero())
    }
}

/// Sections `e_p`, one per coordinate variable, and their iterated
/// covariant derivatives up to order `top`.
fn derivative_table(sys: &LocalSystem, d: usize, top: usize) -> Result<Vec<Vec<SectionVector>>, OperError> {
    let n = sys.rank();
    let space = sys.curve().space_basis(d as i64)?;
    let dim = space.dim();
    let mut table = Vec::with_capacity(n * dim);
    for entry in 0..n {
        for b in space.basis() {
            let mut e = vec![RatFun::zero(); n];
            e[entry] = b.clone();
            let mut chain = vec![e];
            for _ in 0..top {
                let next = sys.nabla(chain.last().unwrap())?;
                chain.push(next);
            }
            table.push(chain);
        }
    }
    Ok(table)
}

/// Expands `<nabla^i g, nabla^j g>` for each requested `(i, j)`.
fn expand(sys: &LocalSystem, d: usize, kind: FormKind, pairs: &[(usize, usize)]) -> Result<QuadraticSystem, OperError> {
    let form = sys.form().ok_or(OperError::NoForm)?;
    let c3 = compute_c3(sys, kind)?;
    let top = pairs.iter().map(|&(i, j)| i.max(j)).max().unwrap_or(0);
    let table = derivative_table(sys, d, top)?;
    let nv = table.len();
    let target = sys.curve().space_basis((2 * d + c3) as i64)?;
    let tdim = target.dim();

    let mut equations = Vec::with_capacity(pairs.len() * tdim);
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let left: Vec<Vec<RatFun>> = table.iter().map(|chain| form.m.vec_mul(&chain[i])).collect();
        // bilinear coefficients b[c][p][q]
        let mut b = vec![vec![vec![Rat::zero(); nv]; nv]; tdim];
        for p in 0..nv {
            if left[p].iter().all(RatFun::is_zero) {
                continue;
            }
            for q in 0..nv {
                let value = left[p]
                    .iter()
                    .zip(&table[q][j])
                    .fold(RatFun::zero(), |acc, (x, y)| &acc + &(x * y));
                if value.is_zero() {
                    continue;
                }
                let coords = target.coordinates(&value)?;
                for (c, v) in coords.into_iter().enumerate() {
                    b[c][p][q] = v;
                }
            }
        }
        let half = Rat::new(1.into(), 2.into());
        for (c, bc) in b.iter().enumerate() {
            let matrix = Matrix::from_fn(nv, nv, |p, q| (&bc[p][q] + &bc[q][p]) * &half);
            equations.push(QuadEquation { pair_index: idx, basis_index: c, matrix });
        }
    }
    let reduced_count = equations.iter().filter(|e| !e.is_zero()).count();
    Ok(QuadraticSystem {
        kind,
        d,
        n_vars: nv,
        c3,
        beta: sys.beta(),
        raw_count: equations.len(),
        reduced_count,
        equations,
    })
}

fn require_kind(sys: &LocalSystem, expected: FormKind) -> Result<(), OperError> {
    let found = form_kind(sys)?;
    if found != expected {
        return Err(OperError::WrongKind { expected, found });
    }
    Ok(())
}

/// The quadrics `<nabla^i g, nabla^(i+1) g> = 0` for `0 ≤ i < m-1`, where
/// `2m` is the rank. Indexing by the half-rank `m` is a convention choice.
pub fn gen_sp_equations(sys: &LocalSystem, d: usize) -> Result<QuadraticSystem, OperError> {
    require_kind(sys, FormKind::Symplectic)?;
    let m = sys.rank() / 2;
    let pairs: Vec<(usize, usize)> = (0..m.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    expand(sys, d, FormKind::Symplectic, &pairs)
}

/// The quadrics `<nabla^i g, nabla^i g> = 0` for `0 ≤ i ≤ m-2`, with
/// `m = floor(rank/2)`.
pub fn gen_so_equations(sys: &LocalSystem, d: usize) -> Result<QuadraticSystem, OperError> {
    require_kind(sys, FormKind::Symmetric)?;
    let m = sys.rank() / 2;
    let pairs: Vec<(usize, usize)> = (0..m.saturating_sub(1)).map(|i| (i, i)).collect();
    expand(sys, d, FormKind::Symmetric, &pairs)
}

/// `[<nabla^i g, nabla^j g>]` for `0 ≤ i, j ≤ bound`.
pub fn full_pairing_matrix(sys: &LocalSystem, line: &LineSection, bound: usize) -> Result<Matrix<RatFun>, OperError> {
    if sys.form().is_none() {
        return Err(OperError::NoForm);
    }
    let mut chain = vec![line.g().to_vec()];
    for _ in 0..bound {
        let next = sys.nabla(chain.last().unwrap())?;
        chain.push(next);
    }
    let mut out = Matrix::zeros(bound + 1, bound + 1);
    for i in 0..=bound {
        for j in 0..=bound {
            out[(i, j)] = sys.pairing(&chain[i], &chain[j])?;
        }
    }
    Ok(out)
}
