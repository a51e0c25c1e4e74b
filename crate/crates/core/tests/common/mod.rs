//! Random and planted inputs shared by the integration tests.
#![allow(dead_code)]

use num::{One, Zero};
use oper_calc::funfield::rat::{int, rat};
use oper_calc::funfield::{Derivation, Poly, PuncturedCurve, Rat, RatFun};
use oper_calc::linalg::Matrix;
use oper_calc::localsys::{standard_symplectic, BilinearForm, FormKind, LocalSystem, SectionVector};
use oper_calc::opers::LineSection;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut impl Rng) -> Rat {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

pub fn nonzero_rat(rng: &mut impl Rng) -> Rat {
    loop {
        let q = small_rat(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

/// `|D| = k`: infinity plus the finite points `0, 1, ..., k-2`.
pub fn curve_with(k: usize) -> PuncturedCurve {
    let finite: Vec<Rat> = (0..k as i64 - 1).map(int).collect();
    PuncturedCurve::with_finite(&finite).unwrap()
}

/// Random element of `k^grade[X]`, each coordinate nonzero with
/// probability `density`.
pub fn random_element(rng: &mut impl Rng, curve: &PuncturedCurve, grade: usize, density: f64) -> RatFun {
    let space = curve.space_basis(grade as i64).unwrap();
    let coords: Vec<Rat> = (0..space.dim())
        .map(|_| if rng.gen_bool(density) { small_rat(rng) } else { Rat::zero() })
        .collect();
    space.element(&coords)
}

pub fn random_nonzero_element(rng: &mut impl Rng, curve: &PuncturedCurve, grade: usize) -> RatFun {
    loop {
        let f = random_element(rng, curve, grade, 0.7);
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn random_vector(rng: &mut impl Rng, curve: &PuncturedCurve, grade: usize, n: usize) -> SectionVector {
    loop {
        let v: SectionVector = (0..n).map(|_| random_element(rng, curve, grade, 0.6)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

pub fn random_poly(rng: &mut impl Rng, deg: usize) -> Poly {
    Poly::new((0..=deg).map(|_| small_rat(rng)).collect())
}

/// `I + f·E_ij` with `i ≠ j`.
pub fn elementary(n: usize, i: usize, j: usize, f: RatFun) -> Matrix<RatFun> {
    let mut e = Matrix::identity(n);
    e[(i, j)] = f;
    e
}

/// Product of `steps` random elementary matrices with entries of grade ≤ 1;
/// determinant 1. Rows listed in `frozen` are never modified.
pub fn random_unimodular(rng: &mut impl Rng, curve: &PuncturedCurve, n: usize, steps: usize, frozen: &[usize]) -> Matrix<RatFun> {
    let mut p = Matrix::identity(n);
    for _ in 0..steps {
        let i = loop {
            let i = rng.gen_range(0..n);
            if !frozen.contains(&i) {
                break i;
            }
        };
        let j = loop {
            let j = rng.gen_range(0..n);
            if j != i {
                break j;
            }
        };
        let f = random_nonzero_element(rng, curve, 1);
        p = elementary(n, i, j, f).mul(&p);
    }
    p
}

pub fn random_constant_invertible(rng: &mut impl Rng, n: usize) -> Matrix<RatFun> {
    loop {
        let q: Matrix<Rat> = Matrix::from_fn(n, n, |_, _| rat(rng.gen_range(-2..=2), 1));
        if !q.determinant().is_zero() {
            return q.map(|x| RatFun::constant(x.clone()));
        }
    }
}

/// Random system without a form, with `A` of entries in `k^grade[X]`.
pub fn random_plain_system(rng: &mut impl Rng, curve: &PuncturedCurve, n: usize, grade: usize) -> LocalSystem {
    let a = Matrix::from_fn(n, n, |_, _| random_element(rng, curve, grade, 0.5));
    LocalSystem::new(curve.clone(), Derivation::standard(curve), a, None).unwrap()
}

/// A compatible symplectic system of rank `2m`: `M = P·J·P^T` with `P`
/// unimodular, and `A = (nu(M)/2 + S)·M^-1` for random symmetric `S`, which
/// is the general solution of `nu(M) = A·M + M·A^T`.
pub fn random_sp_system(rng: &mut impl Rng, curve: &PuncturedCurve, m: usize) -> LocalSystem {
    let n = 2 * m;
    let nu = Derivation::standard(curve);
    let p = random_unimodular(rng, curve, n, n, &[]);
    let mm = p.mul(&standard_symplectic(m)).mul(&p.transpose());
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let f = random_element(rng, curve, 1, 0.5);
            s[(i, j)] = f.clone();
            s[(j, i)] = f;
        }
    }
    let half = RatFun::constant(rat(1, 2));
    let nu_m = mm.map(|x| &nu.apply(x) * &half);
    let a = nu_m.add(&s).mul(&mm.inverse().unwrap());
    LocalSystem::new(curve.clone(), nu, a, Some(BilinearForm { kind: FormKind::Symplectic, m: mm })).unwrap()
}

/// A symplectic system of rank `2m` with a grade-0 oper line planted by
/// construction, returned with that line.
///
/// Base model: `A0 = N + c(t)·E_(n-1,0)` with `N` the upper shift, so
/// `nabla^k e_0 = e_k`, and `M0` antidiagonal with `M0[i][n-1-i] = (-1)^i`.
/// Then the flag of `e_0` is the standard one, isotropic in its first half,
/// and `A0·M0` is symmetric so the pair is compatible. A gauge change
/// `P = R^-1` whose inverse `R` keeps row 0 constant moves the line to the
/// constant vector `e_0·R`.
pub fn planted_sp(rng: &mut impl Rng, curve: &PuncturedCurve, m: usize) -> (LocalSystem, LineSection) {
    let n = 2 * m;
    let nu = Derivation::standard(curve);
    let c = random_nonzero_element(rng, curve, 1);
    let a0 = Matrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            RatFun::one()
        } else if i == n - 1 && j == 0 {
            c.clone()
        } else {
            RatFun::zero()
        }
    });
    let m0 = Matrix::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            RatFun::from_int(if i % 2 == 0 { 1 } else { -1 })
        } else {
            RatFun::zero()
        }
    });
    let base = LocalSystem::new(curve.clone(), nu, a0, Some(BilinearForm { kind: FormKind::Symplectic, m: m0 })).unwrap();
    let r = random_unimodular(rng, curve, n, 2, &[0]).mul(&random_constant_invertible(rng, n));
    let p = r.inverse().unwrap();
    let sys = base.gauge_transform(&p).unwrap();
    let mut e0 = vec![RatFun::zero(); n];
    e0[0] = RatFun::one();
    let g = r.vec_mul(&e0);
    let line = LineSection::new(curve, 0, g).unwrap();
    (sys, line)
}

pub fn constant_vector(values: &[i64]) -> SectionVector {
    values.iter().map(|&v| RatFun::from_int(v)).collect()
}

pub fn is_one(x: &RatFun) -> bool {
    x == &RatFun::constant(Rat::one())
}
