//! Sparse multivariate polynomials over Q, used for the equation systems
//! handed to the numeric search and for exact re-checking of its output.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::funfield::rat::{format_rat, to_f64};
use crate::funfield::Rat;
use crate::linalg::Matrix;

/// Exponent vectors are stored densely, one entry per variable.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                    .collect();
                format!("{}*{}", format_rat(c), mono.join("*"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    /// `x^T S x` for a square matrix `S`.
    pub fn from_quadratic_form(s: &Matrix<Rat>) -> Self {
        let n = s.rows();
        let mut p = MPoly::zero(n);
        for i in 0..n {
            for j in 0..n {
                let c = &s[(i, j)];
                if c.is_zero() {
                    continue;
                }
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                p.add_term(e, c.clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn add(&self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::constant(self.nvars, Rat::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    term *= xi;
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes fixed values for some variables, keeping the variable
    /// count (substituted variables no longer occur).
    pub fn substitute(&self, values: &[Option<Rat>]) -> MPoly {
        assert_eq!(values.len(), self.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = e.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    for _ in 0..exps[i] {
                        coeff *= v;
                    }
                    exps[i] = 0;
                }
            }
            out.add_term(exps, coeff);
        }
        out
    }

    /// Variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    /// Floating image over a subset of variables, for numeric evaluation.
    pub fn compile(&self, vars: &[usize]) -> CompiledPoly {
        let pos: Vec<Option<usize>> = (0..self.nvars).map(|i| vars.iter().position(|&v| v == i)).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let factors = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (pos[i].expect("variable outside compiled set"), k))
                    .collect();
                (to_f64(c), factors)
            })
            .collect();
        CompiledPoly { terms }
    }
}

/// A polynomial in `f64` coefficients over a compacted variable list.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn eval_with_gradient(&self, x: &[num::complex::Complex64], grad: &mut [num::complex::Complex64]) -> num::complex::Complex64 {
        use num::complex::Complex64;
        grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let mut value = Complex64::new(0.0, 0.0);
        for (c, factors) in &self.terms {
            let mut term = Complex64::new(*c, 0.0);
            for &(i, k) in factors {
                term *= x[i].powu(k);
            }
            value += term;
            for (j, &(i, k)) in factors.iter().enumerate() {
                let mut d = Complex64::new(*c * k as f64, 0.0) * x[i].powu(k - 1);
                for (l, &(i2, k2)) in factors.iter().enumerate() {
                    if l != j {
                        d *= x[i2].powu(k2);
                    }
                }
                grad[i] += d;
            }
        }
        value
    }
}
