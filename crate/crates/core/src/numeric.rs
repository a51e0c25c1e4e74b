//! Seeded multi-start search for exact rational zeros of a homogeneous
//! polynomial system.
//!
//! Floating point is only a search heuristic here. Each start restricts the
//! system to a random coordinate pattern (some coordinates forced to zero,
//! some pinned to small nonzero integers, which also fixes an affine chart),
//! runs damped Gauss-Newton over `C` on what is left, rounds the limit by
//! continued fractions and then checks the rounded point exactly against the
//! original equations and the caller's acceptance test. Starts are
//! independent and evaluated in parallel; the first accepted start in index
//! order wins, so the outcome depends only on the seed.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::funfield::rat::{int, reconstruct_within};
use crate::funfield::Rat;
use crate::mpoly::{CompiledPoly, MPoly};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub tries: usize,
    pub max_iter: usize,
    /// Denominator bound for rational reconstruction.
    pub max_den: u64,
    pub tol: f64,
    /// Residual below which a stalled run still counts as converged. Zeros
    /// of multiplicity above one stall well before `tol`.
    pub loose_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { tries: 100, max_iter: 80, max_den: 1_000_000, tol: 1e-11, loose_tol: 1e-7 }
    }
}

impl SearchConfig {
    pub fn with_tries(tries: usize) -> Self {
        SearchConfig { tries, ..SearchConfig::default() }
    }
}

/// Per-start RNG stream derived from the user seed.
pub fn start_rng(seed: u64, start: u64) -> ChaCha8Rng {
    let mut z = seed ^ start.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Looks for a nonzero rational point where every equation vanishes and
/// `accept` holds. Coordinate unit vectors are probed first.
pub fn search_rational_point<F>(
    equations: &[MPoly],
    nvars: usize,
    seed: u64,
    config: &SearchConfig,
    accept: F,
) -> Option<Vec<Rat>>
where
    F: Fn(&[Rat]) -> bool + Sync,
{
    if nvars == 0 {
        return None;
    }
    let exact_ok = |x: &[Rat]| x.iter().any(|v| !v.is_zero()) && equations.iter().all(|e| e.eval(x).is_zero()) && accept(x);

    for p in 0..nvars {
        let mut x = vec![Rat::zero(); nvars];
        x[p] = int(1);
        if exact_ok(&x) {
            return Some(x);
        }
    }

    (0..config.tries as u64)
        .into_par_iter()
        .find_map_first(|s| {
            let mut rng = start_rng(seed, s);
            let approx = run_start(equations, nvars, config, &mut rng)?;
            // coarser roundings only matter near singular zeros; each is
            // checked exactly
            ROUNDING_TOLERANCES.iter().find_map(|&tol| {
                let candidate = approx.round(tol, config.max_den)?;
                exact_ok(&candidate).then_some(candidate)
            })
        })
}

const ROUNDING_TOLERANCES: [f64; 4] = [1e-8, 1e-6, 1e-4, 1e-2];

/// A numerically converged start: exact values for the pinned coordinates,
/// floating values for the rest.
struct Approximation {
    fixed: Vec<Option<Rat>>,
    used: Vec<usize>,
    values: Vec<Complex64>,
}

impl Approximation {
    fn round(&self, tol: f64, max_den: u64) -> Option<Vec<Rat>> {
        let mut out = self.fixed.clone();
        for (&v, z) in self.used.iter().zip(&self.values) {
            let scale = 1.0 + z.re.abs();
            if z.im.abs() > tol * scale {
                return None;
            }
            out[v] = Some(reconstruct_within(z.re, max_den, tol * scale)?);
        }
        Some(out.into_iter().map(|v| v.unwrap_or_else(Rat::zero)).collect())
    }
}

fn run_start(equations: &[MPoly], nvars: usize, config: &SearchConfig, rng: &mut ChaCha8Rng) -> Option<Approximation> {
    let zero_prob = [0.0, 0.0, 0.25, 0.5, 0.75][rng.gen_range(0..5)];
    let mut fixed: Vec<Option<Rat>> = (0..nvars)
        .map(|_| rng.gen_bool(zero_prob).then(Rat::zero))
        .collect();
    if fixed.iter().all(Option::is_some) {
        let k = rng.gen_range(0..nvars);
        fixed[k] = None;
    }

    let restricted: Vec<MPoly> = equations
        .iter()
        .map(|e| e.substitute(&fixed))
        .filter(|e| !e.is_zero())
        .collect();
    let mut open: Vec<usize> = (0..nvars).filter(|&i| fixed[i].is_none()).collect();
    open.shuffle(rng);
    let pins = open.len().saturating_sub(restricted.len()).max(1).min(open.len());
    for &i in &open[..pins] {
        let mut v = 0;
        while v == 0 {
            v = rng.gen_range(-3i64..=3);
        }
        fixed[i] = Some(int(v));
    }

    let system: Vec<MPoly> = equations
        .iter()
        .map(|e| e.substitute(&fixed))
        .filter(|e| !e.is_zero())
        .collect();
    if system.iter().any(MPoly::is_constant) {
        return None;
    }
    let mut free: Vec<usize> = open[pins..].to_vec();
    free.sort_unstable();
    let used: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&v| system.iter().any(|e| e.support().contains(&v)))
        .collect();
    for &v in &free {
        if !used.contains(&v) {
            fixed[v] = Some(int(rng.gen_range(-2i64..=2)));
        }
    }

    let values = if used.is_empty() {
        Vec::new()
    } else {
        let compiled: Vec<CompiledPoly> = system.iter().map(|e| normalized(e).compile(&used)).collect();
        newton(&compiled, used.len(), config, rng)?
    };
    Some(Approximation { fixed, used, values })
}

fn normalized(p: &MPoly) -> MPoly {
    let top = p.terms().map(|(_, c)| c.abs()).max();
    match top {
        Some(top) if !top.is_zero() => p.scale(&top.recip()),
        _ => p.clone(),
    }
}

fn residual(system: &[CompiledPoly], x: &[Complex64], jac: Option<&mut DMatrix<Complex64>>) -> DVector<Complex64> {
    let n = x.len();
    let mut grad = vec![Complex64::zero(); n];
    let mut f = DVector::zeros(system.len());
    match jac {
        Some(j) => {
            for (r, p) in system.iter().enumerate() {
                f[r] = p.eval_with_gradient(x, &mut grad);
                for c in 0..n {
                    j[(r, c)] = grad[c];
                }
            }
        }
        None => {
            for (r, p) in system.iter().enumerate() {
                f[r] = p.eval_with_gradient(x, &mut grad);
            }
        }
    }
    f
}

/// Least-squares Newton step `J·step = -f`; `None` on non-finite input or
/// when the SVD does not converge.
fn lstsq(jac: &DMatrix<Complex64>, f: &DVector<Complex64>, eps: f64) -> Option<DVector<Complex64>> {
    let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
    if !jac.iter().all(finite) || !f.iter().all(finite) {
        return None;
    }
    let svd = jac.clone().try_svd(true, true, f64::EPSILON, 500)?;
    svd.solve(&(-f), eps).ok()
}

/// Keeps taking full Newton steps while they still shrink the update;
/// near a singular zero convergence is only linear.
fn polish(system: &[CompiledPoly], mut x: Vec<Complex64>, mut jac: DMatrix<Complex64>, mut f: DVector<Complex64>) -> Vec<Complex64> {
    let mut last = f64::INFINITY;
    for _ in 0..60 {
        let Some(step) = lstsq(&jac, &f, 1e-14) else { break };
        let size = step.norm();
        if !size.is_finite() || size >= last {
            break;
        }
        last = size;
        for (xi, d) in x.iter_mut().zip(step.iter()) {
            *xi += d;
        }
        f = residual(system, &x, Some(&mut jac));
        if size < 1e-15 {
            break;
        }
    }
    x
}

fn newton(system: &[CompiledPoly], n: usize, config: &SearchConfig, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
        .collect();
    let mut jac = DMatrix::<Complex64>::zeros(system.len(), n);
    let mut f = residual(system, &x, Some(&mut jac));
    let mut norm = f.norm();
    for _ in 0..config.max_iter {
        if !norm.is_finite() {
            return None;
        }
        if norm < config.tol {
            return Some(polish(system, x, jac, f));
        }
        let step = lstsq(&jac, &f, 1e-12)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<Complex64> = x.iter().zip(step.iter()).map(|(xi, d)| xi + d * lambda).collect();
            let ft = residual(system, &trial, None);
            if ft.norm() < norm {
                x = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return (norm < config.loose_tol).then(|| polish(system, x, jac, f));
        }
        f = residual(system, &x, Some(&mut jac));
        norm = f.norm();
    }
    (norm < config.loose_tol).then(|| polish(system, x, jac, f))
}
