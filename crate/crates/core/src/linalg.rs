//! Perron eigendata of sparse nonnegative matrices and spectral radii of
//! small complex matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major sparse matrix: `rows[i]` lists (j, a_ij).
#[derive(Clone, Debug, Default)]
pub struct Sparse<T> {
    pub rows: Vec<Vec<(u32, T)>>,
}

impl<T: Copy> Sparse<T> {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn transpose(&self) -> Sparse<T> {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, a) in r {
                rows[j as usize].push((i as u32, a));
            }
        }
        Sparse { rows }
    }
}

impl Sparse<f64> {
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (yi, r) in y.iter_mut().zip(&self.rows) {
            *yi = r.iter().map(|&(j, a)| a * x[j as usize]).sum();
        }
    }
}

#[derive(Clone, Debug)]
pub struct Perron {
    pub value: f64,
    /// Right eigenvector, max-normalized.
    pub right: Vec<f64>,
    /// Left eigenvector, scaled so that ⟨left, right⟩ = 1.
    pub left: Vec<f64>,
    /// Collatz–Wielandt bracket width relative to the value.
    pub bracket: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 200_000;

/// Dominant eigenvector of an irreducible nonnegative matrix by power
/// iteration on A + cI; stops when the Collatz–Wielandt bounds agree to
/// `tol` relative.
fn power(a: &Sparse<f64>, tol: f64) -> Result<(f64, Vec<f64>, f64, usize)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Numeric("empty matrix".into()));
    }
    let shift = a
        .rows
        .iter()
        .map(|r| r.iter().map(|x| x.1).sum::<f64>())
        .sum::<f64>()
        / n as f64;
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut last = (0.0, f64::INFINITY);
    for it in 1..=MAX_ITER {
        a.mul_vec(&x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            y[i] += shift * x[i];
            let q = y[i] / x[i];
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let m = y.iter().cloned().fold(0.0, f64::max);
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Numeric("power iteration lost positivity".into()));
        }
        for i in 0..n {
            x[i] = (y[i] / m).max(1e-300);
        }
        let value = 0.5 * (lo + hi) - shift;
        let width = (hi - lo) / value.abs().max(1e-300);
        if width <= tol {
            return Ok((value, x, width, it));
        }
        last = (value, width);
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge: value {} with relative bracket {:.3e} after {MAX_ITER} iterations",
        last.0, last.1
    )))
}

/// Perron root and eigenvectors of an irreducible nonnegative matrix.
pub fn perron(a: &Sparse<f64>, tol: f64) -> Result<Perron> {
    let (value, right, bracket, it1) = power(a, tol)?;
    let (_, mut left, _, it2) = power(&a.transpose(), tol)?;
    let dot: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    left.iter_mut().for_each(|l| *l /= dot);
    Ok(Perron {
        value,
        right,
        left,
        bracket,
        iterations: it1 + it2,
    })
}

/// Perron root alone.
pub fn perron_root(a: &Sparse<f64>, tol: f64) -> Result<f64> {
    Ok(power(a, tol)?.0)
}

fn dense(a: &Sparse<Complex64>) -> Vec<Complex64> {
    let n = a.dim();
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for (i, r) in a.rows.iter().enumerate() {
        for &(j, v) in r {
            m[i * n + j as usize] += v;
        }
    }
    m
}

fn square(m: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let a = m[i * n + k];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let (row, src) = (&mut out[i * n..(i + 1) * n], &m[k * n..(k + 1) * n]);
            for (o, b) in row.iter_mut().zip(src) {
                *o += a * b;
            }
        }
    }
    out
}

fn frobenius(m: &[Complex64]) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dimension up to which [`spectral_radius`] squares densely.
pub const DENSE_LIMIT: usize = 400;

#[derive(Clone, Copy, Debug)]
pub struct RadiusEstimate {
    pub rho: f64,
    /// Change of the estimate over the last refinement.
    pub change: f64,
    pub converged: bool,
}

/// ρ(A) from the ratios ‖A^{2^{m+1}}‖/‖A^{2^m}‖ under repeated squaring,
/// or from averaged growth of a power iteration for large sparse matrices.
pub fn spectral_radius(a: &Sparse<Complex64>, tol: f64) -> RadiusEstimate {
    let n = a.dim();
    if n == 0 {
        return RadiusEstimate {
            rho: 0.0,
            change: 0.0,
            converged: true,
        };
    }
    if n > DENSE_LIMIT {
        return sparse_radius(a, tol);
    }
    let mut m = dense(a);
    let f = frobenius(&m);
    if f == 0.0 {
        return RadiusEstimate {
            rho: 0.0,
            change: 0.0,
            converged: true,
        };
    }
    m.iter_mut().for_each(|z| *z /= f);
    // log ‖A^{2^j}‖ = big_l
    let mut big_l = f.ln();
    let mut est = f64::NAN;
    for j in 0..60 {
        let mut sq = square(&m, n);
        let g = frobenius(&sq);
        if g == 0.0 {
            // Nilpotent.
            return RadiusEstimate {
                rho: 0.0,
                change: 0.0,
                converged: true,
            };
        }
        sq.iter_mut().for_each(|z| *z /= g);
        let next_l = 2.0 * big_l + g.ln();
        let e = ((next_l - big_l) / (1u64 << j) as f64).exp();
        let change = (e - est).abs();
        if j >= 4 && change <= tol * e.max(1e-300) {
            return RadiusEstimate {
                rho: e,
                change,
                converged: true,
            };
        }
        est = e;
        big_l = next_l;
        m = sq;
    }
    RadiusEstimate {
        rho: est,
        change: f64::NAN,
        converged: false,
    }
}

fn sparse_radius(a: &Sparse<Complex64>, tol: f64) -> RadiusEstimate {
    let n = a.dim();
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.1))
        .collect();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let step = |x: &mut Vec<Complex64>, y: &mut Vec<Complex64>| -> f64 {
        for (yi, r) in y.iter_mut().zip(&a.rows) {
            *yi = r.iter().map(|&(j, v)| v * x[j as usize]).sum();
        }
        let g = norm(y);
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            *xi = yi / g;
        }
        g
    };
    let burn = 2000;
    for _ in 0..burn {
        step(&mut x, &mut y);
    }
    let mut prev = f64::NAN;
    let mut sum = 0.0;
    let mut count = 0usize;
    for block in 1..=64 {
        for _ in 0..1000 {
            sum += step(&mut x, &mut y).ln();
            count += 1;
        }
        let e = (sum / count as f64).exp();
        if block > 1 && (e - prev).abs() <= tol * e {
            return RadiusEstimate {
                rho: e,
                change: (e - prev).abs(),
                converged: true,
            };
        }
        prev = e;
    }
    RadiusEstimate {
        rho: prev,
        change: f64::NAN,
        converged: false,
    }
}
