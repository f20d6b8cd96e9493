//! Banded symmetric matrices, their Cholesky factors and restarted GMRES.

use crate::error::{Error, Result};

/// Symmetric matrix with half-bandwidth `bw`, stored by rows of the lower
/// band: `data[i*(bw+1) + d] = A[i][i-d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        assert!(hi - lo <= self.bw, "entry ({i}, {j}) outside the band");
        hi * (self.bw + 1) + (hi - lo)
    }

    /// Adds `v` to `A[i][j]` and, by symmetry, to `A[j][i]`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.bw {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    pub fn add_diagonal(&mut self, d: &[f64]) {
        for (i, v) in d.iter().enumerate() {
            self.data[i * (self.bw + 1)] += v;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = row[0] * x[i];
            for d in 1..=self.bw.min(i) {
                let a = row[d];
                if a != 0.0 {
                    acc += a * x[i - d];
                    y[i - d] += a * x[i];
                }
            }
            y[i] += acc;
        }
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// `A = L Lᵀ`; fails when `A` is not positive definite.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = l[i * w + (i - j)];
                let kstart = lo.max(j.saturating_sub(bw));
                for k in kstart..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::LinearAlgebra(format!("matrix not positive definite at row {i}")));
                    }
                    l[i * w] = s.sqrt();
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        Ok(BandCholesky { n, bw, l })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[i * w + (i - k)] * y[k];
            }
            y[i] = s / self.l[i * w];
        }
        for i in (0..n).rev() {
            y[i] /= self.l[i * w];
            let yi = y[i];
            for k in i.saturating_sub(bw)..i {
                y[k] -= self.l[i * w + (i - k)] * yi;
            }
        }
        y
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Restarted GMRES for `op(x) = b` starting from zero.
pub fn gmres<F: Fn(&[f64]) -> Vec<f64>>(op: F, b: &[f64], tol: f64, restart: usize, max_iter: usize) -> (Vec<f64>, GmresOutcome) {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return (x, GmresOutcome { iterations: 0, relative_residual: 0.0 });
    }
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iter {
        let ax = op(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = dot(&r, &r).sqrt();
        rel = beta / bnorm;
        if rel <= tol {
            break;
        }
        let mut v = vec![r.into_iter().map(|ri| ri / beta).collect::<Vec<f64>>()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            let mut wv = op(&v[k]);
            for (j, vj) in v.iter().enumerate() {
                h[j][k] = dot(&wv, vj);
                axpy(-h[j][k], vj, &mut wv);
            }
            h[k + 1][k] = dot(&wv, &wv).sqrt();
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let den = h[k][k].hypot(h[k + 1][k]);
            cs[k] = h[k][k] / den;
            sn[k] = h[k + 1][k] / den;
            h[k][k] = den;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            total += 1;
            rel = g[k + 1].abs() / bnorm;
            let breakdown = !(den > 0.0) || wv.iter().all(|&x| x == 0.0);
            if rel <= tol || total >= max_iter || breakdown {
                break;
            }
            let norm = dot(&wv, &wv).sqrt();
            v.push(wv.into_iter().map(|x| x / norm).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &v[j], &mut x);
        }
        if rel <= tol {
            break;
        }
    }
    (x, GmresOutcome { iterations: total, relative_residual: rel })
}

/// Smallest eigenvalue of `A u = σ M u` with `M = diag(mass)` by inverse
/// iteration.
pub fn smallest_generalized_eigenvalue(a: &BandMatrix, chol: &BandCholesky, mass: &[f64], tol: f64, max_iter: usize) -> f64 {
    let mut x: Vec<f64> = vec![1.0; a.dim()];
    let mut sigma = f64::INFINITY;
    for _ in 0..max_iter {
        let rhs: Vec<f64> = x.iter().zip(mass).map(|(xi, mi)| xi * mi).collect();
        let mut y = chol.solve(&rhs);
        let my: f64 = y.iter().zip(mass).map(|(yi, mi)| yi * yi * mi).sum();
        let next = a.quadratic_form(&y) / my;
        let s = my.sqrt();
        y.iter_mut().for_each(|v| *v /= s);
        x = y;
        let done = (next - sigma).abs() <= tol * next.abs();
        sigma = next;
        if done {
            break;
        }
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i + 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn cholesky_solves_band_system() {
        let n = 50;
        let mut a = BandMatrix::zeros(n, 3);
        for i in 0..n {
            a.add(i, i, 10.0 + i as f64 * 0.1);
            for d in 1..=3 {
                if i + d < n {
                    a.add(i + d, i, -1.0 / d as f64);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x);
        let y = a.cholesky().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
        assert!((a.get(3, 5) + 0.5).abs() < 1e-15 && a.get(0, 9) == 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = laplacian_1d(5);
        a.add(2, 2, -5.0);
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn gmres_solves_nonsymmetric_system() {
        let n = 40;
        let op = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| 3.0 * x[i] + if i > 0 { x[i - 1] } else { 0.0 } - 0.5 * if i + 1 < n { x[i + 1] } else { 0.0 })
                .collect()
        };
        let xs: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let b = op(&xs);
        let (x, out) = gmres(op, &b, 1e-12, 10, 200);
        assert!(out.relative_residual <= 1e-12);
        for (u, v) in x.iter().zip(&xs) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_iteration_finds_lowest_mode() {
        let n = 30;
        let a = laplacian_1d(n);
        let chol = a.cholesky().unwrap();
        let mass = vec![1.0; n];
        let s = smallest_generalized_eigenvalue(&a, &chol, &mass, 1e-14, 10_000);
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((s - exact).abs() < 1e-10 * exact);
    }
}
