//! Linear algebra for the monolithic system: banded LU with partial
//! pivoting (LAPACK `dgbtrf` layout), reverse Cuthill–McKee ordering, and
//! a Jacobi-preconditioned BiCGSTAB fallback.

use crate::error::{Error, Result};

/// General band matrix with `kl` sub- and `ku` superdiagonals, stored
/// column-major with `kl` extra rows of fill space for pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.ku + self.kl >= j && j + self.kl >= i, "({i},{j}) outside band");
        j * self.ldab + (self.ku + self.kl + i - j)
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i + self.ku >= j && j + self.kl >= i
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Symmetric elimination of dof `k`: zero its row and column, put 1 on
    /// the diagonal. The right-hand side is corrected by the caller (the
    /// iterate already satisfies the constraint, so the correction is the
    /// plain residual zeroing).
    pub fn eliminate_dof(&mut self, k: usize) {
        let lo = k.saturating_sub(self.ku.max(self.kl));
        let hi = (k + self.ku.max(self.kl)).min(self.n - 1);
        for m in lo..=hi {
            if self.in_band(k, m) {
                self.set(k, m, 0.0);
            }
            if self.in_band(m, k) {
                self.set(m, k, 0.0);
            }
        }
        self.set(k, k, 1.0);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            let xj = x[j];
            for i in lo..=hi {
                y[i] += self.data[self.idx(i, j)] * xj;
            }
        }
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.get(k, k)).collect()
    }

    /// In-place banded LU with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let i_max = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for i in (j + 1)..=i_max {
                let v = self.data[self.idx(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::LinearSolver(format!(
                    "zero or non-finite pivot at column {j}"
                )));
            }
            ipiv[j] = p;
            let k_max = (j + kl + ku).min(n - 1);
            if p != j {
                for k in j..=k_max {
                    let a = self.idx(j, k);
                    let b = self.idx(p, k);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(j, j)];
            for i in (j + 1)..=i_max {
                let at = self.idx(i, j);
                let m = self.data[at] / pivot;
                self.data[at] = m;
                if m != 0.0 {
                    for k in (j + 1)..=k_max {
                        let ajk = self.data[self.idx(j, k)];
                        if ajk != 0.0 {
                            let t = self.idx(i, k);
                            self.data[t] -= m * ajk;
                        }
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            ku,
            ldab: self.ldab,
            data: self.data,
            ipiv,
        })
    }
}

/// Factored band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.ku + self.kl + i - j)
    }

    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        // L y = P b
        for j in 0..n {
            b.swap(j, self.ipiv[j]);
            let bj = b[j];
            if bj != 0.0 {
                let i_max = (j + self.kl).min(n - 1);
                for i in (j + 1)..=i_max {
                    b[i] -= self.data[self.idx(i, j)] * bj;
                }
            }
        }
        // U x = y
        for j in (0..n).rev() {
            b[j] /= self.data[self.idx(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                let i_min = j.saturating_sub(self.kl + self.ku);
                for i in i_min..j {
                    b[i] -= self.data[self.idx(i, j)] * bj;
                }
            }
        }
    }
}

/// Reverse Cuthill–McKee ordering. Returns `perm[old] = new`.
pub fn rcm_permutation(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let degree = |k: usize| adjacency[k].len();
    loop {
        // lowest-degree unvisited seed
        let seed = (0..n)
            .filter(|&k| !visited[k])
            .min_by_key(|&k| degree(k));
        let Some(seed) = seed else { break };
        visited[seed] = true;
        let mut queue = std::collections::VecDeque::from([seed]);
        while let Some(k) = queue.pop_front() {
            order.push(k);
            let mut next: Vec<usize> = adjacency[k]
                .iter()
                .copied()
                .filter(|&m| !visited[m])
                .collect();
            next.sort_by_key(|&m| degree(m));
            for m in next {
                if !visited[m] {
                    visited[m] = true;
                    queue.push_back(m);
                }
            }
        }
    }
    order.reverse();
    let mut perm = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    perm
}

/// Jacobi-preconditioned BiCGSTAB to relative residual `tol`.
pub fn bicgstab(a: &BandMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 1e-300 { 1.0 / d } else { 1.0 })
        .collect();
    let norm_b = dot(b, b).sqrt();
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for _ in 0..max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < 1e-300 {
            return Err(Error::LinearSolver("bicgstab breakdown (rho = 0)".into()));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat: Vec<f64> = (0..n).map(|i| p[i] * inv_diag[i]).collect();
        v = a.matvec(&p_hat);
        alpha = rho_new / dot(&r0, &v);
        let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
        if dot(&s, &s).sqrt() / norm_b < tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok(x);
        }
        let s_hat: Vec<f64> = (0..n).map(|i| s[i] * inv_diag[i]).collect();
        let t = a.matvec(&s_hat);
        let tt = dot(&t, &t);
        if tt.abs() < 1e-300 {
            return Err(Error::LinearSolver("bicgstab breakdown (t = 0)".into()));
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        if dot(&r, &r).sqrt() / norm_b < tol {
            return Ok(x);
        }
        rho = rho_new;
    }
    Err(Error::LinearSolver(format!(
        "bicgstab did not reach tolerance {tol} in {max_iter} iterations"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
