//! Brute-force reference computations for the test suites.
//!
//! Nothing in here shares code with `tdse-core`: every routine is the
//! slowest obvious evaluation of the defining formula, so it can be used to
//! freeze expected values and to cross-check the fast paths.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Direct O(J^2) forward sine transform, `(2/J) * sum_j p_j sin(pi q j / J)`.
pub fn direct_dst_forward(p: &[C64]) -> Vec<C64> {
    let j_count = p.len() + 1;
    (1..j_count)
        .map(|q| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in p.iter().enumerate() {
                let j = j + 1;
                acc += v * (PI * (q * j) as f64 / j_count as f64).sin();
            }
            acc * (2.0 / j_count as f64)
        })
        .collect()
}

/// Direct O(J^2) inverse sine transform, `sum_q c_q sin(pi q j / J)`.
pub fn direct_dst_inverse(c: &[C64]) -> Vec<C64> {
    let j_count = c.len() + 1;
    (1..j_count)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (q, v) in c.iter().enumerate() {
                let q = q + 1;
                acc += v * (PI * (q * j) as f64 / j_count as f64).sin();
            }
            acc
        })
        .collect()
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Vec<C64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &k| a[i][col].norm().partial_cmp(&a[k][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.norm() > 0.0, "singular dense system");
        for row in col + 1..n {
            let f = a[row][col] / d;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Full discrete convolution `sum_{p=0}^{m} r[p] q[m-p]`, double loop.
pub fn brute_convolution(r: &[C64], q: &[C64], m: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..=m {
        acc += r[p] * q[m - p];
    }
    acc
}

/// Elimination for a general banded (tridiagonal) system stored row-wise
/// as `(sub, diag, sup)` triples, no pivoting, no prefactoring.
fn banded_elimination(rows: &[[C64; 3]], rhs: &[C64]) -> Vec<C64> {
    let n = rhs.len();
    let mut diag: Vec<C64> = rows.iter().map(|r| r[1]).collect();
    let mut b = rhs.to_vec();
    for i in 1..n {
        let f = rows[i][0] / diag[i - 1];
        diag[i] -= f * rows[i - 1][2];
        let t = b[i - 1];
        b[i] -= f * t;
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    x[n - 1] = b[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (b[i] - rows[i][2] * x[i + 1]) / diag[i];
    }
    x
}

/// Physical and mesh parameters of a 1D Numerov-Crank-Nicolson problem with
/// constant potential.
#[derive(Clone, Copy, Debug)]
pub struct Ncn1dParams {
    pub hbar: f64,
    pub c_hbar: f64,
    pub h: f64,
    pub tau: f64,
}

/// Exterior Dirichlet-to-Neumann oracle.
///
/// Integrates `i hbar s_N dP/dt = (-c d^2 + V s_N) avg_t P` on nodes
/// `0..=len` with the trace at node 0 prescribed at every level, zero data
/// initially and `P = 0` at node `len`. Returns, for each level `m >= 1`,
/// the flux functional `c dP_0 + h s^+ G_0`, where `G = i hbar d_t P - V avg_t P`
/// (index 0 of the returned vector is level 0 and is zero).
pub fn exterior_flux_series(par: Ncn1dParams, v: f64, len: usize, trace: &[C64]) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    let ih_t = i * par.hbar / par.tau;
    let c_h2 = par.c_hbar / (par.h * par.h);
    let off_l = ih_t / 12.0 + c_h2 / 2.0 - v / 24.0;
    let mid_l = ih_t * (5.0 / 6.0) - c_h2 - 5.0 * v / 12.0;
    let off_r = ih_t / 12.0 - c_h2 / 2.0 + v / 24.0;
    let mid_r = ih_t * (5.0 / 6.0) + c_h2 + 5.0 * v / 12.0;

    let n_unknown = len - 1;
    let rows: Vec<[C64; 3]> = (0..n_unknown)
        .map(|k| {
            let sub = if k == 0 { C64::new(0.0, 0.0) } else { off_l };
            let sup = if k + 1 == n_unknown {
                C64::new(0.0, 0.0)
            } else {
                off_l
            };
            [sub, mid_l, sup]
        })
        .collect();

    let mut prev = vec![C64::new(0.0, 0.0); len + 1];
    let mut out = vec![C64::new(0.0, 0.0); trace.len()];
    for m in 1..trace.len() {
        let mut next = vec![C64::new(0.0, 0.0); len + 1];
        next[0] = trace[m];
        let mut rhs = vec![C64::new(0.0, 0.0); n_unknown];
        for k in 0..n_unknown {
            let node = k + 1;
            rhs[k] = off_r * prev[node - 1] + mid_r * prev[node] + off_r * prev[node + 1];
        }
        rhs[0] -= off_l * next[0];
        let sol = banded_elimination(&rows, &rhs);
        next[1..len].copy_from_slice(&sol);

        let y0 = (next[0] + prev[0]) / 2.0;
        let y1 = (next[1] + prev[1]) / 2.0;
        let g0 = i * par.hbar * (next[0] - prev[0]) / par.tau - v * y0;
        let g1 = i * par.hbar * (next[1] - prev[1]) / par.tau - v * y1;
        out[m] = par.c_hbar * (y1 - y0) / par.h + par.h * (5.0 / 12.0 * g0 + 1.0 / 12.0 * g1);
        prev = next;
    }
    out
}

/// Reference 1D Numerov-Crank-Nicolson integrator with homogeneous Dirichlet
/// walls at nodes `0` and `pot.len() - 1`.
///
/// `pot[j]` is the (real) potential profile. Each level solves the dense
/// system assembled from the defining difference equation.
pub fn ncn_1d_dirichlet(par: Ncn1dParams, pot: &[f64], init: &[C64], levels: usize) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    let n = pot.len();
    let mut u = init.to_vec();
    u[0] = C64::new(0.0, 0.0);
    u[n - 1] = C64::new(0.0, 0.0);
    let ih_t = i * par.hbar / par.tau;
    let c_h2 = par.c_hbar / (par.h * par.h);
    let w = [1.0 / 12.0, 5.0 / 6.0, 1.0 / 12.0];
    let lap = [1.0, -2.0, 1.0];
    for _ in 0..levels {
        let m = n - 2;
        let mut a = vec![vec![C64::new(0.0, 0.0); m]; m];
        let mut b = vec![C64::new(0.0, 0.0); m];
        for row in 0..m {
            let j = row + 1;
            for (d, node) in [j - 1, j, j + 1].into_iter().enumerate() {
                // i hbar s (u-v)/tau + c/2 dd (u+v) - 1/2 s(pot (u+v)) = 0
                let lhs = ih_t * w[d] + 0.5 * c_h2 * lap[d] - 0.5 * w[d] * pot[node];
                let rhs = ih_t * w[d] - 0.5 * c_h2 * lap[d] + 0.5 * w[d] * pot[node];
                b[row] += rhs * u[node];
                if node >= 1 && node <= m {
                    a[row][node - 1] += lhs;
                }
            }
        }
        let x = dense_solve(a, b);
        u[1..n - 1].copy_from_slice(&x);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dst_pair_is_inverse() {
        let p: Vec<C64> = (0..7)
            .map(|k| C64::new(k as f64, -(k as f64) * 0.5))
            .collect();
        let back = direct_dst_inverse(&direct_dst_forward(&p));
        for (a, b) in p.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_solve_small() {
        let a = vec![
            vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
        ];
        let x = dense_solve(a, vec![C64::new(3.0, 0.0), C64::new(3.0, 0.0)]);
        assert!((x[0] - 1.0).norm() < 1e-14 && (x[1] - 1.0).norm() < 1e-14);
    }
}
