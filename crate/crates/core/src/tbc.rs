//! Discrete transparent boundary conditions.
//!
//! For each transverse mode the exterior problem is replaced by a
//! convolution in time of the edge trace with a kernel `R^0, R^1, ...`
//! generated by a three-term recurrence.

use crate::grid::{GridSpec, PhysicalConstants};
use crate::spectral::transverse_eigenpair;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Generating coefficients of the kernel for one limit potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelCoeffs {
    pub v_inf: f64,
    pub a: C64,
    pub alpha: C64,
    /// `arg(alpha)` in `(0, 2 pi)`.
    pub arg_alpha: f64,
    pub beta: f64,
    pub c1: C64,
    pub kappa: C64,
    pub mu: f64,
}

pub fn kernel_coefficients(
    v_inf: f64,
    tau: f64,
    h1: f64,
    consts: PhysicalConstants,
) -> Result<KernelCoeffs> {
    if !(tau > 0.0 && h1 > 0.0) {
        return Err(Error::Config(format!(
            "kernel needs tau > 0 and h1 > 0 (tau = {tau}, h1 = {h1})"
        )));
    }
    let c = consts.c_hbar;
    let a = C64::new(v_inf / (2.0 * c), consts.hbar / (tau * c));
    let h2 = h1 * h1;
    let alpha = a * 2.0 + a * a * (2.0 / 3.0 * h2);
    let beta = 2.0 * a.re + 2.0 / 3.0 * h2 * a.norm_sqr();
    let report = || format!("V_inf = {v_inf}, tau = {tau}, h1 = {h1}, alpha = {alpha}");
    if !(a.im > 0.0) || alpha.norm() == 0.0 || !alpha.norm().is_finite() {
        return Err(Error::Numerical(format!(
            "degenerate kernel parameters: {}",
            report()
        )));
    }
    if alpha.im == 0.0 && alpha.re > 0.0 {
        return Err(Error::Numerical(format!(
            "alpha on the positive real axis: {}",
            report()
        )));
    }
    let mut arg_alpha = alpha.im.atan2(alpha.re);
    if arg_alpha <= 0.0 {
        arg_alpha += 2.0 * PI;
    }
    let abs_alpha = alpha.norm();
    let c1 = -C64::from_polar(abs_alpha.sqrt() / 2.0, -arg_alpha / 2.0);
    let kappa = -C64::from_polar(1.0, arg_alpha);
    let mu = beta / abs_alpha;
    Ok(KernelCoeffs {
        v_inf,
        a,
        alpha,
        arg_alpha,
        beta,
        c1,
        kappa,
        mu,
    })
}

/// Kernel values `R^0..R^m` for one limit potential.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    pub coeffs: KernelCoeffs,
    values: Vec<C64>,
}

impl KernelTable {
    /// Table holding `R^0` and `R^1`.
    pub fn new(coeffs: KernelCoeffs) -> Self {
        let r0 = coeffs.c1;
        let r1 = -coeffs.c1 * coeffs.kappa * coeffs.mu;
        Self {
            coeffs,
            values: vec![r0, r1],
        }
    }

    pub fn build(
        v_inf: f64,
        tau: f64,
        h1: f64,
        consts: PhysicalConstants,
        m_max: usize,
    ) -> Result<Self> {
        let mut t = Self::new(kernel_coefficients(v_inf, tau, h1, consts)?);
        t.extend(m_max);
        Ok(t)
    }

    /// Extend by the forward recurrence so that `R^m_target` is available.
    pub fn extend(&mut self, m_target: usize) {
        let km = self.coeffs.kappa * self.coeffs.mu;
        let k2 = self.coeffs.kappa * self.coeffs.kappa;
        self.values
            .reserve((m_target + 1).saturating_sub(self.values.len()));
        for m in self.values.len()..=m_target {
            let mf = m as f64;
            let r = km * ((2.0 * mf - 3.0) / mf) * self.values[m - 1]
                - k2 * ((mf - 3.0) / mf) * self.values[m - 2];
            self.values.push(r);
        }
    }

    pub fn v_inf(&self) -> f64 {
        self.coeffs.v_inf
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn r0(&self) -> C64 {
        self.values[0]
    }
}

/// Edge traces `Ψ̃^0, Ψ̃^1, ...` of one mode at one edge. Entry 0 is zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceHistory {
    values: Vec<C64>,
}

impl TraceHistory {
    pub fn new() -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn with_capacity(levels: usize) -> Self {
        let mut values = Vec::with_capacity(levels + 1);
        values.push(C64::new(0.0, 0.0));
        Self { values }
    }

    pub fn push(&mut self, v: C64) {
        self.values.push(v);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

fn check_convolution(table: &KernelTable, history: &[C64], m: usize) -> Result<()> {
    if history.len() < m {
        return Err(Error::Range(format!(
            "history holds {} levels, level {m} needs {m}",
            history.len()
        )));
    }
    if table.len() <= m {
        return Err(Error::Range(format!(
            "kernel holds {} values, level {m} needs {}",
            table.len(),
            m + 1
        )));
    }
    Ok(())
}

/// Lagged part of the convolution, `sum_{p=1}^{m} R^p Ψ̃^{m-p}`.
pub fn convolve_lagged(table: &KernelTable, history: &TraceHistory, m: usize) -> Result<C64> {
    check_convolution(table, history.values(), m)?;
    Ok(lagged_sum(table.values(), history.values(), m))
}

#[inline]
pub(crate) fn lagged_sum(r: &[C64], hist: &[C64], m: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for p in 1..=m {
        acc += r[p] * hist[m - p];
    }
    acc
}

/// Neumaier-compensated `sum` of `f64` terms.
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

#[inline]
pub(crate) fn lagged_sum_compensated(r: &[C64], hist: &[C64], m: usize) -> C64 {
    let mut re = Compensated { sum: 0.0, c: 0.0 };
    let mut im = Compensated { sum: 0.0, c: 0.0 };
    for p in 1..=m {
        let (a, b) = (r[p], hist[m - p]);
        re.add(a.re * b.re);
        re.add(-a.im * b.im);
        im.add(a.re * b.im);
        im.add(a.im * b.re);
    }
    C64::new(re.sum + re.c, im.sum + im.c)
}

/// [`convolve_lagged`] with compensated summation.
pub fn convolve_lagged_compensated(
    table: &KernelTable,
    history: &TraceHistory,
    m: usize,
) -> Result<C64> {
    check_convolution(table, history.values(), m)?;
    Ok(lagged_sum_compensated(table.values(), history.values(), m))
}

/// `V_inf + c_hbar * sum_k λ_{q_k} / σ_{q_k}` for the 1-based transverse
/// mode tuple `q = (q2, ..., qn)`.
pub fn shifted_limit_potential(
    q: &[usize],
    grid: &GridSpec,
    v_inf: f64,
    consts: PhysicalConstants,
) -> Result<f64> {
    Ok(v_inf + consts.c_hbar * mode_shift_factor(q, grid)?)
}

/// `sum_k λ_{q_k} / σ_{q_k}`.
pub fn mode_shift_factor(q: &[usize], grid: &GridSpec) -> Result<f64> {
    if q.len() + 1 != grid.n() {
        return Err(Error::Shape(format!(
            "mode tuple of length {} for n = {}",
            q.len(),
            grid.n()
        )));
    }
    let mut s = 0.0;
    for (k, &qk) in q.iter().enumerate() {
        let (lam, sigma) = transverse_eigenpair(qk, grid.step(k + 1), grid.extent(k + 1))?;
        s += lam / sigma;
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `j1 = J1`.
    Right,
    /// `j1 = 0`.
    Left,
}

/// One boundary equation `edge * u_edge + neighbor * u_neighbor = rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryRow {
    pub edge: C64,
    pub neighbor: C64,
    pub rhs: C64,
}

/// Mesh and scheme data needed to assemble a boundary row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowParams {
    pub h1: f64,
    pub tau: f64,
    pub consts: PhysicalConstants,
    pub v_inf_q: f64,
}

impl RowParams {
    /// Row coefficients for unknowns at the edge and the neighbor (no rhs).
    pub fn matrix_entries(&self, r0: C64) -> (C64, C64) {
        let c = self.consts.c_hbar;
        let h = self.h1;
        let g = C64::new(-self.v_inf_q / 2.0, self.consts.hbar / self.tau);
        let edge = c / (2.0 * h) - g * (5.0 * h / 12.0) - r0 * c;
        let neighbor = -c / (2.0 * h) - g * (h / 12.0);
        (edge, neighbor)
    }

    /// Right-hand side from the known values `v` at edge and neighbor.
    ///
    /// Both edges give the same expression in (edge, neighbor) terms: the
    /// right flux `c ∂̄` and the left flux `-c ∂` both read
    /// `c (w_edge - w_neighbor) / h`.
    pub fn rhs(&self, v_edge: C64, v_neighbor: C64, lagged: C64) -> C64 {
        let c = self.consts.c_hbar;
        let h = self.h1;
        let gp = C64::new(-self.v_inf_q / 2.0, -self.consts.hbar / self.tau);
        let avg = (v_edge * 5.0 + v_neighbor) / 12.0;
        lagged * c - (v_edge - v_neighbor) * (c / (2.0 * h)) + gp * avg * h
    }
}

/// Boundary equation for the unknown `u = Ψ̃^{m q}` at one edge:
///
/// right: `c ∂̄(u+v)/2 - h s⁻[iħ(u-v)/τ - V(u+v)/2] - c R⁰ u_J = c lagged`,
/// left: `-c ∂(u+v)/2 - h s⁺[iħ(u-v)/τ - V(u+v)/2] - c R⁰ u_0 = c lagged`,
///
/// with `V = V_inf,q`. `v_edge`/`v_neighbor` are the known values at the
/// edge node and its inner neighbor.
pub fn boundary_row(
    side: Side,
    table: &KernelTable,
    params: &RowParams,
    v_edge: C64,
    v_neighbor: C64,
    lagged: C64,
) -> Result<BoundaryRow> {
    let scale = params.v_inf_q.abs().max(1.0);
    if (table.v_inf() - params.v_inf_q).abs() > 1e-15 * scale {
        return Err(Error::Precondition(format!(
            "kernel built for V_inf,q = {} used with {}",
            table.v_inf(),
            params.v_inf_q
        )));
    }
    let (edge, neighbor) = params.matrix_entries(table.r0());
    let _ = side;
    let rhs = params.rhs(v_edge, v_neighbor, lagged);
    Ok(BoundaryRow {
        edge,
        neighbor,
        rhs,
    })
}

/// Kernel tables shared by modes whose limit potentials coincide to
/// `1e-15` relative.
#[derive(Clone, Debug, Default)]
pub struct KernelRegistry {
    tables: Vec<KernelTable>,
}

impl KernelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of the table for `v_inf_q`, building it up to `m_max` if new.
    pub fn get_or_build(
        &mut self,
        v_inf_q: f64,
        tau: f64,
        h1: f64,
        consts: PhysicalConstants,
        m_max: usize,
    ) -> Result<usize> {
        let tol = 1e-15 * v_inf_q.abs().max(f64::MIN_POSITIVE);
        if let Some(i) = self
            .tables
            .iter()
            .position(|t| (t.v_inf() - v_inf_q).abs() <= tol)
        {
            self.tables[i].extend(m_max);
            return Ok(i);
        }
        self.tables
            .push(KernelTable::build(v_inf_q, tau, h1, consts, m_max)?);
        Ok(self.tables.len() - 1)
    }

    pub fn extend_all(&mut self, m_target: usize) {
        self.tables.iter_mut().for_each(|t| t.extend(m_target));
    }

    pub fn table(&self, i: usize) -> &KernelTable {
        &self.tables[i]
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}
