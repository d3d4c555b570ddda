//! Per-mode 1D systems along the leading axis.

use super::thomas::{Tridiagonal, TridiagonalLu};
use super::SchemeVariant;
use crate::grid::{BoundaryKind, GridSpec, PhysicalConstants};
use crate::spectral::transverse_eigenpair;
use crate::tbc::{lagged_sum, lagged_sum_compensated, KernelRegistry, RowParams, TraceHistory};
use crate::{Error, Result, C64};

/// Transparent-edge state of one mode.
#[derive(Clone, Debug)]
pub struct EdgeState {
    pub kernel: usize,
    pub history: TraceHistory,
    pub params: RowParams,
}

/// The fixed system matrix, the explicit operator and boundary data of the
/// 1D problem for one transverse mode.
#[derive(Clone, Debug)]
pub struct ModeWorkspace {
    /// 1-based transverse mode tuple.
    pub q: Vec<usize>,
    /// `sum_k λ_{q_k} / σ_{q_k}`.
    pub shift_factor: f64,
    /// `prod_k σ_{q_k}`.
    pub sigma_prod: f64,
    /// Potential profile entering the leading-axis Numerov average.
    pub profile: Vec<f64>,
    /// First and last unknown node.
    pub lo: usize,
    pub hi: usize,
    pub implicit: Tridiagonal,
    pub explicit: Tridiagonal,
    lu: TridiagonalLu,
    source_scale: f64,
    pub right: Option<EdgeState>,
    pub left: Option<EdgeState>,
    rhs: Vec<C64>,
}

/// Mesh-level inputs shared by every mode.
pub struct ModeSetup<'a> {
    pub variant: SchemeVariant,
    pub grid: &'a GridSpec,
    pub consts: PhysicalConstants,
    pub v_tilde: &'a [f64],
    pub v_inf: f64,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
}

impl ModeWorkspace {
    pub fn new(setup: &ModeSetup, q: Vec<usize>, registry: &mut KernelRegistry) -> Result<Self> {
        let grid = setup.grid;
        let j1 = grid.count(0);
        if setup.v_tilde.len() != j1 + 1 {
            return Err(Error::Shape(format!(
                "auxiliary potential has {} values for {} nodes",
                setup.v_tilde.len(),
                j1 + 1
            )));
        }
        let mut lams = Vec::with_capacity(q.len());
        let mut sigmas = Vec::with_capacity(q.len());
        for (k, &qk) in q.iter().enumerate() {
            let (l, s) = transverse_eigenpair(qk, grid.step(k + 1), grid.extent(k + 1))?;
            lams.push(l);
            sigmas.push(s);
        }
        let shift_factor: f64 = lams.iter().zip(&sigmas).map(|(l, s)| l / s).sum();
        let sigma_prod: f64 = sigmas.iter().product();
        let c = setup.consts.c_hbar;
        let hbar = setup.consts.hbar;
        let h = grid.step(0);
        let tau = grid.tau();
        let lo = if setup.left == BoundaryKind::Transparent {
            0
        } else {
            1
        };
        let hi = if setup.right == BoundaryKind::Transparent {
            j1
        } else {
            j1 - 1
        };
        let order = hi + 1 - lo;
        let mut implicit = Tridiagonal::zeros(order);
        let mut explicit = Tridiagonal::zeros(order);
        let it = C64::new(0.0, hbar / tau);
        let c_h2 = c / (h * h);

        let (profile, source_scale) = match setup.variant {
            SchemeVariant::DoubleSplitTbc | SchemeVariant::DoubleSplitDirichlet => {
                let p: Vec<f64> = setup.v_tilde.iter().map(|v| v + c * shift_factor).collect();
                for j in lo.max(1)..=hi.min(j1 - 1) {
                    let r = j - lo;
                    implicit.lower[r] = it / 12.0 + c_h2 / 2.0 - p[j - 1] / 24.0;
                    implicit.upper[r] = it / 12.0 + c_h2 / 2.0 - p[j + 1] / 24.0;
                    implicit.diag[r] = it * (5.0 / 6.0) - c_h2 - 5.0 * p[j] / 12.0;
                    explicit.lower[r] = it / 12.0 - c_h2 / 2.0 + p[j - 1] / 24.0;
                    explicit.upper[r] = it / 12.0 - c_h2 / 2.0 + p[j + 1] / 24.0;
                    explicit.diag[r] = it * (5.0 / 6.0) + c_h2 + 5.0 * p[j] / 12.0;
                }
                (p, 1.0 / sigma_prod)
            }
            SchemeVariant::ComparisonNcnStrangDirichlet => {
                if q.len() != 1 {
                    return Err(Error::Unsupported(
                        "comparison scheme is wired for n = 2 only".into(),
                    ));
                }
                // Additive average s_N -> s_N1 - (1 - σ), Δ_hN -> σ ∂∂̄ - λ s_N1.
                let (lam, sigma) = (lams[0], sigmas[0]);
                let p = setup.v_tilde.to_vec();
                let w_mid = sigma - 1.0 / 6.0;
                for j in lo.max(1)..=hi.min(j1 - 1) {
                    let r = j - lo;
                    let off =
                        |v: f64| it / 12.0 + c * sigma / (2.0 * h * h) - c * lam / 24.0 - v / 24.0;
                    let off_e =
                        |v: f64| it / 12.0 - c * sigma / (2.0 * h * h) + c * lam / 24.0 + v / 24.0;
                    implicit.lower[r] = off(p[j - 1]);
                    implicit.upper[r] = off(p[j + 1]);
                    implicit.diag[r] =
                        it * w_mid - c_h2 * sigma - 5.0 * c * lam / 12.0 - 0.5 * p[j] * w_mid;
                    explicit.lower[r] = off_e(p[j - 1]);
                    explicit.upper[r] = off_e(p[j + 1]);
                    explicit.diag[r] =
                        it * w_mid + c_h2 * sigma + 5.0 * c * lam / 12.0 + 0.5 * p[j] * w_mid;
                }
                (p, 1.0)
            }
        };

        let m_max = grid.levels().max(1);
        let edge = |edge_node: usize, registry: &mut KernelRegistry| -> Result<EdgeState> {
            let v_inf_q = setup.v_inf + c * shift_factor;
            let scale = v_inf_q.abs().max(1.0);
            if (profile[edge_node] - v_inf_q).abs() > 1e-12 * scale {
                return Err(Error::Precondition(format!(
                    "auxiliary potential at the transparent edge j1 = {edge_node} differs from V_inf"
                )));
            }
            let kernel = registry.get_or_build(v_inf_q, tau, h, setup.consts, m_max)?;
            Ok(EdgeState {
                kernel,
                history: TraceHistory::with_capacity(grid.levels()),
                params: RowParams {
                    h1: h,
                    tau,
                    consts: setup.consts,
                    v_inf_q,
                },
            })
        };
        let right = if setup.right == BoundaryKind::Transparent {
            let e = edge(j1, registry)?;
            let (d, n) = e.params.matrix_entries(registry.table(e.kernel).r0());
            implicit.diag[order - 1] = d;
            implicit.lower[order - 1] = n;
            Some(e)
        } else {
            None
        };
        let left = if setup.left == BoundaryKind::Transparent {
            let e = edge(0, registry)?;
            let (d, n) = e.params.matrix_entries(registry.table(e.kernel).r0());
            implicit.diag[0] = d;
            implicit.upper[0] = n;
            Some(e)
        } else {
            None
        };
        let lu = TridiagonalLu::factor(&implicit)?;
        Ok(Self {
            q,
            shift_factor,
            sigma_prod,
            profile,
            lo,
            hi,
            implicit,
            explicit,
            lu,
            source_scale,
            right,
            left,
            rhs: vec![C64::new(0.0, 0.0); order],
        })
    }

    /// Right-hand side of the level-`m` system from the known column `v`
    /// (all leading-axis nodes), optional source column and the edge
    /// histories.
    pub fn assemble_rhs(
        &mut self,
        v: &[C64],
        source: Option<&[C64]>,
        registry: &KernelRegistry,
        m: usize,
        compensated: bool,
    ) -> &[C64] {
        let j1 = v.len() - 1;
        for j in self.lo.max(1)..=self.hi.min(j1 - 1) {
            let r = j - self.lo;
            let mut s = self.explicit.lower[r] * v[j - 1]
                + self.explicit.diag[r] * v[j]
                + self.explicit.upper[r] * v[j + 1];
            if let Some(f) = source {
                s += f[j] * self.source_scale;
            }
            self.rhs[r] = s;
        }
        let lagged = |e: &EdgeState| {
            let r = registry.table(e.kernel).values();
            if compensated {
                lagged_sum_compensated(r, e.history.values(), m)
            } else {
                lagged_sum(r, e.history.values(), m)
            }
        };
        if let Some(e) = &self.right {
            let last = self.rhs.len() - 1;
            self.rhs[last] = e.params.rhs(v[j1], v[j1 - 1], lagged(e));
        }
        if let Some(e) = &self.left {
            self.rhs[0] = e.params.rhs(v[0], v[1], lagged(e));
        }
        &self.rhs
    }

    /// Advance one level: `u` receives the new column on all nodes
    /// (zero on Dirichlet walls) and the edge traces are recorded.
    pub fn solve(
        &mut self,
        v: &[C64],
        source: Option<&[C64]>,
        u: &mut [C64],
        registry: &KernelRegistry,
        m: usize,
        compensated: bool,
    ) {
        self.assemble_rhs(v, source, registry, m, compensated);
        self.lu.solve_in_place(&mut self.rhs);
        u.fill(C64::new(0.0, 0.0));
        u[self.lo..=self.hi].copy_from_slice(&self.rhs);
        let j1 = u.len() - 1;
        if let Some(e) = &mut self.right {
            e.history.push(u[j1]);
        }
        if let Some(e) = &mut self.left {
            e.history.push(u[0]);
        }
    }

    pub fn unknowns(&self) -> usize {
        self.hi + 1 - self.lo
    }
}
