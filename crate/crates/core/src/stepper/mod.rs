//! Time integration.
//!
//! One level of the double-splitting scheme consists of five steps:
//! the potential half-step `Ψ̆ = E Ψ^{m-1}`, forward transverse transforms,
//! independent 1D solves per transverse mode, inverse transforms, and the
//! second potential half-step `Ψ^m = E Ψ̃`.

mod mode;
mod thomas;

pub use mode::{EdgeState, ModeSetup, ModeWorkspace};
pub use thomas::{thomas_solve, Tridiagonal, TridiagonalLu, PIVOT_TOL};

use crate::grid::{BoundaryKind, GridSpec, PhysicalConstants, PotentialField, WaveField};
use crate::tbc::KernelRegistry;
use crate::transforms::{ModeField, ModeTransform};
use crate::{Error, Result, C64};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeVariant {
    /// Splitting averages with a transparent right edge.
    DoubleSplitTbc,
    /// Splitting averages with a Dirichlet right edge.
    DoubleSplitDirichlet,
    /// Additive Numerov averages with Strang splitting and Dirichlet walls.
    ComparisonNcnStrangDirichlet,
}

impl SchemeVariant {
    pub fn right_boundary(self) -> BoundaryKind {
        match self {
            SchemeVariant::DoubleSplitTbc => BoundaryKind::Transparent,
            _ => BoundaryKind::Dirichlet,
        }
    }
}

/// `(1 - i τ dV / (4ħ)) / (1 + i τ dV / (4ħ))`.
pub fn strang_multiplier(dv: f64, tau: f64, hbar: f64) -> C64 {
    let z = C64::new(1.0, -tau * dv / (4.0 * hbar));
    z / z.conj()
}

/// Solver state and preassembled per-mode systems.
pub struct Stepper {
    grid: GridSpec,
    consts: PhysicalConstants,
    variant: SchemeVariant,
    potential: PotentialField,
    multiplier: Vec<C64>,
    transform: ModeTransform,
    registry: KernelRegistry,
    modes: Vec<ModeWorkspace>,
    v_modes: ModeField,
    u_modes: ModeField,
    f_modes: ModeField,
    psi: WaveField,
    breve: WaveField,
    tilde: WaveField,
    level: usize,
    compensated: bool,
}

impl Stepper {
    /// Set up a run from `psi0` (level 0). Transverse faces of `psi0` are
    /// zeroed; for transparent edges the two edge layers must already vanish.
    pub fn new(
        grid: &GridSpec,
        consts: PhysicalConstants,
        potential: PotentialField,
        variant: SchemeVariant,
        psi0: &WaveField,
    ) -> Result<Self> {
        if grid.n() != 2 {
            return Err(Error::Unsupported(format!(
                "time stepping is wired for n = 2, got n = {}",
                grid.n()
            )));
        }
        if psi0.shape() != grid.shape().as_slice() {
            return Err(Error::Shape("initial field does not match the mesh".into()));
        }
        if potential.v.len() != grid.node_count() {
            return Err(Error::Shape("potential does not match the mesh".into()));
        }
        let right = variant.right_boundary();
        let left = grid.left_boundary();
        if right == BoundaryKind::Dirichlet && left == BoundaryKind::Transparent {
            return Err(Error::Config(format!(
                "{variant:?} needs a Dirichlet left edge"
            )));
        }
        potential.validate_support(grid, right)?;
        let j1 = grid.count(0);
        let mut edge_layers = Vec::new();
        if left == BoundaryKind::Transparent {
            edge_layers.extend([0, 1]);
        }
        if right == BoundaryKind::Transparent {
            edge_layers.extend([j1 - 1, j1]);
        }
        for j in edge_layers {
            if psi0.layer(j).iter().any(|v| v.norm() != 0.0) {
                return Err(Error::Precondition(format!(
                    "initial data must vanish on layer j1 = {j} next to a transparent edge"
                )));
            }
        }

        let multiplier = potential
            .dv
            .iter()
            .map(|&d| strang_multiplier(d, grid.tau(), consts.hbar))
            .collect();
        let transform = ModeTransform::new(grid)?;
        let mut registry = KernelRegistry::new();
        let setup = ModeSetup {
            variant,
            grid,
            consts,
            v_tilde: &potential.v_tilde,
            v_inf: potential.v_inf,
            left,
            right,
        };
        let proto = ModeField::zeros(grid);
        let modes = (0..proto.mode_count())
            .map(|q| ModeWorkspace::new(&setup, proto.mode_tuple(q), &mut registry))
            .collect::<Result<Vec<_>>>()?;

        let mut psi = psi0.clone();
        psi.level = 0;
        psi.zero_dirichlet_faces(grid, left, right);
        Ok(Self {
            grid: grid.clone(),
            consts,
            variant,
            potential,
            multiplier,
            transform,
            registry,
            modes,
            v_modes: proto.clone(),
            u_modes: proto.clone(),
            f_modes: proto,
            breve: psi.clone(),
            tilde: psi.clone(),
            psi,
            level: 0,
            compensated: false,
        })
    }

    /// Use compensated summation in the boundary convolutions.
    pub fn with_compensated_convolution(mut self, on: bool) -> Self {
        self.compensated = on;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn consts(&self) -> PhysicalConstants {
        self.consts
    }
    pub fn variant(&self) -> SchemeVariant {
        self.variant
    }
    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn time(&self) -> f64 {
        self.level as f64 * self.grid.tau()
    }
    /// Current solution `Ψ^m`.
    pub fn psi(&self) -> &WaveField {
        &self.psi
    }
    /// `Ψ̆^m` of the last step.
    pub fn breve(&self) -> &WaveField {
        &self.breve
    }
    /// `Ψ̃^m` of the last step.
    pub fn tilde(&self) -> &WaveField {
        &self.tilde
    }
    pub fn modes(&self) -> &[ModeWorkspace] {
        &self.modes
    }
    pub fn kernels(&self) -> &KernelRegistry {
        &self.registry
    }
    pub fn uses_fast_transforms(&self) -> bool {
        self.transform.is_fast()
    }

    /// Advance one level with `F = 0`.
    pub fn step(&mut self) -> Result<()> {
        self.step_with_source(None)
    }

    /// Advance one level with the source `F^m` (values on the mesh).
    pub fn step_with_source(&mut self, source: Option<&WaveField>) -> Result<()> {
        let m = self.level + 1;
        if let Some(f) = source {
            if !f.same_shape(&self.psi) {
                return Err(Error::Shape("source does not match the mesh".into()));
            }
        }
        // Kernel tables are built to the planned level count; runs going
        // past it extend them here, outside the parallel section.
        if (0..self.registry.len()).any(|i| self.registry.table(i).len() <= m) {
            self.registry.extend_all((2 * m).max(self.grid.levels()));
        }

        // Step 1.
        self.breve
            .values_mut()
            .par_iter_mut()
            .zip(self.psi.values().par_iter())
            .zip(self.multiplier.par_iter())
            .for_each(|((b, p), e)| *b = e * p);
        self.breve.level = m;

        // Step 2.
        self.transform
            .analyze_into(&self.breve, &mut self.v_modes)?;
        let have_source = source.is_some();
        if let Some(f) = source {
            self.transform.analyze_into(f, &mut self.f_modes)?;
        }

        // Step 3.
        let len1 = self.v_modes.len1;
        let registry = &self.registry;
        let compensated = self.compensated;
        let f_data = &self.f_modes.data;
        self.modes
            .par_iter_mut()
            .zip(self.u_modes.data.par_chunks_mut(len1))
            .zip(self.v_modes.data.par_chunks(len1))
            .enumerate()
            .for_each(|(q, ((ws, u), v))| {
                let f = have_source.then(|| &f_data[q * len1..(q + 1) * len1]);
                ws.solve(v, f, u, registry, m, compensated);
            });

        // Step 4.
        self.transform
            .synthesize_into(&self.u_modes, &mut self.tilde)?;
        self.tilde.level = m;

        // Step 5.
        self.psi
            .values_mut()
            .par_iter_mut()
            .zip(self.tilde.values().par_iter())
            .zip(self.multiplier.par_iter())
            .for_each(|((p, t), e)| *p = e * t);
        self.psi.level = m;
        if self
            .psi
            .values()
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Numerical(format!("non-finite values at level {m}")));
        }
        self.level = m;
        Ok(())
    }

    /// Advance to `grid.levels()`, calling `observe` at level 0, every
    /// `stride`-th level and the final level.
    pub fn run<F>(&mut self, stride: usize, mut observe: F) -> Result<()>
    where
        F: FnMut(&Stepper) -> Result<()>,
    {
        let total = self.grid.levels();
        let stride = stride.max(1);
        observe(self)?;
        while self.level < total {
            self.step()?;
            if self.level % stride == 0 || self.level == total {
                observe(self)?;
            }
        }
        Ok(())
    }
}
