//! Mesh, potential and initial data built from a configuration.

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use tdse_core::grid::{
    enforce_initial_support, gaussian_packet, sample_potential, BoundaryKind, GridSpec,
    PhysicalConstants, PotentialField, WaveField,
};
use tdse_core::stepper::{SchemeVariant, Stepper};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub grid: GridSpec,
    pub consts: PhysicalConstants,
    pub potential: PotentialField,
    pub psi0: WaveField,
    pub variant: SchemeVariant,
    pub compensated: bool,
    /// Largest potential deviation clamped at transparent edges.
    pub clamped_potential: f64,
    /// Largest initial value zeroed at transparent edges.
    pub zeroed_initial: f64,
}

impl Scenario {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        Self::with_variant(cfg, cfg.scheme.variant)
    }

    pub fn with_variant(cfg: &RunConfig, variant: SchemeVariant) -> Result<Self> {
        let gc = &cfg.grid;
        let right = variant.right_boundary();
        if right == BoundaryKind::Dirichlet && gc.left_boundary == BoundaryKind::Transparent {
            return Err(CliError::Config(format!(
                "scheme variant {variant:?} needs grid.left_boundary = \"dirichlet\""
            )));
        }
        let grid = GridSpec::new(&gc.extents, &gc.counts, gc.tau, gc.levels, gc.left_boundary)?;
        let consts = PhysicalConstants::new(cfg.physics.hbar, cfg.physics.c_hbar)?;
        let mut potential =
            sample_potential(&cfg.potential, &cfg.aux_potential, cfg.physics.v_inf, &grid)?;
        let clamped_potential =
            potential.clamp_edge_layers(&grid, right, cfg.scheme.edge_tolerance)?;
        let packet = gaussian_packet(cfg.packet.k, cfg.packet.alpha, &cfg.packet.x0, &grid, right)?;
        let mut psi0 = packet.field;
        let zeroed_initial = enforce_initial_support(&mut psi0, &grid, right);
        Ok(Self {
            grid,
            consts,
            potential,
            psi0,
            variant,
            compensated: cfg.scheme.compensated,
            clamped_potential,
            zeroed_initial,
        })
    }

    pub fn stepper(&self) -> Result<Stepper> {
        Ok(Stepper::new(
            &self.grid,
            self.consts,
            self.potential.clone(),
            self.variant,
            &self.psi0,
        )?
        .with_compensated_convolution(self.compensated))
    }

    /// The same problem on a leading-axis domain `factor` times as long,
    /// centred on this one, with Dirichlet walls and the potential and
    /// initial data extended by their limits. Returns the scenario and the
    /// index of this domain's first layer inside it.
    pub fn enlarged(&self, factor: usize, variant: SchemeVariant) -> Result<(Scenario, usize)> {
        if factor % 2 == 0 {
            return Err(CliError::Config(format!(
                "enlargement factor {factor} must be odd"
            )));
        }
        if variant.right_boundary() != BoundaryKind::Dirichlet {
            return Err(CliError::Config(format!(
                "{variant:?} cannot run on the enlarged Dirichlet domain"
            )));
        }
        let g = &self.grid;
        let half = (factor - 1) / 2;
        let mut extents = g.extents().to_vec();
        let mut counts = g.counts().to_vec();
        extents[0] *= factor as f64;
        counts[0] *= factor;
        let big = GridSpec::new(
            &extents,
            &counts,
            g.tau(),
            g.levels(),
            BoundaryKind::Dirichlet,
        )?
        .with_origin(g.origin() - half as f64 * g.extent(0));
        let offset = half * g.count(0);
        let potential = self.potential.embed_axis1(&big, offset)?;
        let mut psi0 = self.psi0.embed_axis1(&big, offset)?;
        psi0.zero_dirichlet_faces(&big, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet);
        Ok((
            Scenario {
                grid: big,
                consts: self.consts,
                potential,
                psi0,
                variant,
                compensated: self.compensated,
                clamped_potential: self.clamped_potential,
                zeroed_initial: self.zeroed_initial,
            },
            offset,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn example_a_edges_are_clamped_and_zeroed() {
        let cfg = parse_config("preset = \"exampleA\"\n[grid]\nj = [100, 16]\nm = 10").unwrap();
        let s = Scenario::build(&cfg).unwrap();
        assert!(s.clamped_potential > 0.0 && s.clamped_potential < 1e-6);
        assert!(s.zeroed_initial < 1e-12);
        assert!(s.stepper().is_ok());
    }

    #[test]
    fn enlarged_domain_embeds_data() {
        let cfg = parse_config("preset = \"exampleA\"\n[grid]\nj = [100, 16]\nm = 10").unwrap();
        let s = Scenario::build(&cfg).unwrap();
        let (big, offset) = s
            .enlarged(3, SchemeVariant::ComparisonNcnStrangDirichlet)
            .unwrap();
        assert_eq!(offset, 100);
        assert_eq!(big.grid.counts(), &[300, 16]);
        assert!((big.grid.coord(0, offset) - 0.0).abs() < 1e-12);
        assert!((big.grid.coord(0, 300) - 8.0).abs() < 1e-12);
        let back = big.psi0.restrict_axis1(&s.grid, offset).unwrap();
        assert_eq!(back.values(), s.psi0.values());
        assert!(s.enlarged(3, SchemeVariant::DoubleSplitTbc).is_err());
        assert!(s.enlarged(2, SchemeVariant::DoubleSplitDirichlet).is_err());
    }

    #[test]
    fn dirichlet_variant_needs_dirichlet_left_edge() {
        let cfg =
            parse_config("preset = \"exampleA\"\n[scheme]\nvariant = \"double_split_dirichlet\"")
                .unwrap();
        assert!(matches!(Scenario::build(&cfg), Err(CliError::Config(_))));
    }

    #[test]
    fn rectangle_off_mesh_is_config_error() {
        let cfg = parse_config("preset = \"exampleB\"\n[grid]\nj = [601, 64]").unwrap();
        let err = Scenario::build(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
