//! Run configuration.
//!
//! Configurations are TOML documents with the sections `[grid]`,
//! `[physics]`, `[potential]`, `[packet]`, `[scheme]`, `[output]` and
//! `[convergence]`. A top-level `preset = "exampleA"` key loads a built-in
//! scenario first; keys given in the document then override it one by one.
//! Unknown keys are rejected.

use crate::error::{CliError, Result};
use crate::presets;
use serde::Deserialize;
use std::path::PathBuf;
use tdse_core::grid::{AuxPotential, BoundaryKind, PotentialSpec};
use tdse_core::stepper::SchemeVariant;

/// Relative tolerance when `tau`, `t_final` and `m` are all given.
const TIME_MESH_TOL: f64 = 1e-12;
/// Relative tolerance for `t_final / tau` to count as an integer.
const LEVEL_COUNT_TOL: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: Option<RawGrid>,
    physics: Option<RawPhysics>,
    potential: Option<RawPotential>,
    packet: Option<RawPacket>,
    scheme: Option<RawScheme>,
    output: Option<RawOutput>,
    convergence: Option<RawConvergence>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x: Option<Vec<f64>>,
    j: Option<Vec<usize>>,
    tau: Option<f64>,
    t_final: Option<f64>,
    m: Option<usize>,
    left_boundary: Option<BoundaryName>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysics {
    hbar: Option<f64>,
    c_hbar: Option<f64>,
    v_inf: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    #[serde(rename = "type")]
    kind: Option<PotentialName>,
    alpha0: Option<f64>,
    c1: Option<f64>,
    x_star: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    q: Option<f64>,
    v_tilde: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPacket {
    k: Option<f64>,
    alpha: Option<f64>,
    x0: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    variant: Option<VariantName>,
    enlargement: Option<usize>,
    edge_tolerance: Option<f64>,
    compensated: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    snapshot_stride: Option<usize>,
    observables_stride: Option<usize>,
    formats: Option<Vec<SnapshotFormat>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConvergence {
    meshes: Option<Vec<[usize; 2]>>,
    levels: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BoundaryName {
    Dirichlet,
    Transparent,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PotentialName {
    None,
    PoschlTeller,
    Rectangular,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VariantName {
    DoubleSplitTbc,
    DoubleSplitDirichlet,
    ComparisonNcnStrangDirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    Binary,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub extents: Vec<f64>,
    pub counts: Vec<usize>,
    pub tau: f64,
    pub levels: usize,
    pub left_boundary: BoundaryKind,
}

impl GridConfig {
    pub fn t_final(&self) -> f64 {
        self.tau * self.levels as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicsConfig {
    pub hbar: f64,
    pub c_hbar: f64,
    pub v_inf: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PacketConfig {
    pub k: f64,
    pub alpha: f64,
    pub x0: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub variant: SchemeVariant,
    /// Odd factor by which `compare` widens the leading axis.
    pub enlargement: usize,
    /// Largest potential deviation from its limit, relative to `max|V|`,
    /// that is clamped away on the layers next to a transparent edge.
    pub edge_tolerance: f64,
    pub compensated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// 0 keeps only the first and the last level.
    pub snapshot_stride: usize,
    pub observables_stride: usize,
    pub formats: Vec<SnapshotFormat>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub meshes: Vec<[usize; 2]>,
    /// Level count per mesh.
    pub levels: Vec<usize>,
}

/// Validated configuration with defaults applied.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub potential: PotentialSpec,
    /// Leading-axis part `Ṽ(x1)` of the potential; `V_inf` by default.
    pub aux_potential: AuxPotential,
    pub packet: PacketConfig,
    pub scheme: SchemeConfig,
    pub output: OutputConfig,
    pub convergence: ConvergenceConfig,
}

impl RunConfig {
    /// Copy with another leading/transverse mesh and level count; `T` is
    /// kept.
    pub fn with_mesh(&self, counts: [usize; 2], levels: usize) -> Result<RunConfig> {
        if levels == 0 {
            return Err(CliError::Config(
                "a refined run needs at least one level".into(),
            ));
        }
        let mut out = self.clone();
        out.grid.tau = self.grid.t_final() / levels as f64;
        out.grid.levels = levels;
        out.grid.counts = counts.to_vec();
        Ok(out)
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
    if let Some(name) = doc.get("preset") {
        let name = name
            .as_str()
            .ok_or_else(|| config_err("preset must be a string"))?
            .to_string();
        let mut base = presets::preset_table(&name)?;
        doc.remove("preset");
        merge(&mut base, doc);
        doc = base;
    }
    let raw: RawConfig = doc
        .try_into()
        .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
    validate(raw)
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| config_err(format!("missing required key {key}")))
}

fn positive(v: f64, key: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!(
            "{key} = {v} must be positive and finite"
        )))
    }
}

fn finite(v: f64, key: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("{key} = {v} must be finite")))
    }
}

fn resolve_time(tau: Option<f64>, t_final: Option<f64>, m: Option<usize>) -> Result<(f64, usize)> {
    match (tau, t_final, m) {
        (Some(tau), None, Some(m)) => Ok((positive(tau, "grid.tau")?, m)),
        (None, Some(t), Some(m)) => {
            let t = positive(t, "grid.t_final")?;
            if m == 0 {
                return Err(config_err(
                    "grid.m = 0 needs grid.tau instead of grid.t_final",
                ));
            }
            Ok((t / m as f64, m))
        }
        (Some(tau), Some(t), None) => {
            let (tau, t) = (positive(tau, "grid.tau")?, positive(t, "grid.t_final")?);
            let m = (t / tau).round();
            if (m * tau - t).abs() > LEVEL_COUNT_TOL * t {
                return Err(config_err(format!(
                    "grid.t_final = {t} is not a multiple of grid.tau = {tau}"
                )));
            }
            Ok((tau, m as usize))
        }
        (Some(tau), Some(t), Some(m)) => {
            let (tau, t) = (positive(tau, "grid.tau")?, positive(t, "grid.t_final")?);
            if (m as f64 * tau - t).abs() > TIME_MESH_TOL * t {
                return Err(config_err(format!(
                    "contradictory time mesh: m * tau = {} but t_final = {t}",
                    m as f64 * tau
                )));
            }
            Ok((tau, m))
        }
        _ => Err(config_err(
            "the time mesh needs two of grid.tau, grid.t_final and grid.m",
        )),
    }
}

fn validate(raw: RawConfig) -> Result<RunConfig> {
    let g = required(raw.grid, "[grid]")?;
    let extents = required(g.x, "grid.x")?;
    let counts = required(g.j, "grid.j")?;
    if extents.len() != counts.len() || extents.len() < 2 {
        return Err(config_err(format!(
            "grid.x and grid.j must have the same length of at least 2, got {} and {}",
            extents.len(),
            counts.len()
        )));
    }
    for (k, &x) in extents.iter().enumerate() {
        positive(x, &format!("grid.x[{k}]"))?;
    }
    let (tau, levels) = resolve_time(g.tau, g.t_final, g.m)?;
    let left_boundary = match g.left_boundary.unwrap_or(BoundaryName::Dirichlet) {
        BoundaryName::Dirichlet => BoundaryKind::Dirichlet,
        BoundaryName::Transparent => BoundaryKind::Transparent,
    };
    let grid = GridConfig {
        extents,
        counts,
        tau,
        levels,
        left_boundary,
    };

    let p = raw.physics.unwrap_or(RawPhysics {
        hbar: None,
        c_hbar: None,
        v_inf: None,
    });
    let physics = PhysicsConfig {
        hbar: positive(p.hbar.unwrap_or(1.0), "physics.hbar")?,
        c_hbar: positive(p.c_hbar.unwrap_or(1.0), "physics.c_hbar")?,
        v_inf: finite(p.v_inf.unwrap_or(0.0), "physics.v_inf")?,
    };

    let (potential, aux_potential) = match raw.potential {
        None => (PotentialSpec::None, AuxPotential::LimitValue),
        Some(mut v) => {
            let aux = match v.v_tilde.take() {
                None => AuxPotential::LimitValue,
                Some(breaks) => {
                    for (i, [x, val]) in breaks.iter().enumerate() {
                        finite(*x, &format!("potential.v_tilde[{i}][0]"))?;
                        finite(*val, &format!("potential.v_tilde[{i}][1]"))?;
                    }
                    if breaks.windows(2).any(|w| w[1][0] <= w[0][0]) {
                        return Err(config_err("potential.v_tilde breakpoints must increase"));
                    }
                    AuxPotential::Piecewise(breaks.iter().map(|b| (b[0], b[1])).collect())
                }
            };
            (potential_spec(v)?, aux)
        }
    };

    let pk = required(raw.packet, "[packet]")?;
    let packet = PacketConfig {
        k: finite(required(pk.k, "packet.k")?, "packet.k")?,
        alpha: positive(required(pk.alpha, "packet.alpha")?, "packet.alpha")?,
        x0: required(pk.x0, "packet.x0")?,
    };
    if packet.x0.len() != grid.extents.len() {
        return Err(config_err(format!(
            "packet.x0 has {} coordinates for a {}-dimensional mesh",
            packet.x0.len(),
            grid.extents.len()
        )));
    }

    let s = raw.scheme.unwrap_or(RawScheme {
        variant: None,
        enlargement: None,
        edge_tolerance: None,
        compensated: None,
    });
    let variant = match s.variant.unwrap_or(VariantName::DoubleSplitTbc) {
        VariantName::DoubleSplitTbc => SchemeVariant::DoubleSplitTbc,
        VariantName::DoubleSplitDirichlet => SchemeVariant::DoubleSplitDirichlet,
        VariantName::ComparisonNcnStrangDirichlet => SchemeVariant::ComparisonNcnStrangDirichlet,
    };
    let enlargement = s.enlargement.unwrap_or(3);
    if enlargement % 2 == 0 {
        return Err(config_err(format!(
            "scheme.enlargement = {enlargement} must be odd"
        )));
    }
    let scheme = SchemeConfig {
        variant,
        enlargement,
        edge_tolerance: finite(s.edge_tolerance.unwrap_or(1e-9), "scheme.edge_tolerance")?.max(0.0),
        compensated: s.compensated.unwrap_or(false),
    };

    let o = raw.output.unwrap_or(RawOutput {
        dir: None,
        snapshot_stride: None,
        observables_stride: None,
        formats: None,
    });
    let output = OutputConfig {
        dir: o.dir.unwrap_or_else(|| PathBuf::from("out")),
        snapshot_stride: o.snapshot_stride.unwrap_or(0),
        observables_stride: o.observables_stride.unwrap_or(1).max(1),
        formats: o.formats.unwrap_or_else(|| vec![SnapshotFormat::Binary]),
    };

    let c = raw.convergence.unwrap_or(RawConvergence {
        meshes: None,
        levels: None,
    });
    let meshes = c
        .meshes
        .unwrap_or_else(|| vec![[grid.counts[0], grid.counts.get(1).copied().unwrap_or(0)]]);
    if meshes.is_empty() {
        return Err(config_err("convergence.meshes must not be empty"));
    }
    let levels = match c.levels {
        Some(l) if l.len() != meshes.len() => {
            return Err(config_err(format!(
                "convergence.levels has {} entries for {} meshes",
                l.len(),
                meshes.len()
            )))
        }
        Some(l) => l,
        None => vec![grid.levels; meshes.len()],
    };
    let convergence = ConvergenceConfig { meshes, levels };

    Ok(RunConfig {
        grid,
        physics,
        potential,
        aux_potential,
        packet,
        scheme,
        output,
        convergence,
    })
}

fn potential_spec(v: RawPotential) -> Result<PotentialSpec> {
    let kind = match v.kind {
        Some(k) => k,
        None => {
            let any = [v.alpha0, v.c1, v.x_star, v.a, v.b, v.c, v.d, v.q]
                .iter()
                .any(Option::is_some);
            if any {
                return Err(config_err(
                    "potential.type is required when potential parameters are given",
                ));
            }
            PotentialName::None
        }
    };
    let unused = |names: &[(&str, Option<f64>)]| -> Result<()> {
        match names.iter().find(|(_, v)| v.is_some()) {
            Some((n, _)) => Err(config_err(format!(
                "potential.{n} does not apply to this potential type"
            ))),
            None => Ok(()),
        }
    };
    let f = |x: Option<f64>, key: &str| -> Result<f64> { finite(required(x, key)?, key) };
    match kind {
        PotentialName::None => {
            unused(&[
                ("alpha0", v.alpha0),
                ("c1", v.c1),
                ("x_star", v.x_star),
                ("a", v.a),
                ("b", v.b),
                ("c", v.c),
                ("d", v.d),
                ("q", v.q),
            ])?;
            Ok(PotentialSpec::None)
        }
        PotentialName::PoschlTeller => {
            unused(&[("a", v.a), ("b", v.b), ("c", v.c), ("d", v.d), ("q", v.q)])?;
            Ok(PotentialSpec::PoschlTeller {
                alpha0: f(v.alpha0, "potential.alpha0")?,
                c1: f(v.c1, "potential.c1")?,
                x_star: f(v.x_star, "potential.x_star")?,
            })
        }
        PotentialName::Rectangular => {
            unused(&[("alpha0", v.alpha0), ("c1", v.c1), ("x_star", v.x_star)])?;
            Ok(PotentialSpec::Rectangular {
                a: f(v.a, "potential.a")?,
                b: f(v.b, "potential.b")?,
                c: f(v.c, "potential.c")?,
                d: f(v.d, "potential.d")?,
                q: f(v.q, "potential.q")?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [grid]
        x = [1.0, 1.0]
        j = [16, 8]
        tau = 1e-3
        m = 10
        [packet]
        k = 0.0
        alpha = 0.01
        x0 = [0.5, 0.5]
    "#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.potential, PotentialSpec::None);
        assert_eq!(
            c.physics,
            PhysicsConfig {
                hbar: 1.0,
                c_hbar: 1.0,
                v_inf: 0.0
            }
        );
        assert_eq!(c.grid.left_boundary, BoundaryKind::Dirichlet);
        assert_eq!(c.scheme.enlargement, 3);
        assert_eq!(c.output.snapshot_stride, 0);
        assert_eq!(c.convergence.meshes, vec![[16, 8]]);
        assert!((c.grid.t_final() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn time_mesh_from_t_and_m() {
        let text = MINIMAL
            .replace("tau = 1e-3", "t_final = 0.05")
            .replace("m = 10", "m = 1000");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.grid.levels, 1000);
        assert!((c.grid.tau - 5e-5).abs() < 1e-20);
    }

    #[test]
    fn time_mesh_from_tau_and_t() {
        let text = MINIMAL.replace("m = 10", "t_final = 0.027");
        let c = parse_config(&text.replace("tau = 1e-3", "tau = 1.125e-5")).unwrap();
        assert_eq!(c.grid.levels, 2400);
        assert!(parse_config(&text.replace("tau = 1e-3", "tau = 1.1e-5")).is_err());
    }

    #[test]
    fn contradictory_time_mesh_rejected() {
        let text = MINIMAL.replace("m = 10", "m = 10\nt_final = 0.02");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("contradictory"), "{err}");
        let ok = MINIMAL.replace("m = 10", "m = 10\nt_final = 0.01");
        assert!(parse_config(&ok).is_ok());
        assert!(parse_config(&MINIMAL.replace("m = 10", "")).is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        let err =
            parse_config(&MINIMAL.replace("alpha = 0.01", "alpha = 0.01\nwidth = 2")).unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");
        assert!(parse_config(&format!("{MINIMAL}\n[extra]\na = 1")).is_err());
    }

    #[test]
    fn missing_key_named() {
        let err = parse_config(&MINIMAL.replace("alpha = 0.01", "")).unwrap_err();
        assert!(err.to_string().contains("packet.alpha"), "{err}");
    }

    #[test]
    fn empty_potential_block_is_free() {
        let c = parse_config(&format!("{MINIMAL}\n[potential]\n")).unwrap();
        assert_eq!(c.potential, PotentialSpec::None);
    }

    #[test]
    fn potential_parameters_checked() {
        let pt =
            format!("{MINIMAL}\n[potential]\ntype = \"poschl_teller\"\nalpha0 = 6.0\nc1 = 47.0\n");
        assert!(parse_config(&pt)
            .unwrap_err()
            .to_string()
            .contains("x_star"));
        let mixed = format!("{pt}x_star = 2.0\nq = 1.0\n");
        assert!(parse_config(&mixed).is_err());
        assert!(parse_config(&format!("{pt}x_star = 2.0\n")).is_ok());
        assert!(parse_config(&format!("{MINIMAL}\n[potential]\nq = 1.0\n")).is_err());
    }

    #[test]
    fn piecewise_auxiliary_potential() {
        let c = parse_config(&format!(
            "{MINIMAL}\n[potential]\nv_tilde = [[0.2, 3.0], [0.8, 0.0]]\n"
        ))
        .unwrap();
        assert_eq!(c.potential, PotentialSpec::None);
        assert_eq!(
            c.aux_potential,
            AuxPotential::Piecewise(vec![(0.2, 3.0), (0.8, 0.0)])
        );
        assert!(parse_config(&format!(
            "{MINIMAL}\n[potential]\nv_tilde = [[0.8, 3.0], [0.2, 0.0]]\n"
        ))
        .is_err());
        assert_eq!(
            parse_config(MINIMAL).unwrap().aux_potential,
            AuxPotential::LimitValue
        );
    }

    #[test]
    fn even_enlargement_rejected() {
        assert!(parse_config(&format!("{MINIMAL}\n[scheme]\nenlargement = 2\n")).is_err());
    }

    #[test]
    fn preset_keys_can_be_overridden() {
        let c = parse_config("preset = \"exampleA\"\n[grid]\nj = [200, 32]\n").unwrap();
        assert_eq!(c.grid.counts, vec![200, 32]);
        assert_eq!(c.grid.extents, vec![4.0, 4.2]);
        assert_eq!(c.grid.levels, 1000);
        assert!(parse_config("preset = \"exampleC\"").is_err());
    }

    #[test]
    fn refined_copy_keeps_final_time() {
        let c = parse_config("preset = \"exampleA\"").unwrap();
        let r = c.with_mesh([800, 128], 2000).unwrap();
        assert!((r.grid.t_final() - 0.05).abs() < 1e-15);
        assert_eq!(r.grid.counts, vec![800, 128]);
    }
}
