//! Subcommand drivers. Each returns its results and, given an output
//! directory, writes them there.

use crate::config::{RunConfig, SnapshotFormat};
use crate::error::{CliError, Result};
use crate::scenario::Scenario;
use crate::snapshot::{write_field_csv, write_field_snapshot};
use log::info;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use tdse_core::diagnostics::{
    convergence_ratios, difference_norms, energies, mass2, ratio_table_csv, ObservableRecord,
    ObservableSeries, RatioRow,
};
use tdse_core::grid::{GridSpec, WaveField};
use tdse_core::spectral::{spectral_survey, SpectralSurvey};
use tdse_core::stepper::{SchemeVariant, Stepper};
use tdse_core::tbc::{shifted_limit_potential, KernelTable};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn record(s: &Stepper, diff: Option<(f64, f64)>) -> Result<ObservableRecord> {
    let (e_kin, e_pot) = energies(s.psi(), s.potential(), s.grid(), s.consts())?;
    Ok(ObservableRecord {
        level: s.level(),
        t: s.time(),
        mass2: mass2(s.psi(), s.grid())?,
        e_kin,
        e_pot,
        e_c: diff.map(|d| d.0),
        e_l2: diff.map(|d| d.1),
    })
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub grid: GridSpec,
    pub series: ObservableSeries,
    pub psi: WaveField,
    pub snapshots: Vec<PathBuf>,
}

fn snapshot_due(level: usize, total: usize, stride: usize) -> bool {
    level == 0 || level == total || (stride > 0 && level % stride == 0)
}

fn write_snapshot(
    field: &WaveField,
    grid: &GridSpec,
    dir: &Path,
    formats: &[SnapshotFormat],
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for f in formats {
        let path = match f {
            SnapshotFormat::Binary => {
                let p = dir.join(format!("psi_{:06}.bin", field.level));
                write_field_snapshot(field, grid, &p)?;
                p
            }
            SnapshotFormat::Csv => {
                let p = dir.join(format!("psi_{:06}.csv", field.level));
                write_field_csv(field, grid, &p)?;
                p
            }
        };
        paths.push(path);
    }
    Ok(paths)
}

/// Run one scenario. Observables are recorded every `observables_stride`
/// levels and snapshots every `snapshot_stride` levels, both always at the
/// first and the last level.
pub fn run_scenario(cfg: &RunConfig, out: Option<&Path>) -> Result<RunOutcome> {
    let sc = Scenario::build(cfg)?;
    let mut stepper = sc.stepper()?;
    let total = sc.grid.levels();
    let obs_stride = cfg.output.observables_stride;
    let snap_dir = out.map(|d| d.join("snapshots"));
    if let Some(d) = &snap_dir {
        create_dir(d)?;
    }
    let mut series = ObservableSeries::default();
    let mut snapshots = Vec::new();
    loop {
        let level = stepper.level();
        if level % obs_stride == 0 || level == total {
            series.push(record(&stepper, None)?)?;
        }
        if let Some(d) = &snap_dir {
            if snapshot_due(level, total, cfg.output.snapshot_stride) {
                snapshots.extend(write_snapshot(
                    stepper.psi(),
                    &sc.grid,
                    d,
                    &cfg.output.formats,
                )?);
            }
        }
        if level == total {
            break;
        }
        stepper.step()?;
    }
    if let Some(d) = out {
        write_text(&d.join("observables.csv"), &series.to_csv())?;
    }
    Ok(RunOutcome {
        grid: sc.grid,
        series,
        psi: stepper.psi().clone(),
        snapshots,
    })
}

#[derive(Clone, Debug)]
pub struct CompareOutcome {
    pub grid: GridSpec,
    /// Observables of the transparent-edge run with the difference norms,
    /// at the observation stride.
    pub series: ObservableSeries,
    /// `(level, C norm, L2 norm)` of the difference at every level.
    pub differences: Vec<(usize, f64, f64)>,
    /// Maxima over all levels.
    pub e_c: f64,
    pub e_l2: f64,
    pub max_initial: f64,
}

/// Run the transparent-edge scheme on the configured domain and `reference`
/// on the enlarged Dirichlet domain, comparing the solutions on the common
/// domain at every level.
pub fn compare_schemes(cfg: &RunConfig, reference: SchemeVariant) -> Result<CompareOutcome> {
    let small = Scenario::with_variant(cfg, SchemeVariant::DoubleSplitTbc)?;
    let (big, offset) = small.enlarged(cfg.scheme.enlargement, reference)?;
    let mut a = small.stepper()?;
    let mut b = big.stepper()?;
    let total = small.grid.levels();
    let mut series = ObservableSeries::default();
    let mut differences = Vec::with_capacity(total + 1);
    loop {
        let level = a.level();
        let restricted = b.psi().restrict_axis1(&small.grid, offset)?;
        let (c, l2) = difference_norms(a.psi(), &restricted, &small.grid)?;
        differences.push((level, c, l2));
        if level % cfg.output.observables_stride == 0 || level == total {
            series.push(record(&a, Some((c, l2)))?)?;
        }
        if level == total {
            break;
        }
        a.step()?;
        b.step()?;
    }
    let e_c = differences.iter().fold(0.0f64, |m, d| m.max(d.1));
    let e_l2 = differences.iter().fold(0.0f64, |m, d| m.max(d.2));
    Ok(CompareOutcome {
        grid: small.grid.clone(),
        series,
        differences,
        e_c,
        e_l2,
        max_initial: small.psi0.max_abs(),
    })
}

fn mesh_label(grid: &GridSpec) -> String {
    format!("{}x{}x{}", grid.count(0), grid.count(1), grid.levels())
}

/// `compare` subcommand: difference series and a one-row error table.
pub fn compare_command(cfg: &RunConfig, out: Option<&Path>) -> Result<CompareOutcome> {
    let res = compare_schemes(cfg, SchemeVariant::ComparisonNcnStrangDirichlet)?;
    info!(
        "{}: E_C = {:.4e}, E_L2 = {:.4e}",
        mesh_label(&res.grid),
        res.e_c,
        res.e_l2
    );
    if let Some(d) = out {
        create_dir(d)?;
        write_text(&d.join("compare.csv"), &res.series.to_csv())?;
        let rows = convergence_ratios(&[(mesh_label(&res.grid), res.e_c, res.e_l2)]);
        write_text(&d.join("ratios.csv"), &ratio_table_csv(&rows))?;
    }
    Ok(res)
}

/// `convergence` subcommand: the scheme comparison over the configured
/// mesh ladder.
pub fn convergence_command(cfg: &RunConfig, out: Option<&Path>) -> Result<Vec<RatioRow>> {
    let mut rows = Vec::new();
    for (mesh, &levels) in cfg.convergence.meshes.iter().zip(&cfg.convergence.levels) {
        let c = cfg.with_mesh(*mesh, levels)?;
        let res = compare_schemes(&c, SchemeVariant::ComparisonNcnStrangDirichlet)?;
        info!(
            "{}: E_C = {:.4e}, E_L2 = {:.4e}",
            mesh_label(&res.grid),
            res.e_c,
            res.e_l2
        );
        if let Some(d) = out {
            create_dir(d)?;
            write_text(
                &d.join(format!("compare_{}.csv", mesh_label(&res.grid))),
                &res.series.to_csv(),
            )?;
        }
        rows.push((mesh_label(&res.grid), res.e_c, res.e_l2));
    }
    let table = convergence_ratios(&rows);
    if let Some(d) = out {
        write_text(&d.join("convergence.csv"), &ratio_table_csv(&table))?;
    }
    Ok(table)
}

/// Surveys of the configured mesh and of unit cubes with 16 intervals per
/// axis for `n = 2, 3, 4`.
pub fn spectra_command(
    cfg: &RunConfig,
    seed: u64,
    out: Option<&Path>,
) -> Result<Vec<SpectralSurvey>> {
    let steps: Vec<f64> = cfg
        .grid
        .extents
        .iter()
        .zip(&cfg.grid.counts)
        .map(|(x, &j)| x / j as f64)
        .collect();
    let mut surveys = vec![spectral_survey(&cfg.grid.counts, &steps, seed)?];
    for n in 2..=4 {
        surveys.push(spectral_survey(&vec![16; n], &vec![1.0 / 16.0; n], seed)?);
    }
    if let Some(d) = out {
        create_dir(d)?;
        write_text(&d.join("spectra.csv"), &spectra_csv(&surveys))?;
    }
    Ok(surveys)
}

pub fn spectra_csv(surveys: &[SpectralSurvey]) -> String {
    let mut out = String::from(
        "n,counts,modes_checked,exhaustive,min_sn,max_sn,min_sbarn,max_sbarn,min_dh,max_dh,min_dhn,max_dhn,\
         min_dbarn,max_dbarn,min_ratio_dhn,min_ratio_dbarn,corner_sn,bound_violations\n",
    );
    for s in surveys {
        let counts: Vec<String> = s.counts.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            s.n,
            counts.join("x"),
            s.modes_checked,
            s.exhaustive,
            s.sn.min,
            s.sn.max,
            s.sbarn.min,
            s.sbarn.max,
            s.dh.min,
            s.dh.max,
            s.dhn.min,
            s.dhn.max,
            s.dbarn.min,
            s.dbarn.max,
            s.min_ratio_dhn,
            s.min_ratio_dbarn,
            s.corner_sn,
            s.bound_violations
        );
    }
    out
}

/// `kernel-dump` subcommand: `R^0..R^M` for transverse mode `mode`.
pub fn kernel_dump_command(
    cfg: &RunConfig,
    mode: usize,
    out: Option<&Path>,
) -> Result<KernelTable> {
    let sc = Scenario::build(cfg)?;
    let g = &sc.grid;
    if mode == 0 || mode >= g.count(1) {
        return Err(CliError::Config(format!(
            "mode {mode} outside 1..{}",
            g.count(1) - 1
        )));
    }
    let mut q = vec![1; g.n() - 1];
    q[0] = mode;
    let v = shifted_limit_potential(&q, g, cfg.physics.v_inf, sc.consts)?;
    let table = KernelTable::build(v, g.tau(), g.step(0), sc.consts, g.levels())?;
    if let Some(d) = out {
        create_dir(d)?;
        write_text(
            &d.join(format!("kernel_mode{mode}.csv")),
            &kernel_csv(&table),
        )?;
    }
    Ok(table)
}

pub fn kernel_csv(table: &KernelTable) -> String {
    let mut out = String::from("m,re,im\n");
    for (m, r) in table.values().iter().enumerate() {
        let _ = writeln!(out, "{m},{:.17e},{:.17e}", r.re, r.im);
    }
    out
}
