//! Closed-form eigenvalues of the discrete operators on the sine basis
//! `s^(p)(x) = prod_k sin(pi p_k x_k / X_k)`.

use crate::grid::GridSpec;
use crate::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

/// Eigenvalues of `-∂∂̄` and of the 1D Numerov average for sine mode `q` on
/// a mesh with step `h` over `[0, x]`.
pub fn transverse_eigenpair(q: usize, h: f64, x: f64) -> Result<(f64, f64)> {
    let j = (x / h).round() as usize;
    if q < 1 || q + 1 > j {
        return Err(Error::Range(format!(
            "mode {q} outside 1..={}",
            j.saturating_sub(1)
        )));
    }
    let s = (PI * q as f64 * h / (2.0 * x)).sin();
    let lambda = (2.0 * s / h).powi(2);
    let sigma = 1.0 - s * s / 3.0;
    Ok((lambda, sigma))
}

/// A multi-index `(p_1, ..., p_n)`, each `1 <= p_k <= J_k - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeIndex(pub Vec<usize>);

impl ModeIndex {
    pub fn validate(&self, counts: &[usize]) -> Result<()> {
        if self.0.len() != counts.len() {
            return Err(Error::Shape(format!(
                "mode has {} components, mesh has {} axes",
                self.0.len(),
                counts.len()
            )));
        }
        for (k, (&p, &j)) in self.0.iter().zip(counts).enumerate() {
            if p < 1 || p >= j {
                return Err(Error::Range(format!(
                    "p{} = {p} outside 1..={}",
                    k + 1,
                    j - 1
                )));
            }
        }
        Ok(())
    }
}

/// Eigenvalues at one mode of `s_N`, the splitting average `s̄_N`, `-Δ_h`,
/// the Numerov Laplacian `-Δ_hN` and its splitting version `-Δ̄_hN`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenReport {
    pub lam_sn: f64,
    pub lam_sbarn: f64,
    pub lam_dh: f64,
    pub lam_dhn: f64,
    pub lam_dbarn: f64,
}

/// Evaluate all five families from per-axis `sin^2` and `λ` values.
fn report_from_axes(sin2: &[f64], lam: &[f64]) -> EigenReport {
    let total_sin2: f64 = sin2.iter().sum();
    let sigma: Vec<f64> = sin2.iter().map(|s| 1.0 - s / 3.0).collect();
    let mut lam_dhn = 0.0;
    let mut lam_dbarn = 0.0;
    for k in 0..lam.len() {
        lam_dhn += (1.0 - (total_sin2 - sin2[k]) / 3.0) * lam[k];
        let others: f64 = sigma
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != k)
            .map(|(_, s)| s)
            .product();
        lam_dbarn += others * lam[k];
    }
    EigenReport {
        lam_sn: 1.0 - total_sin2 / 3.0,
        lam_sbarn: sigma.iter().product(),
        lam_dh: lam.iter().sum(),
        lam_dhn,
        lam_dbarn,
    }
}

fn axis_values(p: &[usize], counts: &[usize], steps: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut sin2 = Vec::with_capacity(p.len());
    let mut lam = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let x = steps[k] * counts[k] as f64;
        let s = (PI * p[k] as f64 * steps[k] / (2.0 * x)).sin();
        sin2.push(s * s);
        lam.push((2.0 * s / steps[k]).powi(2));
    }
    (sin2, lam)
}

pub fn eigen_report(p: &ModeIndex, grid: &GridSpec) -> Result<EigenReport> {
    p.validate(grid.counts())?;
    let (sin2, lam) = axis_values(&p.0, grid.counts(), grid.steps());
    Ok(report_from_axes(&sin2, &lam))
}

/// Same as [`eigen_report`] without a [`GridSpec`], for arbitrary `n`.
pub fn eigen_report_raw(p: &[usize], counts: &[usize], steps: &[f64]) -> Result<EigenReport> {
    ModeIndex(p.to_vec()).validate(counts)?;
    let (sin2, lam) = axis_values(p, counts, steps);
    Ok(report_from_axes(&sin2, &lam))
}

/// Number of modes above which the survey samples instead of enumerating.
pub const ENUMERATION_LIMIT: usize = 32;
pub const SURVEY_SAMPLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
}

impl Extremes {
    fn new() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSurvey {
    pub n: usize,
    pub counts: Vec<usize>,
    pub steps: Vec<f64>,
    pub modes_checked: usize,
    pub exhaustive: bool,
    pub sn: Extremes,
    pub sbarn: Extremes,
    pub dh: Extremes,
    pub dhn: Extremes,
    pub dbarn: Extremes,
    /// `min λ[-Δ_hN] / λ[-Δ_h]`.
    pub min_ratio_dhn: f64,
    /// `min λ[-Δ̄_hN] / λ[-Δ_h]`.
    pub min_ratio_dbarn: f64,
    /// `λ[s_N]` at the corner mode `p_k = J_k - 1`.
    pub corner_sn: f64,
    /// Modes breaking `(2/3)^n <= λ[s̄_N] <= 1` or
    /// `(2/3)^(n-1) λ[-Δ_h] <= λ[-Δ̄_hN] <= λ[-Δ_h]`.
    pub bound_violations: usize,
}

/// Extremes of every eigenvalue family over the modes of a mesh.
///
/// All modes are enumerated when every `J_k <= 32`; otherwise
/// [`SURVEY_SAMPLES`] modes are drawn with the given seed. The corner mode is
/// always included.
pub fn spectral_survey(counts: &[usize], steps: &[f64], seed: u64) -> Result<SpectralSurvey> {
    let n = counts.len();
    if !(2..=5).contains(&n) || steps.len() != n {
        return Err(Error::Range(format!(
            "survey supports 2 <= n <= 5, got {n}"
        )));
    }
    if let Some(&j) = counts.iter().find(|&&j| j < 2) {
        return Err(Error::Grid(format!("count {j} must be at least 2")));
    }
    let exhaustive = counts.iter().all(|&j| j <= ENUMERATION_LIMIT);
    let mut survey = SpectralSurvey {
        n,
        counts: counts.to_vec(),
        steps: steps.to_vec(),
        modes_checked: 0,
        exhaustive,
        sn: Extremes::new(),
        sbarn: Extremes::new(),
        dh: Extremes::new(),
        dhn: Extremes::new(),
        dbarn: Extremes::new(),
        min_ratio_dhn: f64::INFINITY,
        min_ratio_dbarn: f64::INFINITY,
        corner_sn: 0.0,
        bound_violations: 0,
    };
    // sin^2 and λ cached per (axis, mode).
    let tables: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|k| {
            (0..counts[k])
                .map(|q| {
                    let s = (PI * q as f64 / (2.0 * counts[k] as f64)).sin();
                    (s * s, (2.0 * s / steps[k]).powi(2))
                })
                .collect()
        })
        .collect();
    let lower_s = (2.0f64 / 3.0).powi(n as i32);
    let lower_d = (2.0f64 / 3.0).powi(n as i32 - 1);
    let mut sin2 = vec![0.0; n];
    let mut lam = vec![0.0; n];
    let mut visit = |p: &[usize], survey: &mut SpectralSurvey| {
        for k in 0..n {
            (sin2[k], lam[k]) = tables[k][p[k]];
        }
        let r = report_from_axes(&sin2, &lam);
        survey.modes_checked += 1;
        survey.sn.push(r.lam_sn);
        survey.sbarn.push(r.lam_sbarn);
        survey.dh.push(r.lam_dh);
        survey.dhn.push(r.lam_dhn);
        survey.dbarn.push(r.lam_dbarn);
        survey.min_ratio_dhn = survey.min_ratio_dhn.min(r.lam_dhn / r.lam_dh);
        survey.min_ratio_dbarn = survey.min_ratio_dbarn.min(r.lam_dbarn / r.lam_dh);
        let eps = 1e-12;
        let ok_s = r.lam_sbarn >= lower_s * (1.0 - eps) && r.lam_sbarn <= 1.0 + eps;
        let ok_d = r.lam_dbarn >= lower_d * r.lam_dh * (1.0 - eps)
            && r.lam_dbarn <= r.lam_dh * (1.0 + eps);
        if !(ok_s && ok_d) {
            survey.bound_violations += 1;
        }
    };
    if exhaustive {
        let mut p = vec![1usize; n];
        'outer: loop {
            visit(&p, &mut survey);
            for k in (0..n).rev() {
                p[k] += 1;
                if p[k] < counts[k] {
                    continue 'outer;
                }
                p[k] = 1;
            }
            break;
        }
    } else {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut p = vec![1usize; n];
        for _ in 0..SURVEY_SAMPLES {
            for k in 0..n {
                p[k] = rng.gen_range(1..counts[k]);
            }
            visit(&p, &mut survey);
        }
        let corner: Vec<usize> = counts.iter().map(|j| j - 1).collect();
        visit(&corner, &mut survey);
    }
    let corner: Vec<usize> = counts.iter().map(|j| j - 1).collect();
    survey.corner_sn = eigen_report_raw(&corner, counts, steps)?.lam_sn;
    Ok(survey)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;
    use proptest::prelude::*;

    #[test]
    fn eigenpair_two_intervals() {
        let (l, s) = transverse_eigenpair(1, 0.5, 1.0).unwrap();
        assert!((l - 2.0 / 0.25).abs() < 1e-12);
        assert!((s - 5.0 / 6.0).abs() < 1e-15);
        assert!(transverse_eigenpair(2, 0.5, 1.0).is_err());
        assert!(transverse_eigenpair(0, 0.5, 1.0).is_err());
    }

    #[test]
    fn eigenpair_continuum_limit() {
        let x = 2.0;
        for j in [64usize, 128, 256] {
            let h = x / j as f64;
            let (l, _) = transverse_eigenpair(1, h, x).unwrap();
            let exact = (PI / x).powi(2);
            assert!((l - exact).abs() < exact * h * h);
        }
    }

    #[test]
    fn report_product_of_sigmas() {
        let g = GridSpec::new(&[1.0, 1.0], &[2, 2], 1.0, 1, BoundaryKind::Dirichlet).unwrap();
        let r = eigen_report(&ModeIndex(vec![1, 1]), &g).unwrap();
        assert!((r.lam_sbarn - 25.0 / 36.0).abs() < 1e-15);
        assert!(eigen_report(&ModeIndex(vec![2, 1]), &g).is_err());
    }

    #[test]
    fn four_dim_corner_is_negative() {
        let counts = [16usize; 4];
        let steps = [1.0 / 16.0; 4];
        let r = eigen_report_raw(&[15; 4], &counts, &steps).unwrap();
        let expect = 1.0 - 4.0 / 3.0 * (15.0 * PI / 32.0).sin().powi(2);
        assert!((r.lam_sn - expect).abs() < 1e-14);
        assert!((r.lam_sn + 0.3205).abs() < 1e-4);
    }

    #[test]
    fn survey_two_dim_lower_bound() {
        let s = spectral_survey(&[20, 24], &[0.05, 0.04], 1).unwrap();
        assert!(s.exhaustive);
        assert_eq!(s.modes_checked, 19 * 23);
        assert!(s.sn.min >= 1.0 / 3.0);
        assert!(s.min_ratio_dhn >= 2.0 / 3.0 - 1e-12);
        assert_eq!(s.bound_violations, 0);
    }

    #[test]
    fn survey_three_dim_corner_shrinks() {
        let a = spectral_survey(&[16; 3], &[1.0 / 16.0; 3], 1).unwrap();
        let b = spectral_survey(&[32; 3], &[1.0 / 32.0; 3], 1).unwrap();
        assert!(a.sn.min > 0.0 && b.sn.min > 0.0);
        assert!(a.min_ratio_dhn >= 1.0 / 3.0);
        let ratio = a.corner_sn / b.corner_sn;
        assert!((3.9..4.1).contains(&ratio), "{ratio}");
    }

    proptest! {
        #[test]
        fn splitting_bounds_hold(
            n in 2usize..=4,
            j in prop::collection::vec(2usize..200, 4),
            x in prop::collection::vec(0.1f64..10.0, 4),
            pick in prop::collection::vec(0.0f64..1.0, 4),
        ) {
            let counts = &j[..n];
            let steps: Vec<f64> = (0..n).map(|k| x[k] / j[k] as f64).collect();
            let p: Vec<usize> = (0..n).map(|k| 1 + ((j[k] - 1) as f64 * pick[k]) as usize % (j[k] - 1)).collect();
            let r = eigen_report_raw(&p, counts, &steps).unwrap();
            let tol = 1e-12;
            prop_assert!(r.lam_sbarn >= (2.0f64 / 3.0).powi(n as i32) - tol && r.lam_sbarn <= 1.0);
            prop_assert!(r.lam_dbarn >= (2.0f64 / 3.0).powi(n as i32 - 1) * r.lam_dh * (1.0 - tol));
            prop_assert!(r.lam_dbarn <= r.lam_dh * (1.0 + tol));
            prop_assert!(r.lam_dhn <= r.lam_dh * (1.0 + tol));
            prop_assert!(r.lam_sn <= 1.0);
        }
    }
}
