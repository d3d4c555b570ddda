//! Sine transforms along the transverse axes and the three-point stencils
//! along the leading axis.
//!
//! The transform pair is
//! `P^(q) = (2/J) sum_{j=1}^{J-1} P_j sin(pi q j / J)` and
//! `P_j = sum_{q=1}^{J-1} P^(q) sin(pi q j / J)`.

use crate::grid::{GridSpec, WaveField};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

enum Backend {
    /// Odd extension to length `2J` and a complex FFT.
    Fast(Arc<dyn Fft<f64>>),
    /// `sin(pi k / J)` for `k = 0..2J`.
    Direct(Vec<f64>),
}

/// Sine transform of length `J - 1`.
pub struct DstPlan {
    j: usize,
    backend: Backend,
}

/// Scratch space for one thread applying a [`DstPlan`].
#[derive(Default)]
pub struct DstWork {
    buf: Vec<C64>,
    scratch: Vec<C64>,
    out: Vec<C64>,
}

impl DstPlan {
    /// Plan for `J` intervals; the fast path is used when `J` is a power of
    /// two, direct summation otherwise.
    pub fn new(j: usize) -> Result<Self> {
        if j < 2 {
            return Err(Error::Grid(format!("sine transform needs J >= 2, got {j}")));
        }
        let backend = if j.is_power_of_two() {
            Backend::Fast(FftPlanner::new().plan_fft_forward(2 * j))
        } else {
            log::warn!(
                "J = {j} is not a power of two; sine transforms fall back to O(J^2) summation"
            );
            Backend::Direct(
                (0..2 * j)
                    .map(|k| (PI * k as f64 / j as f64).sin())
                    .collect(),
            )
        };
        Ok(Self { j, backend })
    }

    /// Plan that always sums directly.
    pub fn direct(j: usize) -> Result<Self> {
        if j < 2 {
            return Err(Error::Grid(format!("sine transform needs J >= 2, got {j}")));
        }
        Ok(Self {
            j,
            backend: Backend::Direct(
                (0..2 * j)
                    .map(|k| (PI * k as f64 / j as f64).sin())
                    .collect(),
            ),
        })
    }

    pub fn intervals(&self) -> usize {
        self.j
    }

    pub fn is_fast(&self) -> bool {
        matches!(self.backend, Backend::Fast(_))
    }

    /// `out_q = scale * sum_j data_j sin(pi q j / J)`, in place.
    fn sine_sum(&self, data: &mut [C64], scale: f64, work: &mut DstWork) {
        let j = self.j;
        match &self.backend {
            Backend::Fast(fft) => {
                work.buf.clear();
                work.buf.resize(2 * j, C64::new(0.0, 0.0));
                for (k, &v) in data.iter().enumerate() {
                    work.buf[k + 1] = v;
                    work.buf[2 * j - k - 1] = -v;
                }
                work.scratch
                    .resize(fft.get_inplace_scratch_len(), C64::new(0.0, 0.0));
                fft.process_with_scratch(&mut work.buf, &mut work.scratch);
                let f = C64::new(0.0, 0.5 * scale);
                for (k, v) in data.iter_mut().enumerate() {
                    *v = f * work.buf[k + 1];
                }
            }
            Backend::Direct(table) => {
                work.out.clear();
                for q in 1..j {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, v) in data.iter().enumerate() {
                        acc += v * table[(q * (k + 1)) % (2 * j)];
                    }
                    work.out.push(acc * scale);
                }
                data.copy_from_slice(&work.out);
            }
        }
    }

    pub fn forward_in_place(&self, data: &mut [C64], work: &mut DstWork) -> Result<()> {
        self.check_len(data.len())?;
        self.sine_sum(data, 2.0 / self.j as f64, work);
        Ok(())
    }

    pub fn inverse_in_place(&self, data: &mut [C64], work: &mut DstWork) -> Result<()> {
        self.check_len(data.len())?;
        self.sine_sum(data, 1.0, work);
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len + 1 != self.j {
            return Err(Error::Shape(format!(
                "sine transform of J = {} expects {} values, got {len}",
                self.j,
                self.j - 1
            )));
        }
        Ok(())
    }
}

/// Forward sine transform of `p` (length `J - 1`).
pub fn dst_forward(p: &[C64]) -> Result<Vec<C64>> {
    let plan = DstPlan::new(p.len() + 1)?;
    let mut out = p.to_vec();
    plan.forward_in_place(&mut out, &mut DstWork::default())?;
    Ok(out)
}

/// Inverse sine transform of `c` (length `J - 1`).
pub fn dst_inverse(c: &[C64]) -> Result<Vec<C64>> {
    let plan = DstPlan::new(c.len() + 1)?;
    let mut out = c.to_vec();
    plan.inverse_in_place(&mut out, &mut DstWork::default())?;
    Ok(out)
}

/// Transverse mode coefficients of a field, one contiguous column of
/// leading-axis values per mode: `data[q * (J1 + 1) + j1]`.
///
/// Modes are flattened row-major over `(q2, ..., qn)`, each `q_k` in
/// `1..J_k`, stored from offset 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeField {
    pub mode_dims: Vec<usize>,
    pub len1: usize,
    pub data: Vec<C64>,
}

impl ModeField {
    pub fn zeros(grid: &GridSpec) -> Self {
        let mode_dims: Vec<usize> = grid.counts()[1..].iter().map(|j| j - 1).collect();
        let len1 = grid.count(0) + 1;
        Self {
            data: vec![C64::new(0.0, 0.0); len1 * mode_dims.iter().product::<usize>()],
            mode_dims,
            len1,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn column(&self, q: usize) -> &[C64] {
        &self.data[q * self.len1..(q + 1) * self.len1]
    }

    pub fn column_mut(&mut self, q: usize) -> &mut [C64] {
        &mut self.data[q * self.len1..(q + 1) * self.len1]
    }

    /// The 1-based mode tuple `(q2, ..., qn)` of flat index `q`.
    pub fn mode_tuple(&self, mut q: usize) -> Vec<usize> {
        let mut t = vec![0; self.mode_dims.len()];
        for a in (0..self.mode_dims.len()).rev() {
            t[a] = q % self.mode_dims[a] + 1;
            q /= self.mode_dims[a];
        }
        t
    }
}

/// Tensor-product sine transforms over all transverse axes of a mesh.
pub struct ModeTransform {
    plans: Vec<DstPlan>,
    layer_dims: Vec<usize>,
    mode_dims: Vec<usize>,
    len1: usize,
    interior: Vec<usize>,
    rows: Vec<C64>,
}

impl ModeTransform {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        let plans = grid.counts()[1..]
            .iter()
            .map(|&j| DstPlan::new(j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_plans(grid, plans))
    }

    /// Transform with direct summation on every axis.
    pub fn new_direct(grid: &GridSpec) -> Result<Self> {
        let plans = grid.counts()[1..]
            .iter()
            .map(|&j| DstPlan::direct(j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_plans(grid, plans))
    }

    fn with_plans(grid: &GridSpec, plans: Vec<DstPlan>) -> Self {
        let layer_dims: Vec<usize> = grid.counts()[1..].iter().map(|j| j + 1).collect();
        let mode_dims: Vec<usize> = grid.counts()[1..].iter().map(|j| j - 1).collect();
        let interior = grid
            .transverse_interior_mask()
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        let len1 = grid.count(0) + 1;
        let rows = vec![C64::new(0.0, 0.0); len1 * mode_dims.iter().product::<usize>()];
        Self {
            plans,
            layer_dims,
            mode_dims,
            len1,
            interior,
            rows,
        }
    }

    pub fn is_fast(&self) -> bool {
        self.plans.iter().all(DstPlan::is_fast)
    }

    fn transform_rows(&mut self, forward: bool) {
        let plans = &self.plans;
        let dims = &self.mode_dims;
        let m: usize = dims.iter().product();
        self.rows.par_chunks_mut(m).for_each_init(
            || (DstWork::default(), Vec::new()),
            |(work, line), row| {
                for (axis, plan) in plans.iter().enumerate() {
                    let stride: usize = dims[axis + 1..].iter().product();
                    let len = dims[axis];
                    let outer = m / (len * stride);
                    for o in 0..outer {
                        for s in 0..stride {
                            let base = o * len * stride + s;
                            line.clear();
                            line.extend((0..len).map(|k| row[base + k * stride]));
                            if forward {
                                plan.sine_sum(line, 2.0 / plan.j as f64, work);
                            } else {
                                plan.sine_sum(line, 1.0, work);
                            }
                            for k in 0..len {
                                row[base + k * stride] = line[k];
                            }
                        }
                    }
                }
            },
        );
    }

    fn check_field(&self, field: &WaveField) -> Result<()> {
        if field.shape()[0] != self.len1 || field.shape()[1..] != self.layer_dims[..] {
            return Err(Error::Shape(
                "field does not match the transform mesh".into(),
            ));
        }
        Ok(())
    }

    fn check_modes(&self, modes: &ModeField) -> Result<()> {
        if modes.len1 != self.len1 || modes.mode_dims != self.mode_dims {
            return Err(Error::Shape(
                "mode field does not match the transform mesh".into(),
            ));
        }
        Ok(())
    }

    /// Forward transforms of every leading-axis layer. Face values are
    /// ignored.
    pub fn analyze_into(&mut self, field: &WaveField, out: &mut ModeField) -> Result<()> {
        self.check_field(field)?;
        self.check_modes(out)?;
        let m = self.interior.len();
        for j1 in 0..self.len1 {
            let layer = field.layer(j1);
            for (dst, &src) in self.rows[j1 * m..(j1 + 1) * m]
                .iter_mut()
                .zip(&self.interior)
            {
                *dst = layer[src];
            }
        }
        self.transform_rows(true);
        for j1 in 0..self.len1 {
            for q in 0..m {
                out.data[q * self.len1 + j1] = self.rows[j1 * m + q];
            }
        }
        Ok(())
    }

    pub fn analyze(&mut self, field: &WaveField) -> Result<ModeField> {
        let mut out = ModeField {
            mode_dims: self.mode_dims.clone(),
            len1: self.len1,
            data: vec![C64::new(0.0, 0.0); self.rows.len()],
        };
        self.analyze_into(field, &mut out)?;
        Ok(out)
    }

    /// Inverse transforms into `field`; transverse faces are set to zero.
    pub fn synthesize_into(&mut self, modes: &ModeField, field: &mut WaveField) -> Result<()> {
        self.check_field(field)?;
        self.check_modes(modes)?;
        let m = self.interior.len();
        for j1 in 0..self.len1 {
            for q in 0..m {
                self.rows[j1 * m + q] = modes.data[q * self.len1 + j1];
            }
        }
        self.transform_rows(false);
        for j1 in 0..self.len1 {
            let layer = field.layer_mut(j1);
            layer.fill(C64::new(0.0, 0.0));
            for (&src, &dst) in self.rows[j1 * m..(j1 + 1) * m].iter().zip(&self.interior) {
                layer[dst] = src;
            }
        }
        Ok(())
    }

    pub fn synthesize(&mut self, modes: &ModeField, grid: &GridSpec) -> Result<WaveField> {
        let mut field = WaveField::zeros(grid);
        self.synthesize_into(modes, &mut field)?;
        Ok(field)
    }
}

/// Three-point operators along the leading axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis1Stencil {
    /// Numerov average, weights `(1/12, 5/6, 1/12)`.
    Numerov,
    /// `(5/12) W_j + (1/12) W_{j-1}`.
    NumerovMinus,
    /// `(5/12) W_j + (1/12) W_{j+1}`.
    NumerovPlus,
    /// `(u_{j+1} - 2 u_j + u_{j-1}) / h^2`.
    SecondDifference,
}

/// Value of `op` at node `j` (`1 <= j <= u.len() - 2`).
#[inline]
pub fn stencil_at(op: Axis1Stencil, u: &[C64], j: usize, h: f64) -> C64 {
    match op {
        Axis1Stencil::Numerov => (u[j - 1] + u[j + 1]) / 12.0 + u[j] * (5.0 / 6.0),
        Axis1Stencil::NumerovMinus => u[j] * (5.0 / 12.0) + u[j - 1] / 12.0,
        Axis1Stencil::NumerovPlus => u[j] * (5.0 / 12.0) + u[j + 1] / 12.0,
        Axis1Stencil::SecondDifference => (u[j + 1] - u[j] * 2.0 + u[j - 1]) / (h * h),
    }
}

/// Apply `op` at the interior nodes `1..u.len()-1` of `u`.
pub fn apply_axis1_stencil(op: Axis1Stencil, u: &[C64], h: f64) -> Result<Vec<C64>> {
    if u.len() < 3 {
        return Err(Error::Shape(format!(
            "stencil needs at least 3 nodes, got {}",
            u.len()
        )));
    }
    Ok((1..u.len() - 1).map(|j| stencil_at(op, u, j, h)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use tdse_oracles::{direct_dst_forward, direct_dst_inverse};

    fn random_vec(len: usize, seed: u64) -> Vec<C64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..len)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn max_rel(a: &[C64], b: &[C64]) -> f64 {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(1e-300);
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
            / scale
    }

    #[test]
    fn forward_unit_vector() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let out = dst_forward(&[one, zero, zero]).unwrap();
        let expect = [0.3535533905932738, 0.5, 0.3535533905932738];
        for (o, e) in out.iter().zip(expect) {
            assert!((o - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!(dst_forward(&[zero; 3])
            .unwrap()
            .iter()
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn inverse_basis_image() {
        let j = 8;
        for q in 1..j {
            let mut c = vec![C64::new(0.0, 0.0); j - 1];
            c[q - 1] = C64::new(1.0, 0.0);
            let p = dst_inverse(&c).unwrap();
            for (k, v) in p.iter().enumerate() {
                let s = (PI * (q * (k + 1)) as f64 / j as f64).sin();
                assert!((v - C64::new(s, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn fast_matches_direct_summation() {
        for &j in &[2usize, 4, 8, 16, 64, 256, 1024] {
            let p = random_vec(j - 1, j as u64);
            assert!(DstPlan::new(j).unwrap().is_fast());
            assert!(max_rel(&dst_forward(&p).unwrap(), &direct_dst_forward(&p)) < 1e-12);
            assert!(max_rel(&dst_inverse(&p).unwrap(), &direct_dst_inverse(&p)) < 1e-12);
        }
    }

    #[test]
    fn non_power_of_two_falls_back() {
        let plan = DstPlan::new(12).unwrap();
        assert!(!plan.is_fast());
        let p = random_vec(11, 3);
        assert!(max_rel(&dst_forward(&p).unwrap(), &direct_dst_forward(&p)) < 1e-13);
    }

    #[test]
    fn length_mismatch_is_error() {
        let plan = DstPlan::new(8).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 6];
        assert!(plan
            .forward_in_place(&mut v, &mut DstWork::default())
            .is_err());
    }

    #[test]
    fn sine_orthogonality() {
        for j in [4usize, 8, 16] {
            for q in 1..j {
                for r in 1..j {
                    let s: f64 = (1..j)
                        .map(|k| {
                            (PI * (q * k) as f64 / j as f64).sin()
                                * (PI * (r * k) as f64 / j as f64).sin()
                        })
                        .sum();
                    let expect = if q == r { j as f64 / 2.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn second_difference_is_diagonal() {
        let j = 32;
        let x = 2.0;
        let h = x / j as f64;
        let inner = random_vec(j - 1, 11);
        let mut padded = vec![C64::new(0.0, 0.0)];
        padded.extend(&inner);
        padded.push(C64::new(0.0, 0.0));
        let neg_lap: Vec<C64> = apply_axis1_stencil(Axis1Stencil::SecondDifference, &padded, h)
            .unwrap()
            .into_iter()
            .map(|v| -v)
            .collect();
        let lhs = dst_forward(&neg_lap).unwrap();
        let coef = dst_forward(&inner).unwrap();
        for q in 1..j {
            let (lam, _) = crate::spectral::transverse_eigenpair(q, h, x).unwrap();
            let want = coef[q - 1] * lam;
            assert!((lhs[q - 1] - want).norm() <= 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn mode_round_trip_two_dim() {
        let g = GridSpec::new(&[1.0, 2.0], &[5, 16], 0.1, 1, BoundaryKind::Dirichlet).unwrap();
        let vals = random_vec(g.node_count(), 5);
        let mut f = WaveField::from_values(&g, vals).unwrap();
        f.zero_dirichlet_faces(&g, BoundaryKind::Transparent, BoundaryKind::Transparent);
        let mut t = ModeTransform::new(&g).unwrap();
        let modes = t.analyze(&f).unwrap();
        // Each column equals a per-layer forward transform.
        let col = direct_dst_forward(&f.layer(3)[1..16]);
        for q in 0..15 {
            assert!((modes.column(q)[3] - col[q]).norm() < 1e-12);
        }
        let back = t.synthesize(&modes, &g).unwrap();
        assert!(max_rel(back.values(), f.values()) < 1e-12);
    }

    #[test]
    fn mode_round_trip_three_dim() {
        let g = GridSpec::new(
            &[1.0, 1.0, 1.0],
            &[3, 8, 6],
            0.1,
            1,
            BoundaryKind::Dirichlet,
        )
        .unwrap();
        let mut f = WaveField::from_values(&g, random_vec(g.node_count(), 9)).unwrap();
        f.zero_dirichlet_faces(&g, BoundaryKind::Transparent, BoundaryKind::Transparent);
        let mut fast = ModeTransform::new(&g).unwrap();
        let mut direct = ModeTransform::new_direct(&g).unwrap();
        let a = fast.analyze(&f).unwrap();
        let b = direct.analyze(&f).unwrap();
        assert!(max_rel(&a.data, &b.data) < 1e-12);
        assert_eq!(a.mode_tuple(0), vec![1, 1]);
        assert_eq!(a.mode_tuple(6), vec![2, 2]);
        let back = fast.synthesize(&a, &g).unwrap();
        assert!(max_rel(back.values(), f.values()) < 1e-12);
    }

    #[test]
    fn stencil_examples() {
        let c = vec![C64::new(2.0, -1.0); 6];
        for v in apply_axis1_stencil(Axis1Stencil::Numerov, &c, 0.1).unwrap() {
            assert!((v - c[0]).norm() < 1e-15);
        }
        for v in apply_axis1_stencil(Axis1Stencil::SecondDifference, &c, 0.1).unwrap() {
            assert!(v.norm() < 1e-12);
        }
        let h = 0.3;
        let quad: Vec<C64> = (0..7)
            .map(|j| C64::new((j * j) as f64 * h * h, 0.0))
            .collect();
        for v in apply_axis1_stencil(Axis1Stencil::SecondDifference, &quad, h).unwrap() {
            assert!((v - C64::new(2.0, 0.0)).norm() < 1e-12);
        }
        assert!(apply_axis1_stencil(Axis1Stencil::Numerov, &c[..2], 0.1).is_err());
    }

    proptest! {
        #[test]
        fn numerov_splits_into_halves(re in prop::collection::vec(-10.0f64..10.0, 3..40), seed in 0u64..1000) {
            let im = random_vec(re.len(), seed);
            let u: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, b.im)).collect();
            let s = apply_axis1_stencil(Axis1Stencil::Numerov, &u, 1.0).unwrap();
            let m = apply_axis1_stencil(Axis1Stencil::NumerovMinus, &u, 1.0).unwrap();
            let p = apply_axis1_stencil(Axis1Stencil::NumerovPlus, &u, 1.0).unwrap();
            for k in 0..s.len() {
                prop_assert!((s[k] - m[k] - p[k]).norm() < 1e-12);
            }
        }

        #[test]
        fn random_round_trip(log_j in 1u32..9, seed in 0u64..1000) {
            let j = 1usize << log_j;
            let p = random_vec(j - 1, seed);
            let back = dst_inverse(&dst_forward(&p).unwrap()).unwrap();
            prop_assert!(max_rel(&back, &p) < 1e-12);
        }
    }
}
