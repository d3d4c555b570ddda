//! Mesh inner products, norms, energies and error tables.

use crate::grid::{BoundaryKind, GridSpec, PhysicalConstants, PotentialField, WaveField};
use crate::{Error, Result, C64};
use std::fmt::Write as _;

fn check_shape(grid: &GridSpec, fields: &[&WaveField]) -> Result<()> {
    let shape = grid.shape();
    for f in fields {
        if f.shape() != shape.as_slice() {
            return Err(Error::Shape(format!(
                "field shape {:?} does not match mesh {:?}",
                f.shape(),
                shape
            )));
        }
    }
    Ok(())
}

/// First leading-axis layer counted by the boundary-augmented norm.
fn first_layer(grid: &GridSpec) -> usize {
    if grid.left_boundary() == BoundaryKind::Transparent {
        0
    } else {
        1
    }
}

/// `(U, W)_{ω̃h}`: interior nodes plus the `j1 = J1` trace (and the `j1 = 0`
/// trace when the left edge is transparent), all with weight `h1 ... hn`.
pub fn inner_tilde(u: &WaveField, w: &WaveField, grid: &GridSpec) -> Result<C64> {
    check_shape(grid, &[u, w])?;
    let mask = grid.transverse_interior_mask();
    let mut acc = C64::new(0.0, 0.0);
    for j1 in first_layer(grid)..=grid.count(0) {
        for ((a, b), &inside) in u.layer(j1).iter().zip(w.layer(j1)).zip(&mask) {
            if inside {
                acc += a * b.conj();
            }
        }
    }
    Ok(acc * grid.cell_volume())
}

pub fn norm_tilde(u: &WaveField, grid: &GridSpec) -> Result<f64> {
    Ok(mass2(u, grid)?.sqrt())
}

/// `‖U‖²_{ω̃h}`.
pub fn mass2(u: &WaveField, grid: &GridSpec) -> Result<f64> {
    check_shape(grid, &[u])?;
    let mask = grid.transverse_interior_mask();
    let mut acc = 0.0;
    for j1 in first_layer(grid)..=grid.count(0) {
        for (a, &inside) in u.layer(j1).iter().zip(&mask) {
            if inside {
                acc += a.norm_sqr();
            }
        }
    }
    Ok(acc * grid.cell_volume())
}

/// `‖U‖²_{ωh}` (interior nodes only).
pub fn mass2_interior(u: &WaveField, grid: &GridSpec) -> Result<f64> {
    check_shape(grid, &[u])?;
    let mask = grid.transverse_interior_mask();
    let mut acc = 0.0;
    for j1 in 1..grid.count(0) {
        for (a, &inside) in u.layer(j1).iter().zip(&mask) {
            if inside {
                acc += a.norm_sqr();
            }
        }
    }
    Ok(acc * grid.cell_volume())
}

/// `‖U‖²` restricted to `j1` in `range` (weights as in [`mass2`]).
pub fn mass2_layers(
    u: &WaveField,
    grid: &GridSpec,
    range: std::ops::RangeInclusive<usize>,
) -> Result<f64> {
    check_shape(grid, &[u])?;
    let mask = grid.transverse_interior_mask();
    let mut acc = 0.0;
    for j1 in range {
        for (a, &inside) in u.layer(j1).iter().zip(&mask) {
            if inside {
                acc += a.norm_sqr();
            }
        }
    }
    Ok(acc * grid.cell_volume())
}

/// The form `(s_N1 U, W)_{ωh} + (s⁻_N1 U_J1, W_J1) h1` with transverse
/// weights `h2 ... hn` (`n = 2` or higher; transverse faces ignored).
pub fn numerov_inner(u: &WaveField, w: &WaveField, grid: &GridSpec) -> Result<C64> {
    check_shape(grid, &[u, w])?;
    let mask = grid.transverse_interior_mask();
    let j1 = grid.count(0);
    let mut acc = C64::new(0.0, 0.0);
    for j in 1..j1 {
        let (um, u0, up, wj) = (u.layer(j - 1), u.layer(j), u.layer(j + 1), w.layer(j));
        for i in 0..mask.len() {
            if mask[i] {
                let s = (um[i] + up[i]) / 12.0 + u0[i] * (5.0 / 6.0);
                acc += s * wj[i].conj();
            }
        }
    }
    let (um, u0, wj) = (u.layer(j1 - 1), u.layer(j1), w.layer(j1));
    for i in 0..mask.len() {
        if mask[i] {
            acc += (u0[i] * (5.0 / 12.0) + um[i] / 12.0) * wj[i].conj();
        }
    }
    Ok(acc * grid.cell_volume())
}

/// Kinetic and potential energy of a two-dimensional field:
///
/// `E_kin = c (sum_{j1>=1} sum_{j2=1}^{J2-1} |∂̄1 Ψ|² + sum_{j1} sum_{j2=1}^{J2} |∂̄2 Ψ|²) h1 h2`,
/// `E_pot = (V Ψ, Ψ)_{ω̃h}`.
pub fn energies(
    psi: &WaveField,
    pot: &PotentialField,
    grid: &GridSpec,
    consts: PhysicalConstants,
) -> Result<(f64, f64)> {
    if grid.n() != 2 {
        return Err(Error::Unsupported(
            "energies are implemented for n = 2".into(),
        ));
    }
    check_shape(grid, &[psi])?;
    if pot.v.len() != psi.values().len() {
        return Err(Error::Shape("potential does not match the field".into()));
    }
    let (j1, j2) = (grid.count(0), grid.count(1));
    let (h1, h2) = (grid.step(0), grid.step(1));
    let mut d1 = 0.0;
    for a in 1..=j1 {
        for b in 1..j2 {
            d1 += (psi.at(a, b) - psi.at(a - 1, b)).norm_sqr();
        }
    }
    let mut d2 = 0.0;
    for a in first_layer(grid)..=j1 {
        for b in 1..=j2 {
            d2 += (psi.at(a, b) - psi.at(a, b - 1)).norm_sqr();
        }
    }
    let e_kin = consts.c_hbar * (d1 / (h1 * h1) + d2 / (h2 * h2)) * h1 * h2;
    let mut e_pot = 0.0;
    let s = j2 + 1;
    for a in first_layer(grid)..=j1 {
        for b in 1..j2 {
            e_pot += pot.v[a * s + b] * psi.at(a, b).norm_sqr();
        }
    }
    Ok((e_kin, e_pot * h1 * h2))
}

/// Max-norm and `ω̃h` norm of `A - B`.
pub fn difference_norms(a: &WaveField, b: &WaveField, grid: &GridSpec) -> Result<(f64, f64)> {
    check_shape(grid, &[a, b])?;
    let c = a
        .values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    let mask = grid.transverse_interior_mask();
    let mut l2 = 0.0;
    for j1 in first_layer(grid)..=grid.count(0) {
        for ((x, y), &inside) in a.layer(j1).iter().zip(b.layer(j1)).zip(&mask) {
            if inside {
                l2 += (x - y).norm_sqr();
            }
        }
    }
    Ok((c, (l2 * grid.cell_volume()).sqrt()))
}

/// One row of an error table with the ratios to the previous row.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub label: String,
    pub e_c: f64,
    pub e_l2: f64,
    pub r_c: Option<f64>,
    pub r_l2: Option<f64>,
}

fn ratio(prev: f64, cur: f64) -> Option<f64> {
    (cur != 0.0 && prev.is_finite() && cur.is_finite()).then(|| prev / cur)
}

/// Ratios of consecutive errors; unavailable where the divisor vanishes.
pub fn convergence_ratios(rows: &[(String, f64, f64)]) -> Vec<RatioRow> {
    rows.iter()
        .enumerate()
        .map(|(i, (label, e_c, e_l2))| {
            let (r_c, r_l2) = if i == 0 {
                (None, None)
            } else {
                (ratio(rows[i - 1].1, *e_c), ratio(rows[i - 1].2, *e_l2))
            };
            RatioRow {
                label: label.clone(),
                e_c: *e_c,
                e_l2: *e_l2,
                r_c,
                r_l2,
            }
        })
        .collect()
}

pub fn ratio_table_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from("resolution,E_C,E_L2,R_C,R_L2\n");
    let fmt = |r: Option<f64>| r.map_or(String::new(), |v| format!("{v:.6}"));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{},{}",
            r.label,
            r.e_c,
            r.e_l2,
            fmt(r.r_c),
            fmt(r.r_l2)
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRecord {
    pub level: usize,
    pub t: f64,
    pub mass2: f64,
    pub e_kin: f64,
    pub e_pot: f64,
    pub e_c: Option<f64>,
    pub e_l2: Option<f64>,
}

/// Observables in increasing level order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableSeries {
    pub records: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn push(&mut self, r: ObservableRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if r.level <= last.level {
                return Err(Error::Precondition(format!(
                    "observable level {} after level {}",
                    r.level, last.level
                )));
            }
        }
        self.records.push(r);
        Ok(())
    }

    /// Record the observables of `psi` at `level`.
    pub fn observe(
        &mut self,
        psi: &WaveField,
        pot: &PotentialField,
        grid: &GridSpec,
        consts: PhysicalConstants,
        level: usize,
    ) -> Result<()> {
        let (e_kin, e_pot) = energies(psi, pot, grid, consts)?;
        self.push(ObservableRecord {
            level,
            t: level as f64 * grid.tau(),
            mass2: mass2(psi, grid)?,
            e_kin,
            e_pot,
            e_c: None,
            e_l2: None,
        })
    }

    /// Largest difference norms over the records.
    pub fn max_differences(&self) -> Option<(f64, f64)> {
        let mut out: Option<(f64, f64)> = None;
        for r in &self.records {
            if let (Some(c), Some(l)) = (r.e_c, r.e_l2) {
                let (mc, ml) = out.unwrap_or((0.0, 0.0));
                out = Some((mc.max(c), ml.max(l)));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let with_diff = self.records.iter().any(|r| r.e_c.is_some());
        let mut out = String::from("level,t,mass2,E_kin,E_pot");
        if with_diff {
            out.push_str(",E_C,E_L2");
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.level, r.t, r.mass2, r.e_kin, r.e_pot
            );
            if with_diff {
                let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.17e}"));
                let _ = write!(out, ",{},{}", f(r.e_c), f(r.e_l2));
            }
            out.push('\n');
        }
        out
    }
}

/// Both sides of the summation-by-parts identity linking the interior
/// operator and the right boundary functional, for `n = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummationIdentity {
    pub lhs: C64,
    pub rhs: C64,
    /// Sum of the moduli of the individual terms.
    pub scale: f64,
}

impl SummationIdentity {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }

    pub fn relative_residual(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual()
        } else {
            self.residual() / self.scale
        }
    }
}

/// Evaluate, with `y = (Ψ̃ + Ψ̆)/2` and `δ = (Ψ̃ - Ψ̆)/τ`,
///
/// left:  `(iħ s̄_N δ + c Δ̄_hN y - s̄_N(Ṽ y), W)_{ωh} - (D_J1, W_J1)`,
///        `D = c s_N2 ∂̄1 y - h1 s⁻_N1 {iħ s_N2 δ + (c ∂2∂̄2 - V_inf s_N2) y}`;
///
/// right: `(s_N2(iħ δ - Ṽ y), W)_N - c (s_N2 ∂̄1 y, ∂̄1 W)_{ω̃h} + c (∂2∂̄2 y, W)_N`,
///
/// where `( , )_N` is [`numerov_inner`]. The left side applies the 2D
/// stencils directly; the right side the summed-by-parts factors. Requires
/// `W = 0` on `j1 = 0` and `Ṽ = V_inf` on `j1 = J1 - 1, J1`.
pub fn summation_identity(
    tilde: &WaveField,
    breve: &WaveField,
    w: &WaveField,
    v_tilde: &[f64],
    v_inf: f64,
    grid: &GridSpec,
    consts: PhysicalConstants,
) -> Result<SummationIdentity> {
    if grid.n() != 2 {
        return Err(Error::Unsupported(
            "summation identity is implemented for n = 2".into(),
        ));
    }
    check_shape(grid, &[tilde, breve, w])?;
    let (j1, j2) = (grid.count(0), grid.count(1));
    if v_tilde.len() != j1 + 1 {
        return Err(Error::Shape(
            "auxiliary potential does not match the mesh".into(),
        ));
    }
    if w.layer(0).iter().any(|v| v.norm() != 0.0) {
        return Err(Error::Precondition(
            "test function must vanish on j1 = 0".into(),
        ));
    }
    if v_tilde[j1 - 1] != v_inf || v_tilde[j1] != v_inf {
        return Err(Error::Precondition(
            "auxiliary potential must equal V_inf next to the edge".into(),
        ));
    }
    let (h1, h2) = (grid.step(0), grid.step(1));
    let (c, hbar, tau) = (consts.c_hbar, consts.hbar, grid.tau());
    let ih = C64::new(0.0, hbar);
    let s = j2 + 1;
    let idx = |a: usize, b: usize| a * s + b;
    let y: Vec<C64> = tilde
        .values()
        .iter()
        .zip(breve.values())
        .map(|(a, b)| (a + b) / 2.0)
        .collect();
    let d: Vec<C64> = tilde
        .values()
        .iter()
        .zip(breve.values())
        .map(|(a, b)| (a - b) / tau)
        .collect();
    let wv = w.values();
    let vt = |a: usize| v_tilde[a];
    let wt = [1.0 / 12.0, 5.0 / 6.0, 1.0 / 12.0];
    let lap = [1.0, -2.0, 1.0];
    let mut scale = 0.0;

    // Left side: 9-point stencils of s̄_N = s_N1 s_N2 and
    // Δ̄_hN = s_N2 ∂1∂̄1 + s_N1 ∂2∂̄2 applied at each interior node.
    let mut lhs_int = C64::new(0.0, 0.0);
    for a in 1..j1 {
        for b in 1..j2 {
            let mut acc = C64::new(0.0, 0.0);
            for da in 0..3 {
                for db in 0..3 {
                    let (p, q) = (a + da - 1, b + db - 1);
                    let sbar = wt[da] * wt[db];
                    let dbar = lap[da] * wt[db] / (h1 * h1) + wt[da] * lap[db] / (h2 * h2);
                    acc += ih * d[idx(p, q)] * sbar + y[idx(p, q)] * (c * dbar)
                        - y[idx(p, q)] * (vt(p) * sbar);
                }
            }
            let term = acc * wv[idx(a, b)].conj() * (h1 * h2);
            scale += term.norm();
            lhs_int += term;
        }
    }
    // Boundary functional at j1 = J1.
    let mut lhs_bnd = C64::new(0.0, 0.0);
    for b in 1..j2 {
        let s2 = |arr: &[C64], a: usize| {
            (arr[idx(a, b - 1)] + arr[idx(a, b + 1)]) / 12.0 + arr[idx(a, b)] * (5.0 / 6.0)
        };
        let dd2 = |arr: &[C64], a: usize| {
            (arr[idx(a, b - 1)] - arr[idx(a, b)] * 2.0 + arr[idx(a, b + 1)]) / (h2 * h2)
        };
        let brace = |a: usize| ih * s2(&d, a) + dd2(&y, a) * c - s2(&y, a) * v_inf;
        let flux = (s2(&y, j1) - s2(&y, j1 - 1)) * (c / h1);
        let dfun = flux - (brace(j1) * (5.0 / 12.0) + brace(j1 - 1) / 12.0) * h1;
        let term = dfun * wv[idx(j1, b)].conj() * h2;
        scale += term.norm();
        lhs_bnd += term;
    }
    let lhs = lhs_int - lhs_bnd;

    // Right side from the factored forms.
    let mut g = WaveField::zeros(grid);
    let mut lap2 = WaveField::zeros(grid);
    for a in 0..=j1 {
        for b in 1..j2 {
            let s2 = |arr: &[C64]| {
                (arr[idx(a, b - 1)] + arr[idx(a, b + 1)]) / 12.0 + arr[idx(a, b)] * (5.0 / 6.0)
            };
            g.set(a, b, ih * s2(&d) - s2(&y) * vt(a));
            lap2.set(
                a,
                b,
                (y[idx(a, b - 1)] - y[idx(a, b)] * 2.0 + y[idx(a, b + 1)]) / (h2 * h2),
            );
        }
    }
    let t1 = numerov_inner(&g, w, grid)?;
    let mut t2 = C64::new(0.0, 0.0);
    for a in 1..=j1 {
        for b in 1..j2 {
            let s2 = |aa: usize| {
                (y[idx(aa, b - 1)] + y[idx(aa, b + 1)]) / 12.0 + y[idx(aa, b)] * (5.0 / 6.0)
            };
            let dy = (s2(a) - s2(a - 1)) / h1;
            let dw = (wv[idx(a, b)] - wv[idx(a - 1, b)]) / h1;
            t2 += dy * dw.conj();
        }
    }
    t2 *= h1 * h2;
    let t3 = numerov_inner(&lap2, w, grid)?;
    let rhs = t1 - t2 * c + t3 * c;
    scale += t1.norm() + (t2 * c).norm() + (t3 * c).norm();
    Ok(SummationIdentity { lhs, rhs, scale })
}

/// `|LHS - RHS|` of [`summation_identity`].
pub fn summation_identity_residual(
    tilde: &WaveField,
    breve: &WaveField,
    w: &WaveField,
    v_tilde: &[f64],
    v_inf: f64,
    grid: &GridSpec,
    consts: PhysicalConstants,
) -> Result<f64> {
    Ok(summation_identity(tilde, breve, w, v_tilde, v_inf, grid, consts)?.residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn grid(left: BoundaryKind) -> GridSpec {
        GridSpec::new(&[1.0, 2.0], &[8, 8], 1e-2, 1, left).unwrap()
    }

    fn random_field(g: &GridSpec, seed: u64) -> WaveField {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut f = WaveField::from_fn(g, |_| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        f.zero_dirichlet_faces(g, BoundaryKind::Transparent, BoundaryKind::Transparent);
        f
    }

    #[test]
    fn counting_weights() {
        let g = grid(BoundaryKind::Dirichlet);
        let mut u = WaveField::zeros(&g);
        for a in 1..=8 {
            for b in 1..8 {
                u.set(a, b, C64::new(1.0, 0.0));
            }
        }
        let n2 = mass2(&u, &g).unwrap();
        assert!((n2 - 8.0 * 7.0 * g.cell_volume()).abs() < 1e-14);
        assert_eq!(mass2(&WaveField::zeros(&g), &g).unwrap(), 0.0);
    }

    #[test]
    fn trace_split() {
        let g = grid(BoundaryKind::Dirichlet);
        let u = random_field(&g, 1);
        let trace: f64 = (1..8).map(|b| u.at(8, b).norm_sqr()).sum::<f64>() * g.step(1) * g.step(0);
        let split = mass2_interior(&u, &g).unwrap() + trace;
        assert!((mass2(&u, &g).unwrap() - split).abs() < 1e-13);
        let lt = grid(BoundaryKind::Transparent);
        let left: f64 = (1..8).map(|b| u.at(0, b).norm_sqr()).sum::<f64>() * g.cell_volume();
        assert!((mass2(&u, &lt).unwrap() - mass2(&u, &g).unwrap() - left).abs() < 1e-13);
    }

    #[test]
    fn single_node_energy() {
        let g = grid(BoundaryKind::Dirichlet);
        let mut u = WaveField::zeros(&g);
        u.set(3, 4, C64::new(1.0, 0.0));
        let pot = PotentialField::constant(&g, 0.0);
        let consts = PhysicalConstants::new(1.0, 0.5).unwrap();
        let (k, p) = energies(&u, &pot, &g, consts).unwrap();
        let (h1, h2) = (g.step(0), g.step(1));
        assert!((k - 0.5 * (2.0 / (h1 * h1) + 2.0 / (h2 * h2)) * h1 * h2).abs() < 1e-12);
        assert_eq!(p, 0.0);
        let (k0, p0) = energies(&WaveField::zeros(&g), &pot, &g, consts).unwrap();
        assert_eq!((k0, p0), (0.0, 0.0));
    }

    #[test]
    fn difference_examples() {
        let g = grid(BoundaryKind::Dirichlet);
        let a = random_field(&g, 2);
        assert_eq!(difference_norms(&a, &a, &g).unwrap(), (0.0, 0.0));
        let mut b = a.clone();
        let v = b.at(2, 2);
        b.set(2, 2, v + C64::new(0.0, 1e-3));
        let (c, l) = difference_norms(&a, &b, &g).unwrap();
        assert!((c - 1e-3).abs() < 1e-15);
        assert!((l - 1e-3 * g.cell_volume().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let rows = vec![
            ("a".to_string(), 0.330e-2, 0.330e-2),
            ("b".to_string(), 0.810e-3, 0.810e-3),
            ("c".to_string(), 0.810e-3, 0.0),
        ];
        let t = convergence_ratios(&rows);
        assert!(t[0].r_c.is_none());
        assert!((t[1].r_l2.unwrap() - 4.074).abs() < 1e-3);
        assert_eq!(t[2].r_c, Some(1.0));
        assert_eq!(t[2].r_l2, None);
        assert!(ratio_table_csv(&t).lines().count() == 4);
    }

    #[test]
    fn series_levels_increase() {
        let mut s = ObservableSeries::default();
        let r = ObservableRecord {
            level: 2,
            t: 0.0,
            mass2: 1.0,
            e_kin: 0.0,
            e_pot: 0.0,
            e_c: None,
            e_l2: None,
        };
        s.push(r).unwrap();
        assert!(s.push(r).is_err());
        assert!(s.to_csv().starts_with("level,t,mass2,E_kin,E_pot\n"));
    }

    #[test]
    fn identity_zero_and_precondition() {
        let g = grid(BoundaryKind::Dirichlet);
        let z = WaveField::zeros(&g);
        let vt = vec![0.0; 9];
        let consts = PhysicalConstants::default();
        assert_eq!(
            summation_identity_residual(&z, &z, &z, &vt, 0.0, &g, consts).unwrap(),
            0.0
        );
        let mut w = z.clone();
        w.set(0, 3, C64::new(1.0, 0.0));
        let err = summation_identity_residual(&z, &z, &w, &vt, 0.0, &g, consts).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    proptest! {
        #[test]
        fn identity_holds(seed in 0u64..10_000) {
            let g = grid(BoundaryKind::Dirichlet);
            let a = random_field(&g, seed);
            let b = random_field(&g, seed + 1);
            let mut w = random_field(&g, seed + 2);
            w.layer_mut(0).fill(C64::new(0.0, 0.0));
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut vt: Vec<f64> = (0..9).map(|_| rng.gen_range(-5.0..5.0)).collect();
            vt[7] = 2.0;
            vt[8] = 2.0;
            let id = summation_identity(&a, &b, &w, &vt, 2.0, &g, PhysicalConstants::new(0.8, 1.3).unwrap()).unwrap();
            prop_assert!(id.relative_residual() < 1e-12, "{}", id.relative_residual());
        }

        #[test]
        fn disjoint_supports_add(seed in 0u64..10_000) {
            let g = grid(BoundaryKind::Transparent);
            let u = random_field(&g, seed);
            let mut a = u.clone();
            let mut b = u.clone();
            for j in 0..=8 {
                if j < 4 { b.layer_mut(j).fill(C64::new(0.0, 0.0)); } else { a.layer_mut(j).fill(C64::new(0.0, 0.0)); }
            }
            let lhs = mass2(&u, &g).unwrap();
            let rhs = mass2(&a, &g).unwrap() + mass2(&b, &g).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0));
        }
    }
}
