//! Meshes, mesh functions and initial data.
//!
//! Nodes are indexed from zero. Along the leading axis `j1 = 0..=J1`; along
//! every transverse axis `j_k = 0..=J_k`, with the transverse faces
//! `j_k = 0, J_k` carrying homogeneous Dirichlet data. Field values are stored
//! row-major with the leading axis slowest.

use crate::{Error, Result, C64};
use log::warn;

/// Modulus above which zeroing the initial data at a transparent edge is
/// reported.
pub const SUPPORT_WARN_LEVEL: f64 = 1e-12;

/// `|V - Ṽ|` below this is treated as zero when locating the potential support.
pub const SUPPORT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    /// `hbar^2 / (2 m0)`.
    pub c_hbar: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, c_hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(c_hbar > 0.0 && c_hbar.is_finite()) {
            return Err(Error::Config(format!(
                "physical constants must be positive (hbar = {hbar}, c_hbar = {c_hbar})"
            )));
        }
        Ok(Self { hbar, c_hbar })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            c_hbar: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Transparent,
}

/// Uniform space-time mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    extents: Vec<f64>,
    counts: Vec<usize>,
    steps: Vec<f64>,
    origin: f64,
    tau: f64,
    levels: usize,
    left_boundary: BoundaryKind,
}

impl GridSpec {
    /// Mesh over `[origin, origin + X1] x [0, X2] x ...` with `counts[k]`
    /// intervals per axis. The time mesh has step `tau` and `levels` steps.
    pub fn new(
        extents: &[f64],
        counts: &[usize],
        tau: f64,
        levels: usize,
        left_boundary: BoundaryKind,
    ) -> Result<Self> {
        if extents.len() != counts.len() {
            return Err(Error::Grid(format!(
                "{} extents but {} node counts",
                extents.len(),
                counts.len()
            )));
        }
        if extents.len() < 2 {
            return Err(Error::Grid(format!(
                "space dimension must be at least 2, got {}",
                extents.len()
            )));
        }
        for (k, (&x, &j)) in extents.iter().zip(counts).enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Grid(format!(
                    "extent X{} = {x} must be positive",
                    k + 1
                )));
            }
            if j < 2 {
                return Err(Error::Grid(format!(
                    "count J{} = {j} must be at least 2",
                    k + 1
                )));
            }
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Grid(format!(
                "time step tau = {tau} must be positive"
            )));
        }
        let steps = extents
            .iter()
            .zip(counts)
            .map(|(&x, &j)| x / j as f64)
            .collect();
        Ok(Self {
            extents: extents.to_vec(),
            counts: counts.to_vec(),
            steps,
            origin: 0.0,
            tau,
            levels,
            left_boundary,
        })
    }

    /// Shift the leading-axis coordinate of node `j1 = 0`.
    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_left_boundary(mut self, kind: BoundaryKind) -> Self {
        self.left_boundary = kind;
        self
    }

    pub fn n(&self) -> usize {
        self.extents.len()
    }
    pub fn extent(&self, axis: usize) -> f64 {
        self.extents[axis]
    }
    pub fn extents(&self) -> &[f64] {
        &self.extents
    }
    pub fn count(&self, axis: usize) -> usize {
        self.counts[axis]
    }
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
    pub fn step(&self, axis: usize) -> f64 {
        self.steps[axis]
    }
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
    pub fn origin(&self) -> f64 {
        self.origin
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn levels(&self) -> usize {
        self.levels
    }
    pub fn t_final(&self) -> f64 {
        self.tau * self.levels as f64
    }
    pub fn left_boundary(&self) -> BoundaryKind {
        self.left_boundary
    }

    /// Node counts per axis, `J_k + 1`.
    pub fn shape(&self) -> Vec<usize> {
        self.counts.iter().map(|j| j + 1).collect()
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().map(|j| j + 1).product()
    }

    /// Number of nodes in one leading-axis layer (closed transverse mesh).
    pub fn layer_len(&self) -> usize {
        self.counts[1..].iter().map(|j| j + 1).product()
    }

    /// Number of transverse sine modes, `prod_{k>=2} (J_k - 1)`.
    pub fn mode_count(&self) -> usize {
        self.counts[1..].iter().map(|j| j - 1).product()
    }

    /// Coordinate of node `j` along `axis`.
    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        let x = j as f64 * self.steps[axis];
        if axis == 0 {
            self.origin + x
        } else {
            x
        }
    }

    /// Cell volume `h1 * ... * hn`.
    pub fn cell_volume(&self) -> f64 {
        self.steps.iter().product()
    }

    /// Flags per in-layer offset: true when the node lies strictly inside
    /// every transverse axis.
    pub fn transverse_interior_mask(&self) -> Vec<bool> {
        let shape = &self.shape()[1..];
        let len: usize = shape.iter().product();
        let mut mask = vec![true; len];
        let mut idx = vec![0usize; shape.len()];
        for flag in mask.iter_mut() {
            *flag = idx.iter().zip(shape).all(|(&i, &s)| i > 0 && i + 1 < s);
            for a in (0..shape.len()).rev() {
                idx[a] += 1;
                if idx[a] < shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        mask
    }
}

/// Complex mesh function on the closed mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    shape: Vec<usize>,
    values: Vec<C64>,
    pub level: usize,
}

impl WaveField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            shape: grid.shape(),
            values: vec![C64::new(0.0, 0.0); grid.node_count()],
            level: 0,
        }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Shape(format!(
                "{} values for a mesh with {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Self {
            shape: grid.shape(),
            values,
            level: 0,
        })
    }

    /// Sample `f(x)` at every node, `x` being the node coordinates.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(&[f64]) -> C64) -> Self {
        let shape = grid.shape();
        let mut values = Vec::with_capacity(grid.node_count());
        let mut idx = vec![0usize; shape.len()];
        let mut x = vec![0.0; shape.len()];
        for _ in 0..grid.node_count() {
            for (a, &i) in idx.iter().enumerate() {
                x[a] = grid.coord(a, i);
            }
            values.push(f(&x));
            for a in (0..shape.len()).rev() {
                idx[a] += 1;
                if idx[a] < shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self {
            shape,
            values,
            level: 0,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
    pub fn values(&self) -> &[C64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn layer_len(&self) -> usize {
        self.shape[1..].iter().product()
    }

    /// All values on the leading-axis layer `j1`.
    pub fn layer(&self, j1: usize) -> &[C64] {
        let l = self.layer_len();
        &self.values[j1 * l..(j1 + 1) * l]
    }

    pub fn layer_mut(&mut self, j1: usize) -> &mut [C64] {
        let l = self.layer_len();
        &mut self.values[j1 * l..(j1 + 1) * l]
    }

    /// Value at `(j1, j2)` of a two-dimensional field.
    pub fn at(&self, j1: usize, j2: usize) -> C64 {
        self.values[j1 * self.shape[1] + j2]
    }

    pub fn set(&mut self, j1: usize, j2: usize, v: C64) {
        let s = self.shape[1];
        self.values[j1 * s + j2] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn same_shape(&self, other: &WaveField) -> bool {
        self.shape == other.shape
    }

    /// Zero the transverse faces, plus the first/last leading-axis layer
    /// when that edge is a Dirichlet wall.
    pub fn zero_dirichlet_faces(
        &mut self,
        grid: &GridSpec,
        left: BoundaryKind,
        right: BoundaryKind,
    ) {
        let mask = grid.transverse_interior_mask();
        let l = self.layer_len();
        let j1_max = self.shape[0] - 1;
        for j1 in 0..=j1_max {
            let wall = (j1 == 0 && left == BoundaryKind::Dirichlet)
                || (j1 == j1_max && right == BoundaryKind::Dirichlet);
            let layer = &mut self.values[j1 * l..(j1 + 1) * l];
            for (v, &inside) in layer.iter_mut().zip(&mask) {
                if wall || !inside {
                    *v = C64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Copy this field into the leading-axis window `[offset, offset + J1]`
    /// of a larger field with the same transverse mesh; everything else is 0.
    pub fn embed_axis1(&self, big: &GridSpec, offset: usize) -> Result<WaveField> {
        if big.shape()[1..] != self.shape[1..] || offset + self.shape[0] > big.shape()[0] {
            return Err(Error::Shape("embedding window does not fit".into()));
        }
        let mut out = WaveField::zeros(big);
        let l = self.layer_len();
        out.values[offset * l..(offset + self.shape[0]) * l].copy_from_slice(&self.values);
        out.level = self.level;
        Ok(out)
    }

    /// Restriction to the leading-axis window `[offset, offset + J1_small]`.
    pub fn restrict_axis1(&self, small: &GridSpec, offset: usize) -> Result<WaveField> {
        let s = small.shape();
        if s[1..] != self.shape[1..] || offset + s[0] > self.shape[0] {
            return Err(Error::Shape("restriction window does not fit".into()));
        }
        let l = self.layer_len();
        Ok(WaveField {
            shape: s.clone(),
            values: self.values[offset * l..(offset + s[0]) * l].to_vec(),
            level: self.level,
        })
    }
}

/// Sampled Gaussian packet plus the largest modulus found on the two
/// leading-axis end layer pairs before any zeroing.
#[derive(Clone, Debug)]
pub struct PacketSample {
    pub field: WaveField,
    /// Max modulus on layers `j1 = 0, 1`.
    pub left_edge_max: f64,
    /// Max modulus on layers `j1 = J1 - 1, J1`.
    pub right_edge_max: f64,
}

/// `exp{ i k (x1 - x1⁰) - |x - x⁰|² / (4 alpha) }` sampled at the nodes and
/// zeroed on the transverse faces (and on Dirichlet leading-axis walls).
pub fn gaussian_packet(
    k: f64,
    alpha: f64,
    x0: &[f64],
    grid: &GridSpec,
    right: BoundaryKind,
) -> Result<PacketSample> {
    if !(alpha > 0.0) {
        return Err(Error::Config(format!(
            "packet width alpha = {alpha} must be positive"
        )));
    }
    if x0.len() != grid.n() {
        return Err(Error::Shape(format!(
            "packet centre has {} coordinates, mesh has {} axes",
            x0.len(),
            grid.n()
        )));
    }
    let mut field = WaveField::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
        C64::from_polar((-r2 / (4.0 * alpha)).exp(), k * (x[0] - x0[0]))
    });
    let j1 = grid.count(0);
    let edge_max = |f: &WaveField, layers: [usize; 2]| {
        layers
            .iter()
            .flat_map(|&j| f.layer(j).iter())
            .fold(0.0f64, |m, v| m.max(v.norm()))
    };
    let left_edge_max = edge_max(&field, [0, 1]);
    let right_edge_max = edge_max(&field, [j1 - 1, j1]);
    field.zero_dirichlet_faces(grid, grid.left_boundary(), right);
    Ok(PacketSample {
        field,
        left_edge_max,
        right_edge_max,
    })
}

/// Zero the two layers next to every transparent edge, as required for the
/// history of the boundary convolution to start from zero. Returns the
/// largest modulus removed.
pub fn enforce_initial_support(field: &mut WaveField, grid: &GridSpec, right: BoundaryKind) -> f64 {
    let j1 = grid.count(0);
    let mut layers = Vec::new();
    if grid.left_boundary() == BoundaryKind::Transparent {
        layers.extend([0, 1]);
    }
    if right == BoundaryKind::Transparent {
        layers.extend([j1 - 1, j1]);
    }
    let mut removed = 0.0f64;
    for j in layers {
        for v in field.layer_mut(j) {
            removed = removed.max(v.norm());
            *v = C64::new(0.0, 0.0);
        }
    }
    if removed > SUPPORT_WARN_LEVEL {
        warn!("initial data of modulus {removed:.3e} zeroed next to a transparent edge");
    }
    removed
}

/// Potential families available to scenarios.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    None,
    /// `alpha0^2 c1 / cosh^2(alpha0 (x1 - x_star))`.
    PoschlTeller {
        alpha0: f64,
        c1: f64,
        x_star: f64,
    },
    /// Value `q` on `(a, b) x (c, d)`, averaged on the rectangle boundary.
    Rectangular {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        q: f64,
    },
}

/// The auxiliary leading-axis potential `Ṽ(x1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum AuxPotential {
    /// `Ṽ ≡ V_inf`.
    LimitValue,
    /// Piecewise constant: value of the last breakpoint `x_start <= x1`;
    /// `V_inf` before the first breakpoint.
    Piecewise(Vec<(f64, f64)>),
}

/// Sampled potential split as `V = Ṽ(x1) + dV`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    pub v: Vec<f64>,
    pub v_tilde: Vec<f64>,
    pub v_inf: f64,
    pub dv: Vec<f64>,
    layer_len: usize,
}

impl PotentialField {
    /// Constant potential `V ≡ v_inf`, `Ṽ ≡ v_inf`.
    pub fn constant(grid: &GridSpec, v_inf: f64) -> Self {
        Self {
            v: vec![v_inf; grid.node_count()],
            v_tilde: vec![v_inf; grid.count(0) + 1],
            v_inf,
            dv: vec![0.0; grid.node_count()],
            layer_len: grid.layer_len(),
        }
    }

    pub fn from_parts(grid: &GridSpec, v: Vec<f64>, v_tilde: Vec<f64>, v_inf: f64) -> Result<Self> {
        if v.len() != grid.node_count() || v_tilde.len() != grid.count(0) + 1 {
            return Err(Error::Shape(
                "potential arrays do not match the mesh".into(),
            ));
        }
        let l = grid.layer_len();
        let dv = v
            .iter()
            .enumerate()
            .map(|(i, &x)| x - v_tilde[i / l])
            .collect();
        Ok(Self {
            v,
            v_tilde,
            v_inf,
            dv,
            layer_len: l,
        })
    }

    pub fn layer_len(&self) -> usize {
        self.layer_len
    }

    fn layer_dv_max(&self, j1: usize) -> f64 {
        let l = self.layer_len;
        self.dv[j1 * l..(j1 + 1) * l]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Smallest leading-axis index beyond which `|dV| < SUPPORT_TOL`
    /// (`None` when `dV` vanishes everywhere).
    pub fn support_end(&self) -> Option<usize> {
        let layers = self.v_tilde.len();
        (0..layers)
            .rev()
            .find(|&j| self.layer_dv_max(j) >= SUPPORT_TOL)
    }

    /// Largest index before which `|dV| < SUPPORT_TOL`.
    pub fn support_start(&self) -> Option<usize> {
        (0..self.v_tilde.len()).find(|&j| self.layer_dv_max(j) >= SUPPORT_TOL)
    }

    /// Inferred support bound `X0` (coordinate of the last layer carrying dV).
    pub fn support_bound(&self, grid: &GridSpec) -> Option<f64> {
        self.support_end().map(|j| grid.coord(0, j))
    }

    /// Check the requirements of the transparent edges: `dV = 0` and
    /// `Ṽ = V_inf` on the two layers next to each transparent edge.
    pub fn validate_support(&self, grid: &GridSpec, right: BoundaryKind) -> Result<()> {
        let j1 = grid.count(0);
        if right == BoundaryKind::Transparent {
            if let Some(end) = self.support_end() {
                if end + 2 > j1 {
                    return Err(Error::Config(format!(
                        "potential support reaches x1 = {:.6} but must end by X1 - 2 h1 = {:.6}",
                        grid.coord(0, end),
                        grid.coord(0, j1 - 2)
                    )));
                }
            }
            for j in [j1 - 1, j1] {
                if (self.v_tilde[j] - self.v_inf).abs() > SUPPORT_TOL * self.v_inf.abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "auxiliary potential at x1 = {:.6} differs from V_inf",
                        grid.coord(0, j)
                    )));
                }
            }
        }
        if grid.left_boundary() == BoundaryKind::Transparent {
            if let Some(start) = self.support_start() {
                if start < 2 {
                    return Err(Error::Config(format!(
                        "potential support starts at x1 = {:.6} but must start after {:.6}",
                        grid.coord(0, start),
                        grid.coord(0, 1)
                    )));
                }
            }
            for j in [0, 1] {
                if (self.v_tilde[j] - self.v_inf).abs() > SUPPORT_TOL * self.v_inf.abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "auxiliary potential at x1 = {:.6} differs from V_inf",
                        grid.coord(0, j)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Set `V = Ṽ` on the two layers next to each transparent edge when the
    /// deviation there is at most `rel_tol * max|V|`. Returns the largest
    /// deviation removed; fails when a deviation exceeds the tolerance.
    pub fn clamp_edge_layers(
        &mut self,
        grid: &GridSpec,
        right: BoundaryKind,
        rel_tol: f64,
    ) -> Result<f64> {
        let j1 = grid.count(0);
        let mut layers = Vec::new();
        if grid.left_boundary() == BoundaryKind::Transparent {
            layers.extend([0, 1]);
        }
        if right == BoundaryKind::Transparent {
            layers.extend([j1 - 1, j1]);
        }
        let scale = self.v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let l = self.layer_len;
        let mut removed = 0.0f64;
        for j in layers {
            for i in j * l..(j + 1) * l {
                let d = self.dv[i].abs();
                if d > rel_tol * scale {
                    return Err(Error::Config(format!(
                        "potential deviates by {d:.3e} from its limit at x1 = {:.6}",
                        grid.coord(0, j)
                    )));
                }
                removed = removed.max(d);
                self.dv[i] = 0.0;
                self.v[i] = self.v_tilde[j];
            }
        }
        if removed > 0.0 {
            log::debug!("clamped potential tail of size {removed:.3e} at transparent edges");
        }
        Ok(removed)
    }

    /// Copy into the leading-axis window of a larger mesh; outside the
    /// window `V = Ṽ = V_inf`.
    pub fn embed_axis1(&self, big: &GridSpec, offset: usize) -> Result<PotentialField> {
        let small_layers = self.v_tilde.len();
        if big.layer_len() != self.layer_len || offset + small_layers > big.count(0) + 1 {
            return Err(Error::Shape("embedding window does not fit".into()));
        }
        let mut out = PotentialField::constant(big, self.v_inf);
        let l = self.layer_len;
        out.v[offset * l..(offset + small_layers) * l].copy_from_slice(&self.v);
        out.dv[offset * l..(offset + small_layers) * l].copy_from_slice(&self.dv);
        out.v_tilde[offset..offset + small_layers].copy_from_slice(&self.v_tilde);
        Ok(out)
    }
}

fn node_index_on_axis(grid: &GridSpec, axis: usize, x: f64, name: &str) -> Result<usize> {
    let s = (x - if axis == 0 { grid.origin() } else { 0.0 }) / grid.step(axis);
    let j = s.round();
    if (s - j).abs() > 1e-8 || j < 0.0 || j > grid.count(axis) as f64 {
        return Err(Error::Config(format!(
            "rectangle coordinate {name} = {x} is not a mesh node on axis x{}",
            axis + 1
        )));
    }
    Ok(j as usize)
}

/// Sample `spec` on the mesh and split it against the auxiliary potential.
pub fn sample_potential(
    spec: &PotentialSpec,
    aux: &AuxPotential,
    v_inf: f64,
    grid: &GridSpec,
) -> Result<PotentialField> {
    let v: Vec<f64> = match *spec {
        PotentialSpec::None => vec![v_inf; grid.node_count()],
        PotentialSpec::PoschlTeller { alpha0, c1, x_star } => {
            let l = grid.layer_len();
            let mut v = Vec::with_capacity(grid.node_count());
            for j1 in 0..=grid.count(0) {
                let ch = (alpha0 * (grid.coord(0, j1) - x_star)).cosh();
                let val = v_inf + alpha0 * alpha0 * c1 / (ch * ch);
                v.extend(std::iter::repeat(val).take(l));
            }
            v
        }
        PotentialSpec::Rectangular { a, b, c, d, q } => {
            if grid.n() != 2 {
                return Err(Error::Unsupported(
                    "rectangular potential needs n = 2".into(),
                ));
            }
            if !(a < b && c < d) {
                return Err(Error::Config(format!(
                    "degenerate rectangle ({a},{b})x({c},{d})"
                )));
            }
            let ia = node_index_on_axis(grid, 0, a, "a")?;
            let ib = node_index_on_axis(grid, 0, b, "b")?;
            let ic = node_index_on_axis(grid, 1, c, "c")?;
            let id = node_index_on_axis(grid, 1, d, "d")?;
            let mut v = vec![v_inf; grid.node_count()];
            let s = grid.count(1) + 1;
            for j1 in ia..=ib {
                for j2 in ic..=id {
                    let edge1 = j1 == ia || j1 == ib;
                    let edge2 = j2 == ic || j2 == id;
                    let w = match (edge1, edge2) {
                        (false, false) => 1.0,
                        (true, true) => 0.25,
                        _ => 0.5,
                    };
                    v[j1 * s + j2] += w * q;
                }
            }
            v
        }
    };
    let v_tilde: Vec<f64> = match aux {
        AuxPotential::LimitValue => vec![v_inf; grid.count(0) + 1],
        AuxPotential::Piecewise(breaks) => (0..=grid.count(0))
            .map(|j| {
                let x = grid.coord(0, j);
                breaks
                    .iter()
                    .rev()
                    .find(|(x0, _)| *x0 <= x)
                    .map_or(v_inf, |&(_, val)| val)
            })
            .collect(),
    };
    PotentialField::from_parts(grid, v, v_tilde, v_inf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn grid2(x: [f64; 2], j: [usize; 2]) -> GridSpec {
        GridSpec::new(&x, &j, 1e-3, 10, BoundaryKind::Transparent).unwrap()
    }

    #[test]
    fn steps_follow_extents() {
        let g = grid2([4.0, 4.2], [400, 64]);
        assert!((g.step(0) - 0.01).abs() < 1e-15);
        assert!((g.step(1) - 0.065625).abs() < 1e-15);
        assert!((g.step(0) * 400.0 - 4.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_mesh_rejected() {
        assert!(GridSpec::new(&[1.0, 1.0], &[1, 4], 1e-3, 1, BoundaryKind::Dirichlet).is_err());
        assert!(GridSpec::new(&[0.0, 1.0], &[4, 4], 1e-3, 1, BoundaryKind::Dirichlet).is_err());
        assert!(GridSpec::new(&[1.0, 1.0], &[4, 4], -1.0, 1, BoundaryKind::Dirichlet).is_err());
        assert!(GridSpec::new(&[1.0], &[4], 1e-3, 1, BoundaryKind::Dirichlet).is_err());
    }

    #[test]
    fn packet_is_one_at_centre_and_bounded() {
        let g = grid2([4.0, 4.2], [40, 42]);
        let x0 = [1.0, 2.1];
        let p = gaussian_packet(
            30.0 * SQRT_2,
            1.0 / 120.0,
            &x0,
            &g,
            BoundaryKind::Transparent,
        )
        .unwrap();
        let c = p.field.at(10, 21);
        assert!((c - C64::new(1.0, 0.0)).norm() < 1e-14);
        for (i, v) in p.field.values().iter().enumerate() {
            let (j1, j2) = (i / 43, i % 43);
            let r2 = (g.coord(0, j1) - 1.0).powi(2) + (g.coord(1, j2) - 2.1).powi(2);
            let expect = if j2 == 0 || j2 == 42 {
                0.0
            } else {
                (-r2 * 30.0).exp()
            };
            assert!((v.norm() - expect).abs() < 1e-14);
            assert!(v.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn packet_edges_recorded_and_cleared() {
        let g = grid2([4.0, 4.2], [400, 64]);
        let mut p =
            gaussian_packet(1.0, 1.0 / 120.0, &[1.0, 2.1], &g, BoundaryKind::Transparent).unwrap();
        assert!(p.left_edge_max > 0.0 && p.left_edge_max < 1e-12);
        let removed = enforce_initial_support(&mut p.field, &g, BoundaryKind::Transparent);
        assert!(removed <= p.left_edge_max.max(p.right_edge_max));
        assert!(p.field.layer(0).iter().all(|v| v.norm() == 0.0));
        assert!(p.field.layer(400).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn poschl_teller_peak() {
        let g = grid2([4.0, 4.2], [400, 64]);
        let spec = PotentialSpec::PoschlTeller {
            alpha0: 6.0,
            c1: 47.0,
            x_star: 2.0,
        };
        let p = sample_potential(&spec, &AuxPotential::LimitValue, 0.0, &g).unwrap();
        assert!((p.v[200 * 65 + 5] - 1692.0).abs() < 1e-10);
        assert_eq!(p.dv, p.v);
    }

    #[test]
    fn rectangle_averaging() {
        let g = grid2([3.0, 2.8], [600, 64]);
        let spec = PotentialSpec::Rectangular {
            a: 1.6,
            b: 1.9,
            c: 0.7,
            d: 2.1,
            q: -9000.0,
        };
        let p = sample_potential(&spec, &AuxPotential::LimitValue, 0.0, &g).unwrap();
        let s = 65;
        let (ia, ib, ic, id) = (320, 380, 16, 48);
        assert_eq!(p.v[ia * s + ic], -2250.0);
        assert_eq!(p.v[ib * s + id], -2250.0);
        assert_eq!(p.v[ia * s + 30], -4500.0);
        assert_eq!(p.v[350 * s + ic], -4500.0);
        assert_eq!(p.v[350 * s + 30], -9000.0);
        assert_eq!(p.v[300 * s + 30], 0.0);
        assert_eq!(p.v[350 * s + 10], 0.0);
    }

    #[test]
    fn rectangle_off_mesh_named() {
        let g = grid2([3.0, 2.8], [600, 64]);
        let spec = PotentialSpec::Rectangular {
            a: 1.6,
            b: 1.9,
            c: 0.71,
            d: 2.1,
            q: 1.0,
        };
        let err = sample_potential(&spec, &AuxPotential::LimitValue, 0.0, &g).unwrap_err();
        assert!(err.to_string().contains("c = 0.71"), "{err}");
    }

    #[test]
    fn rectangle_integral_converges() {
        // Weighted node sum approaches Q * area; the error shrinks on refinement.
        let area = 0.3 * 1.4;
        let mut prev = f64::INFINITY;
        for refine in [1usize, 2, 4] {
            let g = grid2([3.0, 2.8], [600 * refine, 64 * refine]);
            let spec = PotentialSpec::Rectangular {
                a: 1.6,
                b: 1.9,
                c: 0.7,
                d: 2.1,
                q: 2.0,
            };
            let p = sample_potential(&spec, &AuxPotential::LimitValue, 0.0, &g).unwrap();
            let sum: f64 = p.v.iter().sum::<f64>() * g.cell_volume();
            let err = (sum - 2.0 * area).abs();
            assert!(err <= prev);
            prev = err;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn support_bound_and_clamp() {
        let g = grid2([4.0, 4.2], [400, 64]);
        let spec = PotentialSpec::PoschlTeller {
            alpha0: 6.0,
            c1: 47.0,
            x_star: 2.0,
        };
        let mut p = sample_potential(&spec, &AuxPotential::LimitValue, 0.0, &g).unwrap();
        assert!(p.validate_support(&g, BoundaryKind::Transparent).is_err());
        let removed = p
            .clamp_edge_layers(&g, BoundaryKind::Transparent, 1e-8)
            .unwrap();
        assert!(removed > 0.0 && removed < 1e-6);
        p.validate_support(&g, BoundaryKind::Transparent).unwrap();
        assert!(p.support_bound(&g).unwrap() <= 4.0 - 2.0 * 0.01 + 1e-12);
        assert!(p.dv[399 * 65..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn clamp_refuses_large_tail() {
        let g = grid2([4.0, 4.2], [400, 64]);
        let spec = PotentialSpec::PoschlTeller {
            alpha0: 1.0,
            c1: 47.0,
            x_star: 2.0,
        };
        let mut p = sample_potential(&spec, &AuxPotential::LimitValue, 0.0, &g).unwrap();
        assert!(p
            .clamp_edge_layers(&g, BoundaryKind::Transparent, 1e-8)
            .is_err());
    }

    #[test]
    fn piecewise_aux_potential() {
        let g = grid2([4.0, 4.2], [4, 4]);
        let aux = AuxPotential::Piecewise(vec![(0.0, 3.0), (2.0, 5.0)]);
        let p = sample_potential(&PotentialSpec::None, &aux, 5.0, &g).unwrap();
        assert_eq!(p.v_tilde, vec![3.0, 3.0, 5.0, 5.0, 5.0]);
        assert_eq!(p.dv[0], 2.0);
        assert_eq!(p.dv[4 * 5], 0.0);
    }

    #[test]
    fn embed_and_restrict_round_trip() {
        let g = grid2([1.0, 1.0], [4, 4]);
        let big = GridSpec::new(&[3.0, 1.0], &[12, 4], 1e-3, 10, BoundaryKind::Dirichlet)
            .unwrap()
            .with_origin(-1.0);
        let f = WaveField::from_fn(&g, |x| C64::new(x[0], x[1]));
        let e = f.embed_axis1(&big, 4).unwrap();
        assert_eq!(e.restrict_axis1(&g, 4).unwrap(), f);
        assert_eq!(big.coord(0, 4), 0.0);
    }
}
