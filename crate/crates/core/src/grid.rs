//! Discretizations of the line `ℓ` and of radial functions on the plane `Π`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::k0_unchecked;

/// How the line component is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSymmetry {
    /// Nodes on `[0, L]`; the state is the even extension to `[−L, L]`.
    Even,
    /// Nodes on `[−L, L]`; no symmetry imposed.
    Full,
}

/// Uniform grid on the line with a node at the junction.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid<T> {
    half_length: T,
    n_half: usize,
    symmetry: LineSymmetry,
    exterior_rate: T,
    weights: Vec<T>,
}

impl<T: Real> LineGrid<T> {
    /// `n_half` nodes on `[0, L]` (node 0 at the junction).
    pub fn new(half_length: T, n_half: usize, symmetry: LineSymmetry) -> Result<Self> {
        if !(half_length > T::zero()) || !half_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "line half-length must be positive (got {half_length})"
            )));
        }
        if n_half < 3 {
            return Err(Error::InvalidParameter(format!(
                "line grid needs at least 3 nodes on [0, L] (got {n_half})"
            )));
        }
        let mut grid = Self {
            half_length,
            n_half,
            symmetry,
            exterior_rate: T::zero(),
            weights: Vec::new(),
        };
        grid.weights = grid.trapezoid();
        Ok(grid)
    }

    fn trapezoid(&self) -> Vec<T> {
        let (n_half, symmetry) = (self.n_half, self.symmetry);
        let h = self.spacing();
        let half = T::lit(0.5);
        let mut weights: Vec<T> = match symmetry {
            // full-line trapezoid folded onto [0, L]
            LineSymmetry::Even => (0..n_half)
                .map(|i| if i == 0 || i == n_half - 1 { h } else { T::lit(2.0) * h })
                .collect(),
            LineSymmetry::Full => {
                let n = 2 * n_half - 1;
                (0..n)
                    .map(|i| if i == 0 || i == n - 1 { half * h } else { h })
                    .collect()
            }
        };
        for (i, f) in self.ends() {
            weights[i] += f * self.exterior_weight(T::lit(2.0));
        }
        weights
    }

    /// The same grid with each end continued by an exponential tail
    /// `u(L)·e^{−κ(|x|−L)}`; `κ = 0` means a free (Neumann) end.
    pub fn with_exterior_rate(mut self, rate: T) -> Result<Self> {
        if !(rate >= T::zero()) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exterior decay rate must be finite and nonnegative (got {rate})"
            )));
        }
        self.exterior_rate = rate;
        self.weights = self.trapezoid();
        Ok(self)
    }

    pub fn exterior_rate(&self) -> T {
        self.exterior_rate
    }

    /// Stored end nodes with the number of line ends each represents.
    pub(crate) fn ends(&self) -> Vec<(usize, T)> {
        match self.symmetry {
            LineSymmetry::Even => vec![(self.n_half - 1, T::lit(2.0))],
            LineSymmetry::Full => vec![(0, T::one()), (2 * self.n_half - 2, T::one())],
        }
    }

    /// `∫_L^∞ e^{−κ power (x−L)} dx`, zero without a tail.
    pub(crate) fn exterior_weight(&self, power: T) -> T {
        if self.exterior_rate > T::zero() {
            T::one() / (power * self.exterior_rate)
        } else {
            T::zero()
        }
    }

    /// Weights for `∫|u|^power` including the tails.
    pub(crate) fn power_weights(&self, power: T) -> Vec<T> {
        let mut w = self.weights.clone();
        let two = T::lit(2.0);
        for (i, f) in self.ends() {
            w[i] += f * (self.exterior_weight(power) - self.exterior_weight(two));
        }
        w
    }

    /// Grid with spacing close to `h` on `[0, L]`.
    pub fn with_spacing(half_length: T, h: T, symmetry: LineSymmetry) -> Result<Self> {
        let n = (half_length / h).round().to_usize().unwrap_or(0) + 1;
        Self::new(half_length, n, symmetry)
    }

    pub fn half_length(&self) -> T {
        self.half_length
    }
    pub fn n_half(&self) -> usize {
        self.n_half
    }
    pub fn symmetry(&self) -> LineSymmetry {
        self.symmetry
    }
    pub fn spacing(&self) -> T {
        self.half_length / T::from_usize(self.n_half - 1).unwrap()
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Index of the junction node.
    pub fn junction(&self) -> usize {
        match self.symmetry {
            LineSymmetry::Even => 0,
            LineSymmetry::Full => self.n_half - 1,
        }
    }

    pub fn coordinate(&self, i: usize) -> T {
        let h = self.spacing();
        match self.symmetry {
            LineSymmetry::Even => T::from_usize(i).unwrap() * h,
            LineSymmetry::Full => {
                (T::from_usize(i).unwrap() - T::from_usize(self.n_half - 1).unwrap()) * h
            }
        }
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.coordinate(i)).collect()
    }

    /// Quadrature weights for integrals of `|u|²` over the whole line.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Multiplicity of each stored edge in the whole-line kinetic sum.
    pub(crate) fn edge_multiplicity(&self) -> T {
        match self.symmetry {
            LineSymmetry::Even => T::lit(2.0),
            LineSymmetry::Full => T::one(),
        }
    }

    /// Outer-quarter mask used for boundary-mass diagnostics.
    pub(crate) fn is_outer_quarter(&self, i: usize) -> bool {
        self.coordinate(i).abs() > T::lit(0.75) * self.half_length
    }

    /// Even extension of half-line samples to the full grid; identity for
    /// [`LineSymmetry::Full`].
    pub fn reflect<S: Copy>(&self, values: &[S]) -> Vec<S> {
        match self.symmetry {
            LineSymmetry::Full => values.to_vec(),
            LineSymmetry::Even => {
                let mut out: Vec<S> = values.iter().rev().copied().collect();
                out.extend_from_slice(&values[1..]);
                out
            }
        }
    }

    /// The same geometry without symmetry reduction.
    pub fn to_full(&self) -> Self {
        Self::new(self.half_length, self.n_half, LineSymmetry::Full)
            .and_then(|g| g.with_exterior_rate(self.exterior_rate))
            .expect("valid grid")
    }
}

/// Geometric refinement of the radial mesh toward the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrading<T> {
    /// Outer radius of the innermost cell.
    pub first_edge: T,
    /// Growth ratio of consecutive cell widths.
    pub ratio: T,
}

impl<T: Real> Default for RadialGrading<T> {
    fn default() -> Self {
        Self {
            first_edge: T::lit(1e-4),
            ratio: T::lit(1.15),
        }
    }
}

/// Cell-centred radial mesh on the disc of radius `R`.
///
/// Cell `j` spans `[e_j, e_{j+1}]` with `e_0 = 0`; its node is the midpoint and
/// its weight the width, so that `2π Σ w_j ρ_j` is the exact disc area. Each
/// cell also carries a Gauss rule (including the Jacobian `ρ`) used for
/// integrands with the logarithmic `K₀` singularity; the first cell is mapped
/// through `ρ = e_1 s²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    radius: T,
    grading: RadialGrading<T>,
    edges: Vec<T>,
    nodes: Vec<T>,
    weights: Vec<T>,
    sub_per_cell: usize,
    sub_points: Vec<T>,
    sub_weights: Vec<T>,
    green: Vec<T>,
}

pub(crate) const SUB_POINTS: usize = 4;

impl<T: Real> RadialGrid<T> {
    /// `n_uniform` sets the outer spacing `R/n_uniform`; graded cells are added
    /// near the origin.
    pub fn new(radius: T, n_uniform: usize, grading: RadialGrading<T>) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive (got {radius})"
            )));
        }
        if n_uniform < 4 {
            return Err(Error::InvalidParameter(format!(
                "radial grid needs at least 4 uniform cells (got {n_uniform})"
            )));
        }
        if !(grading.ratio > T::one()) || !(grading.first_edge > T::zero()) {
            return Err(Error::InvalidParameter(
                "grading needs ratio > 1 and first_edge > 0".into(),
            ));
        }
        let h = radius / T::from_usize(n_uniform).unwrap();
        let mut edges = vec![T::zero()];
        let mut e = grading.first_edge.min(h);
        edges.push(e);
        loop {
            let width = e * (grading.ratio - T::one());
            if width >= h || e + width >= radius {
                break;
            }
            e += width;
            edges.push(e);
        }
        let start = *edges.last().unwrap();
        let m = ((radius - start) / h).ceil().to_usize().unwrap().max(1);
        let step = (radius - start) / T::from_usize(m).unwrap();
        for k in 1..=m {
            edges.push(if k == m {
                radius
            } else {
                start + step * T::from_usize(k).unwrap()
            });
        }
        Ok(Self::from_edges(radius, grading, edges))
    }

    fn from_edges(radius: T, grading: RadialGrading<T>, edges: Vec<T>) -> Self {
        let half = T::lit(0.5);
        let n = edges.len() - 1;
        let nodes: Vec<T> = (0..n).map(|j| half * (edges[j] + edges[j + 1])).collect();
        let weights: Vec<T> = (0..n).map(|j| edges[j + 1] - edges[j]).collect();
        let (gx, gw) = gauss_legendre::<T>(SUB_POINTS);
        let mut sub_points = Vec::with_capacity(n * SUB_POINTS);
        let mut sub_weights = Vec::with_capacity(n * SUB_POINTS);
        for j in 0..n {
            let (a, b) = (edges[j], edges[j + 1]);
            for k in 0..SUB_POINTS {
                // Gauss nodes on [0, 1]
                let t = half * (gx[k] + T::one());
                let w = half * gw[k];
                if j == 0 {
                    let rho = b * t * t;
                    // ρ dρ = 2 b² s³ ds
                    sub_points.push(rho);
                    sub_weights.push(w * T::lit(2.0) * b * b * t * t * t);
                } else {
                    let rho = a + (b - a) * t;
                    sub_points.push(rho);
                    sub_weights.push(w * (b - a) * rho);
                }
            }
        }
        let two_pi = T::lit(2.0) * T::PI();
        let green = sub_points.iter().map(|&r| k0_unchecked(r) / two_pi).collect();
        Self {
            radius,
            grading,
            edges,
            nodes,
            weights,
            sub_per_cell: SUB_POINTS,
            sub_points,
            sub_weights,
            green,
        }
    }

    /// The same grid with every cell split in two.
    pub fn refined(&self) -> Self {
        let half = T::lit(0.5);
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        edges.push(self.edges[0]);
        for w in self.edges.windows(2) {
            edges.push(half * (w[0] + w[1]));
            edges.push(w[1]);
        }
        let grading = RadialGrading {
            first_edge: edges[1],
            ratio: self.grading.ratio.sqrt(),
        };
        Self::from_edges(self.radius, grading, edges)
    }

    pub fn radius(&self) -> T {
        self.radius
    }
    pub fn grading(&self) -> RadialGrading<T> {
        self.grading
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn edges(&self) -> &[T] {
        &self.edges
    }
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }
    /// Weights `w_j` with `∫ f ≈ 2π Σ w_j ρ_j f(ρ_j)`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    /// `w_j ρ_j`, the exact cell integral of `ρ`.
    pub fn cell_moment(&self, j: usize) -> T {
        self.weights[j] * self.nodes[j]
    }
    pub fn sub_per_cell(&self) -> usize {
        self.sub_per_cell
    }
    pub fn sub_points(&self) -> &[T] {
        &self.sub_points
    }
    /// Gauss weights including the Jacobian `ρ`.
    pub fn sub_weights(&self) -> &[T] {
        &self.sub_weights
    }
    /// `K₀(ρ)/(2π)` at every sub-point.
    pub fn green(&self) -> &[T] {
        &self.green
    }

    /// `∫_{ℝ²} f` for a radial `f` sampled at the nodes.
    pub fn integrate_nodes(&self, f: &[T]) -> T {
        let s: T = (0..self.len()).map(|j| self.cell_moment(j) * f[j]).sum();
        T::lit(2.0) * T::PI() * s
    }

    /// `∫_{ℝ²} f(|x|) dx` using the cell Gauss rules; safe for log singularities.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> T {
        let s: T = self
            .sub_points
            .iter()
            .zip(&self.sub_weights)
            .map(|(&r, &w)| w * f(r))
            .sum();
        T::lit(2.0) * T::PI() * s
    }

    /// Flux coefficients `2π e_{j+1}/(ρ_{j+1} − ρ_j)` of the discrete `‖∇φ‖²`.
    pub(crate) fn flux_coefficients(&self) -> Vec<T> {
        let two_pi = T::lit(2.0) * T::PI();
        (0..self.len() - 1)
            .map(|j| two_pi * self.edges[j + 1] / (self.nodes[j + 1] - self.nodes[j]))
            .collect()
    }
}

/// Both grids of the hybrid domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Grids<T> {
    pub line: LineGrid<T>,
    pub radial: RadialGrid<T>,
}

impl<T: Real> Grids<T> {
    pub fn new(line: LineGrid<T>, radial: RadialGrid<T>) -> Self {
        Self { line, radial }
    }

    /// `L = R = 20`, line spacing `0.01`, radial outer spacing `0.02`.
    pub fn standard(symmetry: LineSymmetry) -> Self {
        let line = LineGrid::new(T::lit(20.0), 2001, symmetry).expect("valid");
        let radial = RadialGrid::new(T::lit(20.0), 1000, RadialGrading::default()).expect("valid");
        Self { line, radial }
    }

    /// Halves both mesh widths.
    pub fn refined(&self) -> Self {
        let line = LineGrid::new(
            self.line.half_length,
            2 * self.line.n_half - 1,
            self.line.symmetry,
        )
        .and_then(|g| g.with_exterior_rate(self.line.exterior_rate))
        .expect("valid");
        Self {
            line,
            radial: self.radial.refined(),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub(crate) fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = T::lit(z);
        w[n - 1 - i] = T::lit(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}
