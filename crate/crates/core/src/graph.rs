//! Geometry of the tricrystal junction and fields living on it.
//!
//! Each of the three half-lines is truncated to `[0, L]` and sampled on the same
//! uniform grid, so a field is three equally long sample vectors. Edge `j` carries
//! the wave speed `c_j`; the vertex sits at `x = 0` on every edge.

use std::io::{self, Write};

use crate::{Error, Real, Result, EDGES};

/// The junction: three positive edge speeds and the vertex parameter `λ` of the
/// δ′ coupling `c₁u′₁(0) = c₂u′₂(0) = c₃u′₃(0)`, `Σ c_j u_j(0) = λ c₁ u′₁(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YGraphSpec<T> {
    speeds: [T; EDGES],
    lambda: T,
}

impl<T: Real> YGraphSpec<T> {
    pub fn new(speeds: [T; EDGES], lambda: T) -> Result<Self> {
        for (j, &c) in speeds.iter().enumerate() {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "speed c{} must be finite and > 0, got {}",
                    j + 1,
                    c
                )));
            }
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be finite, got {lambda}")));
        }
        Ok(Self { speeds, lambda })
    }

    /// Equal speeds `c` on all edges.
    pub fn uniform(c: T, lambda: T) -> Result<Self> {
        Self::new([c; EDGES], lambda)
    }

    #[inline]
    pub fn speeds(&self) -> [T; EDGES] {
        self.speeds
    }

    #[inline]
    pub fn speed(&self, edge: usize) -> T {
        self.speeds[edge]
    }

    #[inline]
    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.speeds, lambda)
    }

    pub fn speed_sum(&self) -> T {
        self.speeds.iter().copied().sum()
    }

    pub fn max_speed(&self) -> T {
        self.speeds.iter().copied().fold(T::zero(), T::max)
    }

    /// `λ = 0`: the vertex rule degenerates to the Kirchhoff constraint `Σ c_j u_j(0) = 0`.
    #[inline]
    pub fn is_kirchhoff(&self) -> bool {
        self.lambda == T::zero()
    }

    pub fn equal_speeds(&self) -> bool {
        self.speeds[0] == self.speeds[1] && self.speeds[1] == self.speeds[2]
    }
}

/// Uniform grid `x_i = i·h`, `i = 0..n`, on the truncated edge `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGrid<T> {
    length: T,
    n_points: usize,
    spacing: T,
}

pub const MIN_GRID_POINTS: usize = 8;

/// Default truncation length: sech-type tails are below `e^{-40}` at the far end.
pub const DEFAULT_LENGTH: f64 = 40.0;
pub const DEFAULT_POINTS: usize = 4001;

pub fn build_grid<T: Real>(length: T, n_points: usize) -> Result<EdgeGrid<T>> {
    if !(length > T::zero()) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grid length must be finite and > 0, got {length}"
        )));
    }
    if n_points < MIN_GRID_POINTS {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least {MIN_GRID_POINTS} points, got {n_points}"
        )));
    }
    let spacing = length / T::from_usize_lossy(n_points - 1);
    Ok(EdgeGrid { length, n_points, spacing })
}

impl<T: Real> EdgeGrid<T> {
    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// The last node is set exactly to `L` so that no rounding creeps into the far end.
    #[inline]
    pub fn node(&self, i: usize) -> T {
        if i + 1 == self.n_points {
            self.length
        } else {
            T::from_usize_lossy(i) * self.spacing
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |i| self.node(i))
    }

    /// Composite trapezoid weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> T {
        if i == 0 || i + 1 == self.n_points {
            self.spacing * T::half()
        } else {
            self.spacing
        }
    }
}

/// A real function on the graph, sampled at the grid nodes of each edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphField<T> {
    grid: EdgeGrid<T>,
    values: [Vec<T>; EDGES],
}

impl<T: Real> GraphField<T> {
    pub fn new(grid: EdgeGrid<T>, values: [Vec<T>; EDGES]) -> Result<Self> {
        for (j, edge) in values.iter().enumerate() {
            if edge.len() != grid.n_points() {
                return Err(Error::Shape(format!(
                    "edge {} has {} samples, grid has {} points",
                    j + 1,
                    edge.len(),
                    grid.n_points()
                )));
            }
            if let Some(i) = edge.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite value on edge {} at node {}",
                    j + 1,
                    i
                )));
            }
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: EdgeGrid<T>) -> Self {
        let n = grid.n_points();
        Self { grid, values: [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]] }
    }

    /// Same profile on every edge.
    pub fn replicated(grid: EdgeGrid<T>, edge: Vec<T>) -> Result<Self> {
        Self::new(grid, [edge.clone(), edge.clone(), edge])
    }

    #[inline]
    pub fn grid(&self) -> &EdgeGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn edge(&self, j: usize) -> &[T] {
        &self.values[j]
    }

    #[inline]
    pub fn edge_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.values[j]
    }

    pub fn values(&self) -> &[Vec<T>; EDGES] {
        &self.values
    }

    pub fn into_values(self) -> [Vec<T>; EDGES] {
        self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grid mismatch: (L={}, n={}) vs (L={}, n={})",
                self.grid.length(),
                self.grid.n_points(),
                other.grid.length(),
                other.grid.n_points()
            )))
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let values = self.values.clone().map(|edge| edge.into_iter().map(&f).collect());
        Self { grid: self.grid, values }
    }

    pub fn scaled(&self, a: T) -> Self {
        self.map(|v| v * a)
    }

    /// `self + a·other`.
    pub fn add_scaled(&self, a: T, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let mut out = self.clone();
        for j in 0..EDGES {
            for (o, &b) in out.values[j].iter_mut().zip(&other.values[j]) {
                *o += a * b;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-T::one(), other)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> T {
        inner_product(self, self).map(T::sqrt).unwrap_or_else(|_| T::nan())
    }

    /// CSV with header `edge_index,x,value`; edges are 1-based, numbers carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "edge_index,x,value")?;
        for (j, edge) in self.values.iter().enumerate() {
            for (i, v) in edge.iter().enumerate() {
                writeln!(out, "{},{:.16e},{:.16e}", j + 1, self.grid.node(i), v)?;
            }
        }
        Ok(())
    }
}

/// Samples `f(edge, x)` exactly at the grid nodes.
pub fn sample<T: Real>(f: impl Fn(usize, T) -> T, grid: &EdgeGrid<T>) -> Result<GraphField<T>> {
    let mut values: [Vec<T>; EDGES] = Default::default();
    for (j, edge) in values.iter_mut().enumerate() {
        *edge = Vec::with_capacity(grid.n_points());
        for (i, x) in grid.nodes().enumerate() {
            let v = f(j, x);
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "sample is not finite on edge {} at node {} (x = {})",
                    j + 1,
                    i,
                    x
                )));
            }
            edge.push(v);
        }
    }
    Ok(GraphField { grid: *grid, values })
}

/// `⟨u, v⟩ = Σ_j ∫ u_j v_j dx` by the composite trapezoid rule.
pub fn inner_product<T: Real>(u: &GraphField<T>, v: &GraphField<T>) -> Result<T> {
    u.check_grid(v)?;
    let grid = u.grid;
    let mut acc = T::zero();
    for j in 0..EDGES {
        let (a, b) = (&u.values[j], &v.values[j]);
        for i in 0..grid.n_points() {
            acc += grid.weight(i) * a[i] * b[i];
        }
    }
    Ok(acc)
}

/// Values and one-sided derivatives of a field at the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexTrace<T> {
    pub values_at_zero: [T; EDGES],
    /// `(−3u₀ + 4u₁ − u₂) / 2h`, second order.
    pub derivatives_at_zero: [T; EDGES],
}

impl<T: Real> VertexTrace<T> {
    pub fn of(u: &GraphField<T>) -> Self {
        let h = u.grid.spacing();
        let mut values_at_zero = [T::zero(); EDGES];
        let mut derivatives_at_zero = [T::zero(); EDGES];
        for j in 0..EDGES {
            let e = &u.values[j];
            values_at_zero[j] = e[0];
            derivatives_at_zero[j] =
                (-T::lit(3.0) * e[0] + T::lit(4.0) * e[1] - e[2]) / (T::two() * h);
        }
        Self { values_at_zero, derivatives_at_zero }
    }
}

/// Residuals of the δ′ vertex rule:
/// `r1 = c₁u′₁ − c₂u′₂`, `r2 = c₂u′₂ − c₃u′₃`, `r3 = Σ c_j u_j − λ c₁ u′₁`, all at `x = 0`.
pub fn bc_residual<T: Real>(u: &GraphField<T>, spec: &YGraphSpec<T>) -> [T; 3] {
    let tr = VertexTrace::of(u);
    let c = spec.speeds();
    let flux: [T; EDGES] = std::array::from_fn(|j| c[j] * tr.derivatives_at_zero[j]);
    let weighted: T = (0..EDGES).map(|j| c[j] * tr.values_at_zero[j]).sum();
    [flux[0] - flux[1], flux[1] - flux[2], weighted - spec.lambda() * flux[0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_rejects_bad_input() {
        assert!(build_grid(1.0, 2).is_err());
        assert!(build_grid(0.0, 100).is_err());
        assert!(build_grid(-1.0, 100).is_err());
        assert!(build_grid(f64::NAN, 100).is_err());
    }

    #[test]
    fn grid_spacing_and_nodes() {
        let g = build_grid(40.0, 4001).unwrap();
        assert_relative_eq!(g.spacing(), 0.01, max_relative = 1e-14);
        assert_relative_eq!(g.node(100), 1.0, max_relative = 1e-14);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(4000), 40.0);
        let g = build_grid(40.0, 8001).unwrap();
        assert_relative_eq!(g.spacing(), 0.005, max_relative = 1e-14);
        let xs: Vec<f64> = g.nodes().collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn spec_validation() {
        assert!(YGraphSpec::new([1.0, 0.0, 1.0], -4.0).is_err());
        assert!(YGraphSpec::new([1.0, -2.0, 1.0], -4.0).is_err());
        let s = YGraphSpec::new([1.0, 2.0, 3.0], 0.0).unwrap();
        assert!(s.is_kirchhoff());
        assert_eq!(s.speed_sum(), 6.0);
        assert_eq!(s.max_speed(), 3.0);
    }

    #[test]
    fn sampling_is_exact_at_nodes() {
        let g = build_grid(1.0, 11).unwrap();
        let f = sample(|_, x| x, &g).unwrap();
        for j in 0..EDGES {
            for (i, x) in g.nodes().enumerate() {
                assert_eq!(f.edge(j)[i], x);
            }
        }
        let z = sample(|_, _| 0.0, &g).unwrap();
        assert_eq!(z, GraphField::zeros(g));
    }

    #[test]
    fn sampling_reports_non_finite() {
        let g = build_grid(1.0, 11).unwrap();
        let err = sample(|j, x| if j == 1 && x > 0.5 { f64::INFINITY } else { 0.0 }, &g).unwrap_err();
        match err {
            Error::Numeric(msg) => assert!(msg.contains("edge 2") && msg.contains("node 6"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inner_product_of_constants() {
        let g = build_grid(40.0, 4001).unwrap();
        let one = sample(|_, _| 1.0, &g).unwrap();
        assert_relative_eq!(inner_product(&one, &one).unwrap(), 120.0, max_relative = 1e-12);
        let zero = GraphField::zeros(g);
        assert_eq!(inner_product(&zero, &one).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = GraphField::zeros(build_grid(40.0, 101).unwrap());
        let b = GraphField::zeros(build_grid(40.0, 201).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn bc_residual_of_zero_and_linearity() {
        let g = build_grid(10.0, 101).unwrap();
        let spec = YGraphSpec::uniform(1.0, -2.0).unwrap();
        assert_eq!(bc_residual(&GraphField::zeros(g), &spec), [0.0; 3]);

        let spec = YGraphSpec::new([0.7, 1.0, 1.3], -2.0).unwrap();
        let u = sample(|j, x: f64| (-(x + j as f64)).exp(), &g).unwrap();
        let r0 = bc_residual(&u, &spec);
        let mut v = u.clone();
        let eps = 1e-3;
        v.edge_mut(0)[0] += eps;
        let r1 = bc_residual(&v, &spec);
        // u_1(0) enters r3 through c_1 u_1(0) and through the stencil -3/(2h) in -λ c_1 u'_1.
        let h = g.spacing();
        let expected = 0.7 * eps - spec.lambda() * 0.7 * (-3.0 * eps / (2.0 * h));
        assert_relative_eq!(r1[2] - r0[2], expected, max_relative = 1e-9);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = build_grid(1.0, 8).unwrap();
        let f = sample(|j, x| j as f64 + x, &g).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "edge_index,x,value");
        assert_eq!(lines.len(), 1 + 3 * 8);
        assert_eq!(lines[1], "1,0.0000000000000000e0,0.0000000000000000e0");
    }
}
