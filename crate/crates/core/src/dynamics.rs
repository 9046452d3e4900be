//! Time integration of the sine-Gordon system `u_tt = c_j² u_xx − sin u` on the truncated
//! junction.
//!
//! Space is discretised with lumped-mass P1 elements, so the semi-discrete system is a
//! Hamiltonian ODE with
//!
//! ```text
//! H = ½ Σ m_i v_i² + Σ_cells c_j² (Δu)² / 2h + Σ m_i (1 − cos u_i) + (Σ c_j u_j(0))² / 2λ
//! ```
//!
//! (`m_i = h`, or `h/2` at both ends of an edge). The vertex rule is the natural boundary
//! condition of `H`; at `λ = 0` the linear constraint `Σ c_j u_j(0) = 0` is kept exactly by a
//! Lagrange multiplier. Time stepping is kick–drift–kick leapfrog, which is symplectic and
//! time-reversible. Far nodes are clamped to the background's limits (0 or 2π).

use crate::banded::SymBand;
use crate::graph::{inner_product, EdgeGrid, GraphField, YGraphSpec};
use crate::profiles::{Deriv, ProfileFamily};
use crate::{Error, Real, Result, EDGES};

/// Largest accepted `dt · max c / h`.
pub const MAX_CFL: f64 = 0.9;
/// Default `dt = DEFAULT_CFL · h / max c`.
pub const DEFAULT_CFL: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub u: GraphField<T>,
    pub v: GraphField<T>,
    pub time: T,
}

impl<T: Real> State<T> {
    pub fn new(u: GraphField<T>, v: GraphField<T>) -> Result<Self> {
        if !u.same_grid(&v) {
            return Err(Error::Shape("u and v live on different grids".into()));
        }
        Ok(Self { u, v, time: T::zero() })
    }

    pub fn at_rest(u: GraphField<T>) -> Self {
        let v = GraphField::zeros(*u.grid());
        Self { u, v, time: T::zero() }
    }

    pub fn grid(&self) -> &EdgeGrid<T> {
        self.u.grid()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FarBoundary {
    /// Far nodes hold the background's limit values (0, or 2π on the anti-kink edge).
    #[default]
    ClampToAsymptote,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig<T> {
    pub dt: T,
    pub t_end: T,
    /// Record a snapshot (and an energy row) every this many steps.
    pub record_every: usize,
    pub far_boundary: FarBoundary,
    /// Profile the run is measured against; also fixes the far-node values.
    pub background: Option<ProfileFamily<T>>,
}

impl<T: Real> EvolveConfig<T> {
    /// Default time step `0.4 h / max c`.
    pub fn new(grid: &EdgeGrid<T>, spec: &YGraphSpec<T>, t_end: T) -> Self {
        Self {
            dt: T::lit(DEFAULT_CFL) * grid.spacing() / spec.max_speed(),
            t_end,
            record_every: 1,
            far_boundary: FarBoundary::ClampToAsymptote,
            background: None,
        }
    }

    pub fn with_background(mut self, fam: ProfileFamily<T>) -> Self {
        self.background = Some(fam);
        self
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn far_value(&self, edge: usize) -> T {
        self.background.map_or(T::zero(), |f| f.asymptote(edge))
    }
}

/// Energy split into its parts. At `λ = 0` the vertex term is absent and the constraint
/// violation `|Σ c_j u_j(0)|` is reported instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown<T> {
    pub kinetic: T,
    pub gradient: T,
    pub potential: T,
    pub vertex: T,
    pub constraint_violation: Option<T>,
}

impl<T: Real> EnergyBreakdown<T> {
    pub fn total(&self) -> T {
        self.kinetic + self.gradient + self.potential + self.vertex
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow<T> {
    pub time: T,
    pub energy: T,
    pub vertex_term: T,
    /// `Σ c_j² u_x v` on the last free cell: power flowing towards the clamped end.
    pub boundary_flux_estimate: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyReport<T> {
    pub rows: Vec<EnergyRow<T>>,
}

impl<T: Real> EnergyReport<T> {
    /// `max |H(t) − H(0)| / |H(0)|` (absolute when `H(0) = 0`).
    pub fn relative_drift(&self) -> T {
        let Some(first) = self.rows.first() else { return T::zero() };
        let e0 = first.energy;
        let scale = if e0 == T::zero() { T::one() } else { e0.abs() };
        self.rows.iter().map(|r| (r.energy - e0).abs()).fold(T::zero(), T::max) / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub snapshots: Vec<State<T>>,
    pub energy: EnergyReport<T>,
}

fn lumped_mass<T: Real>(grid: &EdgeGrid<T>, i: usize) -> T {
    if i == 0 || i + 1 == grid.n_points() {
        grid.spacing() * T::half()
    } else {
        grid.spacing()
    }
}

/// Energy of a state, using the same quadrature the integrator conserves.
pub fn energy<T: Real>(s: &State<T>, spec: &YGraphSpec<T>) -> EnergyBreakdown<T> {
    let grid = s.grid();
    let h = grid.spacing();
    let (mut kinetic, mut gradient, mut potential) = (T::zero(), T::zero(), T::zero());
    for j in 0..EDGES {
        let c2 = spec.speed(j).sq();
        let (u, v) = (s.u.edge(j), s.v.edge(j));
        for i in 0..grid.n_points() {
            let m = lumped_mass(grid, i);
            kinetic += T::half() * m * v[i].sq();
            potential += m * (T::one() - u[i].cos());
            if i > 0 {
                gradient += c2 * (u[i] - u[i - 1]).sq() / (T::two() * h);
            }
        }
    }
    let trace = vertex_sum(&s.u, spec);
    let (vertex, constraint_violation) = if spec.is_kirchhoff() {
        (T::zero(), Some(trace.abs()))
    } else {
        (trace.sq() / (T::two() * spec.lambda()), None)
    };
    EnergyBreakdown { kinetic, gradient, potential, vertex, constraint_violation }
}

fn vertex_sum<T: Real>(u: &GraphField<T>, spec: &YGraphSpec<T>) -> T {
    (0..EDGES).map(|j| spec.speed(j) * u.edge(j)[0]).sum()
}

fn boundary_flux<T: Real>(s: &State<T>, spec: &YGraphSpec<T>) -> T {
    let grid = s.grid();
    let n = grid.n_points();
    (0..EDGES)
        .map(|j| {
            let u = s.u.edge(j);
            spec.speed(j).sq() * (u[n - 1] - u[n - 2]) / grid.spacing() * s.v.edge(j)[n - 2]
        })
        .sum()
}

/// Leapfrog stepper with preallocated work arrays.
struct Stepper<'a, T> {
    spec: &'a YGraphSpec<T>,
    grid: EdgeGrid<T>,
    dt: T,
    far: [T; EDGES],
    acc: [Vec<T>; EDGES],
}

impl<'a, T: Real> Stepper<'a, T> {
    fn new(spec: &'a YGraphSpec<T>, cfg: &EvolveConfig<T>, grid: EdgeGrid<T>) -> Result<Self> {
        check_config(cfg, spec, &grid)?;
        Ok(Self {
            spec,
            grid,
            dt: cfg.dt,
            far: std::array::from_fn(|j| cfg.far_value(j)),
            acc: std::array::from_fn(|_| vec![T::zero(); grid.n_points()]),
        })
    }

    fn accelerations(&mut self, u: &GraphField<T>) {
        let n = self.grid.n_points();
        let h = self.grid.spacing();
        let inv_h2 = T::one() / (h * h);
        let trace = vertex_sum(u, self.spec);
        let lambda = self.spec.lambda();
        let kirchhoff = self.spec.is_kirchhoff();
        let m0 = h * T::half();
        let mut force0 = [T::zero(); EDGES];
        for j in 0..EDGES {
            let c = self.spec.speed(j);
            let c2 = c * c;
            let uj = u.edge(j);
            let a = &mut self.acc[j];
            for i in 1..n - 1 {
                a[i] = c2 * (uj[i + 1] - T::two() * uj[i] + uj[i - 1]) * inv_h2 - uj[i].sin();
            }
            a[n - 1] = T::zero();
            let mut f = c2 * (uj[1] - uj[0]) / h - m0 * uj[0].sin();
            if !kirchhoff {
                f -= c * trace / lambda;
            }
            force0[j] = f;
        }
        let mu = if kirchhoff {
            let num: T = (0..EDGES).map(|j| self.spec.speed(j) * force0[j] / m0).sum();
            let den: T = (0..EDGES).map(|j| self.spec.speed(j).sq() / m0).sum();
            num / den
        } else {
            T::zero()
        };
        for j in 0..EDGES {
            self.acc[j][0] = (force0[j] - mu * self.spec.speed(j)) / m0;
        }
    }

    fn kick(&self, v: &mut GraphField<T>, scale: T) {
        for j in 0..EDGES {
            v.edge_mut(j).iter_mut().zip(&self.acc[j]).for_each(|(vi, &ai)| *vi += scale * ai);
        }
    }

    fn step(&mut self, s: &mut State<T>) -> Result<()> {
        let half_dt = self.dt * T::half();
        let n = self.grid.n_points();
        self.accelerations(&s.u);
        self.kick(&mut s.v, half_dt);
        for j in 0..EDGES {
            let v = s.v.edge(j).to_vec();
            let u = s.u.edge_mut(j);
            u.iter_mut().zip(&v).for_each(|(ui, &vi)| *ui += self.dt * vi);
            u[n - 1] = self.far[j];
        }
        self.accelerations(&s.u);
        self.kick(&mut s.v, half_dt);
        for j in 0..EDGES {
            s.v.edge_mut(j)[n - 1] = T::zero();
        }
        s.time += self.dt;
        if !s.u.max_abs().is_finite() || !s.v.max_abs().is_finite() {
            return Err(Error::Numeric(format!("blow-up: non-finite state at t = {}", s.time)));
        }
        Ok(())
    }
}

/// Upper bound for the largest frequency² of the semi-discrete system (Gershgorin on
/// `M⁻¹K` plus the `|cos u| ≤ 1` potential).
pub fn max_frequency_sq<T: Real>(spec: &YGraphSpec<T>, grid: &EdgeGrid<T>) -> T {
    let h = grid.spacing();
    let cmax = spec.max_speed();
    let interior = T::lit(4.0) * cmax * cmax / (h * h);
    let vertex = if spec.is_kirchhoff() {
        T::zero()
    } else {
        let total: T = spec.speeds().iter().map(|c| c.abs()).sum();
        T::two() * cmax * total / (spec.lambda().abs() * h)
    };
    interior.max(T::two() * cmax * cmax / (h * h) * T::two() + vertex) + T::one()
}

fn check_config<T: Real>(cfg: &EvolveConfig<T>, spec: &YGraphSpec<T>, grid: &EdgeGrid<T>) -> Result<()> {
    if !(cfg.dt > T::zero()) || !cfg.dt.is_finite() {
        return Err(Error::Configuration(format!("dt must be positive, got {}", cfg.dt)));
    }
    if cfg.record_every == 0 {
        return Err(Error::Configuration("record_every must be at least 1".into()));
    }
    let cfl = cfg.dt * spec.max_speed() / grid.spacing();
    if cfl > T::lit(MAX_CFL) {
        return Err(Error::Configuration(format!(
            "CFL number dt*max(c)/h = {cfl} exceeds {MAX_CFL}; reduce dt below {}",
            T::lit(MAX_CFL) * grid.spacing() / spec.max_speed()
        )));
    }
    let limit = T::two() / max_frequency_sq(spec, grid).sqrt();
    if cfg.dt >= limit {
        return Err(Error::Configuration(format!(
            "dt = {} is above the leapfrog stability limit {limit} set by the vertex coupling (lambda = {})",
            cfg.dt,
            spec.lambda()
        )));
    }
    Ok(())
}

/// One kick–drift–kick step.
pub fn step<T: Real>(s: &State<T>, cfg: &EvolveConfig<T>, spec: &YGraphSpec<T>) -> Result<State<T>> {
    let mut stepper = Stepper::new(spec, cfg, *s.grid())?;
    let mut next = s.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

fn energy_row<T: Real>(s: &State<T>, spec: &YGraphSpec<T>) -> EnergyRow<T> {
    let e = energy(s, spec);
    EnergyRow { time: s.time, energy: e.total(), vertex_term: e.vertex, boundary_flux_estimate: boundary_flux(s, spec) }
}

/// Steps from `s0.time` to `t_end` in `round((t_end − t0)/dt)` steps, recording the initial
/// state, every `record_every`-th state and the final one.
pub fn evolve<T: Real>(s0: &State<T>, cfg: &EvolveConfig<T>, spec: &YGraphSpec<T>) -> Result<Trajectory<T>> {
    evolve_until(s0, cfg, spec, |_| false)
}

/// Like [`evolve`], but stops after the first recorded state for which `stop` returns true.
pub fn evolve_until<T: Real>(
    s0: &State<T>,
    cfg: &EvolveConfig<T>,
    spec: &YGraphSpec<T>,
    mut stop: impl FnMut(&State<T>) -> bool,
) -> Result<Trajectory<T>> {
    let mut stepper = Stepper::new(spec, cfg, *s0.grid())?;
    let steps = ((cfg.t_end - s0.time) / cfg.dt).round().to_usize().unwrap_or(0);
    let mut s = s0.clone();
    let mut snapshots = vec![s.clone()];
    let mut rows = vec![energy_row(&s, spec)];
    for k in 1..=steps {
        stepper.step(&mut s)?;
        if k % cfg.record_every == 0 || k == steps {
            rows.push(energy_row(&s, spec));
            snapshots.push(s.clone());
            if stop(&s) {
                break;
            }
        }
    }
    Ok(Trajectory { snapshots, energy: EnergyReport { rows } })
}

/// Index layout for the Newton Hessian: `3i + j` for `i < n − 1`; with the Kirchhoff
/// constraint a multiplier is inserted right after the three vertex nodes.
struct NewtonLayout {
    kirchhoff: bool,
    n_inner: usize,
}

impl NewtonLayout {
    fn node(&self, edge: usize, i: usize) -> usize {
        let base = EDGES * i + edge;
        if self.kirchhoff && i > 0 {
            base + 1
        } else {
            base
        }
    }

    fn multiplier(&self) -> usize {
        EDGES
    }

    fn dim(&self) -> usize {
        EDGES * self.n_inner + usize::from(self.kirchhoff)
    }

    fn bandwidth(&self) -> usize {
        EDGES + usize::from(self.kirchhoff)
    }
}

/// Stationary point of the discrete energy near the sampled profile, by Newton's method.
///
/// The result is the state the integrator keeps at rest (to rounding); it differs from the
/// sampled closed form by `O(h²)`.
pub fn discrete_equilibrium<T: Real>(fam: &ProfileFamily<T>, grid: &EdgeGrid<T>) -> Result<GraphField<T>> {
    let spec = *fam.spec();
    let mut u = fam.sample(grid, Deriv::Value)?;
    let n = grid.n_points();
    let h = grid.spacing();
    for j in 0..EDGES {
        u.edge_mut(j)[n - 1] = fam.asymptote(j);
    }
    let layout = NewtonLayout { kirchhoff: spec.is_kirchhoff(), n_inner: n - 1 };
    let mut multiplier = T::zero();
    // Gradient entries are differences of terms of size c²|u|/h; stop at their rounding level.
    let tol = T::lit(64.0) * T::epsilon() * spec.max_speed().sq() / h * T::TAU().max(u.max_abs());
    for _ in 0..50 {
        // residual = gradient of the potential energy (+ multiplier term)
        let mut rhs = vec![T::zero(); layout.dim()];
        let mut hess = SymBand::zeros(layout.dim(), layout.bandwidth());
        let trace = vertex_sum(&u, &spec);
        for j in 0..EDGES {
            let c = spec.speed(j);
            let k = c * c / h;
            let uj = u.edge(j);
            for i in 0..n - 1 {
                let m = lumped_mass(grid, i);
                let r = layout.node(j, i);
                rhs[r] += m * uj[i].sin();
                hess.add(r, r, m * uj[i].cos());
                // cell (i, i+1)
                let diff = uj[i + 1] - uj[i];
                rhs[r] -= k * diff;
                hess.add(r, r, k);
                if i + 1 < n - 1 {
                    let r1 = layout.node(j, i + 1);
                    rhs[r1] += k * diff;
                    hess.add(r1, r1, k);
                    hess.add(r1, r, -k);
                }
            }
            let r0 = layout.node(j, 0);
            if layout.kirchhoff {
                rhs[r0] += multiplier * c;
                hess.add(layout.multiplier(), r0, c);
            } else {
                rhs[r0] += c * trace / spec.lambda();
                for l in 0..=j {
                    hess.add(r0, layout.node(l, 0), c * spec.speed(l) / spec.lambda());
                }
            }
        }
        if layout.kirchhoff {
            rhs[layout.multiplier()] = trace;
        }
        let norm = rhs.iter().map(|v| v.abs()).fold(T::zero(), T::max);
        if norm <= tol {
            return Ok(u);
        }
        let delta = hess.ldlt()?.solve(&rhs);
        for j in 0..EDGES {
            let uj = u.edge_mut(j);
            for (i, ui) in uj.iter_mut().enumerate().take(n - 1) {
                *ui -= delta[layout.node(j, i)];
            }
        }
        if layout.kirchhoff {
            multiplier -= delta[layout.multiplier()];
        }
        if !u.max_abs().is_finite() {
            break;
        }
    }
    Err(Error::Numeric("Newton iteration for the discrete equilibrium did not converge".into()))
}

/// Initial data `(Φ + εψ, εμψ)` that excites the growing mode `e^{μt}ψ` of the linearisation.
pub fn seed_mode<T: Real>(background: &GraphField<T>, mode: &GraphField<T>, eps: T, mu: T) -> Result<State<T>> {
    let u = background.add_scaled(eps, mode)?;
    let v = mode.scaled(eps * mu);
    State::new(u, v)
}

/// `‖u(t) − Φ‖` in the discrete `L²` norm of the junction.
pub fn deviation_norm<T: Real>(s: &State<T>, background: &GraphField<T>) -> Result<T> {
    let d = s.u.sub(background)?;
    Ok(inner_product(&d, &d)?.sqrt())
}

/// Fitted exponential growth, or the evidence that none was found.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthFit<T> {
    Exponential { sigma: T, window: (T, T), r_squared: T, points: usize },
    /// The deviation never passed through `[10ε, 1e−2]` long enough to fit.
    NoWindow { max_ratio: T },
}

impl<T: Real> GrowthFit<T> {
    pub fn sigma(&self) -> Option<T> {
        match self {
            Self::Exponential { sigma, .. } => Some(*sigma),
            Self::NoWindow { .. } => None,
        }
    }
}

/// Upper edge of the linear-growth window.
pub const GROWTH_WINDOW_TOP: f64 = 1e-2;
const MIN_FIT_POINTS: usize = 8;

/// Least-squares slope of `log ‖u − Φ‖` over the first stretch of snapshots with
/// `10ε ≤ ‖u − Φ‖ ≤ 1e−2`.
pub fn growth_rate<T: Real>(snapshots: &[State<T>], background: &GraphField<T>, eps: T) -> Result<GrowthFit<T>> {
    let lo = T::lit(10.0) * eps;
    let hi = T::lit(GROWTH_WINDOW_TOP);
    let norms: Vec<(T, T)> = snapshots
        .iter()
        .map(|s| deviation_norm(s, background).map(|d| (s.time, d)))
        .collect::<Result<_>>()?;
    let first = norms.iter().position(|&(_, d)| d >= lo && d <= hi);
    let pts: Vec<(T, T)> = match first {
        Some(start) => norms[start..].iter().take_while(|&&(_, d)| d >= lo && d <= hi).copied().collect(),
        None => Vec::new(),
    };
    let max_ratio = norms.iter().map(|&(_, d)| d).fold(T::zero(), T::max) / eps;
    if pts.len() < MIN_FIT_POINTS {
        return Ok(GrowthFit::NoWindow { max_ratio });
    }
    let m = T::from_usize_lossy(pts.len());
    let tbar = pts.iter().map(|p| p.0).sum::<T>() / m;
    let ybar = pts.iter().map(|p| p.1.ln()).sum::<T>() / m;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(t, d) in &pts {
        let (dx, dy) = (t - tbar, d.ln() - ybar);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let sigma = sxy / sxx;
    let r_squared = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    Ok(GrowthFit::Exponential {
        sigma,
        window: (pts[0].0, pts[pts.len() - 1].0),
        r_squared,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;

    fn spec(lambda: f64) -> YGraphSpec<f64> {
        YGraphSpec::uniform(1.0, lambda).unwrap()
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let grid = build_grid(10.0f64, 201).unwrap();
        let sp = spec(2.0);
        let s = State::at_rest(GraphField::zeros(grid));
        let cfg = EvolveConfig::new(&grid, &sp, 1.0);
        let traj = evolve(&s, &cfg, &sp).unwrap();
        let last = traj.snapshots.last().unwrap();
        assert_eq!(last.u.max_abs(), 0.0);
        assert_eq!(last.v.max_abs(), 0.0);
        assert!(traj.energy.rows.iter().all(|r| r.energy == 0.0));
    }

    #[test]
    fn cfl_violation_is_a_configuration_error() {
        let grid = build_grid(10.0f64, 201).unwrap();
        let sp = spec(2.0);
        let cfg = EvolveConfig::new(&grid, &sp, 1.0).with_dt(0.05);
        let s = State::at_rest(GraphField::zeros(grid));
        assert!(matches!(step(&s, &cfg, &sp), Err(Error::Configuration(_))));
    }

    #[test]
    fn kinetic_energy_scales_quadratically() {
        let grid = build_grid(10.0f64, 201).unwrap();
        let sp = spec(-4.0);
        let v = crate::graph::sample(|_, x: f64| (-x * x).exp(), &grid).unwrap();
        let s1 = State::new(GraphField::zeros(grid), v.clone()).unwrap();
        let s2 = State::new(GraphField::zeros(grid), v.scaled(2.0)).unwrap();
        let (e1, e2) = (energy(&s1, &sp), energy(&s2, &sp));
        assert!((e2.kinetic - 4.0 * e1.kinetic).abs() < 1e-14);
    }

    #[test]
    fn kirchhoff_constraint_is_preserved() {
        let grid = build_grid(10.0f64, 201).unwrap();
        let sp = YGraphSpec::new([1.0, 1.5, 0.8], 0.0).unwrap();
        let u = crate::graph::sample(|j, x: f64| [0.3, -0.1, -0.1875][j] * (-x * x).exp(), &grid).unwrap();
        assert!(vertex_sum(&u, &sp).abs() < 1e-15);
        let cfg = EvolveConfig::new(&grid, &sp, 2.0);
        let traj = evolve(&State::at_rest(u), &cfg, &sp).unwrap();
        for s in &traj.snapshots {
            assert!(vertex_sum(&s.u, &sp).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_fit_recovers_an_exact_exponential() {
        let grid = build_grid(4.0f64, 41).unwrap();
        let bg = GraphField::zeros(grid);
        let one = GraphField::replicated(grid, vec![1.0; 41]).unwrap();
        let unit = one.scaled(1.0 / inner_product(&one, &one).unwrap().sqrt());
        let snaps: Vec<State<f64>> = (0..200)
            .map(|k| {
                let t = k as f64 * 0.1;
                State { u: unit.scaled(1e-6 * (0.7 * t).exp()), v: GraphField::zeros(grid), time: t }
            })
            .collect();
        match growth_rate(&snaps, &bg, 1e-6).unwrap() {
            GrowthFit::Exponential { sigma, r_squared, .. } => {
                assert!((sigma - 0.7).abs() < 1e-10);
                assert!(r_squared > 0.999_999);
            }
            other => panic!("{other:?}"),
        }
    }
}
