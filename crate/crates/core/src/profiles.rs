//! Closed-form stationary solutions of `−c_j² φ″_j + sin φ_j = 0` that satisfy the δ′ vertex rule.
//!
//! Two families are supported, both in the class where `shift_j / c_j` is the same on every edge:
//!
//! * **kink**: `φ_j(x) = 4 arctan(e^{−(x − b_j)/c_j})`, decaying to 0 on every edge. The
//!   vertex rule reduces to `g(y) = (1 + y²) arctan(y) / y = −λ / Σc_j` with `y = e^{b₁/c₁}`,
//!   which has a (unique) positive root only for `λ < −Σc_j`.
//! * **anti-kink/kink**: `φ₁(x) = 4 arctan(e^{(x − a₁)/c₁})` rising to 2π and
//!   `φ_j(x) = 4 arctan(e^{(x − a_j)/c_j}) − 2π` (j = 2, 3) rising to 0. With `y = e^{−a₁/c₁}`
//!   the vertex rule reads `F(y) = (1 + y²)/y · [Σc_j arctan(y) − (c₂ + c₃)π/2] = λ`, and
//!   `F` maps `(0, ∞)` increasingly onto ℝ.

use crate::graph::{sample, EdgeGrid, GraphField, YGraphSpec};
use crate::{Error, Real, Result, EDGES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Kink,
    AntikinkKink,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Kink => "kink",
            FamilyKind::AntikinkKink => "antikink",
        }
    }
}

/// Profile shape near the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Inflection point inside the edges; the profile overshoots π at the vertex side.
    Bump,
    /// Only the monotone tail of the soliton is visible on the edges.
    Tail,
    /// Inflection exactly at the vertex (`shift = 0`), the threshold value of `λ`.
    Flat,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Bump => "bump",
            Shape::Tail => "tail",
            Shape::Flat => "flat",
        }
    }
}

/// Which derivative of a profile to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deriv {
    Value,
    First,
    Second,
}

/// Tolerance used to decide that `λ` sits on a threshold value.
pub const THRESHOLD_TOL: f64 = 1e-12;

/// Residual tolerance of the shift equations in `f64`.
pub const SHIFT_TOL: f64 = 1e-12;

/// `g(y) = (1 + y²) arctan(y) / y`, strictly increasing from 1 (at 0⁺) to ∞.
pub fn kink_shift_function<T: Real>(y: T) -> T {
    (T::one() + y * y) * y.atan() / y
}

/// `F(y) = (1 + y²)/y · [Σc_j arctan(y) − (c₂ + c₃)π/2]`.
pub fn antikink_shift_function<T: Real>(speeds: [T; EDGES], y: T) -> T {
    let sum: T = speeds.iter().copied().sum();
    (T::one() + y * y) / y * (sum * y.atan() - (speeds[1] + speeds[2]) * T::FRAC_PI_2())
}

/// `λ` at which the kink has `b_j = 0`: `−(π/2) Σ c_j`.
pub fn kink_threshold<T: Real>(spec: &YGraphSpec<T>) -> T {
    -T::FRAC_PI_2() * spec.speed_sum()
}

/// `λ` at which the anti-kink/kink has `a_j = 0`: `−(π/2)(c₂ + c₃ − c₁)`.
pub fn antikink_threshold<T: Real>(spec: &YGraphSpec<T>) -> T {
    let c = spec.speeds();
    -T::FRAC_PI_2() * (c[1] + c[2] - c[0])
}

fn shift_tolerance<T: Real>(target: T) -> T {
    T::lit(SHIFT_TOL).max(T::lit(16.0) * T::epsilon() * (T::one() + target.abs()))
}

/// Positive root of an increasing `f(y) = target`: geometric bracketing from `y = 1`,
/// bisection in `ln y`, then secant polishing.
fn solve_increasing<T: Real>(f: impl Fn(T) -> T, target: T) -> Result<T> {
    let tol = shift_tolerance(target);
    let residual = |y: T| f(y) - target;
    let two = T::two();

    let (mut lo, mut hi) = (T::one(), T::one());
    if residual(T::one()) < T::zero() {
        while residual(hi) < T::zero() {
            lo = hi;
            hi *= two;
            if !hi.is_finite() {
                return Err(Error::Numeric(format!("no upper bracket for shift root (target {target})")));
            }
        }
    } else {
        while residual(lo) > T::zero() {
            hi = lo;
            lo /= two;
            if lo == T::zero() {
                return Err(Error::Numeric(format!("no lower bracket for shift root (target {target})")));
            }
        }
    }

    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let (rlo, rhi) = (residual(lo), residual(hi));
    let mut best = if rlo.abs() <= rhi.abs() { lo } else { hi };
    if rhi != rlo {
        let secant = lo - rlo * (hi - lo) / (rhi - rlo);
        if secant > lo && secant < hi && residual(secant).abs() < residual(best).abs() {
            best = secant;
        }
    }
    let r = residual(best);
    if r.abs() > tol {
        return Err(Error::Numeric(format!(
            "shift root residual {r:e} exceeds tolerance {tol:e}"
        )));
    }
    Ok(best)
}

/// Shift `b₁ = c₁ ln y*` of the kink family; `b_j = (c_j / c₁) b₁`.
pub fn kink_shift<T: Real>(spec: &YGraphSpec<T>) -> Result<T> {
    let sum = spec.speed_sum();
    let lambda = spec.lambda();
    if !(lambda < -sum) {
        return Err(Error::OutOfRange(format!(
            "kink profiles exist only for lambda in (-inf, -(c1+c2+c3)) = (-inf, {}), got {}",
            -sum, lambda
        )));
    }
    let y = solve_increasing(kink_shift_function, -lambda / sum)?;
    Ok(spec.speed(0) * y.ln())
}

/// Shift `a₁ = −c₁ ln y*` of the anti-kink/kink family; `a_j = (c_j / c₁) a₁`.
pub fn antikink_shift<T: Real>(spec: &YGraphSpec<T>) -> Result<T> {
    let speeds = spec.speeds();
    let y = solve_increasing(|y| antikink_shift_function(speeds, y), spec.lambda())?;
    Ok(-spec.speed(0) * y.ln())
}

fn near<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(THRESHOLD_TOL)
}

pub fn classify_kink<T: Real>(spec: &YGraphSpec<T>) -> Result<Shape> {
    let lambda = spec.lambda();
    if !(lambda < -spec.speed_sum()) {
        return Err(Error::OutOfRange(format!(
            "kink profiles exist only for lambda < {}, got {}",
            -spec.speed_sum(),
            lambda
        )));
    }
    let threshold = kink_threshold(spec);
    Ok(if near(lambda, threshold) {
        Shape::Flat
    } else if lambda < threshold {
        Shape::Bump
    } else {
        Shape::Tail
    })
}

pub fn classify_antikink<T: Real>(spec: &YGraphSpec<T>) -> Shape {
    let lambda = spec.lambda();
    let threshold = antikink_threshold(spec);
    if near(lambda, threshold) {
        Shape::Flat
    } else if lambda < threshold {
        Shape::Bump
    } else {
        Shape::Tail
    }
}

/// A stationary solution together with the data that determines it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFamily<T> {
    kind: FamilyKind,
    spec: YGraphSpec<T>,
    shifts: [T; EDGES],
    shape: Shape,
}

impl<T: Real> ProfileFamily<T> {
    pub fn kink(spec: YGraphSpec<T>) -> Result<Self> {
        let shape = classify_kink(&spec)?;
        let b1 = kink_shift(&spec)?;
        // At the threshold the root is y = 1 up to rounding; pin the shift to the exact value.
        let b1 = if shape == Shape::Flat { T::zero() } else { b1 };
        let c = spec.speeds();
        let shifts = std::array::from_fn(|j| c[j] / c[0] * b1);
        Ok(Self { kind: FamilyKind::Kink, spec, shifts, shape })
    }

    pub fn antikink(spec: YGraphSpec<T>) -> Result<Self> {
        let shape = classify_antikink(&spec);
        let a1 = antikink_shift(&spec)?;
        let a1 = if shape == Shape::Flat { T::zero() } else { a1 };
        let c = spec.speeds();
        let shifts = std::array::from_fn(|j| c[j] / c[0] * a1);
        Ok(Self { kind: FamilyKind::AntikinkKink, spec, shifts, shape })
    }

    pub fn new(kind: FamilyKind, spec: YGraphSpec<T>) -> Result<Self> {
        match kind {
            FamilyKind::Kink => Self::kink(spec),
            FamilyKind::AntikinkKink => Self::antikink(spec),
        }
    }

    #[inline]
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    #[inline]
    pub fn spec(&self) -> &YGraphSpec<T> {
        &self.spec
    }

    #[inline]
    pub fn shifts(&self) -> [T; EDGES] {
        self.shifts
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    fn z(&self, edge: usize, x: T) -> T {
        (x - self.shifts[edge]) / self.spec.speed(edge)
    }

    /// `φ_j(x)` or one of its first two derivatives.
    pub fn eval(&self, edge: usize, x: T, order: Deriv) -> T {
        let c = self.spec.speed(edge);
        let z = self.z(edge, x);
        let four = T::lit(4.0);
        match (self.kind, order) {
            (FamilyKind::Kink, Deriv::Value) => four * (-z).exp().atan(),
            (FamilyKind::Kink, Deriv::First) => -T::two() / c * z.sech(),
            (FamilyKind::Kink, Deriv::Second) => T::two() / (c * c) * z.sech() * z.tanh(),
            (FamilyKind::AntikinkKink, Deriv::Value) => {
                let v = four * z.exp().atan();
                if edge == 0 {
                    v
                } else {
                    v - T::TAU()
                }
            }
            (FamilyKind::AntikinkKink, Deriv::First) => T::two() / c * z.sech(),
            (FamilyKind::AntikinkKink, Deriv::Second) => -T::two() / (c * c) * z.sech() * z.tanh(),
        }
    }

    /// `cos φ_j(x) = 1 − 2 sech²z`, evaluated without forming `φ`.
    pub fn cos_phi(&self, edge: usize, x: T) -> T {
        T::one() - T::two() * self.z(edge, x).sech().sq()
    }

    /// `sin φ_j(x)`; equals `c_j² φ″_j(x)` on a stationary solution.
    pub fn sin_phi(&self, edge: usize, x: T) -> T {
        let z = self.z(edge, x);
        let s = T::two() * z.sech() * z.tanh();
        match self.kind {
            FamilyKind::Kink => s,
            FamilyKind::AntikinkKink => -s,
        }
    }

    /// `lim_{x→∞} φ_j(x)`.
    pub fn asymptote(&self, edge: usize) -> T {
        match (self.kind, edge) {
            (FamilyKind::AntikinkKink, 0) => T::TAU(),
            _ => T::zero(),
        }
    }

    pub fn sample(&self, grid: &EdgeGrid<T>, order: Deriv) -> Result<GraphField<T>> {
        sample(|j, x| self.eval(j, x, order), grid)
    }

    pub fn sample_cos(&self, grid: &EdgeGrid<T>) -> Result<GraphField<T>> {
        sample(|j, x| self.cos_phi(j, x), grid)
    }

    /// Residual of the vertex rule from the analytic traces:
    /// `[c₁φ′₁ − c₂φ′₂, c₂φ′₂ − c₃φ′₃, Σc_jφ_j − λc₁φ′₁]` at `x = 0`.
    pub fn analytic_vertex_residual(&self) -> [T; 3] {
        let c = self.spec.speeds();
        let flux: [T; EDGES] = std::array::from_fn(|j| c[j] * self.eval(j, T::zero(), Deriv::First));
        let weighted: T = (0..EDGES).map(|j| c[j] * self.eval(j, T::zero(), Deriv::Value)).sum();
        [flux[0] - flux[1], flux[1] - flux[2], weighted - self.spec.lambda() * flux[0]]
    }
}
