//! Closed-form checks on the linearised operators: kernel vectors at the threshold,
//! quadratic forms, the factorised form of the kink operator and growing-mode rates.

use crate::graph::{inner_product, sample, EdgeGrid, GraphField};
use crate::profiles::{Deriv, FamilyKind, ProfileFamily, Shape};
use crate::spectral::assemble::AssembledOperator;
use crate::spectral::eigen::SpectrumReport;
use crate::{Error, Real, Result, EDGES};

/// The two fields spanning the kernel of the linearisation at a Flat profile.
///
/// Kink: `(φ′₁, −φ′₂, 0)` and `(0, φ′₂, −φ′₃)`.
/// Anti-kink/kink: `(−φ′₁, φ′₂, 0)` and `(−φ′₁, 0, φ′₃)`.
pub fn analytic_kernel_vectors<T: Real>(
    fam: &ProfileFamily<T>,
    grid: &EdgeGrid<T>,
) -> Result<[GraphField<T>; 2]> {
    if fam.shape() != Shape::Flat {
        return Err(Error::OutOfRange(format!(
            "the kernel is trivial away from the threshold; lambda = {} gives a {} profile",
            fam.spec().lambda(),
            fam.shape().name()
        )));
    }
    let d = |j: usize, x: T| fam.eval(j, x, Deriv::First);
    let (a, b): ([T; EDGES], [T; EDGES]) = match fam.kind() {
        FamilyKind::Kink => ([T::one(), -T::one(), T::zero()], [T::zero(), T::one(), -T::one()]),
        FamilyKind::AntikinkKink => ([-T::one(), T::one(), T::zero()], [-T::one(), T::zero(), T::one()]),
    };
    Ok([sample(|j, x| a[j] * d(j, x), grid)?, sample(|j, x| b[j] * d(j, x), grid)?])
}

/// `uᵀ K u`, the discrete quadratic form including the vertex term.
pub fn quadratic_form<T: Real>(op: &AssembledOperator<T>, u: &GraphField<T>) -> Result<T> {
    let x = op.to_dofs(u)?;
    Ok(op.stiffness.quad(&x))
}

/// `uᵀKu / uᵀMu`.
pub fn rayleigh_quotient<T: Real>(op: &AssembledOperator<T>, u: &GraphField<T>) -> Result<T> {
    let x = op.to_dofs(u)?;
    let den = op.mass.quad(&x);
    if !(den > T::zero()) {
        return Err(Error::InvalidArgument("Rayleigh quotient of a zero field".into()));
    }
    Ok(op.stiffness.quad(&x) / den)
}

/// Splits the kink form into `A = Σ∫ c²φ′²[(u/φ′)′]² dx ≥ 0` and the boundary term
/// `P = −Σ c²u(0)²φ″(0)/φ′(0)`.
///
/// `A` uses the midpoint rule per cell with `φ′` evaluated exactly at the midpoint.
pub fn form_decomposition_p<T: Real>(fam: &ProfileFamily<T>, u: &GraphField<T>) -> Result<(T, T)> {
    if fam.kind() != FamilyKind::Kink {
        return Err(Error::InvalidArgument("the factorised form is defined for the kink family".into()));
    }
    let grid = u.grid();
    let h = grid.spacing();
    let mut a = T::zero();
    let mut p = T::zero();
    for j in 0..EDGES {
        let c = fam.spec().speed(j);
        let d1 = |x: T| -> Result<T> {
            let v = fam.eval(j, x, Deriv::First);
            if v == T::zero() || !v.is_finite() {
                Err(Error::Numeric(format!("phi' vanishes on edge {} at x = {x}", j + 1)))
            } else {
                Ok(v)
            }
        };
        let uj = u.edge(j);
        let mut w_prev = uj[0] / d1(T::zero())?;
        for i in 1..grid.n_points() {
            let w = uj[i] / d1(grid.node(i))?;
            let mid = d1(grid.node(i - 1) + h * T::half())?;
            a += h * (c * mid * (w - w_prev) / h).sq();
            w_prev = w;
        }
        let d2 = fam.eval(j, T::zero(), Deriv::Second);
        p -= c * c * uj[0].sq() * d2 / d1(T::zero())?;
    }
    Ok((a, p))
}

/// `⟨𝒲Φ, Φ⟩ = Σ∫ [−sin φ + φ cos φ] φ dx` by the trapezoid rule. Negative for Tail and
/// Flat kinks, where `0 < φ ≤ π`.
pub fn negativity_witness_kink<T: Real>(fam: &ProfileFamily<T>, grid: &EdgeGrid<T>) -> Result<T> {
    if fam.kind() != FamilyKind::Kink {
        return Err(Error::InvalidArgument("negativity witness is defined for the kink family".into()));
    }
    if fam.shape() == Shape::Bump {
        return Err(Error::OutOfRange(format!(
            "negativity witness needs phi <= pi (Tail or Flat kink); lambda = {} gives a Bump",
            fam.spec().lambda()
        )));
    }
    let phi = fam.sample(grid, Deriv::Value)?;
    let integrand = phi.map(witness_integrand);
    inner_product(&integrand, &GraphField::replicated(*grid, vec![T::one(); grid.n_points()])?)
}

/// `[−sin φ + φ cos φ] φ`.
pub fn witness_integrand<T: Real>(phi: T) -> T {
    (-phi.sin() + phi * phi.cos()) * phi
}

/// Linearised growth exponents `μ± = ±√(−ν₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthPrediction<T> {
    Unstable { mu_plus: T, mu_minus: T },
    /// Morse index zero: no real exponent.
    Stable,
}

impl<T: Real> GrowthPrediction<T> {
    pub fn mu_plus(&self) -> Option<T> {
        match *self {
            Self::Unstable { mu_plus, .. } => Some(mu_plus),
            Self::Stable => None,
        }
    }
}

pub fn growing_mode_rate<T: Real>(report: &SpectrumReport<T>) -> GrowthPrediction<T> {
    growth_from_eigenvalue(report.lowest(), report.morse_index)
}

pub fn growth_from_eigenvalue<T: Real>(nu0: T, morse_index: usize) -> GrowthPrediction<T> {
    if morse_index == 0 || nu0 >= T::zero() {
        return GrowthPrediction::Stable;
    }
    let mu = (-nu0).sqrt();
    GrowthPrediction::Unstable { mu_plus: mu, mu_minus: -mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;
    use crate::YGraphSpec;
    use std::f64::consts::PI;

    #[test]
    fn kernel_vectors_need_a_flat_profile() {
        let grid = build_grid(10.0, 101).unwrap();
        let fam = ProfileFamily::kink(YGraphSpec::uniform(1.0, -4.0).unwrap()).unwrap();
        assert!(matches!(analytic_kernel_vectors(&fam, &grid), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn flat_kink_kernel_vector_is_a_sech_pair() {
        let grid = build_grid(10.0, 101).unwrap();
        let fam = ProfileFamily::kink(YGraphSpec::uniform(1.0, -1.5 * PI).unwrap()).unwrap();
        let [psi1, _] = analytic_kernel_vectors(&fam, &grid).unwrap();
        for (i, x) in grid.nodes().enumerate() {
            let s = 2.0 / x.cosh();
            assert!((psi1.edge(0)[i] + s).abs() < 1e-14);
            assert!((psi1.edge(1)[i] - s).abs() < 1e-14);
            assert_eq!(psi1.edge(2)[i], 0.0);
        }
    }

    #[test]
    fn witness_integrand_sign_at_half_pi() {
        let v = witness_integrand(PI / 2.0);
        assert!((v + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn growth_rates() {
        assert_eq!(growth_from_eigenvalue(-1.0, 1), GrowthPrediction::Unstable { mu_plus: 1.0, mu_minus: -1.0 });
        assert_eq!(growth_from_eigenvalue(-0.25, 1).mu_plus(), Some(0.5));
        assert_eq!(growth_from_eigenvalue(0.3, 0), GrowthPrediction::Stable);
    }

    #[test]
    fn decomposition_of_the_fluxon_has_vanishing_a() {
        let grid = build_grid(20.0, 2001).unwrap();
        let fam = ProfileFamily::kink(YGraphSpec::uniform(1.0, -4.0).unwrap()).unwrap();
        let u = fam.sample(&grid, Deriv::First).unwrap();
        let (a, p): (f64, f64) = form_decomposition_p(&fam, &u).unwrap();
        assert!(a.abs() < 1e-20, "A = {a}");
        assert!(p >= 0.0);
    }
}
