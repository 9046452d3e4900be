//! Lowest generalized eigenpairs of `K v = ν M v` for banded `K`, `M`.
//!
//! Eigenvalues are bracketed with Sturm counts (negative pivots of `LDLᵀ(K − σM)`) and
//! bisected; eigenvectors come from shift-invert iteration at the located value, with
//! deflation against already converged vectors and Rayleigh–Ritz inside clusters.
//! Start vectors are fixed, so results are reproducible bit for bit.

use crate::banded::{dot, Ldlt, SymBand};
use crate::graph::GraphField;
use crate::spectral::assemble::AssembledOperator;
use crate::{Error, Real, Result};

/// Default `kernel_tol = max(5e−3, 10 h²)`.
pub fn default_kernel_tol<T: Real>(h: T) -> T {
    T::lit(5e-3).max(T::lit(10.0) * h * h)
}

/// Eigenvectors keeping at least this share of their mass on `x > L/2` are counted as
/// discretised continuum (box) modes.
pub const CONTINUUM_FAR_FRACTION: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct SpectrumReport<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Eigenvectors as fields; normalised to unit `L²(𝒴)` mass-norm.
    pub eigenvectors: Vec<GraphField<T>>,
    /// Same vectors in the operator's unknowns, `M`-orthonormal.
    pub dof_vectors: Vec<Vec<T>>,
    /// `‖K v − ν M v‖₂` per pair.
    pub residuals: Vec<T>,
    /// Normwise backward error `‖K v − ν M v‖₂ / ((‖K‖ + |ν| ‖M‖) ‖v‖₂)` per pair.
    pub backward_errors: Vec<T>,
    pub morse_index: usize,
    pub kernel_dim: usize,
    pub continuum_floor_estimate: Option<T>,
    pub kernel_tol: T,
    pub restricted: bool,
}

impl<T: Real> SpectrumReport<T> {
    pub fn lowest(&self) -> T {
        self.eigenvalues[0]
    }
}

fn factor_shifted<T: Real>(k: &SymBand<T>, m: &SymBand<T>, sigma: T) -> Result<(Ldlt<T>, T)> {
    let mut s = sigma;
    for attempt in 0..=3 {
        match k.shifted(s, m).ldlt() {
            Ok(f) => return Ok((f, s)),
            Err(_) if attempt < 3 => {
                let bump = T::lit(1e-10) * T::one().max(s.abs()) * T::from_usize_lossy(attempt + 1);
                s = sigma + bump;
            }
            Err(e) => {
                return Err(Error::Numeric(format!(
                    "factorisation of K - sigma M failed near sigma = {sigma} after 3 shift perturbations: {e}"
                )))
            }
        }
    }
    unreachable!()
}

/// Number of generalized eigenvalues strictly below `sigma`.
pub fn count_below<T: Real>(op: &AssembledOperator<T>, sigma: T) -> Result<usize> {
    factor_shifted(&op.stiffness, &op.mass, sigma).map(|(f, _)| f.inertia().negative)
}

fn bracket<T: Real>(op: &AssembledOperator<T>, k: usize) -> Result<(T, T)> {
    let mut lo = -T::one();
    let mut guard = 0;
    while count_below(op, lo)? > 0 {
        lo *= T::lit(4.0);
        guard += 1;
        if guard > 200 {
            return Err(Error::Numeric("could not find a lower bound for the spectrum".into()));
        }
    }
    let mut hi = T::one();
    guard = 0;
    while count_below(op, hi)? < k {
        hi *= T::two();
        guard += 1;
        if guard > 200 {
            return Err(Error::Numeric(format!("could not bracket {k} eigenvalues")));
        }
    }
    Ok((lo, hi))
}

/// Bisection for the `k` lowest eigenvalues (with multiplicity).
fn bisect_eigenvalues<T: Real>(op: &AssembledOperator<T>, k: usize) -> Result<Vec<T>> {
    let (mut lo, hi) = bracket(op, k)?;
    let rel = T::lit(1e-12);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let idx = out.len();
        // invariant: count(a) <= idx < count(b)
        let (mut a, mut b) = (lo, hi);
        let mut count_b = usize::MAX;
        for _ in 0..200 {
            let width = b - a;
            if width <= rel * T::one().max(a.abs().max(b.abs())) {
                break;
            }
            let mid = a + width * T::half();
            if mid <= a || mid >= b {
                break;
            }
            let c = count_below(op, mid)?;
            if c <= idx {
                a = mid;
            } else {
                b = mid;
                count_b = c;
            }
        }
        let value = a + (b - a) * T::half();
        // `count_b - idx` eigenvalues sit in (a, b); record them all at once.
        let mult = if count_b == usize::MAX { 1 } else { (count_b - idx).max(1) };
        for _ in 0..mult.min(k - idx) {
            out.push(value);
        }
        lo = a;
    }
    Ok(out)
}

/// Classical Jacobi for a small dense symmetric matrix. Returns ascending eigenvalues and
/// column eigenvectors.
pub(crate) fn jacobi_eigen<T: Real>(mut a: Vec<Vec<T>>) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.len();
    let mut v: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].sq()).sum();
        let diag: T = (0..n).map(|i| a[i][i].sq()).sum();
        if off <= T::epsilon().sq() * diag.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::two() * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for r in 0..n {
                    let (vrp, vrq) = (v[r][p], v[r][q]);
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|r| v[r][i]).collect()).collect();
    (values, vectors)
}

/// M-orthogonalise `x` against `basis` (assumed M-orthonormal), twice for stability.
fn m_orthogonalize<T: Real>(m: &SymBand<T>, x: &mut [T], basis: &[Vec<T>], mbasis: &[Vec<T>]) {
    for _ in 0..2 {
        for (b, mb) in basis.iter().zip(mbasis) {
            let coef = dot(x, mb);
            for (xi, &bi) in x.iter_mut().zip(b) {
                *xi -= coef * bi;
            }
        }
    }
    let _ = m;
}

fn m_normalize<T: Real>(m: &SymBand<T>, x: &mut [T]) -> Result<Vec<T>> {
    let mx = m.matvec(x);
    let nrm = dot(x, &mx).sqrt();
    if !(nrm > T::zero()) || !nrm.is_finite() {
        return Err(Error::Numeric("inverse iteration collapsed to a zero vector".into()));
    }
    x.iter_mut().for_each(|v| *v /= nrm);
    Ok(mx.into_iter().map(|v| v / nrm).collect())
}

fn start_vector<T: Real>(n: usize, seed: usize) -> Vec<T> {
    let f = T::lit(0.618_033_988_749_894_9) * T::from_usize_lossy(seed + 1);
    (0..n)
        .map(|i| {
            let t = T::from_usize_lossy(i + 1);
            (t * f).sin() + T::lit(0.5) * (t * f * T::lit(0.37)).cos()
        })
        .collect()
}

fn residual_norm<T: Real>(op: &AssembledOperator<T>, x: &[T], nu: T) -> T {
    let kx = op.stiffness.matvec(x);
    let mx = op.mass.matvec(x);
    kx.iter().zip(&mx).map(|(&a, &b)| (a - nu * b).sq()).sum::<T>().sqrt()
}

fn backward_error<T: Real>(op: &AssembledOperator<T>, x: &[T], nu: T, knorm: T, mnorm: T) -> T {
    let xnorm = dot(x, x).sqrt();
    residual_norm(op, x, nu) / ((knorm + nu.abs() * mnorm) * xnorm)
}

/// The `k` smallest eigenpairs, with the default kernel tolerance.
pub fn lowest_eigenpairs<T: Real>(op: &AssembledOperator<T>, k: usize) -> Result<SpectrumReport<T>> {
    lowest_eigenpairs_with_tol(op, k, default_kernel_tol(op.grid().spacing()))
}

pub fn lowest_eigenpairs_with_tol<T: Real>(
    op: &AssembledOperator<T>,
    k: usize,
    kernel_tol: T,
) -> Result<SpectrumReport<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let n = op.dim();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the problem size {n}")));
    }
    op.mass.ldlt().ok().filter(|f| f.inertia().negative == 0).ok_or_else(|| {
        Error::Numeric("mass matrix is not positive definite".into())
    })?;

    let estimates = bisect_eigenvalues(op, k)?;
    let (knorm, mnorm) = (op.stiffness.norm_inf(), op.mass.norm_inf());

    // Group numerically coincident estimates into clusters.
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let cluster_tol = T::lit(1e-8);
    let mut start = 0;
    for i in 1..=k {
        let split = i == k
            || (estimates[i] - estimates[i - 1]).abs() > cluster_tol * T::one().max(estimates[i].abs());
        if split {
            clusters.push((start, i));
            start = i;
        }
    }

    let mut vectors: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut mvectors: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut values: Vec<T> = Vec::with_capacity(k);

    for &(a, b) in &clusters {
        let m = b - a;
        let center = estimates[a..b].iter().copied().sum::<T>() / T::from_usize_lossy(m);
        let offset = T::lit(1e-9) * T::one().max(center.abs());
        let (fact, _) = factor_shifted(&op.stiffness, &op.mass, center + offset)?;

        let mut block: Vec<Vec<T>> = (0..m).map(|s| start_vector(n, a + s)).collect();
        let mut theta = vec![T::zero(); m];
        for iter in 0..40 {
            // shift-invert step with deflation
            let mut mblock = Vec::with_capacity(m);
            let mut next = Vec::with_capacity(m);
            for x in &block {
                let mx = op.mass.matvec(x);
                let mut y = fact.solve(&mx);
                m_orthogonalize(&op.mass, &mut y, &vectors, &mvectors);
                m_orthogonalize(&op.mass, &mut y, &next, &mblock);
                let my = m_normalize(&op.mass, &mut y)?;
                next.push(y);
                mblock.push(my);
            }
            // Rayleigh–Ritz inside the block (block is M-orthonormal).
            let kb: Vec<Vec<T>> = next.iter().map(|x| op.stiffness.matvec(x)).collect();
            let h: Vec<Vec<T>> = (0..m).map(|i| (0..m).map(|j| dot(&next[i], &kb[j])).collect()).collect();
            let h = (0..m).map(|i| (0..m).map(|j| (h[i][j] + h[j][i]) * T::half()).collect()).collect();
            let (ritz, rot) = jacobi_eigen(h);
            block = (0..m)
                .map(|c| {
                    let mut v = vec![T::zero(); n];
                    for (r, x) in next.iter().enumerate() {
                        let w = rot[c][r];
                        v.iter_mut().zip(x).for_each(|(vi, &xi)| *vi += w * xi);
                    }
                    v
                })
                .collect();
            theta = ritz;
            let converged = block
                .iter()
                .zip(&theta)
                .all(|(x, &nu)| backward_error(op, x, nu, knorm, mnorm) <= T::lit(64.0) * T::epsilon());
            if converged && iter >= 1 {
                break;
            }
        }
        for (mut x, nu) in block.into_iter().zip(theta) {
            m_orthogonalize(&op.mass, &mut x, &vectors, &mvectors);
            let mx = m_normalize(&op.mass, &mut x)?;
            values.push(nu);
            vectors.push(x);
            mvectors.push(mx);
        }
    }

    // Final ordering by Ritz value.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&i| values[i]).collect();
    let dof_vectors: Vec<Vec<T>> = order.iter().map(|&i| vectors[i].clone()).collect();
    let residuals = dof_vectors.iter().zip(&eigenvalues).map(|(x, &nu)| residual_norm(op, x, nu)).collect();
    let backward_errors =
        dof_vectors.iter().zip(&eigenvalues).map(|(x, &nu)| backward_error(op, x, nu, knorm, mnorm)).collect();

    let grid = *op.grid();
    let half = grid.length() * T::half();
    let mut eigenvectors = Vec::with_capacity(k);
    let mut floor: Option<T> = None;
    for (x, &nu) in dof_vectors.iter().zip(&eigenvalues) {
        let f = op.to_field(x);
        let total = crate::graph::inner_product(&f, &f)?;
        let f = f.scaled(T::one() / total.sqrt());
        let mut far = T::zero();
        for j in 0..crate::EDGES {
            for (i, xn) in grid.nodes().enumerate() {
                if xn > half {
                    far += grid.weight(i) * f.edge(j)[i].sq();
                }
            }
        }
        if far >= T::lit(CONTINUUM_FAR_FRACTION) {
            floor = Some(floor.map_or(nu, |fl: T| fl.min(nu)));
        }
        eigenvectors.push(f);
    }

    let morse_index = eigenvalues.iter().filter(|&&v| v < -kernel_tol).count();
    let kernel_dim = eigenvalues.iter().filter(|&&v| v.abs() <= kernel_tol).count();

    Ok(SpectrumReport {
        eigenvalues,
        eigenvectors,
        dof_vectors,
        residuals,
        backward_errors,
        morse_index,
        kernel_dim,
        continuum_floor_estimate: floor,
        kernel_tol,
        restricted: op.opspec.restricted,
    })
}

/// `(n, z)`: Morse index and kernel dimension, refusing to answer when the computed window
/// does not reach past `kernel_tol`.
pub fn morse_and_kernel<T: Real>(report: &SpectrumReport<T>) -> Result<(usize, usize)> {
    let last = *report.eigenvalues.last().ok_or_else(|| Error::InvalidArgument("empty report".into()))?;
    if last <= report.kernel_tol {
        return Err(Error::Inconclusive(format!(
            "largest computed eigenvalue {} is still <= kernel_tol {}; request more eigenpairs",
            last, report.kernel_tol
        )));
    }
    Ok((report.morse_index, report.kernel_dim))
}
