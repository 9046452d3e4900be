//! Symmetric banded matrices and their `LDLᵀ` factorisation.
//!
//! The factorisation is unpivoted. Its diagonal gives the inertia of the matrix
//! (Sylvester's law), so `LDLᵀ(K − σM)` counts the generalized eigenvalues below `σ`.

use crate::{Error, Real, Result};

/// Lower band of a symmetric `n × n` matrix with half-bandwidth `p`.
/// Row `i` stores `A[i][i−p..=i]`, left-padded with zeros near the top.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand<T> {
    n: usize,
    p: usize,
    data: Vec<T>,
}

impl<T: Real> SymBand<T> {
    pub fn zeros(n: usize, p: usize) -> Self {
        Self { n, p, data: vec![T::zero(); n * (p + 1)] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn half_bandwidth(&self) -> usize {
        self.p
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        (r - c <= self.p).then(|| r * (self.p + 1) + self.p - (r - c))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Adds `v` to `A[i][j]` (and, implicitly, `A[j][i]`).
    ///
    /// # Panics
    /// If `|i − j|` exceeds the half-bandwidth.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside half-bandwidth {}", self.p));
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n, "matvec dimension");
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let row = &self.data[i * (self.p + 1)..(i + 1) * (self.p + 1)];
            let start = i.saturating_sub(self.p);
            for j in start..i {
                let a = row[self.p - (i - j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += row[self.p] * x[i];
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quad(&self, x: &[T]) -> T {
        dot(x, &self.matvec(x))
    }

    /// `self − σ·other`; both must share dimension and bandwidth.
    pub fn shifted(&self, sigma: T, other: &Self) -> Self {
        assert_eq!((self.n, self.p), (other.n, other.p), "shifted: layout mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - sigma * b).collect();
        Self { n: self.n, p: self.p, data }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { n: self.n, p: self.p, data: self.data.iter().map(|&v| v * a).collect() }
    }

    /// `max_i Σ_j |A[i][j]|`; bounds the spectral norm of the symmetric matrix.
    pub fn norm_inf(&self) -> T {
        let mut rows = vec![T::zero(); self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.p)..=i {
                let a = self.get(i, j).abs();
                rows[i] += a;
                if j != i {
                    rows[j] += a;
                }
            }
        }
        rows.into_iter().fold(T::zero(), T::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn is_symmetric_storage(&self) -> bool {
        // Storage is symmetric by construction; this checks the padding stayed zero.
        (0..self.p.min(self.n)).all(|i| {
            (0..self.p - i).all(|k| self.data[i * (self.p + 1) + k] == T::zero())
        })
    }

    /// Unpivoted `LDLᵀ`. Fails on a zero or non-finite pivot.
    pub fn ldlt(&self) -> Result<Ldlt<T>> {
        let (n, p) = (self.n, self.p);
        let w = p + 1;
        let mut l = vec![T::zero(); n * w];
        let mut d = vec![T::zero(); n];
        // `l` reuses the band layout; column j of row i lives at i*w + p - (i - j).
        for i in 0..n {
            let start = i.saturating_sub(p);
            for j in start..=i {
                let mut s = self.data[i * w + p - (i - j)];
                let kstart = start.max(j.saturating_sub(p));
                for k in kstart..j {
                    s -= l[i * w + p - (i - k)] * l[j * w + p - (j - k)] * d[k];
                }
                if j == i {
                    if s == T::zero() || !s.is_finite() {
                        return Err(Error::Numeric(format!("zero or non-finite pivot at row {i}")));
                    }
                    d[i] = s;
                    l[i * w + p] = T::one();
                } else {
                    l[i * w + p - (i - j)] = s / d[j];
                }
            }
        }
        Ok(Ldlt { n, p, l, d })
    }
}

#[derive(Debug, Clone)]
pub struct Ldlt<T> {
    n: usize,
    p: usize,
    l: Vec<T>,
    d: Vec<T>,
}

/// Counts of negative, zero and positive pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl<T: Real> Ldlt<T> {
    pub fn inertia(&self) -> Inertia {
        let mut out = Inertia { negative: 0, zero: 0, positive: 0 };
        for &v in &self.d {
            if v < T::zero() {
                out.negative += 1;
            } else if v > T::zero() {
                out.positive += 1;
            } else {
                out.zero += 1;
            }
        }
        out
    }

    pub fn pivots(&self) -> &[T] {
        &self.d
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "solve dimension");
        let (n, p, w) = (self.n, self.p, self.p + 1);
        let mut x = b.to_vec();
        for i in 0..n {
            let start = i.saturating_sub(p);
            let mut s = x[i];
            for k in start..i {
                s -= self.l[i * w + p - (i - k)] * x[k];
            }
            x[i] = s;
        }
        for (xi, &di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            let end = (i + p).min(n - 1);
            let mut s = x[i];
            for k in i + 1..=end {
                s -= self.l[k * w + p - (k - i)] * x[k];
            }
            x[i] = s;
        }
        x
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
