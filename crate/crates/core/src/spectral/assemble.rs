//! P1 finite-element assembly of `−c_j² d²/dx² + V_j(x)` on the truncated junction.
//!
//! The δ′ vertex rule is natural for the quadratic form
//!
//! ```text
//! q[u] = Σ_j ∫ c_j² (u_j′)² + V_j u_j² dx + (1/λ) (Σ_j c_j u_j(0))²
//! ```
//!
//! so it enters only as the rank-one vertex term. At `λ = 0` the term is replaced by
//! the constraint `Σ c_j u_j(0) = 0`, eliminated by expressing `u_3(0)` through the
//! other two vertex values. The far node `x = L` is pinned to zero.
//!
//! Unknowns are interleaved by edge (`3i + j`), which keeps the half-bandwidth at 3
//! (4 with the constraint).

use crate::banded::SymBand;
use crate::graph::{EdgeGrid, GraphField, YGraphSpec};
use crate::profiles::{FamilyKind, ProfileFamily};
use crate::{Error, Real, Result, EDGES};

/// Potential `V_j` of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Potential {
    /// `V = 0`: the free operator `𝒯_λ`.
    Free,
    /// `V_j = cos φ_j` for the kink family: `𝒲_λ`.
    KinkCos,
    /// `V_j = cos φ_j` for the anti-kink/kink family: `𝓛_λ`.
    AntikinkCos,
}

impl Potential {
    pub fn name(self) -> &'static str {
        match self {
            Potential::Free => "free",
            Potential::KinkCos => "kink",
            Potential::AntikinkCos => "antikink",
        }
    }

    pub fn for_family(kind: FamilyKind) -> Self {
        match kind {
            FamilyKind::Kink => Potential::KinkCos,
            FamilyKind::AntikinkKink => Potential::AntikinkCos,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec<T> {
    pub potential: Potential,
    pub family: Option<ProfileFamily<T>>,
    pub spec: YGraphSpec<T>,
    pub grid: EdgeGrid<T>,
    /// Work on the symmetric subspace `u₁ = u₂ = u₃` (equal speeds only).
    pub restricted: bool,
}

impl<T: Real> OperatorSpec<T> {
    pub fn free(spec: YGraphSpec<T>, grid: EdgeGrid<T>) -> Self {
        Self { potential: Potential::Free, family: None, spec, grid, restricted: false }
    }

    /// Linearisation around a stationary profile.
    pub fn linearized(family: ProfileFamily<T>, grid: EdgeGrid<T>) -> Self {
        Self {
            potential: Potential::for_family(family.kind()),
            spec: *family.spec(),
            family: Some(family),
            grid,
            restricted: false,
        }
    }

    pub fn restricted(mut self) -> Self {
        self.restricted = true;
        self
    }

    fn validate(&self) -> Result<()> {
        match (self.potential, &self.family) {
            (Potential::Free, _) => {}
            (_, None) => {
                return Err(Error::InvalidArgument(format!(
                    "potential {} needs a profile family",
                    self.potential.name()
                )))
            }
            (p, Some(fam)) => {
                if Potential::for_family(fam.kind()) != p {
                    return Err(Error::InvalidArgument(format!(
                        "potential {} does not match a {} family",
                        p.name(),
                        fam.kind().name()
                    )));
                }
                if fam.spec() != &self.spec {
                    return Err(Error::InvalidArgument(
                        "family was built for a different junction".into(),
                    ));
                }
            }
        }
        if self.restricted && !self.spec.equal_speeds() {
            return Err(Error::InvalidArgument(
                "the symmetric-subspace reduction requires c1 = c2 = c3".into(),
            ));
        }
        Ok(())
    }

    fn potential_at(&self, edge: usize, x: T) -> T {
        match &self.family {
            Some(fam) if self.potential != Potential::Free => fam.cos_phi(edge, x),
            _ => T::zero(),
        }
    }
}

/// How a grid node maps to unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum NodeDof<T> {
    Free(usize),
    Pinned,
    /// Dependent node: a linear combination of two unknowns.
    Tied([(usize, T); 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap<T> {
    n_points: usize,
    edges: usize,
    nodes: Vec<NodeDof<T>>,
    n_dofs: usize,
}

impl<T: Real> DofMap<T> {
    fn build(spec: &YGraphSpec<T>, n_points: usize, restricted: bool) -> Self {
        let kirchhoff = spec.is_kirchhoff();
        let inner = n_points - 1;
        if restricted {
            let offset = usize::from(kirchhoff);
            let nodes = (0..n_points)
                .map(|i| {
                    if i == inner || (kirchhoff && i == 0) {
                        NodeDof::Pinned
                    } else {
                        NodeDof::Free(i - offset)
                    }
                })
                .collect();
            return Self { n_points, edges: 1, nodes, n_dofs: inner - offset };
        }
        let c = spec.speeds();
        let mut nodes = vec![NodeDof::Pinned; EDGES * n_points];
        for j in 0..EDGES {
            for i in 0..inner {
                nodes[j * n_points + i] = match (kirchhoff, i, j) {
                    (false, _, _) => NodeDof::Free(EDGES * i + j),
                    (true, 0, 2) => NodeDof::Tied([(0, -c[0] / c[2]), (1, -c[1] / c[2])]),
                    (true, 0, _) => NodeDof::Free(j),
                    (true, _, _) => NodeDof::Free(EDGES * i + j - 1),
                };
            }
        }
        let n_dofs = EDGES * inner - usize::from(kirchhoff);
        Self { n_points, edges: EDGES, nodes, n_dofs }
    }

    #[inline]
    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    #[inline]
    pub fn edges(&self) -> usize {
        self.edges
    }

    #[inline]
    pub(crate) fn node(&self, edge: usize, i: usize) -> NodeDof<T> {
        self.nodes[edge * self.n_points + i]
    }

    fn expand(&self, edge: usize, i: usize, mut f: impl FnMut(usize, T)) {
        match self.node(edge, i) {
            NodeDof::Free(d) => f(d, T::one()),
            NodeDof::Pinned => {}
            NodeDof::Tied(terms) => terms.iter().for_each(|&(d, w)| f(d, w)),
        }
    }

    /// Values of the unknowns read from a field (dependent and pinned nodes are dropped).
    /// Restricted maps read edge 1.
    pub fn to_dofs(&self, u: &GraphField<T>) -> Vec<T> {
        let mut x = vec![T::zero(); self.n_dofs];
        for j in 0..self.edges {
            for (i, &v) in u.edge(j).iter().enumerate() {
                if let NodeDof::Free(d) = self.node(j, i) {
                    x[d] = v;
                }
            }
        }
        x
    }

    /// Field represented by a vector of unknowns; restricted vectors are replicated on every edge.
    pub fn to_field(&self, x: &[T], grid: &EdgeGrid<T>) -> GraphField<T> {
        let mut out = GraphField::zeros(*grid);
        for j in 0..EDGES {
            let src = if self.edges == 1 { 0 } else { j };
            let edge = out.edge_mut(j);
            for (i, slot) in edge.iter_mut().enumerate() {
                let mut v = T::zero();
                self.expand(src, i, |d, w| v += w * x[d]);
                *slot = v;
            }
        }
        out
    }
}

/// Discretised operator: `K` (form), `M` (consistent P1 mass), and the vertex coupling.
#[derive(Debug, Clone)]
pub struct AssembledOperator<T> {
    pub stiffness: SymBand<T>,
    pub mass: SymBand<T>,
    /// Coefficient of the rank-one vertex term: `1/λ` (full), `3c²/λ` (restricted), 0 at `λ = 0`.
    pub vertex_coefficient: T,
    /// Trace vector of the vertex term, `(c₁, c₂, c₃)`.
    pub vertex_weights: [T; EDGES],
    pub dofs: DofMap<T>,
    pub opspec: OperatorSpec<T>,
}

impl<T: Real> AssembledOperator<T> {
    pub fn grid(&self) -> &EdgeGrid<T> {
        &self.opspec.grid
    }

    pub fn dim(&self) -> usize {
        self.dofs.n_dofs()
    }

    pub fn to_dofs(&self, u: &GraphField<T>) -> Result<Vec<T>> {
        if u.grid() != self.grid() {
            return Err(Error::Shape("field grid differs from the operator grid".into()));
        }
        Ok(self.dofs.to_dofs(u))
    }

    pub fn to_field(&self, x: &[T]) -> GraphField<T> {
        self.dofs.to_field(x, self.grid())
    }
}

pub fn assemble<T: Real>(opspec: &OperatorSpec<T>) -> Result<AssembledOperator<T>> {
    opspec.validate()?;
    let spec = opspec.spec;
    let grid = opspec.grid;
    let n = grid.n_points();
    let h = grid.spacing();
    let dofs = DofMap::build(&spec, n, opspec.restricted);
    let c = spec.speeds();

    let vertex_coefficient = if spec.is_kirchhoff() {
        T::zero()
    } else if opspec.restricted {
        T::lit(3.0) * c[0] * c[0] / spec.lambda()
    } else {
        T::one() / spec.lambda()
    };

    let twelfth = h / T::lit(12.0);
    let sixth = h / T::lit(6.0);
    // Visits every (node, node, k, m) contribution once; run twice (bandwidth, then values).
    let visit = |f: &mut dyn FnMut(usize, usize, usize, usize, T, T)| {
        for j in 0..dofs.edges() {
            let cc = c[j] * c[j] / h;
            let mut v0 = opspec.potential_at(j, grid.node(0));
            for i in 0..n - 1 {
                let v1 = opspec.potential_at(j, grid.node(i + 1));
                let k = [
                    [cc + twelfth * (T::lit(3.0) * v0 + v1), -cc + twelfth * (v0 + v1)],
                    [-cc + twelfth * (v0 + v1), cc + twelfth * (v0 + T::lit(3.0) * v1)],
                ];
                let m = [[T::two() * sixth, sixth], [sixth, T::two() * sixth]];
                for a in 0..2 {
                    for b in 0..2 {
                        f(j, i + a, j, i + b, k[a][b], m[a][b]);
                    }
                }
                v0 = v1;
            }
        }
        if vertex_coefficient != T::zero() {
            if opspec.restricted {
                f(0, 0, 0, 0, vertex_coefficient, T::zero());
            } else {
                for a in 0..EDGES {
                    for b in 0..EDGES {
                        f(a, 0, b, 0, vertex_coefficient * c[a] * c[b], T::zero());
                    }
                }
            }
        }
    };

    let mut p = 0usize;
    visit(&mut |ja, ia, jb, ib, _, _| {
        dofs.expand(ja, ia, |da, _| dofs.expand(jb, ib, |db, _| p = p.max(da.abs_diff(db))));
    });

    let nd = dofs.n_dofs();
    let mut stiffness = SymBand::zeros(nd, p);
    let mut mass = SymBand::zeros(nd, p);
    visit(&mut |ja, ia, jb, ib, kv, mv| {
        dofs.expand(ja, ia, |da, wa| {
            dofs.expand(jb, ib, |db, wb| {
                // Each unordered pair is visited in both orders; `add` is symmetric, so only
                // keep the lower-triangular visit (and halve nothing).
                if da >= db {
                    stiffness.add(da, db, wa * wb * kv);
                    mass.add(da, db, wa * wb * mv);
                }
            })
        })
    });

    Ok(AssembledOperator { stiffness, mass, vertex_coefficient, vertex_weights: c, dofs, opspec: opspec.clone() })
}
