use alloc::vec::Vec;

use super::{Mesh1D, SlError};
use crate::quadrature::{GaussLegendre, LagrangeBasis};

pub const MAX_DEGREE: usize = 4;

/// Extra Gauss points used when projecting a smooth function.
const PROJECTION_EXTRA_POINTS: usize = 8;

/// Degree-`p` nodal DG space on a periodic mesh, with nodes at the `p + 1`
/// Gauss-Legendre points of each element. The mass matrix is diagonal:
/// `w_i dx / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgSpace {
    mesh: Mesh1D,
    degree: usize,
    rule: GaussLegendre,
    basis: LagrangeBasis,
}

impl DgSpace {
    pub fn new(mesh: Mesh1D, degree: usize) -> Result<Self, SlError> {
        if degree > MAX_DEGREE {
            return Err(SlError::Degree(degree));
        }
        let rule = GaussLegendre::new(degree + 1);
        let basis = LagrangeBasis::new(&rule.nodes);
        Ok(Self {
            mesh,
            degree,
            rule,
            basis,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nodes per element.
    pub fn np(&self) -> usize {
        self.degree + 1
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.len()
    }

    /// Degrees of freedom per component.
    pub fn ndof(&self) -> usize {
        self.np() * self.mesh.len()
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    /// Physical position of node `i` in element `e`.
    pub fn node_x(&self, e: usize, i: usize) -> f64 {
        self.mesh.left(e) + 0.5 * self.mesh.dx() * (self.rule.nodes[i] + 1.0)
    }

    /// Position of flat degree of freedom `idx = e * np + i`.
    pub fn dof_x(&self, idx: usize) -> f64 {
        self.node_x(idx / self.np(), idx % self.np())
    }

    /// Quadrature weight `w_i dx / 2` of flat degree of freedom `idx`.
    pub fn dof_weight(&self, idx: usize) -> f64 {
        0.5 * self.mesh.dx() * self.rule.weights[idx % self.np()]
    }

    /// Nodal values `f(x_{e,i})`.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.ndof()).map(|idx| f(self.dof_x(idx))).collect()
    }

    /// L2 projection, with each element integral done by a Gauss rule of
    /// `p + 9` points.
    pub fn project(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let np = self.np();
        let fine = GaussLegendre::new(np + PROJECTION_EXTRA_POINTS);
        let dx = self.mesh.dx();
        let mut out = alloc::vec![0.0; self.ndof()];
        let mut phi = alloc::vec![0.0; np];
        for e in 0..self.n_elements() {
            let x0 = self.mesh.left(e);
            for (&xq, &wq) in fine.nodes.iter().zip(&fine.weights) {
                let fx = f(x0 + 0.5 * dx * (xq + 1.0));
                self.basis.eval_all(xq, &mut phi);
                for i in 0..np {
                    out[e * np + i] += wq * fx * phi[i] / self.rule.weights[i];
                }
            }
        }
        out
    }

    /// Point value of the piecewise polynomial `values` at `x`.
    pub fn eval(&self, values: &[f64], x: f64) -> f64 {
        let (e, xi) = self.mesh.locate(x);
        let np = self.np();
        self.basis.interpolate(&values[e * np..(e + 1) * np], xi)
    }

    /// `int f dx`, exact for the piecewise polynomial.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(idx, v)| v * self.dof_weight(idx))
            .sum()
    }
}

/// Piecewise polynomials with `ncomp` components (e.g. one per velocity),
/// stored component-major: `data[c * ndof + e * np + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgField {
    space: DgSpace,
    ncomp: usize,
    data: Vec<f64>,
}

impl DgField {
    pub fn zeros(space: &DgSpace, ncomp: usize) -> Self {
        Self {
            space: space.clone(),
            ncomp,
            data: alloc::vec![0.0; ncomp * space.ndof()],
        }
    }

    pub fn from_data(space: &DgSpace, ncomp: usize, data: Vec<f64>) -> Result<Self, SlError> {
        if data.len() != ncomp * space.ndof() {
            return Err(SlError::Mismatch("data length does not match the space"));
        }
        Ok(Self {
            space: space.clone(),
            ncomp,
            data,
        })
    }

    /// L2 projection of `f(c, x)` for each component `c`.
    pub fn project(space: &DgSpace, ncomp: usize, f: impl Fn(usize, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(ncomp * space.ndof());
        for c in 0..ncomp {
            data.extend(space.project(|x| f(c, x)));
        }
        Self {
            space: space.clone(),
            ncomp,
            data,
        }
    }

    /// Nodal interpolation of `f(c, x)`.
    pub fn interpolate(space: &DgSpace, ncomp: usize, f: impl Fn(usize, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(ncomp * space.ndof());
        for c in 0..ncomp {
            data.extend(space.interpolate(|x| f(c, x)));
        }
        Self {
            space: space.clone(),
            ncomp,
            data,
        }
    }

    pub fn space(&self) -> &DgSpace {
        &self.space
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.space.ndof();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.space.ndof();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Value at node `idx` of every component.
    pub fn gather(&self, idx: usize, out: &mut [f64]) {
        let n = self.space.ndof();
        for (c, o) in out.iter_mut().enumerate().take(self.ncomp) {
            *o = self.data[c * n + idx];
        }
    }

    pub fn scatter(&mut self, idx: usize, values: &[f64]) {
        let n = self.space.ndof();
        for (c, v) in values.iter().enumerate().take(self.ncomp) {
            self.data[c * n + idx] = *v;
        }
    }

    pub fn eval(&self, c: usize, x: f64) -> f64 {
        self.space.eval(self.comp(c), x)
    }

    /// `int f_c dx`.
    pub fn mass(&self, c: usize) -> f64 {
        self.space.integrate(self.comp(c))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn same_shape(&self, other: &DgField) -> bool {
        self.ncomp == other.ncomp && self.space == other.space
    }
}

/// `int |a - b| dx`, summed over components.
pub fn l1_error(a: &DgField, b: &DgField) -> Result<f64, SlError> {
    let w = alloc::vec![1.0; a.ncomp()];
    l1_error_weighted(a, b, &w)
}

/// `sum_c w_c int |a_c - b_c| dx`.
///
/// The difference is a polynomial on each element; its sign changes are
/// located by sampling and bisection, and `|a - b|` is integrated exactly
/// on each piece.
pub fn l1_error_weighted(a: &DgField, b: &DgField, weights: &[f64]) -> Result<f64, SlError> {
    if !a.same_shape(b) {
        return Err(SlError::Mismatch("l1_error operands differ in shape"));
    }
    if weights.len() != a.ncomp() {
        return Err(SlError::Mismatch("one weight per component is required"));
    }
    let space = a.space();
    let np = space.np();
    let half_dx = 0.5 * space.mesh().dx();
    let basis = space.basis();
    let rule = space.rule();
    let samples = 16 * np + 1;
    let mut diff = alloc::vec![0.0; np];
    let mut cuts: Vec<f64> = Vec::with_capacity(samples + 1);
    let mut total = 0.0;
    for (c, &w) in weights.iter().enumerate() {
        let (ca, cb) = (a.comp(c), b.comp(c));
        let mut comp_total = 0.0;
        for e in 0..space.n_elements() {
            for i in 0..np {
                diff[i] = ca[e * np + i] - cb[e * np + i];
            }
            if diff.iter().all(|d| *d == 0.0) {
                continue;
            }
            let p = |x: f64| basis.interpolate(&diff, x);
            cuts.clear();
            cuts.push(-1.0);
            if np > 1 {
                let mut x0 = -1.0;
                let mut p0 = p(x0);
                for s in 1..samples {
                    let x1 = -1.0 + 2.0 * s as f64 / (samples - 1) as f64;
                    let p1 = p(x1);
                    if p0 * p1 < 0.0 {
                        let (mut lo, mut hi, mut plo) = (x0, x1, p0);
                        for _ in 0..64 {
                            let mid = 0.5 * (lo + hi);
                            let pm = p(mid);
                            if pm * plo > 0.0 {
                                lo = mid;
                                plo = pm;
                            } else {
                                hi = mid;
                            }
                        }
                        cuts.push(0.5 * (lo + hi));
                    }
                    x0 = x1;
                    p0 = p1;
                }
            }
            cuts.push(1.0);
            for seg in cuts.windows(2) {
                comp_total += rule.integrate(seg[0], seg[1], |x| p(x).abs());
            }
        }
        total += w * comp_total * half_dx;
    }
    Ok(total)
}
