//! Conservative L2 remap of a shifted piecewise polynomial.
//!
//! For a shift `s = v tau = (m + r) dx` with `m` an integer and
//! `r in [0, 1)`, target element `e` overlaps source elements `e - m - 1`
//! (on local `t in [0, r)`) and `e - m` (on `t in [r, 1)`). Projecting
//! onto the nodal basis gives two `np x np` blocks
//!
//! ```text
//! L[i][j] = (2 / w_i) int_0^r l_j(t - r + 1) l_i(t) dt
//! R[i][j] = (2 / w_i) int_r^1 l_j(t - r) l_i(t) dt
//! ```
//!
//! with `l` the basis in the unit coordinate `t`. Both integrands are
//! polynomials of degree `2p`, so `p + 1` Gauss points per overlap are
//! exact. The column sums of `w_i L[i][j] + w_i R[i][j]` equal `w_j`,
//! which is exact mass conservation.

use alloc::vec::Vec;

use super::{DgField, DgSpace};

/// Relative distance to a mesh-aligned shift below which the shift is
/// treated as aligned.
const ALIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    n: usize,
    np: usize,
    /// Whole-cell part of the shift, reduced modulo the element count.
    cells: usize,
    aligned: bool,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl ShiftOperator {
    /// Operator for `f(x) -> f(x - shift)`. Any sign and magnitude.
    pub fn new(space: &DgSpace, shift: f64) -> Self {
        let n = space.n_elements();
        let np = space.np();
        let q = shift / space.mesh().dx();
        let mut m = libm::floor(q);
        let mut r = q - m;
        if r < ALIGN_TOL {
            r = 0.0;
        } else if r > 1.0 - ALIGN_TOL {
            r = 0.0;
            m += 1.0;
        }
        let cells = (m % n as f64 + n as f64) as usize % n;
        let mut op = Self {
            n,
            np,
            cells,
            aligned: r == 0.0,
            left: Vec::new(),
            right: Vec::new(),
        };
        if !op.aligned {
            op.left = block(space, 0.0, r, r - 1.0);
            op.right = block(space, r, 1.0, r);
        }
        op
    }

    pub fn is_aligned(&self) -> bool {
        self.aligned
    }

    /// `dst = T src` for one component.
    pub fn apply(&self, src: &[f64], dst: &mut [f64]) {
        dst.fill(0.0);
        self.apply_add(src, 1.0, dst);
    }

    /// `dst += scale * T src` for one component.
    pub fn apply_add(&self, src: &[f64], scale: f64, dst: &mut [f64]) {
        let (n, np) = (self.n, self.np);
        debug_assert_eq!(src.len(), n * np);
        debug_assert_eq!(dst.len(), n * np);
        for e in 0..n {
            let er = (e + n - self.cells) % n;
            let out = &mut dst[e * np..(e + 1) * np];
            let ur = &src[er * np..(er + 1) * np];
            if self.aligned {
                if scale == 1.0 {
                    for (o, u) in out.iter_mut().zip(ur) {
                        *o += u;
                    }
                } else {
                    for (o, u) in out.iter_mut().zip(ur) {
                        *o += scale * u;
                    }
                }
                continue;
            }
            let el = (er + n - 1) % n;
            let ul = &src[el * np..(el + 1) * np];
            for i in 0..np {
                let lrow = &self.left[i * np..(i + 1) * np];
                let rrow = &self.right[i * np..(i + 1) * np];
                let mut acc = 0.0;
                for j in 0..np {
                    acc += lrow[j] * ul[j] + rrow[j] * ur[j];
                }
                out[i] += scale * acc;
            }
        }
    }
}

/// `(2 / w_i) int_lo^hi l_j(t - offset) l_i(t) dt` with `l` on `[0, 1]`.
fn block(space: &DgSpace, lo: f64, hi: f64, offset: f64) -> Vec<f64> {
    let np = space.np();
    let rule = space.rule();
    let basis = space.basis();
    let mut out = alloc::vec![0.0; np * np];
    let mut li = alloc::vec![0.0; np];
    let mut lj = alloc::vec![0.0; np];
    let half = 0.5 * (hi - lo);
    for (&xq, &wq) in rule.nodes.iter().zip(&rule.weights) {
        let t = lo + half * (xq + 1.0);
        basis.eval_all(2.0 * t - 1.0, &mut li);
        basis.eval_all(2.0 * (t - offset) - 1.0, &mut lj);
        for i in 0..np {
            for j in 0..np {
                out[i * np + j] += wq * half * li[i] * lj[j];
            }
        }
    }
    for i in 0..np {
        let s = 2.0 / rule.weights[i];
        out[i * np..(i + 1) * np].iter_mut().for_each(|x| *x *= s);
    }
    out
}

/// Component `comp` of `field` transported by `v tau`: `x -> f(x - v tau)`.
pub fn advect(field: &DgField, comp: usize, v: f64, tau: f64) -> Vec<f64> {
    let op = ShiftOperator::new(field.space(), v * tau);
    let mut out = alloc::vec![0.0; field.space().ndof()];
    op.apply(field.comp(comp), &mut out);
    out
}
