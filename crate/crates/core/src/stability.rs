//! Von Neumann analysis of SL-DIRK schemes on the linear two-velocity model.
//!
//! With space kept continuous, a Fourier mode `e^{ikx}` of `(f_1, f_2)` is
//! mapped across one step by a 2x2 complex amplification matrix. Stage `l`
//! in Shu-Osher form reads
//!
//! ```text
//! F(l) = A_l^{-1} [ B_l F^n + sum_{j<l} C_lj F(j) ]
//! A_l  = I - a_ll xi Q~,     B_l = (1 - sum_j b_lj) diag(e^{-i c_l k dt}, e^{i c_l k dt})
//! C_lj = b_lj diag(e^{-i (c_l - c_j) k dt}, e^{i (c_l - c_j) k dt})
//! ```
//!
//! with `xi = dt / eps` and `Q~` the Jacobian of the relaxation term. The
//! amplification matrix is the stage map of the last stage.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_complex::Complex64;

use crate::butcher::{ButcherTableau, ShuOsherForm, TableauError};

pub type Real2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilityError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("invalid stability point: {0}")]
    InvalidPoint(&'static str),
}

/// `Q~ = 1/2 [[-1+b, 1+b], [1-b, -1-b]]`; eigenvalues `{0, -1}`.
pub fn relaxation_jacobian(b: f64) -> Real2 {
    [
        [0.5 * (-1.0 + b), 0.5 * (1.0 + b)],
        [0.5 * (1.0 - b), 0.5 * (-1.0 - b)],
    ]
}

/// `(I - a_ll xi Q~)^{-1}`. For `xi = +inf` this is the projection onto the
/// null space of `Q~`, i.e. onto the equilibrium `((1+b)/2, (1-b)/2) U`.
pub fn stage_inverse(a_ll: f64, xi: f64, b: f64) -> Real2 {
    let (p, m) = (0.5 * (1.0 + b), 0.5 * (1.0 - b));
    if xi.is_infinite() {
        return [[p, p], [m, m]];
    }
    let z = a_ll * xi;
    let inv = 1.0 / (1.0 + z);
    [
        [(1.0 + p * z) * inv, p * z * inv],
        [m * z * inv, (1.0 + m * z) * inv],
    ]
}

/// A 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Complex64::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Self {
        Self::diag(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Mat2([[a, z], [z, b]])
    }

    /// `diag(e^{-i theta}, e^{i theta})`: exact transport of the `+1` and
    /// `-1` velocity components over a phase `theta = k * shift`.
    pub fn transport(theta: f64) -> Self {
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        Self::diag(Complex64::new(c, -s), Complex64::new(c, s))
    }

    pub fn from_real(m: Real2) -> Self {
        let r = |x| Complex64::new(x, 0.0);
        Mat2([[r(m[0][0]), r(m[0][1])], [r(m[1][0]), r(m[1][1])]])
    }

    pub fn scale(self, s: f64) -> Self {
        let mut out = self;
        out.0.iter_mut().flatten().for_each(|x| *x *= s);
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues ordered by increasing modulus.
    ///
    /// The larger root comes from the quadratic formula with the sign that
    /// avoids cancellation; the smaller one from `det / large`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let tr = self.trace();
        let det = self.det();
        let sq = (tr * tr - det * 4.0).sqrt();
        let large = if (tr.conj() * sq).re >= 0.0 {
            (tr + sq) * 0.5
        } else {
            (tr - sq) * 0.5
        };
        let small = if large.norm_sqr() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            det / large
        };
        if small.norm() <= large.norm() {
            [small, large]
        } else {
            [large, small]
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues()[1].norm()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for (x, y) in out.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *x += y;
        }
        out
    }
}

/// `(b, k dt, xi)`; `xi = f64::INFINITY` selects the analytic stiff limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityPoint {
    pub b: f64,
    pub k_dt: f64,
    pub xi: f64,
}

impl StabilityPoint {
    pub fn new(b: f64, k_dt: f64, xi: f64) -> Result<Self, StabilityError> {
        let p = Self { b, k_dt, xi };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), StabilityError> {
        if !(0.0..=1.0).contains(&self.b) {
            return Err(StabilityError::InvalidPoint("b must lie in [0, 1]"));
        }
        if !(self.k_dt >= 0.0 && self.k_dt.is_finite()) {
            return Err(StabilityError::InvalidPoint("k dt must be finite and >= 0"));
        }
        if !(self.xi >= 0.0) || self.xi == f64::NEG_INFINITY {
            return Err(StabilityError::InvalidPoint("xi must be >= 0 or +inf"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationMatrix {
    pub matrix: Mat2,
    pub tableau: String,
    pub point: StabilityPoint,
}

impl AmplificationMatrix {
    pub fn spectral_radius(&self) -> f64 {
        self.matrix.spectral_radius()
    }

    pub fn eigenvalues(&self) -> [Complex64; 2] {
        self.matrix.eigenvalues()
    }
}

/// Builds amplification matrices for one tableau, reusing its Shu-Osher form.
#[derive(Debug, Clone)]
pub struct Amplifier {
    name: String,
    so: ShuOsherForm,
}

impl Amplifier {
    pub fn new(t: &ButcherTableau) -> Result<Self, StabilityError> {
        let t = t.clone().validated()?;
        Ok(Self {
            name: t.name().into(),
            so: t.to_shu_osher()?,
        })
    }

    pub fn tableau_name(&self) -> &str {
        &self.name
    }

    /// Stage maps `F(l) = M_l F^n` for every stage.
    pub fn stage_matrices(&self, p: &StabilityPoint) -> Vec<Mat2> {
        let so = &self.so;
        let c = so.c();
        let mut stages: Vec<Mat2> = Vec::with_capacity(so.stages());
        for l in 0..so.stages() {
            let mut rhs = Mat2::transport(c[l] * p.k_dt).scale(so.base_weight(l));
            for (j, &blj) in so.b_row(l).iter().enumerate() {
                let shift = Mat2::transport((c[l] - c[j]) * p.k_dt).scale(blj);
                rhs = rhs + shift * stages[j];
            }
            let inv = Mat2::from_real(stage_inverse(so.diag(l), p.xi, p.b));
            stages.push(inv * rhs);
        }
        stages
    }

    pub fn matrix(&self, p: &StabilityPoint) -> Mat2 {
        *self
            .stage_matrices(p)
            .last()
            .expect("tableau has at least one stage")
    }

    pub fn amplification(&self, p: StabilityPoint) -> Result<AmplificationMatrix, StabilityError> {
        p.check()?;
        Ok(AmplificationMatrix {
            matrix: self.matrix(&p),
            tableau: self.name.clone(),
            point: p,
        })
    }

    /// `|lambda_1| <= |lambda_2|` at one point.
    pub fn eigen_moduli(&self, p: &StabilityPoint) -> [f64; 2] {
        let [l1, l2] = self.matrix(p).eigenvalues();
        [l1.norm(), l2.norm()]
    }

    /// Largest `k dt` in `[0, upper]` such that the spectral radius stays
    /// within `1 + tol` on the whole interval `[0, k dt]`.
    ///
    /// `samples` equispaced points locate the first crossing, which is
    /// then refined by bisection.
    pub fn stable_kdt_limit(&self, b: f64, xi: f64, upper: f64, samples: usize, tol: f64) -> f64 {
        let rho = |k| {
            self.matrix(&StabilityPoint { b, k_dt: k, xi })
                .spectral_radius()
        };
        let n = samples.max(2);
        let mut prev = 0.0;
        for i in 1..n {
            let k = upper * i as f64 / (n - 1) as f64;
            if rho(k) > 1.0 + tol {
                let (mut lo, mut hi) = (prev, k);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if rho(mid) > 1.0 + tol {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo <= 1e-13 * upper {
                        break;
                    }
                }
                return lo;
            }
            prev = k;
        }
        upper
    }
}

/// Amplification matrix of `t` at `p`.
pub fn amplification(
    t: &ButcherTableau,
    p: StabilityPoint,
) -> Result<AmplificationMatrix, StabilityError> {
    Amplifier::new(t)?.amplification(p)
}

pub fn spectral_radius(m: &AmplificationMatrix) -> f64 {
    m.spectral_radius()
}

/// Axis values of a scan. Ordering is `b` outermost, `xi` innermost.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanGrid {
    pub b: Vec<f64>,
    pub k_dt: Vec<f64>,
    pub xi: Vec<f64>,
}

impl ScanGrid {
    pub fn len(&self) -> usize {
        self.b.len() * self.k_dt.len() * self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point number `index` in scan order.
    pub fn point(&self, index: usize) -> StabilityPoint {
        let nx = self.xi.len();
        let nk = self.k_dt.len();
        StabilityPoint {
            b: self.b[index / (nk * nx)],
            k_dt: self.k_dt[(index / nx) % nk],
            xi: self.xi[index % nx],
        }
    }

    pub fn check(&self) -> Result<(), StabilityError> {
        if self.is_empty() {
            return Err(StabilityError::InvalidPoint("scan axes must be nonempty"));
        }
        for &b in &self.b {
            StabilityPoint {
                b,
                k_dt: 0.0,
                xi: 0.0,
            }
            .check()?;
        }
        for &k_dt in &self.k_dt {
            StabilityPoint {
                b: 0.0,
                k_dt,
                xi: 0.0,
            }
            .check()?;
        }
        for &xi in &self.xi {
            StabilityPoint {
                b: 0.0,
                k_dt: 0.0,
                xi,
            }
            .check()?;
        }
        Ok(())
    }
}

/// `n` equispaced values covering `[lo, hi]` (just `lo` when `n == 1`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub point: StabilityPoint,
    pub lambda1_abs: f64,
    pub lambda2_abs: f64,
}

impl ScanRow {
    pub fn rho(&self) -> f64 {
        self.lambda2_abs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub tableau: String,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// Row with the largest spectral radius (first one on ties).
    pub fn max_row(&self) -> Option<&ScanRow> {
        self.rows
            .iter()
            .fold(None, |best: Option<&ScanRow>, r| match best {
                Some(b) if b.rho() >= r.rho() => Some(b),
                _ => Some(r),
            })
    }

    pub fn max_rho(&self) -> f64 {
        self.max_row().map_or(f64::NAN, ScanRow::rho)
    }
}

pub fn scan_point(amp: &Amplifier, p: StabilityPoint) -> ScanRow {
    let [lambda1_abs, lambda2_abs] = amp.eigen_moduli(&p);
    ScanRow {
        point: p,
        lambda1_abs,
        lambda2_abs,
    }
}

/// Sequential scan over the full grid.
pub fn scan(t: &ButcherTableau, grid: &ScanGrid) -> Result<ScanResult, StabilityError> {
    grid.check()?;
    let amp = Amplifier::new(t)?;
    let rows = (0..grid.len())
        .map(|i| scan_point(&amp, grid.point(i)))
        .collect();
    Ok(ScanResult {
        tableau: amp.name,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::butcher::lookup;
    use core::f64::consts::PI;

    #[test]
    fn jacobian_substitution() {
        assert_eq!(relaxation_jacobian(0.0), [[-0.5, 0.5], [0.5, -0.5]]);
        assert_eq!(relaxation_jacobian(1.0), [[0.0, 1.0], [0.0, -1.0]]);
    }

    #[test]
    fn jacobian_eigenvalues_are_zero_and_minus_one() {
        for b in [0.0, 0.2, 0.6, 1.0] {
            let m = Mat2::from_real(relaxation_jacobian(b));
            let [l1, l2] = m.eigenvalues();
            assert!(l1.norm() < 1e-14, "{l1}");
            assert!((l2 + 1.0).norm() < 1e-14, "{l2}");
        }
    }

    #[test]
    fn stage_inverse_cases() {
        assert_eq!(stage_inverse(0.3, 0.0, 0.6), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(
            stage_inverse(1.0, f64::INFINITY, 0.0),
            [[0.5, 0.5], [0.5, 0.5]]
        );
        let (xi, b) = (3.0, 0.6);
        let m = stage_inverse(1.0, xi, b);
        let expect = [
            [1.0 + (1.0 + b) * xi / 2.0, (1.0 + b) * xi / 2.0],
            [(1.0 - b) * xi / 2.0, 1.0 + (1.0 - b) * xi / 2.0],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - expect[i][j] / (1.0 + xi)).abs() < 1e-15);
            }
        }
        // Inverse check against I - a xi Q~.
        let (a, xi) = (0.37, 5.5);
        let q = relaxation_jacobian(b);
        let inv = stage_inverse(a, xi, b);
        for i in 0..2 {
            for j in 0..2 {
                let prod: f64 = (0..2)
                    .map(|l| {
                        let lhs = if i == l { 1.0 } else { 0.0 } - a * xi * q[i][l];
                        lhs * inv[l][j]
                    })
                    .sum();
                assert!((prod - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn eigenvalues_of_transport_have_unit_modulus() {
        let m = Mat2::transport(0.7);
        assert!((m.spectral_radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_of_nilpotent_and_zero() {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(Mat2::ZERO.spectral_radius(), 0.0);
        let n = Mat2([[z, one], [z, z]]);
        assert_eq!(n.spectral_radius(), 0.0);
    }

    #[test]
    fn zero_xi_is_pure_transport() {
        for name in ["BE", "DIRK2", "DIRK3-B2", "DIRK3-B5", "DIRK3-B10"] {
            let amp = Amplifier::new(&lookup(name).unwrap()).unwrap();
            let p = StabilityPoint {
                b: 0.4,
                k_dt: 1.3,
                xi: 0.0,
            };
            let m = amp.matrix(&p);
            assert!(m.max_abs_diff(&Mat2::transport(1.3)) < 1e-13, "{name}");
            assert!((m.spectral_radius() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn backward_euler_matches_closed_form() {
        let amp = Amplifier::new(&lookup("BE").unwrap()).unwrap();
        for &(b, kdt, xi) in &[(0.0, 0.3, 0.5), (0.6, 2.0, 10.0), (1.0, 5.0, 1e3)] {
            let m = amp.matrix(&StabilityPoint { b, k_dt: kdt, xi });
            let p = Mat2::from_real([
                [1.0 + (1.0 + b) / 2.0 * xi, (1.0 + b) / 2.0 * xi],
                [(1.0 - b) / 2.0 * xi, 1.0 + (1.0 - b) / 2.0 * xi],
            ])
            .scale(1.0 / (1.0 + xi));
            let expect = p * Mat2::transport(kdt);
            assert!(m.max_abs_diff(&expect) < 1e-14);
        }
    }

    #[test]
    fn stiff_limit_has_a_zero_eigenvalue() {
        let amp = Amplifier::new(&lookup("DIRK3-B10").unwrap()).unwrap();
        for i in 0..20 {
            let p = StabilityPoint {
                b: i as f64 / 19.0,
                k_dt: 0.3 * i as f64,
                xi: f64::INFINITY,
            };
            assert!(amp.eigen_moduli(&p)[0] < 1e-12);
        }
    }

    #[test]
    fn invalid_points() {
        assert!(StabilityPoint::new(1.5, 0.0, 0.0).is_err());
        assert!(StabilityPoint::new(0.5, -1.0, 0.0).is_err());
        assert!(StabilityPoint::new(0.5, 1.0, -1.0).is_err());
        assert!(StabilityPoint::new(0.5, 1.0, f64::NAN).is_err());
        assert!(StabilityPoint::new(0.5, 1.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn scan_order_and_max() {
        let grid = ScanGrid {
            b: linspace(0.0, 1.0, 3),
            k_dt: linspace(0.0, 2.0 * PI, 5),
            xi: alloc::vec![0.0, 1.0, f64::INFINITY],
        };
        let res = scan(&lookup("BE").unwrap(), &grid).unwrap();
        assert_eq!(res.rows.len(), 45);
        assert_eq!(
            res.rows[4].point,
            StabilityPoint {
                b: 0.0,
                k_dt: PI / 2.0,
                xi: 1.0
            }
        );
        assert!(res.max_rho() <= 1.0 + 1e-12);
        assert!(res.rows.iter().all(|r| r.lambda1_abs <= r.lambda2_abs));
        assert!(scan(&lookup("BE").unwrap(), &ScanGrid::default()).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 1.0, 11);
        assert_eq!(v.len(), 11);
        assert_eq!(v[10], 1.0);
        assert_eq!(linspace(2.0, 3.0, 1), alloc::vec![2.0]);
    }
}
