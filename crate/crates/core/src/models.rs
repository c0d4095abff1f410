//! Kinetic models: collision invariants, moments, equilibria and the
//! relaxation operator `(M_U - f) / eps`.
//!
//! Distributions are slices indexed by velocity, in the order of the
//! model's [`VelocitySet`].

use alloc::vec::Vec;
use core::fmt;

/// Largest number of collision invariants of any model (BGK in 1D).
pub const MAX_INVARIANTS: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unphysical macroscopic state: rho = {rho}, T = {temperature}")]
    Unphysical { rho: f64, temperature: f64 },
    #[error("non-finite distribution value")]
    NonFinite,
    #[error("distribution has {got} entries, velocity set has {expected}")]
    Length { got: usize, expected: usize },
    #[error("invalid velocity set: {0}")]
    VelocitySet(&'static str),
    #[error("relaxation time must be positive, got {0}")]
    Epsilon(f64),
    #[error("discrete Maxwellian did not converge (residual {residual:e})")]
    MaxwellianNotConverged { residual: f64 },
}

/// Moment vector `U = <f phi>`: one entry for the two-velocity models,
/// `(rho, rho u, E)` for BGK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    values: [f64; MAX_INVARIANTS],
    len: usize,
}

impl MacroState {
    pub fn scalar(u: f64) -> Self {
        Self {
            values: [u, 0.0, 0.0],
            len: 1,
        }
    }

    pub fn conserved(rho: f64, momentum: f64, energy: f64) -> Self {
        Self {
            values: [rho, momentum, energy],
            len: 3,
        }
    }

    /// `(rho, u, T)` to `(rho, rho u, E)` with `E = rho u^2 / 2 + rho T / 2`.
    pub fn from_primitive(rho: f64, u: f64, temperature: f64) -> Self {
        Self::conserved(rho, rho * u, 0.5 * rho * (u * u + temperature))
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert!(v.len() <= MAX_INVARIANTS && !v.is_empty());
        let mut values = [0.0; MAX_INVARIANTS];
        values[..v.len()].copy_from_slice(v);
        Self {
            values,
            len: v.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn rho(&self) -> f64 {
        self.values[0]
    }

    /// `u = (rho u) / rho`; `NaN` for the scalar models.
    pub fn velocity(&self) -> f64 {
        if self.len < 3 {
            f64::NAN
        } else {
            self.values[1] / self.values[0]
        }
    }

    /// `T = 2E/rho - u^2`; `NaN` for the scalar models.
    pub fn temperature(&self) -> f64 {
        if self.len < 3 {
            return f64::NAN;
        }
        let u = self.velocity();
        2.0 * self.values[2] / self.values[0] - u * u
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }
}

impl fmt::Display for MacroState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Discrete velocities with positive quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySet {
    velocities: Vec<f64>,
    weights: Vec<f64>,
}

impl VelocitySet {
    pub fn discrete(velocities: Vec<f64>, weights: Vec<f64>) -> Result<Self, ModelError> {
        if velocities.is_empty() {
            return Err(ModelError::VelocitySet("no velocities"));
        }
        if velocities.len() != weights.len() {
            return Err(ModelError::VelocitySet(
                "velocities and weights differ in length",
            ));
        }
        if velocities.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::VelocitySet("non-finite velocity"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(ModelError::VelocitySet("weights must be positive"));
        }
        Ok(Self {
            velocities,
            weights,
        })
    }

    /// `{+1, -1}` with unit weights.
    pub fn two_velocity() -> Self {
        Self {
            velocities: alloc::vec![1.0, -1.0],
            weights: alloc::vec![1.0, 1.0],
        }
    }

    /// `n` cell midpoints of `[v_min, v_max]`, each with weight `dv`.
    pub fn uniform(v_min: f64, v_max: f64, n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::VelocitySet("need at least one velocity"));
        }
        if !(v_max > v_min && v_min.is_finite() && v_max.is_finite()) {
            return Err(ModelError::VelocitySet("need finite v_min < v_max"));
        }
        let dv = (v_max - v_min) / n as f64;
        let velocities = (0..n).map(|j| v_min + (j as f64 + 0.5) * dv).collect();
        Self::discrete(velocities, alloc::vec![dv; n])
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `max |v|`, the transport speed that sets `dt`.
    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `<g> = sum_j w_j g(v_j)`.
    pub fn average(&self, g: impl Fn(usize, f64) -> f64) -> f64 {
        self.velocities
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(j, (&v, &w))| w * g(j, v))
            .sum()
    }
}

/// A relaxation model `f_t + v f_x = (M_U - f) / eps`.
pub trait KineticModel: Send + Sync {
    fn name(&self) -> &str;

    fn velocity_set(&self) -> &VelocitySet;

    /// Number of collision invariants `K`.
    fn invariant_count(&self) -> usize;

    /// `phi_i(v)`.
    fn invariant(&self, i: usize, v: f64) -> f64;

    /// `U = <f phi>`.
    fn moments(&self, f: &[f64]) -> Result<MacroState, ModelError>;

    /// Writes `M_U` into `out`.
    fn equilibrium_into(&self, u: &MacroState, out: &mut [f64]) -> Result<(), ModelError>;

    fn equilibrium(&self, u: &MacroState) -> Result<Vec<f64>, ModelError> {
        let mut out = alloc::vec![0.0; self.velocity_set().len()];
        self.equilibrium_into(u, &mut out)?;
        Ok(out)
    }

    /// `(M_U[f] - f) / eps`.
    fn relaxation(&self, f: &[f64], eps: f64) -> Result<Vec<f64>, ModelError> {
        if !(eps > 0.0) {
            return Err(ModelError::Epsilon(eps));
        }
        let mut m = self.equilibrium(&self.moments(f)?)?;
        for (mi, fi) in m.iter_mut().zip(f) {
            *mi = (*mi - fi) / eps;
        }
        Ok(m)
    }

    fn max_speed(&self) -> f64 {
        self.velocity_set().max_speed()
    }

    /// `<g phi_i>` for every invariant, without any physicality check.
    fn raw_moments(&self, g: &[f64]) -> MacroState {
        let vs = self.velocity_set();
        let k = self.invariant_count();
        let mut out = [0.0; MAX_INVARIANTS];
        for (i, o) in out.iter_mut().enumerate().take(k) {
            *o = vs.average(|j, v| g[j] * self.invariant(i, v));
        }
        MacroState::from_slice(&out[..k])
    }
}

fn check_len(f: &[f64], n: usize) -> Result<(), ModelError> {
    if f.len() != n {
        return Err(ModelError::Length {
            got: f.len(),
            expected: n,
        });
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    Ok(())
}

/// `f_t + v f_x = Q(f) / eps` on `{+1, -1}` with
/// `M_U = ((1+b)/2 U, (1-b)/2 U)`, the kinetic form of
/// `u_t + v_x = 0, v_t + u_x = (b u - v) / eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTwoVelocity {
    b: f64,
    vs: VelocitySet,
}

impl LinearTwoVelocity {
    pub fn new(b: f64) -> Self {
        Self {
            b,
            vs: VelocitySet::two_velocity(),
        }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `Q(f) = 1/2 (b (f1 + f2) - (f1 - f2)) (1, -1)`.
    pub fn collision(&self, f: [f64; 2]) -> [f64; 2] {
        let q = 0.5 * (self.b * (f[0] + f[1]) - (f[0] - f[1]));
        [q, -q]
    }
}

impl KineticModel for LinearTwoVelocity {
    fn name(&self) -> &str {
        "linear"
    }

    fn velocity_set(&self) -> &VelocitySet {
        &self.vs
    }

    fn invariant_count(&self) -> usize {
        1
    }

    fn invariant(&self, _i: usize, _v: f64) -> f64 {
        1.0
    }

    fn moments(&self, f: &[f64]) -> Result<MacroState, ModelError> {
        check_len(f, 2)?;
        Ok(MacroState::scalar(f[0] + f[1]))
    }

    fn equilibrium_into(&self, u: &MacroState, out: &mut [f64]) -> Result<(), ModelError> {
        let u = u.rho();
        out[0] = 0.5 * (1.0 + self.b) * u;
        out[1] = 0.5 * (1.0 - self.b) * u;
        Ok(())
    }
}

/// Two-velocity form of `u_t + v_x = 0, v_t + u_x = (b u^2 - v) / eps`
/// with `M_U = ((b u^2 + u)/2, (-b u^2 + u)/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearTwoVelocity {
    b: f64,
    vs: VelocitySet,
}

impl NonlinearTwoVelocity {
    pub fn new(b: f64) -> Self {
        Self {
            b,
            vs: VelocitySet::two_velocity(),
        }
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

impl KineticModel for NonlinearTwoVelocity {
    fn name(&self) -> &str {
        "nonlinear"
    }

    fn velocity_set(&self) -> &VelocitySet {
        &self.vs
    }

    fn invariant_count(&self) -> usize {
        1
    }

    fn invariant(&self, _i: usize, _v: f64) -> f64 {
        1.0
    }

    fn moments(&self, f: &[f64]) -> Result<MacroState, ModelError> {
        check_len(f, 2)?;
        Ok(MacroState::scalar(f[0] + f[1]))
    }

    fn equilibrium_into(&self, u: &MacroState, out: &mut [f64]) -> Result<(), ModelError> {
        let u = u.rho();
        let flux = self.b * u * u;
        out[0] = 0.5 * (flux + u);
        out[1] = 0.5 * (-flux + u);
        Ok(())
    }
}

/// Maxwellian `rho / sqrt(2 pi T) exp(-(v - u)^2 / (2T))` at each velocity.
pub fn maxwellian_into(vs: &VelocitySet, rho: f64, u: f64, temperature: f64, out: &mut [f64]) {
    let amp = rho / libm::sqrt(2.0 * core::f64::consts::PI * temperature);
    let inv = 0.5 / temperature;
    for (o, &v) in out.iter_mut().zip(vs.velocities()) {
        let d = v - u;
        *o = amp * libm::exp(-d * d * inv);
    }
}

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 30;

/// 1D1V BGK: `phi = (1, v, v^2/2)`, `M_U` the local Maxwellian.
///
/// By default the equilibrium is the discretely conservative Maxwellian:
/// its parameters `(rho~, u~, T~)` are adjusted by Newton iteration until
/// its discrete moments reproduce `U`, so that `<(M_U - f) phi> = 0` holds
/// on the velocity grid to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Bgk {
    vs: VelocitySet,
    conservative: bool,
}

impl Bgk {
    pub fn new(vs: VelocitySet) -> Self {
        Self {
            vs,
            conservative: true,
        }
    }

    /// `N_v` midpoints of `[-v_max, v_max]`.
    pub fn uniform(v_max: f64, n_v: usize) -> Result<Self, ModelError> {
        Ok(Self::new(VelocitySet::uniform(-v_max, v_max, n_v)?))
    }

    /// Use the analytic Maxwellian sampled at the grid instead.
    pub fn with_conservative_maxwellian(mut self, on: bool) -> Self {
        self.conservative = on;
        self
    }

    pub fn is_conservative(&self) -> bool {
        self.conservative
    }

    fn residual(&self, target: &[f64; 3], m: &[f64]) -> [f64; 3] {
        let mut r = [0.0; 3];
        for ((&v, &w), &mj) in self.vs.velocities().iter().zip(self.vs.weights()).zip(m) {
            let wm = w * mj;
            r[0] += wm;
            r[1] += wm * v;
            r[2] += wm * 0.5 * v * v;
        }
        for i in 0..3 {
            r[i] -= target[i];
        }
        r
    }

    fn discrete_maxwellian(&self, u: &MacroState, out: &mut [f64]) -> Result<(), ModelError> {
        let target = [u.as_slice()[0], u.as_slice()[1], u.as_slice()[2]];
        let scale = target.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let (mut rho, mut vel, mut temp) = (u.rho(), u.velocity(), u.temperature());
        maxwellian_into(&self.vs, rho, vel, temp, out);
        let mut r = self.residual(&target, out);
        let mut norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for _ in 0..NEWTON_MAX_ITER {
            if norm <= NEWTON_TOL * scale {
                return Ok(());
            }
            // Jacobian of the discrete moments w.r.t. (rho, u, T).
            let mut jac = [[0.0; 3]; 3];
            for ((&v, &w), &mj) in self
                .vs
                .velocities()
                .iter()
                .zip(self.vs.weights())
                .zip(&*out)
            {
                let d = v - vel;
                let dm = [
                    mj / rho,
                    mj * d / temp,
                    mj * (d * d / (2.0 * temp * temp) - 0.5 / temp),
                ];
                let phi = [1.0, v, 0.5 * v * v];
                for i in 0..3 {
                    for p in 0..3 {
                        jac[i][p] += w * phi[i] * dm[p];
                    }
                }
            }
            let Some(delta) = solve3(jac, r) else {
                break;
            };
            let (nr, nv, nt) = (rho - delta[0], vel - delta[1], temp - delta[2]);
            if !(nr > 0.0 && nt > 0.0 && nv.is_finite()) {
                break;
            }
            (rho, vel, temp) = (nr, nv, nt);
            maxwellian_into(&self.vs, rho, vel, temp, out);
            r = self.residual(&target, out);
            norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        }
        if norm <= NEWTON_TOL * scale {
            Ok(())
        } else {
            Err(ModelError::MaxwellianNotConverged { residual: norm })
        }
    }
}

/// Solves the 3x3 system `a x = r` by Cramer's rule.
fn solve3(a: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = r[row];
        }
        *xc = det3(&m) / d;
    }
    Some(x)
}

impl KineticModel for Bgk {
    fn name(&self) -> &str {
        "bgk"
    }

    fn velocity_set(&self) -> &VelocitySet {
        &self.vs
    }

    fn invariant_count(&self) -> usize {
        3
    }

    fn invariant(&self, i: usize, v: f64) -> f64 {
        match i {
            0 => 1.0,
            1 => v,
            _ => 0.5 * v * v,
        }
    }

    fn moments(&self, f: &[f64]) -> Result<MacroState, ModelError> {
        check_len(f, self.vs.len())?;
        let u = self.raw_moments(f);
        let (rho, temperature) = (u.rho(), u.temperature());
        if !(rho > 0.0 && temperature > 0.0) {
            return Err(ModelError::Unphysical { rho, temperature });
        }
        Ok(u)
    }

    fn equilibrium_into(&self, u: &MacroState, out: &mut [f64]) -> Result<(), ModelError> {
        let (rho, temperature) = (u.rho(), u.temperature());
        if !(rho > 0.0 && temperature > 0.0) {
            return Err(ModelError::Unphysical { rho, temperature });
        }
        if self.conservative {
            self.discrete_maxwellian(u, out)
        } else {
            maxwellian_into(&self.vs, rho, u.velocity(), temperature, out);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_velocity_examples() {
        let lin = LinearTwoVelocity::new(0.6);
        assert_eq!(lin.moments(&[0.8, 0.2]).unwrap().rho(), 1.0);
        let m = lin.equilibrium(&MacroState::scalar(1.0)).unwrap();
        assert!((m[0] - 0.8).abs() < 1e-15 && (m[1] - 0.2).abs() < 1e-15);
        let q = lin.relaxation(&[1.0, 0.0], 1.0).unwrap();
        assert!((q[0] + 0.2).abs() < 1e-15 && (q[1] - 0.2).abs() < 1e-15);
        assert_eq!(lin.collision([1.0, 0.0]), [-0.2, 0.2]);

        let nl = NonlinearTwoVelocity::new(0.2);
        let m = nl.equilibrium(&MacroState::scalar(0.5)).unwrap();
        assert!((m[0] - 0.275).abs() < 1e-15 && (m[1] - 0.225).abs() < 1e-15);
        let (u, v) = (0.7, -0.1);
        assert!((nl.moments(&[(u + v) / 2.0, (u - v) / 2.0]).unwrap().rho() - u).abs() < 1e-15);
    }

    #[test]
    fn relaxation_rejects_bad_eps() {
        let lin = LinearTwoVelocity::new(0.6);
        assert_eq!(
            lin.relaxation(&[1.0, 0.0], 0.0),
            Err(ModelError::Epsilon(0.0))
        );
        assert!(lin.moments(&[1.0]).is_err());
        assert_eq!(lin.moments(&[f64::NAN, 1.0]), Err(ModelError::NonFinite));
    }

    #[test]
    fn uniform_grid() {
        let vs = VelocitySet::uniform(-15.0, 15.0, 100).unwrap();
        assert_eq!(vs.len(), 100);
        assert!((vs.weights()[0] - 0.3).abs() < 1e-15);
        assert!((vs.velocities()[0] + 14.85).abs() < 1e-12);
        assert!((vs.max_speed() - 14.85).abs() < 1e-12);
        assert!(VelocitySet::uniform(1.0, 1.0, 3).is_err());
        assert!(VelocitySet::discrete(alloc::vec![1.0], alloc::vec![0.0]).is_err());
    }

    #[test]
    fn bgk_peak_and_moments() {
        let bgk = Bgk::uniform(15.0, 100)
            .unwrap()
            .with_conservative_maxwellian(false);
        let mut m = alloc::vec![0.0; 100];
        maxwellian_into(bgk.velocity_set(), 1.0, 0.0, 1.0, &mut m);
        let u = bgk.moments(&m).unwrap();
        assert!((u.rho() - 1.0).abs() < 1e-10);
        assert!((u.temperature() - 1.0).abs() < 1e-10);
        let vs = VelocitySet::discrete(alloc::vec![0.0], alloc::vec![1.0]).unwrap();
        let mut peak = [0.0];
        maxwellian_into(&vs, 1.0, 0.0, 1.0, &mut peak);
        assert!((peak[0] - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn bgk_unphysical() {
        let bgk = Bgk::uniform(15.0, 100).unwrap();
        assert!(matches!(
            bgk.moments(&[0.0; 100]),
            Err(ModelError::Unphysical { .. })
        ));
        let bad = MacroState::conserved(1.0, 0.0, -1.0);
        assert!(bgk.equilibrium(&bad).is_err());
    }

    #[test]
    fn conservative_maxwellian_matches_moments_on_coarse_grid() {
        // A coarse grid where the sampled Gaussian misses its moments.
        let bgk = Bgk::uniform(6.0, 16).unwrap();
        let u = MacroState::from_primitive(1.3, 0.4, 0.3);
        let m = bgk.equilibrium(&u).unwrap();
        let back = bgk.raw_moments(&m);
        for i in 0..3 {
            assert!((back.as_slice()[i] - u.as_slice()[i]).abs() < 1e-12);
        }
        let analytic = bgk.clone().with_conservative_maxwellian(false);
        let back = analytic.raw_moments(&analytic.equilibrium(&u).unwrap());
        assert!((back.as_slice()[2] - u.as_slice()[2]).abs() > 1e-8);
    }

    #[test]
    fn primitive_round_trip() {
        let u = MacroState::from_primitive(2.0, -0.5, 1.5);
        assert!((u.rho() - 2.0).abs() < 1e-15);
        assert!((u.velocity() + 0.5).abs() < 1e-15);
        assert!((u.temperature() - 1.5).abs() < 1e-15);
        assert!(MacroState::scalar(1.0).temperature().is_nan());
    }
}
