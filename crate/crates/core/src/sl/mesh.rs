use super::SlError;

/// Uniform periodic mesh of `[x_lo, x_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    x_lo: f64,
    x_hi: f64,
    n: usize,
}

impl Mesh1D {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self, SlError> {
        if n == 0 {
            return Err(SlError::Mesh("need at least one element"));
        }
        if !(x_hi > x_lo && x_lo.is_finite() && x_hi.is_finite()) {
            return Err(SlError::Mesh("need finite x_lo < x_hi"));
        }
        Ok(Self { x_lo, x_hi, n })
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Left end of element `e`.
    pub fn left(&self, e: usize) -> f64 {
        self.x_lo + e as f64 * self.dx()
    }

    /// Owning element of `x` (wrapped periodically) and the reference
    /// coordinate in `[-1, 1]`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let l = self.length();
        let mut y = (x - self.x_lo) % l;
        if y < 0.0 {
            y += l;
        }
        let t = y / self.dx();
        let e = (libm::floor(t) as usize).min(self.n - 1);
        let local = t - e as f64;
        (e, 2.0 * local - 1.0)
    }
}
