//! Stiffly accurate DIRK tableaus and their Shu-Osher form.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Absolute tolerance used by [`ButcherTableau::validate`].
pub const VALIDATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableauError {
    #[error("tableau needs at least one stage")]
    Empty,
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Shape {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("nonpositive diagonal a_{{{stage}{stage}}} = {value}")]
    NonpositiveDiagonal { stage: usize, value: f64 },
    #[error("tableau `{name}` failed validation: {report}")]
    Invalid {
        name: String,
        report: ValidationReport,
    },
}

/// An `s`-stage diagonally implicit Runge-Kutta tableau `(A, b, c)`.
///
/// Stages are 0-based in the API; messages use the 1-based convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    name: String,
    stages: usize,
    /// Row-major `s x s`.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    stiffly_accurate: bool,
}

impl ButcherTableau {
    /// Builds a tableau declared stiffly accurate. Only shapes are checked
    /// here; use [`validate`](Self::validate) for the numerical invariants.
    pub fn new(
        name: impl Into<String>,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self, TableauError> {
        let stages = c.len();
        if stages == 0 {
            return Err(TableauError::Empty);
        }
        if a.len() != stages * stages {
            return Err(TableauError::Shape {
                what: "A",
                got: a.len(),
                expected: stages * stages,
            });
        }
        if b.len() != stages {
            return Err(TableauError::Shape {
                what: "b",
                got: b.len(),
                expected: stages,
            });
        }
        Ok(Self {
            name: name.into(),
            stages,
            a,
            b,
            c,
            stiffly_accurate: true,
        })
    }

    /// Builds an SA tableau from the lower-triangular rows of `A`; `b` is
    /// the last row.
    pub fn from_rows(
        name: impl Into<String>,
        rows: &[&[f64]],
        c: &[f64],
    ) -> Result<Self, TableauError> {
        let s = c.len();
        if rows.len() != s {
            return Err(TableauError::Shape {
                what: "rows of A",
                got: rows.len(),
                expected: s,
            });
        }
        let mut a = vec![0.0; s * s];
        for (k, row) in rows.iter().enumerate() {
            if row.len() > s {
                return Err(TableauError::Shape {
                    what: "row of A",
                    got: row.len(),
                    expected: k + 1,
                });
            }
            a[k * s..k * s + row.len()].copy_from_slice(row);
        }
        let b = a[(s - 1) * s..].to_vec();
        Self::new(name, a, b, c.to_vec())
    }

    /// Sets whether the tableau claims the stiffly accurate property.
    pub fn declare_stiffly_accurate(mut self, sa: bool) -> Self {
        self.stiffly_accurate = sa;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    #[inline]
    pub fn a(&self, k: usize, j: usize) -> f64 {
        self.a[k * self.stages + j]
    }

    pub fn a_row(&self, k: usize) -> &[f64] {
        &self.a[k * self.stages..(k + 1) * self.stages]
    }

    pub fn a_matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn diagonal(&self, k: usize) -> f64 {
        self.a(k, k)
    }

    pub fn is_declared_stiffly_accurate(&self) -> bool {
        self.stiffly_accurate
    }

    /// A lower-triangular `A` is invertible iff no diagonal entry vanishes.
    pub fn is_invertible(&self) -> bool {
        (0..self.stages).all(|k| self.diagonal(k) != 0.0)
    }

    /// Checks every tableau invariant and lists the violations.
    pub fn validate(&self) -> ValidationReport {
        let s = self.stages;
        let mut violations = Vec::new();
        if self
            .a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .any(|x| !x.is_finite())
        {
            violations.push(Violation::NonFinite);
        }
        for k in 0..s {
            for j in k + 1..s {
                let v = self.a(k, j);
                if v != 0.0 {
                    violations.push(Violation::NotLowerTriangular {
                        row: k,
                        col: j,
                        value: v,
                    });
                }
            }
            let d = self.diagonal(k);
            // Written so that NaN is reported as well.
            if !(d > 0.0) {
                violations.push(Violation::NonpositiveDiagonal { stage: k, value: d });
            }
            let row_sum: f64 = self.a_row(k)[..=k].iter().sum();
            if !((row_sum - self.c[k]).abs() <= VALIDATION_TOL) {
                violations.push(Violation::RowSum {
                    stage: k,
                    c: self.c[k],
                    row_sum,
                });
            }
        }
        if self.stiffly_accurate {
            let c_last = self.c[s - 1];
            if !((c_last - 1.0).abs() <= VALIDATION_TOL) {
                violations.push(Violation::LastAbscissa { c: c_last });
            }
            for j in 0..s {
                let diff = (self.a(s - 1, j) - self.b[j]).abs();
                if !(diff <= VALIDATION_TOL) {
                    violations.push(Violation::WeightsMismatch {
                        col: j,
                        a: self.a(s - 1, j),
                        b: self.b[j],
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Validates and returns `self`, or the report as an error.
    pub fn validated(self) -> Result<Self, TableauError> {
        let report = self.validate();
        if report.is_empty() {
            Ok(self)
        } else {
            Err(TableauError::Invalid {
                name: self.name,
                report,
            })
        }
    }

    /// Rewrites the stage equations as
    /// `f(k) = (1 - sum_j b_kj) f^n + sum_j b_kj f(j) + dt a_kk Q(f(k))`.
    pub fn to_shu_osher(&self) -> Result<ShuOsherForm, TableauError> {
        let s = self.stages;
        for k in 0..s {
            let d = self.diagonal(k);
            if !(d > 0.0) {
                return Err(TableauError::NonpositiveDiagonal { stage: k, value: d });
            }
        }
        let mut b = vec![0.0; s * s];
        for k in 1..s {
            for j in (0..k).rev() {
                let mut acc = self.a(k, j) / self.diagonal(j);
                for l in j + 1..k {
                    acc -= self.a(k, l) * b[l * s + j] / self.diagonal(l);
                }
                b[k * s + j] = acc;
            }
        }
        Ok(ShuOsherForm {
            stages: s,
            b,
            diag: (0..s).map(|k| self.diagonal(k)).collect(),
            c: self.c.clone(),
        })
    }
}

impl fmt::Display for ButcherTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} stages)", self.name, self.stages)?;
        for k in 0..self.stages {
            write!(f, "{:>22.15e} |", self.c[k])?;
            for j in 0..=k {
                write!(f, " {:>22.15e}", self.a(k, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "{:>22} |", "")?;
        for bj in &self.b {
            write!(f, " {:>22.15e}", bj)?;
        }
        Ok(())
    }
}

/// One violated tableau invariant. Stage indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite,
    NotLowerTriangular { row: usize, col: usize, value: f64 },
    NonpositiveDiagonal { stage: usize, value: f64 },
    RowSum { stage: usize, c: f64, row_sum: f64 },
    LastAbscissa { c: f64 },
    WeightsMismatch { col: usize, a: f64, b: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFinite => write!(f, "non-finite entry"),
            Violation::NotLowerTriangular { row, col, value } => write!(
                f,
                "not lower triangular: a_{}{} = {value}",
                row + 1,
                col + 1
            ),
            Violation::NonpositiveDiagonal { stage, value } => {
                write!(f, "nonpositive diagonal a_{0}{0} = {value}", stage + 1)
            }
            Violation::RowSum { stage, c, row_sum } => write!(
                f,
                "row sum mismatch at stage {}: c = {c}, sum_j a_kj = {row_sum}",
                stage + 1
            ),
            Violation::LastAbscissa { c } => {
                write!(f, "not stiffly accurate: c_s = {c} != 1")
            }
            Violation::WeightsMismatch { col, a, b } => write!(
                f,
                "not stiffly accurate: a_s{} = {a} but b_{} = {b}",
                col + 1,
                col + 1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// True if any violation's message contains `needle`.
    pub fn mentions(&self, needle: &str) -> bool {
        use alloc::string::ToString;
        self.violations
            .iter()
            .any(|v| v.to_string().contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Shu-Osher coefficients `b_kj` (strictly lower triangular) plus the
/// diagonal `a_kk` and the abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuOsherForm {
    stages: usize,
    b: Vec<f64>,
    diag: Vec<f64>,
    c: Vec<f64>,
}

impl ShuOsherForm {
    pub fn stages(&self) -> usize {
        self.stages
    }

    /// `b_kj` for `j < k`.
    #[inline]
    pub fn b(&self, k: usize, j: usize) -> f64 {
        debug_assert!(j < k);
        self.b[k * self.stages + j]
    }

    /// The `b_kj`, `j < k`, of stage `k`.
    pub fn b_row(&self, k: usize) -> &[f64] {
        &self.b[k * self.stages..k * self.stages + k]
    }

    /// Weight of `f^n` in stage `k`: `1 - sum_j b_kj`.
    pub fn base_weight(&self, k: usize) -> f64 {
        1.0 - self.b_row(k).iter().sum::<f64>()
    }

    pub fn diag(&self, k: usize) -> f64 {
        self.diag[k]
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Recovers `A` (row-major) by substituting the stage expansions back
    /// into the Shu-Osher recursion: `a_kl = sum_{j=l}^{k-1} b_kj a_jl`
    /// for `l < k`, `a_kk` on the diagonal.
    pub fn reconstruct_a(&self) -> Vec<f64> {
        let s = self.stages;
        let mut a = vec![0.0; s * s];
        for k in 0..s {
            for l in 0..k {
                a[k * s + l] = (l..k).map(|j| self.b(k, j) * a[j * s + l]).sum();
            }
            a[k * s + k] = self.diag[k];
        }
        a
    }
}

/// Real root near 0.4359 of `6g^3 - 18g^2 + 9g - 1`.
pub fn dirk3_gamma() -> f64 {
    let mut g = 0.4359_f64;
    for _ in 0..50 {
        let p = ((6.0 * g - 18.0) * g + 9.0) * g - 1.0;
        let dp = (18.0 * g - 36.0) * g + 9.0;
        let step = p / dp;
        g -= step;
        if step.abs() <= 1e-17 {
            break;
        }
    }
    g
}

/// Names of the catalog entries, in catalog order.
pub const CATALOG_NAMES: [&str; 11] = [
    "BE",
    "DIRK2",
    "DIRK3-B2",
    "DIRK3-B3",
    "DIRK3-B4",
    "DIRK3-B5",
    "DIRK3-B6",
    "DIRK3-B7",
    "DIRK3-B8",
    "DIRK3-B9",
    "DIRK3-B10",
];

/// The four-stage third-order tableaus satisfying `G_s = 1/6`.
pub const FOUR_STAGE_NAMES: [&str; 8] = [
    "DIRK3-B3",
    "DIRK3-B4",
    "DIRK3-B5",
    "DIRK3-B6",
    "DIRK3-B7",
    "DIRK3-B8",
    "DIRK3-B9",
    "DIRK3-B10",
];

/// Looks up a catalog tableau by name (case-insensitive).
pub fn lookup(name: &str) -> Option<ButcherTableau> {
    let key = CATALOG_NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))?;
    Some(build(key))
}

/// Every catalog tableau, in [`CATALOG_NAMES`] order.
pub fn catalog() -> Vec<ButcherTableau> {
    CATALOG_NAMES.iter().map(|n| build(n)).collect()
}

fn build(name: &str) -> ButcherTableau {
    let t = match name {
        "BE" => ButcherTableau::from_rows(name, &[&[1.0]], &[1.0]),
        "DIRK2" => {
            let nu = 1.0 - core::f64::consts::SQRT_2 / 2.0;
            ButcherTableau::from_rows(name, &[&[nu], &[1.0 - nu, nu]], &[nu, 1.0])
        }
        "DIRK3-B2" => {
            let g = dirk3_gamma();
            let beta1 = -1.5 * g * g + 4.0 * g - 0.25;
            let beta2 = 1.5 * g * g - 5.0 * g + 1.25;
            ButcherTableau::from_rows(
                name,
                &[&[g], &[(1.0 - g) / 2.0, g], &[beta1, beta2, g]],
                &[g, (1.0 + g) / 2.0, 1.0],
            )
        }
        "DIRK3-B3" => {
            let g = 1.482285978970554;
            ButcherTableau::from_rows(
                name,
                &[
                    &[g],
                    &[-0.6416366731243188, g],
                    &[0.849139645385794, -1.961651886907531, g],
                    &[
                        -0.1539440520308502,
                        -1.343634476018696,
                        1.015292549078992,
                        g,
                    ],
                ],
                &[g, 0.840649305846235, 0.369773737448817, 1.0],
            )
        }
        "DIRK3-B4" => {
            let g = 0.1376586577601238;
            ButcherTableau::from_rows(
                name,
                &[
                    &[g],
                    // Printed with one extra digit on the diagonal; kept as printed.
                    &[0.4224699960590905, 0.13765865776012381],
                    &[0.3693098698936377, 0.1203368321096427, g],
                    &[0.330756291090243, 0.2479472066914047, 0.2836378444582285, g],
                ],
                &[g, 0.5601286538192144, 0.6273053597634042, 1.0],
            )
        }
        "DIRK3-B5" => {
            let g = 4.025563222205342;
            ButcherTableau::from_rows(
                name,
                &[
                    &[g],
                    &[-1.13430013749107, g],
                    &[0.8450375691764959, -2.998987699483981, g],
                    &[-1.33950660036402, 4.925563641076701, -6.611620262918024, g],
                ],
                &[g, 2.891263084714272, 1.871613091897857, 1.0],
            )
        }
        "DIRK3-B6" => ButcherTableau::from_rows(
            name,
            &[
                &[0.5],
                &[-0.25, 0.5],
                &[-1.0, 2.0, 0.5],
                &[-1.0 / 12.0, 2.0 / 3.0, -1.0 / 12.0, 0.5],
            ],
            &[0.5, 0.25, 1.5, 1.0],
        ),
        "DIRK3-B7" => {
            let g = 0.153198102889014;
            ButcherTableau::from_rows(
                name,
                &[
                    &[g],
                    &[0.448032922908699, g],
                    &[0.0, 0.021595742145288, g],
                    &[0.0, 0.466155735240408, 0.380646161870577, g],
                ],
                &[g, 0.601231025797714, 0.174793845034303, 1.0],
            )
        }
        "DIRK3-B8" => {
            let g = 0.193031472980198;
            ButcherTableau::from_rows(
                name,
                &[
                    &[g],
                    &[-0.105824758791290, g],
                    &[0.0, 0.286826200347934, g],
                    &[0.0, 0.204409312996206, 0.602559214023597, g],
                ],
                &[g, 0.087206714188908, 0.479857673328132, 1.0],
            )
        }
        "DIRK3-B9" => {
            let g = 0.127224858518235;
            ButcherTableau::from_rows(
                name,
                &[
                    &[g],
                    &[0.204378631032151, g],
                    &[0.0, 0.862399381468212, g],
                    &[0.0, 0.746092420734223, 0.126682720747542, g],
                ],
                &[g, 0.331603489550386, 0.989624239986447, 1.0],
            )
        }
        "DIRK3-B10" => ButcherTableau::from_rows(
            name,
            &[
                &[0.25],
                &[1.0 / 7.0, 0.25],
                &[61.0 / 144.0, -49.0 / 144.0, 0.25],
                &[0.0, 0.0, 0.75, 0.25],
            ],
            &[0.25, 11.0 / 28.0, 1.0 / 3.0, 1.0],
        ),
        _ => unreachable!("unknown catalog entry {name}"),
    };
    t.expect("catalog tableau has consistent shape")
}
