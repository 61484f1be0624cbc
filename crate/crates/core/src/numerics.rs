//! Dense complex linear algebra and small numerical helpers.
//!
//! The boundary-condition systems assembled elsewhere in this crate are
//! tiny (at most a couple of dozen unknowns), dense, and complex-valued,
//! so a straightforward LU factorization with partial pivoting is the
//! right tool. The helpers here fix the conventions the physics relies
//! on: which square-root branch decays, how principal-value phases are
//! stitched into a continuous curve, and how derivatives are estimated.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// f64 math (sqrt, floor, trig, ...) for the no_std build; test, clippy,
// and rustdoc passes resolve the same calls through std or core
// intrinsics instead, so the lint is silenced rather than cfg'd.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Pivot magnitudes below this are treated as exact singularity.
const PIVOT_FLOOR: f64 = 1e-300;

/// Arguments with magnitude below this have no meaningful decay branch.
const ZERO_ARGUMENT_FLOOR: f64 = 1e-14;

/// Square, dense, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            entries: alloc::vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from rows; every row must have the same length as the row count.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    /// Matrix-vector product, used by tests to check residuals.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut out = Vec::with_capacity(self.dim);
        for row in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, value) in x.iter().enumerate() {
                acc += self.get(row, col) * value;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Solve `A x = b` by LU factorization with partial pivoting.
///
/// `A` is copied; the factorization works on the copy. Returns
/// `SingularMatrix` when the best available pivot falls below 1e-300 in
/// magnitude or the solution contains non-finite entries, and
/// `DimensionMismatch` when `b` does not match the matrix dimension.
///
/// For the well-scaled systems assembled in this crate the residual
/// `max|A x - b|` stays below `1e-10 * (1 + max|b|)`; the integration
/// tests assert exactly that on captured systems.
pub fn solve_dense(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.entries.clone();
    let mut x: Vec<Complex64> = b.to_vec();

    for col in 0..n {
        // Partial pivoting: bring the largest remaining entry of this
        // column to the diagonal. hypot-based norm avoids spurious
        // under/overflow for extreme magnitudes.
        let mut pivot_row = col;
        let mut pivot_mag = m[col * n + col].norm();
        for row in (col + 1)..n {
            let mag = m[row * n + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        // NaN pivots fall through to the singular branch as well.
        if pivot_mag.is_nan() || pivot_mag <= PIVOT_FLOOR {
            return Err(Error::SingularMatrix);
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        for row in (col + 1)..n {
            let factor = m[row * n + col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            m[row * n + col] = Complex64::new(0.0, 0.0);
            for c in (col + 1)..n {
                let delta = factor * m[col * n + c];
                m[row * n + c] -= delta;
            }
            let dx = factor * x[col];
            x[row] -= dx;
        }
    }

    // Back substitution on the upper triangle.
    for row in (0..n).rev() {
        let mut acc = x[row];
        for c in (row + 1)..n {
            acc -= m[row * n + c] * x[c];
        }
        x[row] = acc / m[row * n + row];
    }

    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(x)
}

/// Square root on the branch where `exp(-w x)` decays for growing `x > 0`:
/// `Re(w) > 0`, or `Re(w) = 0` with `Im(w) > 0` for negative real input.
///
/// This is the branch that turns `V - E` into the evanescent wavenumber
/// `kappa` inside a barrier: under it, `E < V` gives decay and `E > V`
/// gives an oscillating (propagating) solution with positive wavenumber.
/// Inputs with magnitude below 1e-14 are rejected as `ZeroArgument`.
pub fn decaying_sqrt(z: Complex64) -> Result<Complex64> {
    if z.norm() < ZERO_ARGUMENT_FLOOR {
        return Err(Error::ZeroArgument);
    }
    // Exactly real arguments are handled explicitly so that a negative
    // zero imaginary part (common after `V - E` arithmetic) cannot flip
    // the propagating branch.
    if z.im == 0.0 {
        return Ok(if z.re > 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        });
    }
    let w = z.sqrt();
    // The principal branch already has Re >= 0; fold the mirror image
    // back just in case rounding lands on the negative side.
    Ok(if w.re >= 0.0 { w } else { -w })
}

/// Largest decay exponent `Re(kappa) * length` the matching systems
/// accept. `cosh`/`exp` overflow f64 just above 709, so stopping at 600
/// leaves headroom while covering every physically meaningful regime
/// (amplitudes are already ~1e-260 there).
pub const MAX_DECAY_EXPONENT: f64 = 600.0;

/// Rejects decay exponents too large for f64 range with
/// [`Error::RangeExceeded`].
pub fn guard_exponent(exponent: f64) -> Result<()> {
    if !exponent.is_finite() || exponent > MAX_DECAY_EXPONENT {
        return Err(Error::RangeExceeded { exponent });
    }
    Ok(())
}

/// Map an angle difference into the interval `(-pi, pi]`.
fn wrap_to_pi(d: f64) -> f64 {
    let tau = 2.0 * PI;
    let mut r = d % tau;
    if r > PI {
        r -= tau;
    } else if r <= -PI {
        r += tau;
    }
    r
}

/// Remove 2-pi jumps from a sequence of principal-value phases.
///
/// The first sample is kept as-is; each subsequent step is folded into
/// `(-pi, pi]` and accumulated, which reconstructs a continuous phase
/// curve as long as the true phase moves by less than pi per sample.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut acc = match phases.first() {
        Some(&p) => p,
        None => return out,
    };
    out.push(acc);
    let mut last_raw = acc;
    for &p in &phases[1..] {
        acc += wrap_to_pi(p - last_raw);
        last_raw = p;
        out.push(acc);
    }
    out
}

/// Centered two-point derivative `(f(x+h) - f(x-h)) / (2h)`.
///
/// `h` must be positive; failures of `f` propagate unchanged.
pub fn central_derivative<E, F>(f: F, x: f64, h: f64) -> core::result::Result<f64, E>
where
    F: Fn(f64) -> core::result::Result<f64, E>,
{
    debug_assert!(h > 0.0, "step must be positive");
    let plus = f(x + h)?;
    let minus = f(x - h)?;
    Ok((plus - minus) / (2.0 * h))
}
