//! SMO for the C-SVC dual, written in minimization form:
//!
//! ```text
//! min  1/2 a'Qa - e'a    s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Each step picks the maximal violating pair
//! `i = argmax_{t in I_up} -y_t G_t`, `j = argmin_{t in I_low} -y_t G_t`
//! and solves the two-variable subproblem analytically.

use super::qmatrix::KernelRows;
use crate::scalar::Scalar;

/// Curvature floor for pairs whose kernel distance is numerically zero.
const TAU: f64 = 1e-12;

pub(crate) struct Solution<T> {
    pub alpha: Vec<T>,
    /// Gradient of the minimization objective at `alpha`.
    pub grad: Vec<T>,
    pub pair_updates: u64,
    pub converged: bool,
    /// `m(a) - M(a)` at termination.
    pub gap: T,
}

pub(crate) struct Problem<'a, 'k, T: Scalar> {
    pub y: &'a [T],
    pub c: T,
    pub tolerance: T,
    pub max_pair_updates: u64,
    pub kernel: KernelRows<'k, T>,
}

#[inline]
fn in_up<T: Scalar>(y: T, a: T, c: T) -> bool {
    (y > T::zero() && a < c) || (y < T::zero() && a > T::zero())
}

#[inline]
fn in_low<T: Scalar>(y: T, a: T, c: T) -> bool {
    (y > T::zero() && a > T::zero()) || (y < T::zero() && a < c)
}

/// Maximal violating pair and the current gap `m - M`.
fn select<T: Scalar>(y: &[T], alpha: &[T], grad: &[T], c: T) -> Option<(usize, usize, T)> {
    let mut best_up: Option<(usize, T)> = None;
    let mut best_low: Option<(usize, T)> = None;
    for t in 0..y.len() {
        let v = -y[t] * grad[t];
        if in_up(y[t], alpha[t], c) && best_up.is_none_or(|(_, m)| v > m) {
            best_up = Some((t, v));
        }
        if in_low(y[t], alpha[t], c) && best_low.is_none_or(|(_, m)| v < m) {
            best_low = Some((t, v));
        }
    }
    match (best_up, best_low) {
        (Some((i, m)), Some((j, lo))) => Some((i, j, m - lo)),
        _ => None,
    }
}

impl<T: Scalar> Problem<'_, '_, T> {
    /// Runs SMO, calling `observe` with the iterate after every pair update.
    pub fn solve_observed(mut self, mut observe: impl FnMut(&[T])) -> Solution<T> {
        let n = self.y.len();
        let y = self.y;
        let c = self.c;
        let tau = T::lit(TAU);
        let diag = self.kernel.diagonal();
        let mut alpha = vec![T::zero(); n];
        let mut grad = vec![-T::one(); n];
        let mut pair_updates = 0u64;

        loop {
            let Some((i, j, gap)) = select(y, &alpha, &grad, c) else {
                return Solution {
                    alpha,
                    grad,
                    pair_updates,
                    converged: true,
                    gap: T::zero(),
                };
            };
            if gap <= self.tolerance || pair_updates >= self.max_pair_updates {
                return Solution {
                    converged: gap <= self.tolerance,
                    alpha,
                    grad,
                    pair_updates,
                    gap,
                };
            }

            let ki = self.kernel.row(i);
            let kj = self.kernel.row(j);
            let (old_i, old_j) = (alpha[i], alpha[j]);
            let (mut ai, mut aj) = (old_i, old_j);

            if y[i] != y[j] {
                let mut quad = diag[i] + diag[j] - (ki[j] + ki[j]);
                if quad <= T::zero() {
                    quad = tau;
                }
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = ai - aj;
                ai += delta;
                aj += delta;
                if diff > T::zero() {
                    if aj < T::zero() {
                        aj = T::zero();
                        ai = diff;
                    }
                } else if ai < T::zero() {
                    ai = T::zero();
                    aj = -diff;
                }
                if diff > T::zero() {
                    if ai > c {
                        ai = c;
                        aj = c - diff;
                    }
                } else if aj > c {
                    aj = c;
                    ai = c + diff;
                }
            } else {
                let mut quad = diag[i] + diag[j] - (ki[j] + ki[j]);
                if quad <= T::zero() {
                    quad = tau;
                }
                let delta = (grad[i] - grad[j]) / quad;
                let sum = ai + aj;
                ai -= delta;
                aj += delta;
                if sum > c {
                    if ai > c {
                        ai = c;
                        aj = sum - c;
                    }
                } else if aj < T::zero() {
                    aj = T::zero();
                    ai = sum;
                }
                if sum > c {
                    if aj > c {
                        aj = c;
                        ai = sum - c;
                    }
                } else if ai < T::zero() {
                    ai = T::zero();
                    aj = sum;
                }
            }

            alpha[i] = ai;
            alpha[j] = aj;
            let di = ai - old_i;
            let dj = aj - old_j;
            // G_t += Q_ti * di + Q_tj * dj with Q_ts = y_t y_s K_ts.
            let si = y[i] * di;
            let sj = y[j] * dj;
            for t in 0..n {
                grad[t] += y[t] * (ki[t] * si + kj[t] * sj);
            }
            pair_updates += 1;
            observe(&alpha);
        }
    }
}

/// Bias from the final gradient: the mean of `-y_i G_i` over free vectors, or
/// the midpoint of the feasible interval when every vector sits at a bound.
pub(crate) fn bias<T: Scalar>(y: &[T], alpha: &[T], grad: &[T], c: T) -> T {
    let mut free_sum = T::zero();
    let mut n_free = 0usize;
    let mut lower = T::neg_infinity();
    let mut upper = T::infinity();
    for t in 0..y.len() {
        let v = -y[t] * grad[t];
        if alpha[t] > T::zero() && alpha[t] < c {
            free_sum += v;
            n_free += 1;
        } else {
            // I_up members bound b from below, I_low members from above.
            if in_up(y[t], alpha[t], c) {
                lower = lower.max(v);
            }
            if in_low(y[t], alpha[t], c) {
                upper = upper.min(v);
            }
        }
    }
    if n_free > 0 {
        free_sum / T::from_usize_lossy(n_free)
    } else if lower.is_finite() && upper.is_finite() {
        (lower + upper) / T::lit(2.0)
    } else if lower.is_finite() {
        lower
    } else {
        upper
    }
}
