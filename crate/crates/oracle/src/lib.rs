//! Reference implementations used as test oracles for `gsvma`.
//!
//! Nothing here depends on the library under test: kernels are evaluated from
//! their closed forms, the SVM dual is solved by accelerated projected gradient
//! on the dense problem, and ranking statistics are computed by pair counting.

pub use nalgebra;
pub use rand;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Kernel families in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefKernel {
    Linear,
    Polynomial(u32),
    Rbf(f64),
    Anova(f64, u32),
}

impl RefKernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot = || a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        match *self {
            RefKernel::Linear => dot(),
            RefKernel::Polynomial(d) => (1.0 + dot()).powf(d as f64),
            RefKernel::Rbf(gamma) => {
                (-gamma * a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>()).exp()
            }
            RefKernel::Anova(sigma, d) => a
                .iter()
                .zip(b)
                .map(|(p, q)| (-sigma * (p - q).powi(2)).exp().powf(d as f64))
                .sum(),
        }
    }

    /// Draws a kernel of family `family % 4` with random parameters.
    pub fn random<R: Rng>(family: usize, rng: &mut R) -> Self {
        match family % 4 {
            0 => RefKernel::Linear,
            1 => RefKernel::Polynomial(rng.random_range(1..=3)),
            2 => RefKernel::Rbf(rng.random_range(0.1..2.0)),
            _ => RefKernel::Anova(rng.random_range(0.1..2.0), rng.random_range(1..=3)),
        }
    }
}

/// Random small binary classification problem with labels in {-1, +1}.
#[derive(Debug, Clone)]
pub struct Instance {
    pub rows: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub kernel: RefKernel,
    pub c: f64,
}

/// Between 4 and 20 points in 1 to 5 dimensions, both classes present.
pub fn random_instance(seed: u64, family: usize, c: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(4..=20);
    let d = rng.random_range(1..=5);
    let rows = random_points(&mut rng, n, d);
    let mut y: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    y[0] = 1.0;
    y[1] = -1.0;
    let kernel = RefKernel::random(family, &mut rng);
    Instance { rows, y, kernel, c }
}

/// `n` points uniform on `[-1, 1]^d`.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn gram(kernel: RefKernel, rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(&rows[i], &rows[j]))
}

pub fn min_eigenvalue(g: &DMatrix<f64>) -> f64 {
    g.clone().symmetric_eigen().eigenvalues.min()
}

/// Euclidean projection onto `{0 <= a <= C, y'a = 0}`.
///
/// The projection is `a_i = clip(v_i - lambda y_i, 0, C)` where `lambda` zeroes the
/// piecewise-linear, non-increasing `h(lambda) = sum_i y_i a_i(lambda)`.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(&vi, &yi)| (vi - lam * yi).clamp(0.0, c))
            .collect()
    };
    let h = |lam: f64| -> f64 { at(lam).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let mut bps: Vec<f64> = v
        .iter()
        .zip(y)
        .flat_map(|(&vi, &yi)| [yi * vi, yi * (vi - c)])
        .collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    // h is constant outside [min, max] breakpoints; find the bracketing pair.
    let (mut lo, mut hi) = (0usize, bps.len() - 1);
    if h(bps[lo]) <= 0.0 {
        return at(bps[lo]);
    }
    if h(bps[hi]) >= 0.0 {
        return at(bps[hi]);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if h(bps[mid]) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (l0, l1) = (bps[lo], bps[hi]);
    let (h0, h1) = (h(l0), h(l1));
    let lam = l0 + (l1 - l0) * h0 / (h0 - h1);
    at(lam)
}

pub struct OracleSolution {
    pub alpha: Vec<f64>,
    pub objective: f64,
    pub bias: f64,
}

/// Dense dual solver: accelerated projected gradient with function-value restarts.
pub fn dense_qp(g: &DMatrix<f64>, y: &[f64], c: f64) -> OracleSolution {
    let n = y.len();
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * g[(i, j)]);
    let lip = q.clone().symmetric_eigen().eigenvalues.max().max(1e-12);
    let f = |a: &[f64]| -> f64 {
        let av = DVector::from_column_slice(a);
        0.5 * av.dot(&(&q * &av)) - a.iter().sum::<f64>()
    };
    let grad = |a: &[f64]| -> Vec<f64> {
        let av = DVector::from_column_slice(a);
        (&q * &av).iter().map(|v| v - 1.0).collect()
    };

    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut fx = f(&x);
    let mut still = 0;
    for _ in 0..400_000 {
        let gz = grad(&z);
        let step: Vec<f64> = z.iter().zip(&gz).map(|(zi, gi)| zi - gi / lip).collect();
        let x_new = project(&step, y, c);
        let f_new = f(&x_new);
        let t_new = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let moved = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if f_new > fx {
            if t == 1.0 {
                // A plain projected step no longer descends: converged to rounding.
                break;
            }
            // Restart momentum from the better point.
            t = 1.0;
            z = x.clone();
            continue;
        }
        z = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_new * (a - b))
            .collect();
        x = x_new;
        fx = f_new;
        t = t_new;
        if moved < 1e-14 {
            still += 1;
            if still > 50 {
                break;
            }
        } else {
            still = 0;
        }
    }

    // Bias from the KKT conditions at the oracle solution.
    let gx = grad(&x);
    let eps = 1e-7 * c;
    let mut free = Vec::new();
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let v = -y[i] * gx[i];
        let at_low = x[i] <= eps;
        let at_high = x[i] >= c - eps;
        if !at_low && !at_high {
            free.push(v);
        }
        let up = (y[i] > 0.0 && !at_high) || (y[i] < 0.0 && !at_low);
        let low = (y[i] > 0.0 && !at_low) || (y[i] < 0.0 && !at_high);
        if up {
            lower = lower.max(v);
        }
        if low {
            upper = upper.min(v);
        }
    }
    let bias = if !free.is_empty() {
        free.iter().sum::<f64>() / free.len() as f64
    } else if lower.is_finite() && upper.is_finite() {
        (lower + upper) / 2.0
    } else if lower.is_finite() {
        lower
    } else {
        upper
    };
    OracleSolution {
        objective: -fx,
        alpha: x,
        bias,
    }
}

/// Decision value of a dual solution at training point `i`.
pub fn decision(g: &DMatrix<f64>, y: &[f64], sol: &OracleSolution, i: usize) -> f64 {
    (0..y.len())
        .map(|j| sol.alpha[j] * y[j] * g[(j, i)])
        .sum::<f64>()
        + sol.bias
}

/// AUC as the fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
pub fn mann_whitney_auc(positive: &[bool], scores: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &pi) in positive.iter().enumerate() {
        if !pi {
            continue;
        }
        for (j, &pj) in positive.iter().enumerate() {
            if pj {
                continue;
            }
            den += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / den
}

/// Accuracy, PPV, recall, specificity and F-measure from raw counts.
///
/// Zero denominators give 0.
pub fn reference_metrics(tp: u64, fp: u64, fn_: u64, tn: u64) -> [f64; 5] {
    let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let acc = div(tp + tn, tp + fp + fn_ + tn);
    let ppv = div(tp, tp + fp);
    let rec = div(tp, tp + fn_);
    let spec = div(tn, tn + fp);
    // 2PR/(P+R) written over counts: 2TP / (2TP + FP + FN).
    let f = div(2 * tp, 2 * tp + fp + fn_);
    [acc, ppv, rec, spec, f]
}

/// Pearson chi-squared goodness-of-fit test. Returns the statistic and the
/// upper-tail p-value.
pub fn chi_squared(observed: &[u64], expected_p: &[f64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected_p) {
        if p == 0.0 {
            assert_eq!(o, 0, "event with zero expected probability occurred");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dist = ChiSquared::new((cells - 1) as f64).expect("at least two cells");
    (stat, 1.0 - dist.cdf(stat))
}

/// Column description for [`fixture_csv`]: `None` for numeric columns,
/// `Some(levels)` for categorical ones.
pub type FixtureColumn = (String, Option<Vec<String>>);

/// Writes a CSV with `n` rows of random valid values for `columns`, followed by
/// a target column in which exactly `n_pos` rows carry `labels.0` and the rest
/// `labels.1`.
pub fn fixture_csv(
    columns: &[FixtureColumn],
    target: &str,
    labels: (&str, &str),
    n: usize,
    n_pos: usize,
    seed: u64,
) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let header: Vec<&str> = columns
        .iter()
        .map(|c| c.0.as_str())
        .chain(std::iter::once(target))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..n {
        for (_, levels) in columns {
            match levels {
                None => out.push_str(&format!("{}", rng.random_range(0..1000) as f64 / 10.0)),
                Some(v) => out.push_str(&v[rng.random_range(0..v.len())]),
            }
            out.push(',');
        }
        out.push_str(if row < n_pos { labels.0 } else { labels.1 });
        out.push('\n');
    }
    out
}

/// Deterministic generator for test data.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
