use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Chromosome, GaError};

/// Independent random stream for one (generation, slot) of a run.
///
/// Every stochastic decision about one individual draws from its own stream,
/// so results do not depend on evaluation order or worker count.
pub fn stream_rng(seed: u64, generation: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | slot as u64);
    rng
}

/// Sets one uniformly chosen bit if the mask is empty.
fn repair<R: Rng + ?Sized>(mask: &mut [bool], rng: &mut R) {
    if !mask.iter().any(|&b| b) && !mask.is_empty() {
        let j = rng.random_range(0..mask.len());
        mask[j] = true;
    }
}

/// Random initial population. Each bit is set with probability 1/2 and empty
/// masks are repaired. With `inject_full_mask` the first chromosome selects every gene.
pub fn init_population(
    genes: usize,
    size: usize,
    inject_full_mask: bool,
    seed: u64,
) -> Vec<Chromosome> {
    (0..size)
        .map(|slot| {
            if inject_full_mask && slot == 0 {
                return Chromosome::new(vec![true; genes]);
            }
            let mut rng = stream_rng(seed, 0, slot);
            let mut mask: Vec<bool> = (0..genes).map(|_| rng.random_bool(0.5)).collect();
            repair(&mut mask, &mut rng);
            Chromosome::new(mask)
        })
        .collect()
}

/// Roulette-wheel draw: index `i` with probability `f_i / sum_k f_k`, or
/// uniformly when every fitness is zero.
pub fn roulette_select<R: Rng + ?Sized>(fitnesses: &[f64], rng: &mut R) -> Result<usize, GaError> {
    if fitnesses.is_empty() {
        return Err(GaError::EmptyPopulation);
    }
    if let Some(f) = fitnesses.iter().find(|f| !(**f >= 0.0 && f.is_finite())) {
        return Err(GaError::InvalidConfig(format!(
            "roulette selection needs nonnegative finite fitness, got {f}"
        )));
    }
    let total: f64 = fitnesses.iter().sum();
    if total <= 0.0 {
        return Ok(rng.random_range(0..fitnesses.len()));
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &f) in fitnesses.iter().enumerate() {
        if f > 0.0 {
            acc += f;
            last_positive = i;
            if target < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_positive)
}

/// Swaps the segment `[cut_lo, cut_hi)` between two parents.
pub(crate) fn swap_segment(
    a: &[bool],
    b: &[bool],
    cut_lo: usize,
    cut_hi: usize,
) -> (Vec<bool>, Vec<bool>) {
    let mut ca = a.to_vec();
    let mut cb = b.to_vec();
    ca[cut_lo..cut_hi].copy_from_slice(&b[cut_lo..cut_hi]);
    cb[cut_lo..cut_hi].copy_from_slice(&a[cut_lo..cut_hi]);
    (ca, cb)
}

/// Two-point crossover applied with probability `p`; otherwise the children
/// copy their parents. Cut points `0 <= lo < hi <= L` are uniform.
pub fn crossover<R: Rng + ?Sized>(
    a: &[bool],
    b: &[bool],
    p: f64,
    rng: &mut R,
) -> Result<(Vec<bool>, Vec<bool>), GaError> {
    if a.len() != b.len() {
        return Err(GaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() || !rng.random_bool(p) {
        return Ok((a.to_vec(), b.to_vec()));
    }
    let cuts = sample(rng, a.len() + 1, 2);
    let (lo, hi) = {
        let (x, y) = (cuts.index(0), cuts.index(1));
        (x.min(y), x.max(y))
    };
    let (mut ca, mut cb) = swap_segment(a, b, lo, hi);
    repair(&mut ca, rng);
    repair(&mut cb, rng);
    Ok((ca, cb))
}

/// Flips bit `j`, unless that would empty the mask, in which case a different
/// uniformly chosen bit is flipped instead.
pub(crate) fn flip_keeping_nonzero<R: Rng + ?Sized>(mask: &mut [bool], j: usize, rng: &mut R) {
    let ones = mask.iter().filter(|&&b| b).count();
    if mask[j] && ones == 1 {
        if mask.len() == 1 {
            return;
        }
        let mut k = rng.random_range(0..mask.len() - 1);
        if k >= j {
            k += 1;
        }
        mask[k] = !mask[k];
    } else {
        mask[j] = !mask[j];
    }
}

/// With probability `p`, flips exactly one uniformly chosen bit.
pub fn mutate<R: Rng + ?Sized>(mask: &mut [bool], p: f64, rng: &mut R) {
    if mask.is_empty() || !rng.random_bool(p) {
        return;
    }
    let j = rng.random_range(0..mask.len());
    flip_keeping_nonzero(mask, j, rng);
}
