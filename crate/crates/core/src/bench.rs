//! Decoder timing and empirical complexity fits.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decoders::decode;
use crate::error::{Error, Result};
use crate::model::{Algorithm, RootMode, ScoreSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub repeats: usize,
    pub mean_secs: f64,
    pub min_secs: f64,
}

/// Random uniform(-1, 1) tables for exactly the components `algorithm` reads.
pub fn random_scores(algorithm: Algorithm, n: usize, rng: &mut impl Rng) -> Result<ScoreSet> {
    ScoreSet::filled_with(n, algorithm.components(), || rng.gen_range(-1.0..1.0))
}

/// Times `repeats` decodes per length, each on fresh random scores. Score
/// generation is not timed.
pub fn run(algorithm: Algorithm, lengths: &[usize], repeats: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(lengths.len());
    for &n in lengths {
        let mut total = 0.0;
        let mut min = f64::INFINITY;
        for _ in 0..repeats {
            let s = random_scores(algorithm, n, &mut rng)?;
            let t = Instant::now();
            let r = decode(algorithm, &s, RootMode::Single)?;
            let dt = t.elapsed().as_secs_f64();
            std::hint::black_box(r);
            total += dt;
            min = min.min(dt);
        }
        rows.push(BenchRow {
            n,
            repeats,
            mean_secs: total / repeats as f64,
            min_secs: min,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let k = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fitted exponent of the minimum decode time against sentence length.
/// The minimum is less sensitive to scheduler noise than the mean.
pub fn fitted_exponent(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<_> = rows.iter().map(|r| (r.n as f64, r.min_secs)).collect();
    loglog_slope(&pts)
}
