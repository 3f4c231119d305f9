//! Seeded random sampling.
//!
//! Monte Carlo sums are split into fixed-size chunks; chunk `c` draws from the
//! ChaCha stream `c` of the run seed, so results do not depend on how many
//! worker threads process the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;
use crate::scalar::Real;

/// Samples per independent RNG stream.
pub const CHUNK: usize = 4096;

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point of the unit sphere `S^{dim-1}` (normalized Gaussian).
pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-12 {
            return v.into_iter().map(|x| T::lit(x / r)).collect();
        }
    }
}

/// Haar-distributed rotation of `R³`, from a uniform unit quaternion.
pub fn haar_so3<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Matrix<T> {
    let q: Vec<T> = unit_vector(rng, 4);
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    let two = T::lit(2.0);
    let one = T::one();
    let rows = [
        [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
        [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
        [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
    ];
    Matrix::from_fn(3, |i, j| rows[i][j])
}

/// Reproducible list of `count` unit directions in `R^dim`.
pub fn random_directions<T: Real>(seed: u64, dim: usize, count: usize) -> Vec<Vec<T>> {
    // stream id far away from the Monte Carlo chunk streams
    let mut rng = chunk_rng(seed, u64::MAX - 1);
    (0..count).map(|_| unit_vector(&mut rng, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = chunk_rng(7, 3).random();
        let b: f64 = chunk_rng(7, 3).random();
        let c: f64 = chunk_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_rotations_are_orthogonal() {
        let mut rng = chunk_rng(1, 0);
        for _ in 0..100 {
            let q: Matrix<f64> = haar_so3(&mut rng);
            let qtq = q.transpose().mul(&q);
            for i in 0..3 {
                for j in 0..3 {
                    let t = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq[(i, j)] - t).abs() < 1e-14);
                }
            }
            // proper rotation: det = +1 via triple product of rows
            let (r0, r1, r2) = (q.row(0), q.row(1), q.row(2));
            let cross = [r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2], r1[0] * r2[1] - r1[1] * r2[0]];
            assert!((linalg::dot(r0, &cross) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn haar_first_column_is_uniform() {
        // E[q_{00}²] = 1/3 for a Haar rotation
        let mut rng = chunk_rng(11, 0);
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|_| {
                let q: Matrix<f64> = haar_so3(&mut rng);
                q[(0, 0)] * q[(0, 0)]
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.01, "{mean}");
    }
}
