use rand::Rng;

use super::ZipfParams;
use crate::error::{ensure, Result};

/// Generalized harmonic number `sum_{n=1}^{m} n^-s`, summed smallest-first.
pub fn harmonic(p: &ZipfParams) -> f64 {
    (1..=p.m).rev().map(|k| (k as f64).powf(-p.s)).sum()
}

/// Popularity of the `k`-th ranked item. Recomputes the normalizer on every
/// call; use [`Zipf`] when evaluating many ranks.
pub fn zipf_pmf(k: u64, p: &ZipfParams) -> Result<f64> {
    p.validate()?;
    ensure(k >= 1 && k <= p.m, "zipf rank", || format!("k = {k} not in 1..={}", p.m))?;
    Ok((k as f64).powf(-p.s) / harmonic(p))
}

/// Expected number of distinct items among `n` independent Zipf requests,
/// `sum_k 1 - (1 - p_k)^n`.
pub fn expected_unique(p: &ZipfParams, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let norm = harmonic(p);
    let n = n as f64;
    (1..=p.m)
        .map(|k| {
            let pk = (k as f64).powf(-p.s) / norm;
            -(n * (-pk).ln_1p()).exp_m1()
        })
        .sum()
}

/// Inverse-CDF sampler over a precomputed cumulative table.
#[derive(Clone, Debug)]
pub struct Zipf {
    params: ZipfParams,
    norm: f64,
    cdf: Vec<f64>,
}

impl Zipf {
    pub fn new(params: ZipfParams) -> Result<Self> {
        params.validate()?;
        let m = params.m as usize;
        let mut cdf = Vec::with_capacity(m);
        let mut acc = 0.0;
        for k in 1..=m {
            acc += (k as f64).powf(-params.s);
            cdf.push(acc);
        }
        let norm = harmonic(&params);
        for c in &mut cdf {
            *c /= acc;
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Zipf { params, norm, cdf })
    }

    pub fn params(&self) -> &ZipfParams {
        &self.params
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        ensure(k >= 1 && k <= self.params.m, "zipf rank", || {
            format!("k = {k} not in 1..={}", self.params.m)
        })?;
        Ok((k as f64).powf(-self.params.s) / self.norm)
    }

    /// Draws a 1-based rank.
    pub fn sample_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1) as u64 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zp(s: f64, m: u64) -> ZipfParams {
        ZipfParams::new(s, m).unwrap()
    }

    #[test]
    fn pmf_hand_values() {
        assert!((zipf_pmf(1, &zp(0.0, 4)).unwrap() - 0.25).abs() < 1e-15);
        assert!((zipf_pmf(1, &zp(1.0, 2)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(zipf_pmf(0, &zp(1.0, 2)).is_err());
        assert!(zipf_pmf(3, &zp(1.0, 2)).is_err());
    }

    #[test]
    fn pmf_sums_to_one() {
        // direct summation of the unnormalized terms, independent of `harmonic`
        let p = zp(0.716, 1000);
        let z = Zipf::new(p).unwrap();
        let total: f64 = (1..=1000).map(|k| z.pmf(k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let raw: Vec<f64> = (1..=1000).map(|k| 1.0 / (k as f64).powf(0.716)).collect();
        let j: f64 = raw.iter().sum();
        for k in [1u64, 17, 1000] {
            assert!((zipf_pmf(k, &p).unwrap() - raw[k as usize - 1] / j).abs() < 1e-15);
        }
    }

    #[test]
    fn expected_unique_hand_values() {
        for (s, m) in [(0.0, 1), (0.716, 50), (2.0, 1000)] {
            assert!((expected_unique(&zp(s, m), 1) - 1.0).abs() < 1e-12);
        }
        assert!((expected_unique(&zp(0.0, 2), 2) - 1.5).abs() < 1e-12);
        assert_eq!(expected_unique(&zp(0.5, 10), 0), 0.0);
        // single item is requested for sure
        assert!((expected_unique(&zp(1.0, 1), 5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_item_sampler() {
        let z = Zipf::new(zp(1.3, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| z.sample_rank(&mut rng) == 1));
    }

    #[test]
    fn uniform_sampler_frequencies() {
        let z = Zipf::new(zp(0.0, 10)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0u32; 10];
        let draws = 1_000_000;
        for _ in 0..draws {
            counts[z.sample_rank(&mut rng) as usize - 1] += 1;
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.1).abs() < 0.002, "{counts:?}");
        }
    }

    #[test]
    fn two_item_sampler_matches_hand_pmf() {
        let z = Zipf::new(zp(1.0, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 1_000_000;
        let ones = (0..draws).filter(|_| z.sample_rank(&mut rng) == 1).count();
        assert!((ones as f64 / draws as f64 - 2.0 / 3.0).abs() < 0.005);
    }

    #[test]
    fn skewed_sampler_passes_chi_square() {
        let p = zp(0.716, 50);
        let z = Zipf::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 1_000_000;
        let mut counts = vec![0u64; 50];
        for _ in 0..draws {
            counts[z.sample_rank(&mut rng) as usize - 1] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let e = draws as f64 * z.pmf(i as u64 + 1).unwrap();
                (c as f64 - e).powi(2) / e
            })
            .sum();
        // 49 dof: the 0.999 quantile is about 85.4
        assert!(chi2 < 85.4, "chi2 = {chi2}");
    }
}
