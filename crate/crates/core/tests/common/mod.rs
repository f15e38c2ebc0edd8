//! Statistical helpers shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Hypergeometric};

/// Bins whose expected count falls below this are merged with a neighbour.
pub const MIN_EXPECTED: f64 = 5.0;

/// Merges adjacent bins, left to right, until every merged bin reaches
/// `MIN_EXPECTED` in `weight`; a light tail is folded into the last bin.
/// Returns the bin groups as index ranges.
fn pool_bins(weight: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, &w) in weight.iter().enumerate() {
        acc += w;
        if acc >= MIN_EXPECTED {
            groups.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weight.len() {
        match groups.last_mut() {
            Some(last) => last.end = weight.len(),
            None => groups.push(0..weight.len()),
        }
    }
    groups
}

/// Pearson statistic and degrees of freedom against the given law.
/// `probs` must cover the whole support the observations can fall in.
pub fn chi2_gof(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * total as f64).collect();
    let groups = pool_bins(&expected);
    let mut stat = 0.0;
    for g in &groups {
        let o: u64 = observed[g.clone()].iter().sum();
        let e: f64 = expected[g.clone()].iter().sum();
        if e > 0.0 {
            stat += (o as f64 - e).powi(2) / e;
        } else {
            assert_eq!(o, 0, "observation outside the support");
        }
    }
    (stat, groups.len().saturating_sub(1))
}

/// Pearson homogeneity statistic for two count vectors on the same bins.
pub fn chi2_homogeneity(a: &[u64], b: &[u64]) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    // Smaller of the two expected counts per bin decides pooling.
    let weight: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x + y) as f64 * na.min(nb) / n)
        .collect();
    let groups = pool_bins(&weight);
    let mut stat = 0.0;
    for g in &groups {
        let oa: u64 = a[g.clone()].iter().sum();
        let ob: u64 = b[g.clone()].iter().sum();
        let col = (oa + ob) as f64;
        if col == 0.0 {
            continue;
        }
        let ea = col * na / n;
        let eb = col * nb / n;
        stat += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
    }
    (stat, groups.len().saturating_sub(1))
}

/// Upper tail `Pr(X > stat)` of a chi-square law. Zero degrees of freedom
/// means a single bin, which cannot disagree.
pub fn chi2_pvalue(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

/// Hypergeometric law as a vector over `0..=draws`.
pub fn hypergeometric_probs(population: u64, successes: u64, draws: u64) -> Vec<f64> {
    let law = Hypergeometric::new(population, successes, draws).unwrap();
    (0..=draws).map(|x| law.pmf(x)).collect()
}

/// Two-colour urn: `big_n` balls of which the first `big_k` are red.
#[derive(Debug, Clone, Copy)]
pub struct Urn {
    pub big_n: usize,
    pub big_k: usize,
    pub draws: usize,
    /// Probability a red ball is kept red (not turned lime).
    pub p: f64,
    /// Probability a blue ball is turned orange.
    pub q: f64,
}

impl Urn {
    /// Draw first, then colour the sample; returns red-kept + orange.
    pub fn draw_then_colour<R: Rng>(&self, balls: &mut [bool], rng: &mut R) -> usize {
        let (sample, _) = balls.partial_shuffle(rng, self.draws);
        sample
            .iter()
            .filter(|&&red| if red { rng.gen_bool(self.p) } else { rng.gen_bool(self.q) })
            .count()
    }

    /// Colour every ball, then draw.
    pub fn colour_then_draw<R: Rng>(&self, marks: &mut [bool], rng: &mut R) -> usize {
        for (i, m) in marks.iter_mut().enumerate() {
            *m = if i < self.big_k { rng.gen_bool(self.p) } else { rng.gen_bool(self.q) };
        }
        let (sample, _) = marks.partial_shuffle(rng, self.draws);
        sample.iter().filter(|&&x| x).count()
    }

    pub fn balls(&self) -> Vec<bool> {
        (0..self.big_n).map(|i| i < self.big_k).collect()
    }

    /// Histograms of both experiments over `samples` draws each.
    pub fn histograms<R: Rng>(&self, samples: usize, rng: &mut R) -> (Vec<u64>, Vec<u64>) {
        let mut h1 = vec![0u64; self.draws + 1];
        let mut h2 = vec![0u64; self.draws + 1];
        let mut balls = self.balls();
        let mut marks = vec![false; self.big_n];
        for _ in 0..samples {
            h1[self.draw_then_colour(&mut balls, rng)] += 1;
            h2[self.colour_then_draw(&mut marks, rng)] += 1;
        }
        (h1, h2)
    }
}
