//! I.i.d. finite-alphabet sceneries: exact entropy, fixed-realization word
//! sampling over arbitrary site sets, and conditional information.
//!
//! A scenery realization is generated functionally: symbol at site `k` is a
//! pure function of `(trial seed, k)` through a 64-bit mix, so overlapping
//! site sets within one trial agree on shared sites and memory stays O(1)
//! even when heavy-tailed walks visit sites far apart.

use crate::error::{Error, Result};
use crate::hyperspace::HyperSet;
use crate::rng::{site_draw, unit_from_bits};

/// I.i.d. scenery over a finite alphabet with exact entropy in bits.
#[derive(Clone, Debug)]
pub struct SceneryModel {
    probs: Vec<f64>,
    log2_probs: Vec<f64>,
    cumulative: Vec<f64>,
    entropy_bits: f64,
}

impl SceneryModel {
    /// Product measure with the given symbol probabilities.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Domain("alphabet needs at least two symbols".into()));
        }
        if probs.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::Domain("symbol probabilities must be positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let log2_probs: Vec<f64> = probs.iter().map(|&p| p.log2()).collect();
        let entropy_bits = -probs
            .iter()
            .zip(&log2_probs)
            .map(|(&p, &l)| p * l)
            .sum::<f64>();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in probs {
            acc += p;
            cumulative.push(acc);
        }
        let last = cumulative.len() - 1;
        cumulative[last] = 1.0;
        Ok(SceneryModel {
            probs: probs.to_vec(),
            log2_probs,
            cumulative,
            entropy_bits,
        })
    }

    pub fn uniform(alphabet: usize) -> Result<Self> {
        SceneryModel::bernoulli(&vec![1.0 / alphabet as f64; alphabet])
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log2_probs(&self) -> &[f64] {
        &self.log2_probs
    }

    /// `h(S, β) = -Σ p log₂ p`.
    pub fn entropy_bits(&self) -> f64 {
        self.entropy_bits
    }

    /// Variance of the per-symbol self-information, in bits².
    pub fn self_information_variance_bits(&self) -> f64 {
        self.probs
            .iter()
            .zip(&self.log2_probs)
            .map(|(&p, &l)| p * (-l - self.entropy_bits).powi(2))
            .sum()
    }

    /// All symbols equiprobable?
    pub fn is_uniform(&self) -> bool {
        let p0 = self.probs[0];
        self.probs.iter().all(|&p| (p - p0).abs() < 1e-15)
    }

    #[inline]
    fn symbol_from_unit(&self, u: f64) -> u8 {
        let mut i = 0usize;
        while i + 1 < self.cumulative.len() && u >= self.cumulative[i] {
            i += 1;
        }
        i as u8
    }

    /// Symbol at `site` of the realization keyed by `scenery_seed`.
    #[inline]
    pub fn symbol_at(&self, scenery_seed: u64, site: i64) -> u8 {
        self.symbol_from_unit(unit_from_bits(site_draw(scenery_seed, site)))
    }
}

/// Symbols of one scenery realization restricted to a finite site set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneryWord {
    sites: Vec<i64>,
    symbols: Vec<u8>,
}

impl SceneryWord {
    pub fn new(sites: Vec<i64>, symbols: Vec<u8>) -> Result<Self> {
        if sites.len() != symbols.len() {
            return Err(Error::Domain("one symbol per site".into()));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("sites must be strictly increasing".into()));
        }
        Ok(SceneryWord { sites, symbols })
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Sample the fixed realization keyed by `seed` on `sites` (strictly
/// increasing). Deterministic in `(model, sites, seed)`; the same site always
/// receives the same symbol within one seed.
pub fn sample_scenery_word(model: &SceneryModel, sites: &[i64], seed: u64) -> Result<SceneryWord> {
    let symbols = sites
        .iter()
        .map(|&k| model.symbol_at(seed, k))
        .collect::<Vec<_>>();
    SceneryWord::new(sites.to_vec(), symbols)
}

/// Product-measure probability of a word; computed in log space. Underflows
/// to 0 for very long words — use [`conditional_information`] for those.
pub fn word_probability(model: &SceneryModel, word: &SceneryWord) -> Result<f64> {
    Ok(2f64.powf(-conditional_information(model, word)?))
}

/// `-log₂ ν(word)` in bits. For product sceneries this depends only on the
/// symbol counts.
pub fn conditional_information(model: &SceneryModel, word: &SceneryWord) -> Result<f64> {
    let mut counts = vec![0u64; model.alphabet_size()];
    for &s in word.symbols() {
        let idx = s as usize;
        if idx >= counts.len() {
            return Err(Error::Domain(format!("symbol {idx} outside alphabet")));
        }
        counts[idx] += 1;
    }
    Ok(counts
        .iter()
        .zip(model.log2_probs())
        .map(|(&c, &l)| -(c as f64) * l)
        .sum())
}

/// Lattice sites of `a·Λ` for a finite union of intervals Λ — the site-set
/// sequence whose counting obeys `#F = a·Leb(Λ) ± 2M` (asserted here, M the
/// number of intervals).
pub fn lattice_sites(lambda: &HyperSet, a: f64) -> Vec<i64> {
    assert!(a > 0.0);
    let mut sites = Vec::new();
    for &(l, r) in lambda.intervals() {
        let k_lo = (l * a - 1e-9).ceil() as i64;
        let k_hi = (r * a + 1e-9).floor() as i64;
        for k in k_lo..=k_hi {
            sites.push(k);
        }
    }
    sites.sort_unstable();
    sites.dedup();
    let leb: f64 = lambda.intervals().iter().map(|&(l, r)| r - l).sum();
    let m = lambda.intervals().len() as f64;
    assert!(
        (sites.len() as f64 - a * leb).abs() <= 2.0 * m + 1e-6,
        "site count {} strays from a·Leb = {} by more than 2M = {}",
        sites.len(),
        a * leb,
        2.0 * m
    );
    sites
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_seed, Stream};

    #[test]
    fn entropy_of_standard_models() {
        let m = SceneryModel::bernoulli(&[0.5, 0.5]).unwrap();
        assert!((m.entropy_bits() - 1.0).abs() < 1e-15);

        let m = SceneryModel::bernoulli(&[0.8, 0.2]).unwrap();
        assert!((m.entropy_bits() - 0.7219280948873623).abs() < 1e-12);

        assert!(SceneryModel::bernoulli(&[0.5, 0.6]).is_err());
        assert!(SceneryModel::bernoulli(&[1.0, 0.0]).is_err());
        assert!(SceneryModel::bernoulli(&[0.7, 0.2, 0.1]).is_ok());
    }

    #[test]
    fn words_have_one_symbol_per_site() {
        let m = SceneryModel::uniform(2).unwrap();
        let w = sample_scenery_word(&m, &[0, 1, 5], 9).unwrap();
        assert_eq!(w.len(), 3);
        assert!(SceneryWord::new(vec![0, 0], vec![0, 1]).is_err());
    }

    #[test]
    fn fixed_scenery_is_coherent_across_overlapping_site_sets() {
        let m = SceneryModel::bernoulli(&[0.3, 0.3, 0.4]).unwrap();
        let seed = trial_seed(17, 4, Stream::Scenery);
        let w1 = sample_scenery_word(&m, &[-5, 0, 3, 8], seed).unwrap();
        let w2 = sample_scenery_word(&m, &[0, 1, 3], seed).unwrap();
        assert_eq!(w1.symbols()[1], w2.symbols()[0]); // site 0
        assert_eq!(w1.symbols()[2], w2.symbols()[2]); // site 3
    }

    #[test]
    fn symbol_frequencies_match_the_model() {
        let m = SceneryModel::uniform(2).unwrap();
        let n = 1_000_000i64;
        let seed = 123;
        let ones = (0..n).filter(|&k| m.symbol_at(seed, k) == 1).count();
        let f = ones as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.002, "uniform frequency {f}");
    }

    #[test]
    fn word_probability_closed_forms() {
        let m = SceneryModel::uniform(2).unwrap();
        let w = SceneryWord::new(vec![1, 2, 3, 4], vec![0, 1, 0, 1]).unwrap();
        assert!((word_probability(&m, &w).unwrap() - 0.0625).abs() < 1e-15);
        assert!((conditional_information(&m, &w).unwrap() - 4.0).abs() < 1e-12);

        // empty product is 1
        let w = SceneryWord::new(vec![], vec![]).unwrap();
        assert_eq!(word_probability(&m, &w).unwrap(), 1.0);

        let m = SceneryModel::bernoulli(&[0.8, 0.2]).unwrap();
        let w = SceneryWord::new(vec![0, 1, 2, 3, 4], vec![1, 0, 0, 1, 0]).unwrap();
        let expect = 0.2f64.powi(2) * 0.8f64.powi(3);
        assert!((word_probability(&m, &w).unwrap() - expect).abs() < 1e-15);
        // definitional identity
        let p = word_probability(&m, &w).unwrap();
        assert!((conditional_information(&m, &w).unwrap() + p.log2()).abs() < 1e-9);
    }

    #[test]
    fn conditional_information_obeys_clt_band() {
        let m = SceneryModel::bernoulli(&[0.8, 0.2]).unwrap();
        let sites: Vec<i64> = (0..10_000).collect();
        let w = sample_scenery_word(&m, &sites, trial_seed(5, 0, Stream::Scenery)).unwrap();
        let i = conditional_information(&m, &w).unwrap();
        let mh = 10_000.0 * m.entropy_bits();
        let band = 4.0 * (10_000.0 * m.self_information_variance_bits()).sqrt();
        assert!((i - mh).abs() < band, "I = {i}, mh = {mh}, band = {band}");
    }

    /// Desk-scale Shannon–McMillan check over site boxes [0, m).
    #[test]
    fn information_rate_concentrates_at_entropy() {
        let model = SceneryModel::bernoulli(&[0.8, 0.2]).unwrap();
        let m = 10_000usize;
        let sites: Vec<i64> = (0..m as i64).collect();
        let sigma = model.self_information_variance_bits().sqrt();
        let band = 3.0 * sigma / (m as f64).sqrt();
        let trials = 10_000u64;
        let mut inside = 0u64;
        for t in 0..trials {
            let seed = trial_seed(2024, t, Stream::Scenery);
            let w = sample_scenery_word(&model, &sites, seed).unwrap();
            let rate = conditional_information(&model, &w).unwrap() / m as f64;
            if (rate - model.entropy_bits()).abs() < band {
                inside += 1;
            }
        }
        let frac = inside as f64 / trials as f64;
        assert!(frac >= 0.99, "only {frac} of trials inside the 3σ band");
    }

    #[test]
    fn lattice_site_counts_track_lebesgue_measure() {
        let lambda = HyperSet::new(vec![(-0.75, -0.25), (0.0, 1.0), (2.0, 2.5)]).unwrap();
        for &a in &[10.0, 97.3, 1024.0] {
            let sites = lattice_sites(&lambda, a);
            let leb = 2.0;
            assert!((sites.len() as f64 - a * leb).abs() <= 6.0 + 1e-9);
        }
    }
}
