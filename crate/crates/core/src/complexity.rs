//! Complexity functionals for walks in random sceneries: the local-time
//! weighted word distance, the minimal cylinder-cover count Φ, ball-count
//! bounds for 𝒬, exact Hamming-ball covering numbers on small instances, and
//! the sandwich `Φ/𝒬 ≤ K ≤ Φ` tying them together.
//!
//! All complexity logs are base 2.

use crate::error::{Error, Result};
use crate::hyperspace::AdmissiblePair;
use crate::scenery::{SceneryModel, SceneryWord};
use crate::walk::OccupationField;
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Sandwich record for one `(n, ε)`: `lo = max(log₂Φ - log₂𝒬, 0)`,
/// `hi = log₂Φ`, with the exact 𝒬 replacing the bound when available.
#[derive(Clone, Debug)]
pub struct ComplexityEstimate {
    pub n: usize,
    pub epsilon: f64,
    pub log2_phi: f64,
    pub log2_q_upper: f64,
    pub log2_q_exact: Option<f64>,
    pub log2_k_interval: (f64, f64),
}

impl ComplexityEstimate {
    pub fn new(
        n: usize,
        epsilon: f64,
        log2_phi: f64,
        log2_q_upper: f64,
        log2_q_exact: Option<f64>,
    ) -> Self {
        let q = log2_q_exact.unwrap_or(log2_q_upper);
        ComplexityEstimate {
            n,
            epsilon,
            log2_phi,
            log2_q_upper,
            log2_q_exact,
            log2_k_interval: sandwich(log2_phi, q),
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.log2_k_interval.0 + self.log2_k_interval.1)
    }
}

/// `[max(log₂Φ - log₂𝒬, 0), log₂Φ]` — K is at least 1, so the lower edge
/// clamps at 0.
pub fn sandwich(log2_phi: f64, log2_q: f64) -> (f64, f64) {
    debug_assert!(log2_phi >= 0.0 && log2_q >= 0.0);
    ((log2_phi - log2_q).max(0.0), log2_phi)
}

/// Local-time weighted normalized mismatch between two words on the visited
/// sites of a field: `(1/n) Σ_{i ∈ V_n} N_{n,i} · 1[w_i ≠ w'_i]`. This is the
/// Hamming distance of the corresponding length-n orbit names for words
/// sharing the base coordinate.
pub fn rwrs_word_distance(
    field: &OccupationField,
    w: &SceneryWord,
    w2: &SceneryWord,
) -> Result<f64> {
    if w.sites() != w2.sites() {
        return Err(Error::Domain("words live on different site sets".into()));
    }
    if w.sites() != field.visited_sites().as_slice() {
        return Err(Error::Domain(
            "words are not defined on the field's visited sites".into(),
        ));
    }
    let mut mismatch: u64 = 0;
    for ((&site, &a), &b) in w.sites().iter().zip(w.symbols()).zip(w2.symbols()) {
        if a != b {
            mismatch += field.count_at(site) as u64;
        }
    }
    Ok(mismatch as f64 / field.n() as f64)
}

// --- Φ ---------------------------------------------------------------------

#[derive(Clone, Debug)]
struct WordClass {
    /// log₂ of the number of words in the class.
    log2_words: f64,
    /// Exact word count while it fits integer f64 arithmetic.
    words_exact: Option<f64>,
    /// log₂ of the common per-word probability.
    log2_prob: f64,
}

/// Running count that stays exact as long as it fits in 52 bits.
#[derive(Clone, Copy, Debug)]
struct CountAcc {
    exact: Option<f64>,
    log2: f64,
}

impl CountAcc {
    fn zero() -> Self {
        CountAcc {
            exact: Some(0.0),
            log2: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, log2_count: f64, exact: Option<f64>) {
        self.log2 = log2_add(self.log2, log2_count);
        self.exact = match (self.exact, exact) {
            (Some(a), Some(b)) if a + b < 2f64.powi(52) => Some(a + b),
            _ => None,
        };
    }

    fn log2(&self) -> f64 {
        match self.exact {
            Some(v) if v > 0.0 => v.log2(),
            Some(_) => f64::NEG_INFINITY,
            None => self.log2,
        }
    }
}

fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn log2_multinomial(m: usize, counts: &[u64]) -> f64 {
    let mut v = ln_gamma(m as f64 + 1.0);
    for &k in counts {
        v -= ln_gamma(k as f64 + 1.0);
    }
    v * LOG2_E
}

fn compositions(m: usize, parts: usize, f: &mut impl FnMut(&[u64])) {
    fn rec(remaining: u64, idx: usize, buf: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
        if idx == buf.len() - 1 {
            buf[idx] = remaining;
            f(buf);
            return;
        }
        for k in 0..=remaining {
            buf[idx] = k;
            rec(remaining - k, idx + 1, buf, f);
        }
    }
    let mut buf = vec![0u64; parts];
    rec(m as u64, 0, &mut buf, f);
}

/// Number of compositions `C(m + parts - 1, parts - 1)`, saturating.
fn composition_count(m: usize, parts: usize) -> f64 {
    (ln_gamma((m + parts) as f64) - ln_gamma(m as f64 + 1.0) - ln_gamma(parts as f64)).exp()
}

/// `log₂ Φ` as a function of the visited-site count alone (for product
/// sceneries the word-probability multiset depends only on `#V`).
///
/// Words are aggregated into iso-probability classes by symbol-count
/// composition; classes are sorted by per-word probability (equal classes
/// merged, ties inside a class resolved by count arithmetic, which matches
/// any fixed ordering), and the boundary class is split exactly: with
/// residual mass `r` and per-word probability `q`, the minimal count pushing
/// the cumulative strictly above `1-ε` takes `⌊r/q⌋ + 1` of its words.
pub fn phi_log2_from_range_size(model: &SceneryModel, m: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside (0,1)")));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let n_sym = model.alphabet_size();
    let mut classes: Vec<WordClass> = Vec::new();
    if model.is_uniform() {
        // all words equiprobable: one merged class of N^m words
        let log2_count = m as f64 * (n_sym as f64).log2();
        classes.push(WordClass {
            log2_words: log2_count,
            words_exact: if log2_count < 52.0 {
                Some(log2_count.exp2().round())
            } else {
                None
            },
            log2_prob: -log2_count,
        });
    } else {
        if composition_count(m, n_sym) > 4e6 {
            return Err(Error::TooLarge(format!(
                "{m} sites over {n_sym} symbols: too many probability classes"
            )));
        }
        let log2_probs = model.log2_probs();
        compositions(m, n_sym, &mut |counts| {
            let log2_words = log2_multinomial(m, counts);
            let log2_prob: f64 = counts
                .iter()
                .zip(log2_probs)
                .map(|(&k, &lp)| k as f64 * lp)
                .sum();
            classes.push(WordClass {
                log2_words,
                words_exact: if log2_words < 52.0 {
                    Some(log2_words.exp2().round())
                } else {
                    None
                },
                log2_prob,
            });
        });
        classes.sort_by(|a, b| b.log2_prob.partial_cmp(&a.log2_prob).unwrap());
        // merge numerically identical probability levels
        let mut merged: Vec<WordClass> = Vec::with_capacity(classes.len());
        for c in classes {
            match merged.last_mut() {
                Some(last)
                    if (last.log2_prob - c.log2_prob).abs()
                        <= 1e-9 * (1.0 + last.log2_prob.abs()) =>
                {
                    last.log2_words = log2_add(last.log2_words, c.log2_words);
                    last.words_exact = match (last.words_exact, c.words_exact) {
                        (Some(a), Some(b)) if a + b < 2f64.powi(52) => Some(a + b),
                        _ => None,
                    };
                }
                _ => merged.push(c),
            }
        }
        classes = merged;
    }

    let target = 1.0 - epsilon;
    let mut cum_mass = 0.0f64;
    let mut comp = 0.0f64;
    let mut taken = CountAcc::zero();
    for c in &classes {
        let mass = (c.log2_words + c.log2_prob).exp2();
        if cum_mass + mass > target {
            let r = (target - cum_mass).max(0.0);
            let log2_take = if r == 0.0 {
                0.0
            } else {
                let log2_ratio = r.log2() - c.log2_prob;
                if log2_ratio < 52.0 {
                    (log2_ratio.exp2().floor() + 1.0).log2()
                } else {
                    log2_ratio
                }
            };
            taken.add(log2_take, if log2_take < 52.0 { Some(log2_take.exp2().round()) } else { None });
            return Ok(taken.log2());
        }
        let y = mass - comp;
        let t = cum_mass + y;
        comp = (t - cum_mass) - y;
        cum_mass = t;
        taken.add(c.log2_words, c.words_exact);
    }
    // cumulative never exceeded 1-ε (only reachable through rounding dust)
    Ok(taken.log2())
}

/// `log₂ Φ_{n,ε}`: log of the minimal number of positive-mass cylinder words
/// over the field's range whose product-measure mass exceeds `1-ε`.
pub fn phi_estimate(model: &SceneryModel, field: &OccupationField, epsilon: f64) -> Result<f64> {
    phi_log2_from_range_size(model, field.range_size(), epsilon)
}

fn checked_word_count(alphabet: usize, m: usize, limit_log2: f64) -> Result<usize> {
    let log2 = m as f64 * (alphabet as f64).log2();
    if log2 > limit_log2 {
        return Err(Error::TooLarge(format!(
            "{alphabet}^{m} words exceed the brute-force budget 2^{limit_log2}"
        )));
    }
    Ok((alphabet as u64).pow(m as u32) as usize)
}

fn word_log2_prob(model: &SceneryModel, idx: usize, m: usize) -> f64 {
    // canonical evaluation from symbol counts, so equal compositions get the
    // exact same float (ties must be honest ties)
    let n_sym = model.alphabet_size();
    let mut counts = vec![0u32; n_sym];
    let mut rest = idx;
    for _ in 0..m {
        counts[rest % n_sym] += 1;
        rest /= n_sym;
    }
    counts
        .iter()
        .zip(model.log2_probs())
        .map(|(&c, &lp)| c as f64 * lp)
        .sum()
}

/// Enumeration oracle for Φ: sort all `N^{#V}` words by probability
/// (descending, ties by word index), accumulate until the mass strictly
/// exceeds `1-ε`, return the count. Admits `N^{#V} ≤ 2^20`.
pub fn phi_exact_small(
    model: &SceneryModel,
    field: &OccupationField,
    epsilon: f64,
) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside (0,1)")));
    }
    let m = field.range_size();
    let total = checked_word_count(model.alphabet_size(), m, 20.0)?;
    let mut words: Vec<(f64, u32)> = (0..total)
        .map(|i| (word_log2_prob(model, i, m), i as u32))
        .collect();
    words.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let target = 1.0 - epsilon;
    let mut cum = 0.0;
    for (count, &(lp, _)) in words.iter().enumerate() {
        cum += lp.exp2();
        if cum > target {
            return Ok(count as u64 + 1);
        }
    }
    Ok(total as u64)
}

// --- 𝒬 ---------------------------------------------------------------------

fn log2_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n);
    (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
        * LOG2_E
}

/// Direct-estimation ball bound, in bits:
/// `log₂ 𝒬(P,n,ε) ≤ ⌈εn⌉·log₂|P| + log₂ C(n, ⌈εn⌉)` for `0 ≤ ε ≤ 1/2`.
pub fn q_upper_bound(n: usize, epsilon: f64, alphabet_size: usize) -> Result<f64> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::Domain(format!(
            "ball-count bound needs epsilon in [0, 1/2], got {epsilon}"
        )));
    }
    let k = (epsilon * n as f64).ceil() as u64;
    Ok(k as f64 * (alphabet_size as f64).log2() + log2_binomial(n as u64, k))
}

/// The admissible-pair ball bound in bits:
/// `log₂ C(⌈M·a⌉, ⌈2μ·a⌉) + 2μ·a·log₂|β|`.
pub fn q_rwrs_bound_formula(leb_upsilon: f64, mu: f64, a_n: f64, alphabet_size: usize) -> f64 {
    let n_top = (leb_upsilon * a_n).ceil() as u64;
    let k = (2.0 * mu * a_n).ceil() as u64;
    log2_binomial(n_top, k) + 2.0 * mu * a_n * (alphabet_size as f64).log2()
}

/// Ball-count bound for one sample on the event of an admissible pair: the
/// scaled range must sit inside Υ and the scaled minimum local time over Γ
/// must exceed `theta`; then every ball of radius up to `μ/θ` holds at most
/// `C(⌈M·a⌉, ⌈2μ·a⌉)·|β|^{2μ·a}` words. Fails with `NotApplicable` when the
/// event does not hold (callers fall back to [`q_upper_bound`]).
pub fn q_rwrs_bound(
    field: &OccupationField,
    pair: &AdmissiblePair,
    a_n: f64,
    abar_n: f64,
    theta: f64,
    alphabet_size: usize,
) -> Result<f64> {
    if !(a_n > 0.0 && abar_n > 0.0 && theta > 0.0) {
        return Err(Error::Domain("scales and theta must be positive".into()));
    }
    // (i) range containment in the open outer set
    let scale = (1u64 << pair.kappa) as f64;
    let cells: std::collections::HashSet<i64> =
        pair.upsilon.cells().iter().copied().collect();
    for &site in &field.visited_sites() {
        let q = (site as f64 / a_n) * scale;
        let p = q.floor();
        let inside = if q == p {
            cells.contains(&(p as i64)) && cells.contains(&(p as i64 - 1))
        } else {
            cells.contains(&(p as i64))
        };
        if !inside {
            return Err(Error::NotApplicable(format!(
                "scaled range leaves the outer set at site {site}"
            )));
        }
    }
    // (ii) minimum scaled local time over the inner set
    if let Some(gamma_set) = pair.gamma.as_hyperset() {
        match crate::walk::min_local_time_over(field, &gamma_set, a_n, abar_n) {
            Ok(y) if y > theta => {}
            Ok(y) => {
                return Err(Error::NotApplicable(format!(
                    "min local time {y} does not exceed theta {theta}"
                )))
            }
            // no lattice point in the inner set: minimum over an empty site
            // collection is vacuous
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(q_rwrs_bound_formula(
        pair.leb_upsilon,
        pair.mu,
        a_n,
        alphabet_size,
    ))
}

/// Exact `𝒬`: the largest number of listed words inside one ε-ball,
/// `max_a #{c : d(a,c) ≤ ε}`. Admits at most `2^16` words.
pub fn q_exact_small(
    field: &OccupationField,
    words: &[SceneryWord],
    epsilon: f64,
) -> Result<u64> {
    if words.is_empty() {
        return Err(Error::Domain("need at least one word".into()));
    }
    if words.len() > 1 << 16 {
        return Err(Error::TooLarge(format!("{} words", words.len())));
    }
    let sites = field.visited_sites();
    for w in words {
        if w.sites() != sites.as_slice() {
            return Err(Error::Domain(
                "all words must live on the field's visited sites".into(),
            ));
        }
    }
    let weights: Vec<u64> = sites.iter().map(|&s| field.count_at(s) as u64).collect();
    let threshold = epsilon * field.n() as f64 + 1e-9;
    let mut best = 0u64;
    for a in words {
        let mut inside = 0u64;
        for c in words {
            let mut mismatch = 0u64;
            for ((&wa, &wc), &wt) in a.symbols().iter().zip(c.symbols()).zip(&weights) {
                if wa != wc {
                    mismatch += wt;
                }
            }
            if mismatch as f64 <= threshold {
                inside += 1;
            }
        }
        best = best.max(inside);
    }
    Ok(best)
}

// --- exact K (branch-and-bound partial cover) -------------------------------

struct BallCoverProblem {
    masses: Vec<f64>,
    /// Deduplicated candidate balls as bitsets, sorted by mass descending.
    balls: Vec<Vec<u64>>,
    ball_mass: Vec<f64>,
    /// Prefix sums of sorted ball masses for the static bound.
    prefix: Vec<f64>,
    target: f64,
}

impl BallCoverProblem {
    fn new(masses: Vec<f64>, members: Vec<Vec<u64>>, target: f64) -> Self {
        let mut dedup: HashMap<Vec<u64>, ()> = HashMap::new();
        let mut balls = Vec::new();
        for b in members {
            if dedup.insert(b.clone(), ()).is_none() {
                balls.push(b);
            }
        }
        let ball_mass: Vec<f64> = balls
            .iter()
            .map(|b| Self::mass_of(b, &masses))
            .collect();
        let mut order: Vec<usize> = (0..balls.len()).collect();
        order.sort_by(|&i, &j| ball_mass[j].partial_cmp(&ball_mass[i]).unwrap());
        let balls: Vec<Vec<u64>> = order.iter().map(|&i| balls[i].clone()).collect();
        let ball_mass: Vec<f64> = order.iter().map(|&i| ball_mass[i]).collect();
        let mut prefix = Vec::with_capacity(ball_mass.len() + 1);
        prefix.push(0.0);
        for &m in &ball_mass {
            prefix.push(prefix.last().unwrap() + m);
        }
        BallCoverProblem {
            masses,
            balls,
            ball_mass,
            prefix,
            target,
        }
    }

    fn mass_of(bits: &[u64], masses: &[f64]) -> f64 {
        let mut total = 0.0;
        for (blk, &word) in bits.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                total += masses[blk * 64 + bit];
                w &= w - 1;
            }
        }
        total
    }

    /// Sum of the `k` largest ball masses among indices `>= start`.
    fn top_from(&self, start: usize, k: usize) -> f64 {
        let end = (start + k).min(self.prefix.len() - 1);
        self.prefix[end] - self.prefix[start]
    }

    fn marginal(&self, ball: &[u64], covered: &[u64]) -> f64 {
        let mut gain = 0.0;
        for (blk, (&b, &c)) in ball.iter().zip(covered).enumerate() {
            let mut w = b & !c;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                gain += self.masses[blk * 64 + bit];
                w &= w - 1;
            }
        }
        gain
    }

    /// Size of the greedy max-marginal cover; an upper bound for the optimum.
    fn greedy_size(&self) -> usize {
        let blocks = self.balls.first().map_or(0, |b| b.len());
        let mut covered = vec![0u64; blocks];
        let mut mass = 0.0;
        for k in 1..=self.balls.len() {
            let (mut best_gain, mut best_idx) = (0.0f64, usize::MAX);
            for (i, ball) in self.balls.iter().enumerate() {
                let g = self.marginal(ball, &covered);
                if g > best_gain {
                    best_gain = g;
                    best_idx = i;
                }
            }
            if best_idx == usize::MAX {
                return self.balls.len();
            }
            for (c, &b) in covered.iter_mut().zip(&self.balls[best_idx]) {
                *c |= b;
            }
            mass += best_gain;
            if mass > self.target {
                return k;
            }
        }
        self.balls.len()
    }

    fn feasible(&self, k: usize) -> bool {
        let blocks = self.balls.first().map_or(0, |b| b.len());
        let mut covered = vec![0u64; blocks];
        let candidates: Vec<usize> = (0..self.balls.len()).collect();
        self.dfs(k, &candidates, &mut covered, 0.0)
    }

    /// Each combination is visited once, picking its elements in the
    /// gain order of each ancestor node; a child's candidate list is the
    /// tail of its parent's sorted list, so the per-position optimistic
    /// bound (marginals only shrink deeper in the tree) stays valid.
    fn dfs(
        &self,
        k_left: usize,
        candidates: &[usize],
        covered: &mut Vec<u64>,
        covered_mass: f64,
    ) -> bool {
        if covered_mass > self.target {
            return true;
        }
        if k_left == 0 || candidates.is_empty() {
            return false;
        }
        let mut gains: Vec<(f64, usize)> = candidates
            .iter()
            .map(|&i| (self.marginal(&self.balls[i], covered), i))
            .filter(|&(g, _)| g > 0.0)
            .collect();
        gains.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut suffix_top: f64 = gains.iter().take(k_left).map(|&(g, _)| g).sum();
        for pos in 0..gains.len() {
            if covered_mass + suffix_top <= self.target {
                return false;
            }
            let (gain, i) = gains[pos];
            let saved = covered.clone();
            for (c, &b) in covered.iter_mut().zip(&self.balls[i]) {
                *c |= b;
            }
            let rest: Vec<usize> = gains[pos + 1..].iter().map(|&(_, j)| j).collect();
            if self.dfs(k_left - 1, &rest, covered, covered_mass + gain) {
                return true;
            }
            *covered = saved;
            // the window of top gains available to later positions slides
            suffix_top -= gain;
            if pos + k_left < gains.len() {
                suffix_top += gains[pos + k_left].0;
            }
        }
        false
    }

    fn solve(&self) -> u64 {
        // static lower bound from sorted ball masses, greedy upper bound
        let lower = self
            .prefix
            .iter()
            .position(|&p| p > self.target)
            .unwrap_or(self.balls.len());
        let upper = self.greedy_size();
        debug_assert!(lower <= upper);
        let mut k = lower;
        while k < upper {
            if self.feasible(k) {
                return k as u64;
            }
            k += 1;
        }
        upper as u64
    }

    #[allow(dead_code)]
    fn ball_count(&self) -> usize {
        self.ball_mass.len()
    }
}

/// Exact minimal number of ε-balls (arbitrary centers, one candidate ball
/// per word since balls are unions of cylinders) whose union carries mass
/// strictly above `1-ε`, for an arbitrary notion of "within ε" supplied by
/// the caller. Branch-and-bound over mass-sorted candidate balls.
pub fn k_exact_with_distance(
    masses: &[f64],
    within: &dyn Fn(usize, usize) -> bool,
    epsilon_mass: f64,
) -> Result<u64> {
    if masses.is_empty() {
        return Err(Error::Domain("need at least one word".into()));
    }
    if !(epsilon_mass > 0.0 && epsilon_mass < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon {epsilon_mass} outside (0,1)"
        )));
    }
    if masses.len() > 1 << 12 {
        return Err(Error::TooLarge(format!("{} words", masses.len())));
    }
    let n = masses.len();
    let blocks = n.div_ceil(64);
    let mut balls = Vec::with_capacity(n);
    for center in 0..n {
        let mut bits = vec![0u64; blocks];
        for other in 0..n {
            if within(center, other) {
                bits[other / 64] |= 1 << (other % 64);
            }
        }
        balls.push(bits);
    }
    let problem = BallCoverProblem::new(masses.to_vec(), balls, 1.0 - epsilon_mass);
    Ok(problem.solve())
}

/// Exact relative complexity on a small instance: minimal number of ε-balls
/// in the local-time weighted Hamming metric whose conditional mass exceeds
/// `1-ε`. Centers range over all words (a ball is a union of cylinders, so
/// cylinder-word centers lose nothing). Admits `N^{#V} ≤ 2^12`.
pub fn k_exact_small(
    model: &SceneryModel,
    field: &OccupationField,
    epsilon: f64,
) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside (0,1)")));
    }
    let m = field.range_size();
    let total = checked_word_count(model.alphabet_size(), m, 12.0)?;
    let n_sym = model.alphabet_size();
    let sites = field.visited_sites();
    let weights: Vec<u64> = sites.iter().map(|&s| field.count_at(s) as u64).collect();

    let symbols_of = |idx: usize| -> Vec<u8> {
        let mut v = Vec::with_capacity(m);
        let mut rest = idx;
        for _ in 0..m {
            v.push((rest % n_sym) as u8);
            rest /= n_sym;
        }
        v
    };
    let words: Vec<Vec<u8>> = (0..total).map(symbols_of).collect();
    let masses: Vec<f64> = (0..total)
        .map(|i| word_log2_prob(model, i, m).exp2())
        .collect();
    let threshold = epsilon * field.n() as f64 + 1e-9;
    let within = |a: usize, b: usize| -> bool {
        let mut mismatch = 0u64;
        for ((x, y), &w) in words[a].iter().zip(&words[b]).zip(&weights) {
            if x != y {
                mismatch += w;
            }
        }
        (mismatch as f64) <= threshold
    };
    k_exact_with_distance(&masses, &within, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::OccupationField;

    fn field_021() -> OccupationField {
        OccupationField::from_counts(&[(0, 2), (1, 1)])
    }

    fn word(sites: &[i64], symbols: &[u8]) -> SceneryWord {
        SceneryWord::new(sites.to_vec(), symbols.to_vec()).unwrap()
    }

    #[test]
    fn distance_hand_cases() {
        let f = field_021();
        let a = word(&[0, 1], &[0, 0]);
        let b = word(&[0, 1], &[1, 0]);
        let c = word(&[0, 1], &[1, 1]);
        assert_eq!(rwrs_word_distance(&f, &a, &a).unwrap(), 0.0);
        assert!((rwrs_word_distance(&f, &a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(rwrs_word_distance(&f, &a, &c).unwrap(), 1.0);
        let bad = word(&[0, 2], &[0, 0]);
        assert!(rwrs_word_distance(&f, &a, &bad).is_err());
    }

    #[test]
    fn distance_is_a_pseudometric() {
        // symmetry, triangle inequality, identity on randomized small words
        let f = OccupationField::from_counts(&[(-1, 3), (0, 2), (2, 5)]);
        let sites = [-1, 0, 2];
        let mut rng = crate::rng::Rng64::new(5);
        for _ in 0..200 {
            let mut draw = || {
                let s: Vec<u8> = (0..3).map(|_| (rng.next_u64() % 3) as u8).collect();
                word(&sites, &s)
            };
            let (a, b, c) = (draw(), draw(), draw());
            let dab = rwrs_word_distance(&f, &a, &b).unwrap();
            let dba = rwrs_word_distance(&f, &b, &a).unwrap();
            let dac = rwrs_word_distance(&f, &a, &c).unwrap();
            let dcb = rwrs_word_distance(&f, &c, &b).unwrap();
            assert_eq!(dab, dba);
            assert!(dab <= dac + dcb + 1e-12);
            if a.symbols() == b.symbols() {
                assert_eq!(dab, 0.0);
            }
        }
    }

    #[test]
    fn phi_uniform_closed_form() {
        let model = SceneryModel::uniform(2).unwrap();
        for m in [1usize, 3, 7, 12] {
            let f = OccupationField::from_counts(
                &(0..m as i64).map(|k| (k, 1u32)).collect::<Vec<_>>(),
            );
            let phi = phi_estimate(&model, &f, 0.5).unwrap();
            let expect = ((0.5 * 2f64.powi(m as i32)).floor() + 1.0).log2();
            assert!(
                (phi - expect).abs() < 1e-9,
                "m={m}: phi {phi} vs expected {expect}"
            );
        }
    }

    #[test]
    fn phi_tends_to_full_count_as_epsilon_vanishes() {
        let model = SceneryModel::bernoulli(&[0.6, 0.4]).unwrap();
        let f = OccupationField::from_counts(&[(0, 1), (1, 1), (2, 1), (3, 1)]);
        let phi = phi_estimate(&model, &f, 1e-12).unwrap();
        assert!((phi - 4.0).abs() < 1e-6); // log2(2^4)
    }

    #[test]
    fn phi_hand_example_biased() {
        // masses .512, .128x3, ... at ε=0.2 need 4 words
        let model = SceneryModel::bernoulli(&[0.8, 0.2]).unwrap();
        let f = OccupationField::from_counts(&[(0, 1), (1, 1), (2, 1)]);
        let count = phi_exact_small(&model, &f, 0.2).unwrap();
        assert_eq!(count, 4);
        let log2 = phi_estimate(&model, &f, 0.2).unwrap();
        assert!((log2.exp2() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn phi_exact_hand_example_uniform() {
        let model = SceneryModel::uniform(2).unwrap();
        let f = OccupationField::from_counts(&[(0, 1), (1, 1)]);
        // mass > 0.7 of four quarter-words: 3 words
        assert_eq!(phi_exact_small(&model, &f, 0.3).unwrap(), 3);
    }

    #[test]
    fn phi_estimate_matches_enumeration_on_random_instances() {
        let mut rng = crate::rng::Rng64::new(99);
        for _ in 0..300 {
            let m = 1 + (rng.next_u64() % 8) as usize;
            let n_sym = 2 + (rng.next_u64() % 2) as usize;
            let raw: Vec<f64> = (0..n_sym).map(|_| 0.05 + rng.next_f64()).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
            let model = match SceneryModel::bernoulli(&probs) {
                Ok(m) => m,
                Err(_) => continue, // normalization dust
            };
            let counts: Vec<(i64, u32)> = (0..m as i64)
                .map(|k| (k, 1 + (rng.next_u64() % 5) as u32))
                .collect();
            let f = OccupationField::from_counts(&counts);
            let eps = 0.05 + 0.4 * rng.next_f64();
            let exact = phi_exact_small(&model, &f, eps).unwrap();
            let est = phi_estimate(&model, &f, eps).unwrap();
            assert!(
                (est.exp2() - exact as f64).abs() < 1e-6 * exact as f64,
                "phi mismatch: estimate 2^{est} vs exact {exact}"
            );
        }
    }

    #[test]
    fn q_upper_bound_reference_values() {
        assert_eq!(q_upper_bound(100, 0.0, 2).unwrap(), 0.0);
        // 10 + log2 C(100,10); C(100,10) = 17310309456440
        let expect = 10.0 + 17310309456440f64.log2();
        let got = q_upper_bound(100, 0.1, 2).unwrap();
        assert!((got - expect).abs() < 1e-6, "{got} vs {expect}");
        // monotone in ε on [0, 1/2]
        let mut prev = 0.0;
        for i in 0..=50 {
            let eps = i as f64 / 100.0;
            let v = q_upper_bound(100, eps, 2).unwrap();
            assert!(v >= prev - 1e-9);
            prev = v;
        }
        assert!(q_upper_bound(100, 0.6, 2).is_err());
    }

    #[test]
    fn q_rwrs_formula_reference_values() {
        // μ = 0: singleton balls on the inner-covered range
        assert_eq!(q_rwrs_bound_formula(1.0, 0.0, 100.0, 2), 0.0);
        // same table as the direct bound: log2 C(100,10) + 10
        let expect = 10.0 + 17310309456440f64.log2();
        let got = q_rwrs_bound_formula(1.0, 0.05, 100.0, 2);
        assert!((got - expect).abs() < 1e-6, "{got} vs {expect}");
    }

    #[test]
    fn q_rwrs_bound_is_within_the_stirling_envelope() {
        // bound/a ≤ (M·H(2μ) + 2μ·ln N)·log₂e, up to ceiling slack
        use crate::hyperspace::{binary_entropy, is_admissible, DyadicSet};
        for &(kappa, gcells, ucells) in &[(5u32, 8i64, 12i64), (6, 40, 44), (7, 100, 106)] {
            let g = DyadicSet::closed(kappa, (0..gcells).collect());
            let u = DyadicSet::open(kappa, (-1..ucells - 1).collect());
            let pair = is_admissible(&g, &u, 2, 10.0).unwrap();
            for &a in &[1e3, 1e4] {
                let bound = q_rwrs_bound_formula(pair.leb_upsilon, pair.mu, a, 2);
                let nat = pair.leb_upsilon * binary_entropy(2.0 * pair.mu).unwrap()
                    + 2.0 * pair.mu * 2f64.ln();
                assert!(
                    bound / a <= nat * LOG2_E + 20.0 / a,
                    "kappa {kappa}, a {a}: bound/a = {} vs envelope {}",
                    bound / a,
                    nat * LOG2_E
                );
            }
        }
    }

    #[test]
    fn q_exact_hand_cases() {
        let model = SceneryModel::uniform(2).unwrap();
        let f = field_021();
        let sites = f.visited_sites();
        let all: Vec<SceneryWord> = (0..4)
            .map(|i| word(&sites, &[(i & 1) as u8, (i >> 1) as u8]))
            .collect();
        // distances from any word: {0, 1/3, 2/3, 1}; at ε=0.4 balls hold 2
        assert_eq!(q_exact_small(&f, &all, 0.4).unwrap(), 2);
        // all identical words
        let same = vec![all[0].clone(), all[0].clone(), all[0].clone()];
        assert_eq!(q_exact_small(&f, &same, 0.1).unwrap(), 3);
        // ε below the minimal positive distance
        assert_eq!(q_exact_small(&f, &all, 0.2).unwrap(), 1);
        let _ = model;
    }

    #[test]
    fn k_exact_hand_cases() {
        let model = SceneryModel::uniform(2).unwrap();
        let f = field_021();
        // ε = 0.3: weights 2/3 and 1/3 both exceed 0.3 → singleton balls;
        // need mass > 0.7 of four equal words → 3 balls
        assert_eq!(k_exact_small(&model, &f, 0.3).unwrap(), 3);
        // one ball covers everything once ε reaches the diameter
        assert_eq!(k_exact_small(&model, &f, 0.999).unwrap(), 1);
    }

    #[test]
    fn k_collapses_to_phi_below_the_minimal_distance() {
        let model = SceneryModel::bernoulli(&[0.7, 0.3]).unwrap();
        let f = OccupationField::from_counts(&[(0, 1), (1, 2), (3, 1)]);
        // minimal positive distance is 1/4; pick ε below it
        let eps = 0.2;
        let k = k_exact_small(&model, &f, eps).unwrap();
        let phi = phi_exact_small(&model, &f, eps).unwrap();
        assert_eq!(k, phi);
    }

    #[test]
    fn k_exact_one_ball_when_radius_swallows_diameter() {
        let model = SceneryModel::uniform(3).unwrap();
        let f = OccupationField::from_counts(&[(0, 1), (5, 1)]);
        assert_eq!(k_exact_small(&model, &f, 0.99).unwrap(), 1);
    }

    #[test]
    fn sandwich_hand_cases() {
        assert_eq!(sandwich(10.0, 0.0), (10.0, 10.0));
        assert_eq!(sandwich(10.0, 3.0), (7.0, 10.0));
        assert_eq!(sandwich(3.0, 5.0), (0.0, 3.0));
    }

    #[test]
    fn estimate_interval_is_well_formed() {
        let e = ComplexityEstimate::new(100, 0.1, 12.0, 5.0, None);
        assert_eq!(e.log2_k_interval, (7.0, 12.0));
        assert_eq!(e.midpoint(), 9.5);
        let e = ComplexityEstimate::new(100, 0.1, 12.0, 50.0, Some(2.0));
        assert_eq!(e.log2_k_interval, (10.0, 12.0));
    }
}
