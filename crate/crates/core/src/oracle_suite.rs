//! Randomized small-instance oracle suite: exhaustive enumeration oracles
//! cross-checking the fast complexity paths, the sandwich inequality with
//! exact quantities, alphabet-merge monotonicity of the exact covering
//! number, and the window-refinement double inequality on direct-product
//! instances.

use crate::complexity::{k_exact_small, k_exact_with_distance, phi_estimate, phi_exact_small, q_exact_small};
use crate::error::Result;
use crate::rng::Rng64;
use crate::scenery::{SceneryModel, SceneryWord};
use crate::walk::OccupationField;

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub instances: usize,
    pub phi_agreement_checks: usize,
    pub sandwich_checks: usize,
    pub merge_monotonicity_checks: usize,
    pub refinement_checks: usize,
    pub greedy_cover_checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_model(rng: &mut Rng64, max_symbols: usize) -> SceneryModel {
    loop {
        let n_sym = 2 + (rng.next_u64() as usize) % (max_symbols - 1);
        let raw: Vec<f64> = (0..n_sym).map(|_| 0.08 + rng.next_f64()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        if let Ok(model) = SceneryModel::bernoulli(&probs) {
            return model;
        }
    }
}

fn random_field(rng: &mut Rng64, m: usize) -> OccupationField {
    let pairs: Vec<(i64, u32)> = (0..m as i64)
        .map(|k| (k, 1 + (rng.next_u64() % 6) as u32))
        .collect();
    OccupationField::from_counts(&pairs)
}

fn all_words(sites: &[i64], alphabet: usize) -> Vec<SceneryWord> {
    let m = sites.len();
    let total = (alphabet as u64).pow(m as u32) as usize;
    (0..total)
        .map(|idx| {
            let mut rest = idx;
            let symbols: Vec<u8> = (0..m)
                .map(|_| {
                    let s = (rest % alphabet) as u8;
                    rest /= alphabet;
                    s
                })
                .collect();
            SceneryWord::new(sites.to_vec(), symbols).unwrap()
        })
        .collect()
}

/// Exhaustive minimum partial cover over all subsets of words-as-singletons
/// — only feasible for ≤ 16 words, where it independently certifies that the
/// greedy-by-mass prefix is an optimal cylinder cover.
fn min_cover_by_subset_enumeration(masses: &[f64], target: f64) -> u64 {
    let n = masses.len();
    assert!(n <= 16);
    let mut best = n as u64;
    for mask in 1u32..(1 << n) {
        let mass: f64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| masses[i])
            .sum();
        if mass > target {
            best = best.min(mask.count_ones() as u64);
        }
    }
    best
}

/// Merge symbols 0 and 1 of a model into one (the coarsened partition).
fn merge_first_two_symbols(model: &SceneryModel) -> Result<SceneryModel> {
    let p = model.probs();
    let mut merged = vec![p[0] + p[1]];
    merged.extend_from_slice(&p[2..]);
    if merged.len() < 2 {
        // merging a binary alphabet collapses everything; keep a two-symbol
        // model with a vanishingly informative split so K is trivially 1..=K
        return SceneryModel::bernoulli(&[merged[0] - 1e-9, 1e-9]);
    }
    SceneryModel::bernoulli(&merged)
}

pub fn run(instances: usize, master_seed: u64) -> SuiteReport {
    let mut rng = Rng64::new(master_seed);
    let mut report = SuiteReport {
        instances,
        ..Default::default()
    };

    for inst in 0..instances {
        // -- Φ agreement on a moderately sized instance ------------------
        {
            let model = random_model(&mut rng, 4);
            let max_m = match model.alphabet_size() {
                2 => 10,
                3 => 7,
                _ => 5,
            };
            let m = 1 + (rng.next_u64() as usize) % max_m;
            let field = random_field(&mut rng, m);
            let eps = 0.05 + 0.4 * rng.next_f64();
            report.phi_agreement_checks += 1;
            match (phi_exact_small(&model, &field, eps), phi_estimate(&model, &field, eps)) {
                (Ok(exact), Ok(est)) => {
                    if (est.exp2() - exact as f64).abs() > 1e-6 * exact as f64 {
                        report.failures.push(format!(
                            "instance {inst}: phi estimate 2^{est} != exact {exact}"
                        ));
                    }
                }
                (a, b) => report
                    .failures
                    .push(format!("instance {inst}: phi paths failed: {a:?} / {b:?}")),
            }
        }

        // -- exact sandwich Φ/𝒬 ≤ K ≤ Φ ----------------------------------
        {
            let model = random_model(&mut rng, 3);
            let max_m = if model.alphabet_size() == 2 { 7 } else { 4 };
            let m = 1 + (rng.next_u64() as usize) % max_m;
            let field = random_field(&mut rng, m);
            let eps = 0.05 + 0.5 * rng.next_f64();
            let words = all_words(&field.visited_sites(), model.alphabet_size());
            report.sandwich_checks += 1;
            let phi = phi_exact_small(&model, &field, eps);
            let q = q_exact_small(&field, &words, eps);
            let k = k_exact_small(&model, &field, eps);
            match (phi, q, k) {
                (Ok(phi), Ok(q), Ok(k)) => {
                    if !(phi <= k * q && k <= phi) {
                        report.failures.push(format!(
                            "instance {inst}: sandwich broken: phi={phi} q={q} k={k} (m={m}, eps={eps})"
                        ));
                    }
                }
                (a, b, c) => report.failures.push(format!(
                    "instance {inst}: sandwich paths failed: {a:?} / {b:?} / {c:?}"
                )),
            }
        }

        // -- alphabet-merge monotonicity of K ------------------------------
        {
            let model = random_model(&mut rng, 4);
            let max_m = match model.alphabet_size() {
                2 => 6,
                3 => 4,
                _ => 3,
            };
            let m = 1 + (rng.next_u64() as usize) % max_m;
            let field = random_field(&mut rng, m);
            let eps = 0.05 + 0.5 * rng.next_f64();
            report.merge_monotonicity_checks += 1;
            let coarse = merge_first_two_symbols(&model);
            match (
                k_exact_small(&model, &field, eps),
                coarse.and_then(|c| k_exact_small(&c, &field, eps)),
            ) {
                (Ok(k_fine), Ok(k_coarse)) => {
                    if k_coarse > k_fine {
                        report.failures.push(format!(
                            "instance {inst}: merging symbols raised K: {k_coarse} > {k_fine}"
                        ));
                    }
                }
                (a, b) => report
                    .failures
                    .push(format!("instance {inst}: merge paths failed: {a:?} / {b:?}")),
            }
        }

        // -- window-refinement double inequality ---------------------------
        // Direct-product instance: deterministic +1 walk of length n, words
        // over sites 0..n+k-2, window distance for the k-fold refinement
        // d'(w,w') = (1/n)·#{j < n : w[j..j+k) ≠ w'[j..j+k)}, k = 2.
        {
            let n = 4 + (rng.next_u64() as usize) % 4; // 4..=7
            let total_sites = n + 1;
            let probs = {
                let p = 0.25 + 0.5 * rng.next_f64();
                [p, 1.0 - p]
            };
            let words = 1usize << total_sites;
            let masses: Vec<f64> = (0..words)
                .map(|w| {
                    let ones = (w as u32).count_ones() as i32;
                    probs[1].powi(ones) * probs[0].powi(total_sites as i32 - ones)
                })
                .collect();
            let base_dist = |a: usize, b: usize| -> f64 {
                let diff = (a ^ b) & ((1 << n) - 1);
                (diff as u32).count_ones() as f64 / n as f64
            };
            let refined_dist = |a: usize, b: usize| -> f64 {
                let diff = a ^ b;
                let mut mismatch = 0usize;
                for j in 0..n {
                    if diff >> j & 0b11 != 0 {
                        mismatch += 1;
                    }
                }
                mismatch as f64 / n as f64
            };
            let eps = 0.1 + 0.5 * rng.next_f64();
            let slack = 4.0 / n as f64; // k²/n at k = 2
            report.refinement_checks += 1;
            let k_refined_wide = k_exact_with_distance(
                &masses,
                &|a, b| refined_dist(a, b) <= eps + slack + 1e-12,
                eps,
            );
            let k_base = k_exact_with_distance(
                &masses,
                &|a, b| base_dist(a, b) <= eps / 2.0 + 1e-12,
                eps,
            );
            let k_refined_half = k_exact_with_distance(
                &masses,
                &|a, b| refined_dist(a, b) <= eps / 2.0 + 1e-12,
                eps,
            );
            match (k_refined_wide, k_base, k_refined_half) {
                (Ok(kw), Ok(kb), Ok(kh)) => {
                    if !(kw <= kb && kb <= kh) {
                        report.failures.push(format!(
                            "instance {inst}: refinement inequality broken: {kw} <= {kb} <= {kh} (n={n}, eps={eps})"
                        ));
                    }
                }
                (a, b, c) => report.failures.push(format!(
                    "instance {inst}: refinement paths failed: {a:?} / {b:?} / {c:?}"
                )),
            }
        }

        // -- greedy cylinder cover is optimal (subset-enumeration oracle) --
        {
            let model = random_model(&mut rng, 4);
            let m = match model.alphabet_size() {
                2 => 1 + (rng.next_u64() as usize) % 4, // ≤ 16 words
                3 => 1 + (rng.next_u64() as usize) % 2, // ≤ 9 words
                _ => 2,                                 // 16 words
            };
            let field = random_field(&mut rng, m);
            let eps = 0.05 + 0.5 * rng.next_f64();
            let total = (model.alphabet_size() as u64).pow(m as u32) as usize;
            let masses: Vec<f64> = {
                let words = all_words(&field.visited_sites(), model.alphabet_size());
                words
                    .iter()
                    .map(|w| crate::scenery::word_probability(&model, w).unwrap())
                    .collect()
            };
            assert_eq!(masses.len(), total);
            report.greedy_cover_checks += 1;
            let brute = min_cover_by_subset_enumeration(&masses, 1.0 - eps);
            match phi_exact_small(&model, &field, eps) {
                Ok(phi) => {
                    if phi != brute {
                        report.failures.push(format!(
                            "instance {inst}: greedy cylinder cover {phi} != subset optimum {brute}"
                        ));
                    }
                }
                Err(e) => report
                    .failures
                    .push(format!("instance {inst}: phi failed: {e}")),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_short_suite_run_is_clean() {
        let report = run(40, 20240601);
        assert!(
            report.passed(),
            "oracle suite failures: {:?}",
            report.failures
        );
        assert_eq!(report.phi_agreement_checks, 40);
        assert_eq!(report.sandwich_checks, 40);
    }
}
