//! Walk paths, occupation fields, ranges, and the scaled local-time field.

use crate::error::{Error, Result};
use crate::hyperspace::HyperSet;
use crate::rng::Rng64;
use crate::stable_laws::JumpLaw;

/// One simulated path `S_0 = 0, S_1, ..., S_{n-1}`.
#[derive(Clone, Debug)]
pub struct WalkPath {
    pub n: usize,
    pub positions: Vec<i64>,
    pub seed: u64,
}

/// Simulate `S_0..S_{n-1}` with i.i.d. jumps. Deterministic in
/// `(law, n, seed)`, and prefix-stable: the first `m` positions of an
/// `n`-step path equal the `m`-step path with the same seed.
pub fn simulate_path(law: &JumpLaw, n: usize, seed: u64) -> WalkPath {
    assert!(n >= 1, "path length must be at least 1");
    let mut rng = Rng64::new(seed);
    let mut positions = Vec::with_capacity(n);
    let mut s = 0i64;
    positions.push(0);
    for _ in 1..n {
        s += law.sample(&mut rng);
        positions.push(s);
    }
    WalkPath { n, positions, seed }
}

/// Endpoint `S_n` (the position after `n` jumps) without storing the path.
pub fn endpoint(law: &JumpLaw, n: usize, seed: u64) -> i64 {
    let mut rng = Rng64::new(seed);
    let mut s = 0i64;
    for _ in 0..n {
        s += law.sample(&mut rng);
    }
    s
}

/// Spans larger than this fall back to a sorted sparse representation
/// instead of a dense count array (huge single jumps of heavy-tailed laws).
const DENSE_SPAN_LIMIT: i64 = 1 << 26;

#[derive(Clone, Debug)]
enum Counts {
    Dense { offset: i64, counts: Vec<u32> },
    Sparse(Vec<(i64, u32)>),
}

/// Per-site visit counts `N_{n,k}` of one path and its range `V_n`.
#[derive(Clone, Debug)]
pub struct OccupationField {
    n: usize,
    counts: Counts,
}

impl OccupationField {
    /// Test constructor from explicit `(site, count)` pairs.
    pub fn from_counts(pairs: &[(i64, u32)]) -> Self {
        let mut v: Vec<(i64, u32)> = pairs.iter().copied().filter(|&(_, c)| c > 0).collect();
        v.sort_unstable();
        let n = v.iter().map(|&(_, c)| c as usize).sum();
        OccupationField {
            n,
            counts: Counts::Sparse(v),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn count_at(&self, site: i64) -> u32 {
        match &self.counts {
            Counts::Dense { offset, counts } => {
                let idx = site - offset;
                if idx < 0 || idx as usize >= counts.len() {
                    0
                } else {
                    counts[idx as usize]
                }
            }
            Counts::Sparse(v) => match v.binary_search_by_key(&site, |&(s, _)| s) {
                Ok(i) => v[i].1,
                Err(_) => 0,
            },
        }
    }

    /// Sorted visited sites (the range `V_n`).
    pub fn visited_sites(&self) -> Vec<i64> {
        match &self.counts {
            Counts::Dense { offset, counts } => counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(i, _)| offset + i as i64)
                .collect(),
            Counts::Sparse(v) => v.iter().map(|&(s, _)| s).collect(),
        }
    }

    /// `#V_n`.
    pub fn range_size(&self) -> usize {
        match &self.counts {
            Counts::Dense { counts, .. } => counts.iter().filter(|&&c| c > 0).count(),
            Counts::Sparse(v) => v.len(),
        }
    }

    pub fn min_site(&self) -> i64 {
        match &self.counts {
            Counts::Dense { offset, counts } => {
                *offset + counts.iter().position(|&c| c > 0).unwrap() as i64
            }
            Counts::Sparse(v) => v[0].0,
        }
    }

    pub fn max_site(&self) -> i64 {
        match &self.counts {
            Counts::Dense { offset, counts } => {
                *offset + counts.iter().rposition(|&c| c > 0).unwrap() as i64
            }
            Counts::Sparse(v) => v[v.len() - 1].0,
        }
    }
}

/// Exact visit counts of a path. Uses a contiguous array over
/// `[min S, max S]` (the range is an interval-bounded set of size `O(a(n))`
/// and this is the hot loop); pathological heavy-tail spans switch to a
/// sort-based sparse count.
pub fn occupation_field(path: &WalkPath) -> OccupationField {
    let min = *path.positions.iter().min().unwrap();
    let max = *path.positions.iter().max().unwrap();
    let span = max - min;
    let counts = if span < DENSE_SPAN_LIMIT {
        let mut counts = vec![0u32; span as usize + 1];
        for &p in &path.positions {
            counts[(p - min) as usize] += 1;
        }
        Counts::Dense {
            offset: min,
            counts,
        }
    } else {
        let mut sorted = path.positions.clone();
        sorted.sort_unstable();
        let mut pairs: Vec<(i64, u32)> = Vec::new();
        for &p in &sorted {
            match pairs.last_mut() {
                Some(last) if last.0 == p => last.1 += 1,
                _ => pairs.push((p, 1)),
            }
        }
        Counts::Sparse(pairs)
    };
    let field = OccupationField {
        n: path.n,
        counts,
    };
    debug_assert_eq!(
        field.visited_sites().iter().map(|&s| field.count_at(s) as usize).sum::<usize>(),
        path.n
    );
    field
}

/// The finite point set `{k / a_n : k ∈ V_n}` as degenerate intervals.
pub fn scaled_range(field: &OccupationField, a_n: f64) -> HyperSet {
    assert!(a_n > 0.0);
    let pts: Vec<f64> = field
        .visited_sites()
        .iter()
        .map(|&k| k as f64 / a_n)
        .collect();
    HyperSet::from_points(&pts).expect("range is nonempty")
}

/// `Y_{E,n} = (1/ōa) · min { N_{n,k} : k ∈ ℤ, k/a_n ∈ E }`. Returns 0 when
/// some lattice point of `a_n·E` is unvisited; it is a domain error for
/// `a_n·E` to contain no lattice point at all (that is a different kind of
/// zero and is reported as such).
pub fn min_local_time_over(
    field: &OccupationField,
    e: &HyperSet,
    a_n: f64,
    abar_n: f64,
) -> Result<f64> {
    if !(a_n > 0.0 && abar_n > 0.0) {
        return Err(Error::Domain("scale factors must be positive".into()));
    }
    let mut min_count: Option<u32> = None;
    for &(l, r) in e.intervals() {
        let k_lo = (l * a_n - 1e-9).ceil() as i64;
        let k_hi = (r * a_n + 1e-9).floor() as i64;
        for k in k_lo..=k_hi {
            let c = field.count_at(k);
            min_count = Some(match min_count {
                None => c,
                Some(m) => m.min(c),
            });
        }
    }
    match min_count {
        None => Err(Error::Domain(
            "scaled set contains no lattice point".into(),
        )),
        Some(m) => Ok(m as f64 / abar_n),
    }
}

/// Space–time rescaled local-time field on a grid: bilinear interpolation of
/// prefix counts, `L(t, x) = N̂(n·t, a_n·x) / ōa_n`.
#[derive(Clone, Debug)]
pub struct LocalTimeField {
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// `values[i][j] = L(t_grid[i], x_grid[j])`.
    pub values: Vec<Vec<f64>>,
}

/// Evaluate the rescaled field. Prefix occupation snapshots are materialized
/// only at the integer times the grid needs, not at every step.
pub fn local_time_field(
    path: &WalkPath,
    a_n: f64,
    abar_n: f64,
    t_grid: &[f64],
    x_grid: &[f64],
) -> Result<LocalTimeField> {
    let n = path.n;
    if t_grid.windows(2).any(|w| w[0] > w[1]) || x_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("grids must be sorted".into()));
    }
    if t_grid.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::Domain("t grid must lie in [0,1]".into()));
    }

    let min = *path.positions.iter().min().unwrap();
    let max = *path.positions.iter().max().unwrap();
    let span = (max - min) as usize + 1;

    // integer prefix times needed for interpolation in t
    let mut needed: Vec<usize> = Vec::new();
    for &t in t_grid {
        let q = ((n as f64) * t).floor() as usize;
        let q = q.min(n);
        needed.push(q);
        if ((n as f64) * t).fract() > 0.0 && q + 1 <= n {
            needed.push(q + 1);
        }
    }
    needed.sort_unstable();
    needed.dedup();

    // one pass over the path, snapshotting the running counts
    let mut snapshots: Vec<(usize, Vec<u32>)> = Vec::with_capacity(needed.len());
    let mut counts = vec![0u32; span];
    let mut next = 0usize;
    for j in 0..=n {
        while next < needed.len() && needed[next] == j {
            snapshots.push((j, counts.clone()));
            next += 1;
        }
        if j < n {
            counts[(path.positions[j] - min) as usize] += 1;
        }
    }

    let snap = |q: usize| -> &Vec<u32> {
        let i = snapshots.binary_search_by_key(&q, |&(t, _)| t).unwrap();
        &snapshots[i].1
    };
    let count_at = |c: &Vec<u32>, site: i64| -> f64 {
        let idx = site - min;
        if idx < 0 || idx as usize >= c.len() {
            0.0
        } else {
            c[idx as usize] as f64
        }
    };

    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let nt = n as f64 * t;
        let q = (nt.floor() as usize).min(n);
        let s = nt - q as f64;
        let c0 = snap(q);
        let c1 = if s > 0.0 { Some(snap(q + 1)) } else { None };
        let mut row = Vec::with_capacity(x_grid.len());
        for &x in x_grid {
            let ax = a_n * x;
            let k = ax.floor() as i64;
            let u = ax - k as f64;
            let mut v = (1.0 - s) * (1.0 - u) * count_at(c0, k)
                + (1.0 - s) * u * count_at(c0, k + 1);
            if let Some(c1) = c1 {
                v += s * (1.0 - u) * count_at(c1, k) + s * u * count_at(c1, k + 1);
            }
            row.push(v / abar_n);
        }
        values.push(row);
    }
    Ok(LocalTimeField {
        t_grid: t_grid.to_vec(),
        x_grid: x_grid.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_seed, Stream};

    #[test]
    fn single_step_path_is_origin_only() {
        let law = JumpLaw::lazy_gaussian(0.5).unwrap();
        let p = simulate_path(&law, 1, 3);
        assert_eq!(p.positions, vec![0]);
    }

    #[test]
    fn paths_are_deterministic_and_prefix_stable() {
        let law = JumpLaw::lazy_gaussian(0.5).unwrap();
        let a = simulate_path(&law, 1000, 11);
        let b = simulate_path(&law, 1000, 11);
        assert_eq!(a.positions, b.positions);
        let c = simulate_path(&law, 400, 11);
        assert_eq!(&a.positions[..400], &c.positions[..]);
    }

    #[test]
    fn occupation_counts_hand_examples() {
        let f = OccupationField::from_counts(&[(0, 2), (1, 1)]);
        assert_eq!(f.n(), 3);
        assert_eq!(f.count_at(0), 2);
        assert_eq!(f.count_at(1), 1);
        assert_eq!(f.visited_sites(), vec![0, 1]);

        let law = JumpLaw::unit_step();
        let p = simulate_path(&law, 5, 0);
        let f = occupation_field(&p);
        assert_eq!(f.visited_sites(), vec![0, 1, 2, 3, 4]);
        assert!(f.visited_sites().iter().all(|&s| f.count_at(s) == 1));
    }

    #[test]
    fn occupation_conserves_total_time() {
        let law = JumpLaw::pareto(1.5, 0.2).unwrap();
        for t in 0..20 {
            let p = simulate_path(&law, 5000, trial_seed(5, t, Stream::Walk));
            let f = occupation_field(&p);
            let total: usize = f.visited_sites().iter().map(|&s| f.count_at(s) as usize).sum();
            assert_eq!(total, 5000);
            assert!(f.count_at(0) > 0, "origin is always visited");
            assert!(f.range_size() <= 5000);
        }
    }

    #[test]
    fn sparse_fallback_handles_giant_spans() {
        let path = WalkPath {
            n: 4,
            positions: vec![0, 1, 1 << 30, (1 << 30) + 1],
            seed: 0,
        };
        let f = occupation_field(&path);
        assert_eq!(f.count_at(1), 1);
        assert_eq!(f.count_at(1 << 30), 1);
        assert_eq!(f.range_size(), 4);
        assert_eq!(f.min_site(), 0);
        assert_eq!(f.max_site(), (1 << 30) + 1);
    }

    #[test]
    fn walk_mean_obeys_clt_bound() {
        let law = JumpLaw::lazy_gaussian(0.5).unwrap();
        let n = 100_000usize;
        let trials = 1000;
        let mut sum = 0.0;
        for t in 0..trials {
            sum += endpoint(&law, n, trial_seed(77, t, Stream::Walk)) as f64;
        }
        let mean = sum / trials as f64;
        let bound = 4.0 * (0.5 * n as f64).sqrt() / (trials as f64).sqrt();
        assert!(mean.abs() < bound, "mean {mean} exceeds CLT bound {bound}");
    }

    #[test]
    fn scaled_range_is_the_pointwise_rescaling() {
        let f = OccupationField::from_counts(&[(-3, 1), (0, 1), (3, 1)]);
        let h = scaled_range(&f, 3.0);
        let pts: Vec<f64> = h.intervals().iter().map(|&(l, _)| l).collect();
        assert_eq!(pts, vec![-1.0, 0.0, 1.0]);

        let f = OccupationField::from_counts(&[(0, 1), (1, 1)]);
        let h = scaled_range(&f, 2.0);
        let pts: Vec<f64> = h.intervals().iter().map(|&(l, _)| l).collect();
        assert_eq!(pts, vec![0.0, 0.5]);

        let f = OccupationField::from_counts(&[(0, 7)]);
        let h = scaled_range(&f, 11.0);
        assert_eq!(h.intervals(), &[(0.0, 0.0)]);
    }

    #[test]
    fn min_local_time_hand_cases() {
        let f = OccupationField::from_counts(&[(0, 2), (1, 1)]);
        let e = HyperSet::interval(-0.1, 0.1).unwrap();
        let y = min_local_time_over(&f, &e, 1.0, 2.0).unwrap();
        assert_eq!(y, 1.0);

        // lattice points exist but are unvisited -> 0
        let e = HyperSet::interval(4.9, 6.1).unwrap();
        let y = min_local_time_over(&f, &e, 1.0, 2.0).unwrap();
        assert_eq!(y, 0.0);

        // no lattice point at all -> domain error
        let e = HyperSet::interval(0.3, 0.4).unwrap();
        assert!(min_local_time_over(&f, &e, 1.0, 2.0).is_err());
    }

    #[test]
    fn min_local_time_is_monotone_in_the_set() {
        let law = JumpLaw::lazy_gaussian(0.5).unwrap();
        let small = HyperSet::interval(-0.25, 0.25).unwrap();
        let large = HyperSet::interval(-0.5, 0.5).unwrap();
        for t in 0..10 {
            let p = simulate_path(&law, 20_000, trial_seed(3, t, Stream::Walk));
            let f = occupation_field(&p);
            let a = law.normalizing_constant(20_000).unwrap();
            let abar = law.integrated_normalizer(20_000).unwrap();
            let ys = min_local_time_over(&f, &small, a, abar).unwrap();
            let yl = min_local_time_over(&f, &large, a, abar).unwrap();
            assert!(ys >= yl, "min over a larger set must be smaller");
        }
    }

    #[test]
    fn local_time_field_interpolates_exactly_at_nodes() {
        let law = JumpLaw::lazy_gaussian(0.5).unwrap();
        let n = 1000usize;
        let p = simulate_path(&law, n, 42);
        let f = occupation_field(&p);
        let a = law.normalizing_constant(n).unwrap();
        let abar = law.integrated_normalizer(n).unwrap();

        // t = 0 row vanishes
        let x_grid: Vec<f64> = (-20..=20).map(|i| i as f64 / 10.0).collect();
        let lt = local_time_field(&p, a, abar, &[0.0, 0.5, 1.0], &x_grid).unwrap();
        assert!(lt.values[0].iter().all(|&v| v == 0.0));
        // monotone in t for each x
        for j in 0..x_grid.len() {
            assert!(lt.values[0][j] <= lt.values[1][j] + 1e-12);
            assert!(lt.values[1][j] <= lt.values[2][j] + 1e-12);
        }

        // at t = 1 and lattice x the field equals N_{n,k}/abar
        let sites = f.visited_sites();
        let x_lattice: Vec<f64> = sites.iter().map(|&k| k as f64 / a).collect();
        let lt = local_time_field(&p, a, abar, &[1.0], &x_lattice).unwrap();
        let max_field = lt.values[0]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let max_count = sites.iter().map(|&k| f.count_at(k)).max().unwrap() as f64 / abar;
        assert!(
            (max_field - max_count).abs() < 1e-6 * max_count,
            "sup of L(1,·) {max_field} vs max count {max_count}"
        );
        for (j, &k) in sites.iter().enumerate() {
            let expect = f.count_at(k) as f64 / abar;
            assert!((lt.values[0][j] - expect).abs() < 1e-6 * expect.max(1e-9));
        }
    }
}
