//! The hyperspace of nonempty closed bounded subsets of the line, restricted
//! to finite unions of closed intervals: Hausdorff metric, dyadic inner/outer
//! approximations, and admissibility of dyadic sandwiches.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Finite union of disjoint closed intervals, sorted by left endpoint.
/// Degenerate intervals (points) are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperSet {
    intervals: Vec<(f64, f64)>,
}

impl HyperSet {
    /// Normalizing constructor: sorts, merges overlapping or touching
    /// intervals, rejects empty or unbounded input.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Domain("hyperset must be nonempty".into()));
        }
        for &(l, r) in &intervals {
            if !l.is_finite() || !r.is_finite() || l > r {
                return Err(Error::Domain(format!("bad interval [{l}, {r}]")));
            }
        }
        intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (l, r) in intervals {
            match merged.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        Ok(HyperSet { intervals: merged })
    }

    pub fn interval(l: f64, r: f64) -> Result<Self> {
        HyperSet::new(vec![(l, r)])
    }

    pub fn point(x: f64) -> Result<Self> {
        HyperSet::new(vec![(x, x)])
    }

    pub fn from_points(points: &[f64]) -> Result<Self> {
        HyperSet::new(points.iter().map(|&x| (x, x)).collect())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn inf(&self) -> f64 {
        self.intervals[0].0
    }

    pub fn sup(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].1
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals
            .binary_search_by(|&(l, r)| {
                if x < l {
                    std::cmp::Ordering::Greater
                } else if x > r {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    /// Distance from a point to the set.
    pub fn distance_to(&self, x: f64) -> f64 {
        let mut best = f64::INFINITY;
        // nearest interval by binary search on left endpoints
        let idx = self.intervals.partition_point(|&(l, _)| l <= x);
        if idx > 0 {
            let (l, r) = self.intervals[idx - 1];
            best = best.min(if x <= r { 0.0 } else { x - r }.max(l - x));
        }
        if idx < self.intervals.len() {
            let (l, _) = self.intervals[idx];
            best = best.min(l - x);
        }
        best.max(0.0)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        HyperSet::new(self.intervals.iter().map(|&(l, r)| (c * l, c * r)).collect())
    }

    /// Merge consecutive components whose gap is at most `max_gap`.
    /// Used to read a finite sample at lattice pitch as the closed set it
    /// discretizes.
    pub fn fill_gaps(&self, max_gap: f64) -> Self {
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.intervals.len());
        for &(l, r) in &self.intervals {
            match merged.last_mut() {
                Some(last) if l - last.1 <= max_gap => last.1 = r,
                _ => merged.push((l, r)),
            }
        }
        HyperSet { intervals: merged }
    }

    /// Smallest positive gap between consecutive points/components;
    /// `None` for a single component.
    pub fn min_positive_gap(&self) -> Option<f64> {
        self.intervals
            .windows(2)
            .map(|w| w[1].0 - w[0].1)
            .filter(|&g| g > 0.0)
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }
}

/// Hausdorff metric `h(A, B) = inf { r > 0 : A ⊂ N(B,r), B ⊂ N(A,r) }`,
/// computed exactly from interval endpoints.
pub fn hausdorff_distance(a: &HyperSet, b: &HyperSet) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// `sup_{x ∈ A} d(x, B)`. The supremum is attained either at an endpoint of
/// A or at a midpoint of a gap of B that lies inside A.
fn directed_hausdorff(a: &HyperSet, b: &HyperSet) -> f64 {
    let mut best = 0.0f64;
    for &(l, r) in a.intervals() {
        best = best.max(b.distance_to(l)).max(b.distance_to(r));
    }
    for w in b.intervals().windows(2) {
        let mid = 0.5 * (w[0].1 + w[1].0);
        if a.contains(mid) {
            best = best.max(0.5 * (w[1].0 - w[0].1));
        }
    }
    best
}

/// Finite union of order-κ dyadic cells `[p/2^κ, (p+1)/2^κ]`, stored by cell
/// index. `open == true` means the interior of the closed union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicSet {
    order: u32,
    cells: Vec<i64>,
    open: bool,
}

impl DyadicSet {
    pub fn closed(order: u32, mut cells: Vec<i64>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        DyadicSet {
            order,
            cells,
            open: false,
        }
    }

    pub fn open(order: u32, mut cells: Vec<i64>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        DyadicSet {
            order,
            cells,
            open: true,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    /// Lebesgue measure (of the closed union; removing edges changes nothing).
    pub fn lebesgue(&self) -> f64 {
        self.cells.len() as f64 / (1u64 << self.order) as f64
    }

    /// The closed union as a hyperset; `None` when empty.
    pub fn as_hyperset(&self) -> Option<HyperSet> {
        if self.cells.is_empty() {
            return None;
        }
        let w = 1.0 / (1u64 << self.order) as f64;
        HyperSet::new(
            self.cells
                .iter()
                .map(|&p| (p as f64 * w, (p + 1) as f64 * w))
                .collect(),
        )
        .ok()
    }
}

/// `C_κ(E)`: the largest closed dyadic set of order κ contained in the
/// interior of E. May be empty (e.g. when E is a finite point set).
pub fn dyadic_inner(e: &HyperSet, kappa: u32) -> DyadicSet {
    let scale = (1u64 << kappa) as f64;
    let mut cells = Vec::new();
    for &(l, r) in e.intervals() {
        if l >= r {
            continue; // points have empty interior
        }
        // need p/2^κ > l and (p+1)/2^κ < r, strictly
        let p_min = (l * scale).floor() as i64 + 1;
        let p_max = (r * scale).ceil() as i64 - 2;
        for p in p_min..=p_max {
            cells.push(p);
        }
    }
    DyadicSet::closed(kappa, cells)
}

/// `U_κ(E)`: the smallest open dyadic set of order κ containing E — the
/// interior of the union of every order-κ cell meeting E. A point of E on a
/// shared cell edge forces both adjacent cells (an open set must contain it).
pub fn dyadic_outer(e: &HyperSet, kappa: u32) -> DyadicSet {
    let scale = (1u64 << kappa) as f64;
    let mut cells = Vec::new();
    for &(l, r) in e.intervals() {
        // cell [p, p+1] meets [l, r] iff p <= r·2^κ and p+1 >= l·2^κ
        let p_min = (l * scale - 1.0).ceil() as i64;
        let p_max = (r * scale).floor() as i64;
        for p in p_min..=p_max {
            cells.push(p);
        }
    }
    debug_assert!(!cells.is_empty());
    DyadicSet::open(kappa, cells)
}

/// Binary entropy `H(t) = -t ln t - (1-t) ln(1-t)` in nats, with
/// `H(0) = H(1) = 0` by continuity.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("entropy argument {t} outside [0,1]")));
    }
    if t == 0.0 || t == 1.0 {
        return Ok(0.0);
    }
    Ok(-t * t.ln() - (1.0 - t) * (1.0 - t).ln())
}

/// A dyadic sandwich (Γ closed, Υ open, shared order) with its gap statistics
/// and the admissibility verdict for alphabet size `alphabet` and threshold
/// `cal_e`:
/// (i) `μ = Leb(Υ \ Γ) < ℰ` and (ii) `M·H(3μ) + 3μ·ln N < ℰ`.
/// Pairs with `3μ > 1` are non-admissible ((ii) is outside H's domain; the
/// admissible regime has μ small anyway).
#[derive(Clone, Debug)]
pub struct AdmissiblePair {
    pub gamma: DyadicSet,
    pub upsilon: DyadicSet,
    pub kappa: u32,
    pub mu: f64,
    pub leb_upsilon: f64,
    pub alphabet: usize,
    pub threshold: f64,
    pub admissible: bool,
}

/// `Γ ⊆ Υ` as point sets, Γ a closed dyadic set and Υ an open one of the same
/// order: every run `[a..b]` of Γ-cells needs Υ-cells `a-1..=b+1` so that the
/// run's endpoints are interior.
fn closed_within_open(gamma: &DyadicSet, upsilon: &DyadicSet) -> bool {
    let ups: std::collections::HashSet<i64> = upsilon.cells().iter().copied().collect();
    let cells = gamma.cells();
    let mut i = 0;
    while i < cells.len() {
        let start = cells[i];
        let mut end = start;
        while i + 1 < cells.len() && cells[i + 1] == end + 1 {
            i += 1;
            end += 1;
        }
        for p in (start - 1)..=(end + 1) {
            if !ups.contains(&p) {
                return false;
            }
        }
        i += 1;
    }
    true
}

pub fn is_admissible(
    gamma: &DyadicSet,
    upsilon: &DyadicSet,
    alphabet: usize,
    cal_e: f64,
) -> Result<AdmissiblePair> {
    if gamma.order() != upsilon.order() {
        return Err(Error::Domain("pair must share a dyadic order".into()));
    }
    if gamma.is_open() || !upsilon.is_open() {
        return Err(Error::Domain(
            "expected a closed inner set and an open outer set".into(),
        ));
    }
    if cal_e <= 0.0 {
        return Err(Error::Domain("threshold must be positive".into()));
    }
    if !closed_within_open(gamma, upsilon) {
        return Err(Error::Domain("inner set is not contained in outer".into()));
    }
    let mu = upsilon.lebesgue() - gamma.lebesgue();
    let m = upsilon.lebesgue();
    let admissible = mu < cal_e
        && 3.0 * mu <= 1.0
        && m * binary_entropy(3.0 * mu)? + 3.0 * mu * (alphabet as f64).ln() < cal_e;
    Ok(AdmissiblePair {
        gamma: gamma.clone(),
        upsilon: upsilon.clone(),
        kappa: gamma.order(),
        mu,
        leb_upsilon: m,
        alphabet,
        threshold: cal_e,
        admissible,
    })
}

/// One signature class of a cover: samples sharing `(C_κ, U_κ)`.
#[derive(Clone, Debug)]
pub struct CoverClass {
    pub pair: AdmissiblePair,
    /// Indices into the sample list.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CoverReport {
    pub kappa: u32,
    pub classes: Vec<CoverClass>,
    /// Fraction of samples lying in admissible classes.
    pub coverage: f64,
}

/// Group scaled-range samples by their `(C_κ, U_κ)` signature and report the
/// admissible classes together with the fraction of samples they carry.
///
/// Samples arriving as finite point sets are first read at their lattice
/// pitch: gaps up to twice the smallest positive gap are discretization
/// artifacts and are filled, so the inner approximation sees the closed set
/// the sample converges to rather than a finite set with empty interior.
pub fn lemma4_cover(
    samples: &[HyperSet],
    kappa: u32,
    alphabet: usize,
    cal_e: f64,
) -> Result<CoverReport> {
    if samples.is_empty() {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut groups: BTreeMap<(Vec<i64>, Vec<i64>), Vec<usize>> = BTreeMap::new();
    for (idx, s) in samples.iter().enumerate() {
        let filled = match s.min_positive_gap() {
            Some(g) => s.fill_gaps(2.0 * g),
            None => s.clone(),
        };
        let gamma = dyadic_inner(&filled, kappa);
        let upsilon = dyadic_outer(&filled, kappa);
        groups
            .entry((gamma.cells().to_vec(), upsilon.cells().to_vec()))
            .or_default()
            .push(idx);
    }
    let mut classes = Vec::with_capacity(groups.len());
    let mut covered = 0usize;
    for ((g, u), members) in groups {
        let pair = is_admissible(
            &DyadicSet::closed(kappa, g),
            &DyadicSet::open(kappa, u),
            alphabet,
            cal_e,
        )?;
        if pair.admissible {
            covered += members.len();
        }
        classes.push(CoverClass { pair, members });
    }
    Ok(CoverReport {
        kappa,
        classes,
        coverage: covered as f64 / samples.len() as f64,
    })
}
