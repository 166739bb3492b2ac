//! The full search pipeline: evolve from the uniform state, pick a stopping
//! time, measure, and classically check a neighborhood of the outcome.
//!
//! The walk runs for at most ⌈2·√(N·ln N)⌉ steps ([`scan_limit`]). The
//! default stopping rule replays the scan and stops where the probability at
//! the marked sites peaks; alternatives stop where |⟨ψ(t)|ψ(0)⟩| is smallest
//! or at a caller-fixed step count.
//!
//! What makes the pipeline work is that the final distribution is sharply
//! localized: the mean site probability at torus distance R from the marked
//! site falls off like 1/R², so the total probability within an
//! O(N^{1/4})-radius neighborhood stays constant as the grid grows even
//! though the probability of hitting the marked site itself decays like
//! 1/log N. Measuring and then enumerating the O(√N)-site neighborhood of
//! the outcome therefore locates the marked site with constant probability.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{Direction, GridGeometry, MarkedSet, Site, WalkState};
use crate::walk::{MarkedProbabilityTrace, OverlapTrace, Walk};

/// Scan limit T_max = ⌈2·√(N·ln N)⌉ for the stopping-time search.
pub fn scan_limit(geom: GridGeometry) -> usize {
    let sites = geom.num_sites() as f64;
    (2.0 * (sites * sites.ln()).sqrt()).ceil() as usize
}

/// How the stopping time t* is chosen within `[0, scan_limit]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    /// argmax over t of the probability at the marked sites (the default).
    MaxMarkedProbability,
    /// argmin over t of |⟨ψ(t)|ψ(0)⟩|.
    MinOverlap,
    /// A caller-fixed step count.
    FixedSteps(usize),
}

/// Which torus distance a neighborhood uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    L1,
    Linf,
}

impl DistanceMetric {
    pub fn distance(self, geom: GridGeometry, a: Site, b: Site) -> usize {
        match self {
            DistanceMetric::L1 => geom.l1_distance(a, b),
            DistanceMetric::Linf => geom.linf_distance(a, b),
        }
    }
}

/// Probabilities aggregated by torus-L1 distance from a center (or from the
/// nearest of several centers). Index R holds the ring at distance exactly R.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceProfile {
    pub total_prob: Vec<f64>,
    pub site_count: Vec<usize>,
    pub mean_prob: Vec<f64>,
}

impl DistanceProfile {
    /// Largest representable distance (n on an even torus); the vectors have
    /// this many entries plus one.
    pub fn max_radius(&self) -> usize {
        self.total_prob.len() - 1
    }

    /// Σ_R total_prob[R]; equals the state's total probability.
    pub fn total_probability(&self) -> f64 {
        self.total_prob.iter().sum()
    }

    /// Least-squares slope of ln(mean_prob) against ln(R) over
    /// `r_min ..= r_max`. Rings with no sites or no probability are skipped.
    pub fn log_log_slope(&self, r_min: usize, r_max: usize) -> f64 {
        let points: Vec<(f64, f64)> = (r_min..=r_max.min(self.max_radius()))
            .filter(|&r| self.site_count[r] > 0 && self.mean_prob[r] > 0.0)
            .map(|r| ((r as f64).ln(), self.mean_prob[r].ln()))
            .collect();
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, y) in points {
            num += (x - mx) * (y - my);
            den += (x - mx) * (x - mx);
        }
        num / den
    }
}

/// Aggregates site probabilities by exact torus-L1 distance from `center`,
/// classifying all N sites by brute force.
pub fn distance_profile(state: &WalkState, center: Site) -> DistanceProfile {
    let geom = state.geometry();
    profile_by(state, |site| geom.l1_distance(center, site))
}

/// Like [`distance_profile`], but with distance measured to the nearest
/// marked site.
pub fn distance_profile_to_nearest(
    state: &WalkState,
    marked: &MarkedSet,
) -> Result<DistanceProfile> {
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let geom = state.geometry();
    Ok(profile_by(state, |site| {
        marked.min_l1_distance(&geom, site).unwrap()
    }))
}

fn profile_by(state: &WalkState, distance_of: impl Fn(Site) -> usize) -> DistanceProfile {
    let geom = state.geometry();
    let max_radius = geom.n();
    let mut total_prob = vec![0.0f64; max_radius + 1];
    let mut site_count = vec![0usize; max_radius + 1];
    for site in geom.sites() {
        let r = distance_of(site);
        total_prob[r] += state.site_probability(site);
        site_count[r] += 1;
    }
    let mean_prob = total_prob
        .iter()
        .zip(&site_count)
        .map(|(p, c)| if *c > 0 { p / *c as f64 } else { 0.0 })
        .collect();
    DistanceProfile {
        total_prob,
        site_count,
        mean_prob,
    }
}

/// Total probability of the sites within `radius` of `center` in the given
/// torus metric.
pub fn neighborhood_probability(
    state: &WalkState,
    center: Site,
    radius: usize,
    metric: DistanceMetric,
) -> f64 {
    let geom = state.geometry();
    geom.sites()
        .filter(|site| metric.distance(geom, center, *site) <= radius)
        .map(|site| state.site_probability(site))
        .sum()
}

/// Total probability of the union of `radius`-balls around the marked sites.
pub fn neighborhood_probability_to_nearest(
    state: &WalkState,
    marked: &MarkedSet,
    radius: usize,
    metric: DistanceMetric,
) -> Result<f64> {
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let geom = state.geometry();
    Ok(geom
        .sites()
        .filter(|site| {
            marked
                .sites()
                .iter()
                .any(|m| metric.distance(geom, *m, *site) <= radius)
        })
        .map(|site| state.site_probability(site))
        .sum())
}

/// Result of one full search run.
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// The chosen stopping time.
    pub t_star: usize,
    /// The scan limit the stopping time was chosen from.
    pub t_max: usize,
    /// ψ(t*), recomputed from the start state.
    pub final_state: WalkState,
    /// |⟨ψ(t)|ψ(0)⟩| for t in 0..=t_max.
    pub overlap_trace: Vec<f64>,
    /// Probability at the marked sites for t in 0..=t_max.
    pub marked_probability_trace: Vec<f64>,
    /// Distance profile of ψ(t*) around the (nearest) marked site.
    pub profile: DistanceProfile,
}

impl SearchResult {
    /// Probability of measuring a marked site at t*.
    pub fn marked_probability(&self) -> f64 {
        self.profile.total_prob[0]
    }
}

/// Runs the search: evolves ψ(0) for [`scan_limit`] steps recording traces,
/// picks t* by the stopping rule, recomputes ψ(t*), and profiles it.
pub fn run_search(
    geom: GridGeometry,
    marked: &MarkedSet,
    rule: StoppingRule,
) -> Result<SearchResult> {
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let t_max = scan_limit(geom);
    if let StoppingRule::FixedSteps(t) = rule {
        if t > t_max {
            return Err(Error::StepLimitExceeded { t, t_max });
        }
    }

    let psi0 = WalkState::uniform(geom);
    let mut walk = Walk::new(geom, marked.clone())?;
    let mut state = psi0.clone();
    let mut overlap = OverlapTrace::new(&psi0);
    let mut marked_prob = MarkedProbabilityTrace::new(marked.clone(), &psi0);
    walk.run(&mut state, t_max, &mut [&mut overlap, &mut marked_prob]);
    let overlap_trace = overlap.into_values();
    let marked_probability_trace = marked_prob.into_values();

    let t_star = match rule {
        StoppingRule::MaxMarkedProbability => argbest(&marked_probability_trace[1..], f64::gt) + 1,
        StoppingRule::MinOverlap => argbest(&overlap_trace[1..], f64::lt) + 1,
        StoppingRule::FixedSteps(t) => t,
    };

    let mut final_state = psi0;
    walk.run(&mut final_state, t_star, &mut []);
    let profile = distance_profile_to_nearest(&final_state, marked)?;

    Ok(SearchResult {
        t_star,
        t_max,
        final_state,
        overlap_trace,
        marked_probability_trace,
        profile,
    })
}

/// Index of the first element that `better` prefers over all others.
fn argbest(values: &[f64], better: impl Fn(&f64, &f64) -> bool) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if better(v, &values[best]) {
            best = i;
        }
    }
    best
}

/// Samples basis states from |amplitude|². Building the sampler is O(4N);
/// each draw is a binary search over the cumulative distribution.
pub struct MeasurementSampler {
    geom: GridGeometry,
    cumulative: Vec<f64>,
}

impl MeasurementSampler {
    pub fn new(state: &WalkState) -> Self {
        let mut cumulative = Vec::with_capacity(state.amplitudes().len());
        let mut acc = 0.0;
        for a in state.amplitudes() {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        Self {
            geom: state.geometry(),
            cumulative,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> (Site, Direction) {
        let total = *self.cumulative.last().expect("nonempty state");
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        self.geom.decode_basis_index(idx)
    }
}

/// One measurement of the state in the computational basis, deterministic
/// for a fixed seed.
pub fn sample_measurement(state: &WalkState, seed: u64) -> (Site, Direction) {
    let sampler = MeasurementSampler::new(state);
    sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Independent per-trial generator derived by hashing (master_seed, trial).
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(trial_index.to_le_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Classically checks the torus-L1 ball of `radius` around a measurement
/// outcome. Returns whether a marked site lies inside and how many distinct
/// sites were enumerated — at most 2r² + 2r + 1, fewer when the ball wraps
/// onto itself.
pub fn classical_postprocess(
    geom: GridGeometry,
    outcome: Site,
    marked: &MarkedSet,
    radius: usize,
) -> (bool, usize) {
    let r = radius as i64;
    let mut seen = std::collections::HashSet::new();
    let mut found = false;
    for dx in -r..=r {
        let span = r - dx.abs();
        for dy in -span..=span {
            let site = geom.site(outcome.x as i64 + dx, outcome.y as i64 + dy);
            if seen.insert(site) && marked.contains(site) {
                found = true;
            }
        }
    }
    (found, seen.len())
}

/// How the neighborhood radius scales with the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRule {
    /// ⌈N^{1/4}⌉ in torus-L1 — the neighborhood whose probability stays
    /// constant as the grid grows.
    FourthRoot,
    /// ⌈N^ε⌉ in torus-L∞ — the box form of the same statement.
    EpsilonBox(f64),
    /// A torus-L1 ball sized like the step budget: radius ⌈(N·ln N)^{1/4}⌉,
    /// about 2·√(N·ln N) sites.
    StepBudget,
}

impl RadiusRule {
    pub fn radius(self, geom: GridGeometry) -> usize {
        let sites = geom.num_sites() as f64;
        match self {
            RadiusRule::FourthRoot => sites.powf(0.25).ceil() as usize,
            RadiusRule::EpsilonBox(eps) => sites.powf(eps).ceil() as usize,
            RadiusRule::StepBudget => (sites * sites.ln()).powf(0.25).ceil() as usize,
        }
    }

    pub fn metric(self) -> DistanceMetric {
        match self {
            RadiusRule::EpsilonBox(_) => DistanceMetric::Linf,
            _ => DistanceMetric::L1,
        }
    }
}

/// One row of a scaling sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub t_star: usize,
    /// Probability at the marked site at t*.
    pub pr0: f64,
    /// Neighborhood radius used for this row.
    pub radius: usize,
    /// Probability within the neighborhood at t*.
    pub neighborhood_prob: f64,
    /// pr0 · ln N — constant across sizes when pr0 = Θ(1/log N).
    pub pr0_ln_n: f64,
    /// Fraction of sampled measurements whose classical check found the
    /// marked site; `None` when no trials were requested.
    pub success_rate: Option<f64>,
}

/// Runs the full pipeline once per grid size with the marked site at the
/// origin. With `trials > 0`, follows each of `trials` sampled measurements
/// with the classical neighborhood check; trials are independent and use
/// per-trial generators seeded from `master_seed`.
pub fn scaling_sweep(
    sizes: &[usize],
    rule: RadiusRule,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    sizes
        .iter()
        .map(|&n| {
            let geom = GridGeometry::new(n)?;
            let marked = MarkedSet::single(&geom, Site::new(0, 0))?;
            let result = run_search(geom, &marked, StoppingRule::MaxMarkedProbability)?;
            let radius = rule.radius(geom);
            let neighborhood_prob = neighborhood_probability(
                &result.final_state,
                Site::new(0, 0),
                radius,
                rule.metric(),
            );
            let success_rate = if trials > 0 {
                let sampler = MeasurementSampler::new(&result.final_state);
                let successes: usize = (0..trials as u64)
                    .into_par_iter()
                    .map(|trial| {
                        let mut rng = trial_rng(master_seed, trial);
                        let (outcome, _) = sampler.sample(&mut rng);
                        let (found, _) = classical_postprocess(geom, outcome, &marked, radius);
                        usize::from(found)
                    })
                    .sum();
                Some(successes as f64 / trials as f64)
            } else {
                None
            };
            let pr0 = result.marked_probability();
            Ok(SweepRow {
                n,
                t_star: result.t_star,
                pr0,
                radius,
                neighborhood_prob,
                pr0_ln_n: pr0 * (geom.num_sites() as f64).ln(),
                success_rate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scan_limit_examples() {
        // n = 2: ⌈2·√(4·ln 4)⌉ = ⌈4.709⌉ = 5.
        assert_eq!(scan_limit(GridGeometry::new(2).unwrap()), 5);
        let t16 = scan_limit(GridGeometry::new(16).unwrap());
        let t32 = scan_limit(GridGeometry::new(32).unwrap());
        assert!(t16 < t32);
        // Doubling n roughly doubles the limit (√(N log N) scaling).
        let ratio = t32 as f64 / t16 as f64;
        assert!((1.8..2.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn profile_of_the_uniform_state() {
        let geom = GridGeometry::new(8).unwrap();
        let state = WalkState::uniform(geom);
        let profile = distance_profile(&state, Site::new(0, 0));
        assert_eq!(profile.site_count[0], 1);
        for r in 1..4 {
            assert_eq!(profile.site_count[r], 4 * r);
            assert_abs_diff_eq!(
                profile.total_prob[r],
                4.0 * r as f64 / 64.0,
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(profile.total_probability(), 1.0, epsilon = 1e-9);
        assert_eq!(profile.site_count.iter().sum::<usize>(), 64);
    }

    #[test]
    fn profile_to_nearest_uses_minimum_distance() {
        let geom = GridGeometry::new(8).unwrap();
        let marked = MarkedSet::new(&geom, [Site::new(0, 0), Site::new(4, 4)]).unwrap();
        let state = WalkState::uniform(geom);
        let profile = distance_profile_to_nearest(&state, &marked).unwrap();
        assert_eq!(profile.site_count[0], 2);
        assert_abs_diff_eq!(profile.total_probability(), 1.0, epsilon = 1e-9);
        assert!(distance_profile_to_nearest(&state, &MarkedSet::empty()).is_err());
    }

    #[test]
    fn neighborhood_probability_edges() {
        let geom = GridGeometry::new(8).unwrap();
        let state = WalkState::uniform(geom);
        let center = Site::new(3, 3);
        // Radius covering the whole torus.
        assert_abs_diff_eq!(
            neighborhood_probability(&state, center, 8, DistanceMetric::L1),
            1.0,
            epsilon = 1e-9
        );
        // Radius zero is the site marginal.
        assert_abs_diff_eq!(
            neighborhood_probability(&state, center, 0, DistanceMetric::L1),
            state.site_probability(center),
            epsilon = 1e-12
        );
        // L∞ ball of radius r has (2r+1)² sites.
        assert_abs_diff_eq!(
            neighborhood_probability(&state, center, 1, DistanceMetric::Linf),
            9.0 / 64.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fixed_zero_steps_returns_the_start_state() {
        let geom = GridGeometry::new(16).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(0, 0)).unwrap();
        let result = run_search(geom, &marked, StoppingRule::FixedSteps(0)).unwrap();
        assert_eq!(result.t_star, 0);
        assert!(result.final_state.max_abs_diff(&WalkState::uniform(geom)) < 1e-15);
        assert_abs_diff_eq!(result.marked_probability(), 1.0 / 256.0, epsilon = 1e-12);
    }

    #[test]
    fn search_rejects_bad_inputs() {
        let geom = GridGeometry::new(8).unwrap();
        assert!(matches!(
            run_search(
                geom,
                &MarkedSet::empty(),
                StoppingRule::MaxMarkedProbability
            ),
            Err(Error::EmptyMarkedSet)
        ));
        let marked = MarkedSet::single(&geom, Site::new(0, 0)).unwrap();
        let beyond = scan_limit(geom) + 1;
        assert!(matches!(
            run_search(geom, &marked, StoppingRule::FixedSteps(beyond)),
            Err(Error::StepLimitExceeded { .. })
        ));
    }

    #[test]
    fn search_amplifies_the_marked_site() {
        let geom = GridGeometry::new(16).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(5, 9)).unwrap();
        let result = run_search(geom, &marked, StoppingRule::MaxMarkedProbability).unwrap();
        let uniform_baseline = 1.0 / 256.0;
        assert!(
            result.marked_probability() > 10.0 * uniform_baseline,
            "Pr[0] = {}",
            result.marked_probability()
        );
        assert!(result.t_star >= 1 && result.t_star <= result.t_max);
        // The overlap dips well below its starting value of 1.
        let min_overlap = result
            .overlap_trace
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min_overlap < 0.5, "min overlap {min_overlap}");
        // Traces cover 0..=t_max.
        assert_eq!(result.overlap_trace.len(), result.t_max + 1);
        assert_eq!(result.marked_probability_trace.len(), result.t_max + 1);
    }

    #[test]
    fn min_overlap_rule_picks_the_trace_minimum() {
        let geom = GridGeometry::new(16).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(0, 0)).unwrap();
        let result = run_search(geom, &marked, StoppingRule::MinOverlap).unwrap();
        let t = result.t_star;
        for (i, v) in result.overlap_trace.iter().enumerate().skip(1) {
            assert!(result.overlap_trace[t] <= *v || i == t);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_respects_support() {
        let geom = GridGeometry::new(8).unwrap();
        let basis = WalkState::basis(geom, Site::new(3, 5), Direction::Left);
        for seed in 0..10 {
            let (site, d) = sample_measurement(&basis, seed);
            assert_eq!(site, Site::new(3, 5));
            assert_eq!(d, Direction::Left);
        }
        let state = WalkState::uniform(geom);
        assert_eq!(
            sample_measurement(&state, 123),
            sample_measurement(&state, 123)
        );
    }

    #[test]
    fn sampler_matches_uniform_marginals() {
        let geom = GridGeometry::new(4).unwrap();
        let state = WalkState::uniform(geom);
        let sampler = MeasurementSampler::new(&state);
        let trials = 100_000usize;
        let mut counts = [0usize; 16];
        let mut rng = trial_rng(7, 0);
        for _ in 0..trials {
            let (site, _) = sampler.sample(&mut rng);
            counts[site.y * 4 + site.x] += 1;
        }
        let p = 1.0 / 16.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        let expected = trials as f64 * p;
        for (i, c) in counts.iter().enumerate() {
            let dev = (*c as f64 - expected).abs();
            assert!(dev < 3.0 * sigma, "site {i}: count {c}, dev {dev}");
        }
    }

    #[test]
    fn postprocess_examples() {
        let geom = GridGeometry::new(16).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(8, 8)).unwrap();
        // Outcome on the marked site with radius 0.
        assert_eq!(
            classical_postprocess(geom, Site::new(8, 8), &marked, 0),
            (true, 1)
        );
        // Outcome at L1 distance 5, radius 4: not found, 2·4² + 2·4 + 1 sites.
        assert_eq!(
            classical_postprocess(geom, Site::new(8, 13), &marked, 4),
            (false, 41)
        );
        // Radius 5 reaches it.
        assert!(classical_postprocess(geom, Site::new(8, 13), &marked, 5).0);
        // A radius covering the torus enumerates every site exactly once.
        assert_eq!(
            classical_postprocess(geom, Site::new(0, 0), &marked, 16),
            (true, 256)
        );
    }

    #[test]
    fn postprocess_agrees_with_brute_force() {
        let geom = GridGeometry::new(12).unwrap();
        let marked = MarkedSet::new(&geom, [Site::new(2, 3), Site::new(10, 11)]).unwrap();
        for outcome in geom.sites() {
            for radius in [0usize, 1, 2, 5, 7] {
                let (found, checked) = classical_postprocess(geom, outcome, &marked, radius);
                let brute = marked.min_l1_distance(&geom, outcome).unwrap() <= radius;
                assert_eq!(found, brute, "outcome {outcome} radius {radius}");
                assert!(checked <= 2 * radius * radius + 2 * radius + 1);
                let ball = geom
                    .sites()
                    .filter(|s| geom.l1_distance(*s, outcome) <= radius)
                    .count();
                assert_eq!(checked, ball);
            }
        }
    }

    #[test]
    fn radius_rules() {
        let geom = GridGeometry::new(64).unwrap();
        assert_eq!(RadiusRule::FourthRoot.radius(geom), 8);
        assert_eq!(RadiusRule::FourthRoot.metric(), DistanceMetric::L1);
        assert_eq!(RadiusRule::EpsilonBox(0.5).radius(geom), 64);
        assert_eq!(RadiusRule::EpsilonBox(0.5).metric(), DistanceMetric::Linf);
        assert_eq!(RadiusRule::EpsilonBox(0.25).radius(geom), 8);
        assert!(RadiusRule::StepBudget.radius(geom) > 8);
        // n = 1024: ⌈N^{1/4}⌉ = 32 and the L1 ball bound is 2113 sites.
        let big = GridGeometry::new(1024).unwrap();
        let r = RadiusRule::FourthRoot.radius(big);
        assert_eq!(r, 32);
        assert_eq!(2 * r * r + 2 * r + 1, 2113);
    }

    #[test]
    fn trial_rngs_are_independent_streams() {
        let mut a = trial_rng(1, 0);
        let mut b = trial_rng(1, 0);
        let mut c = trial_rng(1, 1);
        let mut d = trial_rng(2, 0);
        let xa: f64 = a.random();
        assert_eq!(xa, b.random::<f64>());
        assert_ne!(xa, c.random::<f64>());
        assert_ne!(xa, d.random::<f64>());
    }

    #[test]
    fn sweep_produces_rows_and_optional_success() {
        let rows = scaling_sweep(&[8, 16], RadiusRule::FourthRoot, 8, 42).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.t_star >= 1);
            assert!(row.pr0 > 0.0);
            assert!(row.neighborhood_prob >= row.pr0);
            let rate = row.success_rate.unwrap();
            assert!((0.0..=1.0).contains(&rate));
        }
        let no_trials = scaling_sweep(&[8], RadiusRule::FourthRoot, 0, 42).unwrap();
        assert!(no_trials[0].success_rate.is_none());
    }
}
