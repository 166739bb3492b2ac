//! One step of the perturbed coined walk, and multi-step evolution.
//!
//! A step applies the Grover diffusion coin
//!
//! ```text
//!         ( -1  1  1  1 )
//! D = 1/2 (  1 -1  1  1 )
//!         (  1  1 -1  1 )
//!         (  1  1  1 -1 )
//! ```
//!
//! at every unmarked site and -I at marked sites, then the flip-flop shift:
//! each amplitude moves one site along its direction and the direction
//! register flips to the opposite,
//!
//! ```text
//! |x, y, Up⟩    -> |x, y-1, Down⟩      |x, y, Left⟩  -> |x-1, y, Right⟩
//! |x, y, Down⟩  -> |x, y+1, Up⟩        |x, y, Right⟩ -> |x+1, y, Left⟩
//! ```
//!
//! with wraparound on both axes. With no marked sites the uniform state is
//! stationary; marked sites perturb the walk and probability accumulates
//! around them.
//!
//! The step is exactly linear: amplitudes are never renormalized, so norm
//! drift over a run measures accumulated rounding error and nothing else.
//! The coin is applied per site and the shift writes each output amplitude
//! exactly once, so results are bitwise identical for any worker count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridGeometry, MarkedSet, WalkState};

/// Applies the Grover diffusion coin to one site's amplitudes in storage
/// order (Down, Up, Right, Left): each output is s/2 - v_d with s = Σ_d v_d.
pub fn grover_coin(v: [Complex64; 4]) -> [Complex64; 4] {
    let half_sum = (v[0] + v[1] + v[2] + v[3]) * 0.5;
    [
        half_sum - v[0],
        half_sum - v[1],
        half_sum - v[2],
        half_sum - v[3],
    ]
}

/// Coin stage of one step: Grover coin at unmarked sites, -I at marked ones.
pub fn apply_coin(state: &mut WalkState, marked: &MarkedSet) {
    let geom = state.geometry();
    let n = geom.n();
    let num_sites = geom.num_sites();
    let amps = state.amplitudes_mut();

    // The marked coin is -I on the pre-coin amplitudes: save them, run the
    // branch-free Grover pass over everything, then overwrite.
    let saved: Vec<(usize, [Complex64; 4])> = marked
        .sites()
        .iter()
        .map(|s| {
            let base = s.y * n + s.x;
            (
                base,
                [
                    amps[base],
                    amps[num_sites + base],
                    amps[2 * num_sites + base],
                    amps[3 * num_sites + base],
                ],
            )
        })
        .collect();

    let (down, rest) = amps.split_at_mut(num_sites);
    let (up, rest) = rest.split_at_mut(num_sites);
    let (right, left) = rest.split_at_mut(num_sites);

    down.par_chunks_mut(n)
        .zip(up.par_chunks_mut(n))
        .zip(right.par_chunks_mut(n).zip(left.par_chunks_mut(n)))
        .for_each(|((d_row, u_row), (r_row, l_row))| {
            for i in 0..n {
                let half_sum = (d_row[i] + u_row[i] + r_row[i] + l_row[i]) * 0.5;
                d_row[i] = half_sum - d_row[i];
                u_row[i] = half_sum - u_row[i];
                r_row[i] = half_sum - r_row[i];
                l_row[i] = half_sum - l_row[i];
            }
        });

    for (base, v) in saved {
        amps[base] = -v[0];
        amps[num_sites + base] = -v[1];
        amps[2 * num_sites + base] = -v[2];
        amps[3 * num_sites + base] = -v[3];
    }
}

/// Shift stage of one step. An involution: applied twice it is the identity
/// permutation, since every move flips the direction to its opposite.
pub fn apply_shift(state: &mut WalkState) {
    let geom = state.geometry();
    let mut scratch = vec![Complex64::ZERO; geom.num_basis_states()];
    let amps = state.take_amplitudes();
    shift_into(&amps, &mut scratch, geom.n(), geom.num_sites());
    state.put_amplitudes(scratch);
}

/// Writes the shifted amplitudes of `amps` into `scratch`. Each output row is
/// a cyclic copy of one input row, parallelized over output rows.
fn shift_into(amps: &[Complex64], scratch: &mut [Complex64], n: usize, num_sites: usize) {
    scratch
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(row, out)| {
            let plane = row / n;
            let y = row % n;
            match plane {
                // Down plane: |x, y+1, Up⟩ -> |x, y, Down⟩
                0 => {
                    let src_y = if y + 1 == n { 0 } else { y + 1 };
                    let base = num_sites + src_y * n;
                    out.copy_from_slice(&amps[base..base + n]);
                }
                // Up plane: |x, y-1, Down⟩ -> |x, y, Up⟩
                1 => {
                    let src_y = if y == 0 { n - 1 } else { y - 1 };
                    let base = src_y * n;
                    out.copy_from_slice(&amps[base..base + n]);
                }
                // Right plane: |x+1, y, Left⟩ -> |x, y, Right⟩
                2 => {
                    let base = 3 * num_sites + y * n;
                    let src = &amps[base..base + n];
                    out[..n - 1].copy_from_slice(&src[1..]);
                    out[n - 1] = src[0];
                }
                // Left plane: |x-1, y, Right⟩ -> |x, y, Left⟩
                3 => {
                    let base = 2 * num_sites + y * n;
                    let src = &amps[base..base + n];
                    out[0] = src[n - 1];
                    out[1..].copy_from_slice(&src[..n - 1]);
                }
                _ => unreachable!(),
            }
        });
}

/// Observer callback invoked after each step of [`Walk::run`]. Observers see
/// the state read-only and must not assume any particular worker count.
pub trait StepObserver {
    fn observe(&mut self, t: usize, state: &WalkState);
}

/// Collects |⟨ψ(t)|ψ_ref⟩| per step. Index t of [`values`](Self::values)
/// holds the value after t steps; index 0 is recorded at construction.
pub struct OverlapTrace {
    reference: WalkState,
    values: Vec<f64>,
}

impl OverlapTrace {
    pub fn new(initial: &WalkState) -> Self {
        Self {
            reference: initial.clone(),
            values: vec![initial.overlap(initial).norm()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl StepObserver for OverlapTrace {
    fn observe(&mut self, _t: usize, state: &WalkState) {
        self.values.push(self.reference.overlap(state).norm());
    }
}

/// Collects the total probability at the marked sites per step, indexed like
/// [`OverlapTrace::values`].
pub struct MarkedProbabilityTrace {
    marked: MarkedSet,
    values: Vec<f64>,
}

impl MarkedProbabilityTrace {
    pub fn new(marked: MarkedSet, initial: &WalkState) -> Self {
        let p0 = Self::probability(&marked, initial);
        Self {
            marked,
            values: vec![p0],
        }
    }

    fn probability(marked: &MarkedSet, state: &WalkState) -> f64 {
        marked
            .sites()
            .iter()
            .map(|s| state.site_probability(*s))
            .sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl StepObserver for MarkedProbabilityTrace {
    fn observe(&mut self, _t: usize, state: &WalkState) {
        self.values.push(Self::probability(&self.marked, state));
    }
}

/// The walk operator bound to a geometry and a marked set. Owns the scratch
/// buffer for the shift permutation so stepping never allocates.
pub struct Walk {
    geom: GridGeometry,
    marked: MarkedSet,
    scratch: Vec<Complex64>,
}

impl Walk {
    pub fn new(geom: GridGeometry, marked: MarkedSet) -> Result<Self> {
        for s in marked.sites() {
            if !geom.contains(*s) {
                return Err(Error::SiteOutOfRange {
                    x: s.x,
                    y: s.y,
                    n: geom.n(),
                });
            }
        }
        Ok(Self {
            geom,
            marked,
            scratch: vec![Complex64::ZERO; geom.num_basis_states()],
        })
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geom
    }

    pub fn marked(&self) -> &MarkedSet {
        &self.marked
    }

    /// One full step: coin, then shift. Preserves the norm to rounding.
    pub fn step(&mut self, state: &mut WalkState) {
        assert_eq!(
            state.geometry(),
            self.geom,
            "state and walk geometry must agree"
        );
        apply_coin(state, &self.marked);
        let mut amps = state.take_amplitudes();
        shift_into(
            &amps,
            &mut self.scratch,
            self.geom.n(),
            self.geom.num_sites(),
        );
        std::mem::swap(&mut amps, &mut self.scratch);
        state.put_amplitudes(amps);
    }

    /// Advances `state` by `steps` steps, invoking every observer in order
    /// after each step.
    pub fn run(
        &mut self,
        state: &mut WalkState,
        steps: usize,
        observers: &mut [&mut dyn StepObserver],
    ) {
        for t in 1..=steps {
            self.step(state);
            for obs in observers.iter_mut() {
                obs.observe(t, state);
            }
        }
    }
}

/// Convenience: evolves a copy of `initial` by `steps` steps.
pub fn evolve(initial: &WalkState, marked: &MarkedSet, steps: usize) -> Result<WalkState> {
    let mut walk = Walk::new(initial.geometry(), marked.clone())?;
    let mut state = initial.clone();
    walk.run(&mut state, steps, &mut []);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Direction, Site};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_unit_state(geom: GridGeometry, seed: u64) -> WalkState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..geom.num_basis_states())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        WalkState::from_amplitudes(geom, amps.into_iter().map(|a| a / norm).collect())
    }

    #[test]
    fn grover_coin_examples() {
        let h = Complex64::new(0.5, 0.0);
        // Uniform coin vector is the +1 eigenvector.
        let out = grover_coin([h, h, h, h]);
        for o in out {
            assert_abs_diff_eq!(o.re, 0.5, epsilon = 1e-15);
        }
        // First column of the coin matrix.
        let out = grover_coin([
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ZERO,
        ]);
        assert_abs_diff_eq!(out[0].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[2].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[3].re, 0.5, epsilon = 1e-15);
        // Zero-sum vectors are negated.
        let out = grover_coin([h, -h, h, -h]);
        assert_abs_diff_eq!(out[0].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[2].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[3].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn grover_coin_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let v: [Complex64; 4] = std::array::from_fn(|_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let before: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            let after: f64 = grover_coin(v).iter().map(|a| a.norm_sqr()).sum();
            assert_abs_diff_eq!(before, after, epsilon = 1e-14);
        }
    }

    #[test]
    fn step_spreads_a_basis_state() {
        // |2, 3, Up⟩ on an 8-grid: the coin leaves (-1/2, 1/2, 1/2, 1/2) on
        // the (Up, Down, Right, Left) components at (2, 3) — the Up input is
        // negated — and the shift then moves and flips each component.
        let geom = GridGeometry::new(8).unwrap();
        let mut state = WalkState::basis(geom, Site::new(2, 3), Direction::Up);
        let mut walk = Walk::new(geom, MarkedSet::empty()).unwrap();
        walk.step(&mut state);

        let expect = [
            (Site::new(2, 2), Direction::Down, -0.5),
            (Site::new(2, 4), Direction::Up, 0.5),
            (Site::new(3, 3), Direction::Left, 0.5),
            (Site::new(1, 3), Direction::Right, 0.5),
        ];
        for (site, d, value) in expect {
            let a = state.amplitude(site, d);
            assert_abs_diff_eq!(a.re, value, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(state.norm_sq(), 1.0, epsilon = 1e-14);
        let nonzero = state.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn marked_coin_negates_in_place() {
        let geom = GridGeometry::new(8).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(1, 1)).unwrap();
        let mut state = WalkState::basis(geom, Site::new(1, 1), Direction::Up);
        let mut walk = Walk::new(geom, marked).unwrap();
        walk.step(&mut state);
        // -I keeps the Up component (negated), the shift sends it to (1, 0).
        let a = state.amplitude(Site::new(1, 0), Direction::Down);
        assert_abs_diff_eq!(a.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(state.norm_sq(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn uniform_state_is_stationary_without_marks() {
        let geom = GridGeometry::new(8).unwrap();
        let psi0 = WalkState::uniform(geom);
        let mut state = psi0.clone();
        let mut walk = Walk::new(geom, MarkedSet::empty()).unwrap();
        walk.step(&mut state);
        assert!(state.max_abs_diff(&psi0) < 1e-12);
        walk.run(&mut state, 49, &mut []);
        assert!(state.max_abs_diff(&psi0) < 1e-9);
    }

    #[test]
    fn shift_is_an_involution() {
        let geom = GridGeometry::new(6).unwrap();
        let original = random_unit_state(geom, 11);
        let mut state = original.clone();
        apply_shift(&mut state);
        assert!(state.max_abs_diff(&original) > 0.01);
        apply_shift(&mut state);
        // Pure permutation: bitwise identical after two applications.
        assert_eq!(state, original);
    }

    #[test]
    fn step_is_linear() {
        let geom = GridGeometry::new(8).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(4, 2)).unwrap();
        let psi = random_unit_state(geom, 3);
        let phi = random_unit_state(geom, 4);
        let a = Complex64::new(0.3, -0.8);
        let b = Complex64::new(-0.6, 0.2);

        let combined = WalkState::from_amplitudes(
            geom,
            psi.amplitudes()
                .iter()
                .zip(phi.amplitudes())
                .map(|(p, q)| a * p + b * q)
                .collect(),
        );
        let stepped_combined = evolve(&combined, &marked, 1).unwrap();
        let psi1 = evolve(&psi, &marked, 1).unwrap();
        let phi1 = evolve(&phi, &marked, 1).unwrap();
        let recombined = WalkState::from_amplitudes(
            geom,
            psi1.amplitudes()
                .iter()
                .zip(phi1.amplitudes())
                .map(|(p, q)| a * p + b * q)
                .collect(),
        );
        assert!(stepped_combined.max_abs_diff(&recombined) < 1e-12);
    }

    #[test]
    fn norm_is_preserved_over_many_steps() {
        let geom = GridGeometry::new(8).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(0, 0)).unwrap();
        let mut state = WalkState::uniform(geom);
        let mut walk = Walk::new(geom, marked).unwrap();
        for _ in 0..500 {
            walk.step(&mut state);
        }
        assert_abs_diff_eq!(state.norm_sq(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn run_invokes_observers_each_step() {
        let geom = GridGeometry::new(4).unwrap();
        let marked = MarkedSet::single(&geom, Site::new(0, 0)).unwrap();
        let psi0 = WalkState::uniform(geom);
        let mut state = psi0.clone();
        let mut overlap = OverlapTrace::new(&psi0);
        let mut prob = MarkedProbabilityTrace::new(marked.clone(), &psi0);
        let mut walk = Walk::new(geom, marked).unwrap();
        walk.run(&mut state, 10, &mut [&mut overlap, &mut prob]);
        assert_eq!(overlap.values().len(), 11);
        assert_eq!(prob.values().len(), 11);
        assert_abs_diff_eq!(overlap.values()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(prob.values()[0], 1.0 / 16.0, epsilon = 1e-12);
        // The perturbed walk moves away from the start state.
        assert!(overlap.values()[10] < 1.0 - 1e-3);
    }

    #[test]
    fn walk_rejects_out_of_range_marks() {
        let geom = GridGeometry::new(4).unwrap();
        let bigger = GridGeometry::new(8).unwrap();
        let marked = MarkedSet::single(&bigger, Site::new(6, 6)).unwrap();
        assert!(Walk::new(geom, marked).is_err());
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let geom = GridGeometry::new(4).unwrap();
        let psi = random_unit_state(geom, 9);
        let marked = MarkedSet::single(&geom, Site::new(1, 1)).unwrap();
        let out = evolve(&psi, &marked, 0).unwrap();
        assert_eq!(out, psi);
    }
}
