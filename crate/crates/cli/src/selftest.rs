//! Fast oracle suite over small grids, run by `qwalk selftest`.
//!
//! Everything here rechecks an exact or hand-computable fact in a few
//! milliseconds: unit norms, stationarity, the shift involution, agreement
//! with the dense operator, momentum eigen-relations, the small-grid Green
//! sums, sampler marginals, and neighborhood-check soundness.

use num_complex::Complex64;
use qwalk_core::analytic::{cosine_harmonic_sum, eval_f, eval_f_prime, FTable};
use qwalk_core::search::{classical_postprocess, MeasurementSampler};
use qwalk_core::spectral::{
    self, dense_step_operator_marked, eigen_relation_residual, eigenphase_multiset_gap,
    final_state_coefficients, predict_final_state, PhaseSign,
};
use qwalk_core::walk::{apply_shift, evolve, Walk};
use qwalk_core::{Direction, GridGeometry, MarkedSet, Site, WalkState};

type Check = (&'static str, fn() -> Result<(), String>);

fn uniform_norm() -> Result<(), String> {
    for n in [2usize, 6, 16] {
        let geom = GridGeometry::new(n).map_err(|e| e.to_string())?;
        let err = (WalkState::uniform(geom).norm_sq() - 1.0).abs();
        if err > 1e-12 {
            return Err(format!("n={n}: norm error {err:e}"));
        }
    }
    Ok(())
}

fn stationarity() -> Result<(), String> {
    let geom = GridGeometry::new(8).unwrap();
    let psi0 = WalkState::uniform(geom);
    let out = evolve(&psi0, &MarkedSet::empty(), 200).map_err(|e| e.to_string())?;
    let dev = out.max_abs_diff(&psi0);
    if dev > 1e-9 {
        return Err(format!("deviation {dev:e} after 200 steps"));
    }
    Ok(())
}

fn shift_involution() -> Result<(), String> {
    let geom = GridGeometry::new(6).unwrap();
    let mut state = WalkState::basis(geom, Site::new(2, 4), Direction::Left);
    state.set_amplitude(Site::new(0, 0), Direction::Up, Complex64::new(0.5, -0.25));
    let original = state.clone();
    apply_shift(&mut state);
    apply_shift(&mut state);
    if state != original {
        return Err("double shift is not the identity".into());
    }
    Ok(())
}

fn dense_equivalence() -> Result<(), String> {
    let geom = GridGeometry::new(2).unwrap();
    let marked = MarkedSet::single(&geom, Site::new(1, 0)).unwrap();
    let dense = dense_step_operator_marked(geom, &marked).map_err(|e| e.to_string())?;
    for seed in 0..5u64 {
        let mut rng = qwalk_core::search::trial_rng(1234, seed);
        let state = random_unit_state(geom, &mut rng);
        let a = spectral::apply_dense(&dense, &state);
        let b = evolve(&state, &marked, 1).map_err(|e| e.to_string())?;
        let gap = a.max_abs_diff(&b);
        if gap > 1e-12 {
            return Err(format!("seed {seed}: gap {gap:e}"));
        }
    }
    Ok(())
}

fn random_unit_state(geom: GridGeometry, rng: &mut impl rand::Rng) -> WalkState {
    let amps: Vec<Complex64> = (0..geom.num_basis_states())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    WalkState::from_amplitudes(geom, amps.into_iter().map(|a| a / norm).collect())
}

fn eigen_relations() -> Result<(), String> {
    let geom = GridGeometry::new(4).unwrap();
    for k in 0..4 {
        for l in 0..4 {
            if (k, l) == (0, 0) || spectral::is_degenerate(geom, k, l) {
                continue;
            }
            for sign in [PhaseSign::Plus, PhaseSign::Minus] {
                let r = eigen_relation_residual(geom, k, l, sign).map_err(|e| e.to_string())?;
                if r > 1e-10 {
                    return Err(format!("({k}, {l}): residual {r:e}"));
                }
            }
        }
    }
    Ok(())
}

fn eigenphase_multiset() -> Result<(), String> {
    let gap = eigenphase_multiset_gap(GridGeometry::new(4).unwrap()).map_err(|e| e.to_string())?;
    if gap > 1e-9 {
        return Err(format!("multiset gap {gap:e}"));
    }
    Ok(())
}

fn green_sums_smallest_grid() -> Result<(), String> {
    let geom = GridGeometry::new(2).unwrap();
    let f = eval_f(geom, 0, 0);
    if (f - 1.25).abs() > 1e-12 {
        return Err(format!("f(0,0) = {f}, want 1.25"));
    }
    let fp = eval_f_prime(geom, 0, 0);
    if (fp - 2.5).abs() > 1e-12 {
        return Err(format!("f'(0,0) = {fp}, want 2.5"));
    }
    Ok(())
}

fn harmonic_bracket() -> Result<(), String> {
    for n in [4usize, 16, 64, 256, 1024] {
        let s = cosine_harmonic_sum(n);
        let ln_n = (n as f64).ln();
        if s > ln_n + 1.0 || s < ln_n - std::f64::consts::TAU {
            return Err(format!("n={n}: sum {s} outside [ln n - 2π, ln n + 1]"));
        }
    }
    Ok(())
}

fn coefficient_sum() -> Result<(), String> {
    let (a, b) = final_state_coefficients(1.0, 0.01).map_err(|e| e.to_string())?;
    let gap = (a + b - Complex64::new(2.0, 0.0)).norm();
    if gap > 1e-13 {
        return Err(format!("a + b deviates from 2 by {gap:e}"));
    }
    Ok(())
}

fn sampler_marginals() -> Result<(), String> {
    let geom = GridGeometry::new(2).unwrap();
    let state = WalkState::uniform(geom);
    let sampler = MeasurementSampler::new(&state);
    let mut rng = qwalk_core::search::trial_rng(99, 0);
    let trials = 20_000;
    let mut counts = [0usize; 4];
    for _ in 0..trials {
        let (site, _) = sampler.sample(&mut rng);
        counts[site.y * 2 + site.x] += 1;
    }
    let expected = trials as f64 / 4.0;
    let sigma = (trials as f64 * 0.25 * 0.75).sqrt();
    for (i, c) in counts.iter().enumerate() {
        if (*c as f64 - expected).abs() > 4.0 * sigma {
            return Err(format!("site {i}: count {c} vs {expected}"));
        }
    }
    Ok(())
}

fn postprocess_soundness() -> Result<(), String> {
    let geom = GridGeometry::new(8).unwrap();
    let marked = MarkedSet::new(&geom, [Site::new(1, 1), Site::new(6, 2)]).unwrap();
    for outcome in geom.sites() {
        for radius in [0usize, 1, 3] {
            let (found, checked) = classical_postprocess(geom, outcome, &marked, radius);
            let truth = marked.min_l1_distance(&geom, outcome).unwrap() <= radius;
            if found != truth {
                return Err(format!("outcome {outcome}, radius {radius}"));
            }
            if checked > 2 * radius * radius + 2 * radius + 1 {
                return Err(format!("{checked} sites at radius {radius}"));
            }
        }
    }
    Ok(())
}

fn prediction_identity() -> Result<(), String> {
    let geom = GridGeometry::new(8).unwrap();
    let pred = predict_final_state(geom, Site::new(0, 0)).map_err(|e| e.to_string())?;
    let table = FTable::compute(geom);
    let sites = geom.num_sites() as f64;
    let plane = pred.up_plane();
    let scale = plane.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
    for y in 0..8usize {
        for x in 0..8usize {
            if (x, y) == (0, 0) {
                continue;
            }
            let expected = (table.value(y as i64 - 1, x as i64) - table.value(y as i64, x as i64))
                / sites
                - 1.0 / (2.0 * sites);
            let got = plane[y * 8 + x].re;
            if (got - expected).abs() > 1e-9 * scale {
                return Err(format!("({x}, {y}): {got} vs {expected}"));
            }
        }
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("uniform-norm", uniform_norm),
    ("stationarity", stationarity),
    ("shift-involution", shift_involution),
    ("dense-equivalence", dense_equivalence),
    ("eigen-relations", eigen_relations),
    ("eigenphase-multiset", eigenphase_multiset),
    ("green-sums-smallest-grid", green_sums_smallest_grid),
    ("harmonic-bracket", harmonic_bracket),
    ("coefficient-sum", coefficient_sum),
    ("sampler-marginals", sampler_marginals),
    ("postprocess-soundness", postprocess_soundness),
    ("prediction-identity", prediction_identity),
];

/// Runs every check, printing one line each. Returns the failure count.
pub fn run() -> usize {
    // Exercise the walk engine once up front so an obviously broken build
    // fails loudly before the itemized checks.
    let geom = GridGeometry::new(4).unwrap();
    let marked = MarkedSet::single(&geom, Site::new(0, 0)).unwrap();
    let mut walk = Walk::new(geom, marked).unwrap();
    let mut state = WalkState::uniform(geom);
    walk.step(&mut state);

    let mut failures = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("ok   {name}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    failures
}
