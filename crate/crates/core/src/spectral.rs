//! Momentum-space eigen-analysis of the unmarked step operator, and the
//! closed-form reconstruction of the search's pre-measurement state.
//!
//! The unmarked operator commutes with torus translations, so it is
//! block-diagonal over momentum pairs (k, l). Every pair except (0, 0)
//! contributes one conjugate pair of eigenvalues e^{±iθ_{k,l}} with
//!
//! ```text
//! cos θ_{k,l} = ( cos(2πk/n) + cos(2πl/n) ) / 2,
//! ```
//!
//! carried by plane waves times fixed 4-component coin vectors v±_{k,l}
//! (coin order Down, Up, Right, Left); the remaining block eigenvalues are
//! ±1. The pair (n/2, n/2) has sin θ = 0, its coin vectors degenerate, and
//! its phase eigenvalues collapse into -1.
//!
//! [`predict_final_state`] assembles the approximate pre-measurement state:
//! the uniform-coin state at the marked site plus a cot(θ/2)-weighted
//! combination of the eigenvector pairs. Its squared norm grows like log N,
//! and its Up-plane equals a fixed affine image of the lattice Green-sum
//! differences computed in [`crate::analytic`] — see
//! [`FinalStatePrediction::up_plane`].
//!
//! Everything here is cross-checked against dense linear algebra on small
//! grids: [`dense_step_operator`] builds the explicit 4N×4N matrix and
//! [`dense_eigenphases`] extracts its spectrum with an eigensolver that knows
//! nothing about the block structure.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Direction, GridGeometry, MarkedSet, Site, WalkState};
use crate::walk::grover_coin;

/// Largest grid side the dense-matrix oracle accepts (the matrix has 16N²
/// entries).
pub const DENSE_MAX_SIDE: usize = 16;

fn check_momentum(geom: GridGeometry, k: usize, l: usize) -> Result<()> {
    if k >= geom.n() || l >= geom.n() {
        return Err(Error::MomentumOutOfRange { k, l, n: geom.n() });
    }
    if k == 0 && l == 0 {
        return Err(Error::ZeroMomentumPair);
    }
    Ok(())
}

/// True when sin θ_{k,l} = 0, which on an even grid happens exactly at
/// (n/2, n/2).
pub fn is_degenerate(geom: GridGeometry, k: usize, l: usize) -> bool {
    k == geom.n() / 2 && l == geom.n() / 2
}

/// Eigenphase θ_{k,l} ∈ (0, π].
pub fn theta(geom: GridGeometry, k: usize, l: usize) -> Result<f64> {
    check_momentum(geom, k, l)?;
    let n = geom.n() as f64;
    let c = 0.5
        * ((std::f64::consts::TAU * k as f64 / n).cos()
            + (std::f64::consts::TAU * l as f64 / n).cos());
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Complex n-th roots of unity, w^m for m in 0..n.
fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|m| Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / n as f64))
        .collect()
}

/// Sign selecting one of the two phase eigenvectors of a momentum pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseSign {
    Plus,
    Minus,
}

/// A momentum pair (k, l): its phase, degeneracy flag, and unit coin vectors.
#[derive(Clone, Debug)]
pub struct SpectralPair {
    pub k: usize,
    pub l: usize,
    pub theta: f64,
    pub degenerate: bool,
    coin: Option<([Complex64; 4], [Complex64; 4])>,
}

impl SpectralPair {
    pub fn new(geom: GridGeometry, k: usize, l: usize) -> Result<Self> {
        check_momentum(geom, k, l)?;
        let theta = theta(geom, k, l)?;
        let degenerate = is_degenerate(geom, k, l);
        let coin = if degenerate {
            None
        } else {
            let roots = unit_roots(geom.n());
            Some(coin_vectors(geom, &roots, k, l, theta))
        };
        Ok(Self {
            k,
            l,
            theta,
            degenerate,
            coin,
        })
    }

    /// Coin vector of the e^{+iθ} eigenvector, order (Down, Up, Right, Left).
    pub fn coin_plus(&self) -> Result<&[Complex64; 4]> {
        self.coin
            .as_ref()
            .map(|(p, _)| p)
            .ok_or(Error::DegenerateMomentumPair {
                k: self.k,
                l: self.l,
            })
    }

    /// Coin vector of the e^{-iθ} eigenvector.
    pub fn coin_minus(&self) -> Result<&[Complex64; 4]> {
        self.coin
            .as_ref()
            .map(|(_, m)| m)
            .ok_or(Error::DegenerateMomentumPair {
                k: self.k,
                l: self.l,
            })
    }
}

/// The v± coin vectors. The sign of v- is fixed so that (v+ + v-)/√2 is the
/// uniform coin vector (1/2, 1/2, 1/2, 1/2).
fn coin_vectors(
    geom: GridGeometry,
    roots: &[Complex64],
    k: usize,
    l: usize,
    theta: f64,
) -> ([Complex64; 4], [Complex64; 4]) {
    let n = geom.n();
    // Coin order (Down, Up, Right, Left) pairs with (w^k, w^-k, w^l, w^-l).
    let phases = [
        roots[k % n],
        roots[(n - k % n) % n],
        roots[l % n],
        roots[(n - l % n) % n],
    ];
    let scale = Complex64::new(0.0, 1.0 / (2.0 * std::f64::consts::SQRT_2 * theta.sin()));
    let e_minus = Complex64::from_polar(1.0, -theta);
    let e_plus = Complex64::from_polar(1.0, theta);
    let plus = phases.map(|p| scale * (e_minus - p));
    let minus = phases.map(|p| scale * (p - e_plus));
    (plus, minus)
}

/// The full 4N-component eigenvector Φ±_{k,l}: a plane wave over the sites
/// times the coin vector. The row register carries k and the column register
/// carries l, matching the axes the Up/Down and Right/Left coin components
/// move along.
pub fn eigenvector(geom: GridGeometry, k: usize, l: usize, sign: PhaseSign) -> Result<WalkState> {
    let pair = SpectralPair::new(geom, k, l)?;
    let coin = match sign {
        PhaseSign::Plus => *pair.coin_plus()?,
        PhaseSign::Minus => *pair.coin_minus()?,
    };
    Ok(plane_wave_with_coin(geom, k, l, &coin))
}

/// Builds the state with amplitude w^{ky + lx} · coin_d / √N at (x, y, d).
fn plane_wave_with_coin(
    geom: GridGeometry,
    k: usize,
    l: usize,
    coin: &[Complex64; 4],
) -> WalkState {
    let n = geom.n();
    let roots = unit_roots(n);
    let inv_sqrt_sites = 1.0 / (geom.num_sites() as f64).sqrt();
    let mut state = WalkState::zero(geom);
    for d in Direction::ALL {
        let c = coin[d.index()] * inv_sqrt_sites;
        for y in 0..n {
            for x in 0..n {
                let phase = roots[(k * y + l * x) % n];
                state.set_amplitude(Site::new(x, y), d, phase * c);
            }
        }
    }
    state
}

/// The plane wave times the uniform coin vector — what (Φ+ + Φ-)/√2 must
/// reconstruct for every nondegenerate pair.
pub fn plane_wave_uniform_coin(geom: GridGeometry, k: usize, l: usize) -> WalkState {
    let half = Complex64::new(0.5, 0.0);
    plane_wave_with_coin(geom, k, l, &[half, half, half, half])
}

/// Coefficients of Φ±_{k,l} in the pre-asymptotic closed form of the final
/// state, for a perturbation angle `alpha`:
///
/// ```text
/// a = 1 + (i/2)·cot((α+θ)/2) + (i/2)·cot((-α+θ)/2)
/// b = 1 + (i/2)·cot((α-θ)/2) + (i/2)·cot((-α-θ)/2)
/// ```
///
/// For real inputs b = conj(a) = a with θ negated, and a + b = 2 exactly.
/// As α → 0 they reduce to 1 ± i·cot(θ/2). Arguments within 1e-12 of a
/// cotangent pole are rejected.
pub fn final_state_coefficients(theta: f64, alpha: f64) -> Result<(Complex64, Complex64)> {
    let half_i = Complex64::new(0.0, 0.5);
    let a = Complex64::ONE
        + half_i * cot_checked((alpha + theta) / 2.0)?
        + half_i * cot_checked((-alpha + theta) / 2.0)?;
    let b = Complex64::ONE
        + half_i * cot_checked((alpha - theta) / 2.0)?
        + half_i * cot_checked((-alpha - theta) / 2.0)?;
    Ok((a, b))
}

const COT_POLE_TOL: f64 = 1e-12;

fn cot_checked(x: f64) -> Result<f64> {
    let s = x.sin();
    if s.abs() < COT_POLE_TOL {
        return Err(Error::CotangentPole {
            arg: x,
            tol: COT_POLE_TOL,
        });
    }
    Ok(x.cos() / s)
}

/// The assembled, unnormalized prediction of the state right before
/// measurement. Its norm is Θ(√log N).
#[derive(Clone, Debug)]
pub struct FinalStatePrediction {
    geom: GridGeometry,
    marked: Site,
    amps: Vec<Complex64>,
    norm: f64,
}

impl FinalStatePrediction {
    pub fn geometry(&self) -> GridGeometry {
        self.geom
    }

    pub fn marked_site(&self) -> Site {
        self.marked
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn amplitude(&self, site: Site, d: Direction) -> Complex64 {
        self.amps[self.geom.basis_index(site, d)]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// The n×n Up-direction plane, row-major.
    ///
    /// With the marked site at the origin, the amplitude at (x, y) ≠ (0, 0)
    /// equals (f(y-1, x) - f(y, x))/N - 1/(2N), where f is
    /// [`crate::analytic::eval_f`]: the Green-sum difference along y plus
    /// the constant left by excluding the zero-momentum term.
    pub fn up_plane(&self) -> &[Complex64] {
        let num_sites = self.geom.num_sites();
        let d = Direction::Up.index();
        &self.amps[d * num_sites..(d + 1) * num_sites]
    }

    /// Largest |imaginary part| over all amplitudes. The assembled state is
    /// real up to rounding; this reports the residue.
    pub fn max_imag(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    /// Unit-norm copy as a plain state.
    pub fn normalized(&self) -> WalkState {
        let inv = 1.0 / self.norm;
        WalkState::from_amplitudes(self.geom, self.amps.iter().map(|a| a * inv).collect())
    }
}

/// Assembles the prediction for a single marked site: the uniform-coin state
/// there, plus Σ over nondegenerate pairs of (1/√(2N))·i·cot(θ/2)·(Φ+ - Φ-).
/// The degenerate pair's coefficient has a removable zero, so skipping it
/// is exact.
pub fn predict_final_state(geom: GridGeometry, marked: Site) -> Result<FinalStatePrediction> {
    if !geom.contains(marked) {
        return Err(Error::SiteOutOfRange {
            x: marked.x,
            y: marked.y,
            n: geom.n(),
        });
    }
    let n = geom.n();
    let num_sites = geom.num_sites();
    let roots = unit_roots(n);
    let inv_sqrt_2n = 1.0 / (2.0 * num_sites as f64).sqrt();

    // Coefficient tables per direction: E_d(k, l) = (1/√(2N))·i·cot(θ/2)
    // times the coin difference, zero at (0, 0) and at the degenerate pair.
    let mut coeff = vec![vec![Complex64::ZERO; num_sites]; 4];
    for k in 0..n {
        for l in 0..n {
            if (k == 0 && l == 0) || is_degenerate(geom, k, l) {
                continue;
            }
            let th = theta(geom, k, l)?;
            let pair_scale = Complex64::new(0.0, inv_sqrt_2n * (th / 2.0).cos() / (th / 2.0).sin());
            let (plus, minus) = coin_vectors(geom, &roots, k, l, th);
            for d in 0..4 {
                coeff[d][k * n + l] = pair_scale * (plus[d] - minus[d]);
            }
        }
    }

    // ψ'(x, y, d) = ψ_good + (1/√N)·Σ_k w^{ky} Σ_l w^{lx} E_d(k, l),
    // evaluated as two O(n³) passes with exact root-of-unity lookups.
    let inv_sqrt_sites = 1.0 / (num_sites as f64).sqrt();
    let mut amps = vec![Complex64::ZERO; geom.num_basis_states()];
    for d in 0..4 {
        let table = &coeff[d];
        // Stage 1: G(k, x) = Σ_l w^{lx} E_d(k, l).
        let mut stage: Vec<Complex64> = vec![Complex64::ZERO; num_sites];
        stage.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
            for l in 0..n {
                let e = table[k * n + l];
                if e == Complex64::ZERO {
                    continue;
                }
                for (x, out) in row.iter_mut().enumerate() {
                    *out += roots[(l * x) % n] * e;
                }
            }
        });
        // Stage 2: plane(x, y) = (1/√N)·Σ_k w^{ky} G(k, x).
        let plane = &mut amps[d * num_sites..(d + 1) * num_sites];
        plane.par_chunks_mut(n).enumerate().for_each(|(y, row)| {
            for k in 0..n {
                let phase = roots[(k * y) % n];
                let src = &stage[k * n..(k + 1) * n];
                for (x, out) in row.iter_mut().enumerate() {
                    *out += phase * src[x];
                }
            }
            for out in row.iter_mut() {
                *out *= inv_sqrt_sites;
            }
        });
    }

    // ψ_good: uniform coin at the origin.
    for d in 0..4 {
        amps[d * num_sites] += Complex64::new(0.5, 0.0);
    }

    // Translate the origin-centered assembly to the marked site.
    let amps = if marked == Site::new(0, 0) {
        amps
    } else {
        let mut shifted = vec![Complex64::ZERO; geom.num_basis_states()];
        for d in 0..4 {
            for y in 0..n {
                for x in 0..n {
                    let src = d * num_sites + y * n + x;
                    let dst = d * num_sites + ((y + marked.y) % n) * n + (x + marked.x) % n;
                    shifted[dst] = amps[src];
                }
            }
        }
        shifted
    };

    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(FinalStatePrediction {
        geom,
        marked,
        amps,
        norm,
    })
}

/// Explicit 4N×4N matrix of one unmarked walk step, for small grids.
pub fn dense_step_operator(geom: GridGeometry) -> Result<DMatrix<Complex64>> {
    dense_step_operator_marked(geom, &MarkedSet::empty())
}

/// Explicit matrix of one perturbed walk step (coin -I at marked sites).
pub fn dense_step_operator_marked(
    geom: GridGeometry,
    marked: &MarkedSet,
) -> Result<DMatrix<Complex64>> {
    Ok(dense_real(geom, marked)?.map(|v| Complex64::new(v, 0.0)))
}

/// The step matrix is real: the coin has entries ±1/2 (or -1) and the shift
/// is a permutation.
fn dense_real(geom: GridGeometry, marked: &MarkedSet) -> Result<DMatrix<f64>> {
    if geom.n() > DENSE_MAX_SIDE {
        return Err(Error::DenseOperatorTooLarge {
            n: geom.n(),
            max: DENSE_MAX_SIDE,
        });
    }
    let dim = geom.num_basis_states();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for site in geom.sites() {
        let is_marked = marked.contains(site);
        for d_in in Direction::ALL {
            let col = geom.basis_index(site, d_in);
            // Column d_in of the site coin.
            let mut coin_col = [0.0f64; 4];
            if is_marked {
                coin_col[d_in.index()] = -1.0;
            } else {
                let mut v = [Complex64::ZERO; 4];
                v[d_in.index()] = Complex64::ONE;
                for (slot, out) in coin_col.iter_mut().zip(grover_coin(v)) {
                    *slot = out.re;
                }
            }
            // Shift each coin output to its destination with a flipped coin.
            for d_mid in Direction::ALL {
                let w = coin_col[d_mid.index()];
                if w == 0.0 {
                    continue;
                }
                let (dx, dy) = d_mid.displacement();
                let dest = geom.site(site.x as i64 + dx, site.y as i64 + dy);
                let row = geom.basis_index(dest, d_mid.opposite());
                m[(row, col)] += w;
            }
        }
    }
    Ok(m)
}

/// Applies a dense operator to a state.
pub fn apply_dense(m: &DMatrix<Complex64>, state: &WalkState) -> WalkState {
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    let out = m * v;
    WalkState::from_amplitudes(state.geometry(), out.iter().copied().collect())
}

/// All 4N eigenphase magnitudes |arg λ| of the unmarked dense operator,
/// sorted ascending.
///
/// The step matrix U is real orthogonal, hence normal: splitting it into the
/// symmetric part H = (U + Uᵀ)/2 and antisymmetric part A = (U - Uᵀ)/2,
/// every eigenvector v of H with eigenvalue c satisfies ‖Av‖ = √(1 - c²), so
/// |arg λ| = atan2(‖Av‖, c) — well-conditioned at every phase, including the
/// ±1 clusters. A symmetric eigensolve of H is used because general QR
/// iteration struggles with this operator's ±1 eigenvalues of multiplicity
/// N+2; the routes are cross-checked on small grids against
/// [`dense_eigenphases_general`]. Phase magnitudes sidestep the ±π branch
/// cut at eigenvalue -1; |λ| = 1 itself is covered by the unitarity checks.
pub fn dense_eigenphases(geom: GridGeometry) -> Result<Vec<f64>> {
    let m = dense_real(geom, &MarkedSet::empty())?;
    let sym = (&m + m.transpose()) * 0.5;
    let anti = (&m - m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let rotated = &anti * &eig.eigenvectors;
    let mut phases: Vec<f64> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &c)| rotated.column(i).norm().atan2(c))
        .collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(phases)
}

/// Eigenphase magnitudes via the general (non-symmetric) eigensolver.
/// Feasible on small grids only; exists to validate [`dense_eigenphases`].
pub fn dense_eigenphases_general(geom: GridGeometry) -> Result<Vec<f64>> {
    let m = dense_real(geom, &MarkedSet::empty())?;
    let mut phases: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|e| e.arg().abs())
        .collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(phases)
}

/// The analytically expected eigenphase magnitudes, sorted ascending: each
/// nondegenerate pair contributes θ twice (for e^{±iθ}), and every momentum
/// block also carries one +1 and one -1 eigenvalue — N+2 zeros and N+2 π's
/// in total once the (0, 0) and degenerate blocks are tallied.
pub fn expected_eigenphases(geom: GridGeometry) -> Vec<f64> {
    let n = geom.n();
    let num_sites = geom.num_sites();
    let mut phases = Vec::with_capacity(geom.num_basis_states());
    phases.extend(std::iter::repeat_n(0.0, num_sites + 2));
    phases.extend(std::iter::repeat_n(std::f64::consts::PI, num_sites + 2));
    for k in 0..n {
        for l in 0..n {
            if (k == 0 && l == 0) || is_degenerate(geom, k, l) {
                continue;
            }
            let th = theta(geom, k, l).expect("nondegenerate pair");
            phases.push(th);
            phases.push(th);
        }
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phases
}

/// Compares the dense spectrum against the expected one; returns the largest
/// absolute gap between the sorted multisets.
pub fn eigenphase_multiset_gap(geom: GridGeometry) -> Result<f64> {
    let dense = dense_eigenphases(geom)?;
    let expected = expected_eigenphases(geom);
    assert_eq!(dense.len(), expected.len());
    Ok(dense
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Residual of the eigen-relation for one pair and sign: applies a single
/// unmarked walk step to Φ± and compares against e^{±iθ}·Φ± (max-abs).
pub fn eigen_relation_residual(
    geom: GridGeometry,
    k: usize,
    l: usize,
    sign: PhaseSign,
) -> Result<f64> {
    let th = theta(geom, k, l)?;
    let phi = eigenvector(geom, k, l, sign)?;
    let stepped = crate::walk::evolve(&phi, &MarkedSet::empty(), 1)?;
    let phase = match sign {
        PhaseSign::Plus => Complex64::from_polar(1.0, th),
        PhaseSign::Minus => Complex64::from_polar(1.0, -th),
    };
    let expected =
        WalkState::from_amplitudes(geom, phi.amplitudes().iter().map(|a| a * phase).collect());
    Ok(stepped.max_abs_diff(&expected))
}

/// Summary of a full eigenpair verification sweep over one grid.
#[derive(Clone, Debug, Serialize)]
pub struct EigenVerificationReport {
    pub n: usize,
    /// Momentum pairs excluding (0, 0).
    pub pairs_total: usize,
    pub pairs_degenerate: usize,
    /// Largest eigen-relation residual over all nondegenerate pairs, both signs.
    pub max_eigen_residual: f64,
    /// Largest residual of (Φ+ + Φ-)/√2 against the uniform-coin plane wave.
    pub max_reconstruction_residual: f64,
    /// Largest deviation of ‖Φ±‖ from 1.
    pub max_norm_error: f64,
    pub min_theta: f64,
    pub max_theta: f64,
}

/// Checks every momentum pair of a grid: eigen-relation via the walk engine,
/// the (Φ+ + Φ-)/√2 reconstruction identity, and unit norms.
pub fn verify_eigenpairs(geom: GridGeometry) -> Result<EigenVerificationReport> {
    let n = geom.n();
    let mut report = EigenVerificationReport {
        n,
        pairs_total: 0,
        pairs_degenerate: 0,
        max_eigen_residual: 0.0,
        max_reconstruction_residual: 0.0,
        max_norm_error: 0.0,
        min_theta: f64::INFINITY,
        max_theta: 0.0,
    };
    for k in 0..n {
        for l in 0..n {
            if k == 0 && l == 0 {
                continue;
            }
            report.pairs_total += 1;
            if is_degenerate(geom, k, l) {
                report.pairs_degenerate += 1;
                continue;
            }
            let th = theta(geom, k, l)?;
            report.min_theta = report.min_theta.min(th);
            report.max_theta = report.max_theta.max(th);

            let plus = eigenvector(geom, k, l, PhaseSign::Plus)?;
            let minus = eigenvector(geom, k, l, PhaseSign::Minus)?;
            for phi in [&plus, &minus] {
                report.max_norm_error = report.max_norm_error.max((phi.norm() - 1.0).abs());
            }
            for sign in [PhaseSign::Plus, PhaseSign::Minus] {
                let r = eigen_relation_residual(geom, k, l, sign)?;
                report.max_eigen_residual = report.max_eigen_residual.max(r);
            }

            let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
            let combined = WalkState::from_amplitudes(
                geom,
                plus.amplitudes()
                    .iter()
                    .zip(minus.amplitudes())
                    .map(|(p, m)| (p + m) * inv_sqrt2)
                    .collect(),
            );
            let expected = plane_wave_uniform_coin(geom, k, l);
            report.max_reconstruction_residual = report
                .max_reconstruction_residual
                .max(combined.max_abs_diff(&expected));
        }
    }
    Ok(report)
}
