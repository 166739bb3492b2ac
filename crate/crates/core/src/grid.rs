//! Torus geometry, direction algebra, and the dense amplitude container.
//!
//! The walk lives on an n×n grid with periodic boundary conditions, N = n²
//! sites. A basis state |x, y, d⟩ carries a site and one of four coin
//! directions. Coordinates follow x = column, y = row: Up decrements y,
//! Down increments y, Left decrements x, Right increments x.
//!
//! Amplitudes are stored as four contiguous n×n planes, one per direction in
//! the fixed coin order (Down, Up, Right, Left), row-major within a plane.
//! The coin then acts across planes at a fixed in-plane offset and the shift
//! becomes a plane-wise cyclic translation.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maps `c` into `[0, n)` with torus wraparound, correct for negative `c`.
pub fn wrap(c: i64, n: usize) -> usize {
    debug_assert!(n >= 1);
    c.rem_euclid(n as i64) as usize
}

/// A lattice site, `x` = column and `y` = row, both in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Coin directions in storage order: Down, Up, Right, Left.
///
/// The discriminants double as plane indices into [`WalkState`]. The order is
/// fixed once here because the momentum-space coin vectors in
/// [`crate::spectral`] are written against it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(usize)]
pub enum Direction {
    Down = 0,
    Up = 1,
    Right = 2,
    Left = 3,
}

impl Direction {
    /// All directions in storage order.
    pub const ALL: [Direction; 4] = [
        Direction::Down,
        Direction::Up,
        Direction::Right,
        Direction::Left,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }

    /// Unit displacement (dx, dy) a walker moving in this direction takes.
    pub fn displacement(self) -> (i64, i64) {
        match self {
            Direction::Down => (0, 1),
            Direction::Up => (0, -1),
            Direction::Right => (1, 0),
            Direction::Left => (-1, 0),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Down => "down",
            Direction::Up => "up",
            Direction::Right => "right",
            Direction::Left => "left",
        };
        f.write_str(s)
    }
}

/// Side length and derived sizes of the torus.
///
/// `n` must be even and at least 2: the momentum-space analysis reindexes
/// frequencies over `[-n/2, n/2)`, which requires n/2 integral. Powers of two
/// are typical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridGeometry {
    n: usize,
    num_sites: usize,
}

impl GridGeometry {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGridSide(n));
        }
        Ok(Self {
            n,
            num_sites: n * n,
        })
    }

    /// Side length n.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sites N = n².
    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Dimension of the full state space, 4N.
    pub fn num_basis_states(&self) -> usize {
        4 * self.num_sites
    }

    pub fn wrap(&self, c: i64) -> usize {
        wrap(c, self.n)
    }

    /// Builds a site from unbounded coordinates, wrapping onto the torus.
    pub fn site(&self, x: i64, y: i64) -> Site {
        Site::new(self.wrap(x), self.wrap(y))
    }

    pub fn contains(&self, s: Site) -> bool {
        s.x < self.n && s.y < self.n
    }

    /// Wrapped distance along one axis: min(|a-b|, n-|a-b|).
    pub fn axis_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.n - d)
    }

    /// Torus L1 (Manhattan) distance.
    pub fn l1_distance(&self, a: Site, b: Site) -> usize {
        self.axis_distance(a.x, b.x) + self.axis_distance(a.y, b.y)
    }

    /// Torus L∞ (box) distance.
    pub fn linf_distance(&self, a: Site, b: Site) -> usize {
        self.axis_distance(a.x, b.x)
            .max(self.axis_distance(a.y, b.y))
    }

    /// Iterates all N sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let n = self.n;
        (0..n).flat_map(move |y| (0..n).map(move |x| Site::new(x, y)))
    }

    /// Flat index of |site, d⟩ in the four-plane layout.
    pub fn basis_index(&self, site: Site, d: Direction) -> usize {
        debug_assert!(self.contains(site));
        d.index() * self.num_sites + site.y * self.n + site.x
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn decode_basis_index(&self, idx: usize) -> (Site, Direction) {
        debug_assert!(idx < self.num_basis_states());
        let d = Direction::ALL[idx / self.num_sites];
        let rem = idx % self.num_sites;
        (Site::new(rem % self.n, rem / self.n), d)
    }
}

/// Sites where the coin is replaced by -I. Sorted, deduplicated, and
/// validated against the geometry at construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSet {
    sites: Vec<Site>,
}

impl MarkedSet {
    pub fn new(geom: &GridGeometry, sites: impl IntoIterator<Item = Site>) -> Result<Self> {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        for s in &sites {
            if !geom.contains(*s) {
                return Err(Error::SiteOutOfRange {
                    x: s.x,
                    y: s.y,
                    n: geom.n(),
                });
            }
        }
        sites.sort();
        sites.dedup();
        Ok(Self { sites })
    }

    pub fn single(geom: &GridGeometry, site: Site) -> Result<Self> {
        Self::new(geom, [site])
    }

    /// No marked sites: the walk is the unperturbed operator.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    /// Minimum torus L1 distance from `site` to any marked site.
    /// Returns `None` when the set is empty.
    pub fn min_l1_distance(&self, geom: &GridGeometry, site: Site) -> Option<usize> {
        self.sites.iter().map(|m| geom.l1_distance(*m, site)).min()
    }
}

/// Dense state vector of the walk: 4N complex amplitudes.
///
/// States produced by the constructors here are unit vectors; the walk step
/// preserves the norm and nothing renormalizes implicitly, so any norm drift
/// observed over a run is accumulated rounding error.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    geom: GridGeometry,
    amps: Vec<Complex64>,
}

impl WalkState {
    /// The uniform superposition over all sites and directions: every
    /// amplitude equals 1/(2√N).
    pub fn uniform(geom: GridGeometry) -> Self {
        let a = Complex64::new(0.5 / (geom.num_sites() as f64).sqrt(), 0.0);
        Self {
            geom,
            amps: vec![a; geom.num_basis_states()],
        }
    }

    /// All-zero amplitudes (not a valid quantum state by itself; a builder
    /// for states assembled amplitude by amplitude).
    pub fn zero(geom: GridGeometry) -> Self {
        Self {
            geom,
            amps: vec![Complex64::ZERO; geom.num_basis_states()],
        }
    }

    /// The computational basis state |site, d⟩.
    pub fn basis(geom: GridGeometry, site: Site, d: Direction) -> Self {
        let mut s = Self::zero(geom);
        s.amps[geom.basis_index(site, d)] = Complex64::ONE;
        s
    }

    /// Wraps a raw amplitude vector; the length must be 4N.
    pub fn from_amplitudes(geom: GridGeometry, amps: Vec<Complex64>) -> Self {
        assert_eq!(
            amps.len(),
            geom.num_basis_states(),
            "amplitude vector length must be 4N"
        );
        Self { geom, amps }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geom
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub(crate) fn take_amplitudes(&mut self) -> Vec<Complex64> {
        std::mem::take(&mut self.amps)
    }

    pub(crate) fn put_amplitudes(&mut self, amps: Vec<Complex64>) {
        debug_assert_eq!(amps.len(), self.geom.num_basis_states());
        self.amps = amps;
    }

    pub fn amplitude(&self, site: Site, d: Direction) -> Complex64 {
        self.amps[self.geom.basis_index(site, d)]
    }

    pub fn set_amplitude(&mut self, site: Site, d: Direction, a: Complex64) {
        let idx = self.geom.basis_index(site, d);
        self.amps[idx] = a;
    }

    /// The n×n amplitude plane of one direction, row-major.
    pub fn plane(&self, d: Direction) -> &[Complex64] {
        let n_sites = self.geom.num_sites();
        &self.amps[d.index() * n_sites..(d.index() + 1) * n_sites]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Inner product ⟨self|other⟩ = Σ conj(self)·other, summed in storage
    /// order so the result does not depend on worker threading.
    ///
    /// Panics if the two states have different geometries.
    pub fn overlap(&self, other: &WalkState) -> Complex64 {
        assert_eq!(
            self.geom, other.geom,
            "overlap requires states on the same grid"
        );
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability of measuring `site`, marginalized over the coin:
    /// Σ_d |α(site, d)|².
    pub fn site_probability(&self, site: Site) -> f64 {
        Direction::ALL
            .iter()
            .map(|d| self.amplitude(site, *d).norm_sqr())
            .sum()
    }

    /// Largest |difference| over all 4N amplitudes.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        assert_eq!(self.geom, other.geom);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
