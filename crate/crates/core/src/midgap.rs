//! Finite interface systems and their midgap states.
//!
//! A ring with two interfaces stands in for the semi-infinite junction: the
//! interface at `x = 0 | 1` has `φ₁` on both sides, the antipodal one has `φ₂`
//! on both sides. Each hosts one state at `λ = +i` and one at `λ = −i`.
//! The anomaly operator `Σ_z σ_y` has opposite signs at the two junctions, so
//! states at the `φ₁ | φ₁` junction carry `⟨Σ_z σ_y⟩ = −1` and those at the
//! `φ₂ | φ₂` junction `+1`.

use nalgebra::{DMatrix, DVector};

use crate::bloch::{gap_sizes, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::experiment::Stokes;
use crate::linalg::{sigma_y, unitary_eigen, Vec2, C64, I};
use crate::walk::{
    frame_matrix, lab_to_primed, step_matrix, unit_cell, CoinProfile, Lattice, ProfileDescriptor,
    Sublattice,
};

pub const MIN_RING: usize = 12;
pub const MAX_DENSE_DIM: usize = 4096;

/// Ring of `n` sites with interfaces at `1` and `1 + n/2`.
pub fn ring_with_interfaces(n: usize, phi1: f64, phi2: f64) -> Result<CoinProfile> {
    if n % 2 != 0 {
        return Err(Error::OddRing(n));
    }
    if n < MIN_RING {
        return Err(Error::LatticeTooSmall { min: MIN_RING, got: n });
    }
    let descriptor = ProfileDescriptor::Interface {
        phi1,
        phi2,
        interfaces: vec![1, 1 + n as i64 / 2],
    };
    CoinProfile::new(descriptor, Lattice::ring(n)?)
}

/// Eigen-decomposition of the one-step operator on a ring.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C64>,
    /// Lab-frame eigenvectors as columns, `site ⊗ coin` ordering.
    pub eigenvectors: DMatrix<C64>,
    pub profile: CoinProfile,
    pub unitarity_residual: f64,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn state(&self, j: usize) -> DVector<C64> {
        self.eigenvectors.column(j).into_owned()
    }

    /// Number of eigenvalues within `tol` of `+i` or `−i`.
    pub fn count_near_pm_i(&self, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|l| distance_to_pm_i(**l) < tol)
            .count()
    }
}

pub fn distance_to_pm_i(lambda: C64) -> f64 {
    (lambda - I).norm().min((lambda + I).norm())
}

pub fn full_spectrum(profile: &CoinProfile) -> Result<SpectrumResult> {
    let u = step_matrix(profile)?;
    let dim = u.nrows();
    if dim > MAX_DENSE_DIM {
        return Err(Error::TooLarge {
            max: MAX_DENSE_DIM,
            got: dim,
        });
    }
    let unitarity_residual = crate::linalg::unitarity_residual(&u);
    let eig = unitary_eigen(u)?;
    Ok(SpectrumResult {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        profile: profile.clone(),
        unitarity_residual,
    })
}

/// An eigenstate pinned at `λ ≈ ±i`.
#[derive(Debug, Clone)]
pub struct MidgapState {
    pub eigenvalue: C64,
    /// Lab-frame amplitudes, `site ⊗ coin` ordering, unit norm.
    pub amplitudes: DVector<C64>,
    /// Site of largest probability.
    pub center: i64,
    /// Amplitude decay length in sites, `|ψ| ∝ e^{−d/ξ}`.
    pub decay_length: f64,
    /// Coefficient of determination of the log-probability fit.
    pub fit_r_squared: f64,
    /// `⟨Σ_z σ_y⟩` in the primed frame.
    pub anomaly: f64,
}

/// Default midgap detection tolerance, `10⁻⁴` of the gap at `±i`.
pub fn default_tolerance(phi1: f64, phi2: f64) -> Result<f64> {
    Ok(1e-4 * gap_sizes(phi1, phi2, DEFAULT_RESOLUTION)?.at_pm_i)
}

pub fn find_midgap(spec: &SpectrumResult, tol: f64) -> Result<Vec<MidgapState>> {
    let profile = &spec.profile;
    if profile.is_topologically_trivial() {
        return Ok(Vec::new());
    }
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    if let Some((phi1, phi2)) = profile.descriptor().angles() {
        let gap = gap_sizes(phi1, phi2, DEFAULT_RESOLUTION)?.at_pm_i;
        if tol >= gap / 2.0 {
            return Err(Error::BadTolerance(tol));
        }
    }

    let t = frame_matrix(profile);
    let anomaly_op = anomaly_operator(profile);
    let u = step_matrix(profile)?;
    let mut states = Vec::new();

    for target in [I, -I] {
        let idx: Vec<usize> = (0..spec.len())
            .filter(|&j| (spec.eigenvalues[j] - target).norm() < tol)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let basis = spec.eigenvectors.select_columns(&idx);
        // resolve the degenerate subspace in the eigenbasis of Σ_z σ_y
        let primed = &t * &basis;
        let reduced = primed.adjoint() * &anomaly_op * &primed;
        let reduced = (&reduced + reduced.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(reduced);
        for (j, &value) in eig.eigenvalues.iter().enumerate() {
            let mut v = &basis * eig.eigenvectors.column(j);
            let norm = v.norm();
            v /= C64::new(norm, 0.0);
            let eigenvalue = (v.adjoint() * &u * &v)[(0, 0)];
            let (center, decay_length, fit_r_squared) = localization(&v, profile);
            states.push(MidgapState {
                eigenvalue,
                amplitudes: v,
                center,
                decay_length,
                fit_r_squared,
                anomaly: value,
            });
        }
    }
    states.sort_by(|a, b| {
        b.eigenvalue
            .im
            .total_cmp(&a.eigenvalue.im)
            .then(a.anomaly.total_cmp(&b.anomaly))
    });
    Ok(states)
}

/// `Σ_z σ_y` over the whole ring, `site ⊗ coin` ordering.
fn anomaly_operator(profile: &CoinProfile) -> DMatrix<C64> {
    let n = profile.lattice().len();
    let mut op = DMatrix::zeros(2 * n, 2 * n);
    for (i, x) in profile.lattice().sites().enumerate() {
        let block = sigma_y() * C64::new(Sublattice::of(x).sign(), 0.0);
        op.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&block);
    }
    op
}

fn primed_pairs(amps: &DVector<C64>, profile: &CoinProfile) -> Result<Vec<Vec2>> {
    let n = profile.lattice().len();
    if amps.len() != 2 * n {
        return Err(Error::LatticeMismatch);
    }
    Ok(profile
        .angles()
        .iter()
        .enumerate()
        .map(|(i, &phi)| lab_to_primed(phi) * Vec2::new(amps[2 * i], amps[2 * i + 1]))
        .collect())
}

/// Primed-frame symmetry expectations of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryExpectations {
    pub sigma_y: f64,
    pub sublattice: f64,
    pub anomaly: f64,
}

pub fn symmetry_expectations(
    amps: &DVector<C64>,
    profile: &CoinProfile,
) -> Result<SymmetryExpectations> {
    let norm = amps.norm_squared();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let pairs = primed_pairs(amps, profile)?;
    let mut out = SymmetryExpectations {
        sigma_y: 0.0,
        sublattice: 0.0,
        anomaly: 0.0,
    };
    for (pair, x) in pairs.iter().zip(profile.lattice().sites()) {
        let st = Stokes::of_pair(pair);
        let sign = Sublattice::of(x).sign();
        out.sigma_y += st.s3;
        out.sublattice += sign * st.s0;
        out.anomaly += sign * st.s3;
    }
    Ok(out)
}

/// `⟨Σ_z σ_y⟩` in the primed frame.
pub fn anomaly_expectation(amps: &DVector<C64>, profile: &CoinProfile) -> Result<f64> {
    Ok(symmetry_expectations(amps, profile)?.anomaly)
}

pub const MIN_SITE_PROBABILITY: f64 = 1e-10;

/// Primed-frame Stokes vector `(S₁, S₂, S₃)/S₀` at site `x`.
pub fn site_polarization(amps: &DVector<C64>, profile: &CoinProfile, x: i64) -> Result<[f64; 3]> {
    let pairs = primed_pairs(amps, profile)?;
    let i = profile
        .lattice()
        .index_of(x)
        .ok_or_else(|| Error::SiteOutOfRange {
            site: x,
            lattice: profile.lattice().to_string(),
        })?;
    let st = Stokes::of_pair(&pairs[i]);
    if st.s0 < MIN_SITE_PROBABILITY {
        return Err(Error::SiteUnoccupied(st.s0));
    }
    Ok(st.normalized())
}

impl MidgapState {
    pub fn site_probabilities(&self) -> Vec<f64> {
        site_probabilities(&self.amplitudes)
    }

    pub fn polarization(&self, profile: &CoinProfile, x: i64) -> Result<[f64; 3]> {
        site_polarization(&self.amplitudes, profile, x)
    }
}

fn site_probabilities(amps: &DVector<C64>) -> Vec<f64> {
    amps.as_slice()
        .chunks(2)
        .map(|c| c[0].norm_sqr() + c[1].norm_sqr())
        .collect()
}

// Relative probability floor that ends the decay range.
const DECAY_FLOOR: f64 = 1e-24;

/// Centre site, decay length and fit quality of a state on a ring.
///
/// Probabilities are summed per unit cell; within a cell they form a two-site
/// staircase that would otherwise spoil the exponential fit. Distances are
/// measured from the probability-weighted centre cell, the decay range runs
/// out to the relative floor (at most a quarter of the ring), and the fit uses
/// the inner half of that range.
fn localization(amps: &DVector<C64>, profile: &CoinProfile) -> (i64, f64, f64) {
    let lattice = profile.lattice();
    let probs = site_probabilities(amps);
    let (center_idx, _) = probs
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best });
    let center = lattice.site(center_idx);

    let cells = (lattice.len() / 2) as i64;
    let mut cell_prob = vec![0.0; cells as usize];
    for (i, &p) in probs.iter().enumerate() {
        cell_prob[unit_cell(lattice.site(i)).rem_euclid(cells) as usize] += p;
    }
    let circ = |d: f64| {
        let m = cells as f64;
        let r = d.rem_euclid(m);
        r.min(m - r)
    };

    let c0 = unit_cell(center).rem_euclid(cells);
    let (mut weight, mut moment) = (0.0, 0.0);
    for d in -2..=2 {
        let q = cell_prob[(c0 + d).rem_euclid(cells) as usize];
        weight += q;
        moment += q * d as f64;
    }
    let centre_cell = c0 as f64 + moment / weight;

    let peak = cell_prob.iter().copied().fold(0.0, f64::max);
    let reach = cells as f64 / 4.0;
    let mut points: Vec<(f64, f64)> = (0..cells)
        .filter_map(|c| {
            let d = circ(c as f64 - centre_cell);
            let q = cell_prob[c as usize];
            (d <= reach && q > peak * DECAY_FLOOR).then_some((d, q.ln()))
        })
        .collect();
    let range = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let inner: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.0 <= range / 2.0 + 1e-9)
        .collect();
    if inner.len() >= 3 {
        points = inner;
    }

    let (slope, r2) = linear_fit(&points);
    // ln Q drops by `slope` per cell, i.e. per two sites; |ψ|² ∝ e^{−2d/ξ}
    let decay_length = if slope < 0.0 { 4.0 / -slope } else { f64::INFINITY };
    (center, decay_length, r2)
}

/// Least-squares slope and coefficient of determination.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, r2)
}
