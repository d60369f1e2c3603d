//! Floquet-Bloch analysis of the periodic bulk: the 4×4 operator `u(k)`, its
//! bands, the chiral and supersymmetric constraints, the partner
//! factorization of `u²(k)`, and winding numbers on the `(α, β, γ)` torus.
//!
//! The 4×4 operators act on `sublattice ⊗ coin`; sublattice A (first block)
//! is the site carrying `φ₁`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{DMatrix, Vector4};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    block4, coin, expectation4, kron2, op_norm4, sigma_x, sigma_y, sigma_z, unitary_eigen,
    wrap_pi, Mat2, Mat4, C64, ONE, ZERO,
};

pub type Vec4 = Vector4<C64>;

/// Which basis the Bloch operator is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlochFrame {
    Original,
    Primed,
}

/// `f_k = diag(1, e^{ik})`.
pub fn phase_matrix(k: f64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, k))
}

/// `Σ_z` on the sublattice index.
pub fn big_sigma_z() -> Mat4 {
    kron2(&sigma_z(), &Mat2::identity())
}

pub fn big_sigma_x() -> Mat4 {
    kron2(&sigma_x(), &Mat2::identity())
}

pub fn big_sigma_y() -> Mat4 {
    kron2(&sigma_y(), &Mat2::identity())
}

/// A coin-space 2×2 operator lifted to both sublattices.
pub fn on_coin(m: &Mat2) -> Mat4 {
    kron2(&Mat2::identity(), m)
}

/// The 4×4 Floquet-Bloch operator for one wave number.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochOperator {
    pub matrix: Mat4,
    pub k: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub frame: BlochFrame,
}

impl BlochOperator {
    pub fn new(k: f64, phi1: f64, phi2: f64, frame: BlochFrame) -> Self {
        let (u12, u21) = match frame {
            BlochFrame::Original => (
                sigma_x() * phase_matrix(-k) * sigma_x() * coin(phi2),
                phase_matrix(k) * coin(phi1),
            ),
            BlochFrame::Primed => (
                coin(phi1 / 2.0) * sigma_x() * phase_matrix(-k) * sigma_x() * coin(phi2 / 2.0),
                coin(phi2 / 2.0) * phase_matrix(k) * coin(phi1 / 2.0),
            ),
        };
        let zero = Mat2::zeros();
        Self {
            matrix: block4(&zero, &u12, &u21, &zero),
            k,
            phi1,
            phi2,
            frame,
        }
    }

    /// Upper-right block, mapping sublattice B to A.
    pub fn u12(&self) -> Mat2 {
        self.matrix.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Lower-left block, mapping sublattice A to B.
    pub fn u21(&self) -> Mat2 {
        self.matrix.fixed_view::<2, 2>(2, 0).into_owned()
    }

    pub fn unitarity_residual(&self) -> f64 {
        op_norm4(&(self.matrix.adjoint() * self.matrix - Mat4::identity()))
    }

    /// Same operator in the primed basis, `T u T†` with
    /// `T = diag(C(φ₁/2), C(φ₂/2))`.
    pub fn to_primed(&self) -> Self {
        match self.frame {
            BlochFrame::Primed => self.clone(),
            BlochFrame::Original => {
                let zero = Mat2::zeros();
                let t = block4(&coin(self.phi1 / 2.0), &zero, &zero, &coin(self.phi2 / 2.0));
                Self {
                    matrix: t * self.matrix * t.adjoint(),
                    frame: BlochFrame::Primed,
                    ..*self
                }
            }
        }
    }
}

pub fn bloch_operator(k: f64, phi1: f64, phi2: f64, frame: BlochFrame) -> BlochOperator {
    BlochOperator::new(k, phi1, phi2, frame)
}

/// Operator-norm residuals of the two symmetry constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// `‖σ_y u′ σ_y − u′†‖`
    pub chiral: f64,
    /// `‖Σ_z u′ Σ_z + u′‖`
    pub susy: f64,
}

/// Residuals are always evaluated in the primed frame; an operator given in
/// the original frame is transformed first.
pub fn check_symmetries(op: &BlochOperator) -> SymmetryReport {
    let u = op.to_primed().matrix;
    let sy = on_coin(&sigma_y());
    let sz = big_sigma_z();
    SymmetryReport {
        chiral: op_norm4(&(sy * u * sy - u.adjoint())),
        susy: op_norm4(&(sz * u * sz + u)),
    }
}

/// The two partner problems `u₁₂u₂₁` and `u₂₁u₁₂` into which `u²` splits.
#[derive(Debug, Clone, PartialEq)]
pub struct PartnerPair {
    pub upper: Mat2,
    pub lower: Mat2,
}

impl PartnerPair {
    /// `‖u² − diag(u₁₂u₂₁, u₂₁u₁₂)‖` for the operator they came from.
    pub fn factorization_residual(&self, op: &BlochOperator) -> f64 {
        let zero = Mat2::zeros();
        let diag = block4(&self.upper, &zero, &zero, &self.lower);
        op_norm4(&(op.matrix * op.matrix - diag))
    }

    pub fn upper_eigenvalues(&self) -> Result<Vec<C64>> {
        eigenvalues2(&self.upper)
    }

    pub fn lower_eigenvalues(&self) -> Result<Vec<C64>> {
        eigenvalues2(&self.lower)
    }
}

fn eigenvalues2(m: &Mat2) -> Result<Vec<C64>> {
    let d = DMatrix::from_iterator(2, 2, m.iter().copied());
    Ok(unitary_eigen(d)?.values)
}

pub fn susy_partners(k: f64, phi1: f64, phi2: f64) -> PartnerPair {
    let op = BlochOperator::new(k, phi1, phi2, BlochFrame::Original);
    let (u12, u21) = (op.u12(), op.u21());
    PartnerPair {
        upper: u12 * u21,
        lower: u21 * u12,
    }
}

/// Right-hand side of the band condition `Re λ² = cos φ₁ cos φ₂ cos k − sin φ₁ sin φ₂`.
pub fn band_condition(k: f64, phi1: f64, phi2: f64) -> f64 {
    phi1.cos() * phi2.cos() * k.cos() - phi1.sin() * phi2.sin()
}

/// Quasi-energy `ε = −arg λ`, in `[0, 2π)`.
pub fn quasi_energy(lambda: C64) -> f64 {
    (-lambda.arg()).rem_euclid(TAU)
}

/// `k_j = 2πj/n`, `j = 0..n`.
pub fn uniform_k_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

pub const DEFAULT_RESOLUTION: usize = 512;

/// Minimal quasi-energy distance of any band from the two gap centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSizes {
    pub at_pm_one: f64,
    pub at_pm_i: f64,
}

/// Bands over a k grid with eigenvectors (primed frame) in a smooth gauge.
#[derive(Debug, Clone)]
pub struct BandStructure {
    pub phi1: f64,
    pub phi2: f64,
    pub k_grid: Vec<f64>,
    /// `eigenvalues[ik][band]`
    pub eigenvalues: Vec<[C64; 4]>,
    /// Columns are bands.
    pub eigenvectors: Vec<Mat4>,
    /// Largest modulus correction applied by projecting onto the unit circle.
    pub projection_delta: f64,
}

impl BandStructure {
    pub fn len(&self) -> usize {
        self.k_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_grid.is_empty()
    }

    pub fn quasi_energies(&self, ik: usize) -> [f64; 4] {
        self.eigenvalues[ik].map(quasi_energy)
    }

    pub fn vector(&self, ik: usize, band: usize) -> Vec4 {
        self.eigenvectors[ik].column(band).into_owned()
    }

    /// Largest `|Re λ² − (cos φ₁ cos φ₂ cos k − sin φ₁ sin φ₂)|`.
    pub fn band_condition_residual(&self) -> f64 {
        self.k_grid
            .iter()
            .zip(&self.eigenvalues)
            .flat_map(|(&k, lams)| {
                let target = band_condition(k, self.phi1, self.phi2);
                lams.iter().map(move |l| ((l * l).re - target).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest set distance between `{λ}` and its images `λ*`, `−λ`, `−λ*`.
    pub fn quadruple_residual(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|lams| quadruple_distance(lams))
            .fold(0.0, f64::max)
    }

    pub fn gaps(&self) -> GapSizes {
        let mut at_pm_one = f64::INFINITY;
        let mut at_pm_i = f64::INFINITY;
        for lams in &self.eigenvalues {
            for &l in lams {
                let e = quasi_energy(l).rem_euclid(PI);
                at_pm_one = at_pm_one.min(e.min(PI - e));
                at_pm_i = at_pm_i.min((e - FRAC_PI_2).abs());
            }
        }
        GapSizes { at_pm_one, at_pm_i }
    }
}

fn quadruple_distance(lams: &[C64; 4]) -> f64 {
    let nearest = |target: C64| {
        lams.iter()
            .map(|l| (l - target).norm())
            .fold(f64::INFINITY, f64::min)
    };
    lams.iter()
        .flat_map(|&l| [l.conj(), -l, -l.conj()])
        .map(nearest)
        .fold(0.0, f64::max)
}

// Eigen-decomposition of u′(k) with bands sorted by quasi-energy.
fn solve_at(k: f64, phi1: f64, phi2: f64) -> Result<([C64; 4], Mat4, f64)> {
    let op = BlochOperator::new(k, phi1, phi2, BlochFrame::Primed);
    let dense = DMatrix::from_iterator(4, 4, op.matrix.iter().copied());
    let eig = unitary_eigen(dense).map_err(|_| Error::EigenFailure { at_k: Some(k) })?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| quasi_energy(eig.values[a]).total_cmp(&quasi_energy(eig.values[b])));
    let values = [0, 1, 2, 3].map(|j| eig.values[order[j]]);
    let vectors = Mat4::from_fn(|r, c| eig.vectors[(r, order[c])]);
    Ok((values, vectors, eig.projection_delta))
}

fn fix_largest_component(v: &mut Vec4) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    if pivot.norm() > 0.0 {
        *v *= pivot.conj() / pivot.norm();
    }
}

// Greedy assignment of current eigenvectors to previous bands by overlap.
fn match_bands(prev_vals: &[C64; 4], prev: &Mat4, vals: &[C64; 4], cur: &Mat4) -> [usize; 4] {
    let overlap = prev.adjoint() * cur;
    let mut pairs: Vec<(usize, usize)> = (0..4)
        .flat_map(|j| (0..4).map(move |i| (j, i)))
        .collect();
    pairs.sort_by(|&(j1, i1), &(j2, i2)| {
        let (o1, o2) = (overlap[(j1, i1)].norm(), overlap[(j2, i2)].norm());
        if (o1 - o2).abs() > 1e-9 {
            o2.total_cmp(&o1)
        } else {
            let d1 = (prev_vals[j1] - vals[i1]).norm();
            let d2 = (prev_vals[j2] - vals[i2]).norm();
            d1.total_cmp(&d2)
        }
    });
    let mut assignment = [usize::MAX; 4];
    let mut taken = [false; 4];
    for (j, i) in pairs {
        if assignment[j] == usize::MAX && !taken[i] {
            assignment[j] = i;
            taken[i] = true;
        }
    }
    assignment
}

pub fn band_structure(phi1: f64, phi2: f64, k_grid: &[f64]) -> Result<BandStructure> {
    if k_grid.is_empty() || k_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::BadGrid);
    }
    let raw: Vec<_> = k_grid
        .par_iter()
        .map(|&k| solve_at(k, phi1, phi2))
        .collect::<Result<_>>()?;

    let mut eigenvalues = Vec::with_capacity(raw.len());
    let mut eigenvectors: Vec<Mat4> = Vec::with_capacity(raw.len());
    let mut projection_delta: f64 = 0.0;

    for (vals, vecs, delta) in raw {
        projection_delta = projection_delta.max(delta);
        let (vals, mut vecs) = match (eigenvalues.last(), eigenvectors.last()) {
            (Some(pv), Some(pvec)) => {
                let a = match_bands(pv, pvec, &vals, &vecs);
                (a.map(|i| vals[i]), Mat4::from_fn(|r, c| vecs[(r, a[c])]))
            }
            _ => (vals, vecs),
        };
        for band in 0..4 {
            let mut v = vecs.column(band).into_owned();
            fix_largest_component(&mut v);
            if let Some(prev) = eigenvectors.last() {
                // parallel transport: make ⟨prev|v⟩ real positive
                let o = (prev.column(band).adjoint() * &v)[(0, 0)];
                if o.norm() > 1e-12 {
                    v *= o.conj() / o.norm();
                }
            }
            vecs.set_column(band, &v);
        }
        eigenvalues.push(vals);
        eigenvectors.push(vecs);
    }

    Ok(BandStructure {
        phi1,
        phi2,
        k_grid: k_grid.to_vec(),
        eigenvalues,
        eigenvectors,
        projection_delta,
    })
}

/// Gap sizes from a uniform grid of the given resolution.
pub fn gap_sizes(phi1: f64, phi2: f64, resolution: usize) -> Result<GapSizes> {
    Ok(band_structure(phi1, phi2, &uniform_k_grid(resolution))?.gaps())
}

/// Angles of the three torus circles, each in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl TorusAngles {
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

/// The six operators whose expectation pairs define `(α, β, γ)`.
struct TorusOperators {
    alpha: (Mat4, Mat4),
    beta: (Mat4, Mat4),
    gamma: (Mat4, Mat4),
}

impl TorusOperators {
    fn new() -> Self {
        let id = Mat4::identity();
        let sz = big_sigma_z();
        let (sx, sy, sz_coin) = (on_coin(&sigma_x()), on_coin(&sigma_y()), on_coin(&sigma_z()));
        Self {
            alpha: (sx * (id + sz), sz_coin * (id + sz)),
            beta: (sx * (id - sz), sz_coin * (id - sz)),
            gamma: (big_sigma_x() * (id - sy), big_sigma_y() * (id - sy)),
        }
    }
}

/// Radius tolerance for the torus pairs.
pub const TORUS_RADIUS_TOL: f64 = 1e-6;

/// Torus angles of a primed-frame bulk eigenvector.
pub fn torus_angles(v: &Vec4) -> Result<TorusAngles> {
    let norm = v.norm_squared();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let ops = TorusOperators::new();
    let angle = |(cos_op, sin_op): &(Mat4, Mat4)| {
        let (x, y) = (expectation4(cos_op, v), expectation4(sin_op, v));
        let radius = x.hypot(y);
        if (radius - 1.0).abs() > TORUS_RADIUS_TOL {
            Err(Error::SymmetryViolation { radius })
        } else {
            Ok(y.atan2(x))
        }
    };
    Ok(TorusAngles {
        alpha: angle(&ops.alpha)?,
        beta: angle(&ops.beta)?,
        gamma: angle(&ops.gamma)?,
    })
}

/// Radii of the three torus pairs, without validation.
pub fn torus_radii(v: &Vec4) -> [f64; 3] {
    let ops = TorusOperators::new();
    [ops.alpha, ops.beta, ops.gamma]
        .map(|(c, s)| expectation4(&c, v).hypot(expectation4(&s, v)))
}

/// `⟨σ_y⟩`, `⟨Σ_z⟩` and `⟨Σ_z σ_y⟩` of a primed-frame Bloch vector.
pub fn symmetry_expectations(v: &Vec4) -> [f64; 3] {
    let sy = on_coin(&sigma_y());
    let sz = big_sigma_z();
    [
        expectation4(&sy, v),
        expectation4(&sz, v),
        expectation4(&(sz * sy), v),
    ]
}

pub const MIN_WINDING_RESOLUTION: usize = 256;
pub const MIN_GAP: f64 = 1e-6;

/// Integer windings of each band around the three torus circles.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingReport {
    pub phi1: f64,
    pub phi2: f64,
    pub resolution: usize,
    /// `windings[band] = [w_α, w_β, w_γ]`, bands ordered by quasi-energy at `k = 0`.
    pub windings: [[i64; 3]; 4],
    /// Distance of the accumulated winding from the reported integer.
    pub residuals: [[f64; 3]; 4],
    pub quasi_energies_at_zero: [f64; 4],
    pub gaps: GapSizes,
}

impl WindingReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// Per-band, per-angle difference `self − other`.
    pub fn difference(&self, other: &WindingReport) -> [[i64; 3]; 4] {
        let mut out = [[0; 3]; 4];
        for (b, row) in out.iter_mut().enumerate() {
            for (a, cell) in row.iter_mut().enumerate() {
                *cell = self.windings[b][a] - other.windings[b][a];
            }
        }
        out
    }
}

pub fn winding_numbers(phi1: f64, phi2: f64, resolution: usize) -> Result<WindingReport> {
    if resolution < MIN_WINDING_RESOLUTION {
        return Err(Error::ResolutionTooLow(resolution));
    }
    let bands = band_structure(phi1, phi2, &uniform_k_grid(resolution))?;
    let gaps = bands.gaps();
    let gap = gaps.at_pm_i.min(gaps.at_pm_one);
    if gap < MIN_GAP {
        return Err(Error::GapClosed { gap });
    }

    // close the loop: band labels after one full turn must return to themselves
    let last = bands.len() - 1;
    let closing = match_bands(
        &bands.eigenvalues[last],
        &bands.eigenvectors[last],
        &bands.eigenvalues[0],
        &bands.eigenvectors[0],
    );

    let mut windings = [[0i64; 3]; 4];
    let mut residuals = [[0f64; 3]; 4];
    for band in 0..4 {
        let angles: Vec<[f64; 3]> = (0..bands.len())
            .map(|ik| torus_angles(&bands.vector(ik, band)).map(|t| t.as_array()))
            .chain(std::iter::once(
                torus_angles(&bands.vector(0, closing[band])).map(|t| t.as_array()),
            ))
            .collect::<Result<_>>()?;
        for axis in 0..3 {
            let total: f64 = angles
                .windows(2)
                .map(|w| wrap_pi(w[1][axis] - w[0][axis]))
                .sum();
            let turns = total / TAU;
            windings[band][axis] = turns.round() as i64;
            residuals[band][axis] = (turns - turns.round()).abs();
        }
    }

    Ok(WindingReport {
        phi1,
        phi2,
        resolution,
        windings,
        residuals,
        quasi_energies_at_zero: bands.quasi_energies(0),
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    #[test]
    fn trivial_operator_is_sublattice_swap() {
        let op = BlochOperator::new(0.0, 0.0, 0.0, BlochFrame::Original);
        let id = Mat2::identity();
        let zero = Mat2::zeros();
        assert_eq!(op.matrix, block4(&zero, &id, &id, &zero));
    }

    #[test]
    fn blocks_and_unitarity() {
        for frame in [BlochFrame::Original, BlochFrame::Primed] {
            let op = BlochOperator::new(2.1, 1.29, 0.17, frame);
            assert!(op.unitarity_residual() < 1e-12);
            assert_eq!(op.matrix.fixed_view::<2, 2>(0, 0).into_owned(), Mat2::zeros());
            assert_eq!(op.matrix.fixed_view::<2, 2>(2, 2).into_owned(), Mat2::zeros());
        }
    }

    #[test]
    fn primed_transform_matches_direct_construction() {
        let a = BlochOperator::new(0.7, 1.0, 0.2, BlochFrame::Original).to_primed();
        let b = BlochOperator::new(0.7, 1.0, 0.2, BlochFrame::Primed);
        assert!((a.matrix - b.matrix).norm() < 1e-14);
    }

    #[test]
    fn symmetries_hold_in_primed_frame() {
        for (k, p1, p2) in [(1.0, 1.29, 0.17), (0.3, 0.0, 0.0), (5.0, -2.0, 0.4)] {
            let r = check_symmetries(&BlochOperator::new(k, p1, p2, BlochFrame::Primed));
            assert!(r.chiral < 1e-12 && r.susy < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn original_frame_breaks_chiral_form() {
        // the untransformed operator is not of the σ_y-chiral form; the report
        // must therefore transform before measuring
        let op = BlochOperator::new(1.0, 1.29, 0.17, BlochFrame::Original);
        let sy = on_coin(&sigma_y());
        let raw = op_norm4(&(sy * op.matrix * sy - op.matrix.adjoint()));
        assert!(raw > 1e-3);
        assert!(check_symmetries(&op).chiral < 1e-12);
    }

    #[test]
    fn band_edges_at_k_zero() {
        let bands = band_structure(1.0, 0.2, &[0.0]).unwrap();
        let mut eps = bands.quasi_energies(0);
        eps.sort_by(f64::total_cmp);
        let expect = [0.6, PI - 0.6, PI + 0.6, TAU - 0.6];
        for (e, x) in eps.iter().zip(expect) {
            assert!((e - x).abs() < 1e-12, "{eps:?}");
        }
    }

    #[test]
    fn equal_angles_close_gap_at_k_pi() {
        let bands = band_structure(0.7, 0.7, &[PI]).unwrap();
        let hits = bands.eigenvalues[0]
            .iter()
            .filter(|l| (**l - I).norm() < 1e-7 || (**l + I).norm() < 1e-7)
            .count();
        assert_eq!(hits, 4);
        assert!(bands.gaps().at_pm_i < 1e-7);
    }

    #[test]
    fn band_structure_rejects_bad_grid() {
        assert!(matches!(band_structure(1.0, 0.2, &[]), Err(Error::BadGrid)));
        assert!(matches!(
            band_structure(1.0, 0.2, &[1.0, 0.5]),
            Err(Error::BadGrid)
        ));
    }

    #[test]
    fn partner_spectra_coincide() {
        let pair = susy_partners(0.9, 1.29, 0.17);
        let op = BlochOperator::new(0.9, 1.29, 0.17, BlochFrame::Original);
        assert!(pair.factorization_residual(&op) < 1e-12);
        let mut a = pair.upper_eigenvalues().unwrap();
        let mut b = pair.lower_eigenvalues().unwrap();
        a.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        b.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn torus_angles_reject_non_eigenstate() {
        // pure sublattice-A state has ⟨Σ_z⟩ = 1, so the β pair collapses
        let v = Vec4::new(ONE, ZERO, ZERO, ZERO);
        assert!(matches!(
            torus_angles(&v),
            Err(Error::SymmetryViolation { .. })
        ));
        let v = Vec4::new(ONE, ONE, ZERO, ZERO);
        assert!(matches!(torus_angles(&v), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn winding_preconditions() {
        assert!(matches!(
            winding_numbers(1.29, 0.17, 100),
            Err(Error::ResolutionTooLow(100))
        ));
        assert!(matches!(
            winding_numbers(0.7, 0.7, 256),
            Err(Error::GapClosed { .. })
        ));
    }
}
