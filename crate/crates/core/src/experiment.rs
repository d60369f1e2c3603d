//! Emulated optical measurement chain.
//!
//! Waveplates prepare the input polarization, the walker is read out in the
//! H/V, diagonal/antidiagonal and circular bases, and a Stokes reconstruction
//! turns the six intensities back into a 2×2 density matrix.
//!
//! Circular handedness: `|R⟩ = (|H⟩ + i|V⟩)/√2`, so `S₃ = I_R − I_L = ⟨σ_y⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{real, sigma_x, sigma_y, sigma_z, Mat2, Vec2, I, ONE, ZERO};
use crate::walk::{evolve, lab_to_primed, CoinProfile, Frame, Lattice, ProfileDescriptor, WalkerState};

/// Site at which the walker is injected.
pub const INJECTION_SITE: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateKind {
    Quarter,
    Half,
}

/// A waveplate with its fast axis at `angle_deg` from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waveplate {
    pub kind: PlateKind,
    pub angle_deg: f64,
}

impl Waveplate {
    pub fn quarter(angle_deg: f64) -> Self {
        Self {
            kind: PlateKind::Quarter,
            angle_deg,
        }
    }

    pub fn half(angle_deg: f64) -> Self {
        Self {
            kind: PlateKind::Half,
            angle_deg,
        }
    }

    pub fn matrix(&self) -> Mat2 {
        waveplate(self.kind, self.angle_deg)
    }
}

fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(real(c), real(-s), real(s), real(c))
}

/// Jones matrix `R(θ) · diag(1, e^{iδ}) · R(−θ)` with `δ = π/2` (QWP) or `π`
/// (HWP); global phase dropped.
pub fn waveplate(kind: PlateKind, theta_deg: f64) -> Mat2 {
    let retarder = match kind {
        PlateKind::Quarter => Mat2::new(ONE, ZERO, ZERO, I),
        PlateKind::Half => Mat2::new(ONE, ZERO, ZERO, -ONE),
    };
    let theta = theta_deg.to_radians();
    rotation(theta) * retarder * rotation(-theta)
}

/// Polarization obtained by sending `|H⟩` through `plates` in order.
pub fn input_polarization(plates: &[Waveplate]) -> Vec2 {
    let pol = plates
        .iter()
        .fold(Vec2::new(ONE, ZERO), |acc, p| p.matrix() * acc);
    pol / real(pol.norm())
}

/// `|x₀⟩ ⊗ (plates · |H⟩)`, normalized.
pub fn prepare_input(lattice: Lattice, x0: i64, plates: &[Waveplate]) -> Result<WalkerState> {
    WalkerState::localized(lattice, x0, input_polarization(plates))
}

/// Six projective intensities at one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisIntensities {
    pub h: f64,
    pub v: f64,
    pub d: f64,
    pub a: f64,
    pub r: f64,
    pub l: f64,
}

impl BasisIntensities {
    pub fn of_pair(pair: &Vec2) -> Self {
        let (h, v) = (pair[0], pair[1]);
        let s = FRAC_1_SQRT_2;
        Self {
            h: h.norm_sqr(),
            v: v.norm_sqr(),
            d: ((h + v) * s).norm_sqr(),
            a: ((h - v) * s).norm_sqr(),
            r: ((h - I * v) * s).norm_sqr(),
            l: ((h + I * v) * s).norm_sqr(),
        }
    }

    pub fn totals(&self) -> [f64; 3] {
        [self.h + self.v, self.d + self.a, self.r + self.l]
    }

    /// Largest disagreement between the three basis totals.
    pub fn completeness_residual(&self) -> f64 {
        let [a, b, c] = self.totals();
        (a - b).abs().max((b - c).abs()).max((a - c).abs())
    }

    pub fn stokes(&self) -> Stokes {
        Stokes {
            s0: self.h + self.v,
            s1: self.h - self.v,
            s2: self.d - self.a,
            s3: self.r - self.l,
        }
    }
}

/// Stokes parameters of a site polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stokes {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl Stokes {
    pub fn of_pair(pair: &Vec2) -> Self {
        let (h, v) = (pair[0], pair[1]);
        let cross = h.conj() * v;
        Self {
            s0: h.norm_sqr() + v.norm_sqr(),
            s1: h.norm_sqr() - v.norm_sqr(),
            s2: 2.0 * cross.re,
            s3: 2.0 * cross.im,
        }
    }

    /// `(S₁, S₂, S₃) / S₀`.
    pub fn normalized(&self) -> [f64; 3] {
        [self.s1 / self.s0, self.s2 / self.s0, self.s3 / self.s0]
    }
}

/// Site amplitudes of `state` at `x`, expressed in `frame`.
pub fn site_pair(state: &WalkerState, profile: &CoinProfile, x: i64, frame: Frame) -> Result<Vec2> {
    let converted = state.to_frame(profile, frame)?;
    converted
        .site_amplitude(x)
        .ok_or_else(|| Error::SiteOutOfRange {
            site: x,
            lattice: state.lattice().to_string(),
        })
}

pub fn measure_bases(
    state: &WalkerState,
    x: i64,
    frame: Frame,
    profile: &CoinProfile,
) -> Result<BasisIntensities> {
    Ok(BasisIntensities::of_pair(&site_pair(state, profile, x, frame)?))
}

/// 2×2 polarization density matrix at one site and step.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: Mat2,
    pub frame: Frame,
    pub site: i64,
    pub step: usize,
}

/// Amplitude/phase decomposition `a_H|H⟩ + a_V e^{iπθ}|V⟩` of a (near) pure
/// density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePhase {
    pub amp_h: f64,
    pub amp_v: f64,
    /// Relative phase in units of π.
    pub phase_over_pi: f64,
}

impl DensityMatrix {
    pub fn pure(pair: &Vec2, frame: Frame, site: i64, step: usize) -> Self {
        Self {
            matrix: pair * pair.adjoint(),
            frame,
            site,
            step,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (self.matrix - self.matrix.adjoint()).norm()
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.matrix;
        let tr = self.trace();
        let half_diff = (m[(0, 0)].re - m[(1, 1)].re) / 2.0;
        let root = (half_diff * half_diff + m[(1, 0)].norm_sqr()).sqrt();
        [tr / 2.0 - root, tr / 2.0 + root]
    }

    /// `⟨ψ|ρ|ψ⟩ / (tr ρ ‖ψ‖²)`.
    pub fn fidelity_with(&self, pair: &Vec2) -> f64 {
        (pair.adjoint() * self.matrix * pair)[(0, 0)].re / (self.trace() * pair.norm_squared())
    }

    pub fn amplitude_phase(&self) -> AmplitudePhase {
        let tr = self.trace();
        AmplitudePhase {
            amp_h: (self.matrix[(0, 0)].re / tr).max(0.0).sqrt(),
            amp_v: (self.matrix[(1, 1)].re / tr).max(0.0).sqrt(),
            phase_over_pi: self.matrix[(1, 0)].arg() / std::f64::consts::PI,
        }
    }

    /// Rotate into `target`, given the coin angle of the site.
    pub fn to_frame(&self, phi: f64, target: Frame) -> Self {
        let t = match (self.frame, target) {
            (a, b) if a == b => return self.clone(),
            (Frame::Lab, Frame::Primed) => lab_to_primed(phi),
            _ => lab_to_primed(-phi),
        };
        Self {
            matrix: t * self.matrix * t.adjoint(),
            frame: target,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tomography {
    pub rho: DensityMatrix,
    /// Set when a negative eigenvalue had to be clipped.
    pub clipped: bool,
}

/// Stokes reconstruction `ρ = (S₀ + S₁σ_z + S₂σ_x + S₃σ_y) / 2`.
pub fn tomography(
    intensities: &BasisIntensities,
    frame: Frame,
    site: i64,
    step: usize,
) -> Result<Tomography> {
    let st = intensities.stokes();
    if !(st.s0 > 0.0) {
        return Err(Error::NoIntensity);
    }
    let mut vector = [st.s1, st.s2, st.s3];
    let length = vector.iter().map(|s| s * s).sum::<f64>().sqrt();
    // smallest eigenvalue is (S₀ − |S|)/2
    let clipped = (st.s0 - length) / 2.0 < -1e-10;
    if clipped {
        for s in &mut vector {
            *s *= st.s0 / length;
        }
    }
    let matrix = (Mat2::identity() * real(st.s0)
        + sigma_z() * real(vector[0])
        + sigma_x() * real(vector[1])
        + sigma_y() * real(vector[2]))
        * real(0.5);
    Ok(Tomography {
        rho: DensityMatrix {
            matrix,
            frame,
            site,
            step,
        },
        clipped,
    })
}

/// Seeded multiplicative Gaussian jitter on measured intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityNoise {
    pub relative: f64,
    pub seed: u64,
}

impl IntensityNoise {
    pub fn apply(&self, clean: &BasisIntensities) -> BasisIntensities {
        if self.relative == 0.0 {
            return *clean;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.relative.abs()).expect("finite width");
        let mut jitter = |x: f64| (x * (1.0 + normal.sample(&mut rng))).max(0.0);
        BasisIntensities {
            h: jitter(clean.h),
            v: jitter(clean.v),
            d: jitter(clean.d),
            a: jitter(clean.a),
            r: jitter(clean.r),
            l: jitter(clean.l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Configuration {
    Bulk,
    Interface,
    Other,
}

impl Configuration {
    pub fn of(descriptor: &ProfileDescriptor) -> Self {
        match descriptor {
            ProfileDescriptor::Bulk { .. } => Configuration::Bulk,
            ProfileDescriptor::Interface { .. } => Configuration::Interface,
            _ => Configuration::Other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Configuration::Bulk => "bulk",
            Configuration::Interface => "interface",
            Configuration::Other => "other",
        }
    }
}

/// Interface site reachable after `steps` steps from the injection site.
///
/// The walker alternates sublattices every step, so after an odd number of
/// steps it can only be found at `x = 0` and after an even number at `x = 1`.
pub fn interface_probe(steps: usize) -> i64 {
    if steps % 2 == 1 {
        0
    } else {
        INJECTION_SITE
    }
}

/// Trapped intensity as a function of the input quarter-wave-plate angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanCurve {
    pub configuration: Configuration,
    pub steps: usize,
    pub probe: i64,
    pub angles_deg: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl ScanCurve {
    pub fn max(&self) -> f64 {
        self.intensity.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.intensity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }
}

/// Probability at `probe` after `steps` steps from `pol` injected at site 1.
pub fn trapped_intensity(
    profile: &CoinProfile,
    pol: Vec2,
    steps: usize,
    probe: i64,
) -> Result<f64> {
    let start = WalkerState::localized(profile.lattice().clone(), INJECTION_SITE, pol)?;
    Ok(evolve(&start, profile, steps, false)?
        .final_state
        .site_probability(probe))
}

pub fn qwp_scan(
    descriptor: &ProfileDescriptor,
    steps: usize,
    probe: i64,
    grid_deg: &[f64],
) -> Result<ScanCurve> {
    if grid_deg.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let profile = CoinProfile::for_walk(descriptor.clone(), INJECTION_SITE, steps)?;
    let intensity = grid_deg
        .par_iter()
        .map(|&theta| {
            let pol = input_polarization(&[Waveplate::quarter(theta)]);
            trapped_intensity(&profile, pol, steps, probe)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanCurve {
        configuration: Configuration::of(descriptor),
        steps,
        probe,
        angles_deg: grid_deg.to_vec(),
        intensity,
    })
}

/// The scan at a long step count, probed at the interface site of matching
/// parity.
pub fn long_time_extrapolation(
    descriptor: &ProfileDescriptor,
    steps: usize,
    grid_deg: &[f64],
) -> Result<ScanCurve> {
    qwp_scan(descriptor, steps, interface_probe(steps), grid_deg)
}

/// Largest trapped intensity reachable by any input polarization: the top
/// eigenvalue of the 2×2 Gram matrix of the probe-site outputs for `|H⟩`
/// and `|V⟩` inputs.
pub fn max_trappable_intensity(
    descriptor: &ProfileDescriptor,
    steps: usize,
    probe: i64,
) -> Result<f64> {
    let profile = CoinProfile::for_walk(descriptor.clone(), INJECTION_SITE, steps)?;
    let out = |pol: Vec2| -> Result<Vec2> {
        let start = WalkerState::localized(profile.lattice().clone(), INJECTION_SITE, pol)?;
        Ok(evolve(&start, &profile, steps, false)?
            .final_state
            .site_amplitude(probe)
            .unwrap_or_else(Vec2::zeros))
    };
    let (h, v) = (out(Vec2::new(ONE, ZERO))?, out(Vec2::new(ZERO, ONE))?);
    let gram = Matrix2::new(h.dotc(&h), h.dotc(&v), v.dotc(&h), v.dotc(&v));
    let rho = DensityMatrix {
        matrix: gram,
        frame: Frame::Lab,
        site: probe,
        step: steps,
    };
    Ok(rho.eigenvalues()[1])
}

/// `n` equally spaced angles covering `[0°, 180°)`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 180.0 * j as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn up_to_phase(a: Vec2, b: Vec2) -> f64 {
        1.0 - a.dot(&b).norm_sqr() / (a.norm_squared() * b.norm_squared())
    }

    #[test]
    fn plates_are_unitary() {
        for kind in [PlateKind::Quarter, PlateKind::Half] {
            for theta in [0.0, 13.0, 45.0, 137.0] {
                let m = waveplate(kind, theta);
                assert!((m.adjoint() * m - Mat2::identity()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn standard_plate_actions() {
        let h = Vec2::new(ONE, ZERO);
        let s = real(FRAC_1_SQRT_2);
        assert!(up_to_phase(waveplate(PlateKind::Quarter, 0.0) * h, h) < 1e-14);
        let diag = Vec2::new(s, s);
        assert!(up_to_phase(waveplate(PlateKind::Half, 22.5) * h, diag) < 1e-14);
        let out = waveplate(PlateKind::Quarter, 45.0) * h;
        let circ = |sign: f64| Vec2::new(s, I * s * sign);
        assert!(up_to_phase(out, circ(1.0)).min(up_to_phase(out, circ(-1.0))) < 1e-14);
    }

    #[test]
    fn prepare_input_defaults_to_h() {
        let lat = Lattice::segment(-3, 8).unwrap();
        let s = prepare_input(lat, 1, &[]).unwrap();
        assert_eq!(s.site_amplitude(1), Some(Vec2::new(ONE, ZERO)));
        let s = prepare_input(Lattice::segment(-3, 8).unwrap(), 1, &[Waveplate::quarter(137.0)])
            .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn intensities_of_h_and_circular() {
        let p = 0.3f64;
        let b = BasisIntensities::of_pair(&Vec2::new(real(p.sqrt()), ZERO));
        for (got, want) in [(b.h, p), (b.v, 0.0), (b.d, p / 2.0), (b.a, p / 2.0), (b.r, p / 2.0), (b.l, p / 2.0)] {
            assert!((got - want).abs() < 1e-15);
        }
        let s = real(FRAC_1_SQRT_2);
        let b = BasisIntensities::of_pair(&Vec2::new(s, I * s));
        assert!((b.r - 1.0).abs() < 1e-15 && b.l < 1e-15);
        assert!(b.completeness_residual() < 1e-15);
    }

    #[test]
    fn tomography_of_simple_states() {
        let b = BasisIntensities::of_pair(&Vec2::new(ONE, ZERO));
        let t = tomography(&b, Frame::Lab, 0, 0).unwrap();
        assert!((t.rho.matrix - Mat2::new(ONE, ZERO, ZERO, ZERO)).norm() < 1e-15);

        let s = real(FRAC_1_SQRT_2);
        let b = BasisIntensities::of_pair(&Vec2::new(s, I * s));
        let t = tomography(&b, Frame::Primed, 0, 0).unwrap();
        assert!((t.rho.matrix[(1, 0)] - I * 0.5).norm() < 1e-15);
        assert!((t.rho.matrix[(0, 1)] + I * 0.5).norm() < 1e-15);
        assert!(!t.clipped);
    }

    #[test]
    fn tomography_clips_unphysical_input() {
        let b = BasisIntensities {
            h: 1.0,
            v: 0.0,
            d: 1.0,
            a: 0.0,
            r: 0.5,
            l: 0.5,
        };
        let t = tomography(&b, Frame::Lab, 0, 0).unwrap();
        assert!(t.clipped);
        assert!(t.rho.eigenvalues()[0] > -1e-12);
        assert!((t.rho.trace() - 1.0).abs() < 1e-12);

        let zero = BasisIntensities::of_pair(&Vec2::zeros());
        assert_eq!(tomography(&zero, Frame::Lab, 0, 0), Err(Error::NoIntensity));
    }

    #[test]
    fn interface_probe_follows_step_parity() {
        assert_eq!(interface_probe(13), 0);
        assert_eq!(interface_probe(100), 1);
    }

    #[test]
    fn noise_is_seeded() {
        let b = BasisIntensities::of_pair(&Vec2::new(real(0.6), C64::new(0.0, 0.8)));
        let n = IntensityNoise {
            relative: 0.01,
            seed: 7,
        };
        assert_eq!(n.apply(&b), n.apply(&b));
        assert_ne!(n.apply(&b), b);
        let other = IntensityNoise { seed: 8, ..n };
        assert_ne!(n.apply(&b), other.apply(&b));
    }

    #[test]
    fn scan_with_no_steps_is_flat_zero() {
        let d = ProfileDescriptor::single_interface(1.29, 0.17);
        let c = qwp_scan(&d, 0, 0, &angle_grid(12)).unwrap();
        assert!(c.intensity.iter().all(|&p| p == 0.0));
        assert_eq!(qwp_scan(&d, 13, 0, &[]), Err(Error::EmptyGrid));
    }
}
