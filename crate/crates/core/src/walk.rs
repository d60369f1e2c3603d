//! Real-space walker: lattice, coin profiles, and the single-step evolution
//! `U = S · C(φ_x)`.
//!
//! Conventions fixed here and used by every other module:
//!
//! * In the bulk configuration odd sites carry `φ₁` and even sites `φ₂`, so the
//!   injection site `x = 1` sees `φ₁`.
//! * Unit cell `n` holds the sites `(2n + 1, 2n + 2)`. The odd site is
//!   sublattice A (first block of the Bloch operator, `Σ_z = +1`), the even
//!   site is sublattice B (`Σ_z = −1`).
//! * An interface at position `s` is the junction between sites `s − 1` and
//!   `s`. Site `x = 1` always follows the bulk pattern; any other site is
//!   "swapped" (`φ₁ ↔ φ₂`) when an odd number of interfaces separate it from
//!   `x = 1`. The default interface at `s = 1` therefore swaps `x ≤ 0`, and
//!   sites 0 and 1 both carry `φ₁`.
//! * The primed frame at site `x` uses the coin angle applied at that site.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{coin, Mat2, Vec2, C64, ZERO};

/// Polarization component of the walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coin {
    H,
    V,
}

impl Coin {
    pub fn index(self) -> usize {
        match self {
            Coin::H => 0,
            Coin::V => 1,
        }
    }
}

/// Position within the two-site unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn of(x: i64) -> Self {
        if x.rem_euclid(2) == 1 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    /// Eigenvalue of `Σ_z`.
    pub fn sign(self) -> f64 {
        match self {
            Sublattice::A => 1.0,
            Sublattice::B => -1.0,
        }
    }
}

/// Unit cell index of site `x`; cell `n` holds `(2n + 1, 2n + 2)`.
pub fn unit_cell(x: i64) -> i64 {
    (x - 1).div_euclid(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Ring,
    Segment,
}

/// A finite set of consecutive sites `origin .. origin + len`, either closed
/// into a ring or left open as a segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    topology: Topology,
    origin: i64,
    len: usize,
}

impl Lattice {
    pub fn ring(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::LatticeTooSmall { min: 2, got: n });
        }
        if n % 2 != 0 {
            return Err(Error::OddRing(n));
        }
        Ok(Self {
            topology: Topology::Ring,
            origin: 0,
            len: n,
        })
    }

    pub fn segment(origin: i64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::LatticeTooSmall { min: 2, got: len });
        }
        Ok(Self {
            topology: Topology::Segment,
            origin,
            len,
        })
    }

    /// Segment wide enough that a walker starting at `center` never touches
    /// either end within `steps` steps (`2·steps + 5` sites).
    pub fn around(center: i64, steps: usize) -> Self {
        let reach = steps as i64 + 2;
        Self {
            topology: Topology::Segment,
            origin: center - reach,
            len: 2 * reach as usize + 1,
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_ring(&self) -> bool {
        self.topology == Topology::Ring
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn site(&self, index: usize) -> i64 {
        self.origin + index as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(|i| self.site(i))
    }

    pub fn index_of(&self, x: i64) -> Option<usize> {
        match self.topology {
            Topology::Ring => Some((x - self.origin).rem_euclid(self.len as i64) as usize),
            Topology::Segment => {
                let i = x - self.origin;
                (0..self.len as i64).contains(&i).then_some(i as usize)
            }
        }
    }

    fn require(&self, x: i64) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::SiteOutOfRange {
            site: x,
            lattice: self.to_string(),
        })
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.topology {
            Topology::Ring => write!(f, "ring({})", self.len),
            Topology::Segment => write!(
                f,
                "segment[{}..={}]",
                self.origin,
                self.origin + self.len as i64 - 1
            ),
        }
    }
}

/// How the per-site coin angles are laid out.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileDescriptor {
    /// `φ₁` on odd sites, `φ₂` on even sites.
    Bulk { phi1: f64, phi2: f64 },
    /// Bulk pattern with `φ₁ ↔ φ₂` interchanged across each listed interface.
    Interface {
        phi1: f64,
        phi2: f64,
        interfaces: Vec<i64>,
    },
    Uniform { phi: f64 },
    /// One angle per lattice site, in lattice order.
    Explicit(Vec<f64>),
}

impl ProfileDescriptor {
    /// Single interface between `x = 0` and `x = 1`.
    pub fn single_interface(phi1: f64, phi2: f64) -> Self {
        ProfileDescriptor::Interface {
            phi1,
            phi2,
            interfaces: vec![1],
        }
    }

    pub fn angles(&self) -> Option<(f64, f64)> {
        match *self {
            ProfileDescriptor::Bulk { phi1, phi2 }
            | ProfileDescriptor::Interface { phi1, phi2, .. } => Some((phi1, phi2)),
            ProfileDescriptor::Uniform { phi } => Some((phi, phi)),
            ProfileDescriptor::Explicit(_) => None,
        }
    }
}

/// Coin angles `φ_x` for every site of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinProfile {
    lattice: Lattice,
    angles: Vec<f64>,
    descriptor: ProfileDescriptor,
}

impl CoinProfile {
    pub fn new(descriptor: ProfileDescriptor, lattice: Lattice) -> Result<Self> {
        let n = lattice.len();
        let alternating = |phi1: f64, phi2: f64, x: i64, swapped: bool| {
            let odd = x.rem_euclid(2) == 1;
            if odd != swapped {
                phi1
            } else {
                phi2
            }
        };

        let angles = match &descriptor {
            ProfileDescriptor::Bulk { phi1, phi2 } => {
                check_finite(&[*phi1, *phi2])?;
                lattice
                    .sites()
                    .map(|x| alternating(*phi1, *phi2, x, false))
                    .collect()
            }
            ProfileDescriptor::Uniform { phi } => {
                check_finite(&[*phi])?;
                vec![*phi; n]
            }
            ProfileDescriptor::Explicit(list) => {
                if list.len() != n {
                    return Err(Error::AngleCountMismatch {
                        expected: n,
                        got: list.len(),
                    });
                }
                check_finite(list)?;
                list.clone()
            }
            ProfileDescriptor::Interface {
                phi1,
                phi2,
                interfaces,
            } => {
                check_finite(&[*phi1, *phi2])?;
                let junctions = normalize_interfaces(&lattice, interfaces)?;
                let reference = reference_site(&lattice);
                lattice
                    .sites()
                    .map(|x| {
                        let (lo, hi) = (x.min(reference), x.max(reference));
                        let crossed = junctions.iter().filter(|&&s| s > lo && s <= hi).count();
                        alternating(*phi1, *phi2, x, crossed % 2 == 1)
                    })
                    .collect()
            }
        };

        Ok(Self {
            lattice,
            angles,
            descriptor,
        })
    }

    /// Profile on a segment sized for `steps` steps of a walker injected at
    /// `x0`.
    pub fn for_walk(descriptor: ProfileDescriptor, x0: i64, steps: usize) -> Result<Self> {
        Self::new(descriptor, Lattice::around(x0, steps))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn descriptor(&self) -> &ProfileDescriptor {
        &self.descriptor
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle_at(&self, x: i64) -> Option<f64> {
        self.lattice.index_of(x).map(|i| self.angles[i])
    }

    /// Equal coin angles leave no gap at `±i` and hence no protected midgap
    /// states.
    pub fn is_topologically_trivial(&self) -> bool {
        match self.descriptor.angles() {
            Some((a, b)) => (a - b).abs() < 1e-12,
            None => false,
        }
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(&bad) => Err(Error::NonFiniteAngle(bad)),
        None => Ok(()),
    }
}

// Site whose pattern is never swapped: x = 1 when present, else the right end.
fn reference_site(lattice: &Lattice) -> i64 {
    let last = lattice.site(lattice.len() - 1);
    if (lattice.origin()..=last).contains(&1) {
        1
    } else {
        last
    }
}

// Interface positions in lattice coordinates. On a ring a junction at the
// origin is moved to `origin + len`; with an even number of junctions the
// parity of crossings does not depend on which way round the ring one counts.
fn normalize_interfaces(lattice: &Lattice, interfaces: &[i64]) -> Result<Vec<i64>> {
    let lo = lattice.origin();
    let hi = lo + lattice.len() as i64;
    let out_of_range = |s: i64| Error::InterfaceOutOfRange {
        site: s,
        lattice: lattice.to_string(),
    };
    match lattice.topology() {
        Topology::Segment => interfaces
            .iter()
            .map(|&s| {
                if s > lo && s < hi {
                    Ok(s)
                } else {
                    Err(out_of_range(s))
                }
            })
            .collect(),
        Topology::Ring => {
            if interfaces.len() % 2 != 0 {
                return Err(Error::OddInterfaceCount(interfaces.len()));
            }
            interfaces
                .iter()
                .map(|&s| match s {
                    s if s == lo => Ok(hi),
                    s if s > lo && s < hi => Ok(s),
                    s => Err(out_of_range(s)),
                })
                .collect()
        }
    }
}

/// Basis in which amplitudes are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    /// Laboratory H/V polarization.
    Lab,
    /// Site-local symmetric basis `|H′⟩ = cos(φ/2)|H⟩ + i sin(φ/2)|V⟩`,
    /// `|V′⟩ = cos(φ/2)|V⟩ + i sin(φ/2)|H⟩`.
    Primed,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Primed => "primed",
        }
    }
}

/// Maps lab amplitudes at a site with coin angle `phi` to primed ones.
pub fn lab_to_primed(phi: f64) -> Mat2 {
    coin(phi / 2.0)
}

/// Complex amplitudes `Ψ_{x,c}` over a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    lattice: Lattice,
    amps: Vec<Vec2>,
    step: usize,
    frame: Frame,
}

impl WalkerState {
    pub fn zeros(lattice: Lattice) -> Self {
        let n = lattice.len();
        Self {
            lattice,
            amps: vec![Vec2::zeros(); n],
            step: 0,
            frame: Frame::Lab,
        }
    }

    /// `|x⟩ ⊗ pol`; `pol` is used as given.
    pub fn localized(lattice: Lattice, x: i64, pol: Vec2) -> Result<Self> {
        let i = lattice.require(x)?;
        let mut state = Self::zeros(lattice);
        state.amps[i] = pol;
        Ok(state)
    }

    pub fn from_amplitudes(lattice: Lattice, amps: Vec<Vec2>, frame: Frame) -> Result<Self> {
        if amps.len() != lattice.len() {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self {
            lattice,
            amps,
            step: 0,
            frame,
        })
    }

    /// From a flat `2N` vector in `site ⊗ coin` order.
    pub fn from_flat(lattice: Lattice, flat: &[C64], frame: Frame) -> Result<Self> {
        if flat.len() != 2 * lattice.len() {
            return Err(Error::LatticeMismatch);
        }
        let amps = flat.chunks(2).map(|c| Vec2::new(c[0], c[1])).collect();
        Self::from_amplitudes(lattice, amps, frame)
    }

    pub fn to_flat(&self) -> Vec<C64> {
        self.amps.iter().flat_map(|a| [a[0], a[1]]).collect()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn amplitudes(&self) -> &[Vec2] {
        &self.amps
    }

    pub fn site_amplitude(&self, x: i64) -> Option<Vec2> {
        self.lattice.index_of(x).map(|i| self.amps[i])
    }

    pub fn amplitude(&self, x: i64, c: Coin) -> C64 {
        self.site_amplitude(x).map_or(ZERO, |a| a[c.index()])
    }

    pub fn site_probability(&self, x: i64) -> f64 {
        self.site_amplitude(x).map_or(0.0, |a| a.norm_squared())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_squared()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_squared()).sum()
    }

    fn check_profile(&self, profile: &CoinProfile) -> Result<()> {
        if self.lattice != *profile.lattice() {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    fn require_lab(&self) -> Result<()> {
        if self.frame != Frame::Lab {
            return Err(Error::FrameMismatch { expected: "lab" });
        }
        Ok(())
    }

    /// Apply `C(φ_x)` at every site.
    pub fn apply_coin(&self, profile: &CoinProfile) -> Result<Self> {
        self.check_profile(profile)?;
        self.require_lab()?;
        let amps = self
            .amps
            .iter()
            .zip(profile.angles())
            .map(|(a, &phi)| coin(phi) * a)
            .collect();
        Ok(self.with_amps(amps))
    }

    fn with_amps(&self, amps: Vec<Vec2>) -> Self {
        Self {
            lattice: self.lattice.clone(),
            amps,
            step: self.step,
            frame: self.frame,
        }
    }

    /// Move H one site right and V one site left.
    pub fn apply_shift(&self) -> Result<Self> {
        self.require_lab()?;
        let n = self.lattice.len();
        if !self.lattice.is_ring() {
            for &i in &[0, n - 1] {
                if self.amps[i] != Vec2::zeros() {
                    return Err(Error::ReachedBoundary {
                        site: self.lattice.site(i),
                    });
                }
            }
        }
        let mut amps = vec![Vec2::zeros(); n];
        shift_into(&self.amps, &mut amps);
        Ok(self.with_amps(amps))
    }

    /// Coin and shift with precomputed coins, reusing `scratch`.
    fn step_with(&mut self, coins: &[Mat2], scratch: &mut Vec<Vec2>) -> Result<()> {
        let n = self.amps.len();
        if !self.lattice.is_ring() {
            // the coin never moves weight between sites, so checking before it is enough
            for &i in &[0, n - 1] {
                if self.amps[i] != Vec2::zeros() {
                    return Err(Error::ReachedBoundary {
                        site: self.lattice.site(i),
                    });
                }
            }
        }
        for (a, c) in self.amps.iter_mut().zip(coins) {
            *a = c * *a;
        }
        scratch.clear();
        scratch.resize(n, Vec2::zeros());
        shift_into(&self.amps, scratch);
        std::mem::swap(&mut self.amps, scratch);
        self.step += 1;
        Ok(())
    }

    /// One application of `U = S · C(φ_x)`.
    pub fn step(&self, profile: &CoinProfile) -> Result<Self> {
        let mut next = self.apply_coin(profile)?.apply_shift()?;
        next.step += 1;
        Ok(next)
    }

    /// Express the state in `target` frame, using the profile's site angles.
    pub fn to_frame(&self, profile: &CoinProfile, target: Frame) -> Result<Self> {
        self.check_profile(profile)?;
        let sign = match (self.frame, target) {
            (a, b) if a == b => return Ok(self.clone()),
            (Frame::Lab, Frame::Primed) => 1.0,
            _ => -1.0,
        };
        let amps = self
            .amps
            .iter()
            .zip(profile.angles())
            .map(|(a, &phi)| lab_to_primed(sign * phi) * a)
            .collect();
        Ok(Self {
            frame: target,
            ..self.with_amps(amps)
        })
    }
}

/// Polarization-resolved probabilities at one step, in both frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub step: usize,
    pub sites: Vec<i64>,
    /// `[P(H), P(V)]` per site.
    pub lab: Vec<[f64; 2]>,
    /// `[P(H′), P(V′)]` per site.
    pub primed: Vec<[f64; 2]>,
}

impl Histogram {
    pub fn of(state: &WalkerState, profile: &CoinProfile) -> Result<Self> {
        let lab = state.to_frame(profile, Frame::Lab)?;
        let primed = state.to_frame(profile, Frame::Primed)?;
        let split = |s: &WalkerState| {
            s.amplitudes()
                .iter()
                .map(|a| [a[0].norm_sqr(), a[1].norm_sqr()])
                .collect::<Vec<_>>()
        };
        Ok(Self {
            step: state.step_count(),
            sites: state.lattice().sites().collect(),
            lab: split(&lab),
            primed: split(&primed),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: WalkerState,
    /// One entry per step `0..=t` when recording, empty otherwise.
    pub histograms: Vec<Histogram>,
}

/// Apply `steps` successive steps.
pub fn evolve(
    state: &WalkerState,
    profile: &CoinProfile,
    steps: usize,
    record: bool,
) -> Result<Trajectory> {
    state.check_profile(profile)?;
    state.require_lab()?;
    let coins: Vec<Mat2> = profile.angles().iter().map(|&phi| coin(phi)).collect();
    let mut scratch = Vec::with_capacity(coins.len());
    let mut current = state.clone();
    let mut histograms = Vec::new();
    if record {
        histograms.reserve(steps + 1);
        histograms.push(Histogram::of(&current, profile)?);
    }
    for _ in 0..steps {
        current.step_with(&coins, &mut scratch)?;
        if record {
            histograms.push(Histogram::of(&current, profile)?);
        }
    }
    Ok(Trajectory {
        final_state: current,
        histograms,
    })
}

fn shift_into(amps: &[Vec2], out: &mut [Vec2]) {
    let n = amps.len();
    for (i, a) in amps.iter().enumerate() {
        // boundary sites are empty on a segment, so wrapping never fires there
        out[(i + 1) % n][0] = a[0];
        out[(i + n - 1) % n][1] = a[1];
    }
}

/// Dense `2N × 2N` one-step matrix on a ring, `site ⊗ coin` ordering.
pub fn step_matrix(profile: &CoinProfile) -> Result<DMatrix<C64>> {
    let lattice = profile.lattice();
    if !lattice.is_ring() {
        return Err(Error::NotARing);
    }
    let n = lattice.len();
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    for (i, &phi) in profile.angles().iter().enumerate() {
        let c = coin(phi);
        let right = (i + 1) % n;
        let left = (i + n - 1) % n;
        for col in 0..2 {
            u[(2 * right, 2 * i + col)] += c[(0, col)];
            u[(2 * left + 1, 2 * i + col)] += c[(1, col)];
        }
    }
    Ok(u)
}

/// Block-diagonal lab-to-primed transform, `site ⊗ coin` ordering.
pub fn frame_matrix(profile: &CoinProfile) -> DMatrix<C64> {
    let n = profile.lattice().len();
    let mut t = DMatrix::zeros(2 * n, 2 * n);
    for (i, &phi) in profile.angles().iter().enumerate() {
        t.fixed_view_mut::<2, 2>(2 * i, 2 * i)
            .copy_from(&lab_to_primed(phi));
    }
    t
}
