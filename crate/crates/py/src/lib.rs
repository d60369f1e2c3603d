//! Python bindings: coin profiles, walker states and the main analyses.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use susywalk::bloch::{self, BlochFrame};
use susywalk::experiment::{self, PlateKind, Waveplate};
use susywalk::linalg::Vec2;
use susywalk::midgap;
use susywalk::walk::{self, Frame, ProfileDescriptor};
use susywalk::{Error, C64};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::EigenFailure { .. } | Error::GapClosed { .. } | Error::SymmetryViolation { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_frame(name: &str) -> PyResult<Frame> {
    match name {
        "lab" => Ok(Frame::Lab),
        "primed" => Ok(Frame::Primed),
        _ => Err(PyValueError::new_err(format!("unknown frame `{name}`"))),
    }
}

fn parse_plates(plates: Vec<(String, f64)>) -> PyResult<Vec<Waveplate>> {
    plates
        .into_iter()
        .map(|(kind, deg)| match kind.as_str() {
            "quarter" => Ok(Waveplate { kind: PlateKind::Quarter, angle_deg: deg }),
            "half" => Ok(Waveplate { kind: PlateKind::Half, angle_deg: deg }),
            _ => Err(PyValueError::new_err(format!("unknown plate `{kind}`"))),
        })
        .collect()
}

/// Site-resolved coin angles on a lattice.
#[pyclass(name = "CoinProfile", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCoinProfile {
    inner: walk::CoinProfile,
}

#[pymethods]
impl PyCoinProfile {
    /// Single interface at `x = 0 | 1`, on a segment wide enough for `steps` steps from `x0`.
    #[staticmethod]
    #[pyo3(signature = (phi1, phi2, steps, x0=1))]
    fn interface(phi1: f64, phi2: f64, steps: usize, x0: i64) -> PyResult<Self> {
        let d = ProfileDescriptor::single_interface(phi1, phi2);
        let inner = walk::CoinProfile::for_walk(d, x0, steps).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (phi1, phi2, steps, x0=1))]
    fn bulk(phi1: f64, phi2: f64, steps: usize, x0: i64) -> PyResult<Self> {
        let d = ProfileDescriptor::Bulk { phi1, phi2 };
        let inner = walk::CoinProfile::for_walk(d, x0, steps).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Ring of `n` sites with antipodal interfaces.
    #[staticmethod]
    fn ring(n: usize, phi1: f64, phi2: f64) -> PyResult<Self> {
        let inner = midgap::ring_with_interfaces(n, phi1, phi2).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn sites(&self) -> Vec<i64> {
        self.inner.lattice().sites().collect()
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        self.inner.angles().to_vec()
    }

    #[getter]
    fn is_ring(&self) -> bool {
        self.inner.lattice().is_ring()
    }

    fn is_topologically_trivial(&self) -> bool {
        self.inner.is_topologically_trivial()
    }

    fn __len__(&self) -> usize {
        self.inner.lattice().len()
    }

    fn __repr__(&self) -> String {
        format!("CoinProfile({})", self.inner.lattice())
    }
}

/// Walker amplitudes over `(site, polarization)`.
#[pyclass(name = "WalkerState", skip_from_py_object)]
#[derive(Clone)]
struct PyWalkerState {
    inner: walk::WalkerState,
}

#[pymethods]
impl PyWalkerState {
    /// Walker at site `x` with polarization prepared by `plates`
    /// (list of `("quarter" | "half", angle_deg)`), starting from `|H⟩`.
    #[staticmethod]
    #[pyo3(signature = (profile, x=1, plates=Vec::new()))]
    fn localized(profile: &PyCoinProfile, x: i64, plates: Vec<(String, f64)>) -> PyResult<Self> {
        let plates = parse_plates(plates)?;
        let inner = experiment::prepare_input(profile.inner.lattice().clone(), x, &plates)
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_amplitudes(profile: &PyCoinProfile, amplitudes: Vec<C64>) -> PyResult<Self> {
        let inner =
            walk::WalkerState::from_flat(profile.inner.lattice().clone(), &amplitudes, Frame::Lab)
                .map_err(to_py)?;
        Ok(Self { inner })
    }

    fn step(&mut self, profile: &PyCoinProfile) -> PyResult<()> {
        self.inner = self.inner.step(&profile.inner).map_err(to_py)?;
        Ok(())
    }

    fn evolve(&mut self, profile: &PyCoinProfile, steps: usize) -> PyResult<()> {
        self.inner = walk::evolve(&self.inner, &profile.inner, steps, false)
            .map_err(to_py)?
            .final_state;
        Ok(())
    }

    /// Amplitudes in the given frame, flattened as `[ψ(x₀,H), ψ(x₀,V), ...]`.
    #[pyo3(signature = (profile, frame="lab"))]
    fn amplitudes(&self, profile: &PyCoinProfile, frame: &str) -> PyResult<Vec<C64>> {
        Ok(self
            .inner
            .to_frame(&profile.inner, parse_frame(frame)?)
            .map_err(to_py)?
            .to_flat())
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    fn site_probability(&self, x: i64) -> f64 {
        self.inner.site_probability(x)
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    #[getter]
    fn step_count(&self) -> usize {
        self.inner.step_count()
    }

    /// Six-basis intensities and the reconstructed density matrix at `x`.
    #[pyo3(signature = (profile, x, frame="primed"))]
    fn tomography<'py>(
        &self,
        py: Python<'py>,
        profile: &PyCoinProfile,
        x: i64,
        frame: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let frame = parse_frame(frame)?;
        let meas = experiment::measure_bases(&self.inner, x, frame, &profile.inner).map_err(to_py)?;
        let tomo = experiment::tomography(&meas, frame, x, self.inner.step_count()).map_err(to_py)?;
        let m = tomo.rho.matrix;
        let ap = tomo.rho.amplitude_phase();
        let d = PyDict::new(py);
        d.set_item("intensities", [meas.h, meas.v, meas.d, meas.a, meas.r, meas.l])?;
        d.set_item("rho", [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])?;
        d.set_item("amp_h", ap.amp_h)?;
        d.set_item("amp_v", ap.amp_v)?;
        d.set_item("phase_over_pi", ap.phase_over_pi)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "WalkerState(step={}, lattice={})",
            self.inner.step_count(),
            self.inner.lattice()
        )
    }
}

/// 4×4 Bloch operator `u(k)` (or `u′(k)` with `primed=True`) as nested lists.
#[pyfunction]
#[pyo3(signature = (k, phi1, phi2, primed=false))]
fn bloch_operator(k: f64, phi1: f64, phi2: f64, primed: bool) -> Vec<Vec<C64>> {
    let frame = if primed { BlochFrame::Primed } else { BlochFrame::Original };
    let m = bloch::bloch_operator(k, phi1, phi2, frame).matrix;
    (0..4).map(|r| (0..4).map(|c| m[(r, c)]).collect()).collect()
}

/// `(chiral, susy)` residuals at one `k`.
#[pyfunction]
fn symmetry_residuals(k: f64, phi1: f64, phi2: f64) -> (f64, f64) {
    let r = bloch::check_symmetries(&bloch::bloch_operator(k, phi1, phi2, BlochFrame::Original));
    (r.chiral, r.susy)
}

/// `(k, quasi_energies)` over a uniform grid.
#[pyfunction]
#[pyo3(signature = (phi1, phi2, resolution=512))]
fn band_structure(phi1: f64, phi2: f64, resolution: usize) -> PyResult<(Vec<f64>, Vec<[f64; 4]>)> {
    let b = bloch::band_structure(phi1, phi2, &bloch::uniform_k_grid(resolution)).map_err(to_py)?;
    let eps = (0..b.len()).map(|i| b.quasi_energies(i)).collect();
    Ok((b.k_grid, eps))
}

/// `(gap at ±1, gap at ±i)` in quasi-energy.
#[pyfunction]
#[pyo3(signature = (phi1, phi2, resolution=512))]
fn gap_sizes(phi1: f64, phi2: f64, resolution: usize) -> PyResult<(f64, f64)> {
    let g = bloch::gap_sizes(phi1, phi2, resolution).map_err(to_py)?;
    Ok((g.at_pm_one, g.at_pm_i))
}

/// Per-band `[w_α, w_β, w_γ]` and the largest rounding residual.
#[pyfunction]
#[pyo3(signature = (phi1, phi2, resolution=1024))]
fn winding_numbers(phi1: f64, phi2: f64, resolution: usize) -> PyResult<(Vec<[i64; 3]>, f64)> {
    let r = bloch::winding_numbers(phi1, phi2, resolution).map_err(to_py)?;
    Ok((r.windings.to_vec(), r.max_residual()))
}

/// Midgap states of a two-interface ring, each as a dict.
#[pyfunction]
#[pyo3(signature = (n, phi1, phi2, tol=None))]
fn midgap_states<'py>(
    py: Python<'py>,
    n: usize,
    phi1: f64,
    phi2: f64,
    tol: Option<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let profile = midgap::ring_with_interfaces(n, phi1, phi2).map_err(to_py)?;
    let spec = midgap::full_spectrum(&profile).map_err(to_py)?;
    if profile.is_topologically_trivial() {
        return Ok(Vec::new());
    }
    let tol = match tol {
        Some(t) => t,
        None => midgap::default_tolerance(phi1, phi2).map_err(to_py)?,
    };
    let states = midgap::find_midgap(&spec, tol).map_err(to_py)?;
    states
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("eigenvalue", s.eigenvalue)?;
            d.set_item("anomaly", s.anomaly)?;
            d.set_item("center", s.center)?;
            d.set_item("decay_length", s.decay_length)?;
            d.set_item("fit_r_squared", s.fit_r_squared)?;
            d.set_item("probabilities", s.site_probabilities())?;
            Ok(d)
        })
        .collect()
}

/// Trapped intensity at `probe` versus input quarter-wave-plate angle.
#[pyfunction]
#[pyo3(signature = (phi1, phi2, steps=13, probe=None, points=180, interface=true))]
fn qwp_scan(
    phi1: f64,
    phi2: f64,
    steps: usize,
    probe: Option<i64>,
    points: usize,
    interface: bool,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let d = if interface {
        ProfileDescriptor::single_interface(phi1, phi2)
    } else {
        ProfileDescriptor::Bulk { phi1, phi2 }
    };
    let probe = probe.unwrap_or_else(|| experiment::interface_probe(steps));
    let curve = experiment::qwp_scan(&d, steps, probe, &experiment::angle_grid(points))
        .map_err(to_py)?;
    Ok((curve.angles_deg, curve.intensity))
}

/// Input polarization `(H, V)` after the given plates act on `|H⟩`.
#[pyfunction]
fn input_polarization(plates: Vec<(String, f64)>) -> PyResult<(C64, C64)> {
    let v: Vec2 = experiment::input_polarization(&parse_plates(plates)?);
    Ok((v[0], v[1]))
}

#[pymodule]
#[pyo3(name = "susywalk")]
fn susywalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoinProfile>()?;
    m.add_class::<PyWalkerState>()?;
    m.add_function(wrap_pyfunction!(bloch_operator, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(band_structure, m)?)?;
    m.add_function(wrap_pyfunction!(gap_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(winding_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(midgap_states, m)?)?;
    m.add_function(wrap_pyfunction!(qwp_scan, m)?)?;
    m.add_function(wrap_pyfunction!(input_polarization, m)?)?;
    Ok(())
}
