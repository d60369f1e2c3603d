use susywalk::bloch::{band_structure, uniform_k_grid, winding_numbers, WindingReport};
use susywalk::experiment::{
    angle_grid, input_polarization, long_time_extrapolation, max_trappable_intensity,
    measure_bases, qwp_scan, site_pair, tomography, BasisIntensities, IntensityNoise, Stokes,
    INJECTION_SITE,
};
use susywalk::midgap::{default_tolerance, find_midgap, full_spectrum, ring_with_interfaces};
use susywalk::walk::{evolve, CoinProfile, Frame, Lattice, ProfileDescriptor, WalkerState};
use toml::{Table, Value};

use crate::config::{ConfigKind, Settings};
use crate::output::{Cell, Output, TableData};
use crate::CliError;

pub const DEFAULT_WALK_STEPS: usize = 13;
pub const DEFAULT_TOMO_STEPS: usize = 17;
pub const DEFAULT_BAND_RESOLUTION: usize = 512;
pub const DEFAULT_WINDING_RESOLUTION: usize = 1024;
pub const DEFAULT_RING: usize = 40;

fn descriptor(s: &Settings, interfaces: Vec<i64>) -> ProfileDescriptor {
    match s.configuration {
        ConfigKind::Bulk => ProfileDescriptor::Bulk { phi1: s.phi1, phi2: s.phi2 },
        ConfigKind::Interface => ProfileDescriptor::Interface {
            phi1: s.phi1,
            phi2: s.phi2,
            interfaces,
        },
    }
}

/// Profile for a walk of `steps` steps: a segment wide enough never to be
/// reached, or the configured ring with antipodal interfaces.
fn walk_profile(s: &Settings, steps: usize) -> Result<CoinProfile, CliError> {
    Ok(match s.ring {
        None => CoinProfile::for_walk(descriptor(s, vec![1]), s.input_site, steps)?,
        Some(n) => {
            let lattice = Lattice::ring(n)?;
            CoinProfile::new(descriptor(s, vec![1, 1 + n as i64 / 2]), lattice)?
        }
    })
}

fn config_name(s: &Settings) -> &'static str {
    match s.configuration {
        ConfigKind::Bulk => "bulk",
        ConfigKind::Interface => "interface",
    }
}

fn base_summary(command: &str, s: &Settings) -> Table {
    let mut t = Table::new();
    t.insert("command".into(), command.into());
    t.insert("phi1".into(), s.phi1.into());
    t.insert("phi2".into(), s.phi2.into());
    t
}

fn int(x: usize) -> Value {
    Value::Integer(x as i64)
}

pub fn evolve_cmd(s: &Settings) -> Result<Output, CliError> {
    let steps = s.steps.unwrap_or(DEFAULT_WALK_STEPS);
    let profile = walk_profile(s, steps)?;
    let start = WalkerState::localized(
        profile.lattice().clone(),
        s.input_site,
        input_polarization(&s.plates),
    )?;
    let traj = evolve(&start, &profile, steps, true)?;

    let mut table = TableData::new(&["step", "site", "p_h", "p_v", "p_h_primed", "p_v_primed"]);
    let n = profile.lattice().len();
    let mut column = vec![0.0; n];
    let mut drift: f64 = 0.0;
    for h in &traj.histograms {
        let mut total = 0.0;
        for i in 0..n {
            let (lab, primed) = (h.lab[i], h.primed[i]);
            table.push(vec![
                Cell::Int(h.step as i64),
                Cell::Int(h.sites[i]),
                Cell::Float(lab[0]),
                Cell::Float(lab[1]),
                Cell::Float(primed[0]),
                Cell::Float(primed[1]),
            ]);
            column[i] += lab[0] + lab[1];
            total += lab[0] + lab[1];
        }
        drift = drift.max((total - 1.0).abs());
    }
    let heaviest = (0..n).fold(0, |best, i| if column[i] > column[best] { i } else { best });
    let rows = traj.histograms.len() as f64;
    let pair_weight: f64 = [0, 1]
        .iter()
        .filter_map(|&x| profile.lattice().index_of(x))
        .map(|i| column[i])
        .sum::<f64>()
        / rows;

    let mut summary = base_summary("evolve", s);
    summary.insert("configuration".into(), config_name(s).into());
    summary.insert("lattice".into(), profile.lattice().to_string().into());
    summary.insert("steps".into(), int(steps));
    summary.insert("input_site".into(), s.input_site.into());
    summary.insert("rows".into(), int(table.rows.len()));
    summary.insert("max_norm_drift".into(), drift.into());
    summary.insert("heaviest_site".into(), profile.lattice().site(heaviest).into());
    summary.insert("heaviest_column_mean".into(), (column[heaviest] / rows).into());
    summary.insert("interface_pair_mean".into(), pair_weight.into());
    Ok(Output::with_table(table, summary))
}

pub fn bands_cmd(s: &Settings) -> Result<Output, CliError> {
    let resolution = s.resolution.unwrap_or(DEFAULT_BAND_RESOLUTION);
    let bands = band_structure(s.phi1, s.phi2, &uniform_k_grid(resolution))?;
    let mut table = TableData::new(&[
        "k",
        "eps1",
        "eps2",
        "eps3",
        "eps4",
        "re_lambda_sq",
        "band_residual",
    ]);
    for ik in 0..bands.len() {
        let k = bands.k_grid[ik];
        let target = susywalk::bloch::band_condition(k, s.phi1, s.phi2);
        let lams = &bands.eigenvalues[ik];
        let residual = lams
            .iter()
            .map(|l| ((l * l).re - target).abs())
            .fold(0.0, f64::max);
        let mut row = vec![Cell::Float(k)];
        row.extend(bands.quasi_energies(ik).map(Cell::Float));
        row.push(Cell::Float(target));
        row.push(Cell::Float(residual));
        table.push(row);
    }
    let gaps = bands.gaps();
    let mut summary = base_summary("bands", s);
    summary.insert("resolution".into(), int(resolution));
    summary.insert("gap_pm_one".into(), gaps.at_pm_one.into());
    summary.insert("gap_pm_i".into(), gaps.at_pm_i.into());
    summary.insert("max_band_residual".into(), bands.band_condition_residual().into());
    summary.insert("quadruple_residual".into(), bands.quadruple_residual().into());
    Ok(Output::with_table(table, summary))
}

fn winding_table(r: &WindingReport) -> Table {
    let mut t = Table::new();
    t.insert("phi1".into(), r.phi1.into());
    t.insert("phi2".into(), r.phi2.into());
    t.insert("windings".into(), windings_value(&r.windings));
    t.insert("max_residual".into(), r.max_residual().into());
    t.insert(
        "quasi_energies_at_zero".into(),
        Value::Array(r.quasi_energies_at_zero.iter().map(|&e| e.into()).collect()),
    );
    t.insert("gap_pm_one".into(), r.gaps.at_pm_one.into());
    t.insert("gap_pm_i".into(), r.gaps.at_pm_i.into());
    t
}

fn windings_value(w: &[[i64; 3]; 4]) -> Value {
    Value::Array(
        w.iter()
            .map(|band| Value::Array(band.iter().map(|&x| Value::Integer(x)).collect()))
            .collect(),
    )
}

pub fn winding_cmd(s: &Settings) -> Result<Output, CliError> {
    let resolution = s.resolution.unwrap_or(DEFAULT_WINDING_RESOLUTION);
    let forward = winding_numbers(s.phi1, s.phi2, resolution)?;
    let swapped = winding_numbers(s.phi2, s.phi1, resolution)?;
    let diff = forward.difference(&swapped);

    let mut summary = base_summary("winding", s);
    summary.insert("resolution".into(), int(resolution));
    summary.insert(
        "distinct".into(),
        diff.iter().flatten().any(|d| *d != 0).into(),
    );
    summary.insert("difference".into(), windings_value(&diff));
    summary.insert("forward".into(), Value::Table(winding_table(&forward)));
    summary.insert("swapped".into(), Value::Table(winding_table(&swapped)));
    Ok(Output::report(summary))
}

pub fn midgap_cmd(s: &Settings) -> Result<Output, CliError> {
    let n = s.ring.unwrap_or(DEFAULT_RING);
    let profile = ring_with_interfaces(n, s.phi1, s.phi2)?;
    let spec = full_spectrum(&profile)?;
    let states = if profile.is_topologically_trivial() {
        Vec::new()
    } else {
        let tol = match s.tolerance {
            Some(t) => t,
            None => default_tolerance(s.phi1, s.phi2)?,
        };
        find_midgap(&spec, tol)?
    };

    let mut table = TableData::new(&[
        "state",
        "eigenvalue_re",
        "eigenvalue_im",
        "site",
        "probability",
        "s1",
        "s2",
        "s3",
    ]);
    let mut listed = Vec::new();
    for (j, st) in states.iter().enumerate() {
        let probs = st.site_probabilities();
        for (i, x) in profile.lattice().sites().enumerate() {
            let mut row = vec![
                Cell::Int(j as i64),
                Cell::Float(st.eigenvalue.re),
                Cell::Float(st.eigenvalue.im),
                Cell::Int(x),
                Cell::Float(probs[i]),
            ];
            if probs[i] < susywalk::midgap::MIN_SITE_PROBABILITY {
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
            } else {
                let pol = match s.frame {
                    Frame::Primed => st.polarization(&profile, x)?,
                    Frame::Lab => {
                        let pair = susywalk::linalg::Vec2::new(
                            st.amplitudes[2 * i],
                            st.amplitudes[2 * i + 1],
                        );
                        Stokes::of_pair(&pair).normalized()
                    }
                };
                row.extend(pol.map(Cell::Float));
            }
            table.push(row);
        }
        let mut t = Table::new();
        t.insert("eigenvalue_re".into(), st.eigenvalue.re.into());
        t.insert("eigenvalue_im".into(), st.eigenvalue.im.into());
        t.insert("anomaly".into(), st.anomaly.into());
        t.insert("center".into(), st.center.into());
        t.insert("decay_length".into(), st.decay_length.into());
        t.insert("fit_r_squared".into(), st.fit_r_squared.into());
        listed.push(Value::Table(t));
    }

    let mut summary = base_summary("midgap", s);
    summary.insert("sites".into(), int(n));
    summary.insert("frame".into(), s.frame.name().into());
    summary.insert("trivial".into(), profile.is_topologically_trivial().into());
    summary.insert("count".into(), int(states.len()));
    summary.insert("unitarity_residual".into(), spec.unitarity_residual.into());
    summary.insert("states".into(), Value::Array(listed));
    Ok(Output::with_table(table, summary))
}

pub fn scan_cmd(s: &Settings) -> Result<Output, CliError> {
    if s.input_site != INJECTION_SITE {
        return Err(CliError::Config(format!(
            "scan injects at site {INJECTION_SITE}; input_site = {} is not supported",
            s.input_site
        )));
    }
    let steps = s.steps.unwrap_or(DEFAULT_WALK_STEPS);
    let probe = s.probe.unwrap_or_else(|| susywalk::experiment::interface_probe(steps));
    let grid = angle_grid(s.scan_points);
    let iface = ProfileDescriptor::single_interface(s.phi1, s.phi2);
    let bulk = ProfileDescriptor::Bulk { phi1: s.phi1, phi2: s.phi2 };

    let curves = [
        qwp_scan(&iface, steps, probe, &grid)?,
        qwp_scan(&bulk, steps, probe, &grid)?,
        long_time_extrapolation(&iface, s.long_steps, &grid)?,
        long_time_extrapolation(&bulk, s.long_steps, &grid)?,
    ];
    let mut table = TableData::new(&[
        "angle_deg",
        "interface",
        "bulk",
        "interface_long",
        "bulk_long",
    ]);
    for (j, &angle) in grid.iter().enumerate() {
        let mut row = vec![Cell::Float(angle)];
        row.extend(curves.iter().map(|c| Cell::Float(c.intensity[j])));
        table.push(row);
    }

    let mut summary = base_summary("scan", s);
    summary.insert("steps".into(), int(steps));
    summary.insert("probe".into(), probe.into());
    summary.insert("points".into(), int(grid.len()));
    for (name, c) in [("interface", &curves[0]), ("bulk", &curves[1])] {
        summary.insert(format!("{name}_max"), c.max().into());
        summary.insert(format!("{name}_min"), c.min().into());
        summary.insert(format!("{name}_range"), c.range().into());
    }
    summary.insert(
        "interface_bound".into(),
        max_trappable_intensity(&iface, steps, probe)?.into(),
    );
    summary.insert("long_steps".into(), int(s.long_steps));
    summary.insert("long_probe".into(), curves[2].probe.into());
    summary.insert("interface_long_range".into(), curves[2].range().into());
    summary.insert("bulk_long_range".into(), curves[3].range().into());
    Ok(Output::with_table(table, summary))
}

pub fn tomo_cmd(s: &Settings) -> Result<Output, CliError> {
    let steps = s.steps.unwrap_or(DEFAULT_TOMO_STEPS);
    // after an odd number of steps the walker sits one sublattice over
    let probe = s.probe.unwrap_or(s.input_site - (steps % 2) as i64);
    let profile = walk_profile(s, steps)?;
    let start = WalkerState::localized(
        profile.lattice().clone(),
        s.input_site,
        input_polarization(&s.plates),
    )?;
    let end = evolve(&start, &profile, steps, false)?.final_state;
    let phi = profile.angle_at(probe).ok_or_else(|| {
        CliError::Config(format!("probe site {probe} is not on {}", profile.lattice()))
    })?;

    let measured_frame = s.frame;
    let clean: BasisIntensities = measure_bases(&end, probe, measured_frame, &profile)?;
    let noise = IntensityNoise { relative: s.noise, seed: s.seed };
    let measured = noise.apply(&clean);
    let tomo = tomography(&measured, measured_frame, probe, steps)?;

    let mut table = TableData::new(&[
        "frame",
        "site",
        "step",
        "rho00_re",
        "rho00_im",
        "rho01_re",
        "rho01_im",
        "rho10_re",
        "rho10_im",
        "rho11_re",
        "rho11_im",
        "amp_h",
        "amp_v",
        "phase_over_pi",
        "fidelity",
    ]);
    let mut measured_row = None;
    for frame in [Frame::Lab, Frame::Primed] {
        let rho = tomo.rho.to_frame(phi, frame);
        let direct = site_pair(&end, &profile, probe, frame)?;
        let ap = rho.amplitude_phase();
        let fidelity = rho.fidelity_with(&direct);
        let mut row = vec![
            Cell::Text(frame.name().into()),
            Cell::Int(probe),
            Cell::Int(steps as i64),
        ];
        for r in 0..2 {
            for c in 0..2 {
                row.push(Cell::Float(rho.matrix[(r, c)].re));
                row.push(Cell::Float(rho.matrix[(r, c)].im));
            }
        }
        row.extend([
            Cell::Float(ap.amp_h),
            Cell::Float(ap.amp_v),
            Cell::Float(ap.phase_over_pi),
            Cell::Float(fidelity),
        ]);
        table.push(row);
        if frame == measured_frame {
            measured_row = Some((ap, fidelity));
        }
    }
    let (ap, fidelity) = measured_row.expect("measured frame is listed");

    let mut summary = base_summary("tomo", s);
    summary.insert("configuration".into(), config_name(s).into());
    summary.insert("steps".into(), int(steps));
    summary.insert("site".into(), probe.into());
    summary.insert("measured_frame".into(), measured_frame.name().into());
    summary.insert("noise".into(), s.noise.into());
    summary.insert(
        "seed".into(),
        i64::try_from(s.seed).map_or_else(|_| s.seed.to_string().into(), Value::Integer),
    );
    summary.insert("site_probability".into(), clean.totals()[0].into());
    summary.insert("completeness_residual".into(), measured.completeness_residual().into());
    summary.insert("clipped".into(), tomo.clipped.into());
    summary.insert("amp_h".into(), ap.amp_h.into());
    summary.insert("amp_v".into(), ap.amp_v.into());
    summary.insert("phase_over_pi".into(), ap.phase_over_pi.into());
    summary.insert("fidelity".into(), fidelity.into());
    Ok(Output::with_table(table, summary))
}
