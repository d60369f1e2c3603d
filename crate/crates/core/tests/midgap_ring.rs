use susywalk::bloch::{band_structure, uniform_k_grid};
use susywalk::midgap::{
    default_tolerance, distance_to_pm_i, find_midgap, full_spectrum, ring_with_interfaces,
    site_polarization, symmetry_expectations,
};
use susywalk::walk::{CoinProfile, Lattice, ProfileDescriptor};
use susywalk::C64;

fn bulk_ring(n: usize, phi1: f64, phi2: f64) -> CoinProfile {
    CoinProfile::new(ProfileDescriptor::Bulk { phi1, phi2 }, Lattice::ring(n).unwrap()).unwrap()
}

#[test]
fn pure_shift_ring_spectrum() {
    // with φ = 0 the coin is the identity: H moves right, V moves left, so
    // the spectrum is e^{∓2πim/4} for m = 0..3, each once per coin state
    let p = CoinProfile::new(ProfileDescriptor::Uniform { phi: 0.0 }, Lattice::ring(4).unwrap())
        .unwrap();
    let spec = full_spectrum(&p).unwrap();
    let mut expected: Vec<C64> = Vec::new();
    for m in 0..4 {
        let theta = std::f64::consts::TAU * m as f64 / 4.0;
        expected.push(C64::from_polar(1.0, -theta));
        expected.push(C64::from_polar(1.0, theta));
    }
    let mut got = spec.eigenvalues.clone();
    for e in &expected {
        let j = got
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - e).norm().total_cmp(&(b.1 - e).norm()))
            .unwrap()
            .0;
        assert!((got[j] - e).norm() < 1e-12, "{e} missing");
        got.swap_remove(j);
    }
}

#[test]
fn gapped_bulk_ring_has_nothing_near_pm_i() {
    let spec = full_spectrum(&bulk_ring(40, 1.29, 0.17)).unwrap();
    let closest = spec
        .eigenvalues
        .iter()
        .map(|l| distance_to_pm_i(*l))
        .fold(f64::INFINITY, f64::min);
    assert!(closest > 0.05, "closest {closest}");

    // compare with the Bloch bands on the matching 20-cell grid
    let bands = band_structure(1.29, 0.17, &uniform_k_grid(20)).unwrap();
    let bloch_closest = bands
        .eigenvalues
        .iter()
        .flatten()
        .map(|l| distance_to_pm_i(*l))
        .fold(f64::INFINITY, f64::min);
    assert!((closest - bloch_closest).abs() < 1e-9);
}

#[test]
fn spectrum_is_on_unit_circle() {
    let spec = full_spectrum(&ring_with_interfaces(40, 1.29, 0.17).unwrap()).unwrap();
    assert!(spec.unitarity_residual < 1e-12);
    assert_eq!(spec.len(), 80);
    let v = &spec.eigenvectors;
    let gram = v.adjoint() * v;
    for r in 0..80 {
        for c in 0..80 {
            let t = if r == c { 1.0 } else { 0.0 };
            assert!((gram[(r, c)] - C64::new(t, 0.0)).norm() < 1e-10);
        }
    }
}

#[test]
fn four_midgap_states_at_the_two_interfaces() {
    let p = ring_with_interfaces(40, 1.29, 0.17).unwrap();
    let spec = full_spectrum(&p).unwrap();
    assert_eq!(spec.count_near_pm_i(1e-6), 4);
    let states = find_midgap(&spec, default_tolerance(1.29, 0.17).unwrap()).unwrap();
    assert_eq!(states.len(), 4);
    let plus = states.iter().filter(|s| s.eigenvalue.im > 0.0).count();
    assert_eq!(plus, 2);

    let mut centers: Vec<i64> = states.iter().map(|s| s.center).collect();
    centers.sort();
    // each interface lies between two equal-angle neighbours: 0|1 and 20|21
    for c in &centers {
        let near_first = (c - 0).abs() <= 1 || (c - 1).abs() <= 1;
        let near_second = (c - 20).abs() <= 1 || (c - 21).abs() <= 1;
        assert!(near_first || near_second, "center {c}");
    }
    assert_eq!(centers.iter().filter(|c| **c <= 2).count(), 2);
}

#[test]
fn anomaly_sign_is_tied_to_the_interface_type() {
    let p = ring_with_interfaces(40, 1.29, 0.17).unwrap();
    let spec = full_spectrum(&p).unwrap();
    let states = find_midgap(&spec, 1e-6).unwrap();
    for s in &states {
        let e = symmetry_expectations(&s.amplitudes, &p).unwrap();
        assert!((e.anomaly.abs() - 1.0).abs() < 1e-3, "anomaly {}", e.anomaly);
        assert!((e.anomaly - s.anomaly).abs() < 1e-10);
        // φ₁ on both sides of the junction gives −1
        let at_phi1_junction = s.center <= 2;
        let expected = if at_phi1_junction { -1.0 } else { 1.0 };
        assert!((e.anomaly - expected).abs() < 1e-3);
    }
}

#[test]
fn midgap_polarization_alternates_with_parity() {
    let p = ring_with_interfaces(40, 1.29, 0.17).unwrap();
    let spec = full_spectrum(&p).unwrap();
    for s in find_midgap(&spec, 1e-6).unwrap() {
        let probs = s.site_probabilities();
        let mut checked = 0;
        for (i, x) in p.lattice().sites().enumerate() {
            if probs[i] < 1e-10 {
                continue;
            }
            let st = site_polarization(&s.amplitudes, &p, x).unwrap();
            let even = x.rem_euclid(2) == 0;
            // S₃ on even sites equals −⟨Σzσy⟩
            let want = if even { -s.anomaly } else { s.anomaly };
            assert!((st[2] - want).abs() < 1e-3, "x={x} s3={}", st[2]);
            checked += 1;
        }
        assert!(checked > 4);
    }
}

#[test]
fn bulk_eigenstates_carry_no_anomaly() {
    let p = ring_with_interfaces(40, 1.29, 0.17).unwrap();
    let spec = full_spectrum(&p).unwrap();
    for j in 0..spec.len() {
        let lambda = spec.eigenvalues[j];
        if distance_to_pm_i(lambda) < 1e-6 {
            continue;
        }
        let e = symmetry_expectations(&spec.state(j), &p).unwrap();
        assert!(e.anomaly.abs() < 1e-8, "λ={lambda} anomaly {}", e.anomaly);
        let away = (lambda - 1.0).norm() > 1e-6 && (lambda + 1.0).norm() > 1e-6;
        if away {
            assert!(e.sigma_y.abs() < 1e-8, "λ={lambda} σy {}", e.sigma_y);
            assert!(e.sublattice.abs() < 1e-8, "λ={lambda} Σz {}", e.sublattice);
        }
    }
}

#[test]
fn trivial_ring_reports_no_states() {
    let p = ring_with_interfaces(40, 0.7, 0.7).unwrap();
    let spec = full_spectrum(&p).unwrap();
    assert!(find_midgap(&spec, 1e-6).unwrap().is_empty());
}

#[test]
fn larger_gap_localizes_tighter() {
    let xi = |phi2: f64| {
        let p = ring_with_interfaces(60, 1.29, phi2).unwrap();
        let spec = full_spectrum(&p).unwrap();
        let states = find_midgap(&spec, default_tolerance(1.29, phi2).unwrap()).unwrap();
        assert_eq!(states.len(), 4);
        for s in &states {
            assert!(s.decay_length.is_finite() && s.decay_length > 0.0);
            assert!(s.fit_r_squared > 0.99, "R² {}", s.fit_r_squared);
        }
        states.iter().map(|s| s.decay_length).fold(0.0, f64::max)
    };
    let tight = xi(0.17);
    let loose = xi(0.9);
    assert!(tight < loose, "{tight} vs {loose}");
}

#[test]
fn midgap_count_is_stable_under_ring_doubling() {
    for n in [40, 80] {
        let p = ring_with_interfaces(n, 1.29, 0.17).unwrap();
        let spec = full_spectrum(&p).unwrap();
        let states = find_midgap(&spec, 1e-6).unwrap();
        assert_eq!(states.len(), 4, "n={n}");
        // the interface states sit at ±i to numerical precision
        for s in &states {
            assert!(distance_to_pm_i(s.eigenvalue) < 1e-12);
        }
    }
}
