"""Smoke test for the susywalk extension module.

Build first, e.g. ``maturin develop -m crates/py/Cargo.toml``, then run
``python python/smoke_test.py``.
"""

import cmath
import math

import susywalk

PHI1, PHI2 = 1.29, 0.17


def check(cond, msg):
    if not cond:
        raise SystemExit(f"FAIL: {msg}")
    print(f"ok: {msg}")


def main():
    u = susywalk.bloch_operator(0.3, PHI1, PHI2)
    check(len(u) == 4 and all(len(r) == 4 for r in u), "bloch operator is 4x4")
    chiral, susy = susywalk.symmetry_residuals(0.3, PHI1, PHI2)
    check(max(chiral, susy) < 1e-12, "symmetry residuals vanish")

    k, eps = susywalk.band_structure(PHI1, PHI2, 64)
    check(len(k) == 64 and len(eps[0]) == 4, "band structure shape")
    gap_one, gap_i = susywalk.gap_sizes(PHI1, PHI2)
    check(gap_one > 0 and gap_i > 0, "both gaps open")

    forward, _ = susywalk.winding_numbers(PHI1, PHI2)
    swapped, _ = susywalk.winding_numbers(PHI2, PHI1)
    check(forward != swapped, "swapped angles change the windings")

    profile = susywalk.CoinProfile.interface(PHI1, PHI2, 17)
    state = susywalk.WalkerState.localized(profile, 1)
    state.evolve(profile, 17)
    check(abs(state.norm_sqr() - 1) < 1e-12, "norm conserved")
    tomo = state.tomography(profile, 0)
    check(abs(tomo["phase_over_pi"] - 0.5) < 0.05, "interface state phase near pi/2")

    states = susywalk.midgap_states(40, PHI1, PHI2)
    check(len(states) == 4, "four midgap states on the ring")
    check(all(abs(abs(s["eigenvalue"].imag) - 1) < 1e-9 for s in states), "eigenvalues at +-i")

    angles, iface = susywalk.qwp_scan(PHI1, PHI2, points=90)
    _, flat = susywalk.qwp_scan(PHI1, PHI2, points=90, interface=False)
    check(max(iface) - min(iface) > max(flat) - min(flat), "interface contrast exceeds bulk")

    h, v = susywalk.input_polarization([("quarter", 45.0)])
    check(math.isclose(abs(h), abs(v), rel_tol=1e-12), "quarter plate at 45 deg gives circular light")
    check(abs(cmath.phase(v / h)) > 1.5, "circular phase")

    try:
        susywalk.CoinProfile.ring(41, PHI1, PHI2)
    except ValueError:
        print("ok: odd ring rejected")
    else:
        raise SystemExit("FAIL: odd ring accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
