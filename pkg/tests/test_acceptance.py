"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line; the lines are collected into an
"acceptance criteria" section of the pytest terminal summary.
Run on its own with ``pytest tests/test_acceptance.py``.
"""

import itertools
import json
import time

import numpy as np

from lgt_ancilla import cli
from lgt_ancilla.fermions import annihilate, create
from lgt_ancilla.gauge_ops import gauge_project, gauss_residual, gauss_transform, hamiltonian_expectation
from lgt_ancilla.group import build_group
from lgt_ancilla.hilbert import StateVector, build_layout, prepare_state, random_state
from lgt_ancilla.lattice import build_lattice, rectangle_loop, shortest_path
from lgt_ancilla.oracle import meson_direct, wilson_direct
from lgt_ancilla.protocols import run_hamiltonian, run_meson, run_wilson, stator_residual
from lgt_ancilla.protocols.z2 import sigma_x_meson, sigma_x_wilson

Z2, S3 = build_group("Z2"), build_group("S3")
Z2_3x3 = build_layout(Z2, build_lattice(3, 3))
S3_PLAQ = build_layout(S3, build_lattice(2, 2))


def _mixed_state(layout, k):
    """Even k: gauge-projected random state; odd k: raw random state."""
    s = random_state(layout, k)
    return gauge_project(s) if k % 2 == 0 else s


def test_criterion_1_wilson_matches_oracle_z2(report):
    geo = Z2_3x3.geometry
    loops = [rectangle_loop(geo, (0, 0), w, h) for w, h in ((1, 1), (2, 1), (2, 2))]
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(50):
        s = _mixed_state(Z2_3x3, k)
        for loop in loops:
            worst = max(worst, run_wilson(s, loop).difference)
    ok = report("1 Wilson protocol vs oracle, Z2 3x3", worst < 1e-10,
                f"50 states x 3 loops, max |diff| = {worst:.2e}, {time.perf_counter() - t0:.0f}s")
    assert ok


def test_criterion_2_wilson_matches_oracle_s3(report):
    loop = rectangle_loop(S3_PLAQ.geometry, (0, 0), 1, 1)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(20):
        worst = max(worst, run_wilson(random_state(S3_PLAQ, 100 + k), loop).difference)
    ok = report("2 non-Abelian Wilson protocol, S3 plaquette", worst < 1e-10,
                f"20 states, max |diff| = {worst:.2e}, {time.perf_counter() - t0:.0f}s")
    assert ok


def test_criterion_3_stator_identity(report):
    z_loop = rectangle_loop(Z2_3x3.geometry, (0, 0), 2, 2)
    s_loop = rectangle_loop(S3_PLAQ.geometry, (0, 0), 1, 1)
    worst_z = max(stator_residual(random_state(Z2_3x3, 200 + k), z_loop) for k in range(10))
    worst_s = 0.0
    control = np.inf
    for k in range(10):
        s = random_state(S3_PLAQ, 300 + k)
        worst_s = max(worst_s, stator_residual(s, s_loop))
        control = min(control, stator_residual(s, s_loop, reverse=False))
    ok = report("3 stator identity", worst_z < 1e-12 and worst_s < 1e-12 and control > 0.1,
                f"Z2 max {worst_z:.2e}, S3 max {worst_s:.2e}, scrambled-order S3 min {control:.3f}")
    assert ok


def test_criterion_4_meson_matches_oracle(report):
    geo = Z2_3x3.geometry
    paths = [shortest_path(geo, (0, 0), y) for y in ((1, 0), (1, 1), (2, 1), (2, 2))]
    t0 = time.perf_counter()
    worst = {"M": 0.0, "M'": 0.0, "meson": 0.0}
    for k in range(50):
        s = _mixed_state(Z2_3x3, 400 + k)
        r = run_meson(s, paths[k % 4], "meson")
        worst["meson"] = max(worst["meson"], r.difference)
        for w in ("M", "M'"):
            worst[w] = max(worst[w], r.extras[w].difference)
    s3_path = shortest_path(S3_PLAQ.geometry, (0, 0), (1, 1))
    worst_s3 = 0.0
    for k in range(10):
        s = _mixed_state(S3_PLAQ, 500 + k)
        r = run_meson(s, s3_path, "meson")
        worst_s3 = max(worst_s3, r.difference, r.extras["M"].difference, r.extras["M'"].difference)
    z2 = max(worst.values())
    m, mp = worst["M"], worst["M'"]
    ok = report("4 meson protocol vs oracle", z2 < 1e-10 and worst_s3 < 1e-10,
                f"Z2 3x3 paths of length 1-4, 50 states: M {m:.2e}, M' {mp:.2e}, "
                f"reconstructed {worst['meson']:.2e}; S3 length 2, 10 states: {worst_s3:.2e}; "
                f"{time.perf_counter() - t0:.0f}s")
    assert ok


def test_criterion_5_excitation_round_trips(report):
    cases = [
        ("Wilson Z2 3x3 2x2 loop", Z2_3x3, lambda s: run_wilson(s, rectangle_loop(Z2_3x3.geometry, (0, 0), 2, 2), "excite")),
        ("Wilson S3 plaquette", S3_PLAQ, lambda s: run_wilson(s, rectangle_loop(S3_PLAQ.geometry, (0, 0), 1, 1), "excite")),
        ("M Z2 3x3 length 3", Z2_3x3, lambda s: run_meson(s, shortest_path(Z2_3x3.geometry, (2, 1), (0, 0)), "M", "excite")),
        ("M' Z2 3x3 length 3", Z2_3x3, lambda s: run_meson(s, shortest_path(Z2_3x3.geometry, (2, 1), (0, 0)), "M'", "excite")),
        ("M S3 length 2", S3_PLAQ, lambda s: run_meson(s, shortest_path(S3_PLAQ.geometry, (1, 1), (0, 0)), "M", "excite")),
        ("M' S3 length 2", S3_PLAQ, lambda s: run_meson(s, shortest_path(S3_PLAQ.geometry, (1, 1), (0, 0)), "M'", "excite")),
    ]
    residual, overlap = 0.0, 1.0
    for _, layout, run in cases:
        for k in range(10):
            r = run(random_state(layout, 600 + k))
            residual = max(residual, r.residual)
            overlap = min(overlap, r.ancilla_overlap)
    ok = report("5 excitation round trips", residual < 1e-10 and overlap > 1 - 1e-10,
                f"{len(cases)} operators x 10 states, max residual {residual:.2e}, min ancilla overlap 1-{1 - overlap:.1e}")
    assert ok


def test_criterion_6_gauge_machinery(report):
    vac = max(gauss_residual(prepare_state(lay, "staggered_vacuum")) for lay in (Z2_3x3, S3_PLAQ))
    idem, law = 0.0, 0.0
    for lay in (Z2_3x3, S3_PLAQ):
        p = gauge_project(random_state(lay, 700))
        idem = max(idem, float(np.linalg.norm(gauge_project(p).amplitudes - p.amplitudes)))
        law = max(law, gauss_residual(p))
    inv = 0.0
    for lay in (Z2_3x3, S3_PLAQ):
        geo = lay.geometry
        s = random_state(lay, 701)
        loop = rectangle_loop(geo, (0, 0), 1, 1)
        path = shortest_path(geo, (0, 0), (1, 1))
        w0, m0 = wilson_direct(s, loop), meson_direct(s, path)
        for v in geo.vertices():
            for g in range(1, lay.group.order):
                t = gauss_transform(s.copy(), v, g)
                inv = max(inv, abs(wilson_direct(t, loop) - w0), abs(meson_direct(t, path) - m0))
    ok = report("6 gauge machinery", vac < 1e-12 and idem < 1e-12 and law < 1e-12 and inv < 1e-10,
                f"staggered vacuum {vac:.1e}, projector idempotency {idem:.1e}, projected Gauss law {law:.1e}, "
                f"oracle invariance {inv:.1e}")
    assert ok


def test_criterion_7_z2_sigma_x_convention(report):
    geo = build_lattice(3, 2)
    lay = build_layout(Z2, geo)
    loop = rectangle_loop(geo, (0, 0), 2, 1)
    path = shortest_path(geo, (2, 1), (0, 0))
    worst = 0.0
    for k in range(20):
        s = _mixed_state(lay, 800 + k)
        worst = max(worst, abs(sigma_x_wilson(s, loop) - run_wilson(s, loop).value))
        for w in ("M", "M'"):
            worst = max(worst, abs(sigma_x_meson(s, path, w) - run_meson(s, path, w).value))
    ok = report("7 Z2 sigma_x convention equivalence", worst < 1e-12,
                f"20 states, Wilson + M + M', max |diff| = {worst:.2e}")
    assert ok


def test_criterion_8_hamiltonian(report):
    lay = build_layout(Z2, build_lattice(2, 2))
    e = prepare_state(lay, {})
    direct = hamiltonian_expectation(e, lambda_b=1.0)
    proto = run_hamiltonian(e, 0.0, 1.0)
    worst = proto.difference
    for k in range(5):
        s = _mixed_state(lay, 900 + k)
        worst = max(worst, run_hamiltonian(s, 0.0, 1.0).difference, run_hamiltonian(s, 0.7, 1.0).difference)
    ok = report("8 plaquette Hamiltonian", abs(direct + 2) < 1e-12 and worst < 1e-10,
                f"<H_B> = {direct:.15f}, protocol vs direct max {worst:.2e}")
    assert ok


CLI_SCENARIO = """\
[system]
group = S3
lattice = 2x2

[state]
kind = random
seed = 3

[request w]
kind = wilson
loop = rect:(0,0,1,1)

[request m]
kind = meson
path = auto:(0,0)->(1,1)
which = meson
"""


def test_criterion_9_determinism_and_fermion_algebra(report, tmp_path):
    a, b = random_state(S3_PLAQ, 42), random_state(S3_PLAQ, 42)
    same_state = a.amplitudes.tobytes() == b.amplitudes.tobytes()
    cfg = tmp_path / "s.ini"
    cfg.write_text(CLI_SCENARIO)
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}.json"
        cli.main(["--config", str(cfg), "--out", str(out), "--check-oracle"])
        doc = json.loads(out.read_text())
        for r in doc["results"]:
            r.pop("wall_time")
        outs.append(json.dumps(doc, sort_keys=True))
    same_cli = outs[0] == outs[1]
    # exhaustive anticommutators on every basis state of a 4-mode layout
    lay = build_layout(Z2, build_lattice(2, 2))
    bad = 0
    for k, i, j in itertools.product(range(16), range(4), range(4)):
        amp = np.zeros(lay.dim, dtype=complex)
        amp[k] = 1
        s = StateVector(lay, amp)
        ac = annihilate(create(s, j), i).amplitudes + create(annihilate(s, i), j).amplitudes
        aa = annihilate(annihilate(s, j), i).amplitudes + annihilate(annihilate(s, i), j).amplitudes
        bad += not np.array_equal(ac, amp if i == j else 0 * amp) or aa.any()
    ok = report("9 determinism and fermionic algebra", same_state and same_cli and bad == 0,
                f"random_state bit-identical: {same_state}, CLI output identical: {same_cli}, "
                f"anticommutation violations: {bad}/256")
    assert ok
