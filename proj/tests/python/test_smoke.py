"""Smoke tests for the Python bindings: build a model, run the forward
saw-tooth analysis, and identify the softening curve back from its record."""

import math

import pytest

slafem = pytest.importorskip("slafem")


def test_elastic_matrix_plane_stress():
    mat = slafem.Material.isotropic(30000.0, 0.2)
    D = slafem.elastic_matrix(mat)
    # E / (1 - nu^2) = 30000 / 0.96
    assert D[0][0] == pytest.approx(31250.0, rel=1e-12)
    assert D[0][1] == pytest.approx(0.2 * 31250.0, rel=1e-12)
    assert mat.reference_modulus() == 30000.0


def test_triangle_fracture_energy():
    ts = slafem.triangle_ts(3.0, 0.1)
    value, lower_bound = slafem.fracture_energy(ts)
    assert value == pytest.approx(0.15, rel=1e-12)
    assert not lower_bound
    assert ts.complete()
    assert ts.sigma_at(0.05) == pytest.approx(1.5, rel=1e-12)


def test_mesh_generation_and_linear_solve():
    beam = slafem.generate_notched_beam(
        100.0, 20.0, 10.0, 5.0, 0.0, 5.0, response=slafem.ResponseKind.Cmod, load=1000.0
    )
    beam.validate()
    assert beam.interface_count == 3
    n_ip = beam.interface_ip_count()
    mats = [slafem.Material.isotropic(30000.0, 0.2)]
    r = slafem.assemble_and_solve(beam, mats, [1e6] * n_ip, [1e7] * n_ip, 1.0)
    assert r.residual < 1e-10
    assert r.control == pytest.approx(1000.0, rel=1e-12)
    assert r.response > 0.0


def test_forward_inverse_round_trip():
    beam = slafem.generate_notched_beam(100.0, 20.0, 10.0, 5.0, 0.0, 5.0, load=1000.0)
    mats = [slafem.Material.isotropic(30000.0, 0.2)]
    truth = slafem.triangle_ts(3.0, 0.05)
    law = slafem.sawtooth_stress_band(truth, 0.06, 30000.0)
    law.validate()

    fwd = slafem.run_forward(beam, mats, law)
    assert fwd.termination in ("no_tensile_ip", "all_cracked")
    assert fwd.event_count > 50

    record = slafem.LoadingCurve([[0.0, 0.0]] + list(fwd.curve))
    trace = slafem.run_inverse(beam, mats, record, k0=30000.0, dsigma_fraction=0.02)
    assert trace.reason == "ts_complete"
    assert trace.ts.complete()
    assert trace.f_t == pytest.approx(3.0, rel=0.05)
    g_f, lower = slafem.fracture_energy(trace.ts)
    assert not lower
    assert g_f == pytest.approx(0.075, rel=0.10)
    assert math.isfinite(trace.ts.w_last)
