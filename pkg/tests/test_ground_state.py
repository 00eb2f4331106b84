import math

import numpy as np
import pytest

from adamslab import ground_state as gs
from adamslab.errors import GridError
from adamslab.radial import build_grid, gn_quotient, lp_norm

PI = math.pi


def test_r4_quotient_in_interval(ground4):
    lo, hi = 1 / (24 * PI**2), 32 / (729 * PI**2)
    assert ground4.quotient >= lo
    assert lo * 0.98 <= ground4.quotient <= hi * 1.02
    assert ground4.converged


def test_r4_ascent_monotone(ground4):
    h = np.asarray(ground4.history)
    assert h[0] == pytest.approx(1 / (24 * PI**2), rel=1e-6)
    assert np.all(np.diff(h) >= -1e-14 * h[-1])


def test_r2_quotient(ground2):
    assert ground2.quotient > 1 / (2 * PI)
    # Weinstein-type identity B1 = 2 / ||U||_2^2
    assert ground2.weinstein_estimate() == pytest.approx(ground2.quotient, rel=1e-2)


def test_r4_weinstein_identity(ground4):
    assert ground4.weinstein_estimate() == pytest.approx(ground4.quotient, rel=1e-2)


def test_residual_gates(ground4, ground2):
    q, u = ground4.rescaled(), ground2.rescaled()
    assert ground4.el_residual <= 1e-3 * q.sup()
    assert ground2.el_residual <= 1e-4 * u.sup()
    assert gs.el_residual(ground4) == ground4.el_residual


def test_rescaled_quotient_unchanged(ground4):
    assert gn_quotient(ground4.rescaled()) == pytest.approx(ground4.quotient, rel=1e-6)


@pytest.mark.parametrize("dim", [2, 4])
def test_grid_refinement_drift(dim):
    a = gs.maximize_quotient(dim, gs.default_grid(dim, 512)).quotient
    b = gs.maximize_quotient(dim, gs.default_grid(dim, 1024)).quotient
    assert abs(a - b) / b < 5e-3


def test_init_scale_independent():
    g = gs.default_grid(4, 512)
    base = gs.gaussian_init(g)
    a = gs.maximize_quotient(4, g, base).quotient
    b = gs.maximize_quotient(4, g, 7.5 * base).quotient
    assert a == pytest.approx(b, rel=1e-8)


def test_multi_start_agrees():
    best, trials = gs.multi_start(2, gs.default_grid(2, 512))
    qs = [q for _, q in trials]
    assert max(qs) - min(qs) <= 1e-6 * max(qs)
    assert best.quotient == max(qs)


def test_profile_sign_normalized(ground4):
    v = ground4.profile.values
    assert v[np.argmax(np.abs(v))] > 0
    assert abs(v[-1]) < 1e-8 * np.max(np.abs(v))


def test_rejects_bad_input():
    g = gs.default_grid(4, 128)
    with pytest.raises(ValueError):
        gs.maximize_quotient(4, g, np.zeros(len(g)))
    with pytest.raises(GridError):
        gs.maximize_quotient(2, g)
    with pytest.raises(ValueError):
        gs.maximize_quotient(4, g, np.ones(3))


def test_summary_keys(ground2, tmp_path):
    s = ground2.summary()
    assert s["dimension"] == 2 and s["quotient"] == ground2.quotient
    p = ground2.to_json(tmp_path / "g.json")
    assert p.read_text().endswith("\n")
