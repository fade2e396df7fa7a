import math

import numpy as np
import pytest

from entpur import werner as W
from entpur.optimizer import OptimizerConfig
from entpur.qmat import entropy_of_probs
from entpur.purification import bell_ansatz_purification

CFG = OptimizerConfig(n_starts=4)


def test_closed_form_matches_ansatz_spectrum():
    for e in (0.0, 0.01, 0.05, 0.1, 0.2, 0.25, 0.5):
        x = W._regime2_x(e)
        q = (1 - e) / 3
        psi = bell_ansatz_purification([e, q, q, q])
        sv = np.linalg.svd(psi.cut_matrix(), compute_uv=False) ** 2
        assert np.sort(sv) == pytest.approx(np.sort([1 - 3 * x, x, x, x]), abs=1e-12)
        assert W.werner_regime2_closed_form(e) == pytest.approx(W.werner_regime2_ansatz(e), abs=1e-10)


def test_published_form_contradicts_zero_at_quarter():
    assert W.werner_regime2_analytic(0.25) == pytest.approx(math.log2(3))
    assert W.werner_regime2_ansatz(0.25) == pytest.approx(0, abs=1e-12)
    # the published expression is the entropy of the swapped spectrum (x, (1-x)/3 ×3)
    x = W._regime2_x(0.1)
    assert W.werner_regime2_analytic(0.1) == pytest.approx(entropy_of_probs([x] + [(1 - x) / 3] * 3))


def test_default_grid():
    g = W.default_grid()
    assert g[0] == 0.0 and g[-1] == 1.0
    assert all(b > a for a, b in zip(g, g[1:]))
    assert 0.005 in g and 0.251 in g and 0.689 in g and 0.5 in g
    assert 101 < len(g) < 101 + 3 * 21
    assert W.default_grid(0.2, 0.3, 0.05, dense=False) == [0.2, 0.25, 0.3]
    for bad in ((0.5, 0.5), (-0.1, 0.5), (0.2, 1.2)):
        with pytest.raises(ValueError):
            W.default_grid(*bad)


def test_sweep_row_and_invariants():
    row = W.sweep_row(0.85, CFG)
    assert row.ep_best <= row.ep_2x2
    assert row.dims_best == (2, 3)
    assert row.regime2_as_printed is None and row.regime2_ansatz is None
    row.check()
    row = W.sweep_row(0.1, CFG)
    assert row.dims_best == (2, 2)
    assert row.regime2_ansatz == pytest.approx(row.ep_2x2, abs=1e-6)
    bad = W.SweepRow(**{**row.__dict__, "ef": row.ep_best + 0.1})
    with pytest.raises(W.SweepInvariantError, match="ef <= ep_best"):
        bad.check()
    bad = W.SweepRow(**{**row.__dict__, "ep_best": 1.5})
    with pytest.raises(W.SweepInvariantError, match="ep_best <= upper"):
        bad.check()


def test_csv_format():
    rows = W.werner_sweep([0.25, 1.0], CFG)
    text = W.rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ("e,ep_2x2,ep_4x4,ep_best,regime2_as_printed,regime2_ansatz,"
                        "ef,c_a,iq_half,upper,dims_best")
    last = lines[-1].split(",")
    assert last[0] == "1.00000000" and last[4] == "" and last[-1] == "1x1"
    assert W.format_value(-0.0) == "0.00000000"
    assert W.format_value(0.278071905123) == "0.278071905"
    assert W.format_value(1.5e-12) == "1.50000000e-12"
    assert W.rows_to_csv(W.werner_sweep([0.25, 1.0], CFG)) == text


def test_detect_regimes():
    mk = lambda e, d: W.SweepRow(e, 0, 0, 0, None, None, 0, 0, 0, 1, d)  # noqa: E731
    rows = [mk(0.0, (1, 3)), mk(0.01, (2, 2)), mk(0.02, (2, 2)), mk(0.7, (2, 3))]
    assert W.detect_regimes(rows) == [(0.0, 0.0, (1, 3)), (0.01, 0.02, (2, 2)), (0.7, 0.7, (2, 3))]


def test_audit_rows():
    rows = W.regime2_audit([0.1], CFG)
    r = rows[0]
    assert r.numeric_vs_ansatz <= 2e-3
    assert r.printed_flagged
    text = W.audit_to_csv(rows)
    assert text.splitlines()[0].endswith("printed_flagged") and text.strip().endswith("true")
