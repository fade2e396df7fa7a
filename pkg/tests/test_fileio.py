import json

import numpy as np
import pytest

from entpur import fileio, states


def test_round_trip_exact(tmp_path):
    s = states.random_bipartite(2, 3, rank=2, seed=4)
    p = tmp_path / "s.json"
    fileio.write_state(p, s)
    back = fileio.read_state(p)
    assert back.dims == (2, 3)
    assert np.array_equal(back.rho, s.rho)


def _edit(s, fn):
    d = fileio.state_to_dict(s)
    fn(d)
    return json.dumps(d)


@pytest.mark.parametrize("edit,msg", [
    (lambda d: d["matrix"][0][0].__setitem__(0, d["matrix"][0][0][0] - 0.1), "trace"),
    (lambda d: d["matrix"][0][1].__setitem__(1, 0.2), "Hermitian"),
    (lambda d: d.pop("d_b"), "missing"),
    (lambda d: d.__setitem__("d_a", 3), "shape"),
    (lambda d: d.__setitem__("d_a", 2.0), "integers"),
    (lambda d: d["matrix"][0].__setitem__(0, "x"), "nested array"),
])
def test_rejects_invalid(edit, msg):
    text = _edit(states.werner(0.5), edit)
    with pytest.raises(fileio.StateFileError, match=msg):
        fileio.loads_state(text)


def test_rejects_negative_eigenvalue():
    rho = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    d = {"d_a": 2, "d_b": 2, "matrix": [[[z.real, z.imag] for z in row] for row in rho]}
    with pytest.raises(fileio.StateFileError, match="negative"):
        fileio.state_from_dict(d)


def test_tolerates_small_errors():
    rho = np.diag([0.5 + 3e-9, 0.5, -4e-9, 0.0]).astype(complex)
    rho[0, 1] = 2e-9
    d = {"d_a": 2, "d_b": 2, "matrix": [[[z.real, z.imag] for z in row] for row in rho]}
    s = fileio.state_from_dict(d)
    assert np.trace(s.rho).real == pytest.approx(1, abs=1e-14)
    assert s.eigenvalues.min() >= 0


def test_bad_json_and_missing_file(tmp_path):
    with pytest.raises(fileio.StateFileError):
        fileio.loads_state("{not json")
    with pytest.raises(fileio.StateFileError):
        fileio.loads_state("[1, 2]")
    with pytest.raises(fileio.StateFileError):
        fileio.read_state(tmp_path / "nope.json")
