"""State files and report serialization.

A state file is JSON ``{"d_a": int, "d_b": int, "matrix": [[[re, im], ...], ...]}``
with the matrix row-major. Floats are written with ``repr`` precision so a
file round-trips to the identical matrix.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .states import BipartiteState

FILE_TOL = 1e-8


class StateFileError(ValueError):
    pass


def state_to_dict(s: BipartiteState) -> dict:
    m = s.rho
    return {
        "d_a": s.d_a,
        "d_b": s.d_b,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def dumps_state(s: BipartiteState) -> str:
    return json.dumps(state_to_dict(s), indent=1) + "\n"


def write_state(path, s: BipartiteState) -> None:
    Path(path).write_text(dumps_state(s))


def _matrix_from_pairs(raw, d: int) -> np.ndarray:
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"matrix is not a nested array of numbers: {exc}") from None
    if arr.shape != (d, d, 2):
        raise StateFileError(f"matrix must have shape ({d}, {d}) of [re, im] pairs, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StateFileError("matrix contains non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(obj, tol: float = FILE_TOL) -> BipartiteState:
    """Validate at ``tol``; matrices outside the library's tighter tolerances are
    projected to the nearest PSD unit-trace matrix, others kept bit-for-bit."""
    if not isinstance(obj, dict):
        raise StateFileError("state file must hold a JSON object")
    missing = {"d_a", "d_b", "matrix"} - set(obj)
    if missing:
        raise StateFileError(f"state file is missing {sorted(missing)}")
    d_a, d_b = obj["d_a"], obj["d_b"]
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in (d_a, d_b)):
        raise StateFileError(f"d_a and d_b must be positive integers, got {d_a!r}, {d_b!r}")
    m = _matrix_from_pairs(obj["matrix"], d_a * d_b)
    herm_err = np.max(np.abs(m - m.conj().T))
    if herm_err > tol:
        raise StateFileError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise StateFileError(f"trace is {tr:.12g}, expected 1")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.min() < -tol:
        raise StateFileError(f"matrix has a negative eigenvalue {w.min():.3e}")
    try:
        # already within the library's tighter tolerances: keep the exact bits
        return BipartiteState(m, d_a, d_b)
    except ValueError:
        pass
    w = np.clip(w, 0.0, None)
    m = (v * w) @ v.conj().T
    m = 0.5 * (m + m.conj().T)
    return BipartiteState(m / np.trace(m).real, d_a, d_b)


def loads_state(text: str) -> BipartiteState:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"state file is not valid JSON: {exc}") from None
    return state_from_dict(obj)


def read_state(path) -> BipartiteState:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateFileError(f"cannot read state file: {exc}") from None
    return loads_state(text)
