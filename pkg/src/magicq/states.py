"""Construction and JSON parsing of the input states used by the package.

The registry covers the standard magic states: the single-qubit T, H and F
states on the symmetry axes of the stabilizer octahedron, the two-qubit CS
state, the three-qubit Toffoli and Hoggar states, and the pure single-qubit
counterexample state CE whose products break additivity of the relative
entropy monotone.

Tensor ordering convention: the leftmost factor holds the most significant
qubits of the basis index.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .linalg import DensityMatrix, as_matrix, tensor

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)

#: Bloch vectors of the named single-qubit states.
_BLOCH = {
    "T": (1 / SQ2, 1 / SQ2, 0.0),
    "H": (1 / SQ2, 0.0, 1 / SQ2),
    "F": (1 / SQ3, 1 / SQ3, 1 / SQ3),
    "CE": (
        (6 + 2 * SQ3) ** -0.5,
        (6 + 2 * SQ3) ** -0.5,
        (3 - SQ3) ** -0.5,
    ),
}

NAMED_STATES = ("T", "H", "F", "Toffoli", "Hoggar", "CS", "CE")


class SpecError(ValueError):
    """A state specification failed schema or domain validation."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


def from_bloch(r) -> DensityMatrix:
    """Qubit state (I + r . sigma)/2 from a Bloch vector of norm <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if float(r @ r) > 1 + 1e-12:
        raise ValueError(f"Bloch vector norm {np.linalg.norm(r):.6f} exceeds 1")
    mat = (np.eye(2) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z) / 2
    return DensityMatrix(mat)


def to_bloch(rho) -> np.ndarray:
    """Bloch vector (Tr rho X, Tr rho Y, Tr rho Z) of a qubit state."""
    mat = as_matrix(rho)
    if mat.shape != (2, 2):
        raise ValueError("to_bloch expects a single-qubit state")
    return np.array(
        [float(np.trace(mat @ p).real) for p in (PAULI_X, PAULI_Y, PAULI_Z)]
    )


def _pure(amplitudes) -> DensityMatrix:
    v = np.asarray(amplitudes, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def named_state(name: str) -> DensityMatrix:
    """The named pure state as a density matrix."""
    if name in _BLOCH:
        return from_bloch(_BLOCH[name])
    if name == "Toffoli":
        amp = np.zeros(8)
        # (|000> + |100> + |010> + |111>)/2, qubit 0 most significant.
        amp[[0b000, 0b100, 0b010, 0b111]] = 0.5
        return _pure(amp)
    if name == "Hoggar":
        # Fiducial of the Hoggar SIC: maximal stabilizer overlap 5/12.
        amp = np.ones(8, dtype=np.complex128)
        amp[0] = -1 + 2j
        return _pure(amp / math.sqrt(12.0))
    if name == "CS":
        return _pure(np.array([1, 1, 1, 1j]) / 2)
    raise SpecError(f"unknown state name {name!r}")


def depolarize(rho, p: float) -> DensityMatrix:
    """Depolarizing channel p*rho + (1-p) I/d; p is the survival parameter."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing parameter {p} outside [0, 1]")
    mat = as_matrix(rho)
    d = mat.shape[0]
    return DensityMatrix(p * mat + (1 - p) * np.eye(d) / d)


STATE_SPEC_SCHEMA = {
    "kind": "one of bloch | named | matrix | tensor",
    "bloch": {"r": "[rx, ry, rz]"},
    "named": {"name": "|".join(NAMED_STATES)},
    "matrix": {"dim": "int", "re": "row-major real part", "im": "row-major imaginary part"},
    "tensor": {"factors": "[StateSpec, ...]"},
    "depolarize": "optional survival parameter in [0, 1], applied last",
}


def parse_spec(spec, path: str = "$") -> DensityMatrix:
    """Build a DensityMatrix from a StateSpec (JSON text or dict).

    Schema: {"kind": "bloch"|"named"|"matrix"|"tensor", ...} with an
    optional "depolarize" key at any level. Errors carry the JSON path of
    the offending node.
    """
    if isinstance(spec, (str, bytes)):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}", path) from exc
    if isinstance(spec, DensityMatrix):
        return spec
    if not isinstance(spec, dict):
        raise SpecError(f"expected an object, got {type(spec).__name__}", path)
    kind = spec.get("kind")
    if kind == "bloch":
        r = spec.get("r")
        if not isinstance(r, (list, tuple)) or len(r) != 3:
            raise SpecError("bloch kind needs r: [rx, ry, rz]", path + ".r")
        try:
            rho = from_bloch([float(v) for v in r])
        except (TypeError, ValueError) as exc:
            raise SpecError(str(exc), path + ".r") from exc
    elif kind == "named":
        name = spec.get("name")
        if name not in NAMED_STATES:
            raise SpecError(
                f"name must be one of {', '.join(NAMED_STATES)}", path + ".name"
            )
        rho = named_state(name)
    elif kind == "matrix":
        rho = _parse_matrix(spec, path)
    elif kind == "tensor":
        factors = spec.get("factors")
        if not isinstance(factors, list) or not factors:
            raise SpecError("tensor kind needs a non-empty factors list", path + ".factors")
        mats = [
            parse_spec(f, f"{path}.factors[{i}]") for i, f in enumerate(factors)
        ]
        total = 1
        for m in mats:
            total *= m.dim
        if total > 64:
            raise SpecError(f"tensor dimension {total} exceeds 64", path + ".factors")
        out = mats[0].mat
        for m in mats[1:]:
            out = tensor(out, m.mat)
        rho = DensityMatrix(out)
    else:
        raise SpecError(
            "kind must be one of bloch, named, matrix, tensor", path + ".kind"
        )
    if "depolarize" in spec:
        p = spec["depolarize"]
        if not isinstance(p, (int, float)) or not 0 <= p <= 1:
            raise SpecError("depolarize must be a number in [0, 1]", path + ".depolarize")
        rho = depolarize(rho, float(p))
    return rho


def _parse_matrix(spec, path: str) -> DensityMatrix:
    dim = spec.get("dim")
    if not isinstance(dim, int) or dim < 1 or dim > 64:
        raise SpecError("dim must be an integer in 1..64", path + ".dim")
    re = spec.get("re")
    im = spec.get("im", [[0.0] * dim for _ in range(dim)])
    for key, part in (("re", re), ("im", im)):
        if (
            not isinstance(part, list)
            or len(part) != dim
            or any(not isinstance(row, list) or len(row) != dim for row in part)
        ):
            raise SpecError(f"{key} must be a {dim}x{dim} row-major array", f"{path}.{key}")
    mat = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    try:
        return DensityMatrix(mat)
    except ValueError as exc:
        raise SpecError(f"not a density matrix: {exc}", path) from exc


def spec_of_named(name: str, depolarize_p: float | None = None) -> dict:
    """Convenience StateSpec builder for the named family."""
    spec: dict = {"kind": "named", "name": name}
    if depolarize_p is not None:
        spec["depolarize"] = depolarize_p
    return spec
