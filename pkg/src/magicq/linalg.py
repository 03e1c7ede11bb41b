"""Dense Hermitian linear algebra and matrix-function calculus.

Everything in this module is a pure function of its inputs. Operators are
dense complex matrices of dimension at most 64 (six qubits); there is no
sparse path. Matrix functions are evaluated through the eigendecomposition,
with a relative rank cutoff so that nominally singular operators (pure
states, projectors) behave like their exact counterparts.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Relative eigenvalue cutoff: |eig| below RANK_TOL * max|eig| counts as zero.
RANK_TOL = 1e-10

# Threshold for switching a divided difference to the derivative rule.
DEGENERACY_TOL = 1e-9

# Six-qubit ceiling on operator dimensions.
MAX_DIM = 64

HERMITICITY_TOL = 1e-12


class NumericalFailure(RuntimeError):
    """An eigensolver or iterative routine failed to converge."""


class CapacityError(ValueError):
    """A requested dimension exceeds the supported six-qubit ceiling."""


class DomainError(ValueError):
    """An operator lies outside the domain of the requested matrix function."""


def as_matrix(a) -> np.ndarray:
    """Coerce a HermitianOperator / DensityMatrix / array-like to ndarray."""
    mat = getattr(a, "mat", a)
    return np.asarray(mat, dtype=np.complex128)


def hermitian_part(a) -> np.ndarray:
    mat = as_matrix(a)
    return (mat + mat.conj().T) / 2


class HermitianOperator:
    """A validated dense Hermitian matrix.

    The constructor symmetrizes the input and rejects matrices whose
    anti-Hermitian part exceeds ``HERMITICITY_TOL`` relative to the overall
    scale. Instances are immutable value objects, safe to share across
    workers.
    """

    __slots__ = ("mat",)

    def __init__(self, entries):
        mat = np.asarray(entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] > MAX_DIM:
            raise CapacityError(f"dimension {mat.shape[0]} exceeds the cap of {MAX_DIM}")
        scale = max(1.0, float(np.max(np.abs(mat))))
        asym = float(np.max(np.abs(mat - mat.conj().T)))
        if asym > HERMITICITY_TOL * scale * 10:
            raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        self.mat = (mat + mat.conj().T) / 2
        self.mat.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


class DensityMatrix:
    """A unit-trace positive semidefinite operator.

    Eigenvalues are allowed to dip to -1e-10 from floating point noise and
    are clamped to zero on read; the trace must equal one within 1e-10.
    """

    __slots__ = ("mat",)

    EIG_TOL = 1e-10
    TRACE_TOL = 1e-10

    def __init__(self, entries):
        op = HermitianOperator(entries)
        tr = float(np.trace(op.mat).real)
        if abs(tr - 1.0) > self.TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1 beyond tolerance")
        w = np.linalg.eigvalsh(op.mat)
        if w[0] < -self.EIG_TOL:
            raise ValueError(f"negative eigenvalue {w[0]:.3e} beyond tolerance")
        self.mat = op.mat

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues, clamped to be nonnegative."""
        return np.maximum(np.linalg.eigvalsh(self.mat), 0.0)

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def as_density(a) -> DensityMatrix:
    if isinstance(a, DensityMatrix):
        return a
    return DensityMatrix(as_matrix(a))


class Spectrum(NamedTuple):
    """Eigendecomposition of a Hermitian operator.

    ``eigenvalues`` is ascending and real; ``eigenvectors`` holds the
    corresponding orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(a) -> Spectrum:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    mat = hermitian_part(a)
    try:
        w, v = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return Spectrum(w, v)


def _rank_cut(w: np.ndarray) -> float:
    top = float(np.max(np.abs(w))) if w.size else 0.0
    return RANK_TOL * top


def frac_power(a, e: float, support_only: bool = False) -> np.ndarray:
    """Matrix power ``a**e`` of a Hermitian operator.

    Eigenvalues below the relative rank tolerance are treated as exactly
    zero. For negative or non-integer exponents the operator must be
    positive semidefinite; with ``support_only`` set, zero eigenvalues map
    to zero so the power acts on the support only (pseudo-inverse
    semantics). Without it, a negative or zero-th power of a singular
    operator is a domain error.
    """
    w, v = eigh(a)
    cut = _rank_cut(w)
    on_support = np.abs(w) > cut
    fractional = e != round(e)
    if (fractional or e < 0) and np.any(w < -cut):
        raise DomainError(
            f"negative eigenvalue {w.min():.3e} with exponent {e}"
        )
    wc = np.where(on_support, np.abs(w) if (fractional or e < 0) else w, 0.0)
    powered = np.zeros_like(wc)
    if e <= 0 and not support_only and not np.all(on_support):
        if e < 0 or fractional:
            raise DomainError(f"singular operator with exponent {e}")
        # e == 0 on a singular operator without support_only: identity.
        powered = np.ones_like(wc)
    else:
        powered[on_support] = wc[on_support] ** e
        if e == 0 and not support_only:
            powered = np.ones_like(wc)
    return hermitian_part((v * powered) @ v.conj().T)


def support_projector(a) -> np.ndarray:
    """Orthogonal projector onto the support (range) of a Hermitian PSD operator."""
    w, v = eigh(a)
    cut = _rank_cut(w)
    keep = np.abs(w) > cut
    vk = v[:, keep]
    return hermitian_part(vk @ vk.conj().T)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the first factor holds the most significant qubits."""
    mat = np.kron(as_matrix(a), as_matrix(b))
    if mat.shape[0] > MAX_DIM:
        raise CapacityError(f"tensor dimension {mat.shape[0]} exceeds the cap of {MAX_DIM}")
    return mat


def tensor_all(factors) -> np.ndarray:
    mats = [as_matrix(f) for f in factors]
    if not mats:
        raise ValueError("tensor_all needs at least one factor")
    out = mats[0]
    for m in mats[1:]:
        out = tensor(out, m)
    return out


def partial_trace(a, keep, dims) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` lists the local dimensions in tensor order (first factor most
    significant); ``keep`` is a collection of subsystem indices to retain,
    in their original order.
    """
    mat = as_matrix(a)
    dims = list(dims)
    total = int(np.prod(dims))
    if mat.shape != (total, total):
        raise ValueError(f"dims {dims} do not multiply to the matrix dimension {mat.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    tens = mat.reshape(dims + dims)
    # Trace out, from the highest index down so axis numbers stay valid.
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        tens = np.trace(tens, axis1=idx, axis2=idx + n)
        n -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return tens.reshape(d_keep, d_keep)


def _divided_differences(w: np.ndarray, fvals: np.ndarray, fprimes: np.ndarray) -> np.ndarray:
    """First divided-difference table of f over the spectrum w.

    Off-diagonal entries are (f(wi)-f(wj))/(wi-wj); pairs closer than
    DEGENERACY_TOL relative to the spectral radius use f' instead.
    """
    diff = w[:, None] - w[None, :]
    tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(w)))) if w.size else 0.0
    degenerate = np.abs(diff) < tol
    safe = np.where(degenerate, 1.0, diff)
    table = (fvals[:, None] - fvals[None, :]) / safe
    prime_avg = (fprimes[:, None] + fprimes[None, :]) / 2
    return np.where(degenerate, prime_avg, table)


def frechet_dd(f, a, h) -> np.ndarray:
    """Daleckii-Krein directional derivative Df(a)[h] for Hermitian a, h.

    ``f`` selects the scalar function: the string ``"log"`` (natural log)
    or a pair ``("power", e)``. In a's eigenbasis the result has entries
    h_ij * (f(wi)-f(wj))/(wi-wj), with the derivative rule on (near-)
    degenerate pairs.
    """
    w, v = eigh(a)
    cut = _rank_cut(w)
    if f == "log":
        if np.any(w <= cut):
            raise DomainError("log requires a positive definite operator")
        fvals = np.log(w)
        fprimes = 1.0 / w
    elif isinstance(f, tuple) and len(f) == 2 and f[0] == "power":
        e = float(f[1])
        fractional = e != round(e)
        if fractional or e < 0:
            if np.any(w <= cut):
                raise DomainError(
                    f"exponent {e} requires a positive definite operator"
                )
        elif e < 1 and np.any(np.abs(w) <= cut):
            raise DomainError(f"singular operator with exponent {e}; derivative unbounded")
        fvals = w ** e
        fprimes = e * w ** (e - 1) if e != 0 else np.zeros_like(w)
    else:
        raise ValueError(f"unknown function tag {f!r}")
    table = _divided_differences(w, fvals, fprimes)
    ht = v.conj().T @ as_matrix(h) @ v
    return hermitian_part(v @ (ht * table) @ v.conj().T)


def log2m(a, support_only: bool = False) -> np.ndarray:
    """Matrix log base 2; with support_only, acts on the support."""
    w, v = eigh(a)
    cut = _rank_cut(w)
    on = w > cut
    if not support_only and not np.all(on):
        raise DomainError("log of a singular operator")
    vals = np.zeros_like(w)
    vals[on] = np.log2(w[on])
    return hermitian_part((v * vals) @ v.conj().T)
