"""The alpha-z Renyi relative entropy family, its limits, and orders.

All values are in bits (logarithms base 2). The two-parameter divergence

    D_{a,z}(rho || sigma) = 1/(a-1) * log2 Tr(rho^{a/2z} sigma^{(1-a)/z} rho^{a/2z})^z

is finite when (a < 1 and rho not orthogonal to sigma) or supp(rho) is
contained in supp(sigma); it is +inf otherwise. Matrix powers act on
supports (pseudo-powers), which reproduces the exact rank-deficient limits
for pure states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import as_matrix, eigh, frac_power, support_projector

# Tolerance below which Tr(rho * (1 - Pi(sigma))) counts as support containment.
SUPP_TOL = 1e-10

# Orthogonality test threshold for the alpha < 1 branch.
ORTHO_TOL = 1e-12

BOUNDARY_TOL = 1e-12

_DPI_MESSAGES = {
    "alpha": "alpha > 0",
    "z": "z > 0",
    "low": "z >= max(alpha, 1-alpha)",
    "mid": "alpha/2 <= z <= alpha",
    "high": "alpha-1 <= z <= alpha",
}


class OrderError(ValueError):
    """An (alpha, z) pair outside the data-processing region, or a bad kind."""


def dpi_violation(alpha: float, z: float) -> str | None:
    """Return the violated DPI inequality as text, or None if (alpha,z) is admissible."""
    tol = 1e-12
    if alpha <= 0:
        return _DPI_MESSAGES["alpha"]
    if z <= 0:
        return _DPI_MESSAGES["z"]
    if abs(alpha - 1) <= tol:
        return None
    if alpha < 1:
        if z < max(alpha, 1 - alpha) - tol:
            return _DPI_MESSAGES["low"]
        return None
    if alpha <= 2:
        if z < alpha / 2 - tol or z > alpha + tol:
            return _DPI_MESSAGES["mid"]
        return None
    if z < alpha - 1 - tol or z > alpha + tol:
        return _DPI_MESSAGES["high"]
    return None


@dataclass(frozen=True)
class DivergenceOrder:
    """A point of the divergence family: (alpha, z), or a limit tag.

    ``kind`` is one of "az", "min", "umegaki", "max". The ``reverse`` flag
    swaps the arguments before evaluation (the polytope variable moves to
    the first slot in the monotone problems). alpha = 1 inputs dispatch to
    the Umegaki kind for any z > 0.
    """

    kind: str
    alpha: float | None = None
    z: float | None = None
    reverse: bool = False

    @staticmethod
    def alpha_z(alpha: float, z: float, reverse: bool = False) -> "DivergenceOrder":
        if abs(alpha - 1) <= 1e-12:
            if z <= 0:
                raise OrderError("z > 0")
            return DivergenceOrder("umegaki", reverse=reverse)
        violated = dpi_violation(alpha, z)
        if violated is not None:
            raise OrderError(violated)
        return DivergenceOrder("az", float(alpha), float(z), reverse)

    @staticmethod
    def min(reverse: bool = False) -> "DivergenceOrder":
        return DivergenceOrder("min", reverse=reverse)

    @staticmethod
    def umegaki(reverse: bool = False) -> "DivergenceOrder":
        return DivergenceOrder("umegaki", reverse=reverse)

    @staticmethod
    def max(reverse: bool = False) -> "DivergenceOrder":
        return DivergenceOrder("max", reverse=reverse)

    def on_boundary_line(self) -> bool:
        """True when |1 - alpha| / z = 1 within 1e-12."""
        if self.kind != "az":
            return False
        return abs(abs(1 - self.alpha) / self.z - 1.0) <= BOUNDARY_TOL

    def with_reverse(self, reverse: bool = True) -> "DivergenceOrder":
        return replace(self, reverse=reverse)

    def label(self) -> str:
        if self.kind == "az":
            base = f"az:{self.alpha:g}:{self.z:g}"
        else:
            base = self.kind
        return ("rev-" + base) if self.reverse else base


MIN = DivergenceOrder("min")
UMEGAKI = DivergenceOrder("umegaki")
MAX = DivergenceOrder("max")


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence value in bits; +inf exactly when the support condition fails."""

    value: float
    finite: bool
    support_ok: bool

    @staticmethod
    def of(value: float) -> "DivergenceValue":
        return DivergenceValue(float(value), True, True)

    @staticmethod
    def infinite() -> "DivergenceValue":
        return DivergenceValue(math.inf, False, False)

    def __float__(self) -> float:
        return self.value


def _support_contained(rho: np.ndarray, sigma: np.ndarray) -> bool:
    """supp(rho) subseteq supp(sigma), tested spectrally."""
    pi = support_projector(sigma)
    leak = float(np.trace(rho @ (np.eye(rho.shape[0]) - pi)).real)
    return leak <= SUPP_TOL


def _orthogonal(rho: np.ndarray, sigma: np.ndarray) -> bool:
    overlap = float(np.trace(support_projector(rho) @ support_projector(sigma)).real)
    return overlap < ORTHO_TOL


def az_trace_functional(rho, sigma, alpha: float, z: float) -> float:
    """Q_{a,z} = Tr(rho^{a/2z} sigma^{(1-a)/z} rho^{a/2z})^z on supports.

    Returns the trace value; the caller decides the support semantics.
    For alpha > 1 the sigma power is a pseudo-power on supp(sigma).
    """
    r = as_matrix(rho)
    s = as_matrix(sigma)
    a = frac_power(r, alpha / (2 * z), support_only=True)
    gamma = (1 - alpha) / z
    sg = frac_power(s, gamma, support_only=True)
    m = a @ sg @ a
    w = eigh(m).eigenvalues
    w = np.clip(w, 0.0, None)
    return float(np.sum(w ** z))


def d_az_raw(rho, sigma, alpha: float, z: float) -> DivergenceValue:
    """Evaluate D_{a,z} without order validation (any alpha != 1, z > 0)."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    if alpha > 1:
        if not _support_contained(r, s):
            return DivergenceValue.infinite()
    else:
        if _orthogonal(r, s):
            return DivergenceValue.infinite()
    q = az_trace_functional(r, s, alpha, z)
    if q <= 0:
        return DivergenceValue.infinite()
    return DivergenceValue.of(math.log2(q) / (alpha - 1))


def d_az(rho, sigma, order: DivergenceOrder) -> DivergenceValue:
    """D_{a,z}(rho || sigma) for an admissible order; limit tags dispatch."""
    if order.reverse:
        rho, sigma = sigma, rho
        order = order.with_reverse(False)
    if order.kind == "min":
        return d_min(rho, sigma)
    if order.kind == "umegaki":
        return d_umegaki(rho, sigma)
    if order.kind == "max":
        return d_max(rho, sigma)
    if order.kind != "az":
        raise OrderError(f"unknown order kind {order.kind!r}")
    return d_az_raw(rho, sigma, order.alpha, order.z)


def d_min(rho, sigma) -> DivergenceValue:
    """Min-relative entropy -log2 Tr(Pi(rho) sigma)."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    overlap = float(np.trace(support_projector(r) @ s).real)
    if overlap < ORTHO_TOL:
        return DivergenceValue.infinite()
    return DivergenceValue.of(-math.log2(overlap))


def d_umegaki(rho, sigma) -> DivergenceValue:
    """Umegaki relative entropy Tr rho (log2 rho - log2 sigma)."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    if not _support_contained(r, s):
        return DivergenceValue.infinite()
    wr = np.clip(eigh(r).eigenvalues, 0.0, None)
    ent = float(np.sum(wr[wr > 0] * np.log2(wr[wr > 0])))
    ws, vs = eigh(s)
    keep = ws > 1e-14 * max(1.0, float(ws.max()))
    # <u_j| rho |u_j> weights against log2 of sigma's spectrum.
    weights = np.einsum("ij,jk,ki->i", vs.conj().T, r, vs).real
    cross = float(np.sum(weights[keep] * np.log2(ws[keep])))
    return DivergenceValue.of(ent - cross)


def d_max(rho, sigma) -> DivergenceValue:
    """Max-relative entropy log2 ||sigma^{-1/2} rho sigma^{-1/2}||_inf."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    if not _support_contained(r, s):
        return DivergenceValue.infinite()
    s_inv_half = frac_power(s, -0.5, support_only=True)
    mid = s_inv_half @ r @ s_inv_half
    top = float(eigh(mid).eigenvalues[-1])
    top = max(top, 1e-300)
    return DivergenceValue.of(math.log2(top))


def d_max_qubit(r_vec, s_vec) -> DivergenceValue:
    """Qubit D_max from Bloch vectors via the closed form.

    Q_max = (1-|s|^2)^{-1} (1 - r.s + sqrt((1 - r.s)^2 - (1-|r|^2)(1-|s|^2)))
    on the support condition, +inf otherwise.
    """
    r = np.asarray(r_vec, dtype=float)
    s = np.asarray(s_vec, dtype=float)
    r2 = float(r @ r)
    s2 = float(s @ s)
    if r2 > 1 + 1e-12 or s2 > 1 + 1e-12:
        raise ValueError("Bloch vectors must have norm <= 1")
    rs = float(r @ s)
    if s2 >= 1 - 1e-14:
        # Pure sigma: support containment forces rho = sigma.
        if r2 >= 1 - 1e-12 and abs(rs - 1.0) < 1e-12:
            return DivergenceValue.of(0.0)
        return DivergenceValue.infinite()
    disc = (1 - rs) ** 2 - (1 - r2) * (1 - s2)
    disc = max(disc, 0.0)
    q = (1 - rs + math.sqrt(disc)) / (1 - s2)
    return DivergenceValue.of(math.log2(q))
