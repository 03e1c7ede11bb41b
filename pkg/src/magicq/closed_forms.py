"""Exact closed forms: qubit robustness/fidelity, noisy-state monotones.

The qubit formulas live on the positive octant; octahedron symmetries
(signed coordinate permutations) move any Bloch vector there, and the
canonicalization is recorded so it can be undone. Within the octant the
P_x region has r_x <= r_y and r_x <= r_z; the printed formulas below are
stated for P_x and the other regions follow by swapping coordinates.

For the named noisy states (depolarized T, H, F, Toffoli, Hoggar, CS) the
monotones have exact expressions at every admissible (alpha, z); the
optimizer is the depolarized state at the threshold parameter
t = (d*F0 - 1)/(d - 1), which commutes with the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergences import MIN, UMEGAKI, MAX, DivergenceOrder, OrderError
from .linalg import DensityMatrix
from .states import depolarize, named_state

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)

#: Maximal stabilizer overlap F0 of the named pure states.
F0_VALUES = {
    "T": (1 + 1 / SQ2) / 2,
    "H": (1 + 1 / SQ2) / 2,
    "F": (1 + 1 / SQ3) / 2,
    "Toffoli": 9 / 16,
    "Hoggar": 5 / 12,
    "CS": 5 / 8,
}

_DIMS = {"T": 2, "H": 2, "F": 2, "Toffoli": 8, "Hoggar": 8, "CS": 4}

#: Depolarizing survival thresholds below which the state is free.
MAGIC_THRESHOLDS = {
    "T": 1 / SQ2,
    "H": 1 / SQ2,
    "F": 1 / SQ3,
    "Toffoli": 0.5,
    "Hoggar": 1 / 3,
    "CS": 0.5,
}

OCTAHEDRON_TOL = 1e-12


@dataclass(frozen=True)
class NamedState:
    """A named pure magic state under depolarizing noise with survival p."""

    name: str
    p: float = 1.0

    def __post_init__(self):
        if self.name not in F0_VALUES:
            raise ValueError(f"unknown named state {self.name!r}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"survival parameter {self.p} outside [0, 1]")

    @property
    def dim(self) -> int:
        return _DIMS[self.name]

    @property
    def threshold(self) -> float:
        return MAGIC_THRESHOLDS[self.name]

    @property
    def is_magic(self) -> bool:
        return self.p > self.threshold + 1e-15

    def density(self) -> DensityMatrix:
        return depolarize(named_state(self.name), self.p)


@dataclass(frozen=True)
class CanonicalBloch:
    """A Bloch vector mapped into the octant region P_x, with the map recorded."""

    canonical: tuple[float, float, float]
    signs: tuple[int, int, int]
    perm: tuple[int, int, int]

    def restore(self) -> tuple[float, float, float]:
        out = [0.0, 0.0, 0.0]
        for pos, axis in enumerate(self.perm):
            out[axis] = self.signs[axis] * self.canonical[pos]
        return tuple(out)


def canonicalize_bloch(r) -> CanonicalBloch:
    """Map a Bloch vector into P_x by sign flips and coordinate sorting."""
    r = np.asarray(r, dtype=float)
    signs = tuple(1 if v >= 0 else -1 for v in r)
    mags = np.abs(r)
    perm = tuple(int(i) for i in np.argsort(mags, kind="stable"))
    canonical = tuple(float(mags[i]) for i in perm)
    return CanonicalBloch(canonical, signs, perm)


def in_octahedron(r, tol: float = OCTAHEDRON_TOL) -> bool:
    """The single-qubit stabilizer polytope is exactly the l1 ball."""
    r = np.asarray(r, dtype=float)
    return float(np.sum(np.abs(r))) <= 1 + tol


def f0_qubit(r) -> float:
    """Maximal stabilizer overlap (1 + max_i |r_i|)/2 of a qubit state."""
    r = np.asarray(r, dtype=float)
    return (1 + float(np.max(np.abs(r)))) / 2


def robustness_qubit(r) -> float:
    """Generalized robustness of a qubit state from its Bloch vector.

    Returns 1 for stabilizer states. On P_x, with g = (3+sqrt3) r_x + 1 - |r|_1:
    g >= 0 gives (sqrt3 + |r|_1)/(sqrt3 + 1); g <= 0 gives the off-plane
    branch through the y-z stabilizer edge.
    """
    if in_octahedron(r):
        return 1.0
    rx, ry, rz = canonicalize_bloch(r).canonical
    l1 = rx + ry + rz
    g = (3 + SQ3) * rx + 1 - l1
    if g >= 0:
        return (SQ3 + l1) / (SQ3 + 1)
    return 2 + rx - l1 + math.sqrt(2 * (rx**2 + (1 + rx - l1) ** 2))


def fidelity_qubit(r) -> float:
    """Stabilizer fidelity of a qubit state from its Bloch vector.

    Returns 1 for stabilizer states. The branch test is
    f = 3 - |r|_1^2 - sqrt(6 - 2|r|_1^2)(|r|_1 - 3 r_x); the second branch
    is implemented from the tangency point
    k* = (r_y + r_z + sqrt(2 - 2 r_x^2 - (r_y + r_z)^2))/2 on the y-z
    stabilizer edge.
    """
    if in_octahedron(r):
        return 1.0
    rx, ry, rz = canonicalize_bloch(r).canonical
    l1 = rx + ry + rz
    f = 3 - l1**2 - math.sqrt(6 - 2 * l1**2) * (l1 - 3 * rx)
    if f >= 0:
        return (3 + l1 + math.sqrt(6 - 2 * l1**2)) / 6
    disc = max(2 * (1 - rx**2) - (l1 - rx) ** 2, 0.0)
    return (2 + l1 - rx + math.sqrt(disc)) / 4


def ansatz_parameter(name: str) -> float:
    """The depolarizing parameter t = (d F0 - 1)/(d - 1) of the optimizer."""
    d = _DIMS[name]
    return (d * F0_VALUES[name] - 1) / (d - 1)


def ansatz_optimizer(name: str, check_membership: bool = True):
    """The commuting optimizer (t, Delta_t(psi)) for a named state family.

    With t = (d F0 - 1)/(d - 1) the state Delta_t(psi) sits on the
    stabilizer polytope boundary and minimizes every admissible divergence
    from Delta_p(psi) for p above the magic threshold. Membership of the
    ansatz in the polytope is verified unless disabled.
    """
    t = ansatz_parameter(name)
    tau = depolarize(named_state(name), t)
    if check_membership:
        from .solver import polytope_membership

        member, _ = polytope_membership(tau)
        if not member:
            raise ValueError(
                f"ansatz state Delta_{t:.6f}({name}) is not a stabilizer state"
            )
    return t, tau


def _axis_eigenvalues(name: str, p: float) -> tuple[float, float, int]:
    """(top eigenvalue, bottom eigenvalue, bottom multiplicity) of Delta_p(psi)."""
    d = _DIMS[name]
    return (1 + (d - 1) * p) / d, (1 - p) / d, d - 1


def _commuting_divergence(
    name: str, p_first: float, p_second: float, order: DivergenceOrder
) -> float:
    """D(Delta_{p1} psi || Delta_{p2} psi) in bits for a named family."""
    top1, bot1, mult = _axis_eigenvalues(name, p_first)
    top2, bot2, _ = _axis_eigenvalues(name, p_second)
    if order.kind == "umegaki":
        total = top1 * math.log2(top1 / top2) if top1 > 0 else 0.0
        if bot1 > 0:
            total += mult * bot1 * math.log2(bot1 / bot2)
        return total
    if order.kind == "min":
        overlap = top2 + (mult * bot2 if bot1 > 0 else 0.0)
        return -math.log2(overlap)
    if order.kind == "max":
        candidates = [top1 / top2]
        if bot1 > 0:
            candidates.append(bot1 / bot2)
        return math.log2(max(candidates))
    alpha = order.alpha
    q = top1**alpha * top2 ** (1 - alpha)
    if bot1 > 0 or alpha < 1:
        q += mult * bot1**alpha * bot2 ** (1 - alpha)
    return math.log2(q) / (alpha - 1)


def named_noisy_monotone(state: NamedState | str, order: DivergenceOrder, p: float | None = None) -> float:
    """Monotone value of a depolarized named state at any admissible order.

    Evaluates the exact propositions, e.g. for T and H with p >= 1/sqrt2:

        1/(a-1) * log2( (1+p)^a/2 (1+1/sqrt2)^{1-a} + (1-p)^a/2 (1-1/sqrt2)^{1-a} )

    and the analogous expressions for F (sqrt3), Toffoli, Hoggar and CS.
    Limit tags evaluate the a -> 0, 1, inf scalar limits. Below the magic
    threshold the state is free and the value is 0.
    """
    ns = NamedState(state, 1.0 if p is None else p) if isinstance(state, str) else state
    if order.reverse:
        return named_noisy_reverse_monotone(ns, order.with_reverse(False))
    if not ns.is_magic:
        return 0.0
    name, pv = ns.name, ns.p
    if order.kind in ("min", "umegaki", "max"):
        return _commuting_divergence(name, pv, ansatz_parameter(name), order)
    a = order.alpha
    if name in ("T", "H", "F"):
        s = 1 / SQ2 if name in ("T", "H") else 1 / SQ3
        inner = ((1 + pv) ** a / 2) * (1 + s) ** (1 - a)
        if pv < 1:
            inner += ((1 - pv) ** a / 2) * (1 - s) ** (1 - a)
    elif name == "Toffoli":
        inner = 2 ** (a - 4) * (7 * (1 - pv) ** a + 9 ** (1 - a) * (1 + 7 * pv) ** a)
    elif name == "Hoggar":
        inner = (3 ** (a - 1) / 2 ** (a + 2)) * (
            7 * (1 - pv) ** a + 5 ** (1 - a) * (1 + 7 * pv) ** a
        )
    else:  # CS
        inner = 2 ** (a - 3) * (3 * (1 - pv) ** a + 5 ** (1 - a) * (1 + 3 * pv) ** a)
    return math.log2(inner) / (a - 1)


def named_noisy_reverse_monotone(state: NamedState | str, order: DivergenceOrder, p: float | None = None) -> float:
    """Reverse monotone min_{sigma} D(sigma || Delta_p psi) for axis states.

    Valid for the single-qubit T, H, F families, whose axis symmetry pins
    the optimizer on the axis: the divergence is convex along the segment
    and vanishes at sigma = rho, so for magic states the constrained
    minimizer is the threshold (face) point. Supports az and umegaki
    orders.
    """
    ns = NamedState(state, 1.0 if p is None else p) if isinstance(state, str) else state
    if ns.name not in ("T", "H", "F"):
        raise ValueError("reverse closed form is only available for the T, H, F axes")
    if order.kind not in ("az", "umegaki"):
        raise OrderError("reverse closed form supports az and umegaki orders")
    if not ns.is_magic:
        return 0.0
    if ns.p >= 1 - 1e-15 and (order.kind == "umegaki" or order.alpha > 1):
        return math.inf
    return _commuting_divergence(ns.name, ns.threshold, ns.p, order.with_reverse(False))


__all__ = [
    "NamedState",
    "CanonicalBloch",
    "F0_VALUES",
    "MAGIC_THRESHOLDS",
    "canonicalize_bloch",
    "in_octahedron",
    "f0_qubit",
    "robustness_qubit",
    "fidelity_qubit",
    "ansatz_parameter",
    "ansatz_optimizer",
    "named_noisy_monotone",
    "named_noisy_reverse_monotone",
]
