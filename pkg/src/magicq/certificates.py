"""The certificate operator and the vertex-scan optimality test.

For a candidate optimizer tau of min_{sigma} D_{a,z}(rho || sigma) over a
vertex-enumerable free set, optimality holds if and only if tau satisfies
the support condition and

    Tr(sigma Xi_{a,z}(rho, tau)) <= Q_{a,z}(rho || tau)   for every vertex sigma,

where Xi is built from chi = rho^{a/2z} (rho^{a/2z} tau^{(1-a)/z} rho^{a/2z})^{z-1} rho^{a/2z}:

    z = 1-a:  Xi = chi
    z = a-1:  Xi = tau^{-1} chi tau^{-1}          (pseudo-inverses on the support)
    else:     Xi = sinc(pi (1-a)/z) Int_0^inf (tau+t)^{-1} chi (tau+t)^{-1} t^{(1-a)/z} dt.

In tau's eigenbasis the integral weight has the closed form
(a^g - b^g)/(g (a - b)) with g = (1-a)/z in (-1, 1), confluent limit
a^{g-1}, and g -> 0 giving the logarithmic kernel (the Umegaki case).
The scan maximum minus Q is the reported violation; the linear functional
attains its maximum at a vertex, so scanning vertices settles optimality
over the whole polytope.

Reverse orders (the polytope variable in the first divergence slot) use
the mirrored first-order condition: for alpha > 1 the inequality flips to
min_sigma Tr(sigma Xi) >= Q and the violation is Q minus the scan minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergences import (
    SUPP_TOL,
    DivergenceOrder,
    OrderError,
    az_trace_functional,
)
from .linalg import DomainError, as_matrix, eigh, frac_power, hermitian_part
from .stabilizers import num_qubits, quadratic_overlaps, vertex_amplitudes

DEFAULT_TOL = 1e-8

_CONFLUENCE_TOL = 1e-9


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of the optimality scan.

    ``violation <= tol`` certifies tau optimal over the supplied vertex
    set. For reverse orders with alpha > 1 (and reverse Umegaki) the
    extremal overlap is a minimum and the violation is q_value minus it;
    everywhere else it is the maximum overlap minus q_value.
    """

    support_ok: bool
    q_value: float
    max_overlap: float
    violation: float
    witness: int | None


def power_dd_kernel(vals: np.ndarray, gamma: float) -> np.ndarray:
    """Pairwise table (a^g - b^g)/(g(a-b)), confluent limit a^{g-1}.

    At g = 0 this degenerates to the logarithmic kernel
    (ln a - ln b)/(a - b) with diagonal 1/a. Entries are only meaningful
    for strictly positive ``vals``; the caller masks the rest.
    """
    a = vals[:, None]
    b = vals[None, :]
    scale = max(float(np.max(vals)), 1e-300)
    near = np.abs(a - b) < _CONFLUENCE_TOL * scale
    safe = np.where(near, 1.0, a - b)
    if gamma == 0.0:
        table = (np.log(a) - np.log(b)) / safe
        confluent = 1.0 / np.where(near, np.maximum(a, 1e-300), 1.0)
    else:
        table = (a**gamma - b**gamma) / (gamma * safe)
        confluent = np.where(near, np.maximum(a, 1e-300), 1.0) ** (gamma - 1)
    return np.where(near, confluent, table)


def chi(rho, tau, order: DivergenceOrder) -> np.ndarray:
    """The positive operator chi_{a,z}(rho, tau), powers on supports."""
    if order.kind != "az":
        raise OrderError("chi is defined for alpha-z orders")
    alpha, z = order.alpha, order.z
    r = as_matrix(rho)
    t = as_matrix(tau)
    a_half = frac_power(r, alpha / (2 * z), support_only=True)
    gamma = (1 - alpha) / z
    m = a_half @ frac_power(t, gamma, support_only=True) @ a_half
    inner = frac_power(m, z - 1, support_only=True)
    return hermitian_part(a_half @ inner @ a_half)


def _kernelized(tau: np.ndarray, core: np.ndarray, gamma: float) -> np.ndarray:
    """Apply the divided-difference kernel of x^gamma at tau to core."""
    w, v = eigh(tau)
    cut = 1e-14 * max(float(w.max()), 1e-300)
    on = w > cut
    core_t = v.conj().T @ core @ v
    kernel = np.zeros((w.size, w.size))
    idx = np.flatnonzero(on)
    if idx.size:
        sub = power_dd_kernel(w[idx], gamma)
        kernel[np.ix_(idx, idx)] = sub
    return hermitian_part(v @ (core_t * kernel) @ v.conj().T)


def xi(rho, tau, order: DivergenceOrder) -> np.ndarray:
    """The certificate operator Xi for forward az and Umegaki orders."""
    if order.reverse:
        return _xi_reverse(rho, tau, order)
    if order.kind == "umegaki":
        return _kernelized(as_matrix(tau), as_matrix(rho), 0.0)
    if order.kind != "az":
        raise OrderError("xi is defined for az and umegaki orders")
    alpha, z = order.alpha, order.z
    gamma = (1 - alpha) / z
    t = as_matrix(tau)
    c = chi(rho, tau, order)
    if abs(gamma - 1.0) <= 1e-12:
        return c
    if abs(gamma + 1.0) <= 1e-12:
        t_inv = frac_power(t, -1.0, support_only=True)
        return hermitian_part(t_inv @ c @ t_inv)
    if not -1 < gamma < 1:
        raise DomainError(f"kernel exponent {gamma} outside (-1, 1)")
    return _kernelized(t, c, gamma)


def _xi_reverse(rho, tau, order: DivergenceOrder) -> np.ndarray:
    """Certificate operator for min_sigma D(sigma || rho), evaluated at tau.

    Built from the gradient of Q_{a,z}(sigma || rho) in its first slot:
    with B = rho^{(1-a)/2z} and M = B tau^{a/z} B, the operator is
    (z/a) D(x^{a/z})(tau)[B M^{z-1} B], normalized so Tr(tau Xi) = Q.
    """
    if order.kind == "umegaki":
        # Gradient of D(sigma||rho) in bits at tau: (ln tau + Pi - ln rho)/ln 2.
        t = as_matrix(tau)
        r = as_matrix(rho)
        w, v = eigh(t)
        cut = 1e-14 * max(float(w.max()), 1e-300)
        logs = np.where(w > cut, np.log(np.maximum(w, cut)), math.log(cut))
        log_tau = (v * logs) @ v.conj().T
        wr, vr = eigh(r)
        cutr = 1e-14 * max(float(wr.max()), 1e-300)
        logr = np.where(wr > cutr, np.log(np.maximum(wr, cutr)), math.log(cutr))
        log_rho = (vr * logr) @ vr.conj().T
        return hermitian_part(log_tau + np.eye(t.shape[0]) - log_rho) / math.log(2)
    if order.kind != "az":
        raise OrderError("reverse xi is defined for az and umegaki orders")
    alpha, z = order.alpha, order.z
    r = as_matrix(rho)
    t = as_matrix(tau)
    b = frac_power(r, (1 - alpha) / (2 * z), support_only=True)
    gamma = alpha / z
    m = b @ frac_power(t, gamma, support_only=True) @ b
    core = hermitian_part(b @ frac_power(m, z - 1, support_only=True) @ b)
    return _kernelized(t, core, gamma)


def _support_ok(rho: np.ndarray, tau: np.ndarray, order: DivergenceOrder) -> bool:
    if order.reverse:
        # D(tau || rho) finite: supp(tau) inside supp(rho).
        from .linalg import support_projector

        leak = float(np.trace(tau @ (np.eye(tau.shape[0]) - support_projector(rho))).real)
        return leak <= SUPP_TOL
    boundary_low = (
        order.kind == "az" and abs((1 - order.alpha) / order.z - 1.0) <= 1e-12
    )
    if boundary_low:
        # supp(rho) = supp(Pi(rho) tau Pi(rho)).
        w, v = eigh(rho)
        cut = 1e-12 * max(float(np.max(np.abs(w))), 1e-300)
        cols = v[:, w > cut]
        compressed = cols.conj().T @ tau @ cols
        wmin = float(eigh(compressed).eigenvalues[0]) if compressed.size else 0.0
        return wmin > 1e-12
    from .linalg import support_projector

    leak = float(np.trace(rho @ (np.eye(rho.shape[0]) - support_projector(tau))).real)
    return leak <= SUPP_TOL


def _q_value(rho, tau, order: DivergenceOrder) -> float:
    if order.reverse:
        if order.kind == "umegaki":
            xi_rev = _xi_reverse(rho, tau, order)
            return float(np.trace(as_matrix(tau) @ xi_rev).real)
        return az_trace_functional(tau, rho, order.alpha, order.z)
    if order.kind == "umegaki":
        return 1.0
    return az_trace_functional(rho, tau, order.alpha, order.z)


def certificate(
    rho,
    tau,
    order: DivergenceOrder,
    vertices=None,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> CertificateReport:
    """Scan the polytope vertices for the optimality condition at tau.

    ``vertices`` may be an (N, d) amplitude array, an iterable of
    PureStabilizer, or None to enumerate the full vertex set for tau's
    dimension. Returns the report; no exception is raised on a support
    failure (support_ok is just cleared, skipping the scan).
    """
    r = as_matrix(rho)
    t = as_matrix(tau)
    if order.kind in ("min", "max"):
        raise OrderError("min/max orders are certified by their exact solvers")
    if not _support_ok(r, t, order):
        return CertificateReport(False, math.nan, math.nan, math.inf, None)
    p = _vertex_matrix(vertices, t.shape[0])
    mat = xi(rho, tau, order)
    overlaps = quadratic_overlaps(p, mat, threads=threads)
    q = _q_value(rho, tau, order)
    min_form = order.reverse and (order.kind == "umegaki" or order.alpha > 1)
    if min_form:
        witness = int(np.argmin(overlaps))
        extremal = float(overlaps[witness])
        violation = q - extremal
    else:
        witness = int(np.argmax(overlaps))
        extremal = float(overlaps[witness])
        violation = extremal - q
    return CertificateReport(True, q, extremal, violation, witness)


def _vertex_matrix(vertices, dim: int) -> np.ndarray:
    if vertices is None:
        return vertex_amplitudes(num_qubits(dim))
    if isinstance(vertices, np.ndarray):
        return vertices
    return np.array([s.amplitudes for s in vertices], dtype=np.complex128)
