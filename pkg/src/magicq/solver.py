"""Minimization of the divergence family over the stabilizer polytope.

The free set is the convex hull of the enumerated pure stabilizer states,
so every monotone problem becomes a convex program over simplex weights:

* alpha-z orders run away-step Frank-Wolfe on the trace functional
  Q (convex for alpha > 1, concave for alpha < 1), with exact line search,
  periodic fully corrective refinement over the active vertex set, and the
  Theorem-A certificate as the stopping and validation test. Gradients go
  through the Daleckii-Krein chain rule, independently of the certificate
  operator.
* the Umegaki order runs the same machinery on -Tr(rho log2 sigma).
* the Min order is a linear vertex scan, exact.
* the Max order solves min sum(x) s.t. sum_i x_i V_i >= rho by eigenvector
  cutting planes over a nonnegative LP; the optimality gap between the LP
  bound and D_max(rho || sigma*) is reported as the certificate violation.

States already inside the polytope are detected by a membership LP (the
exact l1-ball test on one qubit) and short-circuited to value zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import certificates
from .divergences import (
    MIN,
    UMEGAKI,
    MAX,
    DivergenceOrder,
    OrderError,
    d_az,
    d_max,
)
from .linalg import DensityMatrix, as_density, as_matrix, eigh, hermitian_part, support_projector
from .stabilizers import num_qubits, quadratic_overlaps, vertex_amplitudes, projector_matrices
from .states import to_bloch

MEMBERSHIP_TOL = 1e-9

_EIG_FLOOR = 1e-30
_LOG_FLOOR = 1e-280


@dataclass(frozen=True)
class SolverOptions:
    """Knobs of the polytope solver.

    ``restarts`` is the maximum number of starting points tried (maximally
    mixed, overlap witness, then random Dirichlet draws); the solver stops
    at the first start that reaches a certified optimum. ``tolerance`` is
    the absolute certificate-violation threshold.
    """

    max_iterations: int = 5000
    tolerance: float = 1e-8
    restarts: int = 4
    seed: int = 0
    correction_every: int = 25
    threads: int = 1

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class PolytopeWeights:
    """A sparse point of the weight simplex over enumerated vertices."""

    indices: np.ndarray
    weights: np.ndarray
    num_vertices: int

    def __post_init__(self):
        if np.any(self.weights < -1e-12):
            raise ValueError("weights must be nonnegative")
        if self.weights.size and abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to one")

    @property
    def support_size(self) -> int:
        return int(self.indices.size)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.num_vertices)
        out[self.indices] = self.weights
        return out


@dataclass(frozen=True)
class MonotoneResult:
    """Outcome of a monotone minimization."""

    value: float
    optimizer_weights: PolytopeWeights | None
    optimizer_state: DensityMatrix | None
    certificate_violation: float
    iterations: int
    converged: bool
    order: DivergenceOrder = field(default=UMEGAKI)


def _mix(rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """sum_i w_i |psi_i><psi_i| from amplitude rows."""
    return hermitian_part((rows.T * weights) @ rows.conj())


def f0(rho, threads: int = 1) -> tuple[float, int]:
    """Maximal pure-stabilizer overlap of rho and the first witness index."""
    mat = as_matrix(rho)
    n = num_qubits(mat.shape[0])
    p = vertex_amplitudes(n)
    overlaps = quadratic_overlaps(p, mat, threads=threads)
    witness = int(np.argmax(overlaps))
    return float(overlaps[witness]), witness


def f_m(rho, m: int) -> float:
    """2^{-m/2} max over rank-2^m stabilizer projectors of ||Pi rho Pi||_2."""
    mat = as_matrix(rho)
    n = num_qubits(mat.shape[0])
    projs = projector_matrices(n, m)
    best = 0.0
    for pi in projs:
        b = pi @ mat @ pi
        best = max(best, math.sqrt(max(float(np.trace(b @ b).real), 0.0)))
    return best / math.sqrt(2.0**m)


def is_stabilizer_aligned(rho) -> tuple[bool, dict[int, float]]:
    """Whether f_m(rho) <= f0(rho) for every m, with the per-m values."""
    mat = as_matrix(rho)
    n = num_qubits(mat.shape[0])
    base, _ = f0(mat)
    values = {0: base}
    for m in range(1, n + 1):
        values[m] = f_m(mat, m)
    aligned = all(v <= base + 1e-12 for v in values.values())
    return aligned, values


def _qubit_membership(rho_mat: np.ndarray) -> tuple[bool, PolytopeWeights | None]:
    r = to_bloch(rho_mat)
    l1 = float(np.sum(np.abs(r)))
    if l1 > 1 + 1e-12:
        return False, None
    # Octahedron decomposition: |r_i| on the matching axis vertex, the
    # remainder evenly over all six (enumeration order: X+,X-,Y+,Y-,Z+,Z-).
    w = np.full(6, (1 - l1) / 6)
    for axis in range(3):
        idx = 2 * axis + (0 if r[axis] >= 0 else 1)
        w[idx] += abs(r[axis])
    idxs = np.flatnonzero(w > 1e-15)
    return True, PolytopeWeights(idxs, w[idxs] / w[idxs].sum(), 6)


def polytope_membership(rho, tol: float = MEMBERSHIP_TOL) -> tuple[bool, PolytopeWeights | None]:
    """Is rho a convex combination of pure stabilizer states?

    One qubit uses the exact l1-ball test; otherwise a Chebyshev feasibility
    LP (minimize the max entrywise residual over the simplex) decides within
    ``tol``.
    """
    mat = as_matrix(rho)
    n = num_qubits(mat.shape[0])
    if n == 1:
        return _qubit_membership(mat)
    p = vertex_amplitudes(n)
    a, b = _realized_system(p, mat)
    n_w = p.shape[0]
    c = np.zeros(n_w + 1)
    c[-1] = 1.0
    a_ub = np.vstack([
        np.hstack([a, -np.ones((a.shape[0], 1))]),
        np.hstack([-a, -np.ones((a.shape[0], 1))]),
    ])
    b_ub = np.concatenate([b, -b])
    a_eq = np.zeros((1, n_w + 1))
    a_eq[0, :n_w] = 1.0
    res = optimize.linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
        bounds=[(0, None)] * n_w + [(0, None)], method="highs",
    )
    if not res.success:
        return False, None
    if float(res.x[-1]) > tol:
        return False, None
    w = np.clip(res.x[:n_w], 0.0, None)
    w /= w.sum()
    idx = np.flatnonzero(w > 1e-12)
    return True, PolytopeWeights(idx, w[idx] / w[idx].sum(), n_w)


def _realized_system(p: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real-linear system A w = b expressing sum_i w_i V_i = target."""
    d = target.shape[0]
    iu = np.triu_indices(d)
    rows = []
    n_w = p.shape[0]
    a = np.empty((2 * iu[0].size, n_w))
    chunk = 4096
    for lo in range(0, n_w, chunk):
        block = p[lo:lo + chunk]
        outer = block[:, :, None] * block[:, None, :].conj()
        vals = outer[:, iu[0], iu[1]]
        a[: iu[0].size, lo:lo + chunk] = vals.real.T
        a[iu[0].size:, lo:lo + chunk] = vals.imag.T
    bvals = target[iu]
    b = np.concatenate([bvals.real, bvals.imag])
    return a, b


class _Objective:
    """A convex objective F over density matrices, minimized by the solver."""

    def f(self, sigma: np.ndarray) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def f_and_grad(self, sigma: np.ndarray) -> tuple[float, np.ndarray]:  # pragma: no cover
        raise NotImplementedError


def _dk_power_apply(w, v, e, core, kernel_floor=_EIG_FLOOR):
    """z-free Daleckii-Krein map of x^e at diag(w) applied to core."""
    wk = np.maximum(w, kernel_floor)
    fvals = wk**e
    fprimes = e * wk ** (e - 1)
    diff = wk[:, None] - wk[None, :]
    tol = 1e-9 * max(1.0, float(wk.max()))
    near = np.abs(diff) < tol
    table = np.where(near, (fprimes[:, None] + fprimes[None, :]) / 2,
                     (fvals[:, None] - fvals[None, :]) / np.where(near, 1.0, diff))
    core_t = v.conj().T @ core @ v
    return hermitian_part(v @ (core_t * table) @ v.conj().T)


class _AZObjective(_Objective):
    """F = sign * Tr((B sigma^e B)^z): the alpha-z trace functional.

    Forward problems use e = (1-a)/z and B = rho^{a/2z}; reverse problems
    (variable in the first slot) use the mirrored form e = a/z and
    B = rho^{(1-a)/2z}, which has the same trace. sign = +1 for a > 1
    (convex, minimized) and -1 for a < 1 (concave, maximized).
    """

    def __init__(self, rho_mat: np.ndarray, alpha: float, z: float, reverse: bool):
        from .linalg import frac_power

        self.alpha = alpha
        self.z = z
        self.reverse = reverse
        if reverse:
            self.e = alpha / z
            self.b = frac_power(rho_mat, (1 - alpha) / (2 * z), support_only=True)
        else:
            self.e = (1 - alpha) / z
            self.b = frac_power(rho_mat, alpha / (2 * z), support_only=True)
        self.sign = 1.0 if alpha > 1 else -1.0

    def _sigma_power(self, sigma: np.ndarray):
        w, v = eigh(sigma)
        w = np.clip(w, 0.0, None)
        if self.e < 0:
            w = np.maximum(w, _EIG_FLOOR)
        powered = np.where(w > 0, np.maximum(w, _EIG_FLOOR if self.e < 0 else 0.0) ** self.e, 0.0)
        return w, v, (v * powered) @ v.conj().T

    def f(self, sigma: np.ndarray) -> float:
        _, _, sg = self._sigma_power(sigma)
        m = self.b @ sg @ self.b
        mw = np.clip(eigh(m).eigenvalues, 0.0, None)
        return self.sign * float(np.sum(mw**self.z))

    def f_and_grad(self, sigma: np.ndarray) -> tuple[float, np.ndarray]:
        w, v, sg = self._sigma_power(sigma)
        m = self.b @ sg @ self.b
        mw, mv = eigh(m)
        mw = np.clip(mw, 0.0, None)
        val = self.sign * float(np.sum(mw**self.z))
        cut = 1e-14 * max(float(mw.max()), 1e-300)
        inner = np.where(mw > cut, np.maximum(mw, cut) ** (self.z - 1), 0.0)
        core = self.b @ ((mv * inner) @ mv.conj().T) @ self.b
        grad = self.sign * self.z * _dk_power_apply(w, v, self.e, hermitian_part(core))
        return val, grad


class _UmegakiObjective(_Objective):
    """Forward: F = -Tr(rho log2 sigma). Reverse: F = D(sigma || rho) in bits."""

    def __init__(self, rho_mat: np.ndarray, reverse: bool):
        self.rho = rho_mat
        self.reverse = reverse
        if reverse:
            w, v = eigh(rho_mat)
            cut = 1e-14 * max(float(w.max()), 1e-300)
            logs = np.where(w > cut, np.log2(np.maximum(w, cut)), math.log2(_LOG_FLOOR))
            self.log2_rho = hermitian_part((v * logs) @ v.conj().T)

    def f(self, sigma: np.ndarray) -> float:
        w, v = eigh(sigma)
        w = np.clip(w, 0.0, None)
        if self.reverse:
            ent = float(np.sum(np.where(w > 0, w * np.log2(np.maximum(w, _LOG_FLOOR)), 0.0)))
            return ent - float(np.trace(sigma @ self.log2_rho).real)
        logs = np.log2(np.maximum(w, _LOG_FLOOR))
        weights = np.einsum("ji,jk,ki->i", v.conj(), self.rho, v).real
        return -float(weights @ logs)

    def f_and_grad(self, sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w, v = eigh(sigma)
        w = np.clip(w, 0.0, None)
        wk = np.maximum(w, _LOG_FLOOR)
        if self.reverse:
            ent = float(np.sum(np.where(w > 0, w * np.log2(wk), 0.0)))
            val = ent - float(np.trace(sigma @ self.log2_rho).real)
            logs = np.log2(wk)
            log2_sigma = hermitian_part((v * logs) @ v.conj().T)
            grad = log2_sigma + np.eye(w.size) / math.log(2) - self.log2_rho
            return val, hermitian_part(grad)
        logs = np.log2(wk)
        weights = np.einsum("ji,jk,ki->i", v.conj(), self.rho, v).real
        val = -float(weights @ logs)
        # -(1/ln 2) * D(ln)(sigma)[rho] via the log divided-difference kernel.
        diff = wk[:, None] - wk[None, :]
        tol = 1e-9 * max(1.0, float(wk.max()))
        near = np.abs(diff) < tol
        table = np.where(
            near,
            1.0 / wk[None, :].repeat(w.size, axis=0),
            (np.log(wk)[:, None] - np.log(wk)[None, :]) / np.where(near, 1.0, diff),
        )
        rho_t = v.conj().T @ self.rho @ v
        grad = -hermitian_part(v @ (rho_t * table) @ v.conj().T) / math.log(2)
        return val, grad


def _make_objective(rho_mat: np.ndarray, order: DivergenceOrder) -> _Objective:
    if order.kind == "az":
        return _AZObjective(rho_mat, order.alpha, order.z, order.reverse)
    if order.kind == "umegaki":
        return _UmegakiObjective(rho_mat, order.reverse)
    raise OrderError(f"no iterative objective for order {order.kind!r}")


def _strict_value(rho_mat: np.ndarray, sigma: np.ndarray, order: DivergenceOrder) -> float:
    val = d_az(rho_mat, sigma, order)
    return val.value


def _basis_vertex_indices(p: np.ndarray) -> np.ndarray:
    """Indices of the computational-basis vertices (one amplitude of modulus 1)."""
    return np.flatnonzero(np.max(np.abs(p), axis=1) > 1 - 1e-9)


def _starts(p: np.ndarray, rho_mat: np.ndarray, opts: SolverOptions):
    n_w = p.shape[0]
    basis = _basis_vertex_indices(p)
    if basis.size == 0:
        basis = np.arange(min(n_w, 4 * p.shape[1]))
    overlaps = quadratic_overlaps(p, rho_mat)
    witness = int(np.argmax(overlaps))
    starts = []
    w0 = np.zeros(n_w)
    w0[basis] = 1.0 / basis.size
    starts.append(w0)
    w1 = np.zeros(n_w)
    w1[basis] = 0.1 / basis.size
    w1[witness] += 0.9
    starts.append(w1)
    rng = np.random.default_rng(opts.seed)
    while len(starts) < opts.restarts:
        extra = rng.choice(n_w, size=min(n_w, 4 * p.shape[1]), replace=False)
        idx = np.union1d(extra, basis)
        w = np.zeros(n_w)
        w[idx] = rng.dirichlet(np.ones(idx.size))
        starts.append(w)
    return starts[: max(1, opts.restarts)]


def _line_search(phi, t_max: float) -> float:
    if t_max <= 0:
        return 0.0
    res = optimize.minimize_scalar(
        phi, bounds=(0.0, t_max), method="bounded",
        options={"xatol": 1e-12, "maxiter": 80},
    )
    t = float(res.x)
    if phi(t) > phi(0.0):
        return 0.0
    return t


def _corrective(obj: _Objective, rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Fully corrective step: minimize over the simplex of the active set."""

    def fun(x):
        val, grad = obj.f_and_grad(_mix(rows, x))
        return val, quadratic_overlaps(rows, grad)

    cons = [{"type": "eq", "fun": lambda x: x.sum() - 1.0, "jac": lambda x: np.ones_like(x)}]
    res = optimize.minimize(
        fun, w, jac=True, method="SLSQP", bounds=[(0.0, 1.0)] * w.size,
        constraints=cons, options={"maxiter": 250, "ftol": 1e-16},
    )
    if not np.all(np.isfinite(res.x)):
        return w
    x = np.clip(res.x, 0.0, None)
    total = x.sum()
    if total <= 0:
        return w
    x /= total
    if obj.f(_mix(rows, x)) <= obj.f(_mix(rows, w)) + 1e-15:
        return x
    return w


def _fw_minimize(obj, p, w0, opts, order, rho_mat, global_indices=None):
    """Away-step Frank-Wolfe with periodic corrective refinement.

    Returns (weights, sigma, iterations, certificate violation, converged).
    The certificate is evaluated against the supplied vertex rows; when the
    rows are a feasibility-filtered subset, ``global_indices`` maps local
    row numbers back to enumeration order (only used by the caller).
    """
    w = w0.copy()
    iterations = 0
    violation = math.inf
    converged = False
    stall = 0
    outer_rounds = max(1, math.ceil(opts.max_iterations / opts.correction_every))
    for _ in range(outer_rounds):
        for _ in range(opts.correction_every):
            if iterations >= opts.max_iterations:
                break
            sigma = _mix(p, w)
            _, grad = obj.f_and_grad(sigma)
            g = quadratic_overlaps(p, grad, threads=opts.threads)
            active = np.flatnonzero(w > 1e-15)
            j = int(np.argmin(g))
            g_mean = float(g @ w)
            gap_fw = g_mean - float(g[j])
            a_loc = int(active[np.argmax(g[active])])
            gap_away = float(g[a_loc]) - g_mean
            if gap_fw <= 1e-15 and gap_away <= 1e-15:
                break
            if gap_fw >= gap_away:
                target = np.outer(p[j], p[j].conj())

                def phi(t, s=sigma, v=target):
                    return obj.f((1 - t) * s + t * v)

                t = _line_search(phi, 1.0)
                w *= 1 - t
                w[j] += t
            else:
                wa = float(w[a_loc])
                t_max = wa / (1 - wa) if wa < 1 else 0.0
                away = np.outer(p[a_loc], p[a_loc].conj())

                def phi(t, s=sigma, v=away):
                    return obj.f((1 + t) * s - t * v)

                t = _line_search(phi, t_max)
                w *= 1 + t
                w[a_loc] -= t
                np.clip(w, 0.0, None, out=w)
            total = w.sum()
            if total > 0:
                w /= total
            iterations += 1
        active = np.flatnonzero(w > 1e-14)
        if active.size and active.size <= 600:
            w_act = _corrective(obj, p[active], w[active] / w[active].sum())
            w[:] = 0.0
            w[active] = w_act
        sigma = _mix(p, w)
        report = certificates.certificate(
            rho_mat, sigma, order, vertices=p, tol=opts.tolerance, threads=opts.threads
        )
        new_violation = report.violation if report.support_ok else math.inf
        if new_violation >= violation - 1e-14:
            stall += 1
        else:
            stall = 0
        violation = new_violation
        if report.support_ok and new_violation <= opts.tolerance:
            converged = True
            break
        if iterations >= opts.max_iterations or stall >= 6:
            break
    return w, _mix(p, w), iterations, violation, converged


def _free_result(rho_d: DensityMatrix, weights, order: DivergenceOrder) -> MonotoneResult:
    return MonotoneResult(0.0, weights, rho_d, 0.0, 0, True, order)


def _solve_min(rho_d: DensityMatrix, opts: SolverOptions) -> MonotoneResult:
    mat = rho_d.mat
    n = num_qubits(mat.shape[0])
    p = vertex_amplitudes(n)
    pi = support_projector(mat)
    overlaps = quadratic_overlaps(p, pi, threads=opts.threads)
    witness = int(np.argmax(overlaps))
    best = float(overlaps[witness])
    value = -math.log2(best)
    weights = PolytopeWeights(np.array([witness]), np.array([1.0]), p.shape[0])
    sigma = DensityMatrix(np.outer(p[witness], p[witness].conj()))
    return MonotoneResult(value, weights, sigma, 0.0, 1, True, MIN)


def _solve_max(rho_d: DensityMatrix, opts: SolverOptions) -> MonotoneResult:
    mat = rho_d.mat
    d = mat.shape[0]
    n = num_qubits(d)
    p = vertex_amplitudes(n)
    n_w = p.shape[0]
    cut_vectors: list[np.ndarray] = [v for v in np.linalg.eigh(mat)[1].T]
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    x = np.full(n_w, 1.0 / n_w)
    converged = False
    for _ in range(300):
        for u in cut_vectors:
            rows.append(np.abs(p @ u.conj()) ** 2)
            rhs.append(float((u.conj() @ mat @ u).real))
        cut_vectors = []
        a_ub = -np.array(rows)
        b_ub = -np.array(rhs)
        res = optimize.linprog(
            np.ones(n_w), A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs"
        )
        if not res.success:
            break
        x = res.x
        z = _mix(p, x) - mat
        w, v = np.linalg.eigh(hermitian_part(z))
        if w[0] >= -1e-11:
            converged = True
            break
        for k in range(min(3, d)):
            if w[k] < -1e-12:
                cut_vectors.append(v[:, k])
        if not cut_vectors:
            cut_vectors.append(v[:, 0])
    s = max(float(x.sum()), 1.0)
    weights_dense = x / x.sum() if x.sum() > 0 else x
    idx = np.flatnonzero(weights_dense > 1e-12)
    weights = PolytopeWeights(idx, weights_dense[idx] / weights_dense[idx].sum(), n_w)
    sigma_mat = _mix(p, weights_dense)
    sigma = DensityMatrix(sigma_mat / np.trace(sigma_mat).real)
    value = d_max(mat, sigma.mat).value
    gap = abs(value - math.log2(s))
    return MonotoneResult(value, weights, sigma, gap, 1, converged and gap <= 1e-7, MAX)


def solve(rho, order: DivergenceOrder, opts: SolverOptions | None = None) -> MonotoneResult:
    """Minimize the divergence of ``rho`` from the stabilizer polytope.

    Dispatches on the order kind; see the module docstring. For reverse
    orders the polytope variable sits in the first slot of the divergence;
    reverse min/max orders are not supported.
    """
    opts = opts or SolverOptions()
    rho_d = as_density(rho)
    mat = rho_d.mat
    n = num_qubits(mat.shape[0])
    if order.kind in ("min", "max") and order.reverse:
        raise OrderError("reverse min/max orders are not supported")
    if order.kind == "min":
        return _solve_min(rho_d, opts)
    member, member_weights = polytope_membership(mat)
    if member:
        return _free_result(rho_d, member_weights, order)
    if order.kind == "max":
        return _solve_max(rho_d, opts)

    p = vertex_amplitudes(n)
    global_idx = None
    if order.reverse:
        pi = support_projector(mat)
        leak = quadratic_overlaps(p, np.eye(mat.shape[0]) - pi)
        feasible = np.flatnonzero(leak <= 1e-12)
        if feasible.size == 0:
            return MonotoneResult(math.inf, None, None, 0.0, 0, True, order)
        if feasible.size < p.shape[0]:
            global_idx = feasible
            p = p[feasible]

    obj = _make_objective(mat, order)
    best = None
    total_iterations = 0
    for w0 in _starts(p, mat, opts):
        w, sigma, its, violation, converged = _fw_minimize(
            obj, p, w0, opts, order, mat, global_idx
        )
        total_iterations += its
        value = _strict_value(mat, sigma, order)
        cand = (value, w, sigma, violation, converged)
        if best is None or (cand[4] and not best[4]) or (cand[4] == best[4] and value < best[0]):
            best = cand
        if converged:
            break
    value, w, sigma_mat, violation, converged = best
    idx_local = np.flatnonzero(w > 1e-12)
    w_local = w[idx_local] / w[idx_local].sum()
    idx_global = global_idx[idx_local] if global_idx is not None else idx_local
    n_total = vertex_amplitudes(n).shape[0]
    weights = PolytopeWeights(idx_global, w_local, n_total)
    sigma = DensityMatrix(sigma_mat / float(np.trace(sigma_mat).real))
    return MonotoneResult(value, weights, sigma, violation, total_iterations, converged, order)


def solve_reverse(rho, order: DivergenceOrder, opts: SolverOptions | None = None) -> MonotoneResult:
    """Minimize D(sigma || rho) over the polytope (the reverse monotone)."""
    return solve(rho, order.with_reverse(True), opts)
