"""Enumeration of pure stabilizer states and stabilizer projectors.

Pauli operators are represented in binary symplectic form. A string with
x-mask ``x`` and z-mask ``z`` denotes the Hermitian operator

    W(x, z) = i^{|x & z|} X^x Z^z,

optionally carrying a sign in {+1, -1}. Bit ``n-1-q`` of a mask belongs to
qubit ``q``, so qubit 0 is the most significant bit of a basis-state index
(the first tensor factor).

Pure n-qubit stabilizer states correspond to the maximal isotropic
(Lagrangian) subspaces of F_2^{2n} together with a sign per generator;
rank-2^m projectors come from isotropic subspaces of dimension n-m. With
Hermitian generators and independent symplectic rows the generated group
can never contain -I, so every sign assignment is admissible.

Enumeration order is deterministic: subspaces are emitted by lexicographic
row-reduced echelon basis, then signs in lexicographic order (+1 before
-1). Counts for n = 1..4 are 6, 60, 1080, 36720.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .linalg import CapacityError, hermitian_part

MAX_PURE_QUBITS = 4
MAX_PROJECTOR_QUBITS = 3

STABILIZER_COUNTS = {1: 6, 2: 60, 3: 1080, 4: 36720}

_ATOL = 1e-12


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class PauliString:
    """A signed Hermitian Pauli operator in binary symplectic form."""

    n: int
    x: int
    z: int
    sign: int = 1

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("x/z masks exceed the qubit count")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1 for a Hermitian generator")

    def commutes(self, other: "PauliString") -> bool:
        return (_parity(self.x & other.z) ^ _parity(self.z & other.x)) == 0

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Apply the signed operator to a state vector."""
        d = 1 << self.n
        idx = np.arange(d)
        phase = self.sign * (1j ** (bin(self.x & self.z).count("1") % 4))
        signs = 1.0 - 2.0 * (_popcount_array(idx & self.z) & 1)
        out = np.empty(d, dtype=np.complex128)
        out[idx ^ self.x] = phase * signs * vec
        return out

    def matrix(self) -> np.ndarray:
        d = 1 << self.n
        mat = np.zeros((d, d), dtype=np.complex128)
        eye = np.eye(d, dtype=np.complex128)
        for col in range(d):
            mat[:, col] = self.apply(eye[:, col])
        return mat


def _popcount_array(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    a = arr.copy()
    while np.any(a):
        out += a & 1
        a >>= 1
    return out


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Product of two commuting signed Hermitian Paulis (again Hermitian)."""
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    x3, z3 = p.x ^ q.x, p.z ^ q.z
    # i^{c1} X^{x1}Z^{z1} i^{c2} X^{x2}Z^{z2}
    #   = i^{c1+c2} (-1)^{z1.x2} X^{x3} Z^{z3} = i^{c1+c2-c3} (-1)^{z1.x2} W(x3,z3)
    exp = (bin(p.x & p.z).count("1") + bin(q.x & q.z).count("1")
           - bin(x3 & z3).count("1")) % 4
    exp = (exp + 2 * _parity(p.z & q.x)) % 4
    if exp % 2 != 0:
        raise ValueError("product of non-commuting Paulis is not Hermitian")
    sign = p.sign * q.sign * (1 if exp == 0 else -1)
    return PauliString(p.n, x3, z3, sign)


def _f2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for row in rows:
        cur = row
        for b in basis:
            cur = min(cur, cur ^ b)
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
            rank += 1
    return rank


class StabilizerGroup:
    """An abelian group of signed Hermitian Paulis given by k generators."""

    __slots__ = ("n", "generators")

    def __init__(self, generators):
        gens = tuple(generators)
        if not gens:
            raise ValueError("need at least one generator")
        n = gens[0].n
        if any(g.n != n for g in gens):
            raise ValueError("generators act on different qubit counts")
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                if not g.commutes(h):
                    raise ValueError("generators must pairwise commute")
        rows = [(g.x << n) | g.z for g in gens]
        if _f2_rank(rows) != len(gens):
            raise ValueError("generators are not independent over F2")
        self.n = n
        self.generators = gens

    @property
    def k(self) -> int:
        return len(self.generators)

    def elements(self) -> list[PauliString]:
        """All 2^k group elements (with accumulated signs)."""
        elems = [PauliString(self.n, 0, 0, 1)]
        for g in self.generators:
            elems += [multiply(e, g) for e in elems]
        return elems

    def projector(self) -> np.ndarray:
        """The projector prod_j (I + s_j W_j) / 2 as a dense matrix."""
        d = 1 << self.n
        mat = np.zeros((d, d), dtype=np.complex128)
        idx = np.arange(d)
        for e in self.elements():
            phase = e.sign * (1j ** (bin(e.x & e.z).count("1") % 4))
            signs = 1.0 - 2.0 * (_popcount_array(idx & e.z) & 1)
            mat[idx ^ e.x, idx] += phase * signs
        return hermitian_part(mat / (1 << self.k))


def vector_of(group: StabilizerGroup) -> np.ndarray:
    """Materialize the unique state fixed by a maximal stabilizer group.

    Sequentially projects a computational basis vector that the group
    projector does not annihilate, then normalizes and fixes the global
    phase so the first nonzero amplitude is positive real.
    """
    if group.k != group.n:
        raise ValueError("a pure state needs n independent generators")
    d = 1 << group.n
    for b in range(d):
        v = np.zeros(d, dtype=np.complex128)
        v[b] = 1.0
        for g in group.generators:
            v = (v + g.apply(v)) / 2
        norm = np.linalg.norm(v)
        if norm > 1e-9:
            v /= norm
            return _canonical_phase(v)
    raise ValueError("group annihilates every basis vector (contains -I?)")


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-9)
    lead = v[nz[0]]
    return v * (lead.conjugate() / abs(lead))


@dataclass(frozen=True)
class PureStabilizer:
    """A pure stabilizer state: its group plus the amplitude vector."""

    group: StabilizerGroup
    amplitudes: np.ndarray

    @property
    def n(self) -> int:
        return self.group.n

    def projector_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class StabilizerProjector:
    """A rank-2^m stabilizer projector on n qubits (k = n - m generators)."""

    group: StabilizerGroup

    @property
    def n(self) -> int:
        return self.group.n

    @property
    def rank(self) -> int:
        return 1 << (self.group.n - self.group.k)

    def matrix(self) -> np.ndarray:
        return self.group.projector()


def _rref_subspaces(n_rows: int, n_cols: int) -> Iterator[tuple[int, ...]]:
    """All RREF bases of n_rows-dimensional subspaces of F_2^{n_cols}.

    Rows are integers whose most significant bit is column 0; emitted in
    lexicographic order of the row tuple.
    """
    if n_rows == 0:
        yield ()
        return
    for pivots in itertools.combinations(range(n_cols), n_rows):
        free_positions = [
            (i, j)
            for i in range(n_rows)
            for j in range(pivots[i] + 1, n_cols)
            if j not in pivots
        ]
        base_rows = [1 << (n_cols - 1 - p) for p in pivots]
        for bits in itertools.product((0, 1), repeat=len(free_positions)):
            rows = list(base_rows)
            for (i, j), bit in zip(free_positions, bits):
                if bit:
                    rows[i] |= 1 << (n_cols - 1 - j)
            yield tuple(rows)


def _symplectic_orthogonal(rows: tuple[int, ...], n: int) -> bool:
    mask = (1 << n) - 1
    xs = [r >> n for r in rows]
    zs = [r & mask for r in rows]
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if _parity(xs[i] & zs[j]) ^ _parity(zs[i] & xs[j]):
                return False
    return True


@lru_cache(maxsize=None)
def _isotropic_subspaces(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        rows for rows in _rref_subspaces(k, 2 * n) if _symplectic_orthogonal(rows, n)
    )


def enumerate_pure(n: int) -> Iterator[PureStabilizer]:
    """Stream every pure n-qubit stabilizer state exactly once.

    Deterministic order: lexicographic over canonical generator matrices,
    then over sign vectors (+1 before -1).
    """
    if not 1 <= n <= MAX_PURE_QUBITS:
        raise CapacityError(f"pure enumeration supports 1..{MAX_PURE_QUBITS} qubits, got {n}")
    mask = (1 << n) - 1
    for rows in _isotropic_subspaces(n, n):
        base = [(r >> n, r & mask) for r in rows]
        for signs in itertools.product((1, -1), repeat=n):
            gens = [PauliString(n, x, z, s) for (x, z), s in zip(base, signs)]
            group = StabilizerGroup(gens)
            yield PureStabilizer(group, vector_of(group))


def enumerate_projectors(n: int, m: int) -> Iterator[StabilizerProjector]:
    """Stream every rank-2^m stabilizer projector on n qubits exactly once."""
    if not 1 <= n <= MAX_PROJECTOR_QUBITS:
        raise CapacityError(
            f"projector enumeration supports 1..{MAX_PROJECTOR_QUBITS} qubits, got {n}"
        )
    if not 0 <= m <= n:
        raise CapacityError(f"projector rank exponent m={m} outside 0..{n}")
    k = n - m
    mask = (1 << n) - 1
    if k == 0:
        yield StabilizerProjector(StabilizerGroup([PauliString(n, 0, 0, 1)]))
        return
    for rows in _isotropic_subspaces(n, k):
        base = [(r >> n, r & mask) for r in rows]
        for signs in itertools.product((1, -1), repeat=k):
            gens = [PauliString(n, x, z, s) for (x, z), s in zip(base, signs)]
            yield StabilizerProjector(StabilizerGroup(gens))


def verify_stabilizer(state: PureStabilizer, atol: float = _ATOL) -> bool:
    """Check every PureStabilizer invariant at tolerance ``atol``."""
    group, amp = state.group, state.amplitudes
    if group.k != group.n or amp.shape != (1 << group.n,):
        return False
    if abs(np.linalg.norm(amp) - 1.0) > atol:
        return False
    for g in group.generators:
        if np.max(np.abs(g.apply(amp) - amp)) > atol:
            return False
    nz = np.abs(amp) > atol
    mods = np.abs(amp[nz])
    if np.max(mods) - np.min(mods) > atol:
        return False
    lead = amp[np.flatnonzero(nz)[0]]
    rel = amp[nz] / lead
    # Relative phases of a stabilizer state are fourth roots of unity.
    if np.max(np.abs(rel ** 4 - np.abs(rel) ** 4)) > 1e-9:
        return False
    return True


@lru_cache(maxsize=None)
def vertex_amplitudes(n: int) -> np.ndarray:
    """The full vertex set of the n-qubit stabilizer polytope.

    Returns an (N, 2^n) complex array whose rows are the pure stabilizer
    amplitude vectors in enumeration order. Cached; rows are read-only.
    """
    mat = np.array([s.amplitudes for s in enumerate_pure(n)], dtype=np.complex128)
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def projector_matrices(n: int, m: int) -> np.ndarray:
    """All rank-2^m stabilizer projectors on n qubits, stacked (K, d, d)."""
    mats = np.array([p.matrix() for p in enumerate_projectors(n, m)], dtype=np.complex128)
    mats.setflags(write=False)
    return mats


def quadratic_overlaps(vertices: np.ndarray, g: np.ndarray, threads: int = 1) -> np.ndarray:
    """<psi_i| G |psi_i> for every vertex row psi_i of ``vertices``.

    With threads > 1 the scan is chunked across a thread pool; chunk
    results are concatenated in index order, so the output is identical
    for any thread count.
    """

    def _chunk(block: np.ndarray) -> np.ndarray:
        return np.einsum("nd,nd->n", block.conj() @ g, block).real

    if threads <= 1 or vertices.shape[0] < 4096:
        return _chunk(vertices)
    from concurrent.futures import ThreadPoolExecutor

    bounds = np.linspace(0, vertices.shape[0], threads + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(_chunk, (vertices[a:b] for a, b in zip(bounds, bounds[1:])))
        )
    return np.concatenate(parts)


def num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if 1 << n != dim or not 1 <= n <= 6:
        raise CapacityError(f"dimension {dim} is not a supported power of two")
    return n
