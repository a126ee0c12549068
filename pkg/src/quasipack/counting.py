"""Counting labeled copies: inj[F -> H; pins, target sets].

Two exact routes are available:

* ``"backtrack"`` enumerates injections with forward checking, pins first,
  then F-vertices by descending degree.
* ``"tensor"`` counts homomorphisms of every quotient F/pi with a numpy
  contraction over the adjacency tensor of H and recovers injections by
  Moebius inversion over the partition lattice:
  inj = sum_pi prod_B (-1)^(|B|-1) (|B|-1)! * hom(F/pi).
  Quotients that squeeze an edge are skipped (H has no such edges).

``"auto"`` picks the tensor route for hosts where enumerating every copy
would be slow.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod, sqrt
from typing import Iterator, Mapping

import numpy as np

from ._search import Constraint, InjectiveSearch
from .errors import InvalidParameters
from .hypercore import KGraph, degree

__all__ = [
    "EmbeddingConstraints",
    "EmbedBoundParams",
    "DensityEstimate",
    "count_inj",
    "estimate_density",
    "embedding_bound",
    "set_partitions",
    "adjacency_tensor",
]

_TENSOR_MAX_CELLS = 20_000_000


@dataclass(frozen=True)
class EmbeddingConstraints:
    """``pins`` are (F-vertex, H-vertex) pairs; ``targets`` map unpinned F-vertices to allowed H-vertices."""

    pins: tuple[tuple[int, int], ...] = ()
    targets: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        pins = tuple((int(a), int(b)) for a, b in self.pins)
        fs = [a for a, _ in pins]
        hs = [b for _, b in pins]
        if len(set(fs)) != len(fs):
            raise InvalidParameters("an F-vertex is pinned twice")
        if len(set(hs)) != len(hs):
            raise InvalidParameters("two F-vertices are pinned to the same H-vertex")
        targets = {int(v): frozenset(s) for v, s in self.targets.items()}
        if set(targets) & set(fs):
            raise InvalidParameters("target sets are only allowed on unpinned vertices")
        object.__setattr__(self, "pins", pins)
        object.__setattr__(self, "targets", targets)

    @property
    def pin_map(self) -> dict[int, int]:
        return dict(self.pins)

    def validate(self, F: KGraph, H: KGraph) -> None:
        for a, b in self.pins:
            if not (0 <= a < F.n and 0 <= b < H.n):
                raise InvalidParameters(f"pin {a}->{b} out of range")
        for v, s in self.targets.items():
            if not 0 <= v < F.n or any(not 0 <= x < H.n for x in s):
                raise InvalidParameters(f"target set for {v} out of range")


@dataclass(frozen=True)
class EmbedBoundParams:
    alpha: Fraction
    p: Fraction
    gamma: Fraction

    def __post_init__(self):
        for name in ("alpha", "p", "gamma"):
            val = Fraction(getattr(self, name))
            if not 0 < val < 1:
                raise InvalidParameters(f"{name} must lie in (0, 1), got {val}")
            object.__setattr__(self, name, val)


def set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def adjacency_tensor(H: KGraph) -> np.ndarray:
    """Symmetric 0/1 array of shape (n,)*k, zero off distinct tuples."""
    T = np.zeros((H.n,) * H.k, dtype=np.int64)
    if H.edges:
        idx = np.array([p for e in H.edges for p in itertools.permutations(e)], dtype=np.intp)
        T[tuple(idx.T)] = 1
    return T


def _check(F: KGraph, H: KGraph, c: EmbeddingConstraints | None) -> EmbeddingConstraints:
    if F.k != H.k:
        raise InvalidParameters(f"uniformity mismatch: F is {F.k}-uniform, H is {H.k}-uniform")
    c = c or EmbeddingConstraints()
    c.validate(F, H)
    return c


def _count_backtrack(F, H, c: EmbeddingConstraints) -> int:
    pins = c.pin_map
    deg = {v: sum(v in e for e in F.edges) for v in range(F.n)}
    order = list(pins) + sorted((v for v in range(F.n) if v not in pins), key=lambda v: (-deg[v], v))
    search = InjectiveSearch(
        F.n, H.n, [Constraint(e, H) for e in F.sorted_edges], domains=c.targets, fixed=pins, order=order
    )
    return search.count()


def _count_tensor(F, H, c: EmbeddingConstraints) -> int:
    n = H.n
    T = adjacency_tensor(H)
    weights = []
    for v in range(F.n):
        w = np.zeros(n, dtype=np.int64)
        pins = c.pin_map
        if v in pins:
            w[pins[v]] = 1
        elif v in c.targets:
            w[list(c.targets[v])] = 1
        else:
            w[:] = 1
        weights.append(w)
    exact_int64 = n ** max(F.n, 1) < 2**62
    if not exact_int64:
        T = T.astype(object)
        weights = [w.astype(object) for w in weights]
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    total = 0
    for blocks in set_partitions(list(range(F.n))):
        where = {v: i for i, b in enumerate(blocks) for v in b}
        if any(len({where[v] for v in e}) < F.k for e in F.edges):
            continue
        coeff = prod((-1) ** (len(b) - 1) * factorial(len(b) - 1) for b in blocks)
        operands, subs = [], []
        dead = False
        for i, b in enumerate(blocks):
            w = weights[b[0]]
            for v in b[1:]:
                w = w * weights[v]
            if not w.any():
                dead = True
                break
            operands.append(w)
            subs.append(letters[i])
        if dead:
            continue
        for e in F.sorted_edges:
            operands.append(T)
            subs.append("".join(letters[where[v]] for v in e))
        hom = np.einsum(",".join(subs) + "->", *operands, optimize=True)
        total += coeff * int(hom)
    return total


def count_inj(
    F: KGraph, H: KGraph, c: EmbeddingConstraints | None = None, *, method: str = "auto"
) -> int:
    """Exact number of edge-preserving injections V(F) -> V(H) obeying pins and targets."""
    c = _check(F, H, c)
    if F.n == 0:
        return 1
    if method == "auto":
        small_tensor = H.n ** H.k <= _TENSOR_MAX_CELLS and F.n <= 7
        method = "tensor" if small_tensor and H.n >= 16 and F.edges else "backtrack"
    if method == "backtrack":
        return _count_backtrack(F, H, c)
    if method == "tensor":
        if H.n ** H.k > _TENSOR_MAX_CELLS:
            raise InvalidParameters("host too large for the tensor route")
        return _count_tensor(F, H, c)
    raise InvalidParameters(f"unknown method {method!r}")


@dataclass(frozen=True)
class DensityEstimate:
    """Monte Carlo estimate of inj[F -> H] / n^f."""

    value: Fraction
    stderr: float
    samples: int
    hits: int
    degenerate: int

    def __float__(self):
        return float(self.value)


def estimate_density(F: KGraph, H: KGraph, samples: int, seed: int, *, chunk: int = 65536) -> DensityEstimate:
    """Sample uniform vertex tuples (numpy PCG64, ``default_rng(seed)``).

    A hit is an injective edge-preserving tuple; ``degenerate`` counts
    edge-preserving tuples that repeat a vertex. ``value`` is hits/samples.
    """
    _check(F, H, None)
    if samples < 1:
        raise InvalidParameters("samples must be at least 1")
    rng = np.random.default_rng(seed)
    n, f = H.n, F.n
    use_tensor = n**H.k <= _TENSOR_MAX_CELLS
    T = adjacency_tensor(H) if use_tensor else None
    hits = degenerate = 0
    left = samples
    while left:
        size = min(chunk, left)
        left -= size
        tup = rng.integers(0, n, size=(size, f)) if n else np.zeros((size, f), dtype=np.int64)
        ok = np.ones(size, dtype=bool)
        for e in F.sorted_edges:
            if use_tensor:
                ok &= T[tuple(tup[:, v] for v in e)].astype(bool)
            else:
                ok &= np.array([tuple(sorted(row[list(e)])) in H.edges for row in tup])
        srt = np.sort(tup, axis=1)
        inj = np.all(srt[:, 1:] != srt[:, :-1], axis=1) if f > 1 else np.ones(size, dtype=bool)
        hits += int(np.count_nonzero(ok & inj))
        degenerate += int(np.count_nonzero(ok & ~inj))
    phat = hits / samples
    return DensityEstimate(Fraction(hits, samples), sqrt(phat * (1 - phat) / samples), samples, hits, degenerate)


def embedding_bound(F: KGraph, c: EmbeddingConstraints | None, params: EmbedBoundParams, n: int) -> Fraction:
    """alpha^(sum d(s_i)) * p^(|F| - sum d(s_i)) * prod |V_j| - gamma * n^(f - m)."""
    c = c or EmbeddingConstraints()
    pinned = [a for a, _ in c.pins]
    dsum = sum(degree(F, [s]) for s in pinned)
    sizes = prod(len(c.targets[v]) if v in c.targets else n for v in range(F.n) if v not in c.pin_map)
    m = len(pinned)
    return params.alpha**dsum * params.p ** (len(F.edges) - dsum) * sizes - params.gamma * n ** (F.n - m)
