"""Injective constraint search shared by clique, embedding and packing code.

Variables take pairwise-distinct values in ``range(n)``. Each constraint is a
scope of variables plus a uniform graph; it holds when the *set* of values on
the scope is an edge of the graph. Forward checking uses the graph's
``extensions`` index, so a variable's candidates are already consistent with
every constraint in which it is the last unassigned member.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import BudgetExceeded
from .hypercore import KGraph


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]
    graph: KGraph


class InjectiveSearch:
    """Backtracking over injective assignments ``var -> vertex``.

    ``domains`` restricts individual variables; ``allowed`` restricts all of
    them; ``fixed`` pre-assigns variables (checked, not trusted). ``order`` is
    the static variable order; by default pins come first, then a greedy
    most-constrained ordering.
    """

    def __init__(
        self,
        nvars: int,
        n: int,
        constraints: Sequence[Constraint],
        *,
        domains: Mapping[int, frozenset[int] | set[int]] | None = None,
        allowed: frozenset[int] | set[int] | None = None,
        fixed: Mapping[int, int] | None = None,
        order: Sequence[int] | None = None,
        node_cap: int | None = None,
    ):
        self.nvars = nvars
        self.n = n
        self.constraints = [c for c in constraints]
        self.node_cap = node_cap
        self.nodes = 0
        universe = frozenset(range(n)) if allowed is None else frozenset(allowed)
        self.domains = [universe] * nvars
        for v, dom in (domains or {}).items():
            self.domains[v] = self.domains[v] & frozenset(dom)
        self.fixed = dict(fixed or {})
        self.by_var: list[list[Constraint]] = [[] for _ in range(nvars)]
        for c in self.constraints:
            for v in c.scope:
                self.by_var[v].append(c)
        self.order = list(order) if order is not None else self._default_order()
        self.feasible = self._check_fixed()

    def _default_order(self) -> list[int]:
        chosen = list(self.fixed)
        rest = [v for v in range(self.nvars) if v not in self.fixed]
        done = set(chosen)
        while rest:
            def key(v):
                linked = sum(1 for c in self.by_var[v] if any(u in done for u in c.scope))
                return (-linked, -len(self.by_var[v]), len(self.domains[v]), v)

            best = min(rest, key=key)
            rest.remove(best)
            chosen.append(best)
            done.add(best)
        return chosen

    def _check_fixed(self) -> bool:
        values = list(self.fixed.values())
        if len(set(values)) != len(values):
            return False
        for v, x in self.fixed.items():
            if x not in self.domains[v]:
                return False
        for c in self.constraints:
            img = [self.fixed[u] for u in c.scope if u in self.fixed]
            if len(img) == len(c.scope):
                if tuple(sorted(img)) not in c.graph.edges:
                    return False
            elif img and tuple(sorted(img)) not in c.graph.extensions:
                return False
        return True

    def _candidates(self, v: int, assign: dict[int, int], used: set[int]) -> set[int] | frozenset[int]:
        cand = self.domains[v]
        for c in self.by_var[v]:
            img = tuple(sorted(assign[u] for u in c.scope if u in assign))
            ext = c.graph.extensions.get(img)
            if ext is None:
                return frozenset()
            cand = cand & ext
            if not cand:
                return cand
        return cand - used if used else cand

    def _tick(self):
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise BudgetExceeded(f"search exceeded {self.node_cap} nodes", self.nodes)

    def count(self) -> int:
        if not self.feasible:
            return 0
        free = [v for v in self.order if v not in self.fixed]
        assign = dict(self.fixed)
        used = set(assign.values())
        if not free:
            return 1
        last = len(free) - 1

        def rec(i: int) -> int:
            self._tick()
            v = free[i]
            cand = self._candidates(v, assign, used)
            if i == last:
                return len(cand)
            total = 0
            for x in cand:
                assign[v] = x
                used.add(x)
                total += rec(i + 1)
                used.discard(x)
                del assign[v]
            return total

        return rec(0)

    def solutions(self, rng: random.Random | None = None) -> Iterator[tuple[int, ...]]:
        """Yield full assignments as tuples indexed by variable.

        Candidates are tried in ascending order, or shuffled when ``rng`` is given.
        With the natural variable order this yields tuples lexicographically.
        """
        if not self.feasible:
            return
        free = [v for v in self.order if v not in self.fixed]
        assign = dict(self.fixed)
        used = set(assign.values())

        def rec(i: int):
            if i == len(free):
                yield tuple(assign[v] for v in range(self.nvars))
                return
            self._tick()
            v = free[i]
            cand = sorted(self._candidates(v, assign, used))
            if rng is not None:
                rng.shuffle(cand)
            for x in cand:
                assign[v] = x
                used.add(x)
                yield from rec(i + 1)
                used.discard(x)
                del assign[v]

        yield from rec(0)

    def first(self, rng: random.Random | None = None) -> tuple[int, ...] | None:
        return next(self.solutions(rng), None)
