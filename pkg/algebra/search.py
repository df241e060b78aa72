"""
Backtracking search for the automorphisms of P_0(G) that fix every 2-element set.

Every pruning rule below follows from the homomorphism property alone:

- f(X + {0,a}) = f(X) + {0,a}, so the chain X, X + {0,a}, X + 2{0,a}, ... is
  carried onto the chain of f(X), and equalities inside it are preserved.
- every subgroup is a sum of multiples of 2-element sets, hence fixed.
- {0,a} divides X iff {0,a} divides f(X), and more generally divisibility
  between assigned sets is preserved.

Sets with different signatures can therefore never be swapped, and candidates
for a set are drawn from its signature class only. Complete assignments are
still confirmed with the raw definition check.
"""
import time
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Tuple

from loguru import logger

from algebra.abelian_group import check_order_bound
from algebra.models import MonoidMap, SearchStatistics
from algebra.power_monoid import PowerMonoidContext
from utils.errors import ResourceBoundExceeded
from utils.settings import get_settings

Confirm = Callable[[PowerMonoidContext, MonoidMap], bool]


def set_signature(ctx: PowerMonoidContext, x: int, subgroup_masks: Optional[FrozenSet[int]] = None) -> Hashable:
    """Invariant of X under every automorphism with trivial pullback."""
    if subgroup_masks is None:
        subgroup_masks = frozenset(ctx.subgroups())
    seen: Dict[int, int] = {}

    def label(mask: int) -> Hashable:
        if mask in subgroup_masks:
            return ("H", mask)
        if mask not in seen:
            seen[mask] = len(seen)
        return seen[mask]

    chains: List[Hashable] = [label(x)]
    for a in range(1, ctx.order):
        two_set = 1 | 1 << a
        current, steps = x, []
        for _ in range(ctx.table.element_orders[a] - 1):
            current = ctx.sumset(current, two_set)
            steps.append(label(current))
        chains.append(tuple(steps))
    divisors = tuple(a for a in range(1, ctx.order) if ctx.is_divisible(1 | 1 << a, x))
    return tuple(chains), divisors


@dataclass
class _Frame:
    """One open decision: the set at `p` and the candidates left in its class."""

    cursor: int
    p: int
    candidates: List[int]
    next: int = 0
    mark: int = 0
    decided: bool = False


class TrivialPullbackSearch:
    """
    Exhaustive search over carrier images, in ascending (cardinality, mask) order.

    {0} and the 2-element sets are pre-assigned to themselves. Each assignment
    is propagated through sums with the 2-element sets and with every decision
    made so far; a clash with an existing assignment or with injectivity
    is a conflict.
    """

    def __init__(self, ctx: PowerMonoidContext, confirm: Confirm, budget: Optional[int] = None):
        check_order_bound(ctx.group, None, "trivial-pullback search")
        self.ctx = ctx
        self.confirm = confirm
        self.budget = budget if budget is not None else get_settings().budget
        self.logger = logger.bind(component="trivial-pullback-search")

        size = ctx.carrier_size
        self.order = sorted(range(size), key=lambda p: ((p << 1 | 1).bit_count(), p))
        subgroup_masks = frozenset(ctx.subgroups())
        self.signatures = [set_signature(ctx, ctx.subset_at(p), subgroup_masks) for p in range(size)]
        self.buckets: Dict[Hashable, List[int]] = {}
        for p in range(size):
            self.buckets.setdefault(self.signatures[p], []).append(p)
        self.two_sets = [1 | 1 << a for a in range(1, ctx.order)]

        self.image = [-1] * size
        self.preimage = [-1] * size
        self.trail: List[int] = []
        self.decisions: List[Tuple[int, int]] = []
        self.solutions: List[MonoidMap] = []
        self._divisible: Dict[Tuple[int, int], bool] = {}
        self._counters = dict(nodes=0, decisions=0, forced=0, conflicts=0, rejected=0)
        self._started = time.perf_counter()

    def run(self) -> Tuple[List[MonoidMap], SearchStatistics]:
        self._started = time.perf_counter()
        self.logger.info(
            f"{self.ctx.group.label()}: searching {self.ctx.carrier_size} sets in {len(self.buckets)} signature classes"
        )
        seeded = self._assign(0, 0)
        for t in self.two_sets:
            seeded = seeded and self._assign(t >> 1, t >> 1)
        if seeded:
            self._search()
        self.solutions.sort(key=lambda f: f.image)
        stats = self._statistics(time.perf_counter() - self._started)
        self.logger.debug(f"search statistics: {stats.model_dump()}")
        self.logger.info(f"{self.ctx.group.label()}: {len(self.solutions)} automorphisms with trivial pullback")
        return self.solutions, stats

    def _statistics(self, elapsed: float) -> SearchStatistics:
        return SearchStatistics(
            **self._counters,
            solutions=len(self.solutions),
            elapsed_seconds=elapsed,
            budget=self.budget,
        )

    def _is_divisible(self, x: int, y: int) -> bool:
        key = (x, y)
        if key not in self._divisible:
            self._divisible[key] = self.ctx.is_divisible(x, y)
        return self._divisible[key]

    def _compatible(self, x: int, y: int) -> bool:
        for dx, dy in self.decisions:
            if self._is_divisible(x, dx) != self._is_divisible(y, dy):
                return False
            if self._is_divisible(dx, x) != self._is_divisible(dy, y):
                return False
        return True

    def _assign(self, p: int, q: int) -> bool:
        ctx = self.ctx
        queue = [(p, q)]
        while queue:
            p, q = queue.pop()
            if self.image[p] != -1:
                if self.image[p] != q:
                    return False
                continue
            if self.preimage[q] != -1 or self.signatures[p] != self.signatures[q]:
                return False
            self.image[p] = q
            self.preimage[q] = p
            self.trail.append(p)
            self._counters["forced"] += 1
            x, y = p << 1 | 1, q << 1 | 1
            for t in self.two_sets:
                queue.append((ctx.sumset(x, t) >> 1, ctx.sumset(y, t) >> 1))
            for dx, dy in self.decisions:
                queue.append((ctx.sumset(x, dx) >> 1, ctx.sumset(y, dy) >> 1))
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            p = self.trail.pop()
            self.preimage[self.image[p]] = -1
            self.image[p] = -1

    def _search(self) -> None:
        """Depth-first over the search order, with an explicit stack of open decisions."""
        size = len(self.order)
        frames: List[_Frame] = []
        cursor, descend = 0, True
        while True:
            if descend:
                self._enter_node()
                while cursor < size and self.image[self.order[cursor]] != -1:
                    cursor += 1
                if cursor == size:
                    self._accept()
                else:
                    p = self.order[cursor]
                    frames.append(_Frame(cursor=cursor, p=p, candidates=self.buckets[self.signatures[p]]))
            if not frames:
                return
            frame = frames[-1]
            if frame.decided:
                self.decisions.pop()
                self._undo(frame.mark)
                frame.decided = False
            descend = self._try_next(frame)
            if descend:
                cursor = frame.cursor + 1
            else:
                frames.pop()

    def _enter_node(self) -> None:
        self._counters["nodes"] += 1
        if self._counters["nodes"] > self.budget:
            stats = self._statistics(time.perf_counter() - self._started)
            raise ResourceBoundExceeded(
                f"{self.ctx.group.label()}: search budget of {self.budget} nodes exhausted",
                {"bound": "budget", "limit": self.budget, "observed": self._counters["nodes"], **stats.model_dump()},
            )

    def _try_next(self, frame: "_Frame") -> bool:
        """Decide the frame's set on its next viable candidate; False once the class is exhausted."""
        x = frame.p << 1 | 1
        while frame.next < len(frame.candidates):
            q = frame.candidates[frame.next]
            frame.next += 1
            if self.preimage[q] != -1:
                continue
            y = q << 1 | 1
            if not self._compatible(x, y):
                self._counters["rejected"] += 1
                continue
            frame.mark = len(self.trail)
            self._counters["decisions"] += 1
            self.decisions.append((x, y))
            if self._assign(frame.p, q):
                frame.decided = True
                return True
            self._counters["conflicts"] += 1
            self.decisions.pop()
            self._undo(frame.mark)
        return False

    def _accept(self) -> None:
        candidate = MonoidMap(image=tuple(self.image))
        if self.confirm(self.ctx, candidate):
            self.solutions.append(candidate)
        else:
            self._counters["rejected"] += 1
            self.logger.debug(f"complete assignment rejected by the definition check: {candidate.image}")
