"""
Finite abelian groups in invariant-factor form.

Elements are addressed by a mixed-radix index (least-significant factor
first), so element 0 is the identity and bitmasks over indices are stable
across runs.
"""
from collections import defaultdict
from functools import lru_cache
from itertools import product
from math import gcd, lcm, prod
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger
from sympy import factorint

from algebra.models import GroupAutMap, GroupElement, GroupSpec, QuotientGroup, Subgroup
from utils.errors import ContractViolation, GroupParseError, InvariantViolation, ResourceBoundExceeded
from utils.settings import get_settings

ElementLike = Union[GroupElement, int, Sequence[int]]


def invariant_chain(factors: Iterable[int]) -> Tuple[int, ...]:
    """Regroup arbitrary cyclic factors into the invariant-factor chain (CRT)."""
    exponents: Dict[int, List[int]] = defaultdict(list)
    for n in factors:
        for p, e in factorint(n).items():
            exponents[p].append(e)
    for exps in exponents.values():
        exps.sort(reverse=True)
    length = max((len(exps) for exps in exponents.values()), default=0)
    chain = [
        prod(p ** exps[k] for p, exps in exponents.items() if k < len(exps))
        for k in range(length)
    ]
    return tuple(reversed(chain))


def make_group(factors: Iterable[int]) -> GroupSpec:
    factors = list(factors)
    for n in factors:
        if not isinstance(n, int) or n <= 1:
            raise ContractViolation(f"cyclic factors must be integers >= 2, got {n!r}")
    return GroupSpec(invariant_factors=invariant_chain(factors))


def parse_group(text: str) -> GroupSpec:
    """Parse a literal such as "2,4"; "" and "1" denote the trivial group."""
    cleaned = text.strip()
    if cleaned in ("", "1"):
        return GroupSpec(invariant_factors=())
    try:
        factors = [int(part) for part in cleaned.split(",")]
    except ValueError:
        raise GroupParseError(f"not a comma-separated list of integers: {text!r}")
    try:
        return make_group(factors)
    except ContractViolation as e:
        raise GroupParseError(str(e))


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

def coords_of(g: GroupSpec, index: int) -> Tuple[int, ...]:
    if not 0 <= index < g.order:
        raise ContractViolation(f"element index {index} out of range for {g.label()}")
    coords = []
    for n in g.invariant_factors:
        index, c = divmod(index, n)
        coords.append(c)
    return tuple(coords)


def index_of(g: GroupSpec, coords: Sequence[int]) -> int:
    if len(coords) != g.rank:
        raise ContractViolation(f"expected {g.rank} coordinates, got {len(coords)}")
    index = 0
    for c, n in reversed(list(zip(coords, g.invariant_factors))):
        index = index * n + c % n
    return index


def element(g: GroupSpec, value: ElementLike) -> GroupElement:
    if isinstance(value, GroupElement):
        return value
    if isinstance(value, int):
        return GroupElement(coords=coords_of(g, value), index=value)
    index = index_of(g, value)
    return GroupElement(coords=coords_of(g, index), index=index)


def add(g: GroupSpec, a: ElementLike, b: ElementLike) -> GroupElement:
    a, b = element(g, a), element(g, b)
    coords = tuple((x + y) % n for x, y, n in zip(a.coords, b.coords, g.invariant_factors))
    return GroupElement(coords=coords, index=index_of(g, coords))


def negate(g: GroupSpec, a: ElementLike) -> GroupElement:
    a = element(g, a)
    coords = tuple(-x % n for x, n in zip(a.coords, g.invariant_factors))
    return GroupElement(coords=coords, index=index_of(g, coords))


def element_order(g: GroupSpec, a: ElementLike) -> int:
    a = element(g, a)
    return lcm(1, *(n // gcd(c, n) for c, n in zip(a.coords, g.invariant_factors)))


# ---------------------------------------------------------------------------
# Addition tables
# ---------------------------------------------------------------------------

class GroupTable:
    """
    Addition table of a finite abelian group on indices 0..n-1, 0 the identity.

    Power monoid contexts are built on top of a GroupTable, which lets the same
    code serve G itself, a subgroup H (relabelled by ascending parent index)
    and a quotient G/H (labelled by coset number).
    """

    def __init__(self, table: Sequence[Sequence[int]], labels: Optional[Sequence[int]] = None, validate: bool = True):
        self.table: Tuple[Tuple[int, ...], ...] = tuple(tuple(row) for row in table)
        self.size = len(self.table)
        self.labels: Tuple[int, ...] = tuple(labels) if labels is not None else tuple(range(self.size))
        if validate:
            self._validate()
        self.neg: Tuple[int, ...] = tuple(row.index(0) for row in self.table)
        self.element_orders: Tuple[int, ...] = tuple(self._order_of(a) for a in range(self.size))
        self._subgroups: Optional[Tuple[int, ...]] = None

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> "GroupTable":
        """Direct product table of C_{f_1} (+) ... in mixed-radix indexing, without normalization."""
        factors = tuple(factors)
        size = prod(factors)
        digits = []
        for index in range(size):
            coords = []
            for n in factors:
                index, c = divmod(index, n)
                coords.append(c)
            digits.append(coords)

        def encode(coords: Sequence[int]) -> int:
            index = 0
            for c, n in reversed(list(zip(coords, factors))):
                index = index * n + c % n
            return index

        table = [
            [encode([x + y for x, y in zip(digits[a], digits[b])]) for b in range(size)]
            for a in range(size)
        ]
        return cls(table, validate=False)

    def _validate(self) -> None:
        n = self.size
        if n == 0:
            raise InvariantViolation("empty group table")
        full = list(range(n))
        for a, row in enumerate(self.table):
            if len(row) != n or sorted(row) != full:
                raise InvariantViolation(f"row {a} of the table is not a permutation")
        if list(self.table[0]) != full:
            raise InvariantViolation("0 is not the identity of the table")
        for a in range(n):
            for b in range(a + 1, n):
                if self.table[a][b] != self.table[b][a]:
                    raise InvariantViolation(f"table is not abelian: {a}+{b} != {b}+{a}")
        for a in range(n):
            row_a = self.table[a]
            for b in range(n):
                ab = row_a[b]
                for c in range(n):
                    if self.table[ab][c] != row_a[self.table[b][c]]:
                        raise InvariantViolation(f"table is not associative at ({a}, {b}, {c})")

    def _order_of(self, a: int) -> int:
        x, n = a, 1
        while x != 0:
            x = self.table[x][a]
            n += 1
        return n

    def add(self, a: int, b: int) -> int:
        return self.table[a][b]

    def multiple(self, n: int, a: int) -> int:
        x = 0
        for _ in range(n % self.element_orders[a]):
            x = self.table[x][a]
        return x

    def closure(self, generators: Iterable[int]) -> int:
        """Mask of the subgroup generated by `generators` (0 always included)."""
        gens = [s for s in generators if s != 0]
        members, mask = [0], 1
        i = 0
        while i < len(members):
            row = self.table[members[i]]
            i += 1
            for s in gens:
                t = row[s]
                if not mask >> t & 1:
                    mask |= 1 << t
                    members.append(t)
        return mask

    def is_subgroup_mask(self, mask: int) -> bool:
        if not mask & 1 or mask >> self.size:
            return False
        members = [i for i in range(self.size) if mask >> i & 1]
        for a in members:
            row = self.table[a]
            if not mask >> self.neg[a] & 1:
                return False
            for b in members:
                if not mask >> row[b] & 1:
                    return False
        return True

    def subgroups(self) -> Tuple[int, ...]:
        """All subgroup masks sorted by (order, mask), by closure BFS over generator extensions."""
        if self._subgroups is None:
            found = {1}
            frontier = [1]
            while frontier:
                next_frontier = []
                for mask in frontier:
                    members = [i for i in range(self.size) if mask >> i & 1]
                    for x in range(self.size):
                        if mask >> x & 1:
                            continue
                        extended = self.closure(members + [x])
                        if extended not in found:
                            found.add(extended)
                            next_frontier.append(extended)
                frontier = next_frontier
            self._subgroups = tuple(sorted(found, key=lambda m: (m.bit_count(), m)))
        return self._subgroups


@lru_cache(maxsize=None)
def group_table(g: GroupSpec) -> GroupTable:
    return GroupTable.from_factors(g.invariant_factors)


def subgroup_table(tab: GroupTable, mask: int) -> GroupTable:
    """The table of the subgroup `mask`, elements relabelled in ascending index order."""
    members = [i for i in range(tab.size) if mask >> i & 1]
    local = {x: k for k, x in enumerate(members)}
    table = [[local[tab.table[a][b]] for b in members] for a in members]
    return GroupTable(table, labels=members, validate=False)


def quotient_of_table(tab: GroupTable, mask: int) -> Tuple[Tuple[int, ...], Tuple[int, ...], GroupTable]:
    """(coset_of, coset_reps, table of G/H) for the subgroup `mask` of `tab`."""
    if not tab.is_subgroup_mask(mask):
        raise InvariantViolation(f"mask {mask:#x} is not a subgroup")
    members = [i for i in range(tab.size) if mask >> i & 1]
    coset_of = [-1] * tab.size
    reps: List[int] = []
    for x in range(tab.size):
        if coset_of[x] != -1:
            continue
        k = len(reps)
        reps.append(x)
        for h in members:
            coset_of[tab.table[x][h]] = k
    table = [[coset_of[tab.table[ri][rj]] for rj in reps] for ri in reps]
    return tuple(coset_of), tuple(reps), GroupTable(table, labels=reps, validate=False)


# ---------------------------------------------------------------------------
# Subgroups and quotients
# ---------------------------------------------------------------------------

def check_order_bound(g: GroupSpec, limit: Optional[int], what: str) -> None:
    limit = limit if limit is not None else get_settings().max_group_order
    if g.order > limit:
        raise ResourceBoundExceeded(
            f"{what} refused: |G| = {g.order} exceeds the bound {limit}",
            {"bound": "max_group_order", "limit": limit, "observed": g.order},
        )


def subgroup_generated(g: GroupSpec, gens: Iterable[ElementLike]) -> Subgroup:
    indices = [element(g, x).index for x in gens]
    return Subgroup(member_mask=group_table(g).closure(indices))


def cyclic_subgroup(g: GroupSpec, a: ElementLike) -> Subgroup:
    return subgroup_generated(g, [a])


def is_subgroup_mask(g: GroupSpec, mask: int) -> bool:
    return group_table(g).is_subgroup_mask(mask)


def enumerate_subgroups(g: GroupSpec, limit: Optional[int] = None) -> List[Subgroup]:
    check_order_bound(g, limit, "subgroup enumeration")
    masks = group_table(g).subgroups()
    logger.debug(f"{g.label()}: {len(masks)} subgroups")
    return [Subgroup(member_mask=m) for m in masks]


def quotient(g: GroupSpec, h: Subgroup) -> QuotientGroup:
    coset_of, reps, table = quotient_of_table(group_table(g), h.member_mask)
    return QuotientGroup(parent=g, modulus=h, coset_reps=reps, coset_of=coset_of, table=table.table)


def classify_invariant_factors(group: Union[GroupSpec, QuotientGroup, GroupTable]) -> List[int]:
    """
    Invariant factors of a group given as a spec, a quotient or a bare table.

    For each prime p the p-part's partition is read off the counts of elements
    whose order divides p^k; the parts are then recombined by CRT.
    """
    if isinstance(group, GroupSpec):
        tab = group_table(group)
    elif isinstance(group, QuotientGroup):
        tab = GroupTable(group.table)
    else:
        tab = group
    n = tab.size
    if n == 1:
        return []
    exponents: Dict[int, List[int]] = {}
    for p, e in factorint(n).items():
        logs = []
        for k in range(e + 1):
            count = sum(1 for o in tab.element_orders if (p ** k) % o == 0)
            log, rest = 0, count
            while rest % p == 0 and rest > 1:
                rest //= p
                log += 1
            if rest != 1:
                raise InvariantViolation(f"{count} elements of order dividing {p}^{k} is not a power of {p}")
            logs.append(log)
        at_least = [logs[k] - logs[k - 1] for k in range(1, e + 1)] + [0]
        parts: List[int] = []
        for k in range(e, 0, -1):
            parts.extend([k] * (at_least[k - 1] - at_least[k]))
        if sum(parts) != e:
            raise InvariantViolation(f"inconsistent {p}-part: {parts}")
        exponents[p] = parts
    length = max(len(parts) for parts in exponents.values())
    chain = [
        prod(p ** parts[k] for p, parts in exponents.items() if k < len(parts))
        for k in range(length)
    ]
    return list(reversed(chain))


# ---------------------------------------------------------------------------
# Group automorphisms
# ---------------------------------------------------------------------------

def validate_group_automorphism(tab: GroupTable, image: Sequence[int]) -> bool:
    n = tab.size
    if len(image) != n or sorted(image) != list(range(n)) or image[0] != 0:
        return False
    for a in range(n):
        row, ia = tab.table[a], image[a]
        image_row = tab.table[ia]
        for b in range(a, n):
            if image[row[b]] != image_row[image[b]]:
                return False
    return True


def identity_group_map(size: int) -> GroupAutMap:
    return GroupAutMap(image=tuple(range(size)))


def compose_group_maps(h1: GroupAutMap, h2: GroupAutMap) -> GroupAutMap:
    """h1 after h2."""
    return GroupAutMap(image=tuple(h1.image[x] for x in h2.image))


def invert_group_map(h: GroupAutMap) -> GroupAutMap:
    inverse = [0] * len(h.image)
    for x, y in enumerate(h.image):
        inverse[y] = x
    return GroupAutMap(image=tuple(inverse))


def apply_group_map_to_mask(image: Sequence[int], mask: int) -> int:
    result = 0
    i = 0
    while mask:
        if mask & 1:
            result |= 1 << image[i]
        mask >>= 1
        i += 1
    return result


def _basis(g: GroupSpec) -> List[int]:
    return [index_of(g, tuple(int(i == j) for j in range(g.rank))) for i in range(g.rank)]


def _extend(g: GroupSpec, tab: GroupTable, images: Sequence[int]) -> Tuple[int, ...]:
    """Map sum c_i e_i to sum c_i b_i, with c_i the canonical coordinates."""
    multiples = [
        [tab.multiple(c, b) for c in range(n)]
        for b, n in zip(images, g.invariant_factors)
    ]
    image = []
    for index in range(g.order):
        x = 0
        for i, n in enumerate(g.invariant_factors):
            index, c = divmod(index, n)
            x = tab.table[x][multiples[i][c]]
        image.append(x)
    return tuple(image)


def enumerate_group_automorphisms(g: GroupSpec, limit: Optional[int] = None) -> List[GroupAutMap]:
    """All automorphisms of G, by choosing well-defined images for the canonical basis."""
    check_order_bound(g, limit, "group automorphism enumeration")
    tab = group_table(g)
    candidates = [
        [b for b in range(1, g.order) if n % tab.element_orders[b] == 0]
        for n in g.invariant_factors
    ]
    found = set()
    for images in product(*candidates):
        image = _extend(g, tab, images)
        if len(set(image)) == g.order:
            found.add(image)
    logger.debug(f"{g.label()}: |Aut(G)| = {len(found)}")
    return [GroupAutMap(image=image) for image in sorted(found)]


def brute_force_group_automorphisms(g: GroupSpec, limit: Optional[int] = None) -> List[GroupAutMap]:
    """
    Independent oracle: every tuple of basis images over all of G, extended by
    coordinates and kept only if the full homomorphism validator accepts it.
    """
    check_order_bound(g, limit, "brute-force automorphism oracle")
    tab = group_table(g)
    found = set()
    for images in product(range(g.order), repeat=g.rank):
        image = []
        for index in range(g.order):
            x = 0
            for i, n in enumerate(g.invariant_factors):
                index, c = divmod(index, n)
                # repeated addition, no order reduction: ill-defined maps fail validation
                y = 0
                for _ in range(c):
                    y = tab.table[y][images[i]]
                x = tab.table[x][y]
            image.append(x)
        if validate_group_automorphism(tab, image):
            found.add(tuple(image))
    return [GroupAutMap(image=image) for image in sorted(found)]


def automorphism_count_formula(g: GroupSpec) -> int:
    """Closed-form |Aut(G)|, multiplied over the primary components."""
    exponents: Dict[int, List[int]] = defaultdict(list)
    for n in g.invariant_factors:
        for p, e in factorint(n).items():
            exponents[p].append(e)
    total = 1
    for p, es in exponents.items():
        es = sorted(es)
        m = len(es)
        for k in range(1, m + 1):
            ek = es[k - 1]
            d = max(l for l in range(1, m + 1) if es[l - 1] == ek)
            c = min(l for l in range(1, m + 1) if es[l - 1] == ek)
            total *= p ** d - p ** (k - 1)
            total *= p ** (ek * (m - d))
            total *= p ** ((ek - 1) * (m - c + 1))
    return total


# ---------------------------------------------------------------------------
# Classification of all groups of bounded order
# ---------------------------------------------------------------------------

def _partitions(n: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def groups_of_order(n: int) -> List[GroupSpec]:
    if n < 1:
        raise ContractViolation(f"group order must be positive, got {n}")
    if n == 1:
        return [GroupSpec(invariant_factors=())]
    per_prime = [
        [[p ** part for part in partition] for partition in _partitions(e)]
        for p, e in sorted(factorint(n).items())
    ]
    groups = {make_group([q for powers in choice for q in powers]) for choice in product(*per_prime)}
    return sorted(groups, key=lambda spec: spec.invariant_factors)


def abelian_groups_up_to(n: int) -> List[GroupSpec]:
    """Every abelian group of order <= n, sorted by (order, invariant factors)."""
    return [spec for order in range(1, n + 1) for spec in groups_of_order(order)]


def invariant_chains_of_order(n: int) -> List[Tuple[int, ...]]:
    """Direct enumeration of divisibility chains with product n (cross-check)."""
    chains: List[Tuple[int, ...]] = []

    def extend(prefix: Tuple[int, ...], remaining: int) -> None:
        if remaining == 1:
            chains.append(prefix)
            return
        start = prefix[-1] if prefix else 2
        for d in range(start, remaining + 1):
            if remaining % d == 0 and (not prefix or d % prefix[-1] == 0):
                extend(prefix + (d,), remaining // d)

    extend((), n)
    return sorted(chains)
