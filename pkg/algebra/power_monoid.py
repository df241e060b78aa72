"""
The reduced power monoid P_0(G): subsets of G containing 0 under setwise addition.

Subsets are bitmasks over element indices (SubsetId). The carrier position of
a subset is `mask >> 1`, since bit 0 is always set.
"""
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from algebra.abelian_group import (
    GroupTable,
    classify_invariant_factors,
    group_table,
    quotient_of_table,
    subgroup_table,
)
from algebra.models import GroupElement, GroupSpec, SubsetId, Subgroup
from utils.errors import ContractViolation, InvariantViolation, ResourceBoundExceeded
from utils.settings import get_settings

SubgroupLike = Union[Subgroup, int]


def members(mask: int) -> List[int]:
    """Indices of the set bits of `mask`, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _subgroup_mask(h: SubgroupLike) -> int:
    return h.member_mask if isinstance(h, Subgroup) else h


class PowerMonoidContext:
    """
    Precomputed data for P_0 of one group.

    Sumsets are unions of translates. Each translate is assembled from
    byte-sized lookup tables, so a sumset costs |X| * ceil(|G|/8) lookups.
    Lazily filled caches never change a computed value, so a context can be
    shared freely once built.
    """

    def __init__(self, table: GroupTable, group: Optional[GroupSpec] = None):
        limit = get_settings().carrier_max_order
        if table.size > limit:
            raise ResourceBoundExceeded(
                f"carrier of a group of order {table.size} is not addressable (bound {limit})",
                {"bound": "carrier_max_order", "limit": limit, "observed": table.size},
            )
        self.table = table
        self.group = group if group is not None else GroupSpec(
            invariant_factors=tuple(classify_invariant_factors(table))
        )
        self.order = table.size
        self.labels = table.labels
        self.translation = table.table
        self.carrier_size = 1 << (self.order - 1)
        self.full_mask = (1 << self.order) - 1
        self._chunks = self._build_chunks()
        self._cayley: Optional[np.ndarray] = None
        self._subcontexts: Dict[int, "PowerMonoidContext"] = {}
        self._quotients: Dict[int, Tuple["PowerMonoidContext", Tuple[int, ...]]] = {}
        self._phi_checked: Dict[int, Optional[dict]] = {}

    def _build_chunks(self) -> List[List[List[int]]]:
        n_chunks = (self.order + 7) // 8
        chunks = []
        for x in range(self.order):
            row = self.translation[x]
            per_x = []
            for c in range(n_chunks):
                base = 8 * c
                values = [0] * 256
                for v in range(1, 256):
                    low = v & -v
                    index = base + low.bit_length() - 1
                    bit = 1 << row[index] if index < self.order else 0
                    values[v] = values[v ^ low] | bit
                per_x.append(values)
            chunks.append(per_x)
        return chunks

    def __repr__(self) -> str:
        return f"PowerMonoidContext({self.group.label()}, carrier={self.carrier_size})"

    # -- addressing -----------------------------------------------------------

    def check_subset(self, x: int) -> SubsetId:
        if not x & 1 or x >> self.order:
            raise ContractViolation(f"{x:#x} is not a subset of the group containing 0")
        return SubsetId(x)

    @staticmethod
    def position(x: int) -> int:
        return x >> 1

    @staticmethod
    def subset_at(position: int) -> SubsetId:
        return SubsetId(position << 1 | 1)

    @staticmethod
    def cardinality(x: int) -> int:
        return x.bit_count()

    @staticmethod
    def elements_of(x: int) -> List[int]:
        return members(x)

    def mask_of(self, elements: Iterable[Union[int, GroupElement]]) -> SubsetId:
        mask = 1
        for e in elements:
            mask |= 1 << (e.index if isinstance(e, GroupElement) else e)
        return self.check_subset(mask)

    def render(self, x: int) -> List[int]:
        return members(x)

    def enumerate_carrier(self) -> Iterator[SubsetId]:
        for position in range(self.carrier_size):
            yield SubsetId(position << 1 | 1)

    # -- the operation --------------------------------------------------------

    def translate(self, y: int, x: int) -> int:
        """Mask of y + x (y translated by the element x)."""
        chunks = self._chunks[x]
        result, c = 0, 0
        while y:
            result |= chunks[c][y & 0xFF]
            y >>= 8
            c += 1
        return result

    def sumset(self, x: int, y: int) -> SubsetId:
        if x.bit_count() > y.bit_count():
            x, y = y, x
        result = 0
        while x:
            low = x & -x
            result |= self.translate(y, low.bit_length() - 1)
            x ^= low
        return SubsetId(result)

    def n_fold_sum(self, x: int, n: int) -> SubsetId:
        """nX for n >= 1, by binary doubling."""
        if n < 1:
            raise ContractViolation(f"the n-fold sum is defined for n >= 1, got {n}")
        result: Optional[int] = None
        power = x
        while n:
            if n & 1:
                result = power if result is None else self.sumset(result, power)
            n >>= 1
            if n:
                power = self.sumset(power, power)
        return SubsetId(result)

    def stabilization_index(self, x: int) -> Tuple[int, SubsetId]:
        """Least n >= 1 with nX = (n+1)X, and that stable set."""
        n, current = 1, x
        while True:
            following = self.sumset(current, x)
            if following == current:
                return n, SubsetId(current)
            current = following
            n += 1

    # -- divisibility ---------------------------------------------------------

    def residual(self, x: int, y: int) -> int:
        """{z : X + z is contained in Y}."""
        result = 0
        outside = ~y
        for z in range(self.order):
            if not self.translate(x, z) & outside:
                result |= 1 << z
        return result

    def is_divisible(self, x: int, y: int) -> bool:
        """True iff X divides Y; every witness lies inside residual(X, Y)."""
        if x & ~y:
            return False
        return self.sumset(x, self.residual(x, y)) == y

    def divides(self, x: int, y: int) -> Optional[SubsetId]:
        """The first witness Z (ascending popcount, then mask) with X + Z = Y, or None."""
        if x & ~y:
            return None
        residual = self.residual(x, y)
        if self.sumset(x, residual) != y:
            return None
        rest = members(residual & ~1)
        for k in range(len(rest) + 1):
            candidates = sorted(1 | sum(1 << e for e in combo) for combo in combinations(rest, k))
            for z in candidates:
                if self.sumset(x, z) == y:
                    return SubsetId(z)
        raise InvariantViolation("residual is a witness but no witness was found")

    # -- idempotents and subgroups -----------------------------------------------

    def is_idempotent(self, x: int) -> bool:
        return self.sumset(x, x) == x

    def is_subgroup_set(self, x: int) -> bool:
        return self.table.is_subgroup_mask(x)

    def subgroups(self) -> Tuple[int, ...]:
        return self.table.subgroups()

    def cyclic_mask(self, a: int) -> SubsetId:
        return SubsetId(self.table.closure([a]))

    def punctured(self, a: Union[int, GroupElement]) -> SubsetId:
        """G with the single element a removed (a != 0)."""
        a = a.index if isinstance(a, GroupElement) else a
        if not 0 < a < self.order:
            raise ContractViolation(f"punctured set needs a nonzero element, got {a}")
        return SubsetId(self.full_mask & ~(1 << a))

    # -- subgroups, quotients and the family P_{0,H}(G) -------------------------

    def require_subgroup(self, h: SubgroupLike) -> int:
        mask = _subgroup_mask(h)
        if not self.table.is_subgroup_mask(mask):
            raise InvariantViolation(f"{mask:#x} is not a subgroup")
        return mask

    def divisible_by_H_family(self, h: SubgroupLike) -> Iterator[SubsetId]:
        """The sets H + Z: unions of H-cosets containing H, ascending by mask."""
        return iter(self.family_masks(h))

    def family_masks(self, h: SubgroupLike) -> List[SubsetId]:
        mask = self.require_subgroup(h)
        coset_of, reps, _ = quotient_of_table(self.table, mask)
        cosets = [0] * len(reps)
        for x, k in enumerate(coset_of):
            cosets[k] |= 1 << x
        family = []
        for choice in range(1 << (len(reps) - 1)):
            union = cosets[0]
            for k in members(choice):
                union |= cosets[k + 1]
            family.append(SubsetId(union))
        return sorted(family)

    def family_positions(self, h: SubgroupLike) -> List[int]:
        return [x >> 1 for x in self.family_masks(h)]

    def quotient_context(self, h: SubgroupLike) -> "PowerMonoidContext":
        return self._quotient(h)[0]

    def _quotient(self, h: SubgroupLike) -> Tuple["PowerMonoidContext", Tuple[int, ...]]:
        mask = self.require_subgroup(h)
        if mask not in self._quotients:
            coset_of, _, table = quotient_of_table(self.table, mask)
            self._quotients[mask] = (PowerMonoidContext(table), coset_of)
        return self._quotients[mask]

    def quotient_project(self, h: SubgroupLike, x: int) -> SubsetId:
        """{a + H : a in X} as a mask over coset numbers."""
        _, coset_of = self._quotient(h)
        result = 0
        for a in members(x):
            result |= 1 << coset_of[a]
        return SubsetId(result)

    def quotient_lift(self, h: SubgroupLike, q: int) -> SubsetId:
        """Inverse of quotient_project on the family: the union of the cosets in q."""
        _, coset_of = self._quotient(h)
        result = 0
        for a, k in enumerate(coset_of):
            if q >> k & 1:
                result |= 1 << a
        return SubsetId(result)

    def subgroup_context(self, h: SubgroupLike) -> "PowerMonoidContext":
        mask = self.require_subgroup(h)
        if mask not in self._subcontexts:
            self._subcontexts[mask] = PowerMonoidContext(subgroup_table(self.table, mask))
        return self._subcontexts[mask]

    def to_subgroup_mask(self, h: SubgroupLike, x: int) -> SubsetId:
        """Re-index X (contained in H) through H's own context."""
        mask = _subgroup_mask(h)
        if x & ~mask:
            raise ContractViolation(f"{x:#x} is not contained in the subgroup {mask:#x}")
        local = 0
        for k, a in enumerate(members(mask)):
            if x >> a & 1:
                local |= 1 << k
        return SubsetId(local)

    def from_subgroup_mask(self, h: SubgroupLike, local: int) -> SubsetId:
        result = 0
        for k, a in enumerate(members(_subgroup_mask(h))):
            if local >> k & 1:
                result |= 1 << a
        return SubsetId(result)

    def phi_violation(self, h: SubgroupLike) -> Optional[dict]:
        """
        None when quotient_project is a bijective homomorphism from P_{0,H}(G)
        onto P_0(G/H); otherwise a witness.
        """
        mask = self.require_subgroup(h)
        if mask not in self._phi_checked:
            self._phi_checked[mask] = self._find_phi_violation(mask)
        return self._phi_checked[mask]

    def _find_phi_violation(self, mask: int) -> Optional[dict]:
        qctx = self.quotient_context(mask)
        family = self.family_masks(mask)
        projected = [self.quotient_project(mask, x) for x in family]
        if sorted(projected) != list(qctx.enumerate_carrier()):
            return {"subgroup": members(mask), "reason": "projection is not a bijection onto the quotient carrier"}
        if self.order <= get_settings().table_max_order:
            return self._phi_violation_from_tables(mask, qctx, family, projected)
        for i, x in enumerate(family):
            for j in range(i, len(family)):
                lhs = self.quotient_project(mask, self.sumset(x, family[j]))
                rhs = qctx.sumset(projected[i], projected[j])
                if lhs != rhs:
                    return self._phi_witness(mask, x, family[j], lhs, rhs)
        return None

    def _phi_violation_from_tables(
        self, mask: int, qctx: "PowerMonoidContext", family: List[int], projected: List[int]
    ) -> Optional[dict]:
        positions = np.asarray([x >> 1 for x in family], dtype=np.int64)
        images = np.asarray([q >> 1 for q in projected], dtype=np.int64)
        # carrier position -> quotient position, -1 off the family
        project = np.full(self.carrier_size, -1, dtype=np.int64)
        project[positions] = images
        lhs = project[self.cayley_table()[np.ix_(positions, positions)]]
        rhs = qctx.cayley_table()[np.ix_(images, images)]
        bad = np.argwhere(lhs != rhs)
        if not len(bad):
            return None
        i, j = (int(k) for k in bad[0])
        left = int(lhs[i, j])
        return self._phi_witness(
            mask, family[i], family[j], left << 1 | 1 if left >= 0 else 0, int(rhs[i, j]) << 1 | 1
        )

    @staticmethod
    def _phi_witness(mask: int, x: int, y: int, lhs: int, rhs: int) -> dict:
        return {
            "subgroup": members(mask),
            "x": members(x),
            "y": members(y),
            "projected_sum": members(lhs),
            "sum_of_projections": members(rhs),
        }

    def phi_is_isomorphism(self, h: SubgroupLike) -> bool:
        return self.phi_violation(h) is None

    # -- Cayley table -------------------------------------------------------------

    def cayley_table(self) -> np.ndarray:
        """Full sumset table indexed by carrier position (read-only int32 array)."""
        if self._cayley is None:
            limit = get_settings().table_max_order
            if self.order > limit:
                raise ResourceBoundExceeded(
                    f"Cayley table for |G| = {self.order} exceeds the bound {limit}",
                    {"bound": "table_max_order", "limit": limit, "observed": self.order},
                )
            size = self.carrier_size
            masks = np.arange(size, dtype=np.int64) * 2 + 1
            translated = []
            for x in range(self.order):
                shifted = np.zeros(size, dtype=np.int64)
                for c, values in enumerate(self._chunks[x]):
                    lookup = np.asarray(values, dtype=np.int64)
                    shifted |= lookup[(masks >> (8 * c)) & 0xFF]
                translated.append(shifted)
            table = np.empty((size, size), dtype=np.int32)
            for position in range(size):
                row = np.zeros(size, dtype=np.int64)
                for x in members(position << 1 | 1):
                    row |= translated[x]
                table[position] = row >> 1
            table.setflags(write=False)
            self._cayley = table
            logger.debug(f"{self.group.label()}: Cayley table {size}x{size} built")
        return self._cayley

    def cayley_frame(self) -> pd.DataFrame:
        table = self.cayley_table()
        index = pd.RangeIndex(self.carrier_size, name="carrier")
        return pd.DataFrame(table, index=index, columns=list(range(self.carrier_size)))


@lru_cache(maxsize=None)
def make_context(g: GroupSpec) -> PowerMonoidContext:
    return PowerMonoidContext(group_table(g), g)
