"""
Automorphisms of P_0(G).

Maps are MonoidMap image tables over carrier positions. Augmentations come
from Aut(G); the automorphisms fixing every 2-element set come from
TrivialPullbackSearch; every automorphism is an augmentation composed with
one of those.
"""
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from algebra.abelian_group import (
    apply_group_map_to_mask,
    enumerate_group_automorphisms,
    group_table,
    invert_group_map,
    validate_group_automorphism,
)
from algebra.models import GroupAutMap, MonoidMap, PullbackResult, SearchStatistics, SubsetId
from algebra.power_monoid import PowerMonoidContext, SubgroupLike, members
from algebra.search import TrivialPullbackSearch
from utils.errors import ContractViolation, InvariantViolation, ResourceBoundExceeded, TheoremViolation
from utils.settings import get_settings


def identity_map(ctx: PowerMonoidContext) -> MonoidMap:
    return MonoidMap(image=tuple(range(ctx.carrier_size)))


def is_identity(f: MonoidMap) -> bool:
    return f.is_identity()


def apply(ctx: PowerMonoidContext, f: MonoidMap, x: int) -> SubsetId:
    """f(X) as a mask."""
    return ctx.subset_at(f.image[ctx.position(x)])


def map_listing(ctx: PowerMonoidContext, f: MonoidMap) -> List[Dict[str, List[int]]]:
    """Human-readable form: every subset with its image, as element lists."""
    return [
        {"subset": ctx.render(x), "image": ctx.render(apply(ctx, f, x))}
        for x in ctx.enumerate_carrier()
    ]


def augmentation(ctx: PowerMonoidContext, h: Union[GroupAutMap, Sequence[int]]) -> MonoidMap:
    """F_h: X -> {h(x) : x in X}."""
    image = h.image if isinstance(h, GroupAutMap) else tuple(h)
    if not validate_group_automorphism(ctx.table, image):
        raise InvariantViolation(f"{list(image)} is not an automorphism of {ctx.group.label()}")
    return MonoidMap(
        image=tuple(apply_group_map_to_mask(image, x) >> 1 for x in ctx.enumerate_carrier())
    )


def pullback(ctx: PowerMonoidContext, f: MonoidMap) -> PullbackResult:
    """The group map g with f({0,a}) = {0,g(a)}."""
    image = [0] * ctx.order
    for a in range(1, ctx.order):
        y = apply(ctx, f, 1 | 1 << a)
        if y.bit_count() != 2:
            raise TheoremViolation(
                "a 2-element set is not mapped to a 2-element set",
                {"subset": [0, a], "image": members(y)},
            )
        image[a] = (y & ~1).bit_length() - 1
    if not validate_group_automorphism(ctx.table, image):
        raise TheoremViolation("pullback is not an automorphism of G", {"pullback": image})
    g = GroupAutMap(image=tuple(image))
    return PullbackResult(map=g, trivial=g.is_identity())


def is_monoid_automorphism(ctx: PowerMonoidContext, f: MonoidMap) -> bool:
    """Raw definition check: a permutation fixing {0} with f(X+Y) = f(X)+f(Y) for all pairs."""
    size = ctx.carrier_size
    image = f.image
    if len(image) != size or image[0] != 0 or sorted(image) != list(range(size)):
        return False
    if ctx.order <= get_settings().table_max_order:
        table = ctx.cayley_table()
        perm = np.asarray(image, dtype=np.int64)
        return bool(np.array_equal(perm[table], table[np.ix_(perm, perm)]))
    for p in range(size):
        x, fx = ctx.subset_at(p), ctx.subset_at(image[p])
        for q in range(p, size):
            lhs = image[ctx.position(ctx.sumset(x, ctx.subset_at(q)))]
            rhs = ctx.position(ctx.sumset(fx, ctx.subset_at(image[q])))
            if lhs != rhs:
                return False
    return True


def compose(ctx: PowerMonoidContext, f1: MonoidMap, f2: MonoidMap) -> MonoidMap:
    """f1 after f2."""
    if len(f1.image) != ctx.carrier_size or len(f2.image) != ctx.carrier_size:
        raise ContractViolation("maps do not belong to this carrier")
    return MonoidMap(image=tuple(f1.image[p] for p in f2.image))


def invert(ctx: PowerMonoidContext, f: MonoidMap) -> MonoidMap:
    inverse = [0] * ctx.carrier_size
    for p, q in enumerate(f.image):
        inverse[q] = p
    return MonoidMap(image=tuple(inverse))


def normalize_by_pullback(ctx: PowerMonoidContext, f: MonoidMap) -> MonoidMap:
    """F_{g^-1} after f, which has trivial pullback."""
    g = pullback(ctx, f).map
    return compose(ctx, augmentation(ctx, invert_group_map(g)), f)


def restrict_to_subgroup(ctx: PowerMonoidContext, f: MonoidMap, h: SubgroupLike) -> MonoidMap:
    """f on P_0(H), re-indexed through H's own context. Needs f(H) = H."""
    mask = ctx.require_subgroup(h)
    image_of_h = apply(ctx, f, mask)
    if image_of_h != mask:
        raise TheoremViolation(
            "f does not fix the subgroup, so it cannot be restricted",
            {"subgroup": members(mask), "image": members(image_of_h)},
        )
    sub = ctx.subgroup_context(mask)
    image = []
    for local in sub.enumerate_carrier():
        x = ctx.from_subgroup_mask(mask, local)
        fx = apply(ctx, f, x)
        if fx & ~mask:
            raise TheoremViolation(
                "f maps a subset of H outside H",
                {"subgroup": members(mask), "subset": members(x), "image": members(fx)},
            )
        image.append(ctx.to_subgroup_mask(mask, fx) >> 1)
    restricted = MonoidMap(image=tuple(image))
    if not is_monoid_automorphism(sub, restricted):
        raise TheoremViolation(
            "restriction is not an automorphism of P_0(H)",
            {"subgroup": members(mask), "image": list(restricted.image)},
        )
    return restricted


def induce_on_quotient(ctx: PowerMonoidContext, f: MonoidMap, h: SubgroupLike) -> MonoidMap:
    """f conjugated through the projection of P_{0,H}(G) onto P_0(G/H)."""
    mask = ctx.require_subgroup(h)
    qctx = ctx.quotient_context(mask)
    family = set(ctx.family_masks(mask))
    image = []
    for q in qctx.enumerate_carrier():
        x = ctx.quotient_lift(mask, q)
        fx = apply(ctx, f, x)
        if fx not in family:
            raise TheoremViolation(
                "f does not stabilize the sets divisible by H",
                {"subgroup": members(mask), "subset": members(x), "image": members(fx)},
            )
        image.append(ctx.quotient_project(mask, fx) >> 1)
    induced = MonoidMap(image=tuple(image))
    if not is_monoid_automorphism(qctx, induced):
        raise TheoremViolation(
            "induced map is not an automorphism of P_0(G/H)",
            {"subgroup": members(mask), "image": list(induced.image)},
        )
    return induced


def trivial_pullback_search(ctx: PowerMonoidContext, budget: Optional[int] = None) -> TrivialPullbackSearch:
    return TrivialPullbackSearch(ctx, is_monoid_automorphism, budget)


def enumerate_trivial_pullback_automorphisms(ctx: PowerMonoidContext, budget: Optional[int] = None) -> List[MonoidMap]:
    maps, _ = trivial_pullback_search(ctx, budget).run()
    return maps


def search_with_statistics(ctx: PowerMonoidContext, budget: Optional[int] = None) -> Tuple[List[MonoidMap], SearchStatistics]:
    return trivial_pullback_search(ctx, budget).run()


def is_closed_under_composition(ctx: PowerMonoidContext, maps: Sequence[MonoidMap]) -> bool:
    images = {f.image for f in maps}
    for f1 in maps:
        for f2 in maps:
            if tuple(f1.image[p] for p in f2.image) not in images:
                return False
    return True


def enumerate_monoid_automorphisms(
    ctx: PowerMonoidContext,
    budget: Optional[int] = None,
    kernel: Optional[Sequence[MonoidMap]] = None,
) -> List[MonoidMap]:
    """
    All of Aut(P_0(G)), as {F_h after k : h in Aut(G), k with trivial pullback}.

    Every f equals F_g after normalize_by_pullback(f) with g its pullback, so
    the product covers everything. Each result is re-validated and the set
    is checked for closure under composition.
    """
    if ctx.table is not group_table(ctx.group):
        raise ContractViolation("enumeration needs a context built from a group spec (make_context)")
    if kernel is None:
        kernel = enumerate_trivial_pullback_automorphisms(ctx, budget)
    images = set()
    for h in enumerate_group_automorphisms(ctx.group):
        fh = augmentation(ctx, h)
        for k in kernel:
            images.add(tuple(fh.image[p] for p in k.image))
    maps = [MonoidMap(image=image) for image in sorted(images)]
    for index, f in enumerate(maps):
        if not is_monoid_automorphism(ctx, f):
            raise TheoremViolation("assembled map is not an automorphism", {"map_index": index})
    if not is_closed_under_composition(ctx, maps):
        raise TheoremViolation("assembled automorphisms are not closed under composition", {"count": len(maps)})
    logger.info(f"{ctx.group.label()}: |Aut(P_0(G))| = {len(maps)}")
    return maps


def _check_naive_bound(ctx: PowerMonoidContext, what: str) -> None:
    limit = get_settings().naive_max_carrier
    if ctx.carrier_size > limit:
        raise ResourceBoundExceeded(
            f"{what} refused: carrier of size {ctx.carrier_size} exceeds {limit}",
            {"bound": "naive_max_carrier", "limit": limit, "observed": ctx.carrier_size},
        )


def naive_enumerate(ctx: PowerMonoidContext) -> List[MonoidMap]:
    """Every permutation of the carrier fixing {0}, filtered by the definition check."""
    _check_naive_bound(ctx, "naive enumeration")
    found = []
    for rest in permutations(range(1, ctx.carrier_size)):
        f = MonoidMap(image=(0,) + rest)
        if is_monoid_automorphism(ctx, f):
            found.append(f)
    return found


def cardinality_preserving_maps(ctx: PowerMonoidContext) -> List[MonoidMap]:
    """Bijections of the carrier fixing {0} that preserve |X|."""
    _check_naive_bound(ctx, "cardinality-preserving enumeration")
    classes: Dict[int, List[int]] = {}
    for x in ctx.enumerate_carrier():
        classes.setdefault(x.bit_count(), []).append(ctx.position(x))
    ordered = [classes[k] for k in sorted(classes)]
    maps = []
    for choice in product(*(permutations(positions) for positions in ordered)):
        image = [0] * ctx.carrier_size
        for positions, permuted in zip(ordered, choice):
            for p, q in zip(positions, permuted):
                image[p] = q
        maps.append(MonoidMap(image=tuple(image)))
    return sorted(maps, key=lambda f: f.image)
