from math import prod
from typing import NewType, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

# Bitmask over element indices; bit 0 (the zero element) is always set.
SubsetId = NewType("SubsetId", int)


class GroupSpec(BaseModel):
    """A finite abelian group C_{n_1} (+) ... (+) C_{n_r} in invariant-factor form."""

    model_config = ConfigDict(frozen=True)

    invariant_factors: Tuple[int, ...] = Field(
        ..., description="Invariant factors n_1 | n_2 | ... | n_r, each at least 2"
    )

    @field_validator("invariant_factors")
    @classmethod
    def _check_chain(cls, factors: Tuple[int, ...]) -> Tuple[int, ...]:
        for n in factors:
            if n < 2:
                raise ValueError(f"invariant factor {n} is smaller than 2")
        for small, large in zip(factors, factors[1:]):
            if large % small:
                raise ValueError(f"{small} does not divide {large}")
        return factors

    @computed_field
    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @computed_field
    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def label(self) -> str:
        if not self.invariant_factors:
            return "trivial"
        return " + ".join(f"C{n}" for n in self.invariant_factors)

    def literal(self) -> str:
        return ",".join(str(n) for n in self.invariant_factors)


class GroupElement(BaseModel):
    """An element of a GroupSpec, by coordinates and by mixed-radix index."""

    model_config = ConfigDict(frozen=True)

    coords: Tuple[int, ...] = Field(..., description="Residues, coords[i] in [0, n_i - 1]")
    index: int = Field(..., ge=0, description="Mixed-radix index, least-significant factor first")


class Subgroup(BaseModel):
    model_config = ConfigDict(frozen=True)

    member_mask: int = Field(..., description="Bitmask of member element indices")

    @field_validator("member_mask")
    @classmethod
    def _contains_zero(cls, mask: int) -> int:
        if not mask & 1:
            raise ValueError("a subgroup must contain the zero element")
        return mask

    @computed_field
    @property
    def order(self) -> int:
        return self.member_mask.bit_count()

    def members(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.member_mask.bit_length()) if self.member_mask >> i & 1)


class QuotientGroup(BaseModel):
    """G/H as a coset table; coset 0 is H itself."""

    model_config = ConfigDict(frozen=True)

    parent: GroupSpec
    modulus: Subgroup
    coset_reps: Tuple[int, ...] = Field(..., description="One element index per coset, coset of 0 first")
    coset_of: Tuple[int, ...] = Field(..., description="Element index -> coset number")
    table: Tuple[Tuple[int, ...], ...] = Field(..., description="Addition table over coset numbers")

    @model_validator(mode="after")
    def _check_shape(self) -> "QuotientGroup":
        if self.parent.order != len(self.coset_reps) * self.modulus.order:
            raise ValueError("number of cosets must equal |G| / |H|")
        if self.coset_reps and self.coset_reps[0] != 0:
            raise ValueError("the coset of 0 must be numbered 0")
        return self

    @computed_field
    @property
    def order(self) -> int:
        return len(self.coset_reps)


class GroupAutMap(BaseModel):
    """An automorphism of G as an element-index image table."""

    model_config = ConfigDict(frozen=True)

    image: Tuple[int, ...] = Field(..., description="image[i] = index of h(element i)")

    @field_validator("image")
    @classmethod
    def _check_permutation(cls, image: Tuple[int, ...]) -> Tuple[int, ...]:
        if sorted(image) != list(range(len(image))):
            raise ValueError("image table is not a permutation")
        if image and image[0] != 0:
            raise ValueError("an automorphism must fix 0")
        return image

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.image))


class MonoidMap(BaseModel):
    """A map P_0(G) -> P_0(G) as a carrier-position image table."""

    model_config = ConfigDict(frozen=True)

    image: Tuple[int, ...] = Field(..., description="image[p] = carrier position of f(subset at p)")

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.image))


class PullbackResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    map: GroupAutMap
    trivial: bool = Field(..., description="True iff the pullback is the identity of G")


class SearchStatistics(BaseModel):
    """Counters from one trivial-pullback search."""

    nodes: int = 0
    decisions: int = 0
    forced: int = 0
    conflicts: int = 0
    solutions: int = 0
    rejected: int = 0
    elapsed_seconds: float = 0.0
    budget: Optional[int] = None
