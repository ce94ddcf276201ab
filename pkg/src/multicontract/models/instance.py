"""Instance files and generator configurations."""

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from multicontract.mappings import MultiMap, SingleMap, check_fits, lift_single
from multicontract.metric import MetricSpace


class InstanceFile(BaseModel):
    """A metric space together with a self-map of it.

    Pass the comparison tolerance through the validation context, e.g.
    ``InstanceFile.model_validate_json(text, context={"tolerance": 1e-9})``.
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    space: MetricSpace
    map_: MultiMap | SingleMap = Field(..., alias="map")
    metadata: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _map_fits_space(self) -> "InstanceFile":
        check_fits(self.space, self.map_)
        return self

    @property
    def multimap(self) -> MultiMap:
        """The map as a MultiMap; single maps are lifted."""
        if isinstance(self.map_, SingleMap):
            return lift_single(self.map_)
        return self.map_

    @property
    def map_kind(self) -> str:
        return "single" if isinstance(self.map_, SingleMap) else "multi"

    def to_json_dict(self) -> dict[str, object]:
        return self.model_dump(mode="json", by_alias=True)


class EuclideanSpaces(BaseModel):
    """Uniform points in the unit cube with Euclidean distances."""

    kind: Literal["euclidean"] = "euclidean"
    dim: int = Field(2, ge=1)


class ClosureSpaces(BaseModel):
    """Random positive weights repaired by shortest-path closure."""

    kind: Literal["closure_random"] = "closure_random"


class LineSpaces(BaseModel):
    """Distinct integer positions on a line; distances are exact integers."""

    kind: Literal["line"] = "line"


SpaceFlavor = Annotated[
    EuclideanSpaces | ClosureSpaces | LineSpaces, Field(discriminator="kind")
]


class UniformRandomMaps(BaseModel):
    """Each point gets a uniform nonempty subset of at most max_image points."""

    kind: Literal["uniform_random"] = "uniform_random"
    max_image: int = Field(2, ge=1)


class HubMaps(BaseModel):
    """Images drawn from the spread+1 points nearest a hub point."""

    kind: Literal["hub"] = "hub"
    hub_index: int = Field(0, ge=0)
    spread: int = Field(1, ge=0)


class SingleRandomMaps(BaseModel):
    """Uniform single-valued maps, lifted."""

    kind: Literal["single_random"] = "single_random"


class CycleMaps(BaseModel):
    """A cycle on the first `length` points; the rest feed into it."""

    kind: Literal["cycle"] = "cycle"
    length: int = Field(2, ge=1)


class IdentityMaps(BaseModel):
    """x ↦ {x} for every point."""

    kind: Literal["identity"] = "identity"


MapFlavor = Annotated[
    UniformRandomMaps | HubMaps | SingleRandomMaps | CycleMaps | IdentityMaps,
    Field(discriminator="kind"),
]


class GenConfig(BaseModel):
    """Recipe for one random instance (or, in sweeps, one instance per derived seed)."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "point_count": 6,
                "flavor": {"kind": "euclidean", "dim": 2},
                "map_flavor": {"kind": "hub", "hub_index": 0, "spread": 1},
                "seed": 7,
            }
        }
    )

    point_count: int = Field(..., ge=2)
    point_count_max: int | None = Field(
        None, description="When set, sizes are drawn uniformly from [point_count, point_count_max]"
    )
    flavor: SpaceFlavor = Field(default_factory=EuclideanSpaces)
    map_flavor: MapFlavor = Field(default_factory=UniformRandomMaps)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _consistent(self) -> "GenConfig":
        if self.point_count_max is not None and self.point_count_max < self.point_count:
            raise ValueError("point_count_max must be at least point_count")
        if isinstance(self.map_flavor, HubMaps) and self.map_flavor.hub_index >= self.point_count:
            raise ValueError(
                f"hub_index {self.map_flavor.hub_index} outside {self.point_count} points"
            )
        if isinstance(self.map_flavor, CycleMaps) and self.map_flavor.length > self.point_count:
            raise ValueError(
                f"cycle length {self.map_flavor.length} exceeds {self.point_count} points"
            )
        return self
