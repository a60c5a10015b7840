"""Domain types for the consortium supply-chain tree, plus structural validation.

The tree mirrors the JSON descriptor: a request header (price, demand, bounds,
sharing options), production levels holding resource groups, each group holding
supplies, and one service level for financial/IT services.  All instances are
immutable; money and quotas are exact ``Fraction`` values.

Construction never validates: a freshly parsed chain may be structurally
incomplete.  :func:`validate_chain` performs every invariant check and returns
a report instead of raising, so violations can be surfaced as data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Mapping

__all__ = [
    "CostPolicy",
    "FinancialService",
    "ItService",
    "Level",
    "NodeRef",
    "RequestHeader",
    "ResourceGroup",
    "ServiceLevel",
    "SharingScheme",
    "Supply",
    "SupplyChain",
    "ValidationReport",
    "Violation",
    "validate_chain",
]

ONE = Fraction(1)
ZERO = Fraction(0)


class SharingScheme(str, Enum):
    """How market income is split between consortium members."""

    REVENUE_SHARING = "RS"
    PROFIT_SHARING = "PS"


class CostPolicy(str, Enum):
    """Who bears external service costs (the three investor/service scenarios)."""

    PLATFORM_MEMBER = "PLATFORM_MEMBER"
    ORIGINATOR_PAYS = "ORIGINATOR_PAYS"
    SHARED = "SHARED"


@dataclass(frozen=True, order=True)
class NodeRef:
    """Coordinate of one supply node: (level, resource index, supplier index)."""

    i: int
    k: int
    m: int


@dataclass(frozen=True)
class RequestHeader:
    request_id: int
    originator_id: str
    price: Fraction
    demand: int
    max_levels: int
    max_resources: int
    max_suppliers: int
    scheme: SharingScheme = SharingScheme.PROFIT_SHARING
    cost_policy: CostPolicy = CostPolicy.SHARED
    originator_node: NodeRef | None = None


@dataclass(frozen=True)
class Supply:
    """One supplier's tender for a resource: costs, quantity and time span."""

    supplier_index: int
    supplier_name: str = ""
    supplier_id: str = ""
    fixed_cost: Fraction = ZERO
    variable_cost: Fraction = ZERO
    additional_economy: Mapping[str, Fraction] = field(default_factory=dict)
    quantity: Fraction = ZERO
    time_span: Fraction = ZERO


@dataclass(frozen=True)
class ResourceGroup:
    """All supplies of one resource at one level, with its negotiated quota and BOM ratio."""

    resource_index: int
    resource_name: str
    quota: Fraction
    bom: Fraction
    supplies: tuple[Supply, ...] = ()


@dataclass(frozen=True)
class Level:
    index: int
    resources: tuple[ResourceGroup, ...] = ()


@dataclass(frozen=True)
class FinancialService:
    service_name: str = ""
    uri: str = ""
    provider_id: str = ""
    invested: Fraction = ZERO
    ratio: Fraction = ZERO


@dataclass(frozen=True)
class ItService:
    service_name: str = ""
    uri: str = ""
    provider_id: str = ""
    access: str = ""
    cost: Fraction = ZERO


@dataclass(frozen=True)
class ServiceLevel:
    financial_services: tuple[FinancialService, ...] = ()
    it_services: tuple[ItService, ...] = ()


@dataclass(frozen=True)
class SupplyChain:
    header: RequestHeader
    levels: tuple[Level, ...] = ()
    service_level: ServiceLevel = ServiceLevel()
    platform_quota: Fraction | None = None

    def groups(self) -> Iterator[tuple[int, ResourceGroup]]:
        """Yield (level index, group) over the whole tree in document order."""
        for level in self.levels:
            for group in level.resources:
                yield level.index, group

    def supplies(self) -> Iterator[tuple[NodeRef, ResourceGroup, Supply]]:
        """Yield (node, group, supply) for every supply node in document order."""
        for i, group in self.groups():
            for supply in group.supplies:
                yield NodeRef(i, group.resource_index, supply.supplier_index), group, supply

    def find_group(self, i: int, k: int) -> ResourceGroup | None:
        for level_index, group in self.groups():
            if level_index == i and group.resource_index == k:
                return group
        return None

    def has_node(self, node: NodeRef) -> bool:
        group = self.find_group(node.i, node.k)
        if group is None:
            return False
        return any(s.supplier_index == node.m for s in group.supplies)


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of structural validation: violations block sealing, warnings do not."""

    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "violations": [
                {"code": v.code, "path": v.path, "message": v.message}
                for v in self.violations
            ],
            "warnings": [
                {"code": v.code, "path": v.path, "message": v.message}
                for v in self.warnings
            ],
        }


def _group_path(level_pos: int, group_pos: int) -> str:
    return f"$.levels[{level_pos}].resources[{group_pos}]"


def validate_chain(chain: SupplyChain) -> ValidationReport:
    """Check every structural invariant; returns a report, never raises.

    Violations: positivity/bounds on the header, level contiguity (indices
    must be exactly 1..n, in order), per-group quota range and BOM positivity,
    non-empty supplies with positive quantity and time span, unique
    coordinates, and the exact quota-sum-to-one constraint (including the
    platform quota under PLATFORM_MEMBER).

    Warnings: per-group supplied quantity differing from demand times BOM.
    The sum-of-quantities relation is deliberately not enforced as an error.
    """
    violations: list[Violation] = []
    warnings: list[Violation] = []

    def bad(code: str, path: str, message: str) -> None:
        violations.append(Violation(code, path, message))

    header = chain.header
    if header.request_id <= 0:
        bad("NONPOSITIVE_REQUEST_ID", "$.requestId", "requestId must be a positive integer")
    if header.price <= 0:
        bad("NONPOSITIVE_PRICE", "$.p", "price must be positive")
    if header.demand < 0:
        bad("NEGATIVE_DEMAND", "$.d", "demand must be non-negative")
    for bound, json_key in (
        (header.max_levels, "levs"),
        (header.max_resources, "ress"),
        (header.max_suppliers, "sups"),
    ):
        if bound < 1:
            bad("NONPOSITIVE_BOUND", f"$.{json_key}", f"{json_key} must be at least 1")

    if not chain.levels or all(not level.resources for level in chain.levels):
        bad("EMPTY_CHAIN", "$.levels", "chain declares no resource groups")

    indices = [level.index for level in chain.levels]
    if indices != list(range(1, len(indices) + 1)):
        bad(
            "LEVEL_CONTIGUITY",
            "$.levels",
            f"level indices must be exactly 1..n in order, got {indices}",
        )
    if len(indices) > header.max_levels >= 1:
        bad("LEVEL_BOUND", "$.levels", f"{len(indices)} levels exceed levs={header.max_levels}")

    seen_groups: set[tuple[int, int]] = set()
    quota_sum = ZERO
    for level_pos, level in enumerate(chain.levels):
        for group_pos, group in enumerate(level.resources):
            path = _group_path(level_pos, group_pos)
            key = (level.index, group.resource_index)
            if key in seen_groups:
                bad("DUPLICATE_GROUP", path, f"resource group (i={key[0]}, k={key[1]}) repeated")
            seen_groups.add(key)
            if group.resource_index < 0 or group.resource_index > header.max_resources:
                bad(
                    "RESOURCE_BOUND",
                    f"{path}.k",
                    f"resource index {group.resource_index} outside 0..ress={header.max_resources}",
                )
            if not (0 <= group.quota <= 1):
                bad("QUOTA_RANGE", f"{path}.g", f"quota {group.quota} outside [0, 1]")
            quota_sum += group.quota
            if group.bom <= 0:
                bad("NONPOSITIVE_BOM", f"{path}.BOM", "BOM ratio must be positive")
            if not group.supplies:
                bad("EMPTY_SUPPLIES", f"{path}.supplyList", "resource group has no supplies")

            seen_suppliers: set[int] = set()
            supplied = ZERO
            for supply_pos, supply in enumerate(group.supplies):
                spath = f"{path}.supplyList[{supply_pos}]"
                if supply.supplier_index in seen_suppliers:
                    bad("DUPLICATE_SUPPLIER", f"{spath}.m", f"supplier index {supply.supplier_index} repeated")
                seen_suppliers.add(supply.supplier_index)
                if supply.supplier_index < 0 or supply.supplier_index > header.max_suppliers:
                    bad(
                        "SUPPLIER_BOUND",
                        f"{spath}.m",
                        f"supplier index {supply.supplier_index} outside 0..sups={header.max_suppliers}",
                    )
                if supply.fixed_cost < 0:
                    bad("NEGATIVE_COST", f"{spath}.economicProfile.cf", "fixed cost must be non-negative")
                if supply.variable_cost < 0:
                    bad("NEGATIVE_COST", f"{spath}.economicProfile.cv", "variable cost must be non-negative")
                if supply.quantity <= 0:
                    bad("NONPOSITIVE_QUANTITY", f"{spath}.productionProfile.q", "quantity must be positive")
                if supply.time_span <= 0:
                    bad("NONPOSITIVE_TIMESPAN", f"{spath}.productionProfile.tp", "time span must be positive")
                supplied += supply.quantity
            expected = header.demand * group.bom
            if group.supplies and supplied != expected:
                warnings.append(
                    Violation(
                        "QUANTITY_DEMAND_MISMATCH",
                        f"{path}.supplyList",
                        f"supplied quantity {supplied} differs from d*BOM = {expected}",
                    )
                )

    for pos, service in enumerate(chain.service_level.financial_services):
        path = f"$.serviceLevel.financialServices[{pos}]"
        if service.invested <= 0:
            bad("NONPOSITIVE_INVESTMENT", f"{path}.invested", "invested amount must be positive")
        if service.ratio < 0:
            bad("NEGATIVE_RATIO", f"{path}.ratio", "remuneration ratio must be non-negative")
    for pos, service in enumerate(chain.service_level.it_services):
        path = f"$.serviceLevel.itServices[{pos}]"
        if service.cost < 0:
            bad("NEGATIVE_SERVICE_COST", f"{path}.cost", "IT service cost must be non-negative")

    if header.cost_policy is CostPolicy.PLATFORM_MEMBER:
        if chain.platform_quota is None:
            bad(
                "MISSING_PLATFORM_QUOTA",
                "$.sharingOptions.platformQuota",
                "PLATFORM_MEMBER requires a platform quota",
            )
        else:
            if not (0 <= chain.platform_quota <= 1):
                bad(
                    "PLATFORM_QUOTA_RANGE",
                    "$.sharingOptions.platformQuota",
                    f"platform quota {chain.platform_quota} outside [0, 1]",
                )
            quota_sum += chain.platform_quota
    if quota_sum != ONE:
        bad("QUOTA_SUM", "$.levels", f"quotas sum to {quota_sum}, expected exactly 1")

    return ValidationReport(tuple(violations), tuple(warnings))
