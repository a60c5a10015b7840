"""Bit-exact codec between JSON descriptors and :class:`SupplyChain` values.

The wire format is the consortium descriptor: request fields at the root,
``levels[].resources[].supplyList[]`` for the production tree, and a
``serviceLevel`` object.  An optional ``sharingOptions`` extension selects the
sharing scheme, cost policy, platform quota and originator node.

Parsing is lenient about absence (numbers default to 0, strings to "") and
strict about types: a wrongly typed field raises :class:`SchemaViolation`
naming the JSON path.  Serialization is canonical: every field emitted, keys
sorted, exact number rendering.  ``parse(serialize(chain)) == chain`` for
every valid chain.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .canonical import canonical_dumps, coerce_rational, loads_exact
from .errors import DuplicateKey, MalformedDocument, SchemaViolation
from .model import (
    CostPolicy,
    FinancialService,
    ItService,
    Level,
    NodeRef,
    RequestHeader,
    ResourceGroup,
    ServiceLevel,
    SharingScheme,
    Supply,
    SupplyChain,
)

__all__ = ["parse_chain_descriptor", "serialize_chain_descriptor", "chain_to_tree"]

ZERO = Fraction(0)


def _get_object(doc: Any, path: str) -> dict:
    if not isinstance(doc, dict):
        raise SchemaViolation(f"expected object at {path}", path=path)
    return doc


def _field_object(obj: dict, key: str, path: str) -> dict:
    value = obj.get(key)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise SchemaViolation(f"expected object at {path}.{key}", path=f"{path}.{key}")
    return value


def _field_list(obj: dict, key: str, path: str) -> list:
    value = obj.get(key)
    if value is None:
        return []
    if not isinstance(value, list):
        raise SchemaViolation(f"expected array at {path}.{key}", path=f"{path}.{key}")
    return value


def _field_str(obj: dict, key: str, path: str) -> str:
    value = obj.get(key)
    if value is None:
        return ""
    if not isinstance(value, str):
        raise SchemaViolation(f"expected string at {path}.{key}", path=f"{path}.{key}")
    return value


def _field_int(obj: dict, key: str, path: str, default: int = 0) -> int:
    value = obj.get(key)
    if value is None:
        return default
    if isinstance(value, bool):
        raise SchemaViolation(f"expected integer at {path}.{key}", path=f"{path}.{key}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    raise SchemaViolation(f"expected integer at {path}.{key}", path=f"{path}.{key}")


def _field_rational(obj: dict, key: str, path: str) -> Fraction:
    value = obj.get(key)
    if value is None:
        return ZERO
    rational = coerce_rational(value)
    if rational is None:
        raise SchemaViolation(f"expected number at {path}.{key}", path=f"{path}.{key}")
    return rational


def _parse_supply(raw: Any, path: str, position: int) -> Supply:
    if not isinstance(raw, dict):
        raise SchemaViolation(f"expected object at {path}", path=path)
    supplier_data = _field_object(raw, "supplierData", path)
    economic = _field_object(raw, "economicProfile", path)
    production = _field_object(raw, "productionProfile", path)

    additional_raw = _field_object(economic, "additionalData", f"{path}.economicProfile")
    additional: dict[str, Fraction] = {}
    for name, value in additional_raw.items():
        rational = coerce_rational(value)
        if rational is None:
            raise SchemaViolation(
                f"expected number at {path}.economicProfile.additionalData.{name}",
                path=f"{path}.economicProfile.additionalData.{name}",
            )
        additional[name] = rational

    return Supply(
        supplier_index=_field_int(raw, "m", path, default=position),
        supplier_name=_field_str(supplier_data, "supplierName", f"{path}.supplierData"),
        supplier_id=_field_str(supplier_data, "supplierId", f"{path}.supplierData"),
        fixed_cost=_field_rational(economic, "cf", f"{path}.economicProfile"),
        variable_cost=_field_rational(economic, "cv", f"{path}.economicProfile"),
        additional_economy=additional,
        quantity=_field_rational(production, "q", f"{path}.productionProfile"),
        time_span=_field_rational(production, "tp", f"{path}.productionProfile"),
    )


def _parse_group(raw: Any, path: str, position: int) -> ResourceGroup:
    if not isinstance(raw, dict):
        raise SchemaViolation(f"expected object at {path}", path=path)
    supplies: list[Supply] = []
    seen: set[int] = set()
    for pos, raw_supply in enumerate(_field_list(raw, "supplyList", path)):
        supply = _parse_supply(raw_supply, f"{path}.supplyList[{pos}]", pos)
        if supply.supplier_index in seen:
            raise DuplicateKey(
                f"supplier index {supply.supplier_index} repeated in {path}.supplyList",
                path=f"{path}.supplyList[{pos}].m",
            )
        seen.add(supply.supplier_index)
        supplies.append(supply)
    return ResourceGroup(
        resource_index=_field_int(raw, "k", path, default=position),
        resource_name=_field_str(raw, "resourceName", path),
        quota=_field_rational(raw, "g", path),
        bom=_field_rational(raw, "BOM", path),
        supplies=tuple(supplies),
    )


def _parse_level(raw: Any, path: str) -> Level:
    if not isinstance(raw, dict):
        raise SchemaViolation(f"expected object at {path}", path=path)
    resources: list[ResourceGroup] = []
    seen: set[int] = set()
    for pos, raw_group in enumerate(_field_list(raw, "resources", path)):
        group = _parse_group(raw_group, f"{path}.resources[{pos}]", pos)
        if group.resource_index in seen:
            raise DuplicateKey(
                f"resource index {group.resource_index} repeated in {path}.resources",
                path=f"{path}.resources[{pos}].k",
            )
        seen.add(group.resource_index)
        resources.append(group)
    return Level(index=_field_int(raw, "i", path), resources=tuple(resources))


def _parse_service_level(raw: dict, path: str) -> ServiceLevel:
    financial: list[FinancialService] = []
    for pos, raw_service in enumerate(_field_list(raw, "financialServices", path)):
        spath = f"{path}.financialServices[{pos}]"
        if not isinstance(raw_service, dict):
            raise SchemaViolation(f"expected object at {spath}", path=spath)
        financial.append(
            FinancialService(
                service_name=_field_str(raw_service, "serviceName", spath),
                uri=_field_str(raw_service, "uri", spath),
                provider_id=_field_str(raw_service, "providerId", spath),
                invested=_field_rational(raw_service, "invested", spath),
                ratio=_field_rational(raw_service, "ratio", spath),
            )
        )
    it: list[ItService] = []
    for pos, raw_service in enumerate(_field_list(raw, "itServices", path)):
        spath = f"{path}.itServices[{pos}]"
        if not isinstance(raw_service, dict):
            raise SchemaViolation(f"expected object at {spath}", path=spath)
        it.append(
            ItService(
                service_name=_field_str(raw_service, "serviceName", spath),
                uri=_field_str(raw_service, "uri", spath),
                provider_id=_field_str(raw_service, "providerId", spath),
                access=_field_str(raw_service, "access", spath),
                cost=_field_rational(raw_service, "cost", spath),
            )
        )
    return ServiceLevel(financial_services=tuple(financial), it_services=tuple(it))


_SCHEMES = {scheme.value: scheme for scheme in SharingScheme}
_POLICIES = {policy.value: policy for policy in CostPolicy}


def _parse_options(raw: dict, path: str) -> tuple[SharingScheme, CostPolicy, Fraction | None, NodeRef | None]:
    scheme_text = _field_str(raw, "scheme", path) or SharingScheme.PROFIT_SHARING.value
    if scheme_text not in _SCHEMES:
        raise SchemaViolation(
            f"scheme must be one of {sorted(_SCHEMES)} at {path}.scheme", path=f"{path}.scheme"
        )
    policy_text = _field_str(raw, "costPolicy", path) or CostPolicy.SHARED.value
    if policy_text not in _POLICIES:
        raise SchemaViolation(
            f"costPolicy must be one of {sorted(_POLICIES)} at {path}.costPolicy",
            path=f"{path}.costPolicy",
        )
    platform_quota: Fraction | None = None
    if raw.get("platformQuota") is not None:
        platform_quota = _field_rational(raw, "platformQuota", path)
    originator: NodeRef | None = None
    if raw.get("originatorNode") is not None:
        node = _field_object(raw, "originatorNode", path)
        npath = f"{path}.originatorNode"
        originator = NodeRef(
            i=_field_int(node, "i", npath),
            k=_field_int(node, "k", npath),
            m=_field_int(node, "m", npath),
        )
    return _SCHEMES[scheme_text], _POLICIES[policy_text], platform_quota, originator


def parse_chain_descriptor(text: str | bytes) -> SupplyChain:
    """Parse a JSON descriptor into a :class:`SupplyChain`.

    Absent numeric fields default to 0 and absent strings to ""; resource and
    supplier indices default to their array position.  Raises
    ``MalformedDocument`` for non-JSON input, ``SchemaViolation`` for a
    wrongly typed field, ``DuplicateKey`` for repeated coordinates.
    Structural completeness is not checked here; run ``validate_chain``.
    """
    try:
        doc = loads_exact(text)
    except (json.JSONDecodeError, UnicodeDecodeError, RecursionError) as exc:
        raise MalformedDocument(f"not a JSON document: {exc}") from None
    root = _get_object(doc, "$")

    levels: list[Level] = []
    seen_levels: set[int] = set()
    for pos, raw_level in enumerate(_field_list(root, "levels", "$")):
        level = _parse_level(raw_level, f"$.levels[{pos}]")
        if level.index in seen_levels:
            raise DuplicateKey(
                f"level index {level.index} repeated in $.levels",
                path=f"$.levels[{pos}].i",
            )
        seen_levels.add(level.index)
        levels.append(level)

    scheme, policy, platform_quota, originator = _parse_options(
        _field_object(root, "sharingOptions", "$"), "$.sharingOptions"
    )
    header = RequestHeader(
        request_id=_field_int(root, "requestId", "$"),
        originator_id=_field_str(root, "originator", "$"),
        price=_field_rational(root, "p", "$"),
        demand=_field_int(root, "d", "$"),
        max_levels=_field_int(root, "levs", "$"),
        max_resources=_field_int(root, "ress", "$"),
        max_suppliers=_field_int(root, "sups", "$"),
        scheme=scheme,
        cost_policy=policy,
        originator_node=originator,
    )
    return SupplyChain(
        header=header,
        levels=tuple(levels),
        service_level=_parse_service_level(_field_object(root, "serviceLevel", "$"), "$.serviceLevel"),
        platform_quota=platform_quota,
    )


def chain_to_tree(chain: SupplyChain) -> dict:
    """Plain-value tree of the descriptor, ready for canonical serialization."""
    header = chain.header
    options: dict[str, Any] = {
        "scheme": header.scheme.value,
        "costPolicy": header.cost_policy.value,
    }
    if chain.platform_quota is not None:
        options["platformQuota"] = chain.platform_quota
    if header.originator_node is not None:
        node = header.originator_node
        options["originatorNode"] = {"i": node.i, "k": node.k, "m": node.m}
    return {
        "requestId": header.request_id,
        "originator": header.originator_id,
        "p": header.price,
        "d": header.demand,
        "levs": header.max_levels,
        "ress": header.max_resources,
        "sups": header.max_suppliers,
        "levels": [
            {
                "i": level.index,
                "resources": [
                    {
                        "k": group.resource_index,
                        "resourceName": group.resource_name,
                        "g": group.quota,
                        "BOM": group.bom,
                        "supplyList": [
                            {
                                "m": supply.supplier_index,
                                "supplierData": {
                                    "supplierName": supply.supplier_name,
                                    "supplierId": supply.supplier_id,
                                },
                                "economicProfile": {
                                    "cf": supply.fixed_cost,
                                    "cv": supply.variable_cost,
                                    "additionalData": dict(supply.additional_economy),
                                },
                                "productionProfile": {
                                    "q": supply.quantity,
                                    "tp": supply.time_span,
                                },
                            }
                            for supply in group.supplies
                        ],
                    }
                    for group in level.resources
                ],
            }
            for level in chain.levels
        ],
        "serviceLevel": {
            "financialServices": [
                {
                    "serviceName": service.service_name,
                    "uri": service.uri,
                    "providerId": service.provider_id,
                    "invested": service.invested,
                    "ratio": service.ratio,
                }
                for service in chain.service_level.financial_services
            ],
            "itServices": [
                {
                    "serviceName": service.service_name,
                    "uri": service.uri,
                    "providerId": service.provider_id,
                    "access": service.access,
                    "cost": service.cost,
                }
                for service in chain.service_level.it_services
            ],
        },
        "sharingOptions": options,
    }


def serialize_chain_descriptor(chain: SupplyChain) -> str:
    """Canonical JSON text of the descriptor; byte-identical for equal chains."""
    return canonical_dumps(chain_to_tree(chain))
