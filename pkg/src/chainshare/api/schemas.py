"""Pydantic request/response models for the HTTP facade.

Rational fields accept JSON numbers, numeric strings and ``"a/b"`` fraction
strings; they validate to exact ``Fraction`` values.  Floats coming out of
the JSON body are recovered through their shortest decimal representation,
so clients needing full precision beyond that should send strings.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict


def _to_rational(value: object) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, (str, Decimal)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise ValueError("expected a number")


RationalField = Annotated[Fraction, BeforeValidator(_to_rational)]

ZERO = Fraction(0)


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")

    timestamp: int = 0


class CreateRequestBody(_Body):
    requestId: int
    originator: str = ""
    p: RationalField = ZERO
    d: int = 0
    levs: int = 0
    ress: int = 0
    sups: int = 0


class NodeRefBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    i: int
    k: int
    m: int


class SharingOptionsBody(_Body):
    scheme: Literal["RS", "PS"] = "PS"
    costPolicy: Literal["PLATFORM_MEMBER", "ORIGINATOR_PAYS", "SHARED"] = "SHARED"
    platformQuota: RationalField | None = None
    originatorNode: NodeRefBody | None = None


class ResourceGroupBody(_Body):
    resourceName: str = ""
    g: RationalField = ZERO
    BOM: RationalField = ZERO


class SupplyBody(_Body):
    m: int
    supplierName: str = ""
    supplierId: str = ""
    cf: RationalField = ZERO
    cv: RationalField = ZERO
    additionalData: dict[str, RationalField] = {}
    q: RationalField = ZERO
    tp: RationalField = ZERO


class FinancialServiceBody(_Body):
    serviceName: str = ""
    uri: str = ""
    providerId: str = ""
    invested: RationalField = ZERO
    ratio: RationalField = ZERO


class ItServiceBody(_Body):
    serviceName: str = ""
    uri: str = ""
    providerId: str = ""
    access: str = ""
    cost: RationalField = ZERO


class EmptyBody(_Body):
    pass


class TransactionReceipt(BaseModel):
    sequence: int
    blockHash: str
