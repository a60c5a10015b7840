"""The five-step income-sharing computation and its scheme strategies.

Pipeline, all in exact rational arithmetic:

1. unit cost per supply node: fixed cost amortized over time span and
   quantity, plus variable cost;
2. group minimum: the lowest advertised unit cost among a resource's
   suppliers;
3. gross income (price times root quantity), per-group income shares
   (demand times group minimum times BOM), level and total income, and each
   supplier's quantity fraction of its group;
4. alignment compensation for suppliers whose advertised cost exceeds the
   group minimum, plus external service charges and the cost-policy
   compensation of whoever bore them; net profit chain = gross income minus
   total income, alignment and charges;
5. profit distribution by negotiated quota times quantity fraction.

Two strategies split the payout assembly: PROFIT_SHARING reimburses shares
and alignment before distributing the residual profit; REVENUE_SHARING pays
each participant a proportional cut of gross income net of service charges,
with no reimbursements.  Service providers are paid identically under both.

Totals are exact until :func:`round_payouts` renders cents.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    DegenerateSupply,
    EmptyGroup,
    MissingOriginatorNode,
    ValidationFailed,
    ZeroTotalIncome,
)
from .model import (
    CostPolicy,
    NodeRef,
    ServiceLevel,
    SharingScheme,
    SupplyChain,
    validate_chain,
)

__all__ = [
    "CostTable",
    "Participant",
    "PayoutLine",
    "SharingResult",
    "alignment_compensation",
    "apply_cost_policy",
    "build_cost_table",
    "gross_income",
    "group_income_share",
    "level_and_total_income",
    "min_cost_for_group",
    "net_profit_chain",
    "profit_quota_payout",
    "result_to_tree",
    "round_payouts",
    "round_to_cents",
    "run_sharing",
    "service_charges",
    "supplier_income_share",
    "supply_fraction",
    "unit_cost",
]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class CostTable:
    """Unit costs per supply node and the advertised minimum per resource group."""

    unit_costs: Mapping[NodeRef, Fraction]
    group_minima: Mapping[tuple[int, int], Fraction]


@dataclass(frozen=True)
class Participant:
    """Payee identity: a production node, the platform, or a service provider."""

    kind: str  # "supplier" | "platform" | "financial-service" | "it-service"
    label: str
    node: NodeRef | None = None
    provider_id: str = ""

    def to_dict(self) -> dict:
        payload: dict = {"kind": self.kind, "label": self.label, "providerId": self.provider_id}
        if self.node is not None:
            payload["node"] = {"i": self.node.i, "k": self.node.k, "m": self.node.m}
        return payload


@dataclass(frozen=True)
class PayoutLine:
    participant: Participant
    reimbursement: Fraction = ZERO
    alignment: Fraction = ZERO
    profit_share: Fraction = ZERO
    rounded_total: Fraction | None = None

    @property
    def total(self) -> Fraction:
        return self.reimbursement + self.alignment + self.profit_share


@dataclass(frozen=True)
class SharingResult:
    scheme: SharingScheme
    cost_policy: CostPolicy
    gross_income: Fraction
    total_income: Fraction
    level_incomes: Mapping[int, Fraction]
    group_shares: Mapping[tuple[int, int], Fraction]
    total_alignment: Fraction
    service_charges: Fraction
    profit_chain: Fraction
    loss_flag: bool
    payouts: tuple[PayoutLine, ...]


def unit_cost(cf: Fraction, tp: Fraction, q: Fraction, cv: Fraction) -> Fraction:
    """Advertised unit cost: fixed cost amortized per day and unit, plus variable cost."""
    if tp <= 0 or q <= 0:
        raise DegenerateSupply(f"unit cost undefined for tp={tp}, q={q}")
    return cf / (tp * q) + cv


def min_cost_for_group(costs: Sequence[Fraction]) -> Fraction:
    """Minimum advertised unit cost among a group's suppliers."""
    if not costs:
        raise EmptyGroup("no supplies to take a minimum over")
    return min(costs)


def build_cost_table(chain: SupplyChain) -> CostTable:
    unit_costs: dict[NodeRef, Fraction] = {}
    group_minima: dict[tuple[int, int], Fraction] = {}
    for i, group in chain.groups():
        costs = []
        for supply in group.supplies:
            node = NodeRef(i, group.resource_index, supply.supplier_index)
            cost = unit_cost(supply.fixed_cost, supply.time_span, supply.quantity, supply.variable_cost)
            unit_costs[node] = cost
            costs.append(cost)
        group_minima[(i, group.resource_index)] = min_cost_for_group(costs)
    return CostTable(unit_costs=unit_costs, group_minima=group_minima)


def gross_income(price: Fraction, root_quantity: Fraction) -> Fraction:
    """Market income: unit price times the quantity sold at the root."""
    return price * root_quantity


def group_income_share(demand: Fraction, mincost: Fraction, bom: Fraction) -> Fraction:
    """Income share reserved for one resource group: d * mincost * BOM."""
    return demand * mincost * bom


def level_and_total_income(
    group_shares: Mapping[tuple[int, int], Fraction],
) -> tuple[dict[int, Fraction], Fraction]:
    """Sum group shares per level and overall."""
    per_level: dict[int, Fraction] = {}
    for (i, _k), share in group_shares.items():
        per_level[i] = per_level.get(i, ZERO) + share
    return per_level, sum(per_level.values(), ZERO)


def supply_fraction(quantity: Fraction, group_quantities: Sequence[Fraction]) -> Fraction:
    """A supplier's quantity as a fraction of its group's total quantity."""
    if any(q <= 0 for q in group_quantities):
        raise DegenerateSupply("quantity fractions need strictly positive quantities")
    return quantity / sum(group_quantities, ZERO)


def supplier_income_share(group_share: Fraction, fraction: Fraction) -> Fraction:
    """A supplier's slice of its group's income share."""
    return group_share * fraction


def alignment_compensation(share: Fraction, cost: Fraction, mincost: Fraction) -> Fraction:
    """Compensation for advertising a cost above the group minimum.

    Zero for the minimum-cost supplier; otherwise the share scaled by the
    relative cost excess.  The deduction of the minimum (rather than zero)
    from the advertised cost deters inflating costs out of inefficiency.
    """
    if cost == mincost:
        return ZERO
    if mincost <= 0:
        raise DegenerateSupply(f"alignment undefined for group minimum {mincost}")
    return (share / mincost) * (cost - mincost)


def service_charges(
    service_level: ServiceLevel,
    cost_policy: CostPolicy,
    *,
    investor_principal_included: bool = True,
) -> tuple[Fraction, list[PayoutLine]]:
    """Total external service charge and the payout lines settling it.

    Investors are always remunerated: the invested amount plus the agreed
    ratio on it (ratio only, when ``investor_principal_included`` is off).
    IT providers are paid their advertised cost, except under PLATFORM_MEMBER
    where the platform is a profit-sharing member remunerated via the
    platform quota instead of a fee.
    """
    total = ZERO
    lines: list[PayoutLine] = []
    for service in service_level.financial_services:
        amount = service.invested * (ONE + service.ratio)
        if not investor_principal_included:
            amount = service.invested * service.ratio
        total += amount
        lines.append(
            PayoutLine(
                participant=Participant(
                    kind="financial-service",
                    label=service.service_name,
                    provider_id=service.provider_id,
                ),
                reimbursement=amount,
            )
        )
    if cost_policy is not CostPolicy.PLATFORM_MEMBER:
        for service in service_level.it_services:
            total += service.cost
            lines.append(
                PayoutLine(
                    participant=Participant(
                        kind="it-service",
                        label=service.service_name,
                        provider_id=service.provider_id,
                    ),
                    reimbursement=service.cost,
                )
            )
    return total, lines


def apply_cost_policy(
    chain: SupplyChain,
    charge: Fraction,
    shares: Mapping[NodeRef, Fraction],
    total_income: Fraction,
) -> dict[NodeRef, Fraction]:
    """Alignment entries reimbursing whoever bore the external service charge.

    ORIGINATOR_PAYS compensates the originator's node in full (the single
    nonzero entry); SHARED splits the charge across all production nodes in
    proportion to their income shares; PLATFORM_MEMBER compensates nobody
    (the platform is paid through its quota).
    """
    if charge == 0:
        return {}
    policy = chain.header.cost_policy
    if policy is CostPolicy.PLATFORM_MEMBER:
        return {}
    if policy is CostPolicy.ORIGINATOR_PAYS:
        node = chain.header.originator_node
        if node is None or node not in shares:
            raise MissingOriginatorNode(
                "ORIGINATOR_PAYS needs sharingOptions.originatorNode naming an existing supply node"
            )
        return {node: charge}
    if total_income == 0:
        raise ZeroTotalIncome("cannot split a positive charge over zero total income")
    return {node: charge * share / total_income for node, share in shares.items()}


def net_profit_chain(
    gross: Fraction, total_income: Fraction, alignment_total: Fraction, charges: Fraction
) -> Fraction:
    """Residual profit after income shares, alignment and service charges. May be negative."""
    return gross - total_income - alignment_total - charges


def profit_quota_payout(fraction: Fraction, quota: Fraction, profit_chain: Fraction) -> Fraction:
    """One participant's profit cut: quantity fraction times negotiated quota times profit."""
    return fraction * quota * profit_chain


def _remainder(value: Fraction) -> Fraction:
    cents = value * 100
    return cents - (cents.numerator // cents.denominator)


def round_payouts(
    lines: Sequence[PayoutLine], originator: NodeRef | None = None
) -> list[PayoutLine]:
    """Render exact totals to cents without losing a cent overall.

    Each total is rounded half-even to 2 decimals; the residual against the
    rounded grand total goes to the originator's line when one is configured,
    else to the line with the largest fractional remainder (last such line on
    ties).  The rounded sum always equals the exact sum rounded to the cent.
    """
    if not lines:
        return []
    rounded = [round_to_cents(line.total) for line in lines]
    target = round_to_cents(sum((line.total for line in lines), ZERO))
    residual = target - sum(rounded, ZERO)
    adjust = None
    if originator is not None:
        for index, line in enumerate(lines):
            if line.participant.node == originator:
                adjust = index
                break
    if adjust is None:
        remainders = [_remainder(line.total) for line in lines]
        adjust = max(range(len(lines)), key=lambda index: (remainders[index], index))
    rounded[adjust] += residual
    return [
        replace(line, rounded_total=amount) for line, amount in zip(lines, rounded)
    ]


def round_to_cents(value: Fraction) -> Fraction:
    """Round half-even to a whole number of cents, exactly."""
    cents = value * 100
    floor = cents.numerator // cents.denominator
    frac = cents - floor
    if frac > Fraction(1, 2) or (frac == Fraction(1, 2) and floor % 2 != 0):
        floor += 1
    return Fraction(floor, 100)


def _production_tables(chain: SupplyChain, costs: CostTable):
    """Shared step-3 arithmetic: group shares, totals, fractions, node shares."""
    demand = Fraction(chain.header.demand)
    group_shares: dict[tuple[int, int], Fraction] = {}
    fractions: dict[NodeRef, Fraction] = {}
    node_shares: dict[NodeRef, Fraction] = {}
    quotas: dict[NodeRef, Fraction] = {}
    for i, group in chain.groups():
        key = (i, group.resource_index)
        share = group_income_share(demand, costs.group_minima[key], group.bom)
        group_shares[key] = share
        quantities = [supply.quantity for supply in group.supplies]
        for supply in group.supplies:
            node = NodeRef(i, group.resource_index, supply.supplier_index)
            fraction = supply_fraction(supply.quantity, quantities)
            fractions[node] = fraction
            node_shares[node] = supplier_income_share(share, fraction)
            quotas[node] = group.quota
    level_incomes, total_income = level_and_total_income(group_shares)
    return group_shares, level_incomes, total_income, fractions, node_shares, quotas


def _platform_participant(chain: SupplyChain) -> Participant:
    it_services = chain.service_level.it_services
    provider_id = it_services[0].provider_id if it_services else ""
    label = it_services[0].service_name if it_services else "platform"
    return Participant(kind="platform", label=label, provider_id=provider_id)


def run_sharing(
    chain: SupplyChain, *, investor_principal_included: bool = True
) -> SharingResult:
    """Execute the five sharing steps on a validated chain.

    Dispatches on the header's scheme.  PROFIT_SHARING pays each production
    node its income share plus alignment (production alignment and any
    cost-policy compensation) plus its quota cut of the net profit chain.
    REVENUE_SHARING pays each node its quota cut of gross income net of
    service charges, nothing else.  Service lines are identical under both.
    The result is flagged as a loss (non-executable) when the distributable
    residual is negative; lines are still reported for inspection.
    """
    report = validate_chain(chain)
    if not report.ok:
        raise ValidationFailed(report)

    header = chain.header
    costs = build_cost_table(chain)
    gross = gross_income(header.price, Fraction(header.demand))
    group_shares, level_incomes, total_income, fractions, node_shares, quotas = (
        _production_tables(chain, costs)
    )
    charge, service_lines = service_charges(
        chain.service_level,
        header.cost_policy,
        investor_principal_included=investor_principal_included,
    )

    def supplier_participant(node: NodeRef) -> Participant:
        group = chain.find_group(node.i, node.k)
        supply = next(s for s in group.supplies if s.supplier_index == node.m)
        return Participant(
            kind="supplier",
            label=supply.supplier_name,
            node=node,
            provider_id=supply.supplier_id,
        )

    nodes = sorted(node_shares)
    lines: list[PayoutLine] = []

    if header.scheme is SharingScheme.PROFIT_SHARING:
        production_alignment = {
            node: alignment_compensation(
                node_shares[node], costs.unit_costs[node], costs.group_minima[(node.i, node.k)]
            )
            for node in nodes
        }
        compensation = apply_cost_policy(chain, charge, node_shares, total_income)
        alignment_total = sum(production_alignment.values(), ZERO) + sum(
            compensation.values(), ZERO
        )
        profit = net_profit_chain(gross, total_income, alignment_total, charge)
        for node in nodes:
            lines.append(
                PayoutLine(
                    participant=supplier_participant(node),
                    reimbursement=node_shares[node],
                    alignment=production_alignment[node] + compensation.get(node, ZERO),
                    profit_share=profit_quota_payout(fractions[node], quotas[node], profit),
                )
            )
        if header.cost_policy is CostPolicy.PLATFORM_MEMBER:
            lines.append(
                PayoutLine(
                    participant=_platform_participant(chain),
                    profit_share=profit_quota_payout(ONE, chain.platform_quota, profit),
                )
            )
        loss = profit < 0
    else:
        profit = gross - charge
        alignment_total = ZERO
        for node in nodes:
            lines.append(
                PayoutLine(
                    participant=supplier_participant(node),
                    profit_share=profit_quota_payout(fractions[node], quotas[node], profit),
                )
            )
        if header.cost_policy is CostPolicy.PLATFORM_MEMBER:
            lines.append(
                PayoutLine(
                    participant=_platform_participant(chain),
                    profit_share=profit_quota_payout(ONE, chain.platform_quota, profit),
                )
            )
        loss = profit < 0

    lines.extend(service_lines)
    payouts = round_payouts(lines, header.originator_node)
    return SharingResult(
        scheme=header.scheme,
        cost_policy=header.cost_policy,
        gross_income=gross,
        total_income=total_income,
        level_incomes=level_incomes,
        group_shares=group_shares,
        total_alignment=alignment_total,
        service_charges=charge,
        profit_chain=profit,
        loss_flag=loss,
        payouts=tuple(payouts),
    )


def result_to_tree(result: SharingResult) -> dict:
    """Plain-value tree of a sharing result, ready for canonical serialization."""
    return {
        "scheme": result.scheme.value,
        "costPolicy": result.cost_policy.value,
        "grossIncome": result.gross_income,
        "totalIncome": result.total_income,
        "levelIncomes": {str(i): amount for i, amount in result.level_incomes.items()},
        "groupShares": {
            f"{i}:{k}": amount for (i, k), amount in result.group_shares.items()
        },
        "alignmentTotal": result.total_alignment,
        "serviceCharges": result.service_charges,
        "profitChain": result.profit_chain,
        "lossFlag": result.loss_flag,
        "payouts": [
            {
                "participant": line.participant.to_dict(),
                "reimbursement": line.reimbursement,
                "alignment": line.alignment,
                "profitShare": line.profit_share,
                "total": line.total,
                "roundedTotal": line.rounded_total,
            }
            for line in result.payouts
        ],
    }
