"""Offline driver: validate descriptors, run and compare sharing, verify logs.

Exit codes: 0 success, 1 validation/verification failure, 2 I/O or parse
failure.  Tables render 2-decimal currency; ``--exact`` switches to raw
rationals and ``--json`` writes the canonical result document.
"""

from __future__ import annotations

import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import click

from .canonical import canonical_dumps
from .descriptor import parse_chain_descriptor
from .engine import SharingResult, result_to_tree, round_to_cents, run_sharing
from .errors import ChainShareError, CorruptLog, ValidationFailed
from .ledger import read_log_file, replay, verify_integrity
from .model import CostPolicy, SharingScheme, SupplyChain, validate_chain

_SCHEME_CHOICES = {scheme.value: scheme for scheme in SharingScheme}
_POLICY_CHOICES = {policy.value: policy for policy in CostPolicy}


def fmt_money(value: Fraction) -> str:
    """Exact value rendered to cents, half-even."""
    cents = round_to_cents(value) * 100
    units, rest = divmod(abs(int(cents)), 100)
    sign = "-" if cents < 0 else ""
    return f"{sign}{units}.{rest:02d}"


def _fmt(value: Fraction, exact: bool) -> str:
    return str(value) if exact else fmt_money(value)


def _participant_name(line) -> str:
    participant = line.participant
    if participant.node is not None:
        node = participant.node
        where = f"({node.i},{node.k},{node.m})"
        return f"{participant.label or 'supplier'} {where}"
    return f"{participant.label or participant.kind} [{participant.kind}]"


def _load_chain(path: str) -> SupplyChain:
    try:
        text = Path(path).read_bytes()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(2)
    try:
        return parse_chain_descriptor(text)
    except ChainShareError as exc:
        location = f" at {exc.path}" if exc.path else ""
        click.echo(f"error: {exc.code}{location}: {exc.detail}", err=True)
        sys.exit(2)


def _apply_overrides(chain: SupplyChain, scheme: str | None, policy: str | None) -> SupplyChain:
    header = chain.header
    if scheme:
        header = replace(header, scheme=_SCHEME_CHOICES[scheme])
    if policy:
        header = replace(header, cost_policy=_POLICY_CHOICES[policy])
    return replace(chain, header=header)


def _print_violations(report) -> None:
    for violation in report.violations:
        click.echo(f"violation {violation.code} at {violation.path}: {violation.message}", err=True)
    for warning in report.warnings:
        click.echo(f"warning {warning.code} at {warning.path}: {warning.message}", err=True)


def _print_result(result: SharingResult, exact: bool) -> None:
    click.echo(f"scheme {result.scheme.value}, cost policy {result.cost_policy.value}")
    click.echo(f"gross income        {_fmt(result.gross_income, exact)}")
    click.echo(f"total income        {_fmt(result.total_income, exact)}")
    click.echo(f"alignment total     {_fmt(result.total_alignment, exact)}")
    click.echo(f"service charges     {_fmt(result.service_charges, exact)}")
    click.echo(f"profit chain        {_fmt(result.profit_chain, exact)}")
    if result.loss_flag:
        click.echo("LOSS: distributable residual is negative; result is not executable")
    click.echo("")
    names = [_participant_name(line) for line in result.payouts]
    width = max([len(name) for name in names] + [11])
    header = (
        f"{'participant'.ljust(width)}  {'reimburse':>12}  {'alignment':>12}"
        f"  {'profit':>12}  {'total':>14}  {'rounded':>12}"
    )
    click.echo(header)
    for name, line in zip(names, result.payouts):
        click.echo(
            f"{name.ljust(width)}  {_fmt(line.reimbursement, exact):>12}"
            f"  {_fmt(line.alignment, exact):>12}  {_fmt(line.profit_share, exact):>12}"
            f"  {_fmt(line.total, exact):>14}  {fmt_money(line.rounded_total):>12}"
        )
    total = sum((line.total for line in result.payouts), Fraction(0))
    rounded = sum((line.rounded_total for line in result.payouts), Fraction(0))
    click.echo(
        f"{'sum'.ljust(width)}  {'':>12}  {'':>12}  {'':>12}"
        f"  {_fmt(total, exact):>14}  {fmt_money(rounded):>12}"
    )


def _write_json(tree, destination: str) -> None:
    text = canonical_dumps(tree)
    if destination == "-":
        click.echo(text)
    else:
        Path(destination).write_text(text + "\n", encoding="utf-8")


@click.group()
def main() -> None:
    """Income sharing for consortium supply chains."""


@main.command()
@click.argument("descriptor", type=click.Path())
def validate(descriptor: str) -> None:
    """Check a descriptor against every structural invariant."""
    chain = _load_chain(descriptor)
    report = validate_chain(chain)
    _print_violations(report)
    if not report.ok:
        sys.exit(1)
    click.echo("valid")


@main.command()
@click.argument("descriptor", type=click.Path())
@click.option("--json", "json_path", default=None, help="write the canonical result JSON to PATH ('-' for stdout)")
@click.option("--exact", is_flag=True, help="print raw rationals instead of 2-decimal currency")
@click.option("--scheme", type=click.Choice(sorted(_SCHEME_CHOICES)), default=None)
@click.option("--policy", type=click.Choice(sorted(_POLICY_CHOICES)), default=None)
def run(descriptor: str, json_path: str | None, exact: bool, scheme: str | None, policy: str | None) -> None:
    """Parse, validate and run the sharing computation on one descriptor."""
    chain = _apply_overrides(_load_chain(descriptor), scheme, policy)
    report = validate_chain(chain)
    if not report.ok:
        _print_violations(report)
        sys.exit(1)
    try:
        result = run_sharing(chain)
    except ValidationFailed as exc:
        _print_violations(exc.report)
        sys.exit(1)
    except ChainShareError as exc:
        click.echo(f"error: {exc.code}: {exc.detail}", err=True)
        sys.exit(1)
    _print_result(result, exact)
    if json_path:
        _write_json(result_to_tree(result), json_path)


@main.command()
@click.argument("descriptor", type=click.Path())
@click.option("--json", "json_path", default=None, help="write the comparison JSON to PATH ('-' for stdout)")
@click.option("--exact", is_flag=True, help="print raw rationals instead of 2-decimal currency")
def compare(descriptor: str, json_path: str | None, exact: bool) -> None:
    """Run every applicable scheme and cost-policy combination side by side."""
    base = _load_chain(descriptor)
    results: dict[str, SharingResult] = {}
    for scheme in SharingScheme:
        for policy in CostPolicy:
            if policy is CostPolicy.PLATFORM_MEMBER and base.platform_quota is None:
                continue
            if policy is CostPolicy.ORIGINATOR_PAYS and base.header.originator_node is None:
                continue
            candidate = _apply_overrides(base, scheme.value, policy.value)
            if not validate_chain(candidate).ok:
                continue
            try:
                results[f"{scheme.value}/{policy.value}"] = run_sharing(candidate)
            except ChainShareError:
                continue
    if not results:
        click.echo("error: no scheme/policy configuration is applicable", err=True)
        sys.exit(1)

    keys = list(results)
    names: dict[str, None] = {}
    totals: dict[str, dict[str, Fraction]] = {key: {} for key in keys}
    for key, result in results.items():
        for line in result.payouts:
            name = _participant_name(line)
            names.setdefault(name, None)
            totals[key][name] = line.rounded_total
    width = max(len(name) for name in names)
    column = max([len(key) for key in keys] + [12])
    click.echo(f"{'participant'.ljust(width)}  " + "  ".join(key.rjust(column) for key in keys))
    for name in names:
        cells = []
        for key in keys:
            value = totals[key].get(name)
            cells.append(("-" if value is None else _fmt(value, exact)).rjust(column))
        click.echo(f"{name.ljust(width)}  " + "  ".join(cells))
    baseline = keys[0]
    if len(keys) > 1:
        click.echo("")
        click.echo(f"deltas against {baseline}")
        for name in names:
            cells = []
            for key in keys:
                value = totals[key].get(name)
                reference = totals[baseline].get(name)
                if value is None or reference is None:
                    cells.append("-".rjust(column))
                else:
                    cells.append(_fmt(value - reference, exact).rjust(column))
            click.echo(f"{name.ljust(width)}  " + "  ".join(cells))
    click.echo("")
    gross = next(iter(results.values())).gross_income
    sums = []
    conserved = True
    for key in keys:
        column_sum = sum(totals[key].values(), Fraction(0))
        conserved &= column_sum == round_to_cents(gross)
        sums.append(f"{key}={fmt_money(column_sum)}")
    click.echo(
        "column sums: " + "  ".join(sums)
        + f"  (each equals gross income {fmt_money(gross)}: {'yes' if conserved else 'NO'})"
    )
    if json_path:
        _write_json(
            {key: result_to_tree(result) for key, result in results.items()},
            json_path,
        )
    if not conserved:
        sys.exit(1)


@main.command()
@click.argument("ledger_file", type=click.Path())
def verify(ledger_file: str) -> None:
    """Verify a ledger file's hash chain and replay it."""
    try:
        records = read_log_file(ledger_file)
    except OSError as exc:
        click.echo(f"error: cannot read {ledger_file}: {exc}", err=True)
        sys.exit(2)
    except CorruptLog as exc:
        click.echo(f"corrupt: {exc.detail}", err=True)
        sys.exit(1)
    if not verify_integrity(records):
        click.echo("corrupt: hash chain verification failed", err=True)
        sys.exit(1)
    try:
        states = replay(records)
    except CorruptLog as exc:
        click.echo(f"corrupt: {exc.detail}", err=True)
        sys.exit(1)
    click.echo(f"ok: {len(records)} blocks, {len(states)} requests")


@main.command()
@click.option("--host", default=lambda: os.environ.get("CHAINSHARE_HOST", "127.0.0.1"))
@click.option("--port", default=lambda: int(os.environ.get("CHAINSHARE_PORT", "8000")), type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service (ledger file and auth come from CHAINSHARE_* env vars)."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
