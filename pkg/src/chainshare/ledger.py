"""Append-only hash-chained transaction log with a deterministic state machine.

Every mutation of a supply-chain request is a transaction; appending one
produces a block whose hash chains over the previous block and the canonical
transaction bytes.  Replaying a log from genesis reconstructs the exact live
state, and any tampering with the log is detectable: records are stored as
length-prefixed canonical JSON, so a mutated byte either breaks framing,
breaks canonicality, or changes a hash.

Request lifecycle: OPEN (structure being assembled) -> SEALED (validated and
frozen) -> COMPUTED (sharing result stored).  No transitions run backwards,
and appends are serialized by a single writer lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from .canonical import canonical_bytes, loads_exact, sha256
from .descriptor import (
    _field_int,
    _field_object,
    _field_rational,
    _field_str,
    chain_to_tree,
)
from .engine import SharingResult, result_to_tree, run_sharing
from .errors import (
    ChainShareError,
    CorruptLog,
    DuplicateKey,
    IllegalTransition,
    SchemaViolation,
    UnknownRequest,
    ValidationFailed,
)
from .model import (
    CostPolicy,
    FinancialService,
    ItService,
    Level,
    NodeRef,
    RequestHeader,
    ResourceGroup,
    SharingScheme,
    Supply,
    SupplyChain,
    validate_chain,
)

__all__ = [
    "GENESIS_PREV_HASH",
    "Ledger",
    "LedgerBlock",
    "Phase",
    "RequestState",
    "Transaction",
    "TransactionKind",
    "read_log_bytes",
    "read_log_file",
    "replay",
    "state_tree",
    "verify_integrity",
]

GENESIS_PREV_HASH = bytes(32)
_LENGTH_PREFIX = 4


class TransactionKind(str, Enum):
    CREATE_REQUEST = "CREATE_REQUEST"
    ADD_RESOURCE_GROUP = "ADD_RESOURCE_GROUP"
    ADD_SUPPLY = "ADD_SUPPLY"
    ADD_FINANCIAL_SERVICE = "ADD_FINANCIAL_SERVICE"
    ADD_IT_SERVICE = "ADD_IT_SERVICE"
    SET_SHARING_OPTIONS = "SET_SHARING_OPTIONS"
    SEAL_REQUEST = "SEAL_REQUEST"
    RUN_SHARING = "RUN_SHARING"


class Phase(str, Enum):
    OPEN = "OPEN"
    SEALED = "SEALED"
    COMPUTED = "COMPUTED"


@dataclass(frozen=True)
class Transaction:
    kind: TransactionKind
    request_id: int
    actor_id: str
    payload: Mapping[str, Any]
    timestamp: int = 0  # caller-supplied milliseconds, informational only


@dataclass(frozen=True)
class LedgerBlock:
    sequence: int
    prev_hash: bytes
    tx_hash: bytes
    block_hash: bytes


@dataclass(frozen=True)
class RequestState:
    phase: Phase
    chain: SupplyChain
    result: SharingResult | None = None


def tx_to_tree(tx: Transaction) -> dict:
    return {
        "kind": tx.kind.value,
        "requestId": tx.request_id,
        "actorId": tx.actor_id,
        "payload": dict(tx.payload),
        "timestamp": tx.timestamp,
    }


def tx_hash(tx: Transaction) -> bytes:
    return sha256(canonical_bytes(tx_to_tree(tx)))


def make_block(sequence: int, prev_hash: bytes, tx: Transaction) -> LedgerBlock:
    digest = tx_hash(tx)
    return LedgerBlock(
        sequence=sequence,
        prev_hash=prev_hash,
        tx_hash=digest,
        block_hash=sha256(prev_hash + digest),
    )


# --- state machine ---------------------------------------------------------

_KINDS_WHILE_OPEN = {
    TransactionKind.ADD_RESOURCE_GROUP,
    TransactionKind.ADD_SUPPLY,
    TransactionKind.ADD_FINANCIAL_SERVICE,
    TransactionKind.ADD_IT_SERVICE,
    TransactionKind.SET_SHARING_OPTIONS,
}

_PAYLOAD_KEYS = {
    TransactionKind.CREATE_REQUEST: {"originator", "p", "d", "levs", "ress", "sups"},
    TransactionKind.ADD_RESOURCE_GROUP: {"i", "k", "resourceName", "g", "BOM"},
    TransactionKind.ADD_SUPPLY: {
        "i", "k", "m", "supplierName", "supplierId", "cf", "cv", "additionalData", "q", "tp",
    },
    TransactionKind.ADD_FINANCIAL_SERVICE: {"serviceName", "uri", "providerId", "invested", "ratio"},
    TransactionKind.ADD_IT_SERVICE: {"serviceName", "uri", "providerId", "access", "cost"},
    TransactionKind.SET_SHARING_OPTIONS: {"scheme", "costPolicy", "platformQuota", "originatorNode"},
    TransactionKind.SEAL_REQUEST: set(),
    TransactionKind.RUN_SHARING: set(),
}

_SCHEMES = {scheme.value: scheme for scheme in SharingScheme}
_POLICIES = {policy.value: policy for policy in CostPolicy}


def _check_payload(tx: Transaction) -> dict:
    if not tx.actor_id:
        raise SchemaViolation("actorId must be non-empty", path="$.actorId")
    if not isinstance(tx.payload, Mapping):
        raise SchemaViolation("payload must be an object", path="$.payload")
    allowed = _PAYLOAD_KEYS[tx.kind]
    unknown = set(tx.payload) - allowed
    if unknown:
        raise SchemaViolation(
            f"unknown payload fields for {tx.kind.value}: {sorted(unknown)}",
            path="$.payload",
        )
    return dict(tx.payload)


def _apply(states: Mapping[int, RequestState], tx: Transaction) -> RequestState:
    """Compute the next state of ``tx.request_id``; raises if the transition is illegal."""
    payload = _check_payload(tx)
    rid = tx.request_id

    if tx.kind is TransactionKind.CREATE_REQUEST:
        if rid in states:
            raise IllegalTransition(
                f"request {rid} already exists",
                phase=states[rid].phase.value,
                kind=tx.kind.value,
            )
        header = RequestHeader(
            request_id=rid,
            originator_id=_field_str(payload, "originator", "$.payload"),
            price=_field_rational(payload, "p", "$.payload"),
            demand=_field_int(payload, "d", "$.payload"),
            max_levels=_field_int(payload, "levs", "$.payload"),
            max_resources=_field_int(payload, "ress", "$.payload"),
            max_suppliers=_field_int(payload, "sups", "$.payload"),
        )
        return RequestState(phase=Phase.OPEN, chain=SupplyChain(header=header))

    if rid not in states:
        raise UnknownRequest(rid)
    state = states[rid]
    chain = state.chain

    if tx.kind in _KINDS_WHILE_OPEN:
        if state.phase is not Phase.OPEN:
            raise IllegalTransition(
                f"{tx.kind.value} is only legal while OPEN, request {rid} is {state.phase.value}",
                phase=state.phase.value,
                kind=tx.kind.value,
            )
        return replace(state, chain=_apply_open(chain, tx, payload))

    if tx.kind is TransactionKind.SEAL_REQUEST:
        if state.phase is not Phase.OPEN:
            raise IllegalTransition(
                f"cannot seal request {rid} in phase {state.phase.value}",
                phase=state.phase.value,
                kind=tx.kind.value,
            )
        report = validate_chain(chain)
        if not report.ok:
            raise ValidationFailed(report)
        return replace(state, phase=Phase.SEALED)

    if tx.kind is TransactionKind.RUN_SHARING:
        if state.phase is not Phase.SEALED:
            raise IllegalTransition(
                f"cannot run sharing on request {rid} in phase {state.phase.value}",
                phase=state.phase.value,
                kind=tx.kind.value,
            )
        result = run_sharing(chain)
        return RequestState(phase=Phase.COMPUTED, chain=chain, result=result)

    raise IllegalTransition(f"unsupported transaction kind {tx.kind}", kind=str(tx.kind))


def _apply_open(chain: SupplyChain, tx: Transaction, payload: dict) -> SupplyChain:
    path = "$.payload"
    if tx.kind is TransactionKind.ADD_RESOURCE_GROUP:
        i = _field_int(payload, "i", path)
        group = ResourceGroup(
            resource_index=_field_int(payload, "k", path),
            resource_name=_field_str(payload, "resourceName", path),
            quota=_field_rational(payload, "g", path),
            bom=_field_rational(payload, "BOM", path),
        )
        if chain.find_group(i, group.resource_index) is not None:
            raise DuplicateKey(
                f"resource group (i={i}, k={group.resource_index}) already exists",
                path=f"{path}.k",
            )
        levels = list(chain.levels)
        for pos, level in enumerate(levels):
            if level.index == i:
                levels[pos] = replace(level, resources=level.resources + (group,))
                break
        else:
            levels.append(Level(index=i, resources=(group,)))
            levels.sort(key=lambda level: level.index)
        return replace(chain, levels=tuple(levels))

    if tx.kind is TransactionKind.ADD_SUPPLY:
        i = _field_int(payload, "i", path)
        k = _field_int(payload, "k", path)
        additional_raw = _field_object(payload, "additionalData", path)
        additional: dict[str, Fraction] = {}
        for name in additional_raw:
            additional[name] = _field_rational(additional_raw, name, f"{path}.additionalData")
        supply = Supply(
            supplier_index=_field_int(payload, "m", path),
            supplier_name=_field_str(payload, "supplierName", path),
            supplier_id=_field_str(payload, "supplierId", path),
            fixed_cost=_field_rational(payload, "cf", path),
            variable_cost=_field_rational(payload, "cv", path),
            additional_economy=additional,
            quantity=_field_rational(payload, "q", path),
            time_span=_field_rational(payload, "tp", path),
        )
        target = chain.find_group(i, k)
        if target is None:
            raise IllegalTransition(
                f"no resource group (i={i}, k={k}) to add a supply to",
                kind=tx.kind.value,
            )
        if any(s.supplier_index == supply.supplier_index for s in target.supplies):
            raise DuplicateKey(
                f"supplier m={supply.supplier_index} already tendered for (i={i}, k={k})",
                path=f"{path}.m",
            )
        levels = tuple(
            replace(
                level,
                resources=tuple(
                    replace(g, supplies=g.supplies + (supply,)) if g is target else g
                    for g in level.resources
                ),
            )
            if level.index == i
            else level
            for level in chain.levels
        )
        return replace(chain, levels=levels)

    if tx.kind is TransactionKind.ADD_FINANCIAL_SERVICE:
        service = FinancialService(
            service_name=_field_str(payload, "serviceName", path),
            uri=_field_str(payload, "uri", path),
            provider_id=_field_str(payload, "providerId", path),
            invested=_field_rational(payload, "invested", path),
            ratio=_field_rational(payload, "ratio", path),
        )
        level = replace(
            chain.service_level,
            financial_services=chain.service_level.financial_services + (service,),
        )
        return replace(chain, service_level=level)

    if tx.kind is TransactionKind.ADD_IT_SERVICE:
        service = ItService(
            service_name=_field_str(payload, "serviceName", path),
            uri=_field_str(payload, "uri", path),
            provider_id=_field_str(payload, "providerId", path),
            access=_field_str(payload, "access", path),
            cost=_field_rational(payload, "cost", path),
        )
        level = replace(
            chain.service_level,
            it_services=chain.service_level.it_services + (service,),
        )
        return replace(chain, service_level=level)

    # SET_SHARING_OPTIONS: full replacement of all four options
    scheme_text = _field_str(payload, "scheme", path) or SharingScheme.PROFIT_SHARING.value
    if scheme_text not in _SCHEMES:
        raise SchemaViolation(f"unknown scheme {scheme_text!r}", path=f"{path}.scheme")
    policy_text = _field_str(payload, "costPolicy", path) or CostPolicy.SHARED.value
    if policy_text not in _POLICIES:
        raise SchemaViolation(f"unknown costPolicy {policy_text!r}", path=f"{path}.costPolicy")
    platform_quota = None
    if payload.get("platformQuota") is not None:
        platform_quota = _field_rational(payload, "platformQuota", path)
    originator = None
    if payload.get("originatorNode") is not None:
        node = _field_object(payload, "originatorNode", path)
        npath = f"{path}.originatorNode"
        originator = NodeRef(
            i=_field_int(node, "i", npath),
            k=_field_int(node, "k", npath),
            m=_field_int(node, "m", npath),
        )
    header = replace(
        chain.header,
        scheme=_SCHEMES[scheme_text],
        cost_policy=_POLICIES[policy_text],
        originator_node=originator,
    )
    return replace(chain, header=header, platform_quota=platform_quota)


# --- log encoding ----------------------------------------------------------


def block_to_tree(block: LedgerBlock) -> dict:
    return {
        "sequence": block.sequence,
        "prevHash": block.prev_hash.hex(),
        "txHash": block.tx_hash.hex(),
        "blockHash": block.block_hash.hex(),
    }


def record_bytes(block: LedgerBlock, tx: Transaction) -> bytes:
    body = canonical_bytes({"block": block_to_tree(block), "tx": tx_to_tree(tx)})
    return len(body).to_bytes(_LENGTH_PREFIX, "big") + body


def _digest_from(tree: dict, key: str) -> bytes:
    value = tree.get(key)
    if not isinstance(value, str):
        raise CorruptLog(f"block field {key} missing or not a string")
    try:
        digest = bytes.fromhex(value)
    except ValueError:
        raise CorruptLog(f"block field {key} is not hex") from None
    if len(digest) != 32:
        raise CorruptLog(f"block field {key} is not a 32-byte digest")
    return digest


def _record_from_tree(tree: Any) -> tuple[LedgerBlock, Transaction]:
    if not isinstance(tree, dict) or set(tree) != {"block", "tx"}:
        raise CorruptLog("record must be an object with block and tx")
    raw_block, raw_tx = tree["block"], tree["tx"]
    if not isinstance(raw_block, dict) or not isinstance(raw_tx, dict):
        raise CorruptLog("block and tx must be objects")
    sequence = raw_block.get("sequence")
    if not isinstance(sequence, int) or isinstance(sequence, bool) or sequence < 0:
        raise CorruptLog("block sequence must be a non-negative integer")
    block = LedgerBlock(
        sequence=sequence,
        prev_hash=_digest_from(raw_block, "prevHash"),
        tx_hash=_digest_from(raw_block, "txHash"),
        block_hash=_digest_from(raw_block, "blockHash"),
    )
    kind_text = raw_tx.get("kind")
    if kind_text not in {kind.value for kind in TransactionKind}:
        raise CorruptLog(f"unknown transaction kind {kind_text!r}")
    request_id = raw_tx.get("requestId")
    if not isinstance(request_id, int) or isinstance(request_id, bool):
        raise CorruptLog("transaction requestId must be an integer")
    actor = raw_tx.get("actorId")
    if not isinstance(actor, str):
        raise CorruptLog("transaction actorId must be a string")
    payload = raw_tx.get("payload")
    if not isinstance(payload, dict):
        raise CorruptLog("transaction payload must be an object")
    timestamp = raw_tx.get("timestamp")
    if not isinstance(timestamp, int) or isinstance(timestamp, bool):
        raise CorruptLog("transaction timestamp must be an integer")
    if set(raw_tx) != {"kind", "requestId", "actorId", "payload", "timestamp"}:
        raise CorruptLog("transaction record has missing or extra fields")
    tx = Transaction(
        kind=TransactionKind(kind_text),
        request_id=request_id,
        actor_id=actor,
        payload=payload,
        timestamp=timestamp,
    )
    return block, tx


def read_log_bytes(data: bytes) -> Iterator[tuple[LedgerBlock, Transaction]]:
    """Decode length-prefixed canonical records; raises CorruptLog on any defect."""
    offset = 0
    while offset < len(data):
        if offset + _LENGTH_PREFIX > len(data):
            raise CorruptLog(f"truncated length prefix at byte {offset}")
        length = int.from_bytes(data[offset : offset + _LENGTH_PREFIX], "big")
        start = offset + _LENGTH_PREFIX
        end = start + length
        if end > len(data):
            raise CorruptLog(f"truncated record at byte {start}")
        raw = data[start:end]
        try:
            tree = loads_exact(raw)
        except Exception:
            raise CorruptLog(f"record at byte {start} is not valid JSON") from None
        if canonical_bytes(tree) != raw:
            raise CorruptLog(f"record at byte {start} is not canonical")
        yield _record_from_tree(tree)
        offset = end


def read_log_file(path: str | Path) -> list[tuple[LedgerBlock, Transaction]]:
    return list(read_log_bytes(Path(path).read_bytes()))


def verify_integrity(records: Iterable[tuple[LedgerBlock, Transaction]]) -> bool:
    """True iff sequence numbers, hash links and hash equations all hold."""
    prev = GENESIS_PREV_HASH
    expected_sequence = 0
    for block, tx in records:
        if block.sequence != expected_sequence:
            return False
        if block.prev_hash != prev:
            return False
        if block.tx_hash != tx_hash(tx):
            return False
        if block.block_hash != sha256(block.prev_hash + block.tx_hash):
            return False
        prev = block.block_hash
        expected_sequence += 1
    return True


def replay(records: Iterable[tuple[LedgerBlock, Transaction]]) -> dict[int, RequestState]:
    """Rebuild the world state by folding every logged transaction from genesis."""
    records = list(records)
    if not verify_integrity(records):
        raise CorruptLog("hash chain verification failed")
    states: dict[int, RequestState] = {}
    for index, (_block, tx) in enumerate(records):
        try:
            states[tx.request_id] = _apply(states, tx)
        except ChainShareError as exc:
            raise CorruptLog(f"logged transaction {index} does not apply: {exc.detail}") from None
    return states


def state_tree(states: Mapping[int, RequestState]) -> dict:
    """Canonical-serializable tree of the world state (timestamps never appear)."""
    return {
        str(rid): {
            "phase": state.phase.value,
            "chain": chain_to_tree(state.chain),
            "result": None if state.result is None else result_to_tree(state.result),
        }
        for rid, state in states.items()
    }


class Ledger:
    """Live ledger: single-writer append with an optional on-disk log.

    When a log path is given, existing records are replayed on startup and
    every accepted transaction is appended to the file before it becomes
    visible.  All appends are serialized; reads see fully applied state only.
    """

    def __init__(self, log_path: str | Path | None = None):
        self._lock = threading.Lock()
        self._records: list[tuple[LedgerBlock, Transaction]] = []
        self._states: dict[int, RequestState] = {}
        self._path = Path(log_path) if log_path is not None else None
        if self._path is not None and self._path.exists():
            self._records = read_log_file(self._path)
            self._states = replay(self._records)

    def append(self, tx: Transaction) -> LedgerBlock:
        """Apply the transition and append a block; raises without side effects."""
        with self._lock:
            new_state = _apply(self._states, tx)
            prev = self._records[-1][0].block_hash if self._records else GENESIS_PREV_HASH
            block = make_block(len(self._records), prev, tx)
            if self._path is not None:
                with open(self._path, "ab") as handle:
                    handle.write(record_bytes(block, tx))
                    handle.flush()
            self._records.append((block, tx))
            self._states[tx.request_id] = new_state
            return block

    def records(self) -> list[tuple[LedgerBlock, Transaction]]:
        with self._lock:
            return list(self._records)

    def request_state(self, request_id: int) -> RequestState:
        with self._lock:
            if request_id not in self._states:
                raise UnknownRequest(request_id)
            return self._states[request_id]

    def states(self) -> dict[int, RequestState]:
        with self._lock:
            return dict(self._states)

    def verify(self) -> bool:
        return verify_integrity(self.records())

    def state_hash(self) -> bytes:
        """SHA-256 over the canonical world state; equal states hash equally."""
        return sha256(canonical_bytes(state_tree(self.states())))

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)
