"""Income-sharing engine for consortium supply chains.

Core pieces: an exact-rational descriptor codec and validator, the five-step
sharing computation with its revenue/profit strategies and service-cost
scenarios, an append-only hash-chained ledger whose replay reconstructs all
request state, an HTTP facade for the consortium-formation workflow, and a
CLI for offline runs and log verification.
"""

from .canonical import canonical_bytes, canonical_dumps
from .descriptor import parse_chain_descriptor, serialize_chain_descriptor
from .engine import SharingResult, result_to_tree, round_payouts, run_sharing
from .errors import ChainShareError
from .ledger import Ledger, Transaction, TransactionKind, replay, verify_integrity
from .model import (
    CostPolicy,
    SharingScheme,
    SupplyChain,
    ValidationReport,
    validate_chain,
)

__version__ = "0.1.0"

__all__ = [
    "ChainShareError",
    "CostPolicy",
    "Ledger",
    "SharingResult",
    "SharingScheme",
    "SupplyChain",
    "Transaction",
    "TransactionKind",
    "ValidationReport",
    "canonical_bytes",
    "canonical_dumps",
    "parse_chain_descriptor",
    "replay",
    "result_to_tree",
    "round_payouts",
    "run_sharing",
    "serialize_chain_descriptor",
    "validate_chain",
    "verify_integrity",
]
