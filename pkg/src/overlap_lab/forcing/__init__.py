"""Forcing-style condition kit: validation, order, builders, amalgamation."""
from .amalgam import amalgamate, check_twin
from .chain import GenericRun, OverlapCertificate, build_chain
from .condition import (
    CalEntry,
    Condition,
    cal_m,
    capture_translate,
    leq,
    leq_failures,
    validate_condition,
)
from .construct import bootstrap, extend_add_element, extend_dense
from .oracle import ModelOracle, RankData, RankOracle, TableOracle

__all__ = [
    "CalEntry",
    "Condition",
    "GenericRun",
    "ModelOracle",
    "OverlapCertificate",
    "RankData",
    "RankOracle",
    "TableOracle",
    "amalgamate",
    "bootstrap",
    "build_chain",
    "cal_m",
    "capture_translate",
    "check_twin",
    "extend_add_element",
    "extend_dense",
    "leq",
    "leq_failures",
    "validate_condition",
]
