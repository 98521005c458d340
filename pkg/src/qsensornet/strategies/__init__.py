"""Discrimination engines: Helstrom, unambiguous, pretty-good and cluster POVMs."""

from .cluster import (
    ClusterPovmParams,
    QuarticCheck,
    cluster_unambiguous_povm,
    quartic_characteristic,
)
from .helstrom import HelstromResult, helstrom_binary, helstrom_pure_qubit
from .pgm import PgmResult, pgm
from .unambiguous import UnambiguousConstruction, unambiguous_product

__all__ = [
    "ClusterPovmParams",
    "HelstromResult",
    "PgmResult",
    "QuarticCheck",
    "UnambiguousConstruction",
    "cluster_unambiguous_povm",
    "helstrom_binary",
    "helstrom_pure_qubit",
    "pgm",
    "quartic_characteristic",
    "unambiguous_product",
]
