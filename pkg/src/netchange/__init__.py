"""Change detection over frequent subgraphs of an evolving labeled network."""

from .detect import DetectConfig, EmergingChange, PeriodicChange, TrendChange
from .graph import Pattern, Snapshot, canonical_code, is_subgraph
from .miner import FrequencyTable, MiningConfig, evaluate_patterns, frequency, mine_frequent
from .windowing import PartitionConfig, TimeWindow, partition

__all__ = [
    "DetectConfig", "EmergingChange", "PeriodicChange", "TrendChange",
    "Pattern", "Snapshot", "canonical_code", "is_subgraph",
    "FrequencyTable", "MiningConfig", "evaluate_patterns", "frequency", "mine_frequent",
    "PartitionConfig", "TimeWindow", "partition",
]
