from .balance import (BalanceSchedule, BalanceSplit, GreedyResult, balance_split, greedy_balance,
                      replay_greedy)
from .three_series import (CaseReport, LabeledPartition, Step, build_labeled_partition,
                           three_series_select, validate_certificate)
from .two_series import TwoSeriesResult, two_series_select

__all__ = [
    "BalanceSchedule", "BalanceSplit", "GreedyResult", "balance_split", "greedy_balance",
    "replay_greedy", "CaseReport", "LabeledPartition", "Step", "build_labeled_partition",
    "three_series_select", "validate_certificate", "TwoSeriesResult", "two_series_select",
]
