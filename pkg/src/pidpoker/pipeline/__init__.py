"""Hand records to per (level x skill class) information decompositions."""
from .analysis import AnalysisConfig, AnalysisReport, CellReport, measures, run_analysis
from .binning import (
    DEFAULT_LEVELS,
    TABLE_S1,
    BinningSpec,
    InsufficientData,
    LevelCutoffs,
    MissingCutoff,
    NegativeAmount,
    StrengthState,
    WagerState,
    bin_strength,
    bin_wager,
    equal_frequency_cutoff,
    fit_bins,
)
from .bootstrap import Interval, bootstrap_ci
from .ledger import LedgerEntry, PlayerLedger, SkillClass, classify, fish_max_mean, ledger_build
from .observations import (
    EmptyInput,
    NonHeadsUpHand,
    RoundObservation,
    Variant,
    build_joint,
    extract_observations,
)

__all__ = [n for n in dir() if not n.startswith("_")]
