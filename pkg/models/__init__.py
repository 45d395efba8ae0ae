"""Domain models for the dispersive lab (package-level exports)."""

from .estimate import DecayFit, ExponentFit, ExponentTable, StrichartzScan, SymbolNormScan, TruncationScan
from .evolution import CoherentTrack, EvolutionResult, WeylOperator
from .flow import FlowBundle, FlowSeries, FlowState
from .grid import Grid, PhaseSpaceField, SampledField
from .partition import BudgetDensity, PartitionReport, TimePartition
from .run_config import RunConfig
from .surface import SeparableSymbol, SurfaceData, WWSymbols
from .symbol import ClassEntry, ClassReport, ClassTag, Symbol

__all__ = [
    "BudgetDensity", "ClassEntry", "ClassReport", "ClassTag", "CoherentTrack", "DecayFit",
    "EvolutionResult", "ExponentFit", "ExponentTable", "FlowBundle", "FlowSeries", "FlowState",
    "Grid", "PartitionReport", "PhaseSpaceField", "RunConfig", "SampledField", "SeparableSymbol",
    "StrichartzScan", "SurfaceData", "Symbol", "SymbolNormScan", "TimePartition", "TruncationScan",
    "WWSymbols", "WeylOperator",
]
