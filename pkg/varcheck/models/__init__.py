from varcheck.models.dataset import DatasetSpec
from varcheck.models.diagnostics import (
    AutocovPanel,
    ConfidenceBounds,
    DiagCovComponents,
    ResidualCovEstimate,
)
from varcheck.models.experiment import ExperimentConfig, RejectionTable, WeightSummary
from varcheck.models.fit import LambdaSet, VarFit
from varcheck.models.kernel import KernelConfig, VolPathEstimate
from varcheck.models.oracles import PiecewiseVolIntegrals, SlopeReport, TwoRegimeSpec
from varcheck.models.report import TestReport, WeightedChiSq
from varcheck.models.var import SimConfig, VarCoefficients, VolCurve

__all__ = [
    "AutocovPanel",
    "ConfidenceBounds",
    "DatasetSpec",
    "DiagCovComponents",
    "ExperimentConfig",
    "KernelConfig",
    "LambdaSet",
    "PiecewiseVolIntegrals",
    "RejectionTable",
    "ResidualCovEstimate",
    "SimConfig",
    "SlopeReport",
    "TestReport",
    "TwoRegimeSpec",
    "VarCoefficients",
    "VarFit",
    "VolCurve",
    "VolPathEstimate",
    "WeightSummary",
    "WeightedChiSq",
]
