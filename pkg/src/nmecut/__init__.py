"""Parallel wire cutting with non-maximally entangled resource states."""

__version__ = "0.1.0"

from .entangle import (
    SchmidtDecomposition,
    SchmidtVector,
    advantage_separable_augment,
    composite_robustness_pure,
    overhead_baseline,
    overhead_nme,
    overhead_table,
    robustness_pure,
    schmidt_decompose,
)
from .estimator import EstimateResult, EstimatorConfig, empirical_overhead, estimate, run_shot, sample_term
from .gf import FieldContext, field_new, gf_add, gf_mul
from .mub import mub_family, phase_op, shift_op
from .qcore import DensityOperator, Observable, PauliString, PureState, QuantumChannel
from .qpd import (
    CorrectionTable,
    DegenerateResourceError,
    Qpd,
    QpdTerm,
    prob_correction,
    qpd_baseline,
    qpd_nme,
    qpd_streamlined,
    verify_identity,
)
from .teleport import nme_overlaps, teleport_channel
