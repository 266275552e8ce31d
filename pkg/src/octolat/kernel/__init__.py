"""Lattice fundamental solutions, the continuous kernel and their checks."""

from .estimate import (
    EstimateScan,
    continuous_e,
    defining_identities,
    kernel_estimate_scan,
    parity_weighted_e,
    weight_omega,
)
from .srw import srw_green_oracle, truncation_bias
from .table import (
    CoverageError,
    KernelTable,
    build_kernel_table,
    canonical_class,
    even_classes,
    f1_value,
)
