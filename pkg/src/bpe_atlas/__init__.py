"""Bounded point evaluations for weighted shifts on directed graphs."""

from .errors import (BpeAtlasError, ConfigError, DivergentSeries, HorizonExceeded,
                     InfiniteDimensionalKernel, InvalidArgument, NoLoopAtRoot, NotLeftInvertible)
from .graph_model import (ChainRule, ShiftGraph, WeightAssignment, build_classical,
                          build_example1, build_example2, build_phi_graph, example1_weight,
                          make_weights, materialize_support)
from .operator_core import (DualWeights, HilbertVector, WanderingBasis, apply_adjoint,
                            apply_shift, cauchy_dual, orthonormalize, wandering_basis)
from .spectral import (OrbitRecord, SpectralReport, analyticity_series, disc_radii,
                       example1_certificate, local_spectral_radius, operator_norm_n,
                       orbit_norms, sequence_conditions, spectral_radius_estimate,
                       weight_product_log)
from .bpe import (BOUNDED, INCONCLUSIVE, UNBOUNDED, AdjointEigenbasis, BpeEngine, BpeSample,
                  EvaluationData, GridSpec, ModuliBasis, RegionScan, Thresholds,
                  adjoint_eigenbasis, b_n, classify_point, evaluation_data, gram_test,
                  kernel_gram, moduli_basis, s_n_apply, scan_region)
from .config import RunConfig, parse_config, serialize
from .reporting import VerificationTable, emit_heatmap, verify_example1, verify_example2

__version__ = "0.1.0"
