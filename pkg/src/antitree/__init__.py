"""Spectral toolkit for Kirchhoff Laplacians on radially symmetric antitrees."""

from .model import (AlternatingSpheres, AntitreeSpec, ConstantLength,
                    CustomLength, ExplicitLengths, ExplicitSpheres,
                    ExponentialSpheres, InvalidSpecError, MetricProfile,
                    PolynomialSpheres, PowerLength, SeriesStatus,
                    SeriesVerdict, build_profile, classify_series,
                    partial_dual_length, partial_volume)
from .criteria import (DiagnosticsReport, GapEstimate, Verdict,
                       ac_sphere_ratio_sum, ac_string_deviation,
                       ac_window_sum, classify, discreteness_witness,
                       essential_gap_constant, gap_constant,
                       isoperimetric_constant, self_adjointness,
                       singular_flags, trace_class, volume_growth)
from .spectra import (BoundaryCondition, InternalConsistencyError,
                      SpectralBlock, Spectrum, bridge_eigenvalues,
                      bridge_secular, cell_eigenvalues, counting_function,
                      decomposed_spectrum, lambda0_estimate, sym_count,
                      sym_eigenvalues, sym_transfer, total_volume, weyl_ratio)
from .graph_oracle import (MetricGraphMesh, assemble, build_mesh,
                           oracle_eigenvalues, verify_decomposition)

__version__ = "0.1.0"
