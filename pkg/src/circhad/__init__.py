"""Analytic and exact tools for circulant complex Hadamard matrices."""

from .core import (CirculantMatrix, CyclicRoot, PhaseVector, Tolerance, circulant_from_eigenvalues,
                   eigenvalues_of_circulant, first_row, fixture, is_complex_hadamard)
from .phi import (phi_decompose, phi_fast, phi_gradient, phi_naive, phi_parts, psi_report,
                  spread_identity)
from .optimize import (OptimizerConfig, ac_restriction_compare, find_critical_points, gap_scan,
                       minimize_phi, parity_conjecture_check, verify_named_minima)
from .butson import (BudgetExceeded, ButsonRow, CyclotomicCounts, ObstructionReport,
                     cyclotomic_is_vanishing, enumerate_circulant_butson, lam_leung_admissible,
                     obstruction_table, row_is_butson_hadamard, turyn_admissible)
from .moments import (MomentReport, SetPartition, enveloping_moment_exact, half_moment_exact,
                      lattice_loop_oracle, phi_moment_bruteforce, phi_moment_montecarlo,
                      set_partitions)

__version__ = "0.1.0"
