"""Stability analysis and simulation of linearly coupled network dynamical systems."""
from .errors import (ExhaustedAttempts, GraphParseError, InvalidArgument, MarginalNode, NetstabError,
                     NoSolution, NotAnEquilibrium, NotStabilizable, NumericalFailure, StiffnessError)
from .graph import (DegreeProfile, Graph, complete, cycle, degree_profile, fig3_graph, is_bipartite,
                    is_connected, is_non_positive_divergence, parse_graph, path, random_balanced_digraph,
                    serialize_graph, star)
from .spectral import (CouplingConfig, SpectralReport, coupling_laplacian, critical_coupling, eigenvalues,
                       full_network_jacobian, jacobian_spectrum_sum, necessary_condition_check,
                       network_laplacian, stability_verdict)
from .dynamics import (GeneralCoupling, NetworkSystem, NodeSystem, cubic_scalar, linear_node,
                       network_vector_field, parse_node, sprott_circulant, sync_equilibrium_check,
                       variational_matrix)
from .sim import (IntegratorConfig, SwitchedNetworkSystem, SwitchingSignal, Trajectory,
                  estimate_decay_envelope, integrate, random_switching_signal, simulate_network,
                  simulate_switched)
from .lyapunov import (ConditionReport, QuadraticLF, QuadraticTypeLF, common_quadratic_condition,
                       gershgorin_condition, lyapunov_decrease_along, non_positive_divergence_condition,
                       quadratic_type_check, solve_node_lyapunov)

__version__ = "0.1.0"
