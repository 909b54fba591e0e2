"""Numerical laboratory for functional inequalities on finite reversible
Markov chains and bounded-window Poisson point processes."""

__version__ = "0.1.0"

from .finite_space import (FiniteSpace, entropy, lr_norm, mean, p_defect,
                           two_point_space, uniform_space, variance)
from .dirichlet import (Kernel, carre_du_champ, check_detailed_balance,
                        dirichlet_form, gamma_plus, generator_apply,
                        random_reversible_kernel, stationarity_residual)
from .constants import (ConstantReport, OptimizerOptions, TheoremConstants,
                        VerificationReport, big_K, k_theta, optimal_beckner_p,
                        optimal_beckner_q, optimal_lsi, optimal_mlsi,
                        optimal_poincare, verify_implication_diagram,
                        verify_main_theorem)
from .models import (ModelBundle, ProductSpec, build_glauber, build_hardcore,
                     build_interchange, build_ising, build_multislice,
                     build_zero_range, dobrushin_parameters, erg_graph_delta,
                     hardcore_star_gap, metropolis_kernel, model_from_json)
from .moments import (BecknerRegime, MomentCheckReport, check_onesided_moments,
                      check_twosided_moments, hoeffding_supremum_bound, kappa,
                      monte_carlo_tail_compare, symmetric_group_moment_check)
from .chaos import (IndexedTensor, TailParameters, chaos_moment_bound,
                    enumerate_partitions, higher_order_tail,
                    moment_decomposition_bound, partition_norm,
                    polynomial_tail_bound)
from .poisson import (PointConfiguration, PoissonFunctional, Window,
                      empirical_process_bound, gamma_plus_poisson, mecke_check,
                      poisson_moment_check, sample_process,
                      self_bounded_moment_bound, u_stat_tail_bound, u_statistic)
