"""Reverse-square Hamiltonian cycles in dense digraphs.

Verifiers and path algebra, exact small-instance oracles, the cascade
connector, absorber machinery, reservoir routing, a greedy path cover, and
the end-to-end randomized assembly pipeline, plus a CLI and experiment
harness.
"""

from .absorbing import (AbsorberFamily, AbsorbingPath, absorb,
                        build_absorbing_path, enumerate_absorbers,
                        sample_family)
from .connecting import (Cascade, ConnectParams, build_in_cascade,
                         build_out_cascade, connect, connect_avoiding,
                         find_heavy, trace_path)
from .digraph import (Digraph, gen_extremal, gen_random_semidegree, load_graph,
                      min_semi_degree, save_graph)
from .errors import (AbsorbFailure, ChainFailure, ConnectFailure,
                     ConstructionFailure, CoverFailure, FamilyFailure,
                     InfeasibleDegreeError, ReservoirFailure)
from .oracle import (SearchBudget, SearchResult, bf_connect,
                     bf_count_absorbers, bf_disjoint_triangles,
                     bf_rs_hamiltonian_cycle)
from .pathcover import CoverResult, greedy_path_cover
from .paths import (concat, first_end_arc, is_absorber, is_rs_cycle,
                    is_rs_path, is_square_cycle, last_end_arc,
                    triangles_from_cycle)
from .pipeline import (PipelineConfig, RunReport, find_rs_hamiltonian,
                       validate_run)
from .reservoir import Reservoir, reservoir_connect, sample_reservoir

__all__ = [name for name in dir() if not name.startswith("_")]
