"""Quasi-cyclic LDPC code design by cyclic lifting of protographs.

The pipeline: build or load a small base Tanner graph, enumerate its
short tailless backtrackless closed walks, then pick per-edge cyclic
shifts so the lifted graph meets a target ACE spectrum.  A BP decoding
harness over the BI-AWGN channel closes the loop by measuring error
rates of the designed codes.
"""

from .graph import (Cycle, DegreeDistribution, EnumerationBoundError,
                    TannerGraph, canonical_cycle, degree_distribution,
                    enumerate_cycles, girth, load_protograph,
                    save_protograph, walk_ace, walk_nodes)
from .alist import AlistFormatError, load_alist, save_alist
from .peg import peg_construct
from .walks import (ACESpectrum, ProblematicWalkSet, TBCWalk, ace_spectrum,
                    decompose_closed_walk, enumerate_tbc_walks,
                    find_problematic_walks, is_cycle)
from .lifting import (LiftedCode, ShiftAssignment, embed_assignment, expand,
                      export_qc_matrix, lifted_image_is_cycle, load_shifts,
                      predict_cycle_image, predicted_lift_spectrum,
                      qc_matrix_to_graph, save_shifts, walk_order,
                      walk_shift)
from .liftcycles import (cycle_census, has_copy_shift_symmetry,
                         lift_spectrum, scan_below)
from .design import (DesignReport, ParticipationPolicy, SwapRecord,
                     SwapState, VerifyResult, algorithm1, collect_walks,
                     greedy_optimize, select_edges, verify_target)
from .simulate import (PointCount, SimConfig, SimResult, awgn_llr, bp_decode,
                       code_rate, gf2_rank, monte_carlo, simulate_frames)

__version__ = "0.1.0"

__all__ = [
    "ACESpectrum", "AlistFormatError", "Cycle", "DegreeDistribution",
    "DesignReport", "EnumerationBoundError", "LiftedCode",
    "ParticipationPolicy", "PointCount", "ProblematicWalkSet",
    "ShiftAssignment", "SimConfig", "SimResult", "SwapRecord", "SwapState",
    "TBCWalk", "TannerGraph", "VerifyResult",
    "ace_spectrum", "algorithm1", "awgn_llr", "bp_decode",
    "canonical_cycle", "code_rate", "collect_walks", "cycle_census",
    "decompose_closed_walk", "degree_distribution", "embed_assignment",
    "enumerate_cycles", "enumerate_tbc_walks", "expand",
    "export_qc_matrix", "find_problematic_walks", "gf2_rank", "girth",
    "greedy_optimize", "has_copy_shift_symmetry", "is_cycle",
    "lift_spectrum", "lifted_image_is_cycle", "load_alist",
    "load_protograph", "load_shifts", "monte_carlo", "peg_construct",
    "predict_cycle_image", "predicted_lift_spectrum",
    "qc_matrix_to_graph", "save_alist", "save_protograph", "save_shifts",
    "scan_below", "select_edges", "simulate_frames", "verify_target",
    "walk_ace", "walk_nodes", "walk_order", "walk_shift",
]
