from ._psea import (
    bulk_converge,
    c_N,
    corank,
    det_valuation,
    edge_converge,
    expected_kernel,
    gen_prob,
    lowest_positive_pmf,
    run_chain,
    sample_matrix,
    sea_simulate,
    single_box_bounds,
    smith_sn,
    stay_prob,
    two_jump_bound,
)

__all__ = [
    "bulk_converge",
    "c_N",
    "corank",
    "det_valuation",
    "edge_converge",
    "expected_kernel",
    "gen_prob",
    "lowest_positive_pmf",
    "run_chain",
    "sample_matrix",
    "sea_simulate",
    "single_box_bounds",
    "smith_sn",
    "stay_prob",
    "two_jump_bound",
]
