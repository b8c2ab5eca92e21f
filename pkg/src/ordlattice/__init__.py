"""ordlattice: order-incomplete data as partially ordered relations.

The package provides:

- ``core``: po-relations, linear extensions, possible worlds, widths,
  chain partitions, indistinguishable-antichain partitions, rank bounds;
- ``algebra``: a positive relational algebra over po-relations (selection,
  projection, union, two products, concatenation, duplicate elimination),
  static width bounds, constant-query synthesis;
- ``accum``: order-aware monoid accumulation, finite-monoid dynamic
  programs, group-by, and a registry of built-in accumulators;
- ``solvers``: possibility (POSS) and certainty (CERT) decision procedures
  with automatic dispatch between polynomial fast paths and exact
  exponential search;
- ``cli``: JSON file formats, the query-language parser and the
  ``ordlattice`` command.
"""

from . import accum, algebra, cli, core, errors, solvers
from .accum import (
    AccumMap,
    Accumulator,
    GroupByAccumulator,
    Monoid,
    accumulate_list,
    accumulator_from_spec,
    group_by_results,
    results_bounded_width,
    results_bruteforce,
    results_noprod_union,
)
from .algebra import (
    And,
    Attr,
    ChainConst,
    Cmp,
    CompleteFailure,
    Concat,
    Const,
    DirProduct,
    DupElim,
    LexProduct,
    Not,
    Or,
    PoDatabase,
    Projection,
    RelName,
    Selection,
    SingletonConst,
    Union,
    bag_of,
    dup_elim,
    evaluate,
    synthesize_constant_query,
    width_bounds,
)
from .core import (
    ChainPartition,
    IaPartition,
    PoRelation,
    canonical_extension,
    ia_partition,
    index_bounds,
    is_linear_extension,
    linear_extensions,
    possible_ranks,
    possible_worlds,
    rank_witness,
    validate_po_relation,
    width_and_chain_partition,
)
from .solvers import (
    DispatchPolicy,
    Verdict,
    cert,
    cert_accum,
    cert_group_by,
    cert_safe_swaps,
    poss,
    poss_accum,
    poss_bounded_width_dp,
    poss_cert_dedup,
    poss_group_by,
    poss_union_width_iawidth,
    select_at_k,
    top_k,
    tuple_precedence,
)

__version__ = "0.1.0"
