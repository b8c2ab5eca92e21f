"""Possibility and certainty decision procedures with algorithm dispatch.

POSS asks whether a candidate is one possible result; CERT whether it is
the only one.  The public entry points take a query and a database,
evaluate once, then pick an algorithm:

- duplicate-free results go to the polynomial matching solver;
- direct-product-free queries whose static width bound fits the policy go
  to the chain-partition dynamic program;
- product-free queries whose union terms split into low-width and
  low-ia-width parts go to the finishing-order dynamic program;
- everything else falls back to memoized backtracking, capped by the
  policy (:class:`ResourceExceeded` is raised rather than guessing).

CERT for plain list candidates is always polynomial: with concatenation as
the accumulation monoid, a swap of two incomparable tuples changes the
world iff the tuples differ, so the result is certain iff every
incomparable pair carries equal values and the canonical extension matches
the candidate.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from functools import reduce

from . import algebra
from .accum import (
    Accumulator,
    GroupByAccumulator,
    _bounded_width_table,
    _chain_requirements,
    _noprod_union_table,
    accumulate_list,
    group_by_results,
)
from .algebra import (
    CompleteFailure,
    DirProduct,
    PoDatabase,
    bag_of,
    contains_node,
    evaluate,
    po_union,
    union_terms,
    width_bounds,
)
from .core import (
    PoRelation,
    _bits,
    canonical_extension,
    ia_partition,
    index_bounds,
    linear_extensions,
    possible_ranks,
    rank_witness,
    width_and_chain_partition,
    world_of,
)
from .errors import ArityError, NotCancellativeError, PositionError, ResourceExceeded

logger = logging.getLogger("ordlattice.solvers")


@dataclass(frozen=True)
class DispatchPolicy:
    """Caps and thresholds steering algorithm selection.

    These are configuration, not semantics: answers never depend on them,
    only which algorithm runs and whether :class:`ResourceExceeded` is
    raised instead of an exponential search.
    """

    width_limit: int = 4
    ia_limit: int = 4
    finishing_classes_limit: int = 6
    brute_elements_limit: int = 14
    topk_limit: int = 3
    world_limit: int = 10**6

    def __post_init__(self):
        for name in ("width_limit", "ia_limit", "finishing_classes_limit", "brute_elements_limit", "topk_limit", "world_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"policy cap {name} must be positive")


DEFAULT_POLICY = DispatchPolicy()


@dataclass(frozen=True)
class Verdict:
    """A POSS/CERT answer with provenance.

    For a positive POSS answer ``witness`` is a linear extension (an id
    sequence into ``relation``); for a negative CERT answer it is a
    counterexample world or accumulation value.
    """

    answer: bool
    method: str
    witness: object = None
    relation: object = None

    def __bool__(self):
        return self.answer


@dataclass(frozen=True)
class PrecedenceAnswer:
    """Tuple-precedence verdicts; ``vacuous`` flags absent tuples."""

    poss: bool
    cert: bool
    vacuous: bool = False


def _as_world(candidate) -> tuple:
    return tuple(tuple(row) for row in candidate)


def _dup_free(r: PoRelation) -> bool:
    counts = Counter(r.rows_by_position())
    return all(c == 1 for c in counts.values())


# -- list-candidate POSS ------------------------------------------------------


def poss(q, db, candidate, policy: DispatchPolicy | None = None) -> Verdict:
    """Is the candidate list relation a possible world of the query result?"""
    policy = policy or DEFAULT_POLICY
    db = algebra._as_db(db)
    r = evaluate(q, db)
    candidate = _as_world(candidate)
    if isinstance(r, CompleteFailure):
        logger.debug("poss: complete failure, vacuously false")
        return Verdict(False, "complete_failure")
    return _poss_list(r, candidate, policy, query=q, db=db)


def _poss_list(r: PoRelation, candidate: tuple, policy: DispatchPolicy, query=None, db=None) -> Verdict:
    if len(candidate) != r.size or Counter(candidate) != bag_of(r):
        logger.debug("poss: candidate multiset differs from result bag")
        return Verdict(False, "multiset_check", relation=r)

    if _dup_free(r):
        logger.debug("poss: duplicate-free result, matching solver")
        verdict, _ = _dedup_pair(r, candidate)
        return verdict

    if query is not None and db is not None and not contains_node(query, DirProduct):
        widths = {}
        ias = {}
        for name, rel in db.relations.items():
            widths[name], _ = width_and_chain_partition(rel)
            ias[name] = ia_partition(rel).cardinality
        bound, _ = width_bounds(query, widths, ias)
        if bound <= policy.width_limit:
            logger.debug("poss: static width bound %s within %s, chain DP", bound, policy.width_limit)
            return poss_bounded_width_dp(r, candidate)

    if query is not None and db is not None:
        split = _split_by_width_ia(query, db, policy)
        if split is not None:
            r_w, r_ia = split
            if ia_partition(r_ia).cardinality <= policy.finishing_classes_limit:
                logger.debug("poss: product-free width/ia split, finishing-order DP")
                return poss_union_width_iawidth(r_w, r_ia, candidate, policy)

    if query is None and width_and_chain_partition(r)[0] <= policy.width_limit:
        logger.debug("poss: low actual width, chain DP")
        return poss_bounded_width_dp(r, candidate)

    logger.debug("poss: falling back to memoized backtracking")
    return poss_backtracking(r, candidate, policy)


def _split_by_width_ia(query, db, policy: DispatchPolicy):
    """Evaluate the union terms of a product-free query and bucket them.

    Returns (low-width union, low-ia-width union), or ``None`` when the
    rewriting is blocked or some term fits neither bucket.
    """
    terms = union_terms(query)
    if terms is None:
        return None
    arity = algebra.arity_of(query, db.schema)
    w_parts = []
    ia_parts = []
    for term in terms:
        rel = evaluate(term, db)
        w, _ = width_and_chain_partition(rel)
        if w <= policy.width_limit:
            w_parts.append(rel)
        elif ia_partition(rel).cardinality <= policy.ia_limit:
            ia_parts.append(rel)
        else:
            return None
    empty = PoRelation.from_closure((), (), [], arity)
    r_w = reduce(po_union, w_parts) if w_parts else empty
    r_ia = reduce(po_union, ia_parts) if ia_parts else empty
    return r_w, r_ia


def poss_backtracking(r: PoRelation, candidate, policy: DispatchPolicy | None = None) -> Verdict:
    """Exact search over matching prefixes, memoized on the set of used ids.

    Sound and complete; worst-case exponential.  Refuses relations larger
    than the policy's brute-force cap.
    """
    policy = policy or DEFAULT_POLICY
    candidate = _as_world(candidate)
    if r.size > policy.brute_elements_limit:
        raise ResourceExceeded(
            f"backtracking cap: relation has {r.size} elements, cap is {policy.brute_elements_limit}"
        )
    if len(candidate) != r.size or Counter(candidate) != bag_of(r):
        return Verdict(False, "backtracking", relation=r)
    n = r.size
    anc = r._anc
    rows = r.rows_by_position()
    full = (1 << n) - 1
    failed: set = set()
    prefix: list = []

    def search(used: int, depth: int) -> bool:
        if used == full:
            return True
        if used in failed:
            return False
        want = candidate[depth]
        for p in _bits(full & ~used):
            if rows[p] != want or (anc[p] & ~used):
                continue
            prefix.append(r.ids[p])
            if search(used | (1 << p), depth + 1):
                return True
            prefix.pop()
        failed.add(used)
        return False

    if search(0, 0):
        return Verdict(True, "backtracking", witness=tuple(prefix), relation=r)
    return Verdict(False, "backtracking", relation=r)


# -- duplicate-free matching ---------------------------------------------------


def _dedup_pair(r: PoRelation, candidate: tuple) -> tuple:
    """(POSS, CERT) verdicts for a duplicate-free relation.

    Each candidate row matches exactly one id; the candidate is possible
    iff the order augmented with its consecutive-pair constraints stays
    acyclic, and certain iff the relation is a total order matching it.
    """
    ids_by_row = {r.label(ident): ident for ident in r.ids}
    if len(set(candidate)) != len(candidate) or set(candidate) != set(ids_by_row):
        poss_v = Verdict(False, "dedup", relation=r)
    else:
        seq = tuple(ids_by_row[row] for row in candidate)
        n = r.size
        succ = [set(_bits(r._desc[i])) for i in range(n)]
        for a, b in zip(seq, seq[1:]):
            succ[r.position(a)].add(r.position(b))
        acyclic = _is_acyclic(succ)
        poss_v = Verdict(acyclic, "dedup", witness=seq if acyclic else None, relation=r)

    cert_v = _cert_list(r, candidate, method="dedup")
    return poss_v, cert_v


def _is_acyclic(succ) -> bool:
    n = len(succ)
    indeg = [0] * n
    for outs in succ:
        for v in outs:
            indeg[v] += 1
    queue = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while queue:
        u = queue.pop()
        seen += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == n


def poss_cert_dedup(q, db, candidate, policy: DispatchPolicy | None = None) -> tuple:
    """(POSS, CERT) for a query whose result carries no duplicate values."""
    r = evaluate(q, db)
    candidate = _as_world(candidate)
    if isinstance(r, CompleteFailure):
        return Verdict(False, "complete_failure"), Verdict(False, "complete_failure")
    if not _dup_free(r):
        raise ValueError("poss_cert_dedup requires a duplicate-free result (apply dedup in the query)")
    return _dedup_pair(r, candidate)


# -- list-candidate CERT -------------------------------------------------------


def cert(q, db, candidate, policy: DispatchPolicy | None = None) -> Verdict:
    """Is the candidate the only possible world?  Always polynomial."""
    db = algebra._as_db(db)
    r = evaluate(q, db)
    candidate = _as_world(candidate)
    if isinstance(r, CompleteFailure):
        logger.debug("cert: complete failure, vacuously false")
        return Verdict(False, "complete_failure")
    return _cert_list(r, candidate)


def _cert_list(r: PoRelation, candidate: tuple, method: str = "swap_concat") -> Verdict:
    pair = _unequal_incomparable_pair(r)
    if pair is not None:
        x, y = pair
        lo, _ = possible_ranks(r, x, y)
        w1 = world_of(r, rank_witness(r, x, y, lo, lo + 1))
        w2 = world_of(r, rank_witness(r, x, y, lo + 1, lo))
        counterexample = w1 if w1 != candidate else w2
        return Verdict(False, method, witness=counterexample, relation=r)
    world = world_of(r, canonical_extension(r))
    if world == candidate:
        return Verdict(True, method, relation=r)
    return Verdict(False, method, witness=world, relation=r)


def _unequal_incomparable_pair(r: PoRelation):
    """First incomparable id pair with different labels, scanning ascending."""
    for i, x in enumerate(r.ids):
        for y in r.ids[i + 1 :]:
            if not r.comparable(x, y) and r.label(x) != r.label(y):
                return x, y
    return None


# -- cancellative-monoid certainty ----------------------------------------------


def cert_safe_swaps(acc: Accumulator, r: PoRelation, value) -> Verdict:
    """Certainty of an accumulation value in a cancellative monoid.

    The result set is a singleton iff every incomparable pair of distinct
    tuples swaps safely at every pair of consecutive achievable ranks;
    certainty then reduces to comparing one canonical fold against the
    candidate value.
    """
    if not acc.monoid.is_cancellative:
        raise NotCancellativeError(f"accumulator {acc.name!r} is not cancellative")
    combine = acc.monoid.combine
    h = acc.map.fn
    for i, x in enumerate(r.ids):
        t1 = r.label(x)
        for y in r.ids[i + 1 :]:
            if r.comparable(x, y):
                continue
            t2 = r.label(y)
            if t1 == t2:
                continue
            lo, hi = possible_ranks(r, x, y)
            positions = (lo,) if acc.map.is_position_invariant else range(lo, hi)
            for p in positions:
                if combine(h(t1, p), h(t2, p + 1)) != combine(h(t2, p), h(t1, p + 1)):
                    v1 = accumulate_list(acc, world_of(r, rank_witness(r, x, y, p, p + 1)))
                    v2 = accumulate_list(acc, world_of(r, rank_witness(r, x, y, p + 1, p)))
                    other = v1 if v1 != value else v2
                    return Verdict(False, "safe_swaps", witness=other, relation=r)
    folded = accumulate_list(acc, world_of(r, canonical_extension(r)))
    if folded == value:
        return Verdict(True, "safe_swaps", relation=r)
    return Verdict(False, "safe_swaps", witness=folded, relation=r)


# -- bounded-width POSS DP -------------------------------------------------------


def poss_bounded_width_dp(r: PoRelation, candidate) -> Verdict:
    """Membership of a candidate world via the chain-partition dynamic program.

    States are chain-position vectors describing order ideals; a state is
    reachable iff the candidate prefix of its size can be realized by that
    ideal.  Polynomial for fixed width.
    """
    candidate = _as_world(candidate)
    if len(candidate) != r.size or Counter(candidate) != bag_of(r):
        return Verdict(False, "width_dp", relation=r)
    _, partition = width_and_chain_partition(r)
    chains = partition.chains
    k = len(chains)
    if k == 0:
        return Verdict(True, "width_dp", witness=(), relation=r)
    req = _chain_requirements(r, chains)
    sizes = [len(c) for c in chains]
    frontier = {tuple([0] * k): ()}
    for depth, want in enumerate(candidate):
        nxt = {}
        for vec, witness in frontier.items():
            for i in range(k):
                p = vec[i] + 1
                if p > sizes[i]:
                    continue
                ident = chains[i][p - 1]
                if r.label(ident) != want:
                    continue
                if any(req[i][p][j] > vec[j] for j in range(k) if j != i):
                    continue
                new_vec = vec[:i] + (p,) + vec[i + 1 :]
                if new_vec not in nxt:
                    nxt[new_vec] = witness + (ident,)
        frontier = nxt
        if not frontier:
            break
    goal = tuple(sizes)
    if goal in frontier:
        return Verdict(True, "width_dp", witness=frontier[goal], relation=r)
    return Verdict(False, "width_dp", relation=r)


# -- union width/ia POSS DP --------------------------------------------------------


def poss_union_width_iawidth(r_w: PoRelation, r_ia: PoRelation, candidate, policy: DispatchPolicy | None = None) -> Verdict:
    """Membership of a candidate world of ``r_w`` unioned with ``r_ia``.

    Enumerates finishing orders of the ia-classes; for each, runs the chain
    dynamic program extended with the deterministic greedy consumption of
    the ia part (open/blocked/exhausted classes, per-class used counts).
    The witness indexes into the parallel composition of the two inputs
    (left ids first).
    """
    policy = policy or DEFAULT_POLICY
    candidate = _as_world(candidate)
    union_rel = po_union(r_w, r_ia)
    if len(candidate) != union_rel.size or Counter(candidate) != bag_of(union_rel):
        return Verdict(False, "union_dp", relation=union_rel)

    classes = ia_partition(r_ia).classes
    if len(classes) > policy.finishing_classes_limit:
        raise ResourceExceeded(
            f"finishing-order cap: {len(classes)} ia-classes, cap is {policy.finishing_classes_limit}"
        )
    members = [sorted(c) for c in classes]
    class_of = {}
    for ci, mem in enumerate(members):
        for ident in mem:
            class_of[ident] = ci
    n_classes = len(members)
    anc_classes = [0] * n_classes
    for ci, mem in enumerate(members):
        for q in _bits(r_ia.ancestor_mask(mem[0])):
            anc_classes[ci] |= 1 << class_of[r_ia.ids[q]]
    # per class: ids grouped by label, deterministic order
    groups = []
    for mem in members:
        by_label: dict = {}
        for ident in mem:
            by_label.setdefault(r_ia.label(ident), []).append(ident)
        groups.append(by_label)
    class_sizes = [len(mem) for mem in members]

    _, partition = width_and_chain_partition(r_w)
    chains = partition.chains
    k = len(chains)
    req = _chain_requirements(r_w, chains)
    sizes = [len(c) for c in chains]

    left_pos = {ident: pos for pos, ident in enumerate(r_w.ids)}
    right_pos = {ident: r_w.size + pos for pos, ident in enumerate(r_ia.ids)}

    for order in itertools.permutations(range(n_classes)):
        rank = {ci: k_ for k_, ci in enumerate(order)}
        # a class cannot finish before an ancestor class has finished
        if any(rank[ci] < rank[cj] for ci in range(n_classes) for cj in _bits(anc_classes[ci])):
            continue
        verdict = _union_dp_once(
            candidate, chains, sizes, req, r_w, groups, class_sizes, anc_classes, order, left_pos, right_pos
        )
        if verdict is not None:
            return Verdict(True, "union_dp", witness=verdict, relation=union_rel)
    return Verdict(False, "union_dp", relation=union_rel)


def _union_dp_once(candidate, chains, sizes, req, r_w, groups, class_sizes, anc_classes, order, left_pos, right_pos):
    k = len(chains)
    n_classes = len(groups)
    label_lists = [sorted(groups[ci].items(), key=lambda kv: kv[1][0]) for ci in range(n_classes)]

    def exhausted(counts, ci):
        return sum(counts[ci]) == class_sizes[ci]

    start = (tuple([0] * k), tuple(tuple(0 for _ in label_lists[ci]) for ci in range(n_classes)))
    frontier = {start: ()}
    for want in candidate:
        nxt = {}
        for (vec, counts), witness in frontier.items():
            for i in range(k):
                p = vec[i] + 1
                if p > sizes[i]:
                    continue
                ident = chains[i][p - 1]
                if r_w.label(ident) != want:
                    continue
                if any(req[i][p][j] > vec[j] for j in range(k) if j != i):
                    continue
                state = (vec[:i] + (p,) + vec[i + 1 :], counts)
                if state not in nxt:
                    nxt[state] = witness + (left_pos[ident],)
            # greedy move in the ia part: the first open class in the
            # finishing order holding an unused id with the wanted label
            done_before = sum(1 for ci in range(n_classes) if exhausted(counts, ci))
            for ci in order:
                if exhausted(counts, ci):
                    continue
                if any(not exhausted(counts, cj) for cj in _bits(anc_classes[ci])):
                    continue
                slot = None
                for g, (label, idents) in enumerate(label_lists[ci]):
                    if label == want and counts[ci][g] < len(idents):
                        slot = g
                        break
                if slot is None:
                    continue
                ident = label_lists[ci][slot][1][counts[ci][slot]]
                new_counts = tuple(
                    tuple(c + 1 if (cj == ci and gj == slot) else c for gj, c in enumerate(row))
                    for cj, row in enumerate(counts)
                )
                if exhausted(new_counts, ci) and order[done_before] != ci:
                    break  # finishing order violated; no other ia move allowed
                state = (vec, new_counts)
                if state not in nxt:
                    nxt[state] = witness + (right_pos[ident],)
                break  # the greedy choice is forced
        frontier = nxt
        if not frontier:
            return None
    goal_vec = tuple(sizes)
    for (vec, counts), witness in frontier.items():
        if vec == goal_vec and all(exhausted(counts, ci) for ci in range(n_classes)):
            return witness
    return None


# -- position-based problems -----------------------------------------------------


def select_at_k(q, db, row, k: int, policy: DispatchPolicy | None = None) -> tuple:
    """(possible, certain) that the result has value ``row`` at position ``k``.

    Certainty is possibility plus absence of any differently-labeled id that
    can occupy ``k``; since every position is occupied in every extension,
    the absence of a conflict already implies possibility.
    """
    r = evaluate(q, db)
    row = tuple(row)
    if isinstance(r, CompleteFailure):
        return False, False
    if not 1 <= k <= r.size:
        raise PositionError(f"position {k} outside 1..{r.size}")
    possible = False
    conflict = False
    for ident in r.ids:
        lo, hi = index_bounds(r, ident)
        if lo <= k <= hi:
            if r.label(ident) == row:
                possible = True
            else:
                conflict = True
    return possible, possible and not conflict


def top_k(q, db, candidate, k: int, policy: DispatchPolicy | None = None) -> tuple:
    """(possible, certain) that the first ``k`` values are exactly the candidate.

    Enumerates feasible length-``k`` prefixes (each id's ancestors among its
    predecessors); ``k`` is capped by the policy.
    """
    policy = policy or DEFAULT_POLICY
    candidate = _as_world(candidate)
    if len(candidate) != k:
        raise PositionError(f"candidate has {len(candidate)} rows, expected k={k}")
    if k > policy.topk_limit:
        raise ResourceExceeded(f"top-k cap: k={k}, cap is {policy.topk_limit}")
    r = evaluate(q, db)
    if isinstance(r, CompleteFailure):
        return False, False
    depth = min(k, r.size)

    anc = r._anc
    rows = r.rows_by_position()
    n = r.size

    def match_search(used: int, i: int) -> bool:
        if i == depth:
            return True
        for p in range(n):
            if used >> p & 1 or (anc[p] & ~used):
                continue
            if rows[p] != candidate[i]:
                continue
            if match_search(used | (1 << p), i + 1):
                return True
        return False

    def deviation_search(used: int, i: int) -> bool:
        if i == depth:
            return depth < k  # shorter top list never equals the candidate
        for p in range(n):
            if used >> p & 1 or (anc[p] & ~used):
                continue
            if depth < k or rows[p] != candidate[i]:
                return True
            if deviation_search(used | (1 << p), i + 1):
                return True
        return False

    possible = depth == k and match_search(0, 0)
    certain = possible and not deviation_search(0, 0)
    if depth < k:
        certain = False
    return possible, certain


def tuple_precedence(q, db, first, second, policy: DispatchPolicy | None = None) -> PrecedenceAnswer:
    """(possible, certain) that the first occurrence of ``first`` precedes
    every occurrence of ``second``; flags vacuous instances."""
    first = tuple(first)
    second = tuple(second)
    if first == second:
        raise ValueError("tuple_precedence requires two distinct tuple values")
    r = evaluate(q, db)
    if isinstance(r, CompleteFailure):
        return PrecedenceAnswer(False, False, vacuous=False)
    firsts = [ident for ident in r.ids if r.label(ident) == first]
    seconds = [ident for ident in r.ids if r.label(ident) == second]
    if not firsts or not seconds:
        present = bool(firsts)
        return PrecedenceAnswer(present, present, vacuous=True)

    def can_lead(leaders, blockers) -> bool:
        blocker_mask = 0
        for ident in blockers:
            blocker_mask |= 1 << r.position(ident)
        return any(not (r.ancestor_mask(ident) & blocker_mask) for ident in leaders)

    possible = can_lead(firsts, seconds)
    certain = not can_lead(seconds, firsts)
    return PrecedenceAnswer(possible, certain, vacuous=False)


# -- accumulation POSS/CERT ---------------------------------------------------------


def poss_accum(acc: Accumulator, q, db, value, policy: DispatchPolicy | None = None) -> Verdict:
    """Is ``value`` one possible accumulation result of the query?"""
    return _accum_entry(acc, q, db, value, policy, want_cert=False)


def cert_accum(acc: Accumulator, q, db, value, policy: DispatchPolicy | None = None) -> Verdict:
    """Is ``value`` the only possible accumulation result of the query?"""
    return _accum_entry(acc, q, db, value, policy, want_cert=True)


def _accum_entry(acc, q, db, value, policy, want_cert: bool) -> Verdict:
    policy = policy or DEFAULT_POLICY
    db = algebra._as_db(db)
    r = evaluate(q, db)
    if isinstance(r, CompleteFailure):
        logger.debug("accum: complete failure, vacuously false")
        return Verdict(False, "complete_failure")
    hints = _dispatch_hints(q, db, policy)
    return _accum_solve(acc, r, value, policy, want_cert, hints, query=q, db=db)


@dataclass(frozen=True)
class _Hints:
    width_bound: object = None   # static bound when the query avoids the direct product
    split: object = None         # (low-width union, low-ia union) for product-free queries


def _dispatch_hints(q, db, policy: DispatchPolicy) -> _Hints:
    bound = None
    if not contains_node(q, DirProduct):
        widths = {}
        ias = {}
        for name, rel in db.relations.items():
            widths[name], _ = width_and_chain_partition(rel)
            ias[name] = ia_partition(rel).cardinality
        bound, _ = width_bounds(q, widths, ias)
    split = _split_by_width_ia(q, db, policy)
    return _Hints(width_bound=bound, split=split)


def _accum_solve(acc, r, value, policy, want_cert: bool, hints: _Hints, query=None, db=None) -> Verdict:
    if want_cert and acc.monoid.is_cancellative:
        logger.debug("accum cert: cancellative monoid, safe swaps")
        return cert_safe_swaps(acc, r, value)

    if not want_cert and acc.is_list_identity:
        logger.debug("accum poss: identity encoding, list solver")
        return _poss_list(r, _as_world(value), policy, query=query, db=db)

    if acc.monoid.is_finite:
        if hints.width_bound is not None and hints.width_bound <= policy.width_limit:
            logger.debug("accum: finite monoid, bounded-width value DP")
            table = _bounded_width_table(acc, r)
            return _verdict_from_table(table, value, want_cert, "bounded_width_accum", r)
        if hints.split is not None and acc.map.is_position_invariant:
            r_w, r_ia = hints.split
            if ia_partition(r_ia).cardinality <= policy.ia_limit:
                logger.debug("accum: finite position-invariant, union value DP")
                table = _noprod_union_table(acc, r_w, r_ia)
                union_rel = po_union(r_w, r_ia)
                translated = {
                    val: tuple(
                        (r_w.position(ident) if tag == "w" else r_w.size + r_ia.position(ident))
                        for tag, ident in wit
                    )
                    for val, wit in table.items()
                }
                return _verdict_from_table(translated, value, want_cert, "noprod_union_accum", union_rel)

    logger.debug("accum: brute force under caps")
    return _accum_bruteforce(acc, r, value, policy, want_cert)


def _verdict_from_table(table: dict, value, want_cert: bool, method: str, relation) -> Verdict:
    if not want_cert:
        if value in table:
            return Verdict(True, method, witness=table[value], relation=relation)
        return Verdict(False, method, relation=relation)
    others = [v for v in table if v != value]
    if others:
        counterexample = min(others, key=repr)
        return Verdict(False, method, witness=counterexample, relation=relation)
    return Verdict(value in table, method, relation=relation)


def _accum_bruteforce(acc, r: PoRelation, value, policy: DispatchPolicy, want_cert: bool) -> Verdict:
    if r.size > policy.brute_elements_limit:
        raise ResourceExceeded(
            f"brute-force cap: relation has {r.size} elements, cap is {policy.brute_elements_limit}"
        )
    examined = 0
    seen_value = False
    for seq in linear_extensions(r):
        examined += 1
        if examined > policy.world_limit:
            raise ResourceExceeded(f"brute-force cap: more than {policy.world_limit} linear extensions")
        folded = accumulate_list(acc, world_of(r, seq))
        if want_cert:
            if folded != value:
                return Verdict(False, "bruteforce", witness=folded, relation=r)
            seen_value = True
        elif folded == value:
            return Verdict(True, "bruteforce", witness=seq, relation=r)
    if want_cert:
        return Verdict(seen_value, "bruteforce", relation=r)
    return Verdict(False, "bruteforce", relation=r)


# -- group-by -------------------------------------------------------------------------


def cert_group_by(gacc: GroupByAccumulator, q, db, candidate, policy: DispatchPolicy | None = None) -> Verdict:
    """Certainty of an unordered (group, value) relation.

    Splits the evaluated relation by group value and requires certainty of
    each group's accumulation; order across groups is forgotten, so no
    cross-group reasoning is needed.
    """
    policy = policy or DEFAULT_POLICY
    db = algebra._as_db(db)
    r = evaluate(q, db)
    if isinstance(r, CompleteFailure):
        return Verdict(False, "complete_failure")
    for a in gacc.attrs:
        if not 1 <= a <= r.arity:
            raise ArityError(f"group-by attribute .{a} out of range for arity {r.arity}")
    pairs = [(tuple(group), value) for group, value in candidate]
    candidate = {}
    for group, value in pairs:
        if group in candidate and candidate[group] != value:
            return Verdict(False, "groupby", relation=r)  # two values for one group
        candidate[group] = value
    picked = tuple(a - 1 for a in gacc.attrs)
    groups: dict = {}
    for ident in r.ids:
        key = tuple(r.label(ident)[i] for i in picked)
        groups.setdefault(key, []).append(ident)
    if set(groups) != set(candidate):
        return Verdict(False, "groupby", relation=r)

    hints = _dispatch_hints(q, db, policy)
    for key in sorted(groups, key=repr):
        sub = r.restrict(groups[key]).reindexed()
        sub_hints = hints
        if hints.split is not None:
            r_w, r_ia = hints.split
            sub_hints = _Hints(
                width_bound=hints.width_bound,
                split=(
                    _restrict_to_group(r_w, picked, key),
                    _restrict_to_group(r_ia, picked, key),
                ),
            )
        inner = _accum_solve(gacc.accumulator, sub, candidate[key], policy, True, sub_hints)
        if not inner.answer:
            return Verdict(False, f"groupby+{inner.method}", witness=(key, inner.witness), relation=r)
    return Verdict(True, "groupby", relation=r)


def _restrict_to_group(rel: PoRelation, picked: tuple, key: tuple) -> PoRelation:
    keep = [ident for ident in rel.ids if tuple(rel.label(ident)[i] for i in picked) == key]
    return rel.restrict(keep).reindexed()


def poss_group_by(gacc: GroupByAccumulator, q, db, candidate, policy: DispatchPolicy | None = None) -> Verdict:
    """Possibility of an unordered (group, value) relation, by enumeration.

    No fast path exists for this problem; the search is brute force under
    the policy caps.
    """
    from .errors import WorldLimitError

    policy = policy or DEFAULT_POLICY
    r = evaluate(q, db)
    if isinstance(r, CompleteFailure):
        return Verdict(False, "complete_failure")
    if r.size > policy.brute_elements_limit:
        raise ResourceExceeded(
            f"brute-force cap: relation has {r.size} elements, cap is {policy.brute_elements_limit}"
        )
    target = frozenset((tuple(group), value) for group, value in candidate)
    try:
        results = group_by_results(gacc, r, policy.world_limit)
    except WorldLimitError as exc:
        raise ResourceExceeded(str(exc)) from None
    return Verdict(target in results, "bruteforce", relation=r)
