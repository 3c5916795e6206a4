"""Graph-side stability conditions on sparsity patterns.

Three checks of increasing strength, all exact:

* every vertex must sit in a strongly connected component containing a
  vertex with a self-loop ("sink") -- violation proves instability;
* for each k there must be a k-vertex induced subgraph with a Hamiltonian
  decomposition -- a missing k proves instability;
* a vertex ordering whose every prefix induces a Hamiltonian-decomposable
  subgraph proves stability (the chain certificate consumed by witness
  synthesis).

A Hamiltonian decomposition of an induced subgraph is the same thing as a
permutation of its vertex set supported on free entries, which is the same
thing as a perfect matching of the bipartite graph rows x cols restricted
to the subset.  Testing it is therefore a maximum-matching call rather than
an explicit cycle search.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapabilityError
from .patterns import SparsityPattern

CHAIN_N_CAP = 24  # the nested-chain DP walks all 2^n vertex subsets


@dataclass(frozen=True)
class SccReport:
    """Strongly connected components plus sink bookkeeping.

    ``components`` partition {1..n} and are sorted by smallest vertex;
    ``condensation_edges`` are (from, to) pairs of component indices;
    ``violating_vertices`` are the vertices whose component has no
    self-loop.
    """

    components: tuple[frozenset[int], ...]
    condensation_edges: frozenset[tuple[int, int]]
    violating_vertices: frozenset[int]


@dataclass(frozen=True)
class ChainCertificate:
    """A vertex ordering with a cycle decomposition for every prefix.

    ``prefix_cycles[k-1]`` covers the first k vertices of ``ordering`` with
    disjoint cycles whose edges are all free entries.
    """

    ordering: tuple[int, ...]
    prefix_cycles: tuple[tuple[tuple[int, ...], ...], ...]


def strongly_connected_components(p: SparsityPattern) -> SccReport:
    """Tarjan's algorithm on the digraph view of the pattern."""
    n = p.n
    adj = {v: sorted(p.row_targets(v)) for v in range(1, n + 1)}
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    components = []
    counter = [0]

    def connect(root):
        # Iterative DFS; patterns are small but recursion limits are cheap
        # to avoid.
        work = [(root, iter(adj[root]))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                components.append(frozenset(comp))

    for v in range(1, n + 1):
        if v not in index:
            connect(v)

    components.sort(key=min)
    comp_of = {}
    for ci, comp in enumerate(components):
        for v in comp:
            comp_of[v] = ci
    cond = set()
    for i, j in p.free:
        a, b = comp_of[i], comp_of[j]
        if a != b:
            cond.add((a, b))
    violating = set()
    for comp in components:
        if not any((v, v) in p.free for v in comp):
            violating.update(comp)
    return SccReport(
        components=tuple(components),
        condensation_edges=frozenset(cond),
        violating_vertices=frozenset(violating),
    )


def check_scc_sink(p: SparsityPattern) -> frozenset[int]:
    """Vertices whose strongly connected component has no self-loop.

    Empty result means the check passes; a nonempty result proves the
    pattern unstable.
    """
    return strongly_connected_components(p).violating_vertices


def _max_matching(p: SparsityPattern, subset) -> dict[int, int] | None:
    """Perfect matching rows(subset) -> cols(subset) on free entries.

    Augmenting-path search with rows and columns visited in increasing
    order, so the result is deterministic.  Returns the row -> col map, or
    None when no perfect matching exists.
    """
    verts = sorted(subset)
    vset = set(verts)
    cols_of = {v: [j for j in sorted(p.row_targets(v)) if j in vset] for v in verts}
    # quick reject: an empty row or an uncovered column kills feasibility
    if any(not cols_of[v] for v in verts):
        return None
    covered = set()
    for v in verts:
        covered.update(cols_of[v])
    if covered != vset:
        return None

    match_col = {}  # col -> row

    def try_augment(row, seen):
        for col in cols_of[row]:
            if col in seen:
                continue
            seen.add(col)
            if col not in match_col or try_augment(match_col[col], seen):
                match_col[col] = row
                return True
        return False

    for row in verts:
        if not try_augment(row, set()):
            return None
    return {row: col for col, row in match_col.items()}


def has_principal_matching(p: SparsityPattern, subset) -> bool:
    """Does the subgraph induced by ``subset`` admit a Hamiltonian
    decomposition?

    Equivalent to a permutation of the subset supported on free entries.
    """
    subset = frozenset(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    if not subset <= set(range(1, p.n + 1)):
        raise ValueError(f"subset {sorted(subset)} out of range for n={p.n}")
    return _max_matching(p, subset) is not None


def _cycles_of_mapping(mapping: dict[int, int]) -> tuple[tuple[int, ...], ...]:
    """Disjoint cycles of a vertex -> vertex bijection, smallest-led."""
    seen = set()
    cycles = []
    for start in sorted(mapping):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        v = mapping[start]
        while v != start:
            cyc.append(v)
            seen.add(v)
            v = mapping[v]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def extract_cycle_decomposition(p: SparsityPattern, subset) -> tuple[tuple[int, ...], ...]:
    """A concrete Hamiltonian decomposition of the induced subgraph.

    Requires has_principal_matching(p, subset); presented as disjoint
    cycles covering the subset.
    """
    mapping = _max_matching(p, frozenset(subset))
    if mapping is None:
        raise ValueError(f"subset {sorted(subset)} has no Hamiltonian decomposition")
    return _cycles_of_mapping(mapping)


def hamiltonian_k_exists(p: SparsityPattern, k: int):
    """First size-k subset (lexicographic) with a Hamiltonian decomposition.

    Returns (subset, row -> col mapping) or None.  The scan is exhaustive
    over subsets; the matching call prunes in its quick-reject step.
    """
    if not 1 <= k <= p.n:
        raise ValueError(f"k={k} out of range 1..{p.n}")
    from itertools import combinations

    for subset in combinations(range(1, p.n + 1), k):
        mapping = _max_matching(p, subset)
        if mapping is not None:
            return subset, mapping
    return None


def check_necessary(p: SparsityPattern) -> int | None:
    """Smallest k with no Hamiltonian k-subgraph, or None when all pass.

    A returned k proves the pattern unstable (the degree-(n-k)
    characteristic coefficient of every member vanishes identically).
    """
    for k in range(1, p.n + 1):
        if hamiltonian_k_exists(p, k) is None:
            return k
    return None


def find_nested_chain(p: SparsityPattern) -> ChainCertificate | None:
    """Search for an ordering whose every prefix is Hamiltonian-decomposable.

    Subset DP: reachable(emptyset) = true, reachable(S) = feasible(S) and
    some reachable(S minus v).  Masks are visited in increasing numeric
    order, which dominates the subset order, and feasibility (a matching
    call) is only evaluated for masks with a reachable child.  Backtracking
    peels the smallest removable vertex, so certificates are deterministic.
    Success proves the pattern stable.
    """
    n = p.n
    if n > CHAIN_N_CAP:
        raise CapabilityError(
            f"nested-chain DP allocates 2^n entries; n={n} exceeds cap {CHAIN_N_CAP}"
        )
    size = 1 << n
    reachable = bytearray(size)
    reachable[0] = 1
    verts_of = lambda mask: [v + 1 for v in range(n) if mask >> v & 1]
    for mask in range(1, size):
        has_child = False
        m = mask
        while m:
            low = m & -m
            if reachable[mask ^ low]:
                has_child = True
                break
            m ^= low
        if has_child and _max_matching(p, verts_of(mask)) is not None:
            reachable[mask] = 1
    full = size - 1
    if not reachable[full]:
        return None

    ordering = [0] * n
    mask = full
    for k in range(n, 0, -1):
        for v in range(1, n + 1):
            bit = 1 << (v - 1)
            if mask & bit and reachable[mask ^ bit]:
                ordering[k - 1] = v
                mask ^= bit
                break
    prefix_cycles = []
    for k in range(1, n + 1):
        mapping = _max_matching(p, ordering[:k])
        prefix_cycles.append(_cycles_of_mapping(mapping))
    return ChainCertificate(ordering=tuple(ordering), prefix_cycles=tuple(prefix_cycles))


def verify_chain(p: SparsityPattern, chain: ChainCertificate) -> bool:
    """Re-check a chain certificate from scratch.

    Every prefix decomposition must be a bijection of the prefix whose
    edges are all free entries; the first vertex must carry a self-loop.
    """
    n = p.n
    if sorted(chain.ordering) != list(range(1, n + 1)):
        return False
    if len(chain.prefix_cycles) != n:
        return False
    if (chain.ordering[0], chain.ordering[0]) not in p.free:
        return False
    for k in range(1, n + 1):
        prefix = set(chain.ordering[:k])
        mapping = {}
        for cyc in chain.prefix_cycles[k - 1]:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                mapping[a] = b
        if set(mapping) != prefix or set(mapping.values()) != prefix:
            return False
        if any((a, b) not in p.free for a, b in mapping.items()):
            return False
    return True
