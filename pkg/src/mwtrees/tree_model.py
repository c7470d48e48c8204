"""Tree representation, isomorphism, caterpillar and sparse-leaf machinery."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import (
    DegenerateInput,
    InvalidLeafSet,
    InvalidSpec,
    NotACaterpillar,
    NotIsomorphic,
    SparseViolation,
)


@dataclass(frozen=True)
class Tree:
    """Unrooted tree on vertex ids ``0 .. n-1`` given by its edge list."""

    n: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise DegenerateInput("trees need at least one vertex")
        norm_edges = []
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DegenerateInput(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise DegenerateInput(f"self-loop at vertex {u}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise DegenerateInput(f"duplicate edge {e}")
            seen.add(e)
            norm_edges.append(e)
        if len(norm_edges) != self.n - 1:
            raise DegenerateInput(
                f"a tree on {self.n} vertices has {self.n - 1} edges, got {len(norm_edges)}")
        object.__setattr__(self, "edges", tuple(sorted(norm_edges)))
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        object.__setattr__(self, "_adj", tuple(tuple(a) for a in adj))
        # connectivity
        if self.n > 1:
            seen_v = {0}
            stack = [0]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in seen_v:
                        seen_v.add(w)
                        stack.append(w)
            if len(seen_v) != self.n:
                raise DegenerateInput("edge list is not connected")

    @property
    def adj(self) -> Tuple[Tuple[int, ...], ...]:
        return self._adj  # type: ignore[attr-defined]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def leaves(self) -> List[int]:
        if self.n == 1:
            return [0]
        return [v for v in range(self.n) if self.degree(v) == 1]


@dataclass(frozen=True)
class RootedTree:
    """Tree plus a root and an ordered children list per vertex.

    Children order is significant: the drawing constructions consume it
    left to right.
    """

    tree: Tree
    root: int
    children: Tuple[Tuple[int, ...], ...]
    parent: Tuple[Optional[int], ...]

    @staticmethod
    def from_tree(tree: Tree, root: int,
                  children_order: Optional[Dict[int, Sequence[int]]] = None) -> "RootedTree":
        if not (0 <= root < tree.n):
            raise DegenerateInput(f"root {root} out of range")
        parent: List[Optional[int]] = [None] * tree.n
        children: List[List[int]] = [[] for _ in range(tree.n)]
        order = [root]
        stack = [root]
        visited = {root}
        while stack:
            u = stack.pop()
            for w in tree.adj[u]:
                if w not in visited:
                    visited.add(w)
                    parent[w] = u
                    children[u].append(w)
                    stack.append(w)
                    order.append(w)
        if children_order is not None:
            for v, kids in children_order.items():
                if sorted(kids) != sorted(children[v]):
                    raise DegenerateInput(
                        f"children_order for vertex {v} does not match the tree")
                children[v] = list(kids)
        return RootedTree(tree, root,
                          tuple(tuple(c) for c in children),
                          tuple(parent))

    def with_children(self, new_children: Dict[int, Sequence[int]]) -> "RootedTree":
        kids = [list(c) for c in self.children]
        for v, order in new_children.items():
            if sorted(order) != sorted(kids[v]):
                raise DegenerateInput(f"new child order for {v} is not a permutation")
            kids[v] = list(order)
        return RootedTree(self.tree, self.root,
                          tuple(tuple(c) for c in kids), self.parent)

    def subtree_vertices(self, v: int) -> List[int]:
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def height(self, v: Optional[int] = None) -> int:
        v = self.root if v is None else v
        kids = self.children[v]
        if not kids:
            return 0
        return 1 + max(self.height(c) for c in kids)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def siblings(self, v: int) -> List[int]:
        p = self.parent[v]
        if p is None:
            return []
        return [c for c in self.children[p] if c != v]

    def cousins(self, v: int) -> List[int]:
        p = self.parent[v]
        if p is None:
            return []
        g = self.parent[p]
        if g is None:
            return []
        out = []
        for aunt in self.children[g]:
            if aunt == p:
                continue
            out.extend(self.children[aunt])
        return out


@dataclass(frozen=True)
class CaterpillarDecomposition:
    """Spine order plus the leaves hanging off each spine vertex."""

    tree: Tree
    spine: Tuple[int, ...]
    leaves: Tuple[Tuple[int, ...], ...]
    is_path: bool


@dataclass(frozen=True)
class SparseLeafSet:
    """A set of leaf ids of a rooted tree, validated by ``is_sparse``."""

    leaf_ids: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "leaf_ids", frozenset(self.leaf_ids))


# ---------------------------------------------------------------------------
# rooted isomorphism via canonical codes
# ---------------------------------------------------------------------------

def _ahu_code(rt: RootedTree, v: int, memo: Dict[int, tuple]) -> tuple:
    if v in memo:
        return memo[v]
    code = tuple(sorted(_ahu_code(rt, c, memo) for c in rt.children[v]))
    memo[v] = code
    return code


def rooted_code(rt: RootedTree) -> tuple:
    """Canonical code of a rooted tree; equal codes mean isomorphic."""
    return _ahu_code(rt, rt.root, {})


def _match_rooted(rt0: RootedTree, v0: int, rt1: RootedTree, v1: int,
                  memo0: Dict[int, tuple], memo1: Dict[int, tuple],
                  mapping: Dict[int, int]):
    mapping[v0] = v1
    kids0 = sorted(rt0.children[v0], key=lambda c: (memo0[c], rt0.children[v0].index(c)))
    kids1 = sorted(rt1.children[v1], key=lambda c: (memo1[c], rt1.children[v1].index(c)))
    for c0, c1 in zip(kids0, kids1):
        _match_rooted(rt0, c0, rt1, c1, memo0, memo1, mapping)


def rooted_isomorphism(rt0: RootedTree, rt1: RootedTree) -> Dict[int, int]:
    """Vertex mapping between two rooted-isomorphic trees.

    Raises NotIsomorphic when the rooted shapes differ.
    """
    memo0: Dict[int, tuple] = {}
    memo1: Dict[int, tuple] = {}
    c0 = _ahu_code(rt0, rt0.root, memo0)
    c1 = _ahu_code(rt1, rt1.root, memo1)
    if c0 != c1:
        raise NotIsomorphic("rooted canonical codes differ")
    mapping: Dict[int, int] = {}
    _match_rooted(rt0, rt0.root, rt1, rt1.root, memo0, memo1, mapping)
    return mapping


def isomorphism_map(t0: Tree, t1: Tree, r0: int) -> Tuple[int, Dict[int, int]]:
    """Root image and vertex mapping from ``t0`` rooted at ``r0`` into ``t1``.

    Tries every vertex of ``t1`` whose rooted code matches; raises
    NotIsomorphic when none does.
    """
    if t0.n != t1.n:
        raise NotIsomorphic(f"sizes differ: {t0.n} vs {t1.n}")
    if sorted(t0.degree(v) for v in range(t0.n)) != sorted(t1.degree(v) for v in range(t1.n)):
        raise NotIsomorphic("degree sequences differ")
    rt0 = RootedTree.from_tree(t0, r0)
    memo0: Dict[int, tuple] = {}
    code0 = _ahu_code(rt0, r0, memo0)
    deg0 = t0.degree(r0)
    for r1 in range(t1.n):
        if t1.degree(r1) != deg0:
            continue
        rt1 = RootedTree.from_tree(t1, r1)
        memo1: Dict[int, tuple] = {}
        if _ahu_code(rt1, r1, memo1) != code0:
            continue
        mapping: Dict[int, int] = {}
        _match_rooted(rt0, r0, rt1, r1, memo0, memo1, mapping)
        return r1, mapping
    raise NotIsomorphic("no vertex of t1 matches the rooted shape at r0")


# ---------------------------------------------------------------------------
# caterpillars
# ---------------------------------------------------------------------------

def _is_path_tree(t: Tree) -> bool:
    return all(t.degree(v) <= 2 for v in range(t.n))


def caterpillar_decompose(t: Tree) -> CaterpillarDecomposition:
    """Spine and per-spine leaf lists, or NotACaterpillar.

    For a 1- or 2-vertex tree the leaf-removal spine would be empty; the
    spine is then defined as all vertices and ``is_path`` is set.
    """
    if t.n == 1:
        return CaterpillarDecomposition(t, (0,), ((),), True)
    leaves = set(t.leaves())
    internal = [v for v in range(t.n) if v not in leaves]
    if not internal:
        # a single edge
        return CaterpillarDecomposition(t, (0, 1), ((), ()), True)

    internal_set = set(internal)
    deg_in = {v: sum(1 for w in t.adj[v] if w in internal_set) for v in internal}
    if any(d > 2 for d in deg_in.values()):
        raise NotACaterpillar("removing the leaves does not leave a path")
    ends = [v for v in internal if deg_in[v] <= 1]
    if len(internal) == 1:
        spine = [internal[0]]
    else:
        if len(ends) != 2:
            raise NotACaterpillar("removing the leaves does not leave a path")
        start = min(ends)
        spine = [start]
        prev = None
        cur = start
        while True:
            nxt = [w for w in t.adj[cur] if w in internal_set and w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            spine.append(cur)
        if len(spine) != len(internal):
            raise NotACaterpillar("internal vertices are not a single path")

    leaf_lists = tuple(tuple(w for w in t.adj[v] if w in leaves) for v in spine)
    return CaterpillarDecomposition(t, tuple(spine), leaf_lists, _is_path_tree(t))


# ---------------------------------------------------------------------------
# sparse leaf sets and pruning order
# ---------------------------------------------------------------------------

def is_sparse(rt: RootedTree, leaf_ids) -> Tuple[bool, List[Tuple[int, str]]]:
    """Check the three sparseness conditions for every member of the set.

    Returns ``(ok, violations)`` where each violation names the vertex and
    the failing clause.  Raises InvalidLeafSet if a member is not a leaf.
    """
    members = set(leaf_ids.leaf_ids if isinstance(leaf_ids, SparseLeafSet) else leaf_ids)
    for v in members:
        if not (0 <= v < rt.tree.n):
            raise InvalidLeafSet(f"vertex {v} out of range")
        if not rt.is_leaf(v):
            raise InvalidLeafSet(f"vertex {v} is not a leaf")
    violations: List[Tuple[int, str]] = []
    if not members:
        return False, [(-1, "empty set")]
    for v in sorted(members):
        sibs = rt.siblings(v)
        if not sibs:
            violations.append((v, "no sibling"))
        elif any((not rt.is_leaf(s)) or s in members for s in sibs):
            violations.append((v, "sibling not a leaf outside the set"))
        cands = [w for w in rt.cousins(v)
                 if w not in members and all(s not in members for s in rt.siblings(w))]
        if not cands:
            violations.append((v, "no cousin with a set-free sibling group"))
    return not violations, violations


def subtree_type(rt: RootedTree, child: int, members: FrozenSet[int]) -> str:
    """Pruning type of a child subtree: 'A', 'B', 'C' or 'D'."""
    h = rt.height(child)
    if h == 0:
        if child in members:
            raise SparseViolation(f"leaf child {child} of the current root is in the set")
        return "A"
    if h == 1:
        in_set = [c for c in rt.children[child] if c in members]
        if len(in_set) > 1:
            raise SparseViolation(
                f"height-1 subtree at {child} has {len(in_set)} set leaves")
        return "B" if in_set else "C"
    return "D"


_TYPE_ORDER = {"A": 0, "B": 1, "C": 2, "D": 3}


def reorder_children_for_pruning(rt: RootedTree, leaf_set) -> RootedTree:
    """Stable-reorder children at every vertex into type order A, B, C, D.

    Inside each type-B subtree the set leaf is moved to the rightmost
    position among its siblings.  Structure is otherwise unchanged.
    """
    members = frozenset(leaf_set.leaf_ids if isinstance(leaf_set, SparseLeafSet) else leaf_set)
    new_children: Dict[int, List[int]] = {}

    def visit(v: int):
        kids = list(rt.children[v])
        if not kids:
            return
        typed = [(subtree_type(rt, c, members), i, c) for i, c in enumerate(kids)]
        typed.sort(key=lambda t: (_TYPE_ORDER[t[0]], t[1]))
        new_children[v] = [c for _, _, c in typed]
        for ty, _, c in typed:
            if ty == "B":
                leaves = list(rt.children[c])
                inset = [x for x in leaves if x in members]
                rest = [x for x in leaves if x not in members]
                new_children[c] = rest + inset
            elif ty == "D":
                visit(c)

    visit(rt.root)
    return rt.with_children(new_children)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_corollary_family(m: int) -> Tuple[RootedTree, SparseLeafSet]:
    """Rooted tree with ``6m + 1`` vertices and a sparse set of size ``m``.

    The root has ``m`` children; each child subtree consists of a root with
    two children, one carrying a single leaf and the other two leaves, the
    second of which belongs to the sparse set.
    """
    if m < 1:
        raise InvalidSpec("m must be a positive integer")
    edges: List[Tuple[int, int]] = []
    children: Dict[int, List[int]] = {0: []}
    sparse: List[int] = []
    nxt = 1
    for _ in range(m):
        r_j = nxt
        u_j, v_j, up_j, w_j, wp_j = nxt + 1, nxt + 2, nxt + 3, nxt + 4, nxt + 5
        nxt += 6
        children[0].append(r_j)
        edges += [(0, r_j), (r_j, u_j), (u_j, v_j), (r_j, up_j), (up_j, w_j), (up_j, wp_j)]
        children[r_j] = [u_j, up_j]
        children[u_j] = [v_j]
        children[up_j] = [w_j, wp_j]
        sparse.append(wp_j)
    tree = Tree(nxt, tuple(edges))
    rt = RootedTree.from_tree(tree, 0, children)
    return rt, SparseLeafSet(frozenset(sparse))


def gen_random_tree(n: int, seed: int, max_depth: Optional[int] = None) -> Tree:
    """Uniform random parent attachment, deterministic for a fixed seed."""
    if n < 1:
        raise InvalidSpec("n must be positive")
    rng = random.Random(seed)
    depth = {0: 0}
    edges = []
    for v in range(1, n):
        cands = list(range(v))
        if max_depth is not None:
            cands = [u for u in cands if depth[u] < max_depth]
        p = rng.choice(cands)
        depth[v] = depth[p] + 1
        edges.append((p, v))
    return Tree(n, tuple(edges))


def gen_random_caterpillar(spine_len: int, leaf_counts: Sequence[int], seed: int) -> Tree:
    """Caterpillar with the given spine length and per-spine leaf counts.

    Vertex labels are shuffled deterministically from the seed, so callers
    exercising the decomposition see nontrivial label layouts.
    """
    if spine_len < 1:
        raise InvalidSpec("spine length must be positive")
    if len(leaf_counts) != spine_len:
        raise InvalidSpec("need one leaf count per spine vertex")
    if any(c < 0 for c in leaf_counts):
        raise InvalidSpec("leaf counts must be nonnegative")
    n = spine_len + sum(leaf_counts)
    edges = []
    nxt = spine_len
    for i in range(spine_len - 1):
        edges.append((i, i + 1))
    for i, c in enumerate(leaf_counts):
        for _ in range(c):
            edges.append((i, nxt))
            nxt += 1
    rng = random.Random(seed)
    relabel = list(range(n))
    rng.shuffle(relabel)
    return Tree(n, tuple((relabel[u], relabel[v]) for u, v in edges))
