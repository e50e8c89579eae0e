"""Trees on naturals, the Kleene-Brouwer ordering, and branch machinery.

A tree is presented by a root, a decidable node set with an enumerator, and
finite parent chains: every node's ancestor set is finite and linearly
ordered, with the root below everything.  The KB comparison follows the fixed
convention locked by the three-node golden example (root 0 with children 1
and 2 orders as 1, 2, 0): descendants precede ancestors, and at a branching
point the numerically smaller child's subtree comes first.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import BudgetError, PreconditionError
from .ordinals import LinearOrder


class Tree:
    """Base interface; subclasses provide parents, children and enumeration."""

    root: int

    def contains(self, x: int) -> bool:
        raise NotImplementedError

    def parent(self, x: int) -> int | None:
        raise NotImplementedError

    def children(self, x: int) -> tuple[int, ...]:
        raise NotImplementedError

    def nodes(self) -> Iterator[int]:
        raise NotImplementedError

    # -- derived structure

    def check_node(self, x: int) -> None:
        if not self.contains(x):
            raise PreconditionError(f"{x} is not a node of this tree")

    def ancestors(self, x: int) -> tuple[int, ...]:
        """Pred(x): the chain from the root down to x, inclusive."""
        self.check_node(x)
        chain = [x]
        while chain[-1] != self.root:
            p = self.parent(chain[-1])
            if p is None:
                raise PreconditionError(f"node {chain[-1]} has no parent chain to the root")
            chain.append(p)
        chain.reverse()
        return tuple(chain)

    def leq(self, x: int, y: int) -> bool:
        """x is an ancestor of y (or equal)."""
        return x in self.ancestors(y)

    def depth(self, x: int) -> int:
        return len(self.ancestors(x)) - 1


@dataclass
class FiniteTree(Tree):
    """Tree given by an explicit parent map."""

    root: int
    parent_map: dict[int, int]

    def __post_init__(self):
        self._children: dict[int, list[int]] = {}
        for child, parent in sorted(self.parent_map.items()):
            self._children.setdefault(parent, []).append(child)
        self._nodes = sorted({self.root} | set(self.parent_map))

    def contains(self, x: int) -> bool:
        return x == self.root or x in self.parent_map

    def parent(self, x: int) -> int | None:
        return self.parent_map.get(x)

    def children(self, x: int) -> tuple[int, ...]:
        return tuple(self._children.get(x, ()))

    def nodes(self) -> Iterator[int]:
        return iter(self._nodes)


@dataclass
class LazyTree(Tree):
    """Tree given by child and parent procedures; enumerated breadth-first."""

    root: int
    child_fn: Callable[[int], Iterable[int]]
    parent_fn: Callable[[int], int | None]
    member_fn: Callable[[int], bool]

    def contains(self, x: int) -> bool:
        return self.member_fn(x)

    def parent(self, x: int) -> int | None:
        return None if x == self.root else self.parent_fn(x)

    def children(self, x: int) -> tuple[int, ...]:
        return tuple(self.child_fn(x))

    def nodes(self) -> Iterator[int]:
        queue = [self.root]
        while queue:
            x = queue.pop(0)
            yield x
            queue.extend(self.child_fn(x))


def from_adjacency(desc: dict) -> FiniteTree:
    """Tree from a JSON adjacency literal {"root": r, "children": {node: [..]}}."""
    root = desc["root"]
    parent_map: dict[int, int] = {}
    for parent, kids in desc.get("children", {}).items():
        for kid in kids:
            parent_map[int(kid)] = int(parent)
    return FiniteTree(root, parent_map)


def from_json(text: str) -> FiniteTree:
    return from_adjacency(json.loads(text))


def full_binary_tree() -> LazyTree:
    """Infinite binary tree: children of x are 2x+1 and 2x+2."""
    return LazyTree(
        root=0,
        child_fn=lambda x: (2 * x + 1, 2 * x + 2),
        parent_fn=lambda x: (x - 1) // 2,
        member_fn=lambda x: x >= 0,
    )


def comb_tree(tooth_length: int = 2) -> LazyTree:
    """One infinite spine with a finite tooth at every spine node.

    Spine nodes are multiples of (tooth_length + 1); node s + j for
    1 <= j <= tooth_length is the j-th link of the tooth rooted at s.
    """
    step = tooth_length + 1

    def child_fn(x: int):
        if x % step == 0:
            kids = [x + step]
            if tooth_length:
                kids.append(x + 1)
            return tuple(sorted(kids))
        if (x % step) < tooth_length:
            return (x + 1,)
        return ()

    def parent_fn(x: int):
        if x == 0:
            return None
        if x % step == 0:
            return x - step
        return x - 1

    return LazyTree(0, child_fn, parent_fn, lambda x: x >= 0)


def random_finite_tree(size: int, seed: int) -> FiniteTree:
    """Rooted tree on 0..size-1 with parent(i) drawn below i."""
    rng = random.Random(seed)
    return FiniteTree(0, {i: rng.randrange(i) for i in range(1, size)})


def golden_three_node_tree() -> FiniteTree:
    return FiniteTree(0, {1: 0, 2: 0})


# Kleene-Brouwer ordering ----------------------------------------------------------------


def infimum(tree: Tree, x: int, y: int) -> int:
    """The deepest common ancestor of x and y."""
    ax, ay = tree.ancestors(x), tree.ancestors(y)
    common = tree.root
    for a, b in zip(ax, ay):
        if a != b:
            break
        common = a
    return common


def infimum_of_set(tree: Tree, xs: Iterable[int]) -> int:
    xs = list(xs)
    if not xs:
        raise PreconditionError("infimum of an empty node set")
    acc = xs[0]
    tree.check_node(acc)
    for x in xs[1:]:
        acc = infimum(tree, acc, x)
    return acc


def _child_towards(tree: Tree, m: int, x: int) -> int | None:
    """The immediate successor of m on the chain to x, None when m == x."""
    chain = tree.ancestors(x)
    idx = chain.index(m)
    return chain[idx + 1] if idx + 1 < len(chain) else None


def kb_compare(tree: Tree, x: int, y: int) -> bool:
    """x comes KB-before-or-equal y.

    Holds when y lies below-or-equal x in the tree, or when the children of
    inf(x, y) toward x and y exist and compare as u < v numerically.
    """
    tree.check_node(x)
    tree.check_node(y)
    if tree.leq(y, x):
        return True
    m = infimum(tree, x, y)
    u = _child_towards(tree, m, x)
    v = _child_towards(tree, m, y)
    if u is None or v is None:
        return False
    return u < v


def kb_order(tree: Tree) -> LinearOrder:
    """The KB comparison packaged as a linear order on the tree's nodes."""
    return LinearOrder(
        member=tree.contains,
        leq=lambda a, b: kb_compare(tree, a, b),
        enumerate=tree.nodes,
        name="KB",
    )


def subtree(tree: Tree, x: int) -> Tree:
    """The tree of descendants of x, rooted at x."""
    tree.check_node(x)

    class _Subtree(Tree):
        root = x

        def contains(self, z: int) -> bool:
            return tree.contains(z) and tree.leq(x, z)

        def parent(self, z: int) -> int | None:
            return None if z == x else tree.parent(z)

        def children(self, z: int) -> tuple[int, ...]:
            return tree.children(z)

        def nodes(self) -> Iterator[int]:
            queue = [x]
            while queue:
                z = queue.pop(0)
                yield z
                queue.extend(tree.children(z))

    return _Subtree()


def branch_search(tree: Tree, depth: int, node_budget: int = 100_000):
    """A root chain of ``depth`` nodes if one exists among enumerable nodes.

    Returns the chain as a tuple, or None when the whole search space was
    exhausted below that depth.  Raises BudgetError when the budget ran out
    before either outcome.
    """
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    visited = 0
    stack: list[int] = [tree.root]
    path: list[int] = []
    frames: list[list[int]] = [[tree.root]]
    while frames:
        frame = frames[-1]
        if not frame:
            frames.pop()
            if path:
                path.pop()
            continue
        node = frame.pop(0)
        visited += 1
        if visited > node_budget:
            raise BudgetError("branch search exceeded its node budget", {"visited": visited})
        path.append(node)
        if len(path) >= depth:
            return tuple(path)
        frames.append(list(tree.children(node)))
    return None


def infima_chain(tree: Tree, seq: list[int]) -> tuple[int, ...]:
    """Running infima of the tails of a strictly KB-descending sequence."""
    if not seq:
        raise PreconditionError("empty sequence")
    for a, b in zip(seq, seq[1:]):
        if a == b or not kb_compare(tree, b, a):
            raise PreconditionError("sequence is not strictly KB-descending")
    out = []
    for i in range(len(seq)):
        out.append(infimum_of_set(tree, seq[i:]))
    return tuple(out)


def is_chain(tree: Tree, xs: Iterable[int]) -> bool:
    xs = list(xs)
    return all(
        tree.leq(a, b) or tree.leq(b, a) for a, b in itertools.combinations(xs, 2)
    )


# Structural audits ----------------------------------------------------------------


def audit_tree(tree: Tree, sample: int = 200) -> list[str]:
    """Check the tree clauses on an enumerated sample; returns defect strings."""
    problems = []
    nodes = list(itertools.islice(tree.nodes(), sample))
    for x in nodes:
        chain = tree.ancestors(x)
        if chain[0] != tree.root:
            problems.append(f"chain of {x} does not start at the root")
        for a, b in zip(chain, chain[1:]):
            if tree.parent(b) != a:
                problems.append(f"broken parent link {a} -> {b}")
    return problems


def audit_kb_linear(tree: Tree, nodes: list[int] | None = None) -> list[str]:
    """Exhaustively verify that KB is a linear order on the given nodes."""
    if nodes is None:
        nodes = list(tree.nodes())
    problems = []
    for x in nodes:
        if not kb_compare(tree, x, x):
            problems.append(f"not reflexive at {x}")
    for x, y in itertools.permutations(nodes, 2):
        fwd, bwd = kb_compare(tree, x, y), kb_compare(tree, y, x)
        if not (fwd or bwd):
            problems.append(f"not total on {x},{y}")
        if fwd and bwd:
            problems.append(f"not antisymmetric on {x},{y}")
    for x, y, z in itertools.permutations(nodes, 3):
        if kb_compare(tree, x, y) and kb_compare(tree, y, z) and not kb_compare(tree, x, z):
            problems.append(f"not transitive on {x},{y},{z}")
    return problems
