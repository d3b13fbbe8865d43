#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
1-pass LOCC measurement strategies in the isolated-qubits model.

A strategy is a decision tree: every node measures one qubit with a
single-qubit POVM and branches on the outcome; no path measures a qubit
twice. Outcome strings are the sequences of outcome indices along a path.
"""

from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from isoq import _LOGGER
from isoq.exceptions import (
    CapExceeded,
    DepthMismatch,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDepth,
    RepeatedQubit,
)
from isoq.nets import MeasurementNet
from isoq.povm import Povm, computational_povm, random_povm, random_rank1_povm, rank1_reduce
from isoq.qubit import (
    DistributionTable,
    JointTable,
    OutcomeRecord,
    ProductState,
    expectation_table,
)

Path = Tuple[int, ...]

# ties in the greedy gain are resolved within this tolerance
GAIN_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StrategyNode:
    """
    Measure ``qubit`` with ``povm``; ``children[i]`` continues after outcome
    ``i`` (``None`` ends the strategy on that branch).
    """

    qubit: int
    povm: Povm
    children: Tuple[Optional["StrategyNode"], ...]

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) != self.povm.q:
            raise DimensionMismatch(
                f"Node with a {self.povm.q}-outcome POVM has {len(children)} children."
            )
        if self.qubit < 0:
            raise IndexOutOfRange(f"Negative qubit index {self.qubit}.")
        object.__setattr__(self, "children", children)


@dataclass(frozen=True, eq=False)
class StrategyTree:
    """
    A 1-pass adaptive strategy. ``root`` is ``None`` for the strategy
    that measures nothing.
    """

    root: Optional[StrategyNode]

    def __post_init__(self):
        _check_one_pass(self.root, frozenset())

    @property
    def depth(self) -> int:
        return _depth(self.root)

    @property
    def max_qubit(self) -> int:
        return max((node.qubit for node, _ in self.nodes()), default=-1)

    def nodes(self) -> Iterator[Tuple[StrategyNode, Path]]:
        """Depth-first walk yielding every node with the path leading to it."""
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if node is None:
                continue
            yield node, path
            for i in reversed(range(len(node.children))):
                stack.append((node.children[i], path + (i,)))

    def leaves(self) -> List[Path]:
        return [path for path, _ in _leaf_walk(self.root, ())]

    def qubits_on_path(self, path: Path) -> List[int]:
        """Qubits measured along the first ``len(path)`` steps of ``path``."""
        node, qubits = self.root, list()
        for outcome in path:
            if node is None:
                break
            qubits.append(node.qubit)
            node = node.children[outcome]
        return qubits

    def is_non_adaptive(self) -> bool:
        """Whether every node at a given depth measures the same qubit the same way."""
        levels: Dict[int, StrategyNode] = dict()
        for node, path in self.nodes():
            ref = levels.setdefault(len(path), node)
            if ref.qubit != node.qubit or not ref.povm.same_as(node.povm):
                return False
        return True


def _check_one_pass(node: Optional[StrategyNode], seen: frozenset) -> None:
    if node is None:
        return
    if node.qubit in seen:
        raise RepeatedQubit(f"Qubit {node.qubit} is measured twice on one path.")
    seen = seen | {node.qubit}
    for child in node.children:
        _check_one_pass(child, seen)


def _depth(node: Optional[StrategyNode]) -> int:
    if node is None:
        return 0
    return 1 + max(_depth(child) for child in node.children)


def _leaf_walk(node, path):
    if node is None:
        yield path, None
        return
    for i, child in enumerate(node.children):
        yield from _leaf_walk(child, path + (i,))


def outcome_label(path: Path) -> str:
    """Outcome string of a path; indices above 9 are dot-separated."""
    if any(i > 9 for i in path):
        return ".".join(str(i) for i in path)
    return "".join(str(i) for i in path)


def outcome_matrix(amplitudes: np.ndarray, tree: StrategyTree) -> Tuple[List[Path], np.ndarray]:
    """
    Leaf paths of ``tree`` and ``Pr[path | u]`` for every state of an
    amplitude stack ``(U, n, 2)``; the matrix has shape ``(U, leaves)``.
    """
    n = amplitudes.shape[1]
    if tree.max_qubit >= n:
        raise IndexOutOfRange(
            f"Strategy measures qubit {tree.max_qubit} of a {n}-qubit state."
        )
    paths: List[Path] = list()
    columns: List[np.ndarray] = list()

    def walk(node, path, weight):
        if node is None:
            paths.append(path)
            columns.append(weight)
            return
        probs = expectation_table(amplitudes[:, node.qubit, :], node.povm.elements)
        probs = np.clip(probs, 0.0, 1.0)
        for i, child in enumerate(node.children):
            walk(child, path + (i,), weight * probs[:, i])

    walk(tree.root, (), np.ones(amplitudes.shape[0]))
    return paths, np.stack(columns, axis=1)


def _amplitudes(family: Sequence[ProductState]) -> np.ndarray:
    if isinstance(family, ProductState):
        family = [family]
    if len({s.n for s in family}) != 1:
        raise DimensionMismatch("All states of a family must have the same length.")
    return np.stack([s.amplitudes for s in family])


def execute_strategy(tree: StrategyTree, state: ProductState) -> DistributionTable:
    """Distribution of outcome strings when ``tree`` is run on ``state``."""
    paths, matrix = outcome_matrix(_amplitudes([state]), tree)
    return DistributionTable([outcome_label(p) for p in paths], matrix[0])


def joint_distribution(
    tree: StrategyTree,
    family: Sequence[ProductState],
    prior: Optional[Union[DistributionTable, np.ndarray]] = None,
) -> JointTable:
    """
    Joint law ``Pr[u, z] = prior(u) Pr[z | u]``; rows are family indices,
    columns outcome strings.
    """
    amps = _amplitudes(family)
    if prior is None:
        weights = np.full(amps.shape[0], 1.0 / amps.shape[0])
    else:
        weights = prior.probs if isinstance(prior, DistributionTable) else np.asarray(prior, float)
    if weights.size != amps.shape[0]:
        raise DimensionMismatch(f"{weights.size} prior weights for {amps.shape[0]} states.")
    paths, matrix = outcome_matrix(amps, tree)
    return JointTable(
        tuple(range(amps.shape[0])),
        tuple(outcome_label(p) for p in paths),
        matrix * weights[:, None],
    )


def _levels_equal(a: List[Optional[StrategyNode]], b: List[Optional[StrategyNode]], tol: float) -> bool:
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if x is None or y is None:
            if x is not y:
                return False
            continue
        if x.qubit != y.qubit or not x.povm.same_as(y.povm, tol):
            return False
    return True


def common_prefix_depth(m1: StrategyTree, m2: StrategyTree, tol: float = 1e-12) -> int:
    """Number of leading steps on which both strategies behave identically."""
    level1, level2 = [m1.root], [m2.root]
    depth = 0
    while any(node is not None for node in level1 + level2):
        if not _levels_equal(level1, level2, tol):
            break
        depth += 1
        level1 = [c for node in level1 if node is not None for c in node.children]
        level2 = [c for node in level2 if node is not None for c in node.children]
    return depth


def strategy_distance(m1: StrategyTree, m2: StrategyTree, nb: int) -> float:
    """
    ``sqrt(2) 2^(-nb/2) (nb - l)`` with ``l`` the common prefix depth of two
    depth-``nb`` strategies.
    """
    for tree in (m1, m2):
        if tree.depth != nb:
            raise DepthMismatch(f"Strategy of depth {tree.depth}, expected {nb}.")
    ell = min(common_prefix_depth(m1, m2), nb)
    return float(np.sqrt(2) * 2 ** (-nb / 2) * (nb - ell))


def count_strategies(n: int, net_size: int, q: int, depth: int) -> int:
    """Number of distinct 1-pass trees of the given depth over ``n`` qubits."""
    if depth == 0:
        return 1
    return n * net_size * count_strategies(n - 1, net_size, q, depth - 1) ** q


def _subtrees(available: Tuple[int, ...], members: Sequence[Povm], depth: int) -> List[Optional[StrategyNode]]:
    if depth == 0:
        return [None]
    out: List[Optional[StrategyNode]] = list()
    for qubit in available:
        rest = tuple(a for a in available if a != qubit)
        children = _subtrees(rest, members, depth - 1)
        for povm in members:
            for combo in product(children, repeat=povm.q):
                out.append(StrategyNode(qubit, povm, combo))
    return out


def enumerate_strategies(
    n: int,
    net: MeasurementNet,
    depth: int,
    cap: int,
    roots: Optional[Sequence[Tuple[int, int]]] = None,
) -> Iterator[StrategyTree]:
    """
    Every 1-pass tree of ``depth`` steps over (qubit, net member) choices,
    depth-first with qubits then members in ascending order.

    ``roots`` restricts the first step to the given ``(qubit, member)``
    pairs, which partitions the enumeration between workers.
    """
    if not 0 <= depth <= n:
        raise InvalidDepth(f"Depth {depth} must lie in [0, {n}].")
    total = count_strategies(n, len(net), net.q, depth)
    if total > cap:
        _LOGGER.error(f"Enumerating {total} strategies exceeds the cap of {cap}.")
        raise CapExceeded(total, cap, "strategies")
    _LOGGER.debug(f"Enumerating {total} strategies of depth {depth} over {n} qubits.")
    if depth == 0:
        yield StrategyTree(None)
        return
    members = net.members
    allowed = None if roots is None else set(roots)
    for qubit in range(n):
        rest = tuple(a for a in range(n) if a != qubit)
        children = _subtrees(rest, members, depth - 1)
        for index, povm in enumerate(members):
            if allowed is not None and (qubit, index) not in allowed:
                continue
            for combo in product(children, repeat=povm.q):
                yield StrategyTree(StrategyNode(qubit, povm, combo))


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 1e-15, -p * np.log2(np.where(p > 1e-15, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def greedy_strategy(
    family: Sequence[ProductState],
    prior: Optional[Union[DistributionTable, np.ndarray]],
    net: MeasurementNet,
    depth: Optional[int] = None,
) -> StrategyTree:
    """
    Grow a strategy one step at a time, choosing at every node the
    (unmeasured qubit, net member) with the largest one-step information
    gain about the state index under the current posterior.

    Ties go to the lowest qubit, then the lowest member index. Branches
    that cannot occur keep the first available choice so every path has
    the same length.
    """
    amps = _amplitudes(family)
    n = amps.shape[1]
    depth = n if depth is None else depth
    if not 0 <= depth <= n:
        raise InvalidDepth(f"Depth {depth} must lie in [0, {n}].")
    if prior is None:
        weights = np.full(amps.shape[0], 1.0 / amps.shape[0])
    else:
        weights = prior.probs if isinstance(prior, DistributionTable) else np.asarray(prior, float)
    members = net.members
    # (U, n, L, q) outcome probabilities of every member on every qubit
    table = np.clip(
        np.einsum("uai,lqij,uaj->ualq", amps.conj(), net.elements, amps, optimize=True).real,
        0.0,
        1.0,
    )

    def grow(mass: np.ndarray, available: Tuple[int, ...], steps: int) -> Optional[StrategyNode]:
        if steps == 0 or not available:
            return None
        total = mass.sum()
        choice = (available[0], 0)
        if total > 1e-15:
            post = mass / total
            probs = table[:, list(available)]  # (U, A, L, q)
            marginal = np.einsum("u,ualq->alq", post, probs)
            gain = _entropy_rows(marginal) - np.einsum("u,ual->al", post, _entropy_rows(probs))
            best = gain.max()
            a_idx, l_idx = np.argwhere(gain >= best - GAIN_TIE_TOL)[0]
            choice = (available[a_idx], int(l_idx))
        qubit, member = choice
        rest = tuple(a for a in available if a != qubit)
        probs = table[:, qubit, member, :]
        children = tuple(
            grow(mass * probs[:, i], rest, steps - 1) for i in range(net.q)
        )
        return StrategyNode(qubit, members[member], children)

    tree = StrategyTree(grow(weights.astype(float), tuple(range(n)), depth))
    _LOGGER.debug(f"Greedy strategy of depth {tree.depth} over {n} qubits.")
    return tree


def basis_strategy(n: int, povm: Optional[Povm] = None, order: Optional[Sequence[int]] = None) -> StrategyTree:
    """Non-adaptive strategy measuring every qubit with the same POVM."""
    povm = computational_povm() if povm is None else povm
    order = list(range(n)) if order is None else list(order)
    return product_strategy([(a, povm) for a in order])


def product_strategy(steps: Sequence[Tuple[int, Povm]]) -> StrategyTree:
    """Non-adaptive strategy performing ``steps`` in order on every branch."""
    node: Optional[StrategyNode] = None
    for qubit, povm in reversed(list(steps)):
        node = StrategyNode(qubit, povm, (node,) * povm.q)
    return StrategyTree(node)


def random_strategy(
    n: int, depth: int, q: int, rng: np.random.Generator, rank1: bool = False
) -> StrategyTree:
    """Random adaptive strategy with random qubit choices and random POVMs."""
    if not 0 <= depth <= n:
        raise InvalidDepth(f"Depth {depth} must lie in [0, {n}].")
    draw = random_rank1_povm if rank1 else random_povm

    def grow(available: List[int], steps: int) -> Optional[StrategyNode]:
        if steps == 0:
            return None
        qubit = available[int(rng.integers(len(available)))]
        rest = [a for a in available if a != qubit]
        povm = draw(q, rng)
        return StrategyNode(qubit, povm, tuple(grow(rest, steps - 1) for _ in range(q)))

    return StrategyTree(grow(list(range(n)), depth))


def discretize_strategy(tree: StrategyTree, net: MeasurementNet) -> StrategyTree:
    """Replace every measurement by its nearest net member."""

    def walk(node):
        if node is None:
            return None
        index, _ = net.nearest(node.povm)
        return StrategyNode(node.qubit, net[index], tuple(walk(c) for c in node.children))

    return StrategyTree(walk(tree.root))


@dataclass(frozen=True, eq=False)
class RefinedStrategy:
    """
    A rank-1 refinement of a strategy with the original path of every
    refined leaf path.
    """

    tree: StrategyTree
    path_map: Dict[Path, Path]

    def coarse_grain(self, joint: JointTable, original: StrategyTree) -> JointTable:
        """Merge the columns of a joint law of the refined tree onto ``original``'s leaves."""
        targets = [outcome_label(p) for p in original.leaves()]
        index = {label: j for j, label in enumerate(targets)}
        refined_paths = {outcome_label(p): p for p in self.path_map}
        probs = np.zeros((len(joint.row_labels), len(targets)))
        for j, label in enumerate(joint.col_labels):
            source = self.path_map[refined_paths[label]]
            probs[:, index[outcome_label(source)]] += joint.probs[:, j]
        return JointTable(joint.row_labels, tuple(targets), probs)


def refine_strategy(tree: StrategyTree) -> RefinedStrategy:
    """
    Replace every measurement by a rank-1 POVM that refines it; after an
    outcome of the refined measurement the strategy continues as the
    original one did after the corresponding coarse outcome.
    """
    path_map: Dict[Path, Path] = dict()

    def walk(node, refined_path, original_path):
        if node is None:
            path_map[refined_path] = original_path
            return None
        rank1, origins = rank1_reduce(node.povm).to_rank1()
        children = tuple(
            walk(node.children[origin], refined_path + (j,), original_path + (origin,))
            for j, origin in enumerate(origins)
        )
        return StrategyNode(node.qubit, rank1, children)

    root = walk(tree.root, (), ())
    return RefinedStrategy(StrategyTree(root), path_map)


def count_outcome_records(n: int, operators: int, m: int) -> int:
    return comb(n, m) * operators ** m


def enumerate_outcomes(
    n: int,
    net: MeasurementNet,
    m: int,
    cap: int,
    rng: Optional[np.random.Generator] = None,
    samples: Optional[int] = None,
) -> Iterator[OutcomeRecord]:
    """
    Product outcomes ``M_A`` with ``|A| = m`` built from the distinct
    elements of ``net``.

    When there are more than ``cap`` of them, ``samples`` records are drawn
    with ``rng`` instead, or :class:`CapExceeded` is raised.
    """
    if not 0 <= m <= n:
        raise InvalidDepth(f"Outcome size {m} must lie in [0, {n}].")
    ops = net.outcome_operators()
    total = count_outcome_records(n, len(ops), m)
    if total <= cap:
        for subset in combinations(range(n), m):
            for choice in product(range(len(ops)), repeat=m):
                yield OutcomeRecord(subset, ops[list(choice)])
        return
    if samples is None or rng is None:
        _LOGGER.error(f"{total} outcome records exceed the cap of {cap}.")
        raise CapExceeded(total, cap, "outcome records")
    _LOGGER.info(f"{total} outcome records exceed the cap; sampling {samples}.")
    for _ in range(samples):
        subset = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
        choice = rng.integers(len(ops), size=m)
        yield OutcomeRecord(subset, ops[choice])
