#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Finite nets over single-qubit rank-1 POVMs.

Two-outcome nets are built from a Fibonacci covering of the Bloch sphere
whose covering radius is certified from its spherical Voronoi diagram.
Nets with q outcomes combine a grid of element weights with projector
nets and complete every (q-1)-tuple to an exact POVM.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple, Union
import os

import numpy as np
import yaml
from scipy.spatial import SphericalVoronoi, cKDTree

from isoq import _LOGGER
from isoq.exceptions import InvalidEpsilon, InvalidQ, NotAPovm, NotRank1, DimensionMismatch
from isoq.povm import Povm, Rank1Povm, projector_from_bloch
from isoq.qubit import EIGEN_CUTOFF, HERMITIAN_TOL, from_pauli, operator_norm_2x2, pauli_coordinates

# |members| <= NET_CONSTANT_2 / eps**2 for two-outcome nets
NET_CONSTANT_2 = 16.0
# |members| <= (NET_CONSTANT_Q / eps)**(3 q) for q-outcome nets
NET_CONSTANT_Q = 16.0

AXIS_POINTS = np.array(
    [
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
)


def fibonacci_sphere(count: int) -> np.ndarray:
    """
    ``count`` points of a Fibonacci spiral on the unit sphere, shape ``(count, 3)``.
    """
    i = np.arange(count)
    offset = 2.0 / count
    increment = np.pi * (3.0 - np.sqrt(5.0))
    y = (i * offset - 1) + offset / 2
    r = np.sqrt(np.clip(1 - y ** 2, 0, None))
    phi = ((i + 1) % count) * increment
    return np.stack([np.cos(phi) * r, y, np.sin(phi) * r], axis=1)


def _dedupe_points(points: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    tree = cKDTree(points)
    keep = np.ones(len(points), dtype=bool)
    for i, j in sorted(tree.query_pairs(tol)):
        if keep[i]:
            keep[j] = False
    return points[keep]


def covering_radius(points: np.ndarray) -> float:
    """
    Largest Euclidean distance from any point of the sphere to its nearest
    generator. The maximum is attained at a vertex of the spherical
    Voronoi diagram.
    """
    points = np.asarray(points, dtype=float)
    voronoi = SphericalVoronoi(points, radius=1.0, center=np.zeros(3))
    distances, _ = cKDTree(points).query(voronoi.vertices)
    return float(distances.max())


@lru_cache(maxsize=64)
def sphere_net(chord: float) -> np.ndarray:
    """
    Bloch-sphere points with chordal covering radius at most ``chord``.

    Always contains the six axis points. The Fibonacci point count grows
    by 5% until the certified covering radius is small enough.
    """
    count = max(4, int(np.ceil(4.0 / chord ** 2)))
    while True:
        points = _dedupe_points(np.vstack([AXIS_POINTS, fibonacci_sphere(count)]))
        radius = covering_radius(points)
        if radius <= chord:
            _LOGGER.debug(
                f"Sphere net with {len(points)} points covers chord {radius:.4g} <= {chord:.4g}."
            )
            points.setflags(write=False)
            return points
        count += max(1, int(0.05 * count))


@dataclass(frozen=True, eq=False)
class MeasurementNet:
    """
    A finite set of q-outcome rank-1 POVMs covering all of them within
    ``epsilon`` in the largest-element operator-norm distance.

    Attributes
    ----------
    epsilon : float
        Resolution of the net.
    q : int
        Number of outcomes of every member.
    elements : np.ndarray
        Member elements, complex array ``(size, q, 2, 2)``.
    covering : float, optional
        Certified covering radius when one is known.
    """

    epsilon: float
    q: int
    elements: np.ndarray
    covering: Optional[float] = None
    _members: List[Rank1Povm] = field(default_factory=list, repr=False)

    def __post_init__(self):
        els = np.array(self.elements, dtype=complex)
        if els.ndim != 4 or els.shape[1:] != (self.q, 2, 2):
            raise DimensionMismatch(f"Net elements of shape {els.shape} for q={self.q}.")
        if len(els):
            residual = np.abs(els.sum(axis=1) - np.eye(2)).max()
            if residual > HERMITIAN_TOL:
                raise NotAPovm(f"Net member fails completeness by {residual:.3g}.")
            if np.linalg.eigvalsh(els)[..., 0].max() > EIGEN_CUTOFF:
                raise NotRank1("Net member element of rank two.")
        els.setflags(write=False)
        object.__setattr__(self, "elements", els)

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __getitem__(self, index: int) -> Rank1Povm:
        return self.members[index]

    def __iter__(self):
        return iter(self.members)

    @property
    def members(self) -> List[Rank1Povm]:
        if not self._members:
            self._members.extend(Rank1Povm(e) for e in self.elements)
        return self._members

    def size_bound(self) -> float:
        if self.q == 2:
            return NET_CONSTANT_2 / self.epsilon ** 2
        return (NET_CONSTANT_Q / self.epsilon) ** (3 * self.q)

    def distances(self, povm: Povm) -> np.ndarray:
        """Distance from ``povm`` to every member."""
        if povm.q != self.q:
            raise DimensionMismatch(f"{povm.q}-outcome POVM against a q={self.q} net.")
        out = np.empty(len(self))
        chunk = 65536
        for start in range(0, len(self), chunk):
            diff = self.elements[start:start + chunk] - povm.elements[None]
            out[start:start + chunk] = operator_norm_2x2(diff).max(axis=1)
        return out

    def nearest(self, povm: Povm) -> Tuple[int, float]:
        """Index of the closest member (lowest index on ties) and its distance."""
        d = self.distances(povm)
        index = int(np.argmin(d))
        return index, float(d[index])

    def outcome_operators(self, tol: float = 1e-9) -> np.ndarray:
        """Distinct nonzero elements over all members, in first-seen order."""
        flat = self.elements.reshape(-1, 2, 2)
        flat = flat[operator_norm_2x2(flat) > tol]
        keys = np.round(pauli_coordinates(flat) / tol).astype(np.int64)
        _, first = np.unique(keys, axis=0, return_index=True)
        return flat[np.sort(first)]


def _check_epsilon(epsilon: float) -> None:
    if not (0 < epsilon <= 1):
        _LOGGER.error(f"Net resolution {epsilon!r} outside (0, 1].")
        raise InvalidEpsilon(f"epsilon must satisfy 0 < epsilon <= 1, got {epsilon!r}.")


def build_net_2outcome(epsilon: float) -> MeasurementNet:
    """
    Net of basis measurements ``(P_r, P_-r)`` with ``r`` from a sphere net.

    The distance between ``(P_r, P_-r)`` and ``(P_s, P_-s)`` is half the
    chord ``|r - s|``, so a chordal covering radius of ``2 epsilon``
    gives resolution ``epsilon``.
    """
    _check_epsilon(epsilon)
    points = sphere_net(min(2.0 * epsilon, 2.0))
    elements = np.stack(
        [projector_from_bloch(points), projector_from_bloch(-points)], axis=1
    )
    covering = covering_radius(points) / 2
    _LOGGER.info(f"Two-outcome net at eps={epsilon}: {len(points)} members.")
    return MeasurementNet(epsilon, 2, elements, covering=covering)


def weight_grid(spacing: float) -> np.ndarray:
    grid = np.arange(0.0, 1.0 + 1e-12, spacing)
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    return np.minimum(grid, 1.0)


def element_grid(epsilon: float) -> np.ndarray:
    """
    Pauli coordinates of weighted projectors ``w P_r`` covering every
    rank-1 element with weight in [0, 1] within ``epsilon / 4``.

    Weights are rounded within ``epsilon / 8``; the projector net for
    weight ``w`` has resolution ``epsilon / (8 w)``.
    """
    coords = [np.zeros((1, 4))]
    for w in weight_grid(epsilon / 4)[1:]:
        points = sphere_net(min(epsilon / (4 * w), 2.0))
        block = np.empty((len(points), 4))
        block[:, 0] = w / 2
        block[:, 1:] = points * w / 2
        coords.append(block)
    return np.vstack(coords)


def _dedupe_members(coords: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    keys = np.round(coords.reshape(len(coords), -1) / tol).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return coords[np.sort(first)]


def build_net_qoutcome(q: int, epsilon: float) -> MeasurementNet:
    """
    Net of q-outcome rank-1 POVMs.

    Every (q-1)-tuple of grid elements ``S`` is completed with the rank-1
    part of ``R = I - S``: with ``lambda`` the smaller eigenvalue of ``R``
    the last element is ``R - lambda I``, the tuple now sums to
    ``(1 - lambda) I`` and all elements are divided by ``1 - lambda``.
    Tuples with ``|lambda| > epsilon / 2`` are discarded. For ``q = 2``
    the two-outcome net is added.
    """
    _check_epsilon(epsilon)
    if int(q) != q or q < 2:
        raise InvalidQ(f"q must be an integer >= 2, got {q!r}.")
    q = int(q)
    grid = element_grid(epsilon)
    limit = 1.0 + epsilon / 2
    _LOGGER.debug(f"Element grid at eps={epsilon}: {len(grid)} elements.")

    # partial sums are pruned once their largest eigenvalue exceeds the limit
    tuples = np.zeros((1, 0), dtype=np.int64)
    sums = np.zeros((1, 4))
    for _ in range(q - 1):
        next_tuples, next_sums = list(), list()
        for start in range(0, len(tuples), 4096):
            t = tuples[start:start + 4096]
            s = sums[start:start + 4096, None, :] + grid[None, :, :]
            ok = s[..., 0] + np.linalg.norm(s[..., 1:], axis=-1) <= limit + 1e-12
            rows, cols = np.nonzero(ok)
            next_tuples.append(np.hstack([t[rows], cols[:, None]]))
            next_sums.append(s[rows, cols])
        tuples = np.vstack(next_tuples)
        sums = np.vstack(next_sums)

    norm = np.linalg.norm(sums[:, 1:], axis=1)
    lam = (1 - sums[:, 0]) - norm
    keep = np.abs(lam) <= epsilon / 2
    tuples, sums, norm, lam = tuples[keep], sums[keep], norm[keep], lam[keep]

    last = np.empty((len(tuples), 1, 4))
    last[:, 0, 0] = norm
    last[:, 0, 1:] = -sums[:, 1:]
    coords = np.concatenate([grid[tuples], last], axis=1) / (1 - lam)[:, None, None]
    coords = _dedupe_members(coords)
    elements = from_pauli(coords)

    if q == 2:
        base = build_net_2outcome(epsilon).elements
        elements = np.concatenate([base, elements])
        elements = from_pauli(_dedupe_members(pauli_coordinates(elements)))
    _LOGGER.info(f"{q}-outcome net at eps={epsilon}: {len(elements)} members.")
    return MeasurementNet(epsilon, q, elements)


def save_net(net: MeasurementNet, path: Union[str, os.PathLike]) -> None:
    """
    Write a net as YAML: ``q``, ``epsilon`` and every member as q matrices
    of ``[re, im]`` entries, row-major.
    """
    members = [
        [
            [[[float(z.real), float(z.imag)] for z in row] for row in element]
            for element in member
        ]
        for member in net.elements
    ]
    payload = {"q": int(net.q), "epsilon": float(net.epsilon), "members": members}
    if net.covering is not None:
        payload["covering"] = float(net.covering)
    with open(path, "w") as handle:
        yaml.safe_dump(payload, handle, default_flow_style=None, sort_keys=False)
    _LOGGER.debug(f"Wrote net with {len(net)} members to '{path}'.")


def load_net(path: Union[str, os.PathLike]) -> MeasurementNet:
    with open(path, "r") as handle:
        payload = yaml.safe_load(handle)
    raw = np.asarray(payload["members"], dtype=float)
    if raw.size == 0:
        raw = raw.reshape(0, payload["q"], 2, 2, 2)
    elements = raw[..., 0] + 1j * raw[..., 1]
    return MeasurementNet(
        float(payload["epsilon"]), int(payload["q"]), elements, payload.get("covering")
    )
