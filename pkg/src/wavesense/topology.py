"""Controller placement on the metasurface and pairwise geometry."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Topology:
    """One controller per unit cell, below the cell center inside the substrate.

    node_index = row * cols + col.
    """

    rows: int
    cols: int
    pitch_m: float
    depth_m: float
    positions: np.ndarray  # (rows*cols, 3) meters

    @property
    def node_count(self) -> int:
        return self.rows * self.cols

    def node_index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def distance_m(self, a: int, b: int) -> float:
        return float(np.linalg.norm(self.positions[a] - self.positions[b]))

    def distance_matrix_m(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=2)


def build_topology(
    rows: int = 30, cols: int = 30, pitch_m: float = 0.010, depth_m: float = 0.00025
) -> Topology:
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be >= 1")
    if pitch_m <= 0.0:
        raise ValueError("pitch must be positive")
    r, c = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    positions = np.column_stack(
        [
            c.ravel() * pitch_m,
            r.ravel() * pitch_m,
            np.full(rows * cols, -depth_m),
        ]
    )
    return Topology(rows, cols, pitch_m, depth_m, positions)


def neighbors_within(topology: Topology, node: int, radius_m: float) -> list[int]:
    """Indices of all other nodes at distance <= radius, ascending."""
    if radius_m <= 0.0:
        raise ValueError("radius must be positive")
    d = np.linalg.norm(topology.positions - topology.positions[node], axis=1)
    idx = np.nonzero(d <= radius_m)[0]
    return [int(i) for i in idx if i != node]
