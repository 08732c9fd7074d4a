"""Linear-in-the-weights Gaussian RBF network used by the compensation effort.

Each control channel ``l`` owns a block of basis functions
``pi_i(x) = exp(-||x - c_i||^2 / width^2)``; the basis matrix stacks the
blocks diagonally so the network output is ``basis_matrix(x) @ weights``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter


@dataclass(frozen=True, eq=False)
class RbfLayout:
    """Centers per output channel plus a shared width.

    ``centers`` is a sequence with one ``(n_l, input_dim)`` array per output
    channel.
    """

    centers: tuple
    width: float

    def __post_init__(self):
        blocks = tuple(np.array(c, dtype=float, ndmin=2) for c in self.centers)
        if not blocks:
            raise InvalidParameter("RbfLayout needs at least one output channel")
        dims = {b.shape[1] for b in blocks}
        if len(dims) != 1:
            raise DimensionMismatch(f"centers have inconsistent input dimensions {sorted(dims)}")
        if not (np.isfinite(self.width) and self.width > 0):
            raise InvalidParameter(f"width must be positive, got {self.width}")
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "centers", blocks)
        object.__setattr__(self, "width", float(self.width))
        # flat view used on the hot path
        all_c = np.vstack(blocks)
        all_c.setflags(write=False)
        object.__setattr__(self, "_all_centers", all_c)
        object.__setattr__(self, "_neg_inv_w2", -1.0 / (self.width * self.width))

    @property
    def input_dim(self) -> int:
        return self.centers[0].shape[1]

    @property
    def output_dim(self) -> int:
        return len(self.centers)

    @property
    def counts(self) -> tuple:
        return tuple(b.shape[0] for b in self.centers)

    @property
    def n_weights(self) -> int:
        return sum(self.counts)

    def __eq__(self, other):
        if not isinstance(other, RbfLayout):
            return NotImplemented
        return (
            self.width == other.width
            and len(self.centers) == len(other.centers)
            and all(np.array_equal(a, b) for a, b in zip(self.centers, other.centers))
        )

    @classmethod
    def diagonal(cls, count=10, low=-0.5, high=0.5, width=0.3, input_dim=2):
        """Single-channel layout with centers ``(v, ..., v)`` for ``v`` evenly spaced on [low, high]."""
        v = np.linspace(low, high, count)
        return cls(centers=(np.repeat(v[:, None], input_dim, axis=1),), width=width)


def basis_values(layout: RbfLayout, x) -> np.ndarray:
    """All basis function values, concatenated over channels (length ``n_weights``)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (layout.input_dim,):
        raise DimensionMismatch(f"x has shape {x.shape}, layout expects ({layout.input_dim},)")
    d = layout._all_centers - x
    return np.exp((d * d).sum(axis=1) * layout._neg_inv_w2)


def basis_matrix(layout: RbfLayout, x) -> np.ndarray:
    """Block-diagonal ``m x n_weights`` basis matrix evaluated at ``x``."""
    values = basis_values(layout, x)
    if layout.output_dim == 1:
        return values.reshape(1, -1)
    out = np.zeros((layout.output_dim, layout.n_weights))
    start = 0
    for row, count in enumerate(layout.counts):
        out[row, start:start + count] = values[start:start + count]
        start += count
    return out


def evaluate(layout: RbfLayout, weights, x) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (layout.n_weights,):
        raise DimensionMismatch(f"weights have shape {weights.shape}, expected ({layout.n_weights},)")
    return basis_matrix(layout, x) @ weights
