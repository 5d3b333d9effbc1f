"""Two-qubit measurement statistics for the parity-flip protocol.

A maximally entangled pair is shared between the outer labs; the middle
lab's binary input toggles a bit flip on the second qubit before the outer
labs measure in bases selected by their own inputs.  The resulting table has
uniform outer marginals whatever the middle input does, yet the joint outer
statistics track it, which is exactly the jamming pattern.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

import numpy as np

from .dist import FLOAT_TOL, Distribution
from .errors import ArgumentError

_INV_SQRT2 = 1 / math.sqrt(2)

COMPUTATIONAL = ((1.0, 0.0), (0.0, 1.0))
DIAGONAL = ((_INV_SQRT2, _INV_SQRT2), (_INV_SQRT2, -_INV_SQRT2))

DEFAULT_BASES: dict[int, Sequence[Sequence[complex]]] = {0: COMPUTATIONAL, 1: DIAGONAL}

_BELL_PLAIN = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
_BELL_FLIPPED = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)


def _validate_basis(vectors) -> np.ndarray:
    arr = np.asarray(vectors, dtype=complex)
    if arr.shape != (2, 2):
        raise ArgumentError("a qubit basis needs exactly two 2-component vectors")
    gram = arr @ arr.conj().T
    if not np.allclose(gram, np.eye(2), atol=1e-9):
        raise ArgumentError("basis vectors must be orthonormal")
    return arr


def _basis_map(bases: Mapping[int, Sequence[Sequence[complex]]] | None) -> dict[int, np.ndarray]:
    src = DEFAULT_BASES if bases is None else bases
    if set(src) != {0, 1}:
        raise ArgumentError("bases must be keyed by the two setting values 0 and 1")
    return {k: _validate_basis(v) for k, v in src.items()}


def measurement_joint(bases_first: Mapping | None = None,
                      bases_second: Mapping | None = None, *,
                      apply_flip: bool = True) -> dict[tuple, float]:
    """P(x, z | a, b, c) for all binary inputs, keyed (a, b, c, x, z).

    apply_flip=False freezes the shared state regardless of b, which gives
    the plain entangled-pair statistics for cross-checks.
    """
    ba = _basis_map(bases_first)
    bc = _basis_map(bases_second)
    out: dict[tuple, float] = {}
    for a, b, c in itertools.product((0, 1), repeat=3):
        psi = _BELL_FLIPPED if (b == 1 and apply_flip) else _BELL_PLAIN
        for x, z in itertools.product((0, 1), repeat=2):
            vec = np.kron(ba[a][x], bc[c][z])
            amp = vec.conj() @ psi
            out[(a, b, c, x, z)] = float(abs(amp) ** 2)
    return out


def quantum_jamming_distribution(bases_first: Mapping | None = None,
                                 bases_second: Mapping | None = None, *,
                                 snap: bool = True) -> Distribution:
    """Joint table over settings A, B, C (uniform) and outer outcomes X, Z."""
    table = measurement_joint(bases_first, bases_second)
    alphabets = {n: (0, 1) for n in "ABCXZ"}
    weights: dict[tuple, float] = {}
    for (a, b, c, x, z), p in table.items():
        if p > FLOAT_TOL:
            weights[(a, b, c, x, z)] = p / 8.0
    dist = Distribution.from_weights(alphabets, weights)
    if snap:
        # only adopt the exact table when it reproduces the floats; rotated
        # bases with irrational probabilities stay in float form
        snapped = dist.snap_to_rational(64)
        if snapped.same_table(dist, tol=1e-9):
            dist = snapped
    return dist
