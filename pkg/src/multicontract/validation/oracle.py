"""Brute-force ground truth for fixed and periodic points.

These routines read the raw target lists and work on a boolean reachability
matrix. They share no code with multicontract.mappings.
"""

import numpy as np

from multicontract.errors import PreconditionError
from multicontract.mappings import MultiMap


def adjacency(T: MultiMap) -> np.ndarray:
    """Boolean matrix with A[x, y] true iff y ∈ T(x)."""
    n = len(T.targets)
    A = np.zeros((n, n), dtype=bool)
    for x, targets in enumerate(T.targets):
        A[x, list(targets.root)] = True
    return A


def brute_fixed_points(T: MultiMap) -> set[int]:
    """{x : x ∈ T(x)} read off the diagonal."""
    return {int(x) for x in np.flatnonzero(np.diag(adjacency(T)))}


def brute_periodic(T: MultiMap, k_max: int) -> dict[int, set[int]]:
    """Prime-period classes for k = 1..k_max by boolean powers of the adjacency matrix."""
    A = adjacency(T)
    n = A.shape[0]
    if not 1 <= k_max <= n:
        raise PreconditionError(f"k_max must lie in [1, {n}], got {k_max}")

    result: dict[int, set[int]] = {}
    settled = np.zeros(n, dtype=bool)
    reach = A.copy()
    for k in range(1, k_max + 1):
        returns = np.diag(reach) & ~settled
        result[k] = {int(x) for x in np.flatnonzero(returns)}
        settled |= returns
        reach = (reach.astype(np.int64) @ A.astype(np.int64)) > 0
    return result
