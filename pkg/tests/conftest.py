import itertools

import pytest


def circular_gap_ok(combo, n, k):
    """Independent oracle: every two chosen points are more than k apart on the n-cycle."""
    for a, b in itertools.combinations(combo, 2):
        d = abs(a - b)
        if min(d, n - d) <= k:
            return False
    return True


def brute_k_separated(n, k, r):
    """All k-separated r-subsets of [n] by filtering every r-subset."""
    if r == 1:
        return [c for c in itertools.combinations(range(1, n + 1), 1) if n > k]
    return [c for c in itertools.combinations(range(1, n + 1), r) if circular_gap_ok(c, n, k)]


@pytest.fixture
def brute():
    return brute_k_separated
