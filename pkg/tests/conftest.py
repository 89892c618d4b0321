import math
from collections import Counter
from fractions import Fraction

import numpy as np
from scipy import stats


def two_sample_chi2(a: Counter, b: Counter, min_total: int = 10) -> float:
    """p-value of the two-sample chi-square homogeneity test.

    Categories whose pooled count is below ``min_total`` are merged into one
    cell so the asymptotic distribution stays usable.
    """
    cats = sorted(set(a) | set(b))
    big = [c for c in cats if a[c] + b[c] >= min_total]
    small = [c for c in cats if a[c] + b[c] < min_total]
    table = [[a[c] for c in big], [b[c] for c in big]]
    if small:
        table[0].append(sum(a[c] for c in small))
        table[1].append(sum(b[c] for c in small))
    table = np.array(table, dtype=float)
    table = table[:, table.sum(axis=0) > 0]
    return stats.chi2_contingency(table, correction=False)[1]


def exact_node_count(n: int, k: int) -> Fraction:
    """C(n-1, k-1) k^k (n-k)^(n-k) / n^n as an exact rational."""
    return Fraction(math.comb(n - 1, k - 1) * k**k * (n - k) ** (n - k), n**n)


def gap_multisets(n: int, k: int) -> Counter:
    """Sorted cyclic gap multisets over all C(n, k) choices of removed edges."""
    from itertools import combinations

    out = Counter()
    for cut in combinations(range(n), k):
        gaps = [(cut[(i + 1) % k] - cut[i]) % n or n for i in range(k)]
        out[tuple(sorted(gaps))] += 1
    return out


ACCEPTANCE_LINES: list[str] = []


def report(number: int, passed: bool, detail: str) -> bool:
    """Record one acceptance line; returns ``passed`` for use in asserts."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
