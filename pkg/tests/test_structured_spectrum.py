import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftmix.arc_model import ArcSystem, sample_Bnk
from driftmix.chain_matrix import build_pure_drift
from driftmix.selftest import pairing_distance
from driftmix.structured_spectrum import (Spectrum, SpectrumError, char_polynomial, eval_q, full_spectrum,
                                          mixing_rate, nonzero_eigenvalues, rate_from_eigenvalues)

lengths_st = st.lists(st.integers(1, 12), min_size=1, max_size=8)


def test_eval_q_examples():
    a = ArcSystem([1, 2])
    assert eval_q(a, 1) == 2
    assert eval_q(a, -0.5) == 2
    w = np.exp(2j * np.pi / 3)
    assert abs(eval_q(ArcSystem([3, 3, 3]), w) - 3) < 1e-14
    with pytest.raises(ZeroDivisionError):
        eval_q(a, 0)


@given(lengths_st, st.complex_numbers(min_magnitude=0.3, max_magnitude=2))
def test_eval_q_direct_sum(lengths, z):
    ref = sum(z ** (-L) for L in lengths)
    assert abs(eval_q(ArcSystem(lengths), z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_char_polynomial_examples():
    assert char_polynomial(ArcSystem([1, 2])).coeffs == (1, 1, -2)
    assert char_polynomial(ArcSystem([1, 1])).coeffs == (2, -2)
    assert char_polynomial(ArcSystem([4] * 3)).coeffs == (3, 0, 0, 0, -3)


@settings(max_examples=200)
@given(lengths_st)
def test_char_polynomial_invariants(lengths):
    p = char_polynomial(ArcSystem(lengths))
    c = p.coeffs
    k, n = len(lengths), sum(lengths)
    assert p.degree == max(lengths)
    assert c[-1] == -k and sum(c) == 0
    # p'(1) = -n
    assert sum(j * cj for j, cj in enumerate(c)) == -n
    assert sum(1 for x in c if x) <= k + 1
    d = p.deflated()
    assert all(isinstance(x, int) for x in d)
    # (z - 1) d(z) == p(z) exactly
    prod = [0] * len(c)
    for j, dj in enumerate(d):
        prod[j + 1] += dj
        prod[j] -= dj
    assert tuple(prod) == c


def test_nonzero_eigenvalues_examples():
    ev = nonzero_eigenvalues(ArcSystem([1, 2]))
    vals = sorted(v.real for v, _ in ev)
    np.testing.assert_allclose(vals, [-0.5, 1.0], atol=1e-14)
    for m in (1, 3, 7):
        ev = nonzero_eigenvalues(ArcSystem([m]))
        roots = np.array([v for v, mult in ev for _ in range(mult)])
        c = np.zeros(m + 1)
        c[0], c[m] = -1, 1
        companion_roots = np.linalg.eigvals(np.polynomial.polynomial.polycompanion(c)) if m > 1 else [1.0]
        assert pairing_distance(roots, companion_roots) < 1e-12
    ev = nonzero_eigenvalues(ArcSystem([2, 4, 6]))
    assert any(abs(v + 1) < 1e-10 for v, _ in ev)
    _assert_conjugate_closed(ev)


def _assert_conjugate_closed(ev):
    vals = np.array([v for v, m in ev for _ in range(m)])
    assert pairing_distance(vals, vals.conj()) < 1e-8


def test_full_spectrum_examples():
    s = full_spectrum(ArcSystem([1, 2]))
    assert s.method == "structured" and s.n == 3
    assert pairing_distance(s.expanded(), [1, -0.5, 0]) < 1e-14
    assert all(m == 1 for _, m in s.eigenvalues)
    s = full_spectrum(ArcSystem([1, 1]))
    assert sorted((abs(v), m) for v, m in s.eigenvalues) == [(0.0, 1), (1.0, 1)]


def test_mixing_rate_examples():
    assert abs(full_spectrum(ArcSystem([1, 2])).mixing_rate - 0.5) <= 1e-10
    assert full_spectrum(ArcSystem([1] * 6)).mixing_rate == 1.0
    for ell in (2, 3, 5):
        s = full_spectrum(ArcSystem([ell] * 4))
        assert s.mixing_rate == 0.0
        unit = np.exp(2j * np.pi * np.arange(ell) / ell)
        nonzero = np.array([v for v, m in s.eigenvalues if abs(v) > 0.5 for _ in range(m)])
        assert pairing_distance(nonzero, unit) <= 1e-10


@settings(max_examples=150, deadline=None)
@given(lengths_st)
def test_spectrum_invariants(lengths):
    arcs = ArcSystem(lengths)
    s = full_spectrum(arcs)
    k = len(lengths)
    assert s.n == arcs.n
    mods = np.array([abs(v) for v, _ in s.eigenvalues])
    assert mods.max() <= 1 + 1e-8
    assert sum(m for v, m in s.eigenvalues if abs(v - 1) < 1e-8) == 1
    # nonzero roots satisfy |z| >= 1/k because prod of roots = c_0 / k
    assert all(abs(v) >= 1 / k - 1e-8 for v, _ in s.eigenvalues if v != 0)
    ones = sum(1 for L in lengths if L == 1)
    assert abs(s.trace() - ones / k) <= 1e-8
    _assert_conjugate_closed(s.eigenvalues)
    for v, _ in s.eigenvalues:
        if v != 0:
            assert abs(eval_q(arcs, v) - k) <= 1e-8 * k * max(1, abs(v) ** -max(lengths))
    assert 0.0 <= s.mixing_rate <= 1.0


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.lists(st.integers(1, 7), min_size=1, max_size=6))
def test_gcd_controls_zero_rate(g, base):
    lengths = [g * x for x in base]
    rate = full_spectrum(ArcSystem(lengths)).mixing_rate
    if reduce(math.gcd, lengths) > 1:
        assert rate == 0.0
    else:
        assert rate > 1e-6


@settings(max_examples=100, deadline=None)
@given(lengths_st)
def test_matches_dense_characteristic_roots(lengths):
    if sum(lengths) > 40:
        return
    arcs = ArcSystem(lengths)
    P = build_pure_drift(arcs).to_dense()
    # independent route: companion roots of the hub polynomial via numpy
    c = np.array(char_polynomial(arcs).coeffs, dtype=float)
    roots = np.polynomial.polynomial.polyroots(c) if len(c) > 2 else np.array([-c[0] / c[1]])
    full = np.concatenate([roots, np.zeros(arcs.n - arcs.max_length)])
    assert pairing_distance(full_spectrum(arcs).expanded(), full) < 1e-5
    # trace agrees with the matrix diagonal
    assert abs(full_spectrum(arcs).trace() - np.trace(P)) < 1e-8


def test_large_instance_converges():
    arcs = sample_Bnk(3000, 54, 1)
    s = full_spectrum(arcs)
    assert s.n == 3000 and s.residual <= 1e-10
    assert abs(s.trace() - sum(L == 1 for L in arcs.lengths) / arcs.k) < 1e-8


def test_rate_requires_unit_eigenvalue():
    with pytest.raises(SpectrumError):
        rate_from_eigenvalues([0.5, 0.2])
    with pytest.raises(SpectrumError):
        mixing_rate(Spectrum(((0.9 + 0j, 1), (0j, 2)), "structured"))
    with pytest.raises(SpectrumError):
        rate_from_eigenvalues([])


def test_rate_removes_one_copy_only():
    assert rate_from_eigenvalues([1.0, 1.0, 0.3]) == 0.0
    assert mixing_rate(Spectrum(((1 + 0j, 2), (0.3 + 0j, 1)), "structured")) == 0.0
    assert rate_from_eigenvalues([1.0]) == 1.0
    assert rate_from_eigenvalues([1.0, 1.0 + 1e-12j, 0.2]) == 0.0


def test_escaping_estimate_regression():
    # an Aberth step once jumped to |z| ~ 40 here and the degree-211 Horner sums overflowed
    lengths = [2, 2, 2, 5, 6, 7, 8, 10, 10, 10, 11, 12, 12, 14, 15, 15, 18, 19, 20, 22, 23, 25, 26, 32, 36,
               38, 38, 42, 45, 50, 55, 55, 55, 65, 75, 118, 139, 160, 171, 212]
    arcs = ArcSystem(lengths)
    s = full_spectrum(arcs)
    c = np.array(char_polynomial(arcs).coeffs, dtype=float)
    ref = np.concatenate([np.polynomial.polynomial.polyroots(c), np.zeros(arcs.n - arcs.max_length)])
    assert pairing_distance(s.expanded(), ref) < 1e-8
