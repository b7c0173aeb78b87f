import math

import numpy as np
import pytest

from pseudoherm import (
    ConsistencyError,
    DomainError,
    GaugeError,
    ObstructionError,
    Operator,
    QSeries,
    SplitHamiltonian,
    StructureError,
    classify,
    commutator,
    master_formula_coefficients,
    master_formula_rhs,
    max_norm,
    metric_from_series,
    nested_commutator,
    order_equation_rhs,
    order_residual,
    pseudo_hermiticity_residual,
    random_admissible_split,
    residual_curve,
    scaling_exponent,
    solve_q_series,
    sylvester_solve,
)
from helpers import commuting_gauge, fixed_split


def test_split_structure_validation():
    good_h0 = np.diag([1.0, 2.0])
    good_h1 = np.array([[0.0, 1j], [1j, 0.0]])
    SplitHamiltonian(Operator(good_h0), Operator(good_h1), 0.1)
    with pytest.raises(StructureError):
        SplitHamiltonian(Operator(np.array([[1.0, 1.0], [0.0, 2.0]])), Operator(good_h1), 0.1)
    with pytest.raises(StructureError):
        SplitHamiltonian(Operator(good_h0), Operator(np.eye(2)), 0.1)


def test_split_total():
    split = fixed_split(4, seed=1)
    t = split.total()
    assert np.array_equal(t.mat, split.H0.mat + split.epsilon * split.H1.mat)
    t2 = split.total(0.5)
    assert np.array_equal(t2.mat, split.H0.mat + 0.5 * split.H1.mat)


def test_qseries_validation_and_sum():
    q1 = Operator(np.diag([1.0, -1.0]))
    q2 = Operator(np.diag([0.5, 0.5]))
    s = QSeries((q1, q2))
    assert s.order == 2
    assert np.allclose(s.summed(0.1).mat, 0.1 * q1.mat + 0.01 * q2.mat, rtol=0, atol=1e-17)
    with pytest.raises(StructureError):
        QSeries((Operator(np.array([[0.0, 1.0], [0.0, 0.0]])),))


def test_master_formula_collected_scalars():
    # order-by-order the triple sum collapses to -1/2, 0, 1/24
    c1 = master_formula_coefficients(1)
    assert c1[0] == -0.5
    c2 = master_formula_coefficients(2)
    assert c2[0] == -0.5 and c2[1] == 0.0
    c3 = master_formula_coefficients(3)
    assert abs(c3[2] - 1.0 / 24.0) <= 1e-15  # binary rounding in the j-sum
    assert c3[0] == -0.5 and c3[1] == 0.0


def test_master_formula_rhs_matches_collected_form():
    rng = np.random.default_rng(21)
    split = random_admissible_split(5, rng)
    q = Operator(np.diag(rng.uniform(-1, 1, 5)))
    for ell in (1, 2, 3, 4):
        coeffs = master_formula_coefficients(ell)
        expected = np.zeros((5, 5), dtype=complex)
        for k, c in enumerate(coeffs, start=1):
            expected = expected + c * nested_commutator(split.H0, q, k).mat
        got = master_formula_rhs(split.H0, q, ell).mat
        assert max_norm(got - expected) < 1e-12 * max(1.0, max_norm(expected))


def test_order_one_rhs_is_minus_two_h1_exactly():
    rng = np.random.default_rng(22)
    for _ in range(5):
        split = random_admissible_split(int(rng.integers(2, 7)), rng)
        r1 = order_equation_rhs(split, None, 1)
        assert np.array_equal(r1.mat, -2.0 * split.H1.mat)


def test_order_two_rhs_vanishes():
    rng = np.random.default_rng(23)
    split = random_admissible_split(5, rng)
    q1 = sylvester_solve(split.H0, order_equation_rhs(split, None, 1))
    r2 = order_equation_rhs(split, QSeries((q1,)), 2)
    assert max_norm(r2.mat) < 1e-12 * max(1.0, max_norm(q1.mat)) ** 2


def test_order_three_rhs_closed_form():
    # with Q2 = 0 the order-3 source collapses to (1/12) [H0, Q1]_3
    rng = np.random.default_rng(24)
    split = random_admissible_split(4, rng)
    q1 = sylvester_solve(split.H0, order_equation_rhs(split, None, 1))
    zero = Operator(np.zeros((4, 4)))
    r3 = order_equation_rhs(split, QSeries((q1, zero)), 3)
    ref = (1.0 / 12.0) * nested_commutator(split.H0, q1, 3).mat
    assert max_norm(r3.mat - ref) < 1e-10 * max(1.0, max_norm(ref))


def test_order_equation_rhs_needs_all_lower_terms():
    split = fixed_split(3, seed=2)
    with pytest.raises(DomainError):
        order_equation_rhs(split, None, 2)


def test_order_residual_definition():
    # m = 1: coefficient of eps in e^{-Q} H e^{Q} - H^dagger is 2 H1 + [H0, Q1]
    split = fixed_split(4, seed=3)
    q1 = Operator(np.diag([0.3, -0.1, 0.2, 0.0]))
    res = order_residual(split, QSeries((q1,)), 1)
    expected = 2.0 * split.H1.mat + commutator(split.H0.mat, q1.mat)
    assert max_norm(res.mat - expected) < 1e-14


def test_sylvester_solve_properties():
    rng = np.random.default_rng(25)
    for _ in range(10):
        dim = int(rng.integers(2, 8))
        split = random_admissible_split(dim, rng)
        r = order_equation_rhs(split, None, 1)
        q = sylvester_solve(split.H0, r)
        assert max_norm(q.mat - q.mat.conj().T) < 1e-14
        lhs = commutator(split.H0.mat, q.mat)
        assert max_norm(lhs - r.mat) < 1e-11 * max(1.0, max_norm(r.mat))
        # minimal gauge: no component along the H0-commutant
        e, u = np.linalg.eigh(split.H0.mat)
        qt = u.conj().T @ q.mat @ u
        assert max_norm(np.diag(qt)) < 1e-11


def test_sylvester_structure_checks():
    h0 = Operator(np.diag([1.0, 2.0]))
    with pytest.raises(StructureError):
        sylvester_solve(Operator(np.array([[1.0, 1.0], [0.0, 2.0]])), Operator(np.zeros((2, 2))))
    with pytest.raises(StructureError):
        sylvester_solve(h0, Operator(np.eye(2)))  # Hermitian source


def test_sylvester_obstruction_on_degenerate_source():
    h0 = Operator(np.diag([1.0, 1.0, 2.0]))
    r = np.zeros((3, 3), dtype=complex)
    r[0, 1], r[1, 0] = 1j, 1j  # anti-Hermitian, lives inside the degenerate block
    with pytest.raises(ObstructionError) as err:
        sylvester_solve(h0, Operator(r))
    assert "degenerate" in str(err.value)


def test_sylvester_degenerate_but_unobstructed():
    h0 = Operator(np.diag([1.0, 1.0, 2.0]))
    r = np.zeros((3, 3), dtype=complex)
    r[0, 2], r[2, 0] = 1.0, -1.0
    q = sylvester_solve(h0, Operator(r))
    assert max_norm(commutator(h0.mat, q.mat) - r) < 1e-12


def test_solve_q_series_residuals_vanish():
    rng = np.random.default_rng(26)
    split = random_admissible_split(6, rng, parity=True)
    series = solve_q_series(split, 3)
    assert series.order == 3
    scale = max(1.0, max_norm(split.H0.mat))
    for m in (1, 2, 3):
        assert max_norm(order_residual(split, series, m).mat) < 1e-9 * scale
    assert [e["gauge"] for e in series.gauge_log] == ["minimal"] * 3
    # Q2 = 0 comes out of the minimal gauge automatically
    assert max_norm(series.terms[1].mat) < 1e-12


def test_solve_q_series_gauge_hook():
    rng = np.random.default_rng(27)
    split = fixed_split(5, seed=4)
    g2 = commuting_gauge(split, rng)
    series = solve_q_series(split, 3, gauge={2: g2})
    assert series.gauge_log[1]["gauge"] == "minimal+custom"
    assert series.gauge_log[1]["custom_norm"] == max_norm(g2.mat)
    # the gauged series still solves every order equation
    for m in (1, 2, 3):
        res = max_norm(order_residual(split, series, m).mat)
        assert res < 1e-9 * max(1.0, max_norm(split.H0.mat)) * max(
            1.0, max(max_norm(t.mat) for t in series.terms) ** m
        )


def test_solve_q_series_rejects_bad_gauge():
    split = fixed_split(4, seed=5)
    not_herm = Operator(np.array(np.triu(np.ones((4, 4)), 1), dtype=complex))
    with pytest.raises(GaugeError):
        solve_q_series(split, 2, gauge={2: not_herm})
    rng = np.random.default_rng(28)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    non_commuting = Operator((a + a.conj().T) / 2)
    with pytest.raises(GaugeError):
        solve_q_series(split, 2, gauge={2: non_commuting})


def test_solve_q_series_rejects_bad_order():
    with pytest.raises(DomainError):
        solve_q_series(fixed_split(3, seed=6), 0)


def test_generic_split_obstructed_at_order_three():
    # without parity structure the order-3 solvability condition generically fails
    rng = np.random.default_rng(29)
    hits = 0
    for _ in range(5):
        split = random_admissible_split(5, rng, parity=False)
        try:
            solve_q_series(split, 3)
        except ObstructionError:
            hits += 1
    assert hits >= 4


def test_parity_split_solvable_to_order_five():
    rng = np.random.default_rng(30)
    split = random_admissible_split(6, rng, parity=True)
    series = solve_q_series(split, 5)
    assert series.order == 5
    # even orders stay zero in the minimal gauge
    assert max_norm(series.terms[1].mat) < 1e-12
    assert max_norm(series.terms[3].mat) < 1e-10


def test_metric_from_series_positive_definite():
    split = fixed_split(5, seed=7)
    series = solve_q_series(split, 2)
    eta = metric_from_series(series, 0.1)
    assert classify(eta.op).positive_definite
    assert eta.provenance.kind == "perturbative"
    assert eta.provenance.order == 2
    assert eta.provenance.epsilon == 0.1
    res = pseudo_hermiticity_residual(split.total(0.1), eta)
    assert res < 1e-3  # truncation error, not roundoff


def test_residual_curve_and_scaling_exponent():
    split = fixed_split(5, seed=8)
    series = solve_q_series(split, 2)
    eps = [0.1, 0.05, 0.025, 0.0125]
    curve = residual_curve(split, series, eps)
    assert [e for e, _ in curve] == eps
    rs = [r for _, r in curve]
    assert all(rs[i] > rs[i + 1] for i in range(3))
    slope = scaling_exponent(split, series, eps)
    assert 2.6 < slope < 3.4  # odd-gauge series gains one extra order


def test_scaling_exponent_input_validation():
    split = fixed_split(4, seed=9)
    series = solve_q_series(split, 1)
    with pytest.raises(DomainError):
        scaling_exponent(split, series, [0.1, 0.05])
    with pytest.raises(DomainError):
        scaling_exponent(split, series, [0.05, 0.1, 0.2])


def test_scaling_exponent_noise_floor_warning():
    # an exactly commuting pair has zero residual at every epsilon
    h0 = Operator(np.diag([1.0, 2.0]))
    h1 = Operator(np.zeros((2, 2)))
    split = SplitHamiltonian(h0, h1, 0.1)
    series = QSeries((Operator(np.zeros((2, 2))),))
    with pytest.warns(RuntimeWarning):
        scaling_exponent(split, series, [0.1, 0.05, 0.025])


def test_random_admissible_split_structure():
    rng = np.random.default_rng(31)
    for parity in (False, True):
        split = random_admissible_split(6, rng, parity=parity)
        h0, h1 = split.H0.mat, split.H1.mat
        assert max_norm(h0 - h0.conj().T) < 1e-12
        assert max_norm(h1 + h1.conj().T) < 1e-12
        e, u = np.linalg.eigh(h0)
        assert np.diff(e).min() > 1e-3
        assert max_norm(np.diag(u.conj().T @ h1 @ u)) < 1e-12
    with pytest.raises(DomainError):
        random_admissible_split(1, rng)


def test_parity_split_commutation_relations():
    rng = np.random.default_rng(32)
    dim = 6
    split = random_admissible_split(dim, rng, parity=True)
    # recover the sign pattern from the block structure of H0 and H1
    mask = np.abs(split.H1.mat) > 1e-12
    signs = np.ones(dim)
    reachable = mask[0]
    signs[reachable] = -1.0
    p = np.diag(signs)
    assert max_norm(commutator(split.H0.mat, p)) < 1e-12
    assert max_norm(split.H1.mat @ p + p @ split.H1.mat) < 1e-12


def test_order_residual_matches_hand_expansion():
    # coefficients of e^{-Q} H e^{Q} - H^dagger written out by hand
    split = fixed_split(4, seed=10)
    rng = np.random.default_rng(33)
    terms = []
    for _ in range(3):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        terms.append(Operator((a + a.conj().T) / 2))
    series = QSeries(tuple(terms))
    h0, h1 = split.H0.mat, split.H1.mat
    q1, q2, q3 = (t.mat for t in terms)

    def c(a, b):
        return commutator(a, b)

    m1 = 2 * h1 + c(h0, q1)
    m2 = c(h0, q2) + c(h1, q1) + 0.5 * c(c(h0, q1), q1)
    m3 = (
        c(h0, q3)
        + c(h1, q2)
        + 0.5 * (c(c(h0, q1), q2) + c(c(h0, q2), q1))
        + 0.5 * c(c(h1, q1), q1)
        + (1.0 / 6.0) * c(c(c(h0, q1), q1), q1)
    )
    for m, ref in ((1, m1), (2, m2), (3, m3)):
        got = order_residual(split, series, m).mat
        assert max_norm(got - ref) < 1e-12 * max(1.0, max_norm(ref))


def test_full_conjugation_residual_consistent_with_orders():
    # at small eps the exact conjugation residual is dominated by the
    # first unsolved order of the series
    split = fixed_split(4, seed=11)
    series = solve_q_series(split, 2)
    eps = 1e-2
    q = series.summed(eps)
    w, u = np.linalg.eigh(q.mat)
    em = (u * np.exp(-w)) @ u.conj().T
    ep = (u * np.exp(w)) @ u.conj().T
    h = split.total(eps).mat
    exact = max_norm(em @ h @ ep - h.conj().T)
    padded = QSeries(series.terms + (Operator(np.zeros((4, 4))),))
    r3 = max_norm(order_residual(split, padded, 3).mat)
    predicted = r3 * eps**3
    assert abs(exact - predicted) < 0.05 * predicted
