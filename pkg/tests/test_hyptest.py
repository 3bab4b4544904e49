import math

import numpy as np
import pytest

from cqpack import (
    CqChannel,
    ValidationError,
    alpha,
    beta,
    delta_n,
    hypothesis_report,
    kron_power,
    mutual_information,
    oh_bounds,
    per_codeword_test,
    pinch,
    pinched_test,
    relative_entropy,
)
from cqpack import classical
from cqpack.channel import codeword_state, mixture_state
from cqpack.linop import is_projector, is_test
from cqpack.sampling import random_channel, random_density, random_distribution


def test_pinched_test_equal_states(rng):
    rho = random_density(3, rng)
    assert np.abs(pinched_test(rho, rho, 1, -0.1) - np.eye(3)).max() < 1e-12
    assert np.abs(pinched_test(rho, rho, 1, 0.1)).max() < 1e-12


def test_pinched_test_neyman_pearson():
    t = pinched_test(np.diag([0.9, 0.1]), np.eye(2) / 2, 1, 0.0)
    assert np.abs(t - np.diag([1, 0])).max() < 1e-12


def test_pinched_test_properties(rng):
    for n in (1, 2, 3):
        rho, sigma = random_density(2, rng), random_density(2, rng)
        t = pinched_test(rho, sigma, n, 0.2)
        sn = kron_power(sigma, n)
        assert is_projector(t) and is_test(t)
        assert np.abs(t @ sn - sn @ t).max() < 1e-9


def test_alpha_beta_examples():
    r, s = np.diag([0.9, 0.1]), np.eye(2) / 2
    assert (alpha(r, np.eye(2)), beta(s, np.eye(2))) == (0.0, 1.0)
    assert (alpha(r, np.zeros((2, 2))), beta(s, np.zeros((2, 2)))) == (1.0, 0.0)
    t = np.diag([1.0, 0.0])
    assert abs(alpha(r, t) - 0.1) < 1e-15 and abs(beta(s, t) - 0.5) < 1e-15
    with pytest.raises(ValidationError):
        alpha(r, np.eye(3))


def test_oh_bounds_examples(rng):
    rho, sigma = random_density(2, rng), random_density(2, rng)
    ab, bb = oh_bounds(rho, sigma, 3, 0.2, 0.0)
    assert abs(ab - 1) < 1e-15
    assert abs(bb - math.exp(-0.6)) < 1e-15
    r, q = np.array([0.8, 0.2]), np.array([0.4, 0.6])
    psi_half = -math.log((np.sqrt(r) * np.sqrt(q)).sum())
    ab, bb = oh_bounds(np.diag(r), np.diag(q), 2, 0.0, 0.5)
    assert abs(ab - 3.0 ** (0.5 * 2) * math.exp(-2 * psi_half)) < 1e-12
    assert bb == 1.0


def test_oh_bounds_hold(rng):
    for _ in range(3):
        rho, sigma = random_density(2, rng), random_density(2, rng)
        d = relative_entropy(rho, sigma)
        for n in (1, 2, 3, 4):
            for a in np.linspace(0, d, 5)[1:-1]:
                rep = hypothesis_report(rho, sigma, n, a)
                assert rep.alpha_ok and rep.beta_ok
                assert 0 <= rep.s_used <= 1
                assert -1e-10 <= rep.alpha <= 1 + 1e-10


def test_classical_pair_matches_likelihood_ratio(rng):
    for _ in range(5):
        r, q = random_distribution(3, rng), random_distribution(3, rng)
        for n in (1, 2, 3):
            for a in (-0.2, 0.0, 0.15):
                t = pinched_test(np.diag(r), np.diag(q), n, a)
                ra, rb = classical.likelihood_ratio_errors(r, q, n, a)
                assert abs(alpha(kron_power(np.diag(r), n), t) - ra) < 1e-12
                assert abs(beta(kron_power(np.diag(q), n), t) - rb) < 1e-12


def test_per_codeword_test_examples(rng):
    sigma = random_density(2, rng)
    ch = CqChannel.from_states([sigma, sigma])
    assert np.abs(per_codeword_test(ch, None, ("0",), 0.1)).max() < 1e-12
    ch = random_channel(2, 2, rng, rank=1)
    p = random_distribution(2, rng)
    sn = kron_power(mixture_state(ch, p), 2)
    for u in (("0", "1"), ("1", "1")):
        t = per_codeword_test(ch, p, u, -50.0)
        rhobar = pinch(sn, codeword_state(ch, u))
        w, v = np.linalg.eigh(rhobar)
        support = v[:, w > 1e-10] @ v[:, w > 1e-10].conj().T
        assert np.abs(t - support).max() < 1e-9


def test_delta_examples(rng):
    sigma = random_density(2, rng)
    same = CqChannel.from_states([sigma, sigma, sigma])
    assert delta_n(same, None, 2, 0.1) == 1.0
    ch = random_channel(2, 2, rng)
    assert delta_n(ch, None, 2, -50.0) <= 1e-9


def test_delta_classical_oracle(rng):
    for _ in range(3):
        w = np.stack([random_distribution(2, rng) for _ in range(2)])
        p = random_distribution(2, rng)
        ch = CqChannel.from_states([np.diag(row) for row in w])
        for n in (1, 2, 3, 4):
            for a in (-0.3, 0.05, 0.2, 0.6):
                assert abs(delta_n(ch, p, n, a) - classical.information_spectrum(w, p, n, a)) < 1e-12


def test_delta_trend(plus_channel):
    a = 0.5 * mutual_information(plus_channel)
    d1, d6 = delta_n(plus_channel, None, 1, a), delta_n(plus_channel, None, 6, a)
    assert d6 < d1
    assert abs(d1 - 1.0) < 1e-12
