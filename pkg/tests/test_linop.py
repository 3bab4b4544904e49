import numpy as np
import pytest

from cqpack import (
    NegativeEigenvalueError,
    ResourceLimitError,
    ValidationError,
    direct_sum,
    hs_inner,
    kron,
    kron_power,
    matrix_sqrt,
    pinch,
    proj_pos,
    spectral_decompose,
    tensor_power_decomposition,
    trace_norm,
)
from cqpack._config import limits_override
from cqpack.linop import density, hermitian, is_projector, is_test, support_power
from cqpack.sampling import random_density, random_hermitian, random_projector

X = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_spectral_diag_degenerate():
    dec = spectral_decompose(np.diag([1.0, 1.0, 2.0]))
    assert np.abs(dec.eigenvalues - [2.0, 1.0]).max() < 1e-12
    assert np.abs(dec.projectors[0] - np.diag([0, 0, 1])).max() < 1e-12
    assert np.abs(dec.projectors[1] - np.diag([1, 1, 0])).max() < 1e-12


@pytest.mark.parametrize("d", [1, 3, 7])
def test_spectral_identity(d):
    dec = spectral_decompose(np.eye(d))
    assert dec.v == 1
    assert np.abs(dec.projectors[0] - np.eye(d)).max() < 1e-12


def test_spectral_pauli_x():
    dec = spectral_decompose(X)
    assert np.abs(dec.eigenvalues - [1, -1]).max() < 1e-12
    assert np.abs(dec.projectors[0] - 0.5 * np.array([[1, 1], [1, 1]])).max() < 1e-12
    assert np.abs(dec.projectors[1] - 0.5 * np.array([[1, -1], [-1, 1]])).max() < 1e-12


def test_spectral_invariants(rng):
    for d in (1, 2, 5, 16, 64):
        h = random_hermitian(d, rng)
        dec = spectral_decompose(h)
        assert np.abs(dec.reconstruct() - h).max() < 1e-9
        assert np.abs(sum(dec.projectors) - np.eye(d)).max() < 1e-9
        for i, e in enumerate(dec.projectors):
            for j, f in enumerate(dec.projectors):
                assert np.abs(e @ f - (e if i == j else 0)).max() < 1e-9
        assert np.all(np.diff(dec.eigenvalues) < 0)


def test_spectral_clusters_near_degenerate():
    dec = spectral_decompose(np.diag([1.0, 1.0 + 1e-12, 3.0]))
    assert dec.v == 2
    assert list(dec.multiplicities) == [1, 2]


def test_tensor_power_frame_matches_direct(rng):
    sigma = random_density(2, rng)
    sigma = (sigma + np.diag([0.1, 0.1])) / 1.2
    for n in (1, 2, 3):
        frame = tensor_power_decomposition(sigma, n)
        sn = kron_power(sigma, n)
        assert np.abs(frame.reconstruct() - sn).max() < 1e-12
        direct = spectral_decompose(sn)
        assert frame.v == direct.v
        assert np.abs(frame.eigenvalues - direct.eigenvalues).max() < 1e-12
        b = random_hermitian(2**n, rng)
        assert np.abs(frame.pinch(b) - direct.pinch(b)).max() < 1e-10


def test_proj_pos_examples():
    assert np.abs(proj_pos(np.diag([2.0, -1.0])) - np.diag([1, 0])).max() < 1e-12
    assert np.abs(proj_pos(np.zeros((3, 3)))).max() == 0
    assert np.abs(proj_pos(X) - 0.5 * np.ones((2, 2))).max() < 1e-12


def test_proj_pos_treats_tiny_as_zero():
    assert np.abs(proj_pos(np.diag([1e-11, 1.0])) - np.diag([0, 1])).max() < 1e-12


def test_proj_pos_maximizes(rng):
    for _ in range(20):
        d = int(rng.integers(2, 6))
        h = random_hermitian(d, rng)
        p = proj_pos(h)
        assert is_projector(p)
        best = np.vdot(p, h).real
        assert best >= 0
        for r in range(d + 1):
            q = random_projector(d, r, rng)
            assert np.vdot(q, h).real <= best + 1e-9


def test_pinch_examples():
    b = random_hermitian(3, np.random.default_rng(1))
    assert np.abs(pinch(np.eye(3), b) - b).max() < 1e-12
    assert np.abs(pinch(np.diag([1.0, 2.0]), np.ones((2, 2))) - np.eye(2)).max() < 1e-12
    assert np.abs(pinch(X, np.diag([1.0, 0.0])) - np.eye(2) / 2).max() < 1e-12


def test_pinch_properties(rng):
    for _ in range(20):
        a, b = random_hermitian(4, rng), random_hermitian(4, rng)
        pb = pinch(a, b)
        assert np.abs(pb @ a - a @ pb).max() < 1e-9
        assert abs(np.trace(pb) - np.trace(b)) < 1e-10
        assert np.abs(pinch(a, pb) - pb).max() < 1e-9


def test_pinch_dimension_mismatch():
    with pytest.raises(ValidationError):
        pinch(np.eye(2), np.eye(3))


def test_hs_inner():
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    assert hs_inner(np.diag([1, 0]), np.diag([0, 1])) == 0
    e01 = np.array([[0, 1], [0, 0]])
    assert hs_inner(e01, e01) == 1
    a = np.array([[0, 1j], [2, 0]])
    assert hs_inner(a, e01) == np.conj(hs_inner(e01, a))


def test_kron_examples():
    assert np.abs(kron(np.eye(2), np.eye(2)) - np.eye(4)).max() == 0
    assert np.abs(kron(np.diag([1, 0]), np.diag([0, 1])) - np.diag([0, 1, 0, 0])).max() == 0
    assert np.abs(kron_power(X, 2) - np.fliplr(np.eye(4))).max() == 0
    assert np.abs(kron_power(X, 1) - X).max() == 0


def test_kron_power_guard():
    with limits_override(max_dim=16):
        kron_power(np.eye(2), 4)
        with pytest.raises(ResourceLimitError):
            kron_power(np.eye(2), 5)


def test_direct_sum_examples():
    assert np.abs(direct_sum([np.diag([1.0]), np.diag([2.0])]) - np.diag([1, 2])).max() == 0
    a = np.array([[1, 2], [3, 4]])
    assert np.abs(direct_sum([a]) - a).max() == 0
    out = direct_sum([0.3 * np.eye(2) / 2, 0.7 * np.eye(2) / 2])
    assert np.abs(out - np.diag([0.15, 0.15, 0.35, 0.35])).max() < 1e-15
    with pytest.raises(ValidationError):
        direct_sum([])


def test_direct_sum_spectrum(rng):
    blocks = [random_hermitian(k, rng) for k in (1, 2, 3)]
    w = np.linalg.eigvalsh(direct_sum(blocks))
    expected = np.sort(np.concatenate([np.linalg.eigvalsh(b) for b in blocks]))
    assert np.abs(w - expected).max() < 1e-12


def test_trace_norm_and_sqrt():
    assert abs(trace_norm(np.diag([1.0, -1.0])) - 2) < 1e-12
    assert trace_norm(np.zeros((2, 2))) == 0
    assert np.abs(matrix_sqrt(np.eye(3)) - np.eye(3)).max() < 1e-12
    assert np.abs(matrix_sqrt(np.diag([4.0, 9.0])) - np.diag([2, 3])).max() < 1e-12
    with pytest.raises(NegativeEigenvalueError):
        matrix_sqrt(np.diag([1.0, -1e-3]))


def test_matrix_sqrt_squares_back(rng):
    for d in (2, 5, 8):
        h = random_density(d, rng)
        r = matrix_sqrt(h)
        assert np.abs(r @ r - h).max() < 1e-8


def test_support_power_annihilates_kernel():
    h = np.diag([0.25, 0.0])
    assert np.abs(support_power(h, -0.5) - np.diag([2.0, 0.0])).max() < 1e-12


def test_validation():
    with pytest.raises(ValidationError):
        hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        hermitian(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        density(np.diag([0.5, 0.6]))
    with pytest.raises(ValidationError):
        density(np.diag([1.2, -0.2]))
    assert is_test(np.diag([0.0, 0.5, 1.0]))
    assert not is_test(np.diag([1.1, 0.0]))
    # roundoff asymmetry is absorbed
    a = np.array([[1.0, 0.5 + 1e-13], [0.5, 1.0]])
    assert np.abs(hermitian(a) - hermitian(a).conj().T).max() == 0
