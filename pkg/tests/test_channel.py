import json
from pathlib import Path

import numpy as np
import pytest

from cqpack import (
    CqChannel,
    ResourceLimitError,
    ValidationError,
    codeword_state,
    direct_sum,
    kron,
    lift,
    load_channel,
    mixture_state,
    pinch,
    product_distribution,
    tensor_power_decomposition,
)
from cqpack._config import limits_override
from cqpack.channel import channel_from_dict, channel_to_dict, distribution
from cqpack.sampling import random_channel, random_distribution

ROOT = Path(__file__).resolve().parents[1]


def test_mixture_examples(noiseless, plus_channel):
    assert np.abs(mixture_state(noiseless) - np.eye(2) / 2).max() < 1e-15
    assert np.abs(mixture_state(noiseless, [0, 1]) - noiseless.states[1]).max() == 0
    expected = np.array([[0.75, 0.25], [0.25, 0.25]])
    assert np.abs(mixture_state(plus_channel) - expected).max() < 1e-15


def test_mixture_is_affine(rng):
    ch = random_channel(3, 2, rng)
    p, q = random_distribution(3, rng), random_distribution(3, rng)
    t = 0.3
    lhs = mixture_state(ch, t * p + (1 - t) * q)
    rhs = t * mixture_state(ch, p) + (1 - t) * mixture_state(ch, q)
    assert np.abs(lhs - rhs).max() < 1e-14


def test_codeword_state_examples():
    half = np.full((2, 2), 0.5)
    ch = CqChannel.from_states([np.diag([1.0, 0.0]), half])
    assert np.abs(codeword_state(ch, ("1",)) - half).max() == 0
    assert np.abs(codeword_state(ch, ("0", "0")) - np.diag([1, 0, 0, 0])).max() == 0
    expected = np.zeros((4, 4))
    expected[:2, :2] = half
    assert np.abs(codeword_state(ch, ("0", "1")) - expected).max() == 0


def test_codeword_state_concatenates(rng):
    ch = random_channel(3, 2, rng)
    u, v = ("0", "2"), ("1",)
    lhs = codeword_state(ch, u + v)
    assert np.abs(lhs - kron(codeword_state(ch, u), codeword_state(ch, v))).max() < 1e-12


def test_codeword_state_limit():
    ch = CqChannel.from_states([np.eye(2) / 2])
    with limits_override(max_dim=8):
        with pytest.raises(ResourceLimitError):
            codeword_state(ch, ("0",) * 4)


def test_product_distribution():
    assert [pr for _, pr in product_distribution([0.3, 0.7], 1)] == [0.3, 0.7]
    words = list(product_distribution([0.5, 0.5], 3))
    assert len(words) == 8 and all(pr == 0.125 for _, pr in words)
    assert words[1][0] == ("0", "0", "1")
    probs = np.array([pr for _, pr in product_distribution([0.3, 0.7], 2)])
    assert np.abs(probs - [0.09, 0.21, 0.21, 0.49]).max() < 1e-15
    total = sum(pr for _, pr in product_distribution({"a": 0.2, "b": 0.5, "c": 0.3}, 4))
    assert abs(total - 1) < 1e-9


def test_product_distribution_limit():
    with limits_override(max_enum=100):
        with pytest.raises(ResourceLimitError):
            list(product_distribution([0.5, 0.5], 7))


def test_lift_examples(noiseless, rng):
    single = CqChannel.from_states([np.diag([0.6, 0.4])])
    rh, sh = lift(single).dense()
    assert np.abs(rh - single.states[0]).max() == 0 and np.abs(sh - single.states[0]).max() == 0
    rh, sh = lift(noiseless).dense()
    assert np.abs(rh - np.diag([0.5, 0, 0, 0.5])).max() == 0
    assert np.abs(sh - np.eye(4) / 4).max() == 0
    ch = random_channel(3, 2, rng)
    pair = lift(ch, [0.5, 0.0, 0.5])
    assert np.abs(pair.rho_blocks[1]).max() == 0 and np.abs(pair.sigma_blocks[1]).max() == 0
    rh, sh = pair.dense()
    assert abs(np.trace(rh) - 1) < 1e-14 and abs(np.trace(sh) - 1) < 1e-14


def test_extended_pinching_dense(rng):
    for _ in range(3):
        ch = random_channel(2, 2, rng)
        p = random_distribution(2, rng)
        sigma = mixture_state(ch, p)
        for n in (1, 2):
            rn, sn = lift(ch, p).power_dense(n)
            frame = tensor_power_decomposition(sigma, n)
            rhs = direct_sum([pr * frame.pinch(codeword_state(ch, u)) for u, pr in product_distribution(p, n)])
            assert np.abs(pinch(sn, rn) - rhs).max() < 1e-9


def test_distribution_validation(noiseless):
    assert np.abs(distribution(noiseless, {"1": 1.0}) - [0, 1]).max() == 0
    for bad in ([0.5, 0.6], [1.5, -0.5], [1.0], {"z": 1.0}):
        with pytest.raises(ValidationError):
            distribution(noiseless, bad)


def test_channel_validation_names_symbol():
    with pytest.raises(ValidationError, match="'b'"):
        CqChannel(("a", "b"), (np.eye(2) / 2, np.diag([0.7, 0.7])))
    with pytest.raises(ValidationError, match=r"\(0, 1\)"):
        CqChannel(("a",), (np.array([[0.5, 0.1], [0.0, 0.5]]),))
    with pytest.raises(ValidationError):
        CqChannel((), ())
    with pytest.raises(ValidationError):
        CqChannel(("a", "b"), (np.eye(2) / 2, np.eye(3) / 3))


def test_channel_files_load():
    ch, p = load_channel(ROOT / "channels" / "qubit_pair.yaml")
    assert ch.alphabet == ("0", "+")
    assert np.abs(ch.state("+") - np.full((2, 2), 0.5)).max() == 0
    assert np.abs(p - 0.5).max() == 0
    for name in ("bsc01.yaml", "noiseless.yaml", "identical.yaml"):
        load_channel(ROOT / "channels" / name)


def test_channel_roundtrip_json(tmp_path, rng):
    ch = random_channel(3, 2, rng)
    p = random_distribution(3, rng)
    path = tmp_path / "ch.json"
    path.write_text(json.dumps(channel_to_dict(ch, p)))
    back, q = load_channel(path)
    assert back.alphabet == ch.alphabet
    assert max(np.abs(a - b).max() for a, b in zip(back.states, ch.states)) < 1e-15
    assert np.abs(q - p).max() < 1e-15


def test_channel_file_errors(tmp_path):
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with pytest.raises(ValidationError, match="empty"):
        load_channel(empty)
    broken = tmp_path / "broken.yaml"
    broken.write_text("dim: 2\nalphabet: [a\n")
    with pytest.raises(ValidationError, match="line"):
        load_channel(broken)
    with pytest.raises(ValidationError):
        load_channel(tmp_path / "missing.yaml")
    base = {"dim": 1, "alphabet": ["a"], "states": {"a": [[[1, 0]]]}}
    channel_from_dict(base)
    with pytest.raises(ValidationError, match=r"entry \(0, 0\)"):
        channel_from_dict({**base, "states": {"a": [["x"]]}})
    with pytest.raises(ValidationError, match="missing field"):
        channel_from_dict({"dim": 1, "alphabet": ["a"]})
    with pytest.raises(ValidationError, match="p:"):
        channel_from_dict({**base, "p": {"a": 0.5}})
