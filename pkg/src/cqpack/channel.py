"""Classical-quantum channels, product extensions and the block-diagonal lifted pair.

A channel file is YAML or JSON::

    dim: 2
    alphabet: ["0", "1"]
    states:
      "0": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
      "1": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]
    p: {"0": 0.5, "1": 0.5}      # optional

Each matrix entry is a ``[re, im]`` pair; a bare number is read as real.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np
import yaml

from ._config import TAU_HERM, check_dim, check_enum
from .errors import ValidationError
from .linop import direct_sum, kron_power

Codeword = tuple


@dataclass(frozen=True, eq=False)
class CqChannel:
    """Finite alphabet mapped to density operators of a common dimension."""

    alphabet: tuple
    states: tuple

    def __post_init__(self):
        alphabet = tuple(str(x) for x in self.alphabet)
        if not alphabet:
            raise ValidationError("alphabet is empty")
        if len(set(alphabet)) != len(alphabet):
            raise ValidationError("alphabet has repeated symbols")
        if len(self.states) != len(alphabet):
            raise ValidationError(f"{len(alphabet)} symbols but {len(self.states)} states")
        states = []
        dim = None
        for x, rho in zip(alphabet, self.states):
            rho = _validate_state(x, rho)
            if dim is None:
                dim = rho.shape[0]
            elif rho.shape[0] != dim:
                raise ValidationError(f"state {x!r} has dimension {rho.shape[0]}, expected {dim}")
            rho.setflags(write=False)
            states.append(rho)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", tuple(states))

    @classmethod
    def from_states(cls, states: Mapping | Sequence) -> "CqChannel":
        """Build from ``{symbol: matrix}`` or a list of matrices (symbols ``"0"``, ``"1"``, ...)."""
        if isinstance(states, Mapping):
            return cls(tuple(states.keys()), tuple(states.values()))
        return cls(tuple(str(i) for i in range(len(states))), tuple(states))

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def index(self, symbol) -> int:
        try:
            return self.alphabet.index(str(symbol))
        except ValueError:
            raise ValidationError(f"symbol {symbol!r} not in alphabet {self.alphabet}") from None

    def state(self, symbol) -> np.ndarray:
        return self.states[self.index(symbol)]


def _validate_state(x, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise ValidationError(f"state {x!r}: expected a square matrix, got shape {rho.shape}")
    skew = np.abs(rho - rho.conj().T)
    if skew.max() > TAU_HERM:
        i, j = np.unravel_index(np.argmax(skew), skew.shape)
        raise ValidationError(f"state {x!r}: not Hermitian at entry ({i}, {j})")
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if abs(tr - 1) > TAU_HERM:
        raise ValidationError(f"state {x!r}: trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -TAU_HERM:
        raise ValidationError(f"state {x!r}: negative eigenvalue {lo:.3e}")
    return rho


def distribution(ch: CqChannel, p=None) -> np.ndarray:
    """Input distribution as an array aligned with ``ch.alphabet``.

    ``p`` may be ``None`` (uniform), a mapping from symbols, or a sequence.
    """
    if p is None:
        return np.full(ch.size, 1.0 / ch.size)
    if isinstance(p, Mapping):
        unknown = set(map(str, p)) - set(ch.alphabet)
        if unknown:
            raise ValidationError(f"distribution has symbols outside the alphabet: {sorted(unknown)}")
        arr = np.array([float(p.get(x, p.get(_maybe_int(x), 0.0))) for x in ch.alphabet])
    else:
        arr = np.asarray(p, dtype=float).ravel()
        if arr.shape[0] != ch.size:
            raise ValidationError(f"distribution has {arr.shape[0]} entries, alphabet has {ch.size}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValidationError("distribution has negative or non-finite entries")
    if abs(arr.sum() - 1) > 1e-12:
        raise ValidationError(f"distribution sums to {arr.sum()!r}")
    return arr


def _maybe_int(x: str):
    try:
        return int(x)
    except ValueError:
        return x


def mixture_state(ch: CqChannel, p=None) -> np.ndarray:
    """``sum_x p(x) rho_x``."""
    p = distribution(ch, p)
    return np.tensordot(p, np.stack(ch.states), axes=1)


def codeword_state(ch: CqChannel, u: Sequence) -> np.ndarray:
    """``rho_{x_1} (x) ... (x) rho_{x_n}``."""
    if len(u) < 1:
        raise ValidationError("codeword must have length >= 1")
    check_dim(ch.dim ** len(u), "codeword state")
    return reduce(np.kron, [ch.state(x) for x in u])


def product_distribution(p, n: int, alphabet: Sequence | None = None) -> Iterator[tuple]:
    """Yield ``(codeword, prob)`` for all ``|X|^n`` codewords in lexicographic order.

    ``p`` is an array aligned with ``alphabet`` (default ``"0"``, ``"1"``, ...)
    or a mapping from symbols to probabilities.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if isinstance(p, Mapping):
        alphabet = tuple(p.keys()) if alphabet is None else tuple(alphabet)
        probs = np.array([float(p[x]) for x in alphabet])
    else:
        probs = np.asarray(p, dtype=float)
        alphabet = tuple(str(i) for i in range(len(probs))) if alphabet is None else tuple(alphabet)
    check_enum(len(alphabet) ** n)
    for idx in itertools.product(range(len(alphabet)), repeat=n):
        yield tuple(alphabet[i] for i in idx), math.prod(probs[i] for i in idx)


@dataclass(frozen=True, eq=False)
class LiftedStatePair:
    """Block-diagonal ``rho_hat = (+)_x p(x) rho_x`` and ``sigma_hat = (+)_x p(x) sigma``.

    Held blockwise; :meth:`dense` materializes the full matrices.
    """

    rho_blocks: tuple
    sigma_blocks: tuple
    block_index: tuple

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return direct_sum(self.rho_blocks), direct_sum(self.sigma_blocks)

    def power_dense(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``rho_hat^{(x)n}``, ``sigma_hat^{(x)n}`` reordered into codeword blocks.

        The raw Kronecker power indexes the lifted space as
        ``(x_1, i_1, ..., x_n, i_n)``; the result is permuted to
        ``(x_1, ..., x_n, i_1, ..., i_n)`` so that block ``x^n`` (lexicographic)
        is contiguous, matching ``(+)_{x^n} p^n(x^n) rho_{x^n}``.
        """
        rho, sigma = self.dense()
        k = len(self.block_index)
        d = self.rho_blocks[0].shape[0]
        check_dim((k * d) ** n, "lifted tensor power")
        perm = _regroup_permutation(k, d, n)
        rn = kron_power(rho, n)[np.ix_(perm, perm)]
        sn = kron_power(sigma, n)[np.ix_(perm, perm)]
        return rn, sn


def _regroup_permutation(k: int, d: int, n: int) -> np.ndarray:
    # index in (x1, i1, ..., xn, in) order for each position in (x1..xn, i1..in) order
    shape = [k, d] * n
    idx = np.arange((k * d) ** n).reshape(shape)
    axes = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return idx.transpose(axes).ravel()


def lift(ch: CqChannel, p=None) -> LiftedStatePair:
    p = distribution(ch, p)
    sigma = mixture_state(ch, p)
    rho_blocks = tuple(px * rho for px, rho in zip(p, ch.states))
    sigma_blocks = tuple(px * sigma for px in p)
    return LiftedStatePair(rho_blocks, sigma_blocks, ch.alphabet)


# ------------------------------------------------------------------ file I/O

def _parse_matrix(x, raw, dim, source):
    if not isinstance(raw, list) or len(raw) != dim:
        raise ValidationError(f"{source}: state {x!r} must have {dim} rows")
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise ValidationError(f"{source}: state {x!r} row {i} must have {dim} entries")
        for j, entry in enumerate(row):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                out[i, j] = entry
            elif (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            ):
                out[i, j] = complex(entry[0], entry[1])
            else:
                raise ValidationError(
                    f"{source}: state {x!r} entry ({i}, {j}) must be [re, im], got {entry!r}"
                )
    return out


def channel_from_dict(data, source: str = "<channel>") -> tuple[CqChannel, np.ndarray | None]:
    """Parse the channel-file structure; returns the channel and the optional distribution."""
    if not isinstance(data, Mapping):
        raise ValidationError(f"{source}: expected a mapping with dim, alphabet, states")
    for key in ("dim", "alphabet", "states"):
        if key not in data:
            raise ValidationError(f"{source}: missing field {key!r}")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError(f"{source}: dim must be a positive integer")
    alphabet = data["alphabet"]
    if not isinstance(alphabet, list) or not alphabet:
        raise ValidationError(f"{source}: alphabet must be a nonempty list")
    alphabet = [str(a) for a in alphabet]
    states_raw = data["states"]
    if not isinstance(states_raw, Mapping):
        raise ValidationError(f"{source}: states must map symbols to matrices")
    states_raw = {str(k): v for k, v in states_raw.items()}
    missing = [x for x in alphabet if x not in states_raw]
    if missing:
        raise ValidationError(f"{source}: no state given for symbols {missing}")
    extra = sorted(set(states_raw) - set(alphabet))
    if extra:
        raise ValidationError(f"{source}: states for unknown symbols {extra}")
    mats = [_parse_matrix(x, states_raw[x], dim, source) for x in alphabet]
    try:
        ch = CqChannel(tuple(alphabet), tuple(mats))
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None
    p = None
    if data.get("p") is not None:
        raw_p = data["p"]
        if isinstance(raw_p, Mapping):
            raw_p = {str(k): v for k, v in raw_p.items()}
        try:
            p = distribution(ch, raw_p)
        except (ValidationError, TypeError, ValueError) as exc:
            raise ValidationError(f"{source}: p: {exc}") from None
    return ch, p


def load_channel(path) -> tuple[CqChannel, np.ndarray | None]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ValidationError(f"{path}: parse error{where}: {getattr(exc, 'problem', exc)}") from None
    if data is None:
        raise ValidationError(f"{path}: file is empty")
    return channel_from_dict(data, str(path))


def channel_to_dict(ch: CqChannel, p=None) -> dict:
    out = {
        "dim": ch.dim,
        "alphabet": list(ch.alphabet),
        "states": {
            x: [[[float(z.real), float(z.imag)] for z in row] for row in rho]
            for x, rho in zip(ch.alphabet, ch.states)
        },
    }
    if p is not None:
        out["p"] = {x: float(v) for x, v in zip(ch.alphabet, distribution(ch, p))}
    return out
