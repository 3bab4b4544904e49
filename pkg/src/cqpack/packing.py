"""Greedy packing of pinched tests into a decoder, with the accompanying bounds.

Given pinched states ``rhobar_x`` (commuting with ``sigma``), the threshold
``c`` and slack parameters ``delta, gamma, eta``:

* candidates are the ``x`` whose test ``P_x = {rhobar_x - c sigma > 0}``
  succeeds with probability at least ``1 - delta - gamma``;
* starting from ``S_0 = 0``, the first remaining candidate with
  ``Tr[rhobar_x S_{k-1}] <= eta`` becomes codeword ``k`` with decoder element
  ``X_k = sqrt(I - S_{k-1}) P_x sqrt(I - S_{k-1})`` and ``S_k = S_{k-1} + X_k``;
* the loop stops when no candidate qualifies.

The resulting code obeys ``gamma/(gamma+delta) min(eta, 1-delta-gamma-2 sqrt(eta)) <= M/c``
and ``Pe <= delta + gamma + 2 sqrt(eta)``; :func:`verify_packing` evaluates both.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._config import check_cells
from .channel import CqChannel, codeword_state, distribution, mixture_state
from .errors import (
    InvariantViolation,
    NegativeEigenvalueError,
    NumericalInconsistencyError,
    ValidationError,
)
from .hyptest import iter_codeword_tests
from .linop import hermitian, is_test, kron_power, matrix_sqrt, proj_pos, tensor_power_decomposition, trace_norm

log = logging.getLogger(__name__)

SLACK = 1e-9


@dataclass(frozen=True)
class PackingParams:
    c: float
    delta: float
    gamma: float
    eta: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError(f"c must be positive, got {self.c}")
        if not self.delta >= 0:
            raise ValidationError(f"delta must be nonnegative, got {self.delta}")
        if not self.gamma > 0:
            raise ValidationError(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.eta < 1:
            raise ValidationError(f"eta must lie in (0, 1), got {self.eta}")

    @property
    def nonvacuous(self) -> bool:
        return self.delta + self.gamma < 1

    @property
    def success_floor(self) -> float:
        """``1 - delta - gamma - 2 sqrt(eta)``."""
        return 1 - self.delta - self.gamma - 2 * math.sqrt(self.eta)

    @property
    def cardinality_lhs(self) -> float:
        return self.gamma / (self.gamma + self.delta) * min(self.eta, self.success_floor)

    @property
    def error_bound(self) -> float:
        return self.delta + self.gamma + 2 * math.sqrt(self.eta)


@dataclass
class Candidate:
    """A symbol with its probability, pinched state and (optionally) unpinched state."""

    symbol: object
    prob: float
    rhobar: np.ndarray
    rho: np.ndarray | None = None


@dataclass
class AuditRecord:
    k: int
    codeword: object
    overlap: float  # Tr[rhobar S_{k-1}] at admission
    pinched_success: float  # Tr[rhobar X_k]
    success: float = math.nan  # Tr[rho X_k]


@dataclass
class Code:
    n: int
    codebook: list
    decoder: list
    S: np.ndarray
    sigma: np.ndarray
    audit: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    candidate_fraction: float = 0.0
    clamp_max: float = 0.0
    warnings: list = field(default_factory=list)

    @property
    def M(self) -> int:
        return len(self.codebook)


def _as_candidates(states) -> list[Candidate]:
    out = []
    for s in states:
        if isinstance(s, Candidate):
            out.append(s)
        else:
            x, rhobar, px = s
            out.append(Candidate(x, float(px), np.asarray(rhobar, dtype=np.complex128)))
    return out


def _tests_for(cands, sigma, params, tests):
    if tests is not None:
        if len(tests) != len(cands):
            raise ValidationError("one test per state is required")
        return [np.asarray(t) for t in tests]
    return [proj_pos(c.rhobar - params.c * sigma) for c in cands]


def _screen(cands, tests, params):
    successes = np.array([np.vdot(t, c.rhobar).real for c, t in zip(cands, tests)])
    keep = [i for i, s in enumerate(successes) if s >= 1 - params.delta - params.gamma]
    return keep, successes


def candidate_set(states, sigma, params: PackingParams, tests=None) -> tuple[list, float]:
    """Symbols whose test succeeds with probability ``>= 1 - delta - gamma``, and their total probability."""
    cands = _as_candidates(states)
    tests = _tests_for(cands, hermitian(sigma), params, tests)
    keep, _ = _screen(cands, tests, params)
    return [cands[i].symbol for i in keep], float(sum(cands[i].prob for i in keep))


def _clamped(x):
    x = (x + x.conj().T) / 2
    w, v = np.linalg.eigh(x)
    excess = max(-w[0], w[-1] - 1, 0.0)
    if excess > 0:
        x = (v * np.clip(w, 0, 1)) @ v.conj().T
        x = (x + x.conj().T) / 2
    return x, excess


def greedy_pack(
    states,
    sigma,
    params: PackingParams,
    tests=None,
    order: str = "lex",
    seed: int | None = None,
    n: int = 1,
) -> Code:
    """Run the greedy construction; ``states`` are :class:`Candidate` or ``(x, rhobar, p)`` tuples.

    ``order="random"`` scans candidates in a permutation drawn from ``seed``
    instead of input order.
    """
    sigma = hermitian(sigma)
    cands = _as_candidates(states)
    tests = _tests_for(cands, sigma, params, tests)
    keep, successes = _screen(cands, tests, params)
    if order == "random":
        keep = [keep[i] for i in np.random.default_rng(seed).permutation(len(keep))]
    elif order != "lex":
        raise ValidationError(f"unknown order {order!r}")

    dim = sigma.shape[0]
    eye = np.eye(dim)
    S = np.zeros((dim, dim), dtype=np.complex128)
    code = Code(n, [], [], S, sigma)
    code.candidates = [cands[i].symbol for i in keep]
    code.candidate_fraction = float(sum(cands[i].prob for i in keep))
    if not keep:
        code.warnings.append("empty candidate set: no codeword passes the success threshold")
        return code

    stack = np.stack([cands[i].rhobar for i in keep])
    remaining = np.ones(len(keep), dtype=bool)
    while True:
        overlaps = _kernels.trace_products(stack, S)
        qualified = np.flatnonzero(remaining & (overlaps <= params.eta))
        if qualified.size == 0:
            break
        j = qualified[0]
        i = keep[j]
        try:
            root = matrix_sqrt(eye - S)
        except NegativeEigenvalueError as exc:
            raise InvariantViolation(f"I - S_{code.M} is not PSD: {exc}", audit=code.audit) from exc
        x, excess = _clamped(root @ tests[i] @ root)
        if excess > 0:
            log.debug("clamped X_%d eigenvalues by %.3e", code.M + 1, excess)
            code.clamp_max = max(code.clamp_max, excess)
        code.audit.append(
            AuditRecord(code.M + 1, cands[i].symbol, float(overlaps[j]), float(np.vdot(x, cands[i].rhobar).real))
        )
        code.codebook.append(cands[i].symbol)
        code.decoder.append(x)
        S = S + x
        remaining[j] = False

    code.S = S
    overlaps = _kernels.trace_products(stack, S)
    if np.any(remaining & (overlaps <= params.eta)):
        raise InvariantViolation("a remaining candidate still qualifies after termination", audit=code.audit)
    problems = decoder_problems(code)
    if problems:
        raise InvariantViolation("; ".join(problems), audit=code.audit)
    return code


def decoder_problems(code: Code, tol: float = SLACK) -> list[str]:
    """Violations of ``X_k >= 0``, ``sum X_k <= I``, ``S = sum X_k`` and commutation with sigma."""
    problems = []
    dim = code.sigma.shape[0]
    total = np.zeros((dim, dim), dtype=np.complex128)
    for k, x in enumerate(code.decoder, 1):
        w = np.linalg.eigvalsh((x + x.conj().T) / 2)
        if w[0] < -tol:
            problems.append(f"X_{k} has eigenvalue {w[0]:.3e}")
        comm = np.abs(x @ code.sigma - code.sigma @ x).max()
        if comm > 1e-8:
            problems.append(f"X_{k} fails to commute with sigma ({comm:.3e})")
        total += x
    if code.decoder:
        if np.abs(total - code.S).max() > 1e-10:
            problems.append("S differs from the sum of decoder elements")
        w = np.linalg.eigvalsh((total + total.conj().T) / 2)
        if w[-1] > 1 + tol or w[0] < -tol:
            problems.append(f"sum of decoder elements has spectrum [{w[0]:.3e}, {w[-1]:.3e}]")
    return problems


def evaluate_code(ch: CqChannel, code: Code) -> float:
    """Average error ``(1/M) sum_k (1 - Tr[rho_{u_k} X_k])`` on the unpinched codeword states.

    Fills ``success`` in the audit trail and checks it against the pinched
    value recorded during construction.
    """
    if code.M == 0:
        raise ValidationError("cannot evaluate an empty code")
    errors = []
    for k, (u, x) in enumerate(zip(code.codebook, code.decoder)):
        word = u if isinstance(u, tuple) else (u,)
        success = float(np.vdot(x, codeword_state(ch, word)).real)
        if k < len(code.audit):
            rec = code.audit[k]
            if abs(rec.pinched_success - success) > SLACK:
                raise NumericalInconsistencyError(
                    f"codeword {k + 1}: Tr[rho X] = {success!r} but Tr[rhobar X] = {rec.pinched_success!r}"
                )
            rec.success = success
        errors.append(1 - success)
    return float(np.mean(errors))


@dataclass(frozen=True)
class PackingReport:
    M: int
    rate: float
    pe: float
    bound3_lhs: float
    bound3_rhs: float
    bound4_rhs: float
    candidate_fraction: float
    satisfied: tuple
    trace_sigma_S: float
    per_codeword_min: float
    per_codeword_ok: bool
    sandwich_ok: bool
    decoder_ok: bool
    vacuous: bool
    n: int = 1
    a: float = math.nan
    delta: float = math.nan
    gamma: float = math.nan
    eta: float = math.nan

    @property
    def all_ok(self) -> bool:
        return all(self.satisfied) and self.per_codeword_ok and self.sandwich_ok and self.decoder_ok


def verify_packing(code: Code, params: PackingParams, pe: float | None = None, **context) -> PackingReport:
    """Evaluate both cardinality and error bounds, the ``Tr[sigma S_M]`` sandwich and per-codeword success.

    ``pe`` defaults to the mean of the audited success values.  An empty code
    has no error probability and its error bound is reported as satisfied.
    The report is marked vacuous for an empty code or when
    ``delta + gamma >= 1``.
    """
    M = code.M
    lhs = params.cardinality_lhs
    rhs3 = M / params.c
    rhs4 = params.error_bound
    successes = [r.success if not math.isnan(r.success) else r.pinched_success for r in code.audit]
    if pe is None:
        pe = float(np.mean([1 - s for s in successes])) if successes else math.nan
    vacuous = M == 0 or not params.nonvacuous
    ok4 = True if M == 0 else pe <= rhs4 + SLACK
    tr_sigma_s = float(np.vdot(code.sigma, code.S).real)
    sandwich_ok = lhs <= tr_sigma_s + SLACK and tr_sigma_s <= rhs3 + SLACK
    per_min = min(successes) if successes else math.nan
    per_ok = M == 0 or per_min >= params.success_floor - SLACK
    return PackingReport(
        M=M,
        rate=math.log(M) / code.n if M else -math.inf,
        pe=pe,
        bound3_lhs=lhs,
        bound3_rhs=rhs3,
        bound4_rhs=rhs4,
        candidate_fraction=code.candidate_fraction,
        satisfied=(lhs <= rhs3 + SLACK, ok4),
        trace_sigma_S=tr_sigma_s,
        per_codeword_min=per_min,
        per_codeword_ok=per_ok,
        sandwich_ok=sandwich_ok,
        decoder_ok=not decoder_problems(code),
        vacuous=vacuous,
        n=code.n,
        delta=params.delta,
        gamma=params.gamma,
        eta=params.eta,
        **context,
    )


def gentle_check(rho, x) -> tuple[float, float]:
    """``(||rho - sqrt(X) rho sqrt(X)||_1, 2 sqrt(Tr[rho (I - X)]))``."""
    rho = hermitian(rho)
    x = hermitian(x)
    if not is_test(x):
        raise ValidationError("X must satisfy 0 <= X <= I")
    root = matrix_sqrt(x)
    lhs = trace_norm(rho - root @ rho @ root)
    rhs = 2 * math.sqrt(max(np.trace(rho).real - np.vdot(x, rho).real, 0.0))
    return lhs, rhs


def auto_gamma(delta: float) -> float:
    """``max(sqrt(delta), 1e-3)``, reduced to ``(1 - delta)/2`` when that would reach ``delta + gamma >= 1``."""
    gamma = max(math.sqrt(delta), 1e-3)
    if delta < 1 and delta + gamma >= 1:
        gamma = (1 - delta) / 2
    return gamma


def build_block_code(
    ch: CqChannel,
    p,
    n: int,
    a: float,
    gamma: float | str = "auto",
    lam: float = 1.0,
    order: str = "lex",
    seed: int | None = None,
) -> tuple[Code, PackingReport]:
    """Greedy code for the ``n``-th extension with ``c = e^{na}``, ``delta = delta_n(a)``, ``eta = e^{-n lam}``.

    Work happens in an eigenbasis of ``sigma^{(x)n}``, where every pinched
    state, test and decoder element is block diagonal; the returned decoder
    is expressed in the computational basis.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not lam > 0:
        raise ValidationError("lambda must be positive")
    p = distribution(ch, p)
    sigma = mixture_state(ch, p)
    frame = tensor_power_decomposition(sigma, n)
    dim = frame.dim
    check_cells(3 * ch.size**n * dim * dim)

    blocks = list(iter_codeword_tests(ch, p, n, a, frame))
    delta = sum(b.prob * (np.trace(b.rhobar_t).real - b.success) for b in blocks if b.prob > 0)
    delta = float(min(max(delta, 0.0), 1.0))
    gamma = auto_gamma(delta) if gamma == "auto" else float(gamma)
    params = PackingParams(c=math.exp(min(n * a, 709.0)), delta=delta, gamma=gamma, eta=math.exp(-n * lam))

    sigma_t = np.diag(np.repeat(frame.eigenvalues, frame.multiplicities)).astype(np.complex128)
    if not params.nonvacuous:
        # threshold 1 - delta - gamma <= 0 admits every codeword with no guarantee; skip packing
        code = Code(n, [], [], np.zeros_like(sigma_t), sigma_t)
        code.warnings.append("delta + gamma >= 1: the packing guarantee is vacuous, no code built")
    else:
        cands = [Candidate(b.codeword, b.prob, b.rhobar_t, b.rho_t) for b in blocks]
        code = greedy_pack(cands, sigma_t, params, tests=[b.test_t for b in blocks], order=order, seed=seed, n=n)

    def back(m):
        out = frame.from_basis(m)
        return (out + out.conj().T) / 2

    code.decoder = [back(x) for x in code.decoder]
    code.S = back(code.S)
    code.sigma = kron_power(sigma, n)
    pe = evaluate_code(ch, code) if code.M else math.nan
    return code, verify_packing(code, params, pe=pe, a=float(a))


def audit_lines(code: Code, **extra) -> list[str]:
    """One JSON object per admitted codeword."""
    lines = []
    for r in code.audit:
        word = r.codeword if isinstance(r.codeword, tuple) else (r.codeword,)
        rec = dict(extra)
        rec.update(
            k=r.k,
            codeword=" ".join(map(str, word)),
            overlap=float(f"{r.overlap:.12g}"),
            success=float(f"{(r.success if not math.isnan(r.success) else r.pinched_success):.12g}"),
        )
        lines.append(json.dumps(rec, sort_keys=False))
    return lines
