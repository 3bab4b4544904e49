"""Tolerances, resource limits and backend selection.

Resource limits can be raised through the environment::

    CQPACK_MAX_DIM      largest operator dimension (default 4096)
    CQPACK_MAX_ENUM     largest codeword enumeration (default 1000000)
    CQPACK_MAX_CELLS    largest number of stored complex matrix entries
                        when every codeword state is held in memory
                        (default 50000000)
    CQPACK_ALLOW_LARGE  must be set to 1 for values above the defaults

``CQPACK_NUMBA=0`` selects the pure numpy kernels.
"""
from __future__ import annotations

import contextlib
import dataclasses
import os

from .errors import ResourceLimitError, ValidationError

TAU_HERM = 1e-10
TAU_ZERO = 1e-10
CLUSTER_REL = 1e-8

DEFAULT_MAX_DIM = 4096
DEFAULT_MAX_ENUM = 10**6
DEFAULT_MAX_CELLS = 5 * 10**7


@dataclasses.dataclass(frozen=True)
class Limits:
    max_dim: int = DEFAULT_MAX_DIM
    max_enum: int = DEFAULT_MAX_ENUM
    max_cells: int = DEFAULT_MAX_CELLS


def _check_override(limits: Limits, allow_large: bool) -> Limits:
    defaults = Limits()
    for field in dataclasses.fields(Limits):
        value = getattr(limits, field.name)
        if value < 1:
            raise ValidationError(f"{field.name} must be positive, got {value}")
        if value > getattr(defaults, field.name) and not allow_large:
            raise ValidationError(
                f"{field.name}={value} exceeds the default "
                f"{getattr(defaults, field.name)}; acknowledge with "
                "CQPACK_ALLOW_LARGE=1 or --allow-large"
            )
    return limits


def _limits_from_env() -> Limits:
    def read(name: str, default: int) -> int:
        raw = os.environ.get(name)
        if raw is None or raw == "":
            return default
        try:
            return int(float(raw))
        except ValueError:
            raise ValidationError(f"{name} must be an integer, got {raw!r}") from None

    limits = Limits(
        max_dim=read("CQPACK_MAX_DIM", DEFAULT_MAX_DIM),
        max_enum=read("CQPACK_MAX_ENUM", DEFAULT_MAX_ENUM),
        max_cells=read("CQPACK_MAX_CELLS", DEFAULT_MAX_CELLS),
    )
    return _check_override(limits, os.environ.get("CQPACK_ALLOW_LARGE") == "1")


_limits: Limits | None = None


def get_limits() -> Limits:
    global _limits
    if _limits is None:
        _limits = _limits_from_env()
    return _limits


def set_limits(limits: Limits, allow_large: bool = False) -> None:
    global _limits
    _limits = _check_override(limits, allow_large)


@contextlib.contextmanager
def limits_override(allow_large: bool = False, **changes):
    old = get_limits()
    set_limits(dataclasses.replace(old, **changes), allow_large=allow_large)
    try:
        yield get_limits()
    finally:
        set_limits(old, allow_large=True)


def check_dim(dim: int, what: str = "operator") -> None:
    limit = get_limits().max_dim
    if dim > limit:
        raise ResourceLimitError(f"{what} dimension {dim} exceeds limit {limit}")


def check_enum(count: int, what: str = "codeword enumeration") -> None:
    limit = get_limits().max_enum
    if count > limit:
        raise ResourceLimitError(f"{what} size {count} exceeds limit {limit}")


def check_cells(count: int, what: str = "stored codeword states") -> None:
    limit = get_limits().max_cells
    if count > limit:
        raise ResourceLimitError(f"{what} need {count} matrix entries, limit {limit}")


def numba_requested() -> bool:
    return os.environ.get("CQPACK_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")
