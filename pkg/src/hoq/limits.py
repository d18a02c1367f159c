"""Size guards.  Limits are configuration, not semantics."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_MAX_ENUM = "HOQ_MAX_ENUM"
ENV_MAX_CODE_BITS = "HOQ_MAX_CODE_BITS"
ENV_MAX_TARGET_UNIVERSE = "HOQ_MAX_TARGET_UNIVERSE"


@dataclass(frozen=True)
class Limits:
    max_enum: int = 2**24
    max_code_bits: int = 2**20
    max_target_universe: int = 2**16

    def __post_init__(self):
        for name in ("max_enum", "max_code_bits", "max_target_universe"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "Limits":
        environ = os.environ if environ is None else environ
        values = {}
        for field, var in (
            ("max_enum", ENV_MAX_ENUM),
            ("max_code_bits", ENV_MAX_CODE_BITS),
            ("max_target_universe", ENV_MAX_TARGET_UNIVERSE),
        ):
            if var in environ:
                values[field] = int(environ[var])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT_LIMITS = Limits()
