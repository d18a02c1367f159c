"""Vocabularies and finite structures."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .encoder import Value, check_value
from .errors import StructureError
from .types import TypeExpr

Vocabulary = Mapping[str, TypeExpr]


@dataclass(frozen=True)
class Structure:
    """A universe ``[0, universe_size)`` and an interpretation of each symbol."""

    universe_size: int
    vocabulary: Vocabulary = field(default_factory=dict)
    interpretation: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.universe_size, bool) or not isinstance(self.universe_size, int):
            raise StructureError("universe size must be a natural number")
        if self.universe_size < 1:
            raise StructureError("universe must be nonempty")
        vocab = dict(self.vocabulary)
        missing = set(vocab) - set(self.interpretation)
        extra = set(self.interpretation) - set(vocab)
        if missing:
            raise StructureError(f"uninterpreted symbols: {sorted(missing)}")
        if extra:
            raise StructureError(f"interpretation of undeclared symbols: {sorted(extra)}")
        interp = {}
        for name, t in vocab.items():
            try:
                interp[name] = check_value(self.interpretation[name], t, self.universe_size)
            except (TypeError, ValueError) as exc:
                raise StructureError(f"symbol {name}: {exc}") from None
        object.__setattr__(self, "vocabulary", MappingProxyType(vocab))
        object.__setattr__(self, "interpretation", MappingProxyType(interp))

    @property
    def n(self) -> int:
        return self.universe_size

    def __getitem__(self, name: str) -> Value:
        return self.interpretation[name]

    def __hash__(self):
        return hash((self.universe_size, tuple(self.interpretation.items())))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.universe_size == other.universe_size
            and dict(self.vocabulary) == dict(other.vocabulary)
            and dict(self.interpretation) == dict(other.interpretation)
        )
