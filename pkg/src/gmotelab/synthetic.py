"""Container shared by every oversampler."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SyntheticSet:
    """Generated minority rows plus how they were produced.

    ``provenance`` is method specific. Interpolating methods record
    ``seed``, ``neighbor`` (row indices into the minority input) and
    ``gap`` so that ``instances[i] == X[seed[i]] + gap[i] * (X[neighbor[i]] -
    X[seed[i]])``. A ``fallback`` entry names any degraded path taken.
    """

    instances: np.ndarray
    method: str
    seed: int = 0
    attempts: int = 0
    rejected: int = 0
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.instances.shape[0])

    @property
    def fallback(self) -> str | None:
        return self.provenance.get("fallback")
