"""Seeded random streams.

One root seed drives every random draw through numpy's ``SeedSequence``
feeding a ``PCG64`` bit generator. Substreams are selected with spawn keys,
so each purpose is independent of how much the others consume:

* ``(0,)``       initialization sampling, drawn in this order:
                 importances ``(N, M)``, satisfactions ``(N, M, K)``,
                 aspirations ``(N,)``, each with ``Generator.uniform``.
* ``(1,)``       network generator seed: first ``uint32`` word of the state.
* ``(2, tick)``  activation order for ``tick``: ``Generator.permutation(N)``.

Because the per-tick streams are addressed by tick, the seed alone is the
complete RNG state of a run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RNG_ALGORITHM = "numpy-SeedSequence-PCG64/v1"

_INIT = 0
_NETWORK = 1
_ACTIVATION = 2


@dataclass(frozen=True)
class RngState:
    seed: int
    algorithm: str = RNG_ALGORITHM

    def to_dict(self) -> dict:
        return {"seed": self.seed}


def _generator(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def init_stream(seed: int) -> np.random.Generator:
    return _generator(seed, _INIT)


def network_seed(seed: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(_NETWORK,)).generate_state(1)[0])


def activation_order(seed: int, tick: int, n: int) -> np.ndarray:
    return _generator(seed, _ACTIVATION, tick).permutation(n)
