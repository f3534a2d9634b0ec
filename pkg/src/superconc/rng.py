"""Counter-based random streams, one per Monte Carlo replica.

Replica ``r`` under master seed ``s`` reads a Philox stream keyed by ``s``
whose 256-bit counter starts at ``r << 192``. Streams for different replicas
never overlap, and a replica's draws do not depend on which worker runs it or
on how replicas are grouped into blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_COUNTER_SHIFT = 192


def _philox_state(master_seed: int, replica_index: int) -> dict:
    return {
        "bit_generator": "Philox",
        "state": {
            "counter": np.array([0, 0, 0, replica_index & _MASK64], dtype=np.uint64),
            "key": np.array([master_seed & _MASK64, 0], dtype=np.uint64),
        },
        "buffer": np.zeros(4, dtype=np.uint64),
        "buffer_pos": 4,
        "has_uint32": 0,
        "uinteger": 0,
    }


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    replica_index: int

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if not 0 <= self.replica_index <= _MASK64:
            raise ValueError("replica_index must be a nonnegative 64-bit integer")

    def generator(self) -> np.random.Generator:
        bg = np.random.Philox(
            key=self.master_seed, counter=self.replica_index << _COUNTER_SHIFT
        )
        return np.random.Generator(bg)


class ReplicaBlock:
    """Draws for the contiguous replica range ``[start, stop)``.

    ``draw`` requests are served replica by replica: each replica's stream
    is rewound to its origin, then every requested piece is read in order.
    A block should therefore be drawn from exactly once per experiment.
    """

    def __init__(self, master_seed: int, start: int, stop: int):
        if stop <= start:
            raise ValueError("empty replica block")
        self.master_seed = int(master_seed)
        self.start = int(start)
        self.stop = int(stop)
        self._bg = np.random.Philox(key=self.master_seed)
        self._gen = np.random.Generator(self._bg)

    def __len__(self):
        return self.stop - self.start

    def draw(self, *pieces):
        """Return one stacked array per piece.

        A piece is ``("normal", shape)`` or ``("uniform", shape)``; the
        result has shape ``(len(block), *shape)``. Uniforms lie in (0, 1].
        """
        shapes = []
        for kind, shape in pieces:
            if kind not in ("normal", "uniform"):
                raise ValueError(f"unknown draw kind {kind!r}")
            shape = (shape,) if isinstance(shape, int) else tuple(shape)
            shapes.append((kind, shape))
        out = [np.empty((len(self),) + shape) for _, shape in shapes]
        gen = self._gen
        for row, r in enumerate(range(self.start, self.stop)):
            self._bg.state = _philox_state(self.master_seed, r)
            for k, (kind, shape) in enumerate(shapes):
                if kind == "normal":
                    out[k][row] = gen.standard_normal(shape)
                else:
                    out[k][row] = 1.0 - gen.random(shape)
        return out
