# cython: language_level=3, boundscheck=False, wraparound=False
"""Seeded uniform streams.

Each stream is a PCG64 generator keyed by ``(seed, stream)`` through numpy's
``SeedSequence``, so the same key reproduces the same uniforms bit for bit on
any platform, and distinct run indices give statistically independent streams.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport uint64_t

import numpy as np
from numpy.random import PCG64, SeedSequence

from ppsim.errors import InvalidArgumentError

# ((x >> 12) + 0.5) * 2**-52 lies in [2**-53, 1 - 2**-53]: never 0, never 1.
cdef double _SCALE = 2.220446049250313e-16


cdef class RngStream:
    """Uniform(0, 1) draws from a seeded PCG64 stream.

    ``stream`` is an int or a tuple of ints naming a sub-stream of ``seed``.

    ``draws`` counts the uniforms consumed so far.
    """

    def __init__(self, seed, stream=None):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if stream is None:
            seq = SeedSequence(seed)
        else:
            key = tuple(int(s) for s in stream) if isinstance(stream, (tuple, list)) else (int(stream),)
            if not key or min(key) < 0:
                raise InvalidArgumentError(f"stream key must be non-negative integers, got {stream!r}")
            stream = key if len(key) > 1 else key[0]
            seq = SeedSequence(seed, spawn_key=key)
        self.seed = seed
        self.stream = stream
        self.draws = 0
        self._bitgen = PCG64(seq)
        self._rng = <bitgen_t*>PyCapsule_GetPointer(self._bitgen.capsule, "BitGenerator")

    @classmethod
    def for_run(cls, master_seed, run_index):
        """Independent stream for run ``run_index`` of a batch keyed by ``master_seed``."""
        return cls(master_seed, run_index)

    cdef double next_uniform(self) noexcept:
        cdef uint64_t x = self._rng.next_uint64(self._rng.state)
        self.draws += 1
        return (<double>(x >> 12) + 0.5) * _SCALE

    def uniform(self):
        return self.next_uniform()

    def uniforms(self, Py_ssize_t n):
        out = np.empty(n, dtype=np.float64)
        cdef double[::1] view = out
        cdef Py_ssize_t k
        for k in range(n):
            view[k] = self.next_uniform()
        return out

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream}, draws={self.draws})"
