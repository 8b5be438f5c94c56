"""Shared test helpers: forced uniform streams for deterministic sampler tests."""

import numpy as np


class _ConstantUniforms:
    """Generator stand-in: every uniform equals one fixed value."""

    def __init__(self, value):
        self._value = float(value)

    def random(self, size=None):
        if size is None:
            return self._value
        return np.full(int(size), self._value)


class _SequenceUniforms:
    """Generator stand-in replaying a finite uniform sequence."""

    def __init__(self, values):
        self._values = [float(v) for v in values]
        self._pos = 0

    def random(self, size=None):
        if size is None:
            return self._take(1)[0]
        return np.array(self._take(int(size)))

    def _take(self, k):
        if self._pos + k > len(self._values):
            raise AssertionError("forced uniform stream exhausted")
        out = self._values[self._pos : self._pos + k]
        self._pos += k
        return out


class ForcedStream:
    """RngStream stand-in whose generator yields forced uniforms.

    Pass `value` for an endless constant stream or `sequence` for a
    finite replayed one.
    """

    def __init__(self, value=None, sequence=None):
        if (value is None) == (sequence is None):
            raise ValueError("pass exactly one of value or sequence")
        self._value = value
        self._sequence = sequence

    def generator(self):
        if self._sequence is not None:
            return _SequenceUniforms(self._sequence)
        return _ConstantUniforms(self._value)
