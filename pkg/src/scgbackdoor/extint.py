"""Sentinels for +inf / -inf thresholds that compare correctly against ints.

Thresholds live in Z u {+inf} and ceilings in Z u {-inf}.  Using a float
or a huge int would let arithmetic silently produce garbage, so these are
their own type and refuse arithmetic.
"""

from collections.abc import Mapping
from functools import total_ordering


@total_ordering
class _Infinity:
    __slots__ = ("_sign",)

    def __init__(self, sign):
        self._sign = sign

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other._sign == self._sign

    def __hash__(self):
        return hash(("inf", self._sign))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self._sign < other._sign
        if isinstance(other, int):
            return self._sign < 0
        return NotImplemented

    def __repr__(self):
        return "INF" if self._sign > 0 else "NEG_INF"

    def __str__(self):
        return "inf" if self._sign > 0 else "-inf"

    def __reduce__(self):
        return (_lookup, (self._sign,))


INF = _Infinity(1)
NEG_INF = _Infinity(-1)


def _lookup(sign):
    return INF if sign > 0 else NEG_INF


def is_finite(value):
    return not isinstance(value, _Infinity)


def to_json(value):
    """Ints pass through; infinities become the strings "inf" / "-inf"."""
    return value if is_finite(value) else str(value)


class SeriesValues(Mapping):
    """Read-only {series: extended int} view over kernel output arrays.

    Values are looked up on access, so building a profile does not pay
    for a Python dict over every series.  ``missing`` is the infinity
    used where the finite mask is off.
    """

    __slots__ = ("_names", "_index", "_values", "_finite", "_missing")

    def __init__(self, names, index, values, finite, missing):
        self._names = names
        self._index = index
        self._values = values
        self._finite = finite
        self._missing = missing

    def __getitem__(self, series):
        i = self._index[series]
        return int(self._values[i]) if self._finite[i] else self._missing

    def __iter__(self):
        return iter(self._names)

    def __len__(self):
        return len(self._names)

    def __contains__(self, series):
        return series in self._index

    def __repr__(self):
        return repr(dict(self.items()))
