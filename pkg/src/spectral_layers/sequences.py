"""Eventually periodic integer sequences and the sparse gamma generator."""

from __future__ import annotations

import math
from dataclasses import dataclass


class SequenceExhausted(IndexError):
    pass


@dataclass(frozen=True)
class SequenceSpec:
    """A finite prefix followed by an optional tail repeated forever.

    ``value_at(n)`` is ``prefix[n]`` for ``n < len(prefix)`` and
    ``tail[(n - len(prefix)) % len(tail)]`` afterwards.
    """

    prefix: tuple[int, ...] = ()
    tail: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        if self.tail is not None:
            tail = tuple(int(v) for v in self.tail)
            if not tail:
                raise ValueError("tail must be nonempty when given")
            object.__setattr__(self, "tail", tail)
        if any(v < 0 for v in self.prefix + (self.tail or ())):
            raise ValueError("sequence values must be nonnegative")

    def value_at(self, n: int) -> int:
        if n < 0:
            raise IndexError(f"negative index {n}")
        if n < len(self.prefix):
            return self.prefix[n]
        if self.tail is None:
            raise SequenceExhausted(
                f"sequence exhausted: index {n} beyond prefix of length {len(self.prefix)}"
            )
        return self.tail[(n - len(self.prefix)) % len(self.tail)]

    def values(self, start: int, stop: int) -> list[int]:
        return [self.value_at(n) for n in range(start, stop)]

    def __str__(self) -> str:
        head = ",".join(map(str, self.prefix))
        if self.tail is None:
            return head + ";"
        return head + ";" + ",".join(map(str, self.tail))


def parse_sequence(text: str) -> SequenceSpec:
    """Parse ``"p0,p1,...;t0,t1,..."``.

    Without a ``;`` the whole list is the tail (``"2"`` is the constant 2).
    A trailing ``;`` with nothing after it means no tail.
    """
    text = text.strip()
    if ";" in text:
        head, _, rest = text.partition(";")
        prefix = _int_list(head)
        tail = _int_list(rest)
        return SequenceSpec(tuple(prefix), tuple(tail) if tail else None)
    tail = _int_list(text)
    if not tail:
        raise ValueError("empty sequence")
    return SequenceSpec((), tuple(tail))


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ValueError(f"bad integer list {text!r}") from None


def parse_tree_spec(text: str) -> tuple[SequenceSpec, SequenceSpec]:
    """``"k-spec|gamma-spec"``, e.g. ``"2|1"``."""
    if text.count("|") != 1:
        raise ValueError(f"tree spec needs exactly one '|': {text!r}")
    k_text, gamma_text = text.split("|")
    return parse_sequence(k_text), parse_sequence(gamma_text)


def sparse_block_lengths(kappa: int, count: int) -> list[int]:
    """L_j = ceil(prod_{i<=j} (kappa - 1 + ln i)) for j = 1..count."""
    if kappa < 2:
        raise ValueError("kappa must be >= 2")
    lengths = []
    prod = 1.0
    for i in range(1, count + 1):
        prod *= kappa - 1 + math.log(i)
        lengths.append(math.ceil(prod))
    return lengths


def sparse_gamma_sequence(kappa: int, length: int) -> list[int]:
    """Bits gamma_1..gamma_length, set exactly at the partial sums of L_j."""
    if kappa < 2:
        raise ValueError("kappa must be >= 2")
    gamma = [0] * length
    total = 0
    prod = 1.0
    i = 0
    while True:
        i += 1
        prod *= kappa - 1 + math.log(i)
        total += math.ceil(prod)
        if total > length:
            return gamma
        gamma[total - 1] = 1


def sparse_tree_specs(kappa: int, length: int) -> tuple[SequenceSpec, SequenceSpec]:
    """(k, gamma) for k_1 = kappa, k_n = 1 (n >= 2) and the sparse gamma.

    Index 0 of both specs is a placeholder; gamma is defined up to ``length``.
    """
    k = SequenceSpec((1, kappa), (1,))
    gamma = SequenceSpec((0,) + tuple(sparse_gamma_sequence(kappa, length)), None)
    return k, gamma
