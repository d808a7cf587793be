"""Encode four-state words as miner-friendly signed integers.

A word made only of 0/1 bits becomes its unsigned MSB-first value; a word
with any x (unknown) or z (high-impedance) bit collapses to a single
"unknown" sentinel. The sentinel renders as -1, the one value no real
register can take, so a signed reading of the rendered stream can always
tell hardware-specific values apart by their sign bit. x and z are
conflated on purpose.
"""

from __future__ import annotations

UNKNOWN_SENTINEL = -1

_DROP_BINARY = str.maketrans("", "", "01")
_DROP_XZ = str.maketrans("", "", "xzXZ")


def encode_word(word: str) -> int | None:
    """Return the unsigned value of ``word``, or None when any bit is x/z.

    Exact at any width; Python integers never truncate wide registers.
    """
    rest = word.translate(_DROP_BINARY)
    if not rest:
        if not word:
            raise ValueError("empty word")
        return int(word, 2)
    if rest.translate(_DROP_XZ):
        raise ValueError(f"not a four-state word: {word!r}")
    return None


def render_encoded(value: int | None) -> int:
    """Map an encoded value onto its signed wire form (unknown -> -1)."""
    return UNKNOWN_SENTINEL if value is None else value
