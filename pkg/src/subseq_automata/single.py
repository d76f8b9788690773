"""Single-string subsequence automata across the size/delay trade-off.

All four builders produce automata with states 0..n (state s = "a prefix of
the pattern has been matched inside the first s text characters"), all
accepting, whose language is exactly the subsequences of the text:

  * ``build_sa``      - one transition per distinct suffix symbol, no
                        defaults; largest, delay-free.
  * ``build_chain``   - one labeled and one default edge per position;
                        smallest, worst delay.
  * ``build_level``   - ruler-function hierarchy over state indices, base 2,
                        uncapped; n log n size, log n delay.
  * ``build_k_level`` - base-k hierarchy with levels capped at ceil(log_k
                        sigma) and full-suffix fan-out where the hop already
                        spans sigma positions; k tunes size against delay.

Positions are 1-based: text[s] in the docs below means the s-th character.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .automaton import Alphabet, Automaton, ParameterError, validate


@dataclass(frozen=True)
class LevelParams:
    """Base/cap/length bundle defining a ruler-level hierarchy.

    ``cap`` is None for the uncapped hierarchy, otherwise the level ceiling
    (at least 1; the alphabet-aware builders use ceil(log_k sigma)).
    """

    k: int
    cap: int | None
    n: int

    def __post_init__(self):
        if self.k < 2:
            raise ParameterError(f"level base k must be >= 2, got {self.k}")
        if self.cap is not None and self.cap < 1:
            raise ParameterError(f"level cap must be >= 1, got {self.cap}")
        if self.n < 0:
            raise ParameterError("n must be non-negative")


def level(i: int, p: LevelParams) -> int:
    """Exponent of the largest power of ``p.k`` dividing ``i``, clamped to the cap."""
    if i < 1:
        raise ValueError("level is defined for positive state ids")
    x = 0
    while i % p.k == 0 and (p.cap is None or x < p.cap):
        i //= p.k
        x += 1
    return x


def bar(s: int, p: LevelParams) -> int | None:
    """Smallest state above ``s`` (within 1..n) whose level strictly exceeds
    level(s); None when no such state exists, including at the cap.

    Such a state must be divisible by k**(level(s)+1), so it is the next
    multiple of that power; the definitional scan is kept as a test oracle.
    """
    if not 1 <= s <= p.n:
        raise ValueError(f"state must lie in 1..{p.n}, got {s}")
    lv = level(s, p)
    if p.cap is not None and lv >= p.cap:
        return None
    step = p.k ** (lv + 1)
    t = (s // step + 1) * step
    return t if t <= p.n else None


class NextOccurrenceTable:
    """For each position 0..n and symbol, the smallest later position holding
    that symbol (row n holds none)."""

    def __init__(self, alphabet: Alphabet, table: np.ndarray):
        self.alphabet = alphabet
        self.table = table

    @property
    def n(self) -> int:
        return self.table.shape[0] - 1

    def lookup(self, i: int, ch: str) -> int | None:
        c = self.alphabet.code(ch)
        if c is None:
            return None
        t = int(self.table[i, c])
        return None if t < 0 else t

    def row(self, i: int) -> dict[str, int]:
        return {
            self.alphabet.char(c): int(t)
            for c, t in enumerate(self.table[i])
            if t >= 0
        }


def next_occurrence_table(text: str) -> NextOccurrenceTable:
    alphabet = Alphabet.from_text(text)
    codes = alphabet.codes(text)
    return NextOccurrenceTable(alphabet, K.next_occurrence_table(codes, len(alphabet)))


def _assemble(alphabet, offsets, syms, targets, defaults, meta) -> Automaton:
    n_states = len(defaults)
    a = Automaton(alphabet, offsets, syms, targets, defaults, np.ones(n_states, dtype=bool), meta)
    report = validate(a)
    assert report.ok, report.violations[:3]
    return a


def build_sa(text: str) -> Automaton:
    """Plain subsequence automaton: state s carries one transition per symbol
    occurring after position s, to its leftmost occurrence; no defaults."""
    alphabet = Alphabet.from_text(text)
    n = len(text)
    codes = alphabet.codes(text)
    table = K.next_occurrence_table(codes, len(alphabet))
    window = np.full(n + 1, n, dtype=np.int32)
    offsets, syms, targets = K.csr_from_table(table, window)
    defaults = np.full(n + 1, -1, dtype=np.int32)
    meta = {"variant": "sa", "n": n, "k": None, "sigma": len(alphabet)}
    return _assemble(alphabet, offsets, syms, targets, defaults, meta)


def build_chain(text: str) -> Automaton:
    """Prefix chain: state i < n has exactly text[i+1] -> i+1 and a default
    -> i+1; state n has neither."""
    alphabet = Alphabet.from_text(text)
    n = len(text)
    codes = alphabet.codes(text)
    offsets = np.arange(n + 2, dtype=np.int64)
    offsets[-1] = n
    targets = np.arange(1, n + 1, dtype=np.int32)
    defaults = np.concatenate([targets, [-1]]).astype(np.int32)
    meta = {"variant": "chain", "n": n, "k": None, "sigma": len(alphabet)}
    return _assemble(alphabet, offsets, codes.copy(), targets, defaults, meta)


def _level_windows(n: int, k: int, cap: int | None, sigma: int, full_at_sigma: bool):
    """Default targets plus per-state window ends for the hierarchy builders.

    window_end[s] bounds the text interval [s+1, window_end[s]] whose distinct
    symbols get transitions; the hop target (when one exists) caps the window,
    except that hops of at least sigma positions widen it to the full suffix
    (alphabet-aware builders only). State 0 is pinned to window [1, 1] with a
    default to state 1.
    """
    capv = -1 if cap is None else cap
    levels = K.ruler_levels(n, k, capv)
    bars = K.bar_targets(levels, n, k, capv)
    window = np.where(bars >= 0, bars, n).astype(np.int32)
    if full_at_sigma:
        gap = bars - np.arange(n + 1, dtype=np.int32)
        window[(bars >= 0) & (gap >= sigma)] = n
    defaults = bars.copy()
    if n >= 1:
        window[0] = 1
        defaults[0] = 1
    return defaults, window


def build_level(text: str) -> Automaton:
    """Uncapped base-2 hierarchy: state s keeps transitions for the distinct
    symbols between s and its hop target (full suffix when no hop exists)."""
    alphabet = Alphabet.from_text(text)
    n = len(text)
    codes = alphabet.codes(text)
    table = K.next_occurrence_table(codes, len(alphabet))
    defaults, window = _level_windows(n, 2, None, len(alphabet), full_at_sigma=False)
    offsets, syms, targets = K.csr_from_table(table, window)
    meta = {"variant": "level", "n": n, "k": None, "sigma": len(alphabet)}
    return _assemble(alphabet, offsets, syms, targets, defaults, meta)


def level_cap(k: int, sigma: int) -> int:
    """ceil(log_k sigma), floored at 1 so level-0 and cap-level states stay
    distinct even for tiny alphabets."""
    c, p = 0, 1
    while p < sigma:
        p *= k
        c += 1
    return max(1, c)


def effective_sigma(text_sigma: int, sigma: int | None) -> int:
    if sigma is None:
        return text_sigma
    if sigma < text_sigma:
        raise ParameterError(
            f"sigma override {sigma} is below the text's distinct-symbol count {text_sigma}"
        )
    return sigma


def build_k_level(
    text: str,
    k: int,
    *,
    sigma: int | None = None,
    strip_full_defaults: bool = False,
) -> Automaton:
    """Base-k hierarchy with levels capped at ceil(log_k sigma).

    States whose hop spans at least sigma positions (or that have no hop)
    carry transitions for the whole suffix. ``sigma`` may override the text's
    distinct-symbol count upward; ``k`` must satisfy 2 <= k <= max(2, sigma).
    ``strip_full_defaults`` drops the (never-matching) defaults from states
    that already carry full-suffix transitions.
    """
    alphabet = Alphabet.from_text(text)
    n = len(text)
    sig = effective_sigma(len(alphabet), sigma)
    if not 2 <= k <= max(2, sig):
        raise ParameterError(f"k must lie in [2, {max(2, sig)}] for sigma={sig}, got {k}")
    cap = level_cap(k, sig)
    codes = alphabet.codes(text)
    table = K.next_occurrence_table(codes, len(alphabet))
    defaults, window = _level_windows(n, k, cap, sig, full_at_sigma=True)
    if strip_full_defaults and n >= 1:
        gap = defaults - np.arange(n + 1, dtype=np.int32)
        drop = (defaults >= 0) & (gap >= sig)
        drop[0] = False
        defaults[drop] = -1
    offsets, syms, targets = K.csr_from_table(table, window)
    meta = {"variant": "klevel", "n": n, "k": k, "sigma": sig}
    return _assemble(alphabet, offsets, syms, targets, defaults, meta)


SINGLE_BUILDERS = {
    "sa": build_sa,
    "chain": build_chain,
    "level": build_level,
    "klevel": build_k_level,
}
