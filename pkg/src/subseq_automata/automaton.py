"""Deterministic automata with default transitions: model, runner, metrics, IO.

A state's regular transitions are labeled with alphabet symbols and consume
one pattern character. A state may additionally carry one unlabeled default
transition, taken only when no regular transition matches the current
character, and consuming nothing. Every edge must move strictly forward under
the automaton's state order, so runs terminate and the default-edge graph is
acyclic.

The automaton is immutable after construction; concurrent read-only runs on a
shared instance are safe.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K


class ParameterError(ValueError):
    """Invalid construction parameter (e.g. k outside [2, sigma])."""


class DocumentError(ValueError):
    """Malformed, unsupported, or invariant-breaking automaton document."""


DOCUMENT_VERSION = 1

MULTI_VARIANTS = {"naive-common", "common-level", "any-level"}


@dataclass(frozen=True)
class Alphabet:
    """Sorted, distinct symbols with their dense ids.

    ``symbols[i]`` is the character for id ``i``; ``index`` maps back. Symbols
    are single code points, sorted ascending, so id order equals code-point
    order.
    """

    symbols: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for c in self.symbols:
            if not isinstance(c, str) or len(c) != 1:
                raise ValueError(f"alphabet entries must be single characters, got {c!r}")
        if list(self.symbols) != sorted(set(self.symbols)):
            raise ValueError("alphabet symbols must be distinct and sorted")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.symbols)})

    @classmethod
    def from_text(cls, text: str) -> "Alphabet":
        return cls(tuple(sorted(set(text))))

    @classmethod
    def from_texts(cls, texts) -> "Alphabet":
        seen: set[str] = set()
        for t in texts:
            seen.update(t)
        return cls(tuple(sorted(seen)))

    @property
    def index(self) -> dict:
        return self._index

    def code(self, ch: str) -> int | None:
        return self._index.get(ch)

    def codes(self, text: str) -> np.ndarray:
        """Dense ids for ``text``, with -1 for characters outside the alphabet."""
        idx = self._index
        return np.fromiter((idx.get(c, -1) for c in text), dtype=np.int32, count=len(text))

    def char(self, i: int) -> str:
        return self.symbols[i]

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, ch) -> bool:
        return ch in self._index


@dataclass(frozen=True)
class SizeMetrics:
    states: int
    regular_transitions: int
    default_transitions: int
    size_total: int
    longest_default_chain: int


@dataclass
class RunOutcome:
    """Result of running one pattern.

    ``consumed_targets`` has one entry per consumed character (the state
    reached by its consuming transition); ``defaults_per_char`` counts the
    default edges followed immediately before that character was consumed.
    ``reject_position`` is the index of the first pattern character that could
    not be consumed, or None.
    """

    accepted: bool
    consumed_targets: list[int]
    defaults_per_char: list[int]
    reject_position: int | None


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]


def state_dims(meta: dict) -> tuple[int, ...] | None:
    """Per-coordinate value range for product-state automata, else None.

    "any-level" automata extend every coordinate by one dead-sentinel value.
    """
    if "lengths" not in meta:
        return None
    lengths = tuple(int(x) for x in meta["lengths"])
    if meta.get("variant") == "any-level":
        return tuple(x + 1 for x in lengths)
    return lengths


def _decode_ids(ids: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    """Vectorized mixed-radix decode; origin (id 0) maps to the all-zero row."""
    out = np.zeros((len(ids), len(dims)), dtype=np.int64)
    if 0 in dims:  # a zero-length coordinate leaves only the origin
        return out
    rem = np.asarray(ids, dtype=np.int64) - 1
    nonorigin = rem >= 0
    for i in range(len(dims) - 1, -1, -1):
        out[nonorigin, i] = rem[nonorigin] % dims[i] + 1
        rem = rem // dims[i]
    return out


class Automaton:
    """Dense-state automaton: CSR transitions, per-state optional default.

    Construction does not validate; call :func:`validate` (the builders do).
    """

    initial = 0

    __slots__ = ("alphabet", "offsets", "syms", "targets", "defaults", "accepting", "meta")

    def __init__(self, alphabet, offsets, syms, targets, defaults, accepting, meta):
        self.alphabet = alphabet
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.syms = np.asarray(syms, dtype=np.int32)
        self.targets = np.asarray(targets, dtype=np.int32)
        self.defaults = np.asarray(defaults, dtype=np.int32)
        self.accepting = np.asarray(accepting, dtype=bool)
        self.meta = dict(meta)

    @property
    def state_count(self) -> int:
        return len(self.offsets) - 1

    def transitions(self, s: int) -> list[tuple[int, int]]:
        lo, hi = int(self.offsets[s]), int(self.offsets[s + 1])
        return list(zip(self.syms[lo:hi].tolist(), self.targets[lo:hi].tolist()))

    def default(self, s: int) -> int | None:
        d = int(self.defaults[s])
        return None if d < 0 else d

    def transition(self, s: int, sym_id: int) -> int | None:
        """Regular transition target for ``sym_id`` out of ``s``, if any."""
        lo, hi = int(self.offsets[s]), int(self.offsets[s + 1])
        j = lo + bisect_left(self.syms[lo:hi].tolist(), sym_id)
        if j < hi and self.syms[j] == sym_id:
            return int(self.targets[j])
        return None

    def state_label(self, s: int) -> str:
        dims = state_dims(self.meta)
        if dims is None:
            return str(s)
        coords = _decode_ids(np.array([s]), dims)[0]
        return "(" + ",".join(str(int(c)) for c in coords) + ")"

    def run(self, pattern: str) -> RunOutcome:
        return run(self, pattern)

    def validate(self, order=None) -> ValidationReport:
        return validate(self, order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Automaton):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.meta == other.meta
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.syms, other.syms)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.defaults, other.defaults)
            and np.array_equal(self.accepting, other.accepting)
        )

    def __repr__(self) -> str:
        return (
            f"Automaton(variant={self.meta.get('variant')!r}, states={self.state_count}, "
            f"transitions={int(self.offsets[-1])}, defaults={int((self.defaults >= 0).sum())})"
        )


# ---------------------------------------------------------------------------
# validation


def forward_order_for(meta: dict):
    """The automaton's natural forward order: numeric, or coordinate-wise for
    product-state automata ("every coordinate non-decreasing, total strictly
    increasing")."""
    dims = state_dims(meta)
    if dims is None:
        return "numeric"
    return "product"


def validate(a: Automaton, order=None) -> ValidationReport:
    """Check structural invariants and the forward-order discipline.

    ``order`` is "numeric", "product", a binary predicate on state ids, or
    None (derive from the automaton's meta). Violations are reported as data,
    not raised.
    """
    v: list[str] = []
    n_states = a.state_count
    sigma = len(a.alphabet)

    if n_states < 1:
        return ValidationReport(False, ["automaton must have at least one state"])
    if len(a.offsets) != n_states + 1 or a.offsets[0] != 0:
        return ValidationReport(False, ["malformed transition offsets"])
    if np.any(np.diff(a.offsets) < 0) or a.offsets[-1] != len(a.syms) or len(a.syms) != len(a.targets):
        return ValidationReport(False, ["malformed transition arrays"])
    if len(a.defaults) != n_states or len(a.accepting) != n_states:
        return ValidationReport(False, ["defaults/accepting arrays must have one entry per state"])

    if order is None:
        order = forward_order_for(a.meta)

    sources = np.repeat(np.arange(n_states, dtype=np.int64), np.diff(a.offsets))

    bad = np.nonzero((a.syms < 0) | (a.syms >= sigma))[0]
    for j in bad:
        v.append(f"state {sources[j]}: symbol id {a.syms[j]} outside alphabet of size {sigma}")

    # determinism: per-state symbol lists must be strictly increasing
    if len(a.syms) > 1:
        same_state = sources[1:] == sources[:-1]
        d = np.diff(a.syms.astype(np.int64))
        for j in np.nonzero(same_state & (d == 0))[0]:
            v.append(f"state {sources[j]}: duplicate label {_sym_repr(a, a.syms[j])}")
        for j in np.nonzero(same_state & (d < 0))[0]:
            v.append(f"state {sources[j]}: unsorted labels at entry {j + 1}")

    bad = np.nonzero((a.targets < 0) | (a.targets >= n_states))[0]
    for j in bad:
        v.append(f"state {sources[j]}: transition target {a.targets[j]} out of range")

    has_default = a.defaults >= 0
    bad = np.nonzero(a.defaults >= n_states)[0]
    for s in bad:
        v.append(f"state {s}: default target {a.defaults[s]} out of range")

    in_range = (a.targets >= 0) & (a.targets < n_states)
    d_in_range = has_default & (a.defaults < n_states)

    if order == "numeric":
        fwd = a.targets.astype(np.int64) > sources
        dfwd = a.defaults > np.arange(n_states)
    elif order == "product":
        dims = state_dims(a.meta)
        src_xy = _decode_ids(sources, dims)
        tgt_xy = _decode_ids(a.targets, dims)
        fwd = np.all(tgt_xy >= src_xy, axis=1) & (tgt_xy.sum(axis=1) > src_xy.sum(axis=1))
        all_xy = _decode_ids(np.arange(n_states), dims)
        def_xy = _decode_ids(np.maximum(a.defaults, 0), dims)
        dfwd = np.all(def_xy >= all_xy, axis=1) & (def_xy.sum(axis=1) > all_xy.sum(axis=1))
    else:
        fwd = np.fromiter(
            (order(int(u), int(t)) for u, t in zip(sources, a.targets)), dtype=bool, count=len(sources)
        )
        dfwd = np.fromiter(
            (bool(a.defaults[s] >= 0) and order(s, int(a.defaults[s])) for s in range(n_states)),
            dtype=bool,
            count=n_states,
        )

    for j in np.nonzero(in_range & ~fwd)[0]:
        v.append(
            f"state {sources[j]}: non-forward transition to {a.targets[j]} "
            f"(label {_sym_repr(a, a.syms[j])})"
        )
    for s in np.nonzero(d_in_range & ~dfwd)[0]:
        v.append(f"state {s}: non-forward default to {a.defaults[s]}")

    return ValidationReport(not v, v)


def _sym_repr(a: Automaton, sym_id: int) -> str:
    if 0 <= sym_id < len(a.alphabet):
        return repr(a.alphabet.char(int(sym_id)))
    return f"#{sym_id}"


# ---------------------------------------------------------------------------
# running patterns


def run(a: Automaton, pattern: str) -> RunOutcome:
    """Simulate ``pattern`` deterministically.

    At each character: take the matching regular transition if present;
    otherwise follow the default (consuming nothing) and retry; otherwise
    reject at the current pattern index. Characters outside the automaton's
    alphabet reject immediately.
    """
    pcodes = a.alphabet.codes(pattern)
    consumed, dcounts, reject = K.run_codes(a.offsets, a.syms, a.targets, a.defaults, pcodes)
    reject = int(reject)
    if reject >= 0:
        return RunOutcome(False, consumed[:reject].tolist(), dcounts[:reject].tolist(), reject)
    final = int(consumed[-1]) if len(pattern) else a.initial
    return RunOutcome(bool(a.accepting[final]), consumed.tolist(), dcounts.tolist(), None)


def size_metrics(a: Automaton) -> SizeMetrics:
    """Exact counts plus the longest chain of consecutive default edges."""
    states = a.state_count
    regular = int(a.offsets[-1])
    dcount = int((a.defaults >= 0).sum())
    chains = K.longest_chain_lengths(a.defaults)
    longest = int(chains.max()) if states else 0
    return SizeMetrics(states, regular, dcount, states + regular + dcount, longest)


def reachable_states(a: Automaton) -> int:
    """Number of states reachable from the initial state.

    Relies on the forward-order invariant (edges only increase state ids), so
    one ascending sweep suffices.
    """
    reach = np.zeros(a.state_count, dtype=bool)
    reach[a.initial] = True
    for s in range(a.state_count):
        if not reach[s]:
            continue
        lo, hi = int(a.offsets[s]), int(a.offsets[s + 1])
        if hi > lo:
            reach[a.targets[lo:hi]] = True
        d = a.defaults[s]
        if d >= 0:
            reach[d] = True
    return int(reach.sum())


# ---------------------------------------------------------------------------
# document format (versioned JSON)


def serialize(a: Automaton) -> str:
    """Versioned JSON document; ``deserialize`` restores an equal automaton.

    One line per state keeps large automata diffable and byte-deterministic.
    """
    head: dict = {"version": DOCUMENT_VERSION, "variant": a.meta.get("variant")}
    if "lengths" in a.meta:
        head["lengths"] = [int(x) for x in a.meta["lengths"]]
    else:
        head["n"] = int(a.meta.get("n", a.state_count - 1))
    k = a.meta.get("k")
    head["k"] = None if k is None else int(k)
    head["sigma"] = int(a.meta.get("sigma", len(a.alphabet)))
    head["alphabet"] = list(a.alphabet.symbols)

    lines = ["{"]
    for key, value in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(value)},")
    lines.append('  "states": [')
    last = a.state_count - 1
    for s in range(a.state_count):
        lo, hi = int(a.offsets[s]), int(a.offsets[s + 1])
        trans = [[int(a.syms[j]), int(a.targets[j])] for j in range(lo, hi)]
        entry = json.dumps({"default": a.default(s), "trans": trans}, separators=(",", ":"))
        lines.append("    " + entry + ("," if s != last else ""))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> Automaton:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document root must be an object")
    version = doc.get("version")
    if version != DOCUMENT_VERSION:
        raise DocumentError(f"unsupported document version: {version!r}")

    variant = doc.get("variant")
    if not isinstance(variant, str):
        raise DocumentError("missing or non-string 'variant'")

    meta: dict = {"variant": variant}
    if "lengths" in doc:
        lengths = doc["lengths"]
        if not isinstance(lengths, list) or not all(isinstance(x, int) and x >= 0 for x in lengths):
            raise DocumentError("'lengths' must be a list of non-negative integers")
        meta["lengths"] = lengths
    elif "n" in doc:
        if not isinstance(doc["n"], int) or doc["n"] < 0:
            raise DocumentError("'n' must be a non-negative integer")
        meta["n"] = doc["n"]
    else:
        raise DocumentError("document must carry 'n' or 'lengths'")

    k = doc.get("k")
    if k is not None and not isinstance(k, int):
        raise DocumentError("'k' must be an integer or null")
    meta["k"] = k

    alphabet_field = doc.get("alphabet")
    if not isinstance(alphabet_field, list):
        raise DocumentError("missing 'alphabet' array")
    try:
        alphabet = Alphabet(tuple(alphabet_field))
    except ValueError as e:
        raise DocumentError(str(e)) from None

    sigma = doc.get("sigma", len(alphabet))
    if not isinstance(sigma, int) or sigma < len(alphabet):
        raise DocumentError("'sigma' must be an integer >= the alphabet size")
    meta["sigma"] = sigma

    states = doc.get("states")
    if not isinstance(states, list) or not states:
        raise DocumentError("'states' must be a non-empty array")

    expected = _expected_state_count(meta)
    if expected is not None and len(states) != expected:
        raise DocumentError(
            f"variant {variant!r} with these dimensions needs {expected} states, document has {len(states)}"
        )

    offsets = [0]
    syms: list[int] = []
    targets: list[int] = []
    defaults: list[int] = []
    for s, entry in enumerate(states):
        if not isinstance(entry, dict):
            raise DocumentError(f"state {s}: entry must be an object")
        d = entry.get("default")
        if d is not None and not isinstance(d, int):
            raise DocumentError(f"state {s}: 'default' must be a state id or null")
        defaults.append(-1 if d is None else d)
        trans = entry.get("trans")
        if not isinstance(trans, list):
            raise DocumentError(f"state {s}: missing 'trans' array")
        for pair in trans:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, int) for x in pair)
            ):
                raise DocumentError(f"state {s}: transitions must be [symbol-index, target-id] pairs")
            syms.append(pair[0])
            targets.append(pair[1])
        offsets.append(len(syms))

    a = Automaton(
        alphabet,
        np.array(offsets, dtype=np.int64),
        np.array(syms, dtype=np.int32),
        np.array(targets, dtype=np.int32),
        np.array(defaults, dtype=np.int32),
        np.ones(len(states), dtype=bool),
        meta,
    )
    report = validate(a)
    if not report.ok:
        raise DocumentError("document violates automaton invariants: " + "; ".join(report.violations[:5]))
    return a


def _expected_state_count(meta: dict) -> int | None:
    variant = meta.get("variant")
    if variant in {"sa", "chain", "level", "klevel"} and "n" in meta:
        return meta["n"] + 1
    dims = state_dims(meta)
    if variant in MULTI_VARIANTS and dims is not None:
        total = 1
        for d in dims:
            total *= d
        return total + 1
    return None


# ---------------------------------------------------------------------------
# DOT export


def _dot_label_char(ch: str) -> str:
    o = ord(ch)
    if ch == '"':
        return '\\"'
    if ch == "\\":
        return "\\\\"
    if 32 <= o < 127:
        return ch
    return "\\\\x%02x" % o


def export_dot(a: Automaton) -> str:
    """Deterministic graphviz rendering: one node line per state in id order,
    regular edges labeled, default edges dashed and unlabeled."""
    lines = ["digraph subsequence_automaton {", "  rankdir=LR;"]
    for s in range(a.state_count):
        shape = "doublecircle" if a.accepting[s] else "circle"
        lines.append(f'  {s} [shape={shape} label="{a.state_label(s)}"];')
    for s in range(a.state_count):
        lo, hi = int(a.offsets[s]), int(a.offsets[s + 1])
        for j in range(lo, hi):
            ch = _dot_label_char(a.alphabet.char(int(a.syms[j])))
            lines.append(f'  {s} -> {int(a.targets[j])} [label="{ch}"];')
        d = a.default(s)
        if d is not None:
            lines.append(f"  {s} -> {d} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
