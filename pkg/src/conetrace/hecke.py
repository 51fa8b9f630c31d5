"""Triangle-group generators and truncated primitive length spectra.

The group G_N (N >= 3) is generated in PSL(2, R) by

    S = [[0, -1], [1, 0]]   and   T = [[1, 2 cos(pi/N)], [0, 1]],

with presentation <S, T | S^2 = (ST)^N = 1>; as N -> infinity the second
generator becomes translation by 2 and the relation on U = ST disappears.
Both cases are free products <S> * <U>, which gives every element a unique
alternating syllable normal form in a and u (a = S, u = ST).  Enumeration
therefore proceeds in three exact, symbolic stages on top of floating-point
matrices:

  1. depth-first enumeration of freely reduced words over {S, T, T^-1}
     up to a word-length budget, with the matrix product carried along
     (exact integer matrices when 2 cos(pi/N) is integral, i.e. N = 3 and
     the limit group);
  2. reduction of each word to its cyclically reduced syllable normal
     form, deduplicating conjugacy classes by the minimal cyclic rotation
     (exact -- unaffected by float noise);
  3. a primitivity filter rejecting cyclic words that are whole repetitions
     of a shorter block.

Multiplicities then count distinct primitive classes sharing a geodesic
length, bucketed on a 1e-9 trace lattice; classes and their inverses are
counted separately unless they happen to be conjugate.  The reported
completeness radius is measured, not assumed: it is the largest length
below which the class list is identical between word-length budgets L-2
and L (capped by the trace bound), and is documented as a conservative
stabilization heuristic rather than a theorem.
"""

from __future__ import annotations

import enum
import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .geometry import arccosh1p
from .surface import LengthSpectrum

__all__ = [
    "HeckeGroup",
    "GroupElement",
    "Classification",
    "generators",
    "limit_generators",
    "element_from_word",
    "classify",
    "geodesic_length",
    "enumerate_length_spectrum",
    "limit_group_spectrum",
    "spectrum_cache_key",
    "load_or_enumerate",
]

logger = logging.getLogger(__name__)

_DET_TOL = 1e-9
_TRACE_TOL = 1e-9
_LATTICE = 1e-9
CACHE_ENV_VAR = "CONETRACE_CACHE_DIR"
CACHE_VERSION = 1

_LETTERS = ("S", "T", "t")  # t denotes T^-1
_FORBIDDEN_SUCCESSOR = {"S": "S", "T": "t", "t": "T"}


class Classification(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"


@dataclass(frozen=True)
class HeckeGroup:
    """The triangle group G_N with translation length 2 cos(pi/N)."""

    N: int

    def __post_init__(self) -> None:
        if self.N < 3:
            raise ValueError(f"need N >= 3, got {self.N}")

    @property
    def lam(self) -> float:
        # 2 cos(pi/3) is exactly 1; spare it the float rounding of cos.
        return 1.0 if self.N == 3 else 2.0 * math.cos(math.pi / self.N)

    @property
    def exact_lam(self) -> int | None:
        """The integer value of the translation length when it is exact (N = 3)."""
        return 1 if self.N == 3 else None


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 unit-determinant matrix with its defining word over {S, T, T^-1}."""

    matrix: tuple[float, float, float, float]
    word: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        a, b, c, d = self.matrix
        det = a * d - b * c
        if abs(det - 1.0) >= _DET_TOL:
            raise ValueError(f"determinant drifted from 1: {det}")
        for letter in self.word:
            if letter not in _LETTERS:
                raise ValueError(f"unknown letter {letter!r}")

    @property
    def trace(self) -> float:
        return self.matrix[0] + self.matrix[3]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        a, b, c, d = self.matrix
        e, f, g, h = other.matrix
        return GroupElement((a * e + b * g, a * f + b * h,
                             c * e + d * g, c * f + d * h),
                            self.word + other.word)


def _letter_matrices(lam):
    return {
        "S": (type(lam)(0), -type(lam)(1), type(lam)(1), type(lam)(0)),
        "T": (type(lam)(1), lam, type(lam)(0), type(lam)(1)),
        "t": (type(lam)(1), -lam, type(lam)(0), type(lam)(1)),
    }


def _mat_mul(m1, m2):
    a, b, c, d = m1
    e, f, g, h = m2
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def generators(N: int) -> tuple[GroupElement, GroupElement]:
    """The two generators of G_N: the order-2 inversion S and the translation T."""
    grp = HeckeGroup(N)
    mats = _letter_matrices(grp.lam)
    return (GroupElement(mats["S"], ("S",)), GroupElement(mats["T"], ("T",)))


def limit_generators() -> tuple[GroupElement, GroupElement]:
    """Generators of the limiting group: S and translation by 2."""
    mats = _letter_matrices(2.0)
    return (GroupElement(mats["S"], ("S",)), GroupElement(mats["T"], ("T",)))


def element_from_word(word, lam) -> GroupElement:
    """Multiply out a word over {S, T, t} at the given translation length."""
    mats = _letter_matrices(lam)
    m = (type(lam)(1), type(lam)(0), type(lam)(0), type(lam)(1))
    for letter in word:
        m = _mat_mul(m, mats[letter])
    return GroupElement(tuple(float(x) for x in m), tuple(word))


def classify(g: GroupElement, tol: float = _TRACE_TOL) -> Classification:
    """Classify by |trace| against 2, with a tolerance band resolved to parabolic."""
    a, b, c, d = g.matrix
    if abs(b) < tol and abs(c) < tol and abs(abs(a) - 1.0) < tol:
        return Classification.IDENTITY
    tr = abs(a + d)
    if tr > 2.0 + tol:
        return Classification.HYPERBOLIC
    if tr < 2.0 - tol:
        return Classification.ELLIPTIC
    return Classification.PARABOLIC


def geodesic_length(g: GroupElement) -> float:
    """Translation length 2 arccosh(|tr|/2) of a hyperbolic element."""
    if classify(g) is not Classification.HYPERBOLIC:
        raise ValueError(f"element is not hyperbolic (trace {g.trace})")
    return 2.0 * arccosh1p(abs(g.trace) / 2.0 - 1.0)


# ---------------------------------------------------------------------------
# Syllable normal form in the free product <a> * <u>, a = S, u = ST.
# ---------------------------------------------------------------------------

_LETTER_SYLLABLES = {
    "S": (("a", 1),),
    "T": (("a", 1), ("u", 1)),      # T = S  * (ST)
    "t": (("u", -1), ("a", 1)),     # T^-1 = (ST)^-1 * S
}


def _push_syllable(stack: list, gen: str, exp: int, order: int | None) -> None:
    if gen == "a":
        exp %= 2
    elif order is not None:
        exp %= order
    if exp == 0:
        return
    if stack and stack[-1][0] == gen:
        _, prev = stack.pop()
        _push_syllable(stack, gen, prev + exp, order)
    else:
        stack.append((gen, exp))


def _normal_form(word, order: int | None) -> tuple:
    """Alternating a/u syllable normal form of a word over {S, T, t}."""
    stack: list = []
    for letter in word:
        for gen, exp in _LETTER_SYLLABLES[letter]:
            _push_syllable(stack, gen, exp, order)
    return tuple(stack)


def _cyclic_reduce(syllables: tuple, order: int | None) -> tuple:
    """Conjugate until the first and last syllables have different generators."""
    w = list(syllables)
    while len(w) >= 2 and w[0][0] == w[-1][0]:
        gen, first = w[0]
        _, last = w.pop()
        w = w[1:]
        _push_syllable(w, gen, last + first, order)
    return tuple(w)


def _canonical_rotation(cyc: tuple) -> tuple:
    if len(cyc) <= 1:
        return cyc
    rotations = (cyc[i:] + cyc[:i] for i in range(len(cyc)))
    return min(rotations)


def _is_proper_power(cyc: tuple) -> bool:
    n = len(cyc)
    for k in range(2, n + 1):
        if n % k == 0:
            block = cyc[: n // k]
            if block * k == cyc:
                return True
    return False


def _invert_syllables(cyc: tuple, order: int | None) -> tuple:
    out: list = []
    for gen, exp in reversed(cyc):
        _push_syllable(out, gen, -exp, order)
    return tuple(out)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _collect_classes(lam, order: int | None, max_word_len: int, trace_bound: float):
    """Map canonical cyclic syllable word -> |trace| for primitive hyperbolic classes.

    Iterative depth-first sweep over freely reduced words, carrying the
    matrix product along each prefix; deterministic order.
    """
    mats = _letter_matrices(lam)
    classes: dict[tuple, float] = {}
    work = [((letter,), mats[letter]) for letter in reversed(_LETTERS)]
    while work:
        word, m = work.pop()
        tr = abs(float(m[0] + m[3]))
        if 2.0 + _TRACE_TOL < tr <= trace_bound:
            cyc = _cyclic_reduce(_normal_form(word, order), order)
            if len(cyc) >= 2 and not _is_proper_power(cyc):
                key = _canonical_rotation(cyc)
                if key not in classes:
                    classes[key] = tr
        if len(word) < max_word_len:
            last = word[-1]
            for letter in reversed(_LETTERS):
                if letter != _FORBIDDEN_SUCCESSOR[last]:
                    work.append((word + (letter,), _mat_mul(m, mats[letter])))
    return classes


def _bucket_classes(classes: dict, collect_warnings: list | None):
    """Group class traces on the 1e-9 lattice; return sorted (trace, count) pairs."""
    buckets: dict[int, list[float]] = {}
    for tr in classes.values():
        buckets.setdefault(round(tr / _LATTICE), []).append(tr)
    items = []
    for key in sorted(buckets):
        traces = buckets[key]
        spread = max(traces) - min(traces)
        if spread > 1e-11:
            msg = (f"trace bucket {key * _LATTICE:.9f} has spread {spread:.2e}; "
                   f"possibly distinct classes merged by the 1e-9 lattice")
            logger.warning(msg)
            if collect_warnings is not None:
                collect_warnings.append(msg)
        items.append((min(traces), len(traces)))
    return items


def _spectrum_once(lam, order, max_word_len, trace_bound, collect_warnings):
    classes = _collect_classes(lam, order, max_word_len, trace_bound)
    items = _bucket_classes(classes, collect_warnings)
    entries = tuple((2.0 * arccosh1p(tr / 2.0 - 1.0), count) for tr, count in items)
    return classes, entries


def _stabilization_radius(lam, order, max_word_len, trace_bound,
                          classes_full: dict, entries_full) -> float:
    """Largest length below which budgets L-2 and L report identical classes."""
    cap = 2.0 * arccosh1p(trace_bound / 2.0 - 1.0) if trace_bound > 2.0 else 0.0
    if max_word_len < 3:
        return 0.0
    prev = _collect_classes(lam, order, max_word_len - 2, trace_bound)
    new_keys = [k for k in classes_full if k not in prev]
    if not new_keys:
        longest = entries_full[-1][0] if entries_full else 0.0
        return min(longest, cap)
    min_new = min(2.0 * arccosh1p(classes_full[k] / 2.0 - 1.0) for k in new_keys)
    return min(math.nextafter(min_new, 0.0), cap)


def enumerate_length_spectrum(grp: HeckeGroup, max_word_len: int, trace_bound: float,
                              *, collect_warnings: list | None = None) -> LengthSpectrum:
    """Primitive geodesic length spectrum of G_N from bounded word enumeration.

    Keeps hyperbolic classes with |trace| <= trace_bound reachable by freely
    reduced words of at most max_word_len letters.  Deterministic: identical
    inputs give bit-identical spectra.  Suspected trace-lattice collisions
    are logged and appended to collect_warnings, never merged silently.
    """
    if max_word_len < 1:
        raise ValueError(f"max_word_len must be >= 1, got {max_word_len}")
    lam = grp.exact_lam if grp.exact_lam is not None else grp.lam
    classes, entries = _spectrum_once(lam, grp.N, max_word_len, trace_bound,
                                      collect_warnings)
    radius = _stabilization_radius(lam, grp.N, max_word_len, trace_bound,
                                   classes, entries)
    return LengthSpectrum(entries, radius)


def limit_group_spectrum(max_word_len: int, trace_bound: float,
                         *, collect_warnings: list | None = None) -> LengthSpectrum:
    """Length spectrum of the limiting group (translation by 2; u has infinite order)."""
    if max_word_len < 1:
        raise ValueError(f"max_word_len must be >= 1, got {max_word_len}")
    classes, entries = _spectrum_once(2, None, max_word_len, trace_bound,
                                      collect_warnings)
    radius = _stabilization_radius(2, None, max_word_len, trace_bound,
                                   classes, entries)
    return LengthSpectrum(entries, radius)


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------

def spectrum_cache_key(N: int | None, max_word_len: int, trace_bound: float) -> str:
    tag = "limit" if N is None else f"N{N}"
    return f"hecke_{tag}_L{max_word_len}_B{trace_bound!r}.json"


def resolve_cache_dir(explicit: str | os.PathLike | None) -> Path | None:
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV_VAR)
    return Path(env) if env else None


def load_or_enumerate(N: int | None, max_word_len: int, trace_bound: float,
                      cache_dir: str | os.PathLike | None = None) -> LengthSpectrum:
    """Enumerate a spectrum, caching by (N, max_word_len, trace_bound).

    N = None selects the limiting group.  The cache format is versioned
    JSON; entries that fail validation are recomputed and overwritten.
    """
    directory = resolve_cache_dir(cache_dir)
    path = directory / spectrum_cache_key(N, max_word_len, trace_bound) if directory else None
    if path is not None and path.exists():
        try:
            data = json.loads(path.read_text())
            if (data.get("version") == CACHE_VERSION
                    and data.get("N") == N
                    and data.get("max_word_len") == max_word_len
                    and data.get("trace_bound") == trace_bound):
                return LengthSpectrum(tuple((l, m) for l, m in data["entries"]),
                                      data["completeness_radius"])
            logger.warning("stale cache entry %s; recomputing", path)
        except (ValueError, KeyError) as exc:
            logger.warning("unreadable cache entry %s (%s); recomputing", path, exc)

    if N is None:
        spectrum = limit_group_spectrum(max_word_len, trace_bound)
    else:
        spectrum = enumerate_length_spectrum(HeckeGroup(N), max_word_len, trace_bound)

    if path is not None:
        directory.mkdir(parents=True, exist_ok=True)
        payload = {
            "version": CACHE_VERSION,
            "N": N,
            "max_word_len": max_word_len,
            "trace_bound": trace_bound,
            "entries": [[l, m] for l, m in spectrum.entries],
            "completeness_radius": spectrum.completeness_radius,
        }
        path.write_text(json.dumps(payload, indent=2))
    return spectrum
