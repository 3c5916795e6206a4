"""Sparsity patterns, permutations, and pattern symmetries.

A sparsity pattern is a set of free (row, col) positions on an n-by-n grid,
indexed 1-based.  It doubles as a digraph: position (i, j) free means there
is an edge from vertex i to vertex j.  Two discrete symmetries preserve
stability of the associated matrix space and are implemented here: transpose
(reversing every edge) and relabeling by a permutation.  Multiplication by a
nonsingular diagonal matrix maps the matrix space to itself, so at pattern
level it is a no-op and gets no operation.

File formats
------------
mask:  n lines of n characters; '*' marks a free entry, '0' or '.' a zero.
json:  {"n": int, "free": [[i, j], ...]} with 1-based indices; the
       serializer emits pairs sorted row-major.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

from .errors import CapabilityError, PatternFormatError

CANONICAL_N_CAP = 8  # canonical_form scans the full 2*n! orbit

_FREE_CHARS = {"*", "∗"}  # ASCII star plus the typographic one
_ZERO_CHARS = {"0", "."}


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..n} in one-line notation.

    ``mapping[i-1]`` is the image of i.  Composition is function
    composition: ``a.compose(b)`` applies b first, then a.
    """

    mapping: tuple[int, ...]

    def __post_init__(self):
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.mapping}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        if other.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.mapping[j - 1] for j in other.mapping))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, img in enumerate(self.mapping, start=1):
            inv[img - 1] = i
        return Permutation(tuple(inv))

    @property
    def sign(self) -> int:
        """+1 for even, -1 for odd; equals det of the permutation matrix."""
        inversions = sum(
            1
            for a, b in itertools.combinations(self.mapping, 2)
            if a > b
        )
        return -1 if inversions % 2 else 1

    def matrix_rows(self) -> list[list[int]]:
        """The permutation matrix P with P[i][j] = 1 iff i+1 == self(j+1).

        Columns of the identity permuted: column j of P is e_{self(j)}.
        """
        rows = [[0] * self.n for _ in range(self.n)]
        for j in range(1, self.n + 1):
            rows[self.mapping[j - 1] - 1][j - 1] = 1
        return rows

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint-cycle form, each cycle led by its smallest element."""
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            v = self(start)
            while v != start:
                cyc.append(v)
                seen.add(v)
                v = self(v)
            out.append(tuple(cyc))
        return tuple(out)


def all_permutations(n: int):
    """All permutations of {1..n} in lexicographic one-line order."""
    for tup in itertools.permutations(range(1, n + 1)):
        yield Permutation(tup)


@dataclass(frozen=True)
class SparsityPattern:
    """A set of free (row, col) positions on an n-by-n grid, 1-based."""

    n: int
    free: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        for i, j in self.free:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"entry out of range: ({i}, {j}) for n={self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "SparsityPattern":
        return cls(n, frozenset((int(i), int(j)) for i, j in pairs))

    @classmethod
    def full(cls, n: int) -> "SparsityPattern":
        return cls(n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1)))

    @classmethod
    def diagonal(cls, n: int) -> "SparsityPattern":
        return cls(n, frozenset((i, i) for i in range(1, n + 1)))

    @classmethod
    def empty(cls, n: int) -> "SparsityPattern":
        return cls(n, frozenset())

    @property
    def dimension(self) -> int:
        return len(self.free)

    @property
    def codimension(self) -> int:
        return self.n * self.n - len(self.free)

    def has_entry(self, i: int, j: int) -> bool:
        return (i, j) in self.free

    def sorted_free(self) -> list[tuple[int, int]]:
        return sorted(self.free)

    def row_targets(self, i: int) -> frozenset[int]:
        return frozenset(j for (a, j) in self.free if a == i)

    def bitkey(self) -> int:
        """Row-major bit string as an integer, cell (1,1) most significant.

        Integer order on keys equals lexicographic order on the bit strings,
        which is the canonical order used for orbit minima.
        """
        return pattern_to_key(self)

    def describe(self) -> str:
        return f"{self.n}x{self.n} pattern, {len(self.free)} free entries"


# --- bit-level helpers (shared with the atlas enumeration) ---

def pattern_to_key(p: SparsityPattern) -> int:
    n = p.n
    key = 0
    for i, j in p.free:
        key |= 1 << (n * n - 1 - ((i - 1) * n + (j - 1)))
    return key


def key_to_pattern(n: int, key: int) -> SparsityPattern:
    free = []
    total = n * n
    for pos in range(total):
        if key >> (total - 1 - pos) & 1:
            free.append((pos // n + 1, pos % n + 1))
    return SparsityPattern.from_pairs(n, free)


@lru_cache(maxsize=8)
def symmetry_bit_maps(n: int) -> tuple[tuple[int, ...], ...]:
    """Bit-position remaps for every (permutation, transpose?) symmetry.

    Entry g of the result maps old bit position (row-major, 0-based) to its
    image position; the group has 2 * n! elements.
    """
    total = n * n
    maps = []
    for perm in itertools.permutations(range(n)):
        for transposed in (False, True):
            table = []
            for pos in range(total):
                i, j = pos // n, pos % n
                if transposed:
                    i, j = j, i
                table.append(perm[i] * n + perm[j])
            maps.append(tuple(table))
    return tuple(maps)


def key_orbit(n: int, key: int) -> set[int]:
    """All distinct images of a pattern key under relabeling and transpose."""
    total = n * n
    images = set()
    bits = [pos for pos in range(total) if key >> (total - 1 - pos) & 1]
    for table in symmetry_bit_maps(n):
        img = 0
        for pos in bits:
            img |= 1 << (total - 1 - table[pos])
        images.add(img)
    return images


# --- parsing / serialization ---

def parse_pattern(text: str, format: str = "mask") -> SparsityPattern:
    """Parse a pattern from mask or json text.

    Raises PatternFormatError naming the offending line/column for ragged
    rows, foreign characters, out-of-range indices, or duplicate pairs.
    """
    if format == "mask":
        return _parse_mask(text)
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown pattern format: {format!r}")


def _parse_mask(text: str) -> SparsityPattern:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise PatternFormatError("empty mask")
    n = len(lines)
    free = set()
    for li, line in enumerate(lines, start=1):
        row = line.strip()
        if len(row) != n:
            raise PatternFormatError(
                f"ragged mask: expected {n} characters, got {len(row)}", line=li
            )
        for ci, ch in enumerate(row, start=1):
            if ch in _FREE_CHARS:
                free.add((li, ci))
            elif ch not in _ZERO_CHARS:
                raise PatternFormatError(
                    f"character {ch!r} is not one of *, 0, .", line=li, column=ci
                )
    return SparsityPattern(n, frozenset(free))


def _parse_json(text: str) -> SparsityPattern:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternFormatError(f"invalid json: {exc.msg}", line=exc.lineno, column=exc.colno)
    if not isinstance(data, dict) or "n" not in data or "free" not in data:
        raise PatternFormatError('json pattern needs keys "n" and "free"')
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise PatternFormatError(f'"n" must be a positive integer, got {n!r}')
    seen = set()
    for entry in data["free"]:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise PatternFormatError(f"free entry must be a pair, got {entry!r}")
        i, j = entry
        if not (isinstance(i, int) and isinstance(j, int) and 1 <= i <= n and 1 <= j <= n):
            raise PatternFormatError(f"index pair out of range: {entry!r} for n={n}")
        if (i, j) in seen:
            raise PatternFormatError(f"duplicate pair: ({i}, {j})")
        seen.add((i, j))
    return SparsityPattern(n, frozenset(seen))


def serialize_pattern(p: SparsityPattern, format: str = "mask") -> str:
    if format == "mask":
        rows = []
        for i in range(1, p.n + 1):
            rows.append("".join("*" if (i, j) in p.free else "0" for j in range(1, p.n + 1)))
        return "\n".join(rows) + "\n"
    if format == "json":
        return json.dumps({"n": p.n, "free": [list(pair) for pair in p.sorted_free()]})
    raise ValueError(f"unknown pattern format: {format!r}")


# --- symmetry actions ---

def transpose_pattern(p: SparsityPattern) -> SparsityPattern:
    """Reverse every edge: (i, j) free in the result iff (j, i) free in p."""
    return SparsityPattern(p.n, frozenset((j, i) for (i, j) in p.free))


def apply_permutation(p: SparsityPattern, sigma: Permutation) -> SparsityPattern:
    """Relabel vertices: free entry (a, b) moves to (sigma(a), sigma(b))."""
    if sigma.n != p.n:
        raise ValueError(f"size mismatch: pattern n={p.n}, permutation n={sigma.n}")
    return SparsityPattern(p.n, frozenset((sigma(a), sigma(b)) for (a, b) in p.free))


@dataclass(frozen=True)
class PatternOrbitInfo:
    """Canonical representative of a pattern's symmetry orbit.

    Transposing first (if flagged) and then relabeling the input reproduces
    ``canonical``, which is the lexicographic minimum of the orbit under the
    row-major bit-string order.
    """

    canonical: SparsityPattern
    orbit_size: int
    relabeling: Permutation
    transposed: bool


def canonical_form(p: SparsityPattern) -> PatternOrbitInfo:
    """Minimize p over all relabelings and the transpose.

    The scan is exhaustive over the 2 * n! symmetries, so n is capped.
    """
    if p.n > CANONICAL_N_CAP:
        raise CapabilityError(
            f"canonical_form scans 2*n! symmetries; n={p.n} exceeds cap {CANONICAL_N_CAP}"
        )
    n = p.n
    total = n * n
    bits = [(i - 1) * n + (j - 1) for (i, j) in p.free]
    best_key = None
    best = None  # (perm tuple, transposed)
    keys = set()
    tables = symmetry_bit_maps(n)
    # tables interleave (perm, transpose=False), (perm, transpose=True) in
    # lexicographic perm order; mirror that order here for determinism
    for g, perm in enumerate(itertools.permutations(range(n))):
        for t_idx, transposed in enumerate((False, True)):
            table = tables[2 * g + t_idx]
            img = 0
            for pos in bits:
                img |= 1 << (total - 1 - table[pos])
            keys.add(img)
            if best_key is None or img < best_key:
                best_key = img
                best = (perm, transposed)
    perm, transposed = best
    relabeling = Permutation(tuple(v + 1 for v in perm))
    return PatternOrbitInfo(
        canonical=key_to_pattern(n, best_key),
        orbit_size=len(keys),
        relabeling=relabeling,
        transposed=transposed,
    )
