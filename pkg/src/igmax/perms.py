"""Permutations of {1, ..., r} with descent bookkeeping.

Composition is left-to-right, matching the transformation layer.  Two text
forms are supported: one-line ("image") form ``[3,2,4,1]`` and cycle form
``(1 3 4)``.  Cycle printing omits fixed points and starts every cycle at its
smallest element, with cycles ordered by those smallest elements; the
identity prints as ``()``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidParameters


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        r = len(self.images)
        if r < 1:
            raise InvalidParameters("permutation degree must be >= 1")
        if sorted(self.images) != list(range(1, r + 1)):
            raise InvalidParameters(f"not a permutation of [1,{r}]: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, r: int) -> "Permutation":
        return cls(tuple(range(1, r + 1)))

    def is_identity(self) -> bool:
        return all(y == i for i, y in enumerate(self.images, start=1))

    def __call__(self, x: int) -> int:
        if not 1 <= x <= len(self.images):
            raise InvalidParameters(f"point {x} outside [1,{len(self.images)}]")
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Left-to-right: ``(p * q)(x) == q(p(x))``.

        >>> p = Permutation.parse("(2 3)", 4)
        >>> q = Permutation.parse("(3 4)", 4)
        >>> (p.inverse() * q).cycle_form()
        '(2 4 3)'
        """
        if len(self.images) != len(other.images):
            raise InvalidParameters("degree mismatch in permutation product")
        return Permutation(tuple(other.images[y - 1] for y in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images, start=1):
            inv[y - 1] = x
        return Permutation(tuple(inv))

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Nontrivial cycles, each starting at its least element, sorted."""
        seen = [False] * len(self.images)
        out: list[tuple[int, ...]] = []
        for start in range(1, len(self.images) + 1):
            if seen[start - 1]:
                continue
            cyc = [start]
            seen[start - 1] = True
            x = self.images[start - 1]
            while x != start:
                cyc.append(x)
                seen[x - 1] = True
                x = self.images[x - 1]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return tuple(out)

    def cycle_form(self) -> str:
        """Cycle notation, ``()`` for the identity.

        >>> Permutation((3, 2, 4, 1)).cycle_form()
        '(1 3 4)'
        >>> Permutation.identity(3).cycle_form()
        '()'
        """
        if not self.cycles:
            return "()"
        return "".join("(" + " ".join(str(x) for x in c) + ")" for c in self.cycles)

    def image_form(self) -> str:
        return "[" + ",".join(str(y) for y in self.images) + "]"

    def __str__(self) -> str:
        return self.cycle_form()

    @classmethod
    def from_cycles(cls, cycles, r: int) -> "Permutation":
        images = list(range(1, r + 1))
        for cyc in cycles:
            cyc = list(cyc)
            if len(set(cyc)) != len(cyc):
                raise InvalidParameters(f"repeated point in cycle {cyc}")
            for i, x in enumerate(cyc):
                if not 1 <= x <= r:
                    raise InvalidParameters(f"cycle point {x} outside [1,{r}]")
                images[x - 1] = cyc[(i + 1) % len(cyc)]
        if sorted(images) != list(range(1, r + 1)):
            raise InvalidParameters(f"cycles {cycles} overlap")
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, r: int) -> "Permutation":
        """Parse either text form at the given degree.

        >>> Permutation.parse("(2 3)", 4).image_form()
        '[1,3,2,4]'
        >>> Permutation.parse("[1,3,2,4]", 4).cycle_form()
        '(2 3)'
        """
        t = text.strip().replace(",", " ") if text.strip().startswith("(") else text.strip()
        if t.startswith("["):
            if not t.endswith("]"):
                raise InvalidParameters(f"unterminated image form {text!r}")
            body = t[1:-1].strip()
            try:
                images = tuple(int(p) for p in body.split(",")) if body else ()
            except ValueError:
                raise InvalidParameters(f"non-integer entry in {text!r}") from None
            if len(images) != r:
                raise InvalidParameters(f"expected degree {r}, got {len(images)} in {text!r}")
            return cls(images)
        if t == "()":
            return cls.identity(r)
        if t.startswith("("):
            if not re.fullmatch(r"(\s*\([\d\s]*\)\s*)+", t):
                raise InvalidParameters(f"malformed cycle form {text!r}")
            chunks = re.findall(r"\(([^()]*)\)", t)
            try:
                cycles = [[int(p) for p in chunk.split()] for chunk in chunks]
            except ValueError:
                raise InvalidParameters(f"non-integer entry in {text!r}") from None
            return cls.from_cycles([c for c in cycles if c], r)
        raise InvalidParameters(f"unrecognised permutation text {text!r}")

    def to_json(self) -> list[int]:
        return list(self.images)


def descent_number(p: Permutation) -> int:
    """Number of positions k whose entry exceeds some later entry.

    Zero exactly for the identity.

    >>> descent_number(Permutation((3, 2, 4, 1)))
    3
    """
    count = 0
    suffix_min = p.degree + 1
    for x in reversed(p.images):
        if x > suffix_min:
            count += 1
        else:
            suffix_min = x
    return count


def contiguous_cycle(k: int, l: int, r: int) -> Permutation:
    """The cycle (k+l, k+l-1, ..., k+1, k) as a degree-r permutation.

    In one-line form: position k holds k+l, positions k+1..k+l hold their
    predecessor, everything else is fixed.

    >>> contiguous_cycle(1, 2, 3).image_form()
    '[3,1,2]'
    >>> contiguous_cycle(2, 1, 4).cycle_form()
    '(2 3)'
    """
    if not (1 <= k and 1 <= l and k + l <= r):
        raise InvalidParameters(f"need 1 <= k, 1 <= l, k+l <= r; got k={k}, l={l}, r={r}")
    images = list(range(1, r + 1))
    images[k - 1] = k + l
    for i in range(k + 1, k + l + 1):
        images[i - 1] = i - 1
    return Permutation(tuple(images))


def classify_descent_one(p: Permutation) -> tuple[int, int] | None:
    """Return (k, l) when p is exactly the contiguous cycle at (k, l), else None.

    A permutation has descent count one iff it is such a cycle, so this also
    serves as the descent-one detector.
    """
    first_moved = next((i for i, y in enumerate(p.images, start=1) if y != i), None)
    if first_moved is None:
        return None
    k = first_moved
    l = p.images[k - 1] - k
    if l < 1 or k + l > p.degree:
        return None
    if p == contiguous_cycle(k, l, p.degree):
        return (k, l)
    return None


@dataclass(frozen=True)
class DescentLocator:
    """Rightmost descent start ``v`` and reach ``w``.

    ``v`` is the largest position whose entry exceeds some later entry and
    ``w`` is the largest offset with ``p(v) > p(v+w)``.
    """

    v: int
    w: int


def rightmost_descent(p: Permutation) -> DescentLocator | None:
    """Locate the rightmost descent start, or None for the identity.

    >>> rightmost_descent(Permutation((4, 2, 3, 1)))
    DescentLocator(v=3, w=1)
    """
    v = None
    suffix_min = p.degree + 1
    for i in range(p.degree, 0, -1):
        if p.images[i - 1] > suffix_min:
            v = i
            break
        suffix_min = min(suffix_min, p.images[i - 1])
    if v is None:
        return None
    w = max(d for d in range(1, p.degree - v + 1) if p.images[v - 1] > p.images[v + d - 1])
    return DescentLocator(v=v, w=w)


def resolve_rightmost_descent(p: Permutation) -> Permutation:
    """Move the rightmost descent entry behind everything it dominates.

    The entry at the descent start is displaced to just after position v+w,
    shifting the intermediate entries one place left.  The result has descent
    count exactly one less, which is what drives the elimination recursion.

    >>> resolve_rightmost_descent(Permutation((4, 2, 3, 1))).image_form()
    '[4,2,1,3]'
    """
    loc = rightmost_descent(p)
    if loc is None:
        raise InvalidParameters("identity permutation has no descent to resolve")
    v, w = loc.v, loc.w
    seq = list(p.images)
    entry = seq.pop(v - 1)
    seq.insert(v + w - 1, entry)
    return Permutation(tuple(seq))
