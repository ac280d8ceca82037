"""Permutations in one-line notation."""

import itertools
import logging
import numbers
import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

logger = logging.getLogger(__name__)

DEFAULT_MAX_SIZE = 16


class PermutationError(Exception):
    """Exception raised for invalid permutation input."""
    pass


class MalformedInput(PermutationError):
    """Exception raised when a permutation token is not an integer."""
    pass


class NotABijection(PermutationError):
    """Exception raised when the images do not form a bijection on {1..n}."""
    pass


class SizeExceeded(PermutationError):
    """Exception raised when a permutation is larger than the configured grid bound."""

    def __init__(self, n: int, limit: int):
        """Initialize with the offending size and the bound."""
        self.n = n
        self.limit = limit
        super().__init__(f"Permutation size {n} exceeds the grid bound {limit}")


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1..n} stored as its one-line images w(1), ..., w(n)."""

    images: Tuple[int, ...]

    def __post_init__(self):
        for value in self.images:
            if isinstance(value, bool) or not isinstance(value, numbers.Integral):
                raise MalformedInput(f"Entry {value!r} is not an integer")
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        n = len(images)
        if n == 0:
            raise NotABijection("Permutation must have at least one entry")
        seen = set()
        for value in images:
            if value < 1 or value > n:
                raise NotABijection(f"Value {value} is out of range 1..{n}")
            if value in seen:
                raise NotABijection(f"Value {value} appears more than once")
            seen.add(value)
        object.__setattr__(self, "_positions", {v: i + 1 for i, v in enumerate(images)})

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        """Return w(i) for a 1-based index i."""
        return self.images[i - 1]

    def position(self, p: int) -> int:
        """Return w⁻¹(p), the row in which value p appears."""
        return self._positions[p]

    def __iter__(self):
        return iter(self.images)

    def __len__(self) -> int:
        return len(self.images)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.images)

    def compact(self) -> str:
        """Digit-string form when every entry is a single digit, else comma form."""
        if self.n <= 9:
            return "".join(str(v) for v in self.images)
        return str(self)


def parse_permutation(text: str) -> Permutation:
    """
    Parse a permutation from its textual one-line notation.

    Accepts "2,5,1,6,3,4", "[2, 5, 1, 6, 3, 4]" and, for n ≤ 9, the digit
    string "251634".

    Args:
        text: The one-line notation.

    Returns:
        The parsed Permutation.

    Raises:
        MalformedInput: If a token is not an integer.
        NotABijection: If values repeat or fall outside 1..n.
    """
    stripped = text.strip().strip("[]()").strip()
    if not stripped:
        raise MalformedInput("Empty permutation")

    if re.fullmatch(r"\d+", stripped) and "," not in stripped:
        if len(stripped) > 9:
            raise MalformedInput(
                f"Digit form '{stripped}' is only accepted for n ≤ 9; use commas"
            )
        tokens = list(stripped)
    else:
        tokens = [tok.strip() for tok in re.split(r"[,\s]+", stripped) if tok.strip()]

    values = []
    for token in tokens:
        if not re.fullmatch(r"[+-]?\d+", token):
            raise MalformedInput(f"Token '{token}' is not an integer")
        values.append(int(token))

    perm = Permutation(tuple(values))
    logger.debug(f"Parsed permutation {perm}")
    return perm


def check_size(w: Permutation, limit: int = DEFAULT_MAX_SIZE) -> Permutation:
    """Raise SizeExceeded when w is larger than the grid bound."""
    if w.n > limit:
        raise SizeExceeded(w.n, limit)
    return w


def inverse(w: Permutation) -> Permutation:
    """Return v with v(w(i)) = i."""
    return Permutation(tuple(w.position(p) for p in range(1, w.n + 1)))


def inversion_length(w: Permutation) -> int:
    """Return the number of pairs i < j with w(i) > w(j)."""
    images = w.images
    return sum(
        1
        for i in range(len(images))
        for j in range(i + 1, len(images))
        if images[i] > images[j]
    )


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def longest(n: int) -> Permutation:
    return Permutation(tuple(range(n, 0, -1)))


def all_permutations(n: int) -> Iterator[Permutation]:
    """Yield every permutation of {1..n} in lexicographic order."""
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)


def from_images(images: Sequence[int]) -> Permutation:
    return Permutation(tuple(images))
