"""
Brute-force ground truth for marked bumpless pipedreams.

Valid tilings are enumerated row by row from the occupancy pattern of the
edges between rows. Tilings are kept unmarked (skeletons) and grouped by the
permutation they read as; marking every subset of the NW elbows of a skeleton
gives its marked diagrams, all of which read the same permutation.
"""

import functools
import itertools
import logging
import multiprocessing as mp
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from maxbpd.grid import Mbpd, TileGrid, TileKind, read_permutation
from maxbpd.maximal import AlgorithmError, run_maximal
from maxbpd.perm import (
    DEFAULT_MAX_SIZE,
    Permutation,
    all_permutations,
    inversion_length,
)
from maxbpd.poly import (
    Polynomial,
    Monomial,
    bottom_degree_component,
    leading_monomial,
    top_degree_component,
    weight_factor,
)
from maxbpd.snow import WeightVector, rajcode_pair

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_BOUND = 5

# (north occupied, west occupied) -> [(letter, south occupied, east occupied)]
_CELL_OPTIONS = {
    (False, False): [("B", False, False), ("R", True, True)],
    (True, False): [("V", True, False)],
    (False, True): [("H", False, True)],
    (True, True): [("C", True, True), ("J", False, False)],
}


class OracleError(Exception):
    """Exception raised for enumeration requests the oracle cannot serve."""
    pass


class BoundExceeded(OracleError):
    """Exception raised when n is above the enumeration bound."""

    def __init__(self, n: int, bound: int):
        self.n = n
        self.bound = bound
        super().__init__(f"Enumeration is limited to n ≤ {bound}, got n = {n}")


def check_bound(n: int, bound: int) -> None:
    if n > bound:
        raise BoundExceeded(n, bound)


@lru_cache(maxsize=None)
def row_fillings(n: int, north: Tuple[bool, ...]) -> Tuple[Tuple[str, Tuple[bool, ...]], ...]:
    """
    All rows compatible with the occupied north edges.

    Returns:
        (letters, south occupancy) pairs for rows whose last east edge is occupied.
    """
    results = []

    def extend(col: int, west: bool, letters: str, south: Tuple[bool, ...]):
        if col == n:
            if west:
                results.append((letters, south))
            return
        for letter, s, e in _CELL_OPTIONS[(north[col], west)]:
            extend(col + 1, e, letters + letter, south + (s,))

    extend(0, False, "", ())
    return tuple(results)


def iter_skeletons(n: int) -> Iterator[Tuple[str, ...]]:
    """Yield every valid unmarked tiling as a tuple of row strings."""
    full = (True,) * n

    def descend(rows: Tuple[str, ...], north: Tuple[bool, ...]):
        if len(rows) == n:
            if north == full:
                yield rows
            return
        for letters, south in row_fillings(n, north):
            yield from descend(rows + (letters,), south)

    yield from descend((), (False,) * n)


@lru_cache(maxsize=None)
def skeletons_by_permutation(n: int) -> Dict[Permutation, Tuple[TileGrid, ...]]:
    """Group the unmarked tilings of the n×n grid by the permutation they read as."""
    groups: Dict[Permutation, List[TileGrid]] = {}
    count = 0
    for rows in iter_skeletons(n):
        grid = TileGrid.from_rows(rows)
        perm, _ = read_permutation(grid)
        groups.setdefault(perm, []).append(grid)
        count += 1
    logger.debug(f"Found {count} unmarked tilings for n = {n} over {len(groups)} permutations")
    return {perm: tuple(sorted(grids, key=lambda g: g.rows())) for perm, grids in groups.items()}


def count_marked_tilings(n: int) -> int:
    """Count marked tilings by a transfer over row profiles, without reading any of them."""
    counts = {(False,) * n: 1}
    for _ in range(n):
        following: Dict[Tuple[bool, ...], int] = {}
        for north, ways in counts.items():
            for letters, south in row_fillings(n, north):
                following[south] = following.get(south, 0) + ways * 2 ** letters.count("J")
        counts = following
    return counts.get((True,) * n, 0)


def expand_marks(skeleton: TileGrid) -> Iterator[TileGrid]:
    """Every way of marking a subset of the skeleton's NW elbows."""
    elbows = skeleton.cells_of(TileKind.J)
    for choice in itertools.product((TileKind.J, TileKind.M), repeat=len(elbows)):
        yield skeleton.replace(dict(zip(elbows, choice)))


def _skeleton_polynomial(skeleton: TileGrid, length: int, double: bool) -> Polynomial:
    """
    Sum of the signed weights of all markings of one skeleton.

    Marking a subset S of the elbows contributes (-1)^{b+|S|-ℓ} ∏_B f ∏_S f,
    which sums to (-1)^{b-ℓ} ∏_B f ∏_J (1 - f).
    """
    n = skeleton.n
    one = Polynomial.one(n)
    product = one
    for row, col in skeleton.cells_of(TileKind.BLANK):
        product = product * weight_factor(n, row, col, double)
    for row, col in skeleton.cells_of(TileKind.J):
        product = product * (one - weight_factor(n, row, col, double))
    blanks = skeleton.count(TileKind.BLANK)
    return product if (blanks - length) % 2 == 0 else -product


def diagram_weight(mbpd: Mbpd, length: int, double: bool) -> Polynomial:
    """(-1)^{blank+mark-ℓ} times the product of the weight factors of its BLANK and M cells."""
    n = mbpd.n
    product = Polynomial.one(n)
    for row, col in mbpd.grid.cells_of(TileKind.BLANK, TileKind.M):
        product = product * weight_factor(n, row, col, double)
    return product if (mbpd.size - length) % 2 == 0 else -product


def _weight_monomial(mbpd: Mbpd, with_y: bool) -> Polynomial:
    yexp = mbpd.cwt if with_y else (0,) * mbpd.n
    return Polynomial.from_terms(mbpd.n, {Monomial(mbpd.rwt, yexp): 1})


@dataclass
class EnumerationReport:
    """All marked diagrams of w with the polynomials they define."""

    w: Permutation
    diagrams: List[Mbpd]
    maximal: List[Mbpd]
    skeletons: Tuple[TileGrid, ...] = ()
    _cache: Dict[str, Polynomial] = field(default_factory=dict, repr=False)

    @property
    def max_size(self) -> int:
        return self.maximal[0].size

    def grothendieck(self, double: bool = False) -> Polynomial:
        key = "G_xy" if double else "G_x"
        if key not in self._cache:
            length = inversion_length(self.w)
            total = Polynomial.zero(self.w.n)
            for skeleton in self.skeletons:
                total = total + _skeleton_polynomial(skeleton, length, double)
            self._cache[key] = total
        return self._cache[key]

    def castelnuovo_mumford(self, double: bool = False) -> Polynomial:
        key = "CM_xy" if double else "CM_x"
        if key not in self._cache:
            total = Polynomial.zero(self.w.n)
            for mbpd in self.maximal:
                total = total + _weight_monomial(mbpd, double)
            self._cache[key] = total
        return self._cache[key]

    @property
    def polynomials(self) -> Dict[str, Polynomial]:
        return {
            "G_x": self.grothendieck(False),
            "G_xy": self.grothendieck(True),
            "CM_x": self.castelnuovo_mumford(False),
            "CM_xy": self.castelnuovo_mumford(True),
        }

    def maximal_weight_pairs(self) -> List[Tuple[WeightVector, WeightVector]]:
        return sorted(m.weight_pair for m in self.maximal)


def enumerate_mbpds(w: Permutation, bound: int = DEFAULT_ENUMERATION_BOUND) -> EnumerationReport:
    """
    Enumerate every marked bumpless pipedream reading as w.

    Args:
        w: The permutation.
        bound: Largest n the oracle accepts.

    Returns:
        EnumerationReport with diagrams sorted by their tile strings.

    Raises:
        BoundExceeded: If w is larger than the bound.
    """
    check_bound(w.n, bound)
    skeletons = skeletons_by_permutation(w.n).get(w, ())
    diagrams = [Mbpd.from_grid(grid) for skeleton in skeletons for grid in expand_marks(skeleton)]
    diagrams.sort(key=lambda m: m.grid.rows())
    best = max(m.size for m in diagrams)
    maximal = [m for m in diagrams if m.size == best]
    logger.debug(f"{w}: {len(diagrams)} diagrams, {len(maximal)} maximal of size {best}")
    return EnumerationReport(w=w, diagrams=diagrams, maximal=maximal, skeletons=skeletons)


def grothendieck_polys(w: Permutation, bound: int = DEFAULT_ENUMERATION_BOUND) -> Tuple[Polynomial, Polynomial]:
    """(G_w(x), G_w(x; y)) as signed weighted sums over MBPD(w)."""
    report = enumerate_mbpds(w, bound)
    return report.grothendieck(False), report.grothendieck(True)


def cm_polys(w: Permutation, bound: int = DEFAULT_ENUMERATION_BOUND) -> Tuple[Polynomial, Polynomial]:
    """(CM_w(x), CM_w(x; y)) summed over the maximal diagrams."""
    report = enumerate_mbpds(w, bound)
    return report.castelnuovo_mumford(False), report.castelnuovo_mumford(True)


def schubert_polynomial(w: Permutation, bound: int = DEFAULT_ENUMERATION_BOUND) -> Polynomial:
    """The lowest-degree component of G_w(x)."""
    return bottom_degree_component(grothendieck_polys(w, bound)[0])


TSV_COLUMNS = ("w", "rajcode", "rajcode_inv", "n_mbpd", "n_maximal",
               "unique_weightpair", "dhat_match", "leading_ok")


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return "-"
    return "true" if value else "false"


def _vector(values: Sequence[int]) -> str:
    return ",".join(str(v) for v in values)


@dataclass
class VerificationRecord:
    """Outcome of checking one permutation."""

    w: Permutation
    rajcode: WeightVector
    rajcode_inv: WeightVector
    n_mbpd: Optional[int] = None
    n_maximal: Optional[int] = None
    unique_weightpair: Optional[bool] = None
    dhat_match: bool = False
    leading_ok: Optional[bool] = None
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(flag is not False for flag in
                   (self.unique_weightpair, self.dhat_match, self.leading_ok))

    def tsv_row(self) -> str:
        fields = (
            str(self.w),
            _vector(self.rajcode),
            _vector(self.rajcode_inv),
            "-" if self.n_mbpd is None else str(self.n_mbpd),
            "-" if self.n_maximal is None else str(self.n_maximal),
            _flag(self.unique_weightpair),
            _flag(self.dhat_match),
            _flag(self.leading_ok),
        )
        return "\t".join(fields)


@dataclass
class VerificationReport:
    """Records sorted by one-line notation."""

    records: List[VerificationRecord]

    @property
    def failures(self) -> List[VerificationRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def smallest_counterexample(self) -> Optional[VerificationRecord]:
        failures = self.failures
        return failures[0] if failures else None

    def to_tsv(self) -> str:
        lines = ["\t".join(TSV_COLUMNS)] + [r.tsv_row() for r in self.records]
        return "\n".join(lines) + "\n"


def verify_permutation(w: Permutation, bound: int = DEFAULT_ENUMERATION_BOUND,
                       max_size: int = DEFAULT_MAX_SIZE) -> VerificationRecord:
    """
    Check the maximal diagram of w against the oracle.

    When n is within the bound: exactly one maximal diagram carries weights
    (rajcode(w), rajcode(w⁻¹)), it equals the constructed one tile for tile,
    the leading monomial of CM_w(x; y) has those exponents and coefficient 1,
    and the top-degree part of G_w(x; y) is CM_w(x; y) up to sign. Above the
    bound only the constructed diagram's validity, reading and weights are
    checked.
    """
    row_code, col_code = rajcode_pair(w)
    record = VerificationRecord(w=w, rajcode=row_code, rajcode_inv=col_code)

    constructed = None
    try:
        constructed = run_maximal(w, max_size=max_size).mbpd
    except AlgorithmError as e:
        record.error = str(e)
        logger.debug(f"{w}: construction failed: {e}")

    if w.n > bound:
        record.dhat_match = (
            constructed is not None
            and constructed.perm == w
            and constructed.weight_pair == (row_code, col_code)
        )
        return record

    report = enumerate_mbpds(w, bound)
    record.n_mbpd = len(report.diagrams)
    record.n_maximal = len(report.maximal)
    matching = [m for m in report.maximal if m.weight_pair == (row_code, col_code)]
    record.unique_weightpair = len(matching) == 1
    record.dhat_match = (
        constructed is not None and len(matching) == 1 and matching[0].grid == constructed.grid
    )

    cm = report.castelnuovo_mumford(double=True)
    lead, coeff = leading_monomial(cm)
    top = top_degree_component(report.grothendieck(double=True))
    record.leading_ok = (
        (lead.xexp, lead.yexp) == (row_code, col_code)
        and coeff == 1
        and top.monomial_positive() == cm
    )
    return record


def _verify_worker(bound: int, max_size: int, images: Tuple[int, ...]) -> VerificationRecord:
    return verify_permutation(Permutation(images), bound, max_size)


def verify_symmetric_group(n: int, jobs: int = 1,
                           sample: Optional[Iterable[Permutation]] = None,
                           bound: int = DEFAULT_ENUMERATION_BOUND,
                           max_size: int = DEFAULT_MAX_SIZE) -> VerificationReport:
    """
    Verify every permutation of size n, or only those in sample.

    Work is spread over jobs processes; records are sorted afterwards so the
    report does not depend on scheduling.

    Raises:
        OracleError: If a sample permutation has the wrong size.
    """
    if sample is None:
        perms = list(all_permutations(n))
    else:
        perms = list(sample)
        for w in perms:
            if w.n != n:
                raise OracleError(f"Sample permutation {w} has size {w.n}, expected {n}")

    mode = "full" if n <= bound else "restricted"
    logger.debug(f"Verifying {len(perms)} permutations of size {n} ({mode} mode, {jobs} jobs)")

    worker = functools.partial(_verify_worker, bound, max_size)
    images = [w.images for w in perms]
    if jobs > 1 and len(images) > 1:
        with mp.Pool(jobs) as pool:
            records = list(pool.imap_unordered(worker, images))
    else:
        records = [worker(item) for item in images]

    records.sort(key=lambda r: r.w.images)
    report = VerificationReport(records)
    logger.debug(f"Verification finished: {len(report.failures)} failures")
    return report
