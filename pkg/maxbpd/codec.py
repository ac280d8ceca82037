"""JSON documents for diagrams and construction traces."""

import json
import logging
from typing import Any, Dict, Iterable, List, Optional, Union

from maxbpd.grid import (
    BoundaryViolation,
    EdgeMismatch,
    GridError,
    Mbpd,
    Srpd,
    TILE_LETTERS,
    TileGrid,
    TileKind,
)
from maxbpd.maximal import TraceEvent
from maxbpd.perm import Permutation, PermutationError

logger = logging.getLogger(__name__)

EVENT_KINDS = ("droop", "skip", "mini_undroop")


class DecodeError(Exception):
    """Exception raised for a document that does not describe a valid diagram."""

    def __init__(self, message: str, row: Optional[int] = None, col: Optional[int] = None):
        """Initialize with the position of the first offense when there is one."""
        self.row = row
        self.col = col
        if row is not None and col is not None:
            message = f"{message} at row {row}, column {col}"
        elif row is not None:
            message = f"{message} at row {row}"
        super().__init__(message)


def mbpd_document(value: Union[Mbpd, Srpd]) -> Dict[str, Any]:
    """Build the canonical document: n, perm, tiles, stars (SRPD only), rwt, cwt."""
    if isinstance(value, Srpd):
        mbpd = Mbpd.from_grid(value.grid)
        doc = {
            "n": mbpd.n,
            "perm": list(value.perm.images),
            "tiles": value.grid.rows(),
            "stars": [list(cell) for cell in sorted(value.stars)],
        }
    else:
        mbpd = value
        doc = {"n": mbpd.n, "perm": list(mbpd.perm.images), "tiles": mbpd.grid.rows()}
    doc["rwt"] = list(mbpd.rwt)
    doc["cwt"] = list(mbpd.cwt)
    return doc


def encode(value: Union[Mbpd, Srpd]) -> str:
    return json.dumps(mbpd_document(value), indent=2) + "\n"


def _expect_int_list(doc: Dict[str, Any], key: str, n: int) -> List[int]:
    value = doc.get(key)
    if not isinstance(value, list) or len(value) != n or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise DecodeError(f"Field '{key}' must be a list of {n} integers")
    return value


def decode_document(doc: Any) -> Union[Mbpd, Srpd]:
    """
    Rebuild a diagram from a parsed document and revalidate it.

    Returns:
        An Srpd when the document carries stars, otherwise an Mbpd.

    Raises:
        DecodeError: Naming the row and column of the first offense.
    """
    if not isinstance(doc, dict):
        raise DecodeError("Document must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DecodeError("Field 'n' must be a positive integer")

    tiles = doc.get("tiles")
    if not isinstance(tiles, list) or len(tiles) != n:
        raise DecodeError(f"Field 'tiles' must hold {n} rows")
    for row, text in enumerate(tiles, start=1):
        if not isinstance(text, str):
            raise DecodeError("Tile row is not a string", row)
        for col, letter in enumerate(text, start=1):
            if letter not in TILE_LETTERS:
                raise DecodeError(f"Unknown tile letter '{letter}'", row, col)
        if len(text) != n:
            raise DecodeError(f"Tile row has length {len(text)}, expected {n}", row)

    grid = TileGrid.from_rows(tiles)
    try:
        mbpd = Mbpd.from_grid(grid)
    except EdgeMismatch as e:
        raise DecodeError(f"Edge mismatch on the {e.direction} side", e.row, e.col)
    except BoundaryViolation as e:
        if e.side in ("bottom", "top"):
            row, col = (n if e.side == "bottom" else 1), e.index
        else:
            row, col = e.index, (n if e.side == "right" else 1)
        raise DecodeError(f"Boundary violation on the {e.side} edge", row, col)
    except GridError as e:
        raise DecodeError(str(e))

    try:
        perm = Permutation(tuple(_expect_int_list(doc, "perm", n)))
    except PermutationError as e:
        raise DecodeError(f"Field 'perm' is not a permutation: {e}")
    if perm != mbpd.perm:
        mismatch = next(i for i in range(1, n + 1) if perm(i) != mbpd.perm(i))
        raise DecodeError(f"Tiles read as {mbpd.perm}, not {perm}", mismatch, n)
    if tuple(_expect_int_list(doc, "rwt", n)) != mbpd.rwt:
        raise DecodeError(f"Field 'rwt' disagrees with the tiles {list(mbpd.rwt)}")
    if tuple(_expect_int_list(doc, "cwt", n)) != mbpd.cwt:
        raise DecodeError(f"Field 'cwt' disagrees with the tiles {list(mbpd.cwt)}")

    if "stars" not in doc:
        return mbpd

    stars = doc["stars"]
    if not isinstance(stars, list):
        raise DecodeError("Field 'stars' must be a list of [row, col] pairs")
    cells = set()
    for entry in stars:
        if not (isinstance(entry, list) and len(entry) == 2 and all(isinstance(v, int) for v in entry)):
            raise DecodeError(f"Star entry {entry!r} is not a [row, col] pair")
        row, col = entry
        if not (1 <= row <= n and 1 <= col <= n):
            raise DecodeError("Star outside the grid", row, col)
        if grid[row, col] != TileKind.H:
            raise DecodeError("Star on a non-horizontal tile", row, col)
        cells.add((row, col))
    per_pipe = {p: 0 for p in range(1, n + 1)}
    for row, _ in cells:
        per_pipe[perm(row)] += 1
    return Srpd(grid=grid, perm=perm, stars=frozenset(cells), per_pipe_stars=per_pipe)


def decode(text: Union[str, bytes]) -> Union[Mbpd, Srpd]:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise DecodeError(f"Document is not valid JSON: {e}")
    value = decode_document(doc)
    logger.debug(f"Decoded {type(value).__name__} of size {value.grid.n}")
    return value


def event_document(event: TraceEvent) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"kind": event.kind, "pipe": event.pipe}
    if event.kind == "droop":
        doc["cut"] = list(event.cut)
    elif event.kind == "mini_undroop":
        doc["se"] = list(event.se)
        doc["nw"] = list(event.nw)
    if event.kind != "skip":
        doc["deltas"] = [list(delta) for delta in event.deltas]
    return doc


def encode_trace(events: Iterable[TraceEvent]) -> str:
    """Serialize events as a JSON array, one event per line."""
    lines = [json.dumps(event_document(event), ensure_ascii=False) for event in events]
    if not lines:
        return "[]\n"
    return "[\n" + ",\n".join(lines) + "\n]\n"


def _cell(doc: Dict[str, Any], key: str, index: int):
    value = doc.get(key)
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise DecodeError(f"Event {index} needs a [row, col] '{key}'")
    return tuple(value)


def decode_trace(text: Union[str, bytes]) -> List[TraceEvent]:
    """
    Parse an event log written by encode_trace.

    Raises:
        DecodeError: For malformed events; row and column point into deltas.
    """
    try:
        docs = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise DecodeError(f"Trace is not valid JSON: {e}")
    if not isinstance(docs, list):
        raise DecodeError("Trace must be a JSON array")

    events = []
    for index, doc in enumerate(docs):
        if not isinstance(doc, dict) or doc.get("kind") not in EVENT_KINDS:
            raise DecodeError(f"Event {index} has no valid kind")
        pipe = doc.get("pipe")
        if not isinstance(pipe, int):
            raise DecodeError(f"Event {index} has no pipe")
        event = TraceEvent(kind=doc["kind"], pipe=pipe)
        if event.kind == "droop":
            event.cut = _cell(doc, "cut", index)
        elif event.kind == "mini_undroop":
            event.se = _cell(doc, "se", index)
            event.nw = _cell(doc, "nw", index)
        for delta in doc.get("deltas", []):
            if not (isinstance(delta, list) and len(delta) == 4):
                raise DecodeError(f"Event {index} has a malformed delta {delta!r}")
            row, col, old, new = delta
            for letter in (old, new):
                if not isinstance(letter, str) or len(letter) != 1 or letter not in TILE_LETTERS:
                    raise DecodeError(f"Unknown tile letter {letter!r} in event {index}", row, col)
            event.deltas.append((row, col, old, new))
        events.append(event)
    return events
