"""Utility functions for maxbpd."""

import sys
from pathlib import Path
from typing import List, Optional, Sequence, Union

from maxbpd.perm import Permutation, parse_permutation


def format_vector(values: Sequence[int]) -> str:
    """Comma-separated entries, e.g. "3,3,1,2,0,0"."""
    return ",".join(str(v) for v in values)


def write_output(text: Union[str, bytes], out: Optional[Union[str, Path]] = None) -> None:
    """Write text to a file, or to stdout when no path (or "-") is given."""
    if out is None or str(out) == "-":
        sys.stdout.write(text if isinstance(text, str) else text.decode("utf-8"))
        sys.stdout.flush()
        return
    path = Path(out)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def read_sample_file(path: Union[str, Path]) -> List[Permutation]:
    """
    Read one permutation per line, ignoring blank lines and '#' comments.

    Raises:
        OSError: If the file cannot be read.
        PermutationError: If a line is not a permutation.
    """
    perms = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            text = line.split("#", 1)[0].strip()
            if text:
                perms.append(parse_permutation(text))
    return perms


def format_verification_summary(total: int, failures: int, smallest: Optional[str] = None) -> str:
    """Format the one-line verification summary shown on stderr."""
    message = f"{total - failures}/{total} permutations pass"
    if failures:
        message += f"; smallest counterexample: {smallest}"
    return message
