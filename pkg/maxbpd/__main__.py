"""Main entry point for the maxbpd command line tool."""

import sys
import logging
from typing import List, Optional

from maxbpd.cli import run_cli


def main(argv: Optional[List[str]] = None) -> int:
    """Main function for the maxbpd command line tool."""
    return run_cli(argv)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logging.debug("Program interrupted by user")
        sys.exit(1)
