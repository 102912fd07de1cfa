"""
JSON helpers shared by the models.
"""
import json
from contextlib import contextmanager
from typing import Iterator, Optional

from euler_haar.utils.errors import ParseError


class JsonRecord:
    """Adds ``to_json`` to any model that defines ``to_dict``."""

    __slots__ = ()

    def to_json(self, indent: Optional[int] = 2) -> str:
        """Convert the record to a JSON string.

        Args:
            indent: Number of spaces for indentation. Use None for compact output.
        """
        return json.dumps(self.to_dict(), indent=indent, default=str)


@contextmanager
def parsing(what: str) -> Iterator[None]:
    """Turn malformed-record errors raised inside the block into ParseError."""
    try:
        yield
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ParseError(f"Invalid {what}: {e}") from e
