"""Resource caps shared by object constructions and enumerations."""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_MAX_ELEMENTS = 200_000
DEFAULT_MAX_PAIRS = 10_000_000


@dataclass(frozen=True)
class Caps:
    """Hard limits: carrier sizes and pair/enumeration budgets.

    max_elements bounds the size of any single carrier (and the number of
    monotone maps a hom construction may enumerate); max_pairs bounds order
    matrices and relation enumerations.  Exceeding either raises
    SizeCapExceeded rather than degrading.
    """

    max_elements: int = DEFAULT_MAX_ELEMENTS
    max_pairs: int = DEFAULT_MAX_PAIRS


DEFAULT_CAPS = Caps()
