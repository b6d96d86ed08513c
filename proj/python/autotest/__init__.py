"""Learn semantic-domain constraints from a table corpus and flag cell values
that fall outside their column's domain."""

from ._autotest import *  # noqa: F401,F403
from ._autotest import DataError, LpError  # noqa: F401

__version__ = "0.1.0"
