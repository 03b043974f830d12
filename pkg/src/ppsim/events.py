from typing import NamedTuple


class Event(NamedTuple):
    """A ``(time, value)`` pair.

    The meaning of ``value`` depends on the container: an absolute level for the
    first event of a piecewise-constant encoding, a jump for the following ones,
    or a node index in a queue of pending points.
    """

    time: float
    value: float
