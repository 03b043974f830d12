# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Time-ordered event sets and their use as piecewise-constant functions.

A :class:`Scheduler` holds events ``(time, value)`` with strictly increasing
times, backed by an order-statistics red-black tree, so insert, remove, locate
and rank queries cost ``O(log n)``.

Read as a piecewise-constant function, the first event carries the level at its
time and each later event carries the jump at its own time; the function at
``s`` is the sum of the values of all events with ``time <= s``, and the last
level extends to ``+inf``.  Under this reading the union of two schedulers is
the pointwise sum of the encoded functions.
"""
from cython.operator cimport dereference as deref, preincrement as inc
from libc.math cimport isfinite, isnan

from ppsim.errors import EmptySchedulerError, InvalidArgumentError
from ppsim.events import Event


cdef inline double _checked_time(object t) except? -1.0:
    cdef double x = t
    if not isfinite(x):
        raise InvalidArgumentError(f"event time must be finite, got {t!r}")
    return x


cdef class Scheduler:
    """Ordered event set.

    ``Scheduler(events)`` inserts each ``(time, value)`` pair in turn, so pairs
    sharing a time are merged by summing their values.
    """

    def __init__(self, events=()):
        for t, v in events:
            self.insert(t, v)

    # -- C-level primitives used by the simulators -------------------------

    cdef void add(self, double t, double v) noexcept:
        self.tree[t] += v

    cdef void add_shifted(self, Scheduler other, double dt) noexcept:
        cdef event_tree.iterator it = other.tree.begin()
        cdef event_tree.iterator stop = other.tree.end()
        while it != stop:
            self.tree[deref(it).first + dt] += deref(it).second
            inc(it)

    cdef void drop_through(self, double t) noexcept:
        cdef event_tree.iterator it = self.tree.begin()
        while it != self.tree.end() and deref(it).first <= t:
            it = self.tree.erase(it)

    cdef double collapse_to(self, double t) noexcept:
        # Caller guarantees a non-empty tree whose first time is <= t.
        cdef event_tree.iterator it = self.tree.begin()
        cdef double total = deref(it).second
        if deref(it).first == t:
            inc(it)
            if it == self.tree.end() or deref(it).first > t:
                return total
        else:
            inc(it)
        while it != self.tree.end() and deref(it).first <= t:
            total += deref(it).second
            inc(it)
        self.drop_through(t)
        self.tree[t] = total
        return total

    cdef double sum_through(self, double s) noexcept:
        cdef event_tree.iterator it = self.tree.begin()
        cdef double total = 0.0
        while it != self.tree.end() and deref(it).first <= s:
            total += deref(it).second
            inc(it)
        return total

    cdef double start(self) noexcept:
        return deref(self.tree.begin()).first

    cdef double head_value(self) noexcept:
        return deref(self.tree.begin()).second

    # -- Python API ----------------------------------------------------------

    def insert(self, time, double value):
        """Insert ``(time, value)``; an existing event at ``time`` has ``value`` added."""
        self.tree[_checked_time(time)] += value

    def remove(self, time):
        """Delete the event at exactly ``time``; absent times are ignored."""
        cdef double t = time
        if not isnan(t):
            self.tree.erase(t)

    def pop_first(self):
        """Remove and return the earliest event."""
        if self.tree.empty():
            raise EmptySchedulerError("pop_first on an empty scheduler")
        cdef event_tree.iterator it = self.tree.begin()
        ev = Event(deref(it).first, deref(it).second)
        self.tree.erase(it)
        return ev

    remove_first = pop_first

    def prune(self, time):
        """Drop every event with ``time <= t``."""
        cdef double t = time
        if isnan(t):
            raise InvalidArgumentError("prune time is NaN")
        self.drop_through(t)

    def prune_pcw(self, time):
        """Restrict the encoded function to ``[t, inf)``.

        Events up to ``t`` are replaced by one event at ``t`` holding the level
        there, so the function is unchanged for ``s >= t``.
        """
        if self.tree.empty():
            raise EmptySchedulerError("prune_pcw on an empty scheduler")
        cdef double t = _checked_time(time)
        if t < self.start():
            raise InvalidArgumentError(
                f"prune_pcw at {t!r} precedes the first event at {self.start()!r}")
        self.collapse_to(t)

    def lower_bound(self, time):
        """Index of the last event with ``time <= t``, or ``None``."""
        cdef double t = time
        if isnan(t):
            raise InvalidArgumentError("bound query is NaN")
        cdef Py_ssize_t k = self.tree.order_of_key(t)
        if self.tree.find(t) != self.tree.end():
            return k
        return k - 1 if k > 0 else None

    def upper_bound(self, time):
        """Index of the first event with ``time > t``, or ``None``."""
        cdef double t = time
        if isnan(t):
            raise InvalidArgumentError("bound query is NaN")
        cdef Py_ssize_t k = self.tree.order_of_key(t)
        if self.tree.find(t) != self.tree.end():
            k += 1
        return k if k < <Py_ssize_t>self.tree.size() else None

    def shifted(self, dt):
        """Return a new scheduler with every time translated by ``dt``."""
        cdef double d = dt
        if not isfinite(d):
            raise InvalidArgumentError(f"shift must be finite, got {dt!r}")
        cdef Scheduler out = Scheduler.__new__(Scheduler)
        out.add_shifted(self, d)
        return out

    shift = shifted

    def update(self, Scheduler other, shift=0.0):
        """In-place union with ``other`` translated by ``shift``.

        Iterates ``other`` and inserts into ``self``: pass the smaller scheduler
        as ``other``.
        """
        cdef double d = shift
        if not isfinite(d):
            raise InvalidArgumentError(f"shift must be finite, got {shift!r}")
        if other is self:
            other = self.copy()
        self.add_shifted(other, d)

    def union(self, Scheduler other):
        """Return ``self ∪ other``: the pointwise sum of the encoded functions."""
        cdef Scheduler big = self, small = other
        if small.tree.size() > big.tree.size():
            big, small = small, big
        cdef Scheduler out = big.copy()
        out.add_shifted(small, 0.0)
        return out

    def __or__(self, other):
        if not isinstance(other, Scheduler):
            return NotImplemented
        return self.union(other)

    def evaluate(self, s):
        """Value of the encoded function at ``s`` (``s`` must not precede the first event)."""
        if self.tree.empty():
            raise EmptySchedulerError("evaluate on an empty scheduler")
        cdef double x = s
        if isnan(x) or x < self.start():
            raise InvalidArgumentError(
                f"evaluate at {s!r} precedes the first event at {self.start()!r}")
        return self.sum_through(x)

    def copy(self):
        cdef Scheduler out = Scheduler.__new__(Scheduler)
        out.add_shifted(self, 0.0)
        return out

    @property
    def start_time(self):
        """Time of the earliest event."""
        if self.tree.empty():
            raise EmptySchedulerError("empty scheduler has no start time")
        return self.start()

    def times(self):
        return [e.time for e in self]

    def values(self):
        return [e.value for e in self]

    def dumps(self):
        """One ``time<TAB>value`` line per event, in round-trip precision."""
        return "".join(f"{t!r}\t{v!r}\n" for t, v in self)

    @classmethod
    def loads(cls, text):
        out = cls()
        for line in text.splitlines():
            if line.strip():
                t, v = line.split("\t")
                out.insert(float(t), float(v))
        return out

    def __len__(self):
        return self.tree.size()

    def __getitem__(self, Py_ssize_t k):
        cdef Py_ssize_t n = self.tree.size()
        if k < 0:
            k += n
        if k < 0 or k >= n:
            raise IndexError("scheduler index out of range")
        cdef event_tree.iterator it = self.tree.find_by_order(k)
        return Event(deref(it).first, deref(it).second)

    def __iter__(self):
        cdef event_tree.iterator it = self.tree.begin()
        out = []
        while it != self.tree.end():
            out.append(Event(deref(it).first, deref(it).second))
            inc(it)
        return iter(out)

    def __eq__(self, other):
        if not isinstance(other, Scheduler):
            return NotImplemented
        return list(self) == list(other)

    def __repr__(self):
        return f"Scheduler({[tuple(e) for e in self]!r})"

    def __reduce__(self):
        return (Scheduler, ([tuple(e) for e in self],))
