# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Next-point generation: inversion for piecewise-constant intensities, and thinning."""
from cython.operator cimport dereference as deref, preincrement as inc
from libc.math cimport isfinite, log

from ppsim.rng cimport RngStream
from ppsim.scheduler cimport Scheduler, event_tree

from ppsim.errors import CorruptedIntensityError, DominationError, InvalidArgumentError

cdef double _CLAMP_TOL = 1e-12
CLAMP_TOL = _CLAMP_TOL
DEFAULT_MAX_REJECTIONS = 10 ** 6


cdef double clamp_level(double level) except? -1.0:
    if level >= 0.0:
        return level
    if level < -_CLAMP_TOL:
        raise CorruptedIntensityError(f"intensity level {level!r} is negative")
    return 0.0


cdef int next_point(Scheduler q, RngStream rng, double* out) except -1:
    """Invert the integrated intensity against an Exp(1) draw.

    Returns 1 and writes the time to ``out``, or returns 0 when the integral
    stays below the draw forever (final level zero).
    """
    cdef event_tree.iterator it = q.tree.begin()
    cdef event_tree.iterator stop = q.tree.end()
    cdef double target = -log(rng.next_uniform())
    cdef double t_cur = deref(it).first
    cdef double level = deref(it).second
    cdef double acc = 0.0, lv, seg, t_brk
    inc(it)
    while it != stop:
        lv = clamp_level(level)
        t_brk = deref(it).first
        seg = (t_brk - t_cur) * lv
        if acc + seg > target:
            out[0] = t_cur + (target - acc) / lv
            return 1
        acc += seg
        level += deref(it).second
        t_cur = t_brk
        inc(it)
    lv = clamp_level(level)
    if lv <= 0.0:
        return 0
    out[0] = t_cur + (target - acc) / lv
    return 1


def get_t_next(Scheduler q, RngStream rng):
    """Next point of the intensity encoded by ``q``, started at ``q``'s first event.

    Consumes exactly one uniform. Returns ``None`` when no further point occurs.
    """
    if len(q) == 0:
        raise InvalidArgumentError("cannot sample from an empty intensity scheduler")
    cdef double t
    if next_point(q, rng, &t):
        return t
    return None


def thin_next(intensity, double lam_star, double t0, RngStream rng,
              max_rejections=DEFAULT_MAX_REJECTIONS):
    """Next point after ``t0`` by thinning under the constant bound ``lam_star``.

    Candidates arrive at rate ``lam_star`` and are kept with probability
    ``intensity(t) / lam_star``.
    """
    if not (lam_star > 0.0 and isfinite(lam_star)):
        raise InvalidArgumentError(f"dominating rate must be positive and finite, got {lam_star!r}")
    cdef double t = t0, lam
    cdef long rejected = 0
    while True:
        t += -log(rng.next_uniform()) / lam_star
        lam = intensity(t)
        if lam > lam_star:
            raise DominationError(f"intensity {lam!r} exceeds bound {lam_star!r} at t={t!r}")
        if rng.next_uniform() * lam_star <= lam:
            return t
        rejected += 1
        if rejected >= max_rejections:
            raise DominationError(
                f"no candidate accepted after {rejected} rejections from t0={t0!r}")
