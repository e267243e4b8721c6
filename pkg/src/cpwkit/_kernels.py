"""Hot per-frequency kernels with numba acceleration and a pure-numpy fallback.

The sub-network-growth connection formula is evaluated once per joined port
pair for every frequency point; the design-tuning loop re-assembles the
eight-part hybrid on each cost evaluation, so this is the package's hot spot.

Path selection (decided at import time):
  * default           - numba @njit kernels (cached to disk)
  * CPWKIT_FORCE_NUMPY=1 - vectorized numpy implementations
  * CPWKIT_THREADS=N (N>1) - numba prange kernel over frequency points;
    rows are disjoint writes, so results are bitwise identical to serial.

``innerconnect_s(s, k, l)`` joins ports k and l of one (F, N, N) scattering
array and returns the (F, N-2, N-2) result plus the per-frequency connection
denominator (for singularity diagnostics).  ``cascade_t`` chains 2x2 transfer
matrices.
"""

import os

import numpy as np

FORCE_NUMPY = os.environ.get("CPWKIT_FORCE_NUMPY", "") not in ("", "0")

try:
    _threads = int(os.environ.get("CPWKIT_THREADS", "1"))
except ValueError:
    _threads = 1

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _innerconnect_py(s, k, l, out, den):
    # Sub-network growth: close ports k and l of a single N-port.
    # C_ij = S_ij + [S_kj S_il (1-S_lk) + S_lj S_ik (1-S_kl)
    #                + S_kj S_ll S_ik + S_lj S_kk S_il] / den
    # den  = (1-S_kl)(1-S_lk) - S_kk S_ll
    nf, n, _ = s.shape
    for fi in range(nf):
        skl = s[fi, k, l]
        slk = s[fi, l, k]
        skk = s[fi, k, k]
        sll = s[fi, l, l]
        akl = 1.0 - skl
        alk = 1.0 - slk
        d = akl * alk - skk * sll
        den[fi] = d
        ii = 0
        for i in range(n):
            if i == k or i == l:
                continue
            sik = s[fi, i, k]
            sil = s[fi, i, l]
            jj = 0
            for j in range(n):
                if j == k or j == l:
                    continue
                skj = s[fi, k, j]
                slj = s[fi, l, j]
                out[fi, ii, jj] = s[fi, i, j] + (
                    skj * sil * alk + slj * sik * akl + skj * sll * sik + slj * skk * sil
                ) / d
                jj += 1
            ii += 1


def _innerconnect_par_py(s, k, l, out, den):  # pragma: no cover - exercised via numba
    nf, n, _ = s.shape
    for fi in numba.prange(nf):
        skl = s[fi, k, l]
        slk = s[fi, l, k]
        skk = s[fi, k, k]
        sll = s[fi, l, l]
        akl = 1.0 - skl
        alk = 1.0 - slk
        d = akl * alk - skk * sll
        den[fi] = d
        ii = 0
        for i in range(n):
            if i == k or i == l:
                continue
            sik = s[fi, i, k]
            sil = s[fi, i, l]
            jj = 0
            for j in range(n):
                if j == k or j == l:
                    continue
                skj = s[fi, k, j]
                slj = s[fi, l, j]
                out[fi, ii, jj] = s[fi, i, j] + (
                    skj * sil * alk + slj * sik * akl + skj * sll * sik + slj * skk * sil
                ) / d
                jj += 1
            ii += 1


def _cascade_py(ta, tb, out):
    nf = ta.shape[0]
    for fi in range(nf):
        a00 = ta[fi, 0, 0]
        a01 = ta[fi, 0, 1]
        a10 = ta[fi, 1, 0]
        a11 = ta[fi, 1, 1]
        b00 = tb[fi, 0, 0]
        b01 = tb[fi, 0, 1]
        b10 = tb[fi, 1, 0]
        b11 = tb[fi, 1, 1]
        out[fi, 0, 0] = a00 * b00 + a01 * b10
        out[fi, 0, 1] = a00 * b01 + a01 * b11
        out[fi, 1, 0] = a10 * b00 + a11 * b10
        out[fi, 1, 1] = a10 * b01 + a11 * b11


def innerconnect_numpy(s, k, l):
    """Vectorized fallback; same contract as the numba kernel."""
    nf, n, _ = s.shape
    keep = [i for i in range(n) if i not in (k, l)]
    akl = 1.0 - s[:, k, l]
    alk = 1.0 - s[:, l, k]
    den = akl * alk - s[:, k, k] * s[:, l, l]
    # outer products over the kept rows/columns, broadcast over frequency
    sik = s[:, keep, k][:, :, None]
    sil = s[:, keep, l][:, :, None]
    skj = s[:, k, keep][:, None, :]
    slj = s[:, l, keep][:, None, :]
    num = (
        skj * sil * alk[:, None, None]
        + slj * sik * akl[:, None, None]
        + skj * s[:, l, l][:, None, None] * sik
        + slj * s[:, k, k][:, None, None] * sil
    )
    out = s[np.ix_(range(nf), keep, keep)] + num / den[:, None, None]
    return np.ascontiguousarray(out), den


def cascade_numpy(ta, tb):
    return ta @ tb


if HAVE_NUMBA and not FORCE_NUMPY:
    _innerconnect_jit = numba.njit(cache=True)(_innerconnect_py)
    _cascade_jit = numba.njit(cache=True)(_cascade_py)
    if _threads > 1:
        numba.set_num_threads(_threads)
        _innerconnect_par = numba.njit(parallel=True, cache=True)(_innerconnect_par_py)
    else:
        _innerconnect_par = None

    def innerconnect_numba(s, k, l):
        nf, n, _ = s.shape
        out = np.empty((nf, n - 2, n - 2), dtype=np.complex128)
        den = np.empty(nf, dtype=np.complex128)
        kern = _innerconnect_par if _innerconnect_par is not None else _innerconnect_jit
        kern(s, k, l, out, den)
        return out, den

    def cascade_numba(ta, tb):
        out = np.empty_like(ta)
        _cascade_jit(ta, tb, out)
        return out

    innerconnect_s = innerconnect_numba
    cascade_t = cascade_numba
    BACKEND = "numba" if _threads <= 1 else f"numba[{_threads} threads]"
else:
    innerconnect_s = innerconnect_numpy
    cascade_t = cascade_numpy
    BACKEND = "numpy"
