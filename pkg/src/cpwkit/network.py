"""Frequency sweeps, N-port scattering networks, and the algebra to combine them.

All networks share one real reference impedance (50 ohm unless stated) and are
immutable after construction.  Scattering data is stored as a complex
(F, N, N) array, one matrix per sweep point; per-frequency computations are
independent, so every operation here is safe to evaluate as a parallel map
over frequency.

Port bookkeeping after interconnection: remaining ports of the first operand
(in their original order) followed by remaining ports of the second.  This
ordering is part of the public contract and covered by tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateNetwork, IncompatibleNetworks, InvalidArgument

C0 = 299792458.0  # speed of light, m/s

# Algebraic identities (conversions, orderings) hold to STRUCTURAL_TOL;
# model-level statements (unitarity of lossless elements and the like) to
# PHYSICAL_TOL.  Both are defaults, not hard-wired.
STRUCTURAL_TOL = 1e-12
PHYSICAL_TOL = 1e-9
SINGULARITY_TOL = 1e-9  # connection denominators smaller than this get flagged


@dataclass(frozen=True)
class FrequencySweep:
    """Strictly increasing positive frequencies, in Hz."""

    f: np.ndarray

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.f, dtype=float))
        if f.ndim != 1 or f.size < 1:
            raise InvalidArgument("sweep needs at least one frequency")
        if np.any(f <= 0):
            raise InvalidArgument("frequencies must be positive")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise InvalidArgument("frequencies must be strictly increasing")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    def __len__(self) -> int:
        return self.f.size

    def __iter__(self):
        return iter(self.f)

    @property
    def start(self) -> float:
        return float(self.f[0])

    @property
    def stop(self) -> float:
        return float(self.f[-1])

    def same_as(self, other: "FrequencySweep") -> bool:
        return self.f.shape == other.f.shape and bool(np.array_equal(self.f, other.f))


def make_sweep(start: float, stop: float, n: int) -> FrequencySweep:
    """Uniform sweep of ``n`` points from ``start`` to ``stop`` inclusive."""
    if start <= 0:
        raise InvalidArgument("start frequency must be positive")
    if n == 1:
        if start != stop:
            raise InvalidArgument("n = 1 requires start == stop")
        return FrequencySweep(np.array([start]))
    if n < 2:
        raise InvalidArgument("n must be >= 2 (or 1 with start == stop)")
    if stop <= start:
        raise InvalidArgument("stop must exceed start")
    return FrequencySweep(np.linspace(start, stop, n))


@dataclass(frozen=True)
class ConnectionFlag:
    """Diagnostic attached to a network instead of failing mid-sweep."""

    frequency_hz: float
    kind: str  # "singular-connection" | "unmeasured" | "excluded"
    detail: str = ""


@dataclass(frozen=True)
class SMatrix:
    """Single-frequency N x N scattering matrix."""

    m: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgument("S-matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def order(self) -> int:
        return self.m.shape[0]

    def max_singular_value(self) -> float:
        if self.order == 0:
            return 0.0
        return float(np.linalg.svd(self.m, compute_uv=False)[0])

    def is_passive(self, tol: float = PHYSICAL_TOL) -> bool:
        return self.max_singular_value() <= 1.0 + tol


@dataclass(frozen=True)
class Network:
    """S-parameters over a sweep: complex array of shape (F, N, N)."""

    sweep: FrequencySweep
    s: np.ndarray
    z0: float = 50.0
    port_labels: tuple[str, ...] | None = None
    flags: tuple[ConnectionFlag, ...] = field(default=())

    def __post_init__(self):
        s = np.ascontiguousarray(np.asarray(self.s, dtype=complex))
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise InvalidArgument("scattering data must have shape (F, N, N)")
        if s.shape[0] != len(self.sweep):
            raise InvalidArgument(
                f"{s.shape[0]} matrices for {len(self.sweep)} sweep points"
            )
        if self.z0 <= 0:
            raise InvalidArgument("reference impedance must be positive")
        if not np.all(np.isfinite(s)) and not self.flags:
            raise InvalidArgument(
                "non-finite S-parameters require explanatory flags"
            )
        if self.port_labels is not None:
            labels = tuple(self.port_labels)
            if len(labels) != s.shape[1]:
                raise InvalidArgument("one label per port required")
            object.__setattr__(self, "port_labels", labels)
        s.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def nports(self) -> int:
        return self.s.shape[1]

    @property
    def f(self) -> np.ndarray:
        return self.sweep.f

    def smatrix(self, i: int) -> SMatrix:
        return SMatrix(self.s[i], self.z0)

    def port(self, ref: int | str) -> int:
        """Resolve a 0-based index or a port label to an index."""
        if isinstance(ref, str):
            if self.port_labels is None or ref not in self.port_labels:
                raise InvalidArgument(f"no port labeled {ref!r}")
            return self.port_labels.index(ref)
        if not 0 <= ref < self.nports:
            raise InvalidArgument(f"port {ref} out of range for {self.nports}-port")
        return int(ref)

    def with_labels(self, labels: tuple[str, ...] | None) -> "Network":
        return Network(self.sweep, self.s, self.z0, labels, self.flags)

    def max_singular_value(self) -> float:
        if self.nports == 0:
            return 0.0
        return float(np.linalg.svd(self.s, compute_uv=False).max())


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 wave-cascading (T) matrices per frequency; line = diag(e^-gl, e^+gl)."""

    sweep: FrequencySweep
    t: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        t = np.ascontiguousarray(np.asarray(self.t, dtype=complex))
        if t.ndim != 3 or t.shape[1:] != (2, 2):
            raise InvalidArgument("transfer data must have shape (F, 2, 2)")
        if t.shape[0] != len(self.sweep):
            raise InvalidArgument("one T-matrix per sweep point required")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)


def _check_compatible(a: Network | TransferMatrix, b: Network | TransferMatrix):
    if not a.sweep.same_as(b.sweep):
        raise IncompatibleNetworks("sweeps differ")
    if a.z0 != b.z0:
        raise IncompatibleNetworks(f"reference impedances differ ({a.z0} vs {b.z0})")


def s_to_t(net: Network) -> TransferMatrix:
    """2-port S to wave-cascading T; requires S21 != 0 at every frequency."""
    if net.nports != 2:
        raise InvalidArgument("s_to_t is defined for 2-ports only")
    s = net.s
    s21 = s[:, 1, 0]
    bad = np.nonzero(s21 == 0)[0]
    if bad.size:
        raise DegenerateNetwork("S21 = 0, no transfer form", float(net.f[bad[0]]))
    det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
    t = np.empty_like(s)
    t[:, 0, 0] = -det / s21
    t[:, 0, 1] = s[:, 0, 0] / s21
    t[:, 1, 0] = -s[:, 1, 1] / s21
    t[:, 1, 1] = 1.0 / s21
    return TransferMatrix(net.sweep, t, net.z0)


def t_to_s(tm: TransferMatrix, port_labels=None, flags=()) -> Network:
    """Inverse of :func:`s_to_t`; requires T22 != 0 at every frequency."""
    t = tm.t
    t22 = t[:, 1, 1]
    bad = np.nonzero(t22 == 0)[0]
    if bad.size:
        raise DegenerateNetwork("T22 = 0, no scattering form", float(tm.sweep.f[bad[0]]))
    det = t[:, 0, 0] * t[:, 1, 1] - t[:, 0, 1] * t[:, 1, 0]
    s = np.empty_like(t)
    s[:, 0, 0] = t[:, 0, 1] / t22
    s[:, 0, 1] = det / t22
    s[:, 1, 0] = 1.0 / t22
    s[:, 1, 1] = -t[:, 1, 0] / t22
    return Network(tm.sweep, s, tm.z0, port_labels, tuple(flags))


def cascade(a: Network, b: Network) -> Network:
    """Chain two 2-ports: port 2 of ``a`` into port 1 of ``b``."""
    _check_compatible(a, b)
    ta, tb = s_to_t(a), s_to_t(b)
    t = _kernels.cascade_t(ta.t, tb.t)
    return t_to_s(TransferMatrix(a.sweep, t, a.z0), flags=a.flags + b.flags)


def compose(a: Network, b: Network) -> Network:
    """Disjoint union: block-diagonal (Na+Nb)-port with no connections made."""
    _check_compatible(a, b)
    na, nb = a.nports, b.nports
    nf = len(a.sweep)
    s = np.zeros((nf, na + nb, na + nb), dtype=complex)
    s[:, :na, :na] = a.s
    s[:, na:, na:] = b.s
    labels = None
    if a.port_labels is not None and b.port_labels is not None:
        labels = a.port_labels + b.port_labels
    return Network(a.sweep, s, a.z0, labels, a.flags + b.flags)


def self_connect(a: Network, p: int, q: int) -> Network:
    """Join ports ``p`` and ``q`` of one network (sub-network growth formula).

    Near-singular connection denominators are recorded as
    ``singular-connection`` flags rather than raised, so sweeps complete.
    """
    p, q = a.port(p), a.port(q)
    if p == q:
        raise InvalidArgument("cannot connect a port to itself")
    if a.nports == 2:
        # degenerate closure: a 2-port eaten whole leaves a 0-port
        out = np.empty((len(a.sweep), 0, 0), dtype=complex)
        den = (1 - a.s[:, p, q]) * (1 - a.s[:, q, p]) - a.s[:, p, p] * a.s[:, q, q]
    else:
        out, den = _kernels.innerconnect_s(a.s, p, q)
    flags = list(a.flags)
    for fi in np.nonzero(np.abs(den) < SINGULARITY_TOL)[0]:
        flags.append(
            ConnectionFlag(
                float(a.f[fi]), "singular-connection", f"|den| = {abs(den[fi]):.3e}"
            )
        )
    labels = None
    if a.port_labels is not None:
        labels = tuple(l for i, l in enumerate(a.port_labels) if i not in (p, q))
    return Network(a.sweep, out, a.z0, labels, tuple(flags))


def innerconnect(a: Network, pa: int, b: Network, pb: int) -> Network:
    """Connect port ``pa`` of ``a`` to port ``pb`` of ``b``.

    Result ports: remaining a-ports (original order), then remaining b-ports.
    """
    pa = a.port(pa)
    pb = b.port(pb)
    return self_connect(compose(a, b), pa, a.nports + pb)


def terminate_port(a: Network, p: int, gamma) -> Network:
    """Close port ``p`` with a reflection ``gamma`` (scalar or per-frequency).

    With ``gamma = 0`` the result is exactly the sub-matrix of S with row and
    column ``p`` deleted.
    """
    p = a.port(p)
    gamma = np.asarray(gamma, dtype=complex)
    if gamma.ndim == 0:
        gamma = np.full(len(a.sweep), complex(gamma))
    elif gamma.shape != (len(a.sweep),):
        raise InvalidArgument("gamma must be scalar or one value per frequency")
    if np.any(np.abs(gamma) > 1 + PHYSICAL_TOL):
        warnings.warn("active termination: |gamma| > 1", stacklevel=2)
    keep = [i for i in range(a.nports) if i != p]
    spp = a.s[:, p, p]
    sip = a.s[:, keep, p]
    spj = a.s[:, p, keep]
    g = gamma[:, None, None]
    out = a.s[np.ix_(range(len(a.sweep)), keep, keep)] + (
        g * sip[:, :, None] * spj[:, None, :]
    ) / (1 - gamma * spp)[:, None, None]
    labels = None
    if a.port_labels is not None:
        labels = tuple(l for i, l in enumerate(a.port_labels) if i != p)
    return Network(a.sweep, out, a.z0, labels, a.flags)


def flipped(net: Network) -> Network:
    """2-port with its ports swapped (the time-reverse mirror)."""
    if net.nports != 2:
        raise InvalidArgument("flipped is defined for 2-ports only")
    labels = None if net.port_labels is None else net.port_labels[::-1]
    return Network(net.sweep, net.s[:, ::-1, ::-1], net.z0, labels, net.flags)


def permute_ports(net: Network, order) -> Network:
    """Reorder ports; ``order[i]`` names the old port that becomes new port i."""
    order = [net.port(p) for p in order]
    if sorted(order) != list(range(net.nports)):
        raise InvalidArgument("order must be a permutation of all ports")
    idx = np.ix_(range(len(net.sweep)), order, order)
    labels = None
    if net.port_labels is not None:
        labels = tuple(net.port_labels[i] for i in order)
    return Network(net.sweep, net.s[idx], net.z0, labels, net.flags)


def assemble(
    parts: list[Network],
    joints: list[tuple[tuple[int, int], tuple[int, int]]],
    external: list[tuple[int, int]],
    labels: tuple[str, ...] | None = None,
) -> Network:
    """Wire a set of networks into one.

    ``joints`` lists internal connections ((part, port), (part, port));
    ``external`` fixes the output port order as (part, port) pairs.  Every
    part port must appear exactly once across joints and external.
    """
    if not parts:
        raise InvalidArgument("no parts to assemble")
    seen = set()
    for (pi, pp), (qi, qp) in joints:
        for ref in ((pi, pp), (qi, qp)):
            if ref in seen:
                raise InvalidArgument(f"part port {ref} referenced twice")
            seen.add(ref)
    for ref in external:
        if tuple(ref) in seen:
            raise InvalidArgument(f"part port {tuple(ref)} both joined and external")
        seen.add(tuple(ref))
    want = {(i, p) for i, part in enumerate(parts) for p in range(part.nports)}
    if seen != want:
        missing = sorted(want - seen)
        extra = sorted(seen - want)
        raise InvalidArgument(f"port coverage mismatch: missing {missing}, unknown {extra}")

    # index map (part, port) -> current composite port
    net = parts[0]
    index = {(0, p): p for p in range(parts[0].nports)}
    for i, part in enumerate(parts[1:], start=1):
        base = net.nports
        net = compose(net, part)
        index.update({(i, p): base + p for p in range(part.nports)})

    def drop(k, l):
        for key, v in list(index.items()):
            if v in (k, l):
                del index[key]
            elif v > max(k, l):
                index[key] = v - 2
            elif v > min(k, l):
                index[key] = v - 1

    for (pi, pp), (qi, qp) in joints:
        k, l = index[(pi, pp)], index[(qi, qp)]
        net = self_connect(net, k, l)
        drop(k, l)

    order = [index[tuple(ref)] for ref in external]
    return permute_ports(net, order).with_labels(labels)


# ---------------------------------------------------------------------------
# invariant checks


def reciprocity_error(net: Network) -> float:
    """max |S - S^T| over the sweep."""
    return float(np.abs(net.s - net.s.transpose(0, 2, 1)).max(initial=0.0))


def unitarity_error(net: Network) -> float:
    """max |S^H S - I| over the sweep (0 for lossless networks)."""
    n = net.nports
    if n == 0:
        return 0.0
    prod = net.s.conj().transpose(0, 2, 1) @ net.s
    return float(np.abs(prod - np.eye(n)).max())


def passivity_margin(net: Network) -> float:
    """Largest singular value of S over the sweep; <= 1 means passive."""
    return net.max_singular_value()


def max_delta(a: Network, b: Network) -> float:
    """max elementwise |S_a - S_b|; operands must be compatible."""
    _check_compatible(a, b)
    if a.nports != b.nports:
        raise IncompatibleNetworks("port counts differ")
    return float(np.abs(a.s - b.s).max(initial=0.0))
