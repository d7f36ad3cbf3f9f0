"""Pressure, dimension and transfer operators for expanding branch systems.

A branch system is a finite family of contracting inverse branches psi_i
of an expanding map, each sending a common range interval into itself.
Cylinders of depth n are the images of the range under n-fold
compositions, and Q(n, t) = sum |d|^t over them. The pressure P(t) is the
growth rate of Q and its zero is the Hausdorff dimension of the limit set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .quadratic import as_parameter, green_function

METHODS = ("qsum-bisection", "transfer-eigenvalue", "harmonic-lower", "moran-oracle", "periodic-bisection")


class BracketError(ValueError):
    """The pressure does not change sign on the search interval."""


@dataclass
class DimensionEstimate:
    value: float
    method: str
    bracket: tuple[float, float]
    depth: int
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        lo, hi = self.bracket
        if not lo <= self.value <= hi:
            raise ValueError(f"value {self.value} outside bracket {self.bracket}")

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method, "bracket": list(self.bracket),
               "width": self.width, "depth": self.depth}
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# Branch systems


@dataclass
class Cylinders:
    """Depth-n cylinders as log-lengths: the computed value and a lower and
    upper bound from the derivative bracket."""

    log_len: np.ndarray
    log_lo: np.ndarray
    log_hi: np.ndarray
    state: object = None

    def keep(self, mask: np.ndarray) -> "Cylinders":
        st = self.state[mask] if self.state is not None else None
        return Cylinders(self.log_len[mask], self.log_lo[mask], self.log_hi[mask], st)


class LinearSystem:
    """Affine branches of the given ratios spread left to right over [0, 1].

    When the ratios sum past 1 the images overlap; the pressure only sees
    the symbolic cylinder lengths, so the Moran equation still gives its zero.

    There is no distortion, so every pair of depths gives the exact
    pressure and the shallowest pair is the default.
    """

    default_depths = (1, 2)

    def __init__(self, ratios):
        r = np.asarray(ratios, dtype=float)
        if r.ndim != 1 or len(r) == 0 or np.any(r <= 0) or np.any(r >= 1):
            raise ValueError("ratios must lie in (0, 1)")
        self.ratios = r
        self.range = (0.0, 1.0)
        self.offsets = (1.0 - r) * np.arange(len(r)) / max(len(r) - 1, 1)

    @property
    def n_branches(self) -> int:
        return len(self.ratios)

    def inverse(self, x: np.ndarray):
        """psi_i(x) and log|psi_i'(x)| with shape (branches, len(x))."""
        x = np.asarray(x, dtype=float)
        y = self.offsets[:, None] + self.ratios[:, None] * x[None, :]
        return y, np.broadcast_to(np.log(self.ratios)[:, None], y.shape)

    def root(self) -> Cylinders:
        z = np.zeros(1)
        return Cylinders(z, z.copy(), z.copy())

    def refine(self, cyl: Cylinders) -> Cylinders:
        lr = np.log(self.ratios)
        f = lambda a: (a[:, None] + lr[None, :]).ravel()
        return Cylinders(f(cyl.log_len), f(cyl.log_lo), f(cyl.log_hi))


@dataclass
class _SqrtState:
    points: np.ndarray
    acc_lo: np.ndarray
    acc_hi: np.ndarray

    def __getitem__(self, mask):
        return _SqrtState(self.points[mask], self.acc_lo[mask], self.acc_hi[mask])


class SqrtSystem:
    """The two inverse branches +-sqrt(x - c) of f_c on I = [-p, p] for real
    c < -2, where p is the repelling fixed point.

    Cylinder lengths are computed from their endpoints. For the bracket the
    range is cut into nsub cosine-spaced pieces and the length of a
    cylinder is bounded by sum_j |I_j| inf/sup_{I_j} |psi'|, where each
    step factor is monotone on a piece. More pieces give a tighter bracket.
    """

    default_depths = (8, 16)

    def __init__(self, c: float, nsub: int = 16):
        c = float(c)
        if not c < -2:
            raise ValueError("the real exterior system needs c < -2")
        self.c = c
        self.nsub = nsub
        self.p = 0.5 * (1.0 + math.sqrt(1.0 - 4.0 * c))
        self.range = (-self.p, self.p)
        grid = -self.p * np.cos(np.linspace(0.0, math.pi, nsub + 1))
        self._log_pieces = np.log(np.diff(grid))
        self._grid = grid

    @property
    def n_branches(self) -> int:
        return 2

    def inverse(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        a = np.sqrt(x - self.c)
        y = np.stack([a, -a])
        ld = -np.log(2.0 * a)
        return y, np.stack([ld, ld])

    def root(self) -> Cylinders:
        z = np.array([math.log(2.0 * self.p)])
        zero = np.zeros((1, self.nsub))
        return Cylinders(z, z.copy(), z.copy(), state=_SqrtState(self._grid[None, :], zero, zero.copy()))

    def refine(self, cyl: Cylinders) -> Cylinders:
        st = cyl.state
        a = np.sqrt(st.points - self.c)
        step = -np.log(2.0 * a)
        slo = np.minimum(step[:, :-1], step[:, 1:])
        shi = np.maximum(step[:, :-1], step[:, 1:])
        pts = np.concatenate([a, -a])
        acc_lo = np.concatenate([st.acc_lo + slo] * 2)
        acc_hi = np.concatenate([st.acc_hi + shi] * 2)
        log_len = np.log(np.abs(pts[:, -1] - pts[:, 0]))
        lo = logsumexp(acc_lo + self._log_pieces, axis=1)
        hi = logsumexp(acc_hi + self._log_pieces, axis=1)
        return Cylinders(log_len, lo, hi, state=_SqrtState(pts, acc_lo, acc_hi))


# ---------------------------------------------------------------------------
# Q sums, pressure and dimension


@dataclass
class QSum:
    log_value: float
    log_lower: float
    log_upper: float
    n_words: int
    pruned: int
    complete: bool = True


def _enumerate(system, n: int, t: float, prune: float, max_words: int):
    cyl = system.root()
    pruned_upper = -math.inf
    pruned = 0
    for _ in range(n):
        if len(cyl.log_len) * system.n_branches > max_words:
            return cyl, pruned, pruned_upper, False
        cyl = system.refine(cyl)
        if t is None:
            continue
        w = t * cyl.log_hi
        drop = w < logsumexp(w) + math.log(prune)
        if drop.any():
            pruned += int(drop.sum())
            pruned_upper = np.logaddexp(pruned_upper, logsumexp(w[drop]))
            cyl = cyl.keep(~drop)
    return cyl, pruned, pruned_upper, True


def _full_cylinders(system, n: int, max_words: int):
    """Unpruned depth-n cylinders, cached on the system when they fit."""
    cache = system.__dict__.setdefault("_cylinder_cache", {})
    if n not in cache:
        if system.n_branches ** n > max_words:
            cache[n] = None
        else:
            cache[n] = _enumerate(system, n, None, 0.0, max_words)[0]
    return cache[n]


def qsum(system, n: int, t: float, prune: float = 1e-15, max_words: int = 2_000_000) -> QSum:
    """log Q(n, t) over depth-n cylinders, with a lower/upper bracket.

    Small systems are enumerated in full once and cached. Otherwise words
    are refined level by level and those whose largest possible
    contribution falls below `prune` times the level sum are dropped, their
    upper bound carried forward. If the word budget is exhausted the partial
    sum is returned and flagged incomplete; only its lower value is then
    meaningful.
    """
    full = _full_cylinders(system, n, max_words)
    pruned, pruned_upper, complete = 0, -math.inf, True
    if full is not None:
        cyl = full
    else:
        cyl, pruned, pruned_upper, complete = _enumerate(system, n, t, prune, max_words)
    sl, sh = (cyl.log_lo, cyl.log_hi) if t >= 0 else (cyl.log_hi, cyl.log_lo)
    value = float(logsumexp(t * cyl.log_len))
    lower = float(logsumexp(t * sl))
    if not complete:
        return QSum(lower, lower, math.inf, len(cyl.log_len), pruned, complete=False)
    upper = float(np.logaddexp(logsumexp(t * sh), pruned_upper))
    return QSum(value, min(lower, value), max(upper, value), len(cyl.log_len), pruned)


@dataclass
class PressureValue:
    value: float
    lower: float
    upper: float
    depths: tuple[int, int]


def _depths(system, n_lo, n_hi):
    d = getattr(system, "default_depths", (4, 8))
    return (d[0] if n_lo is None else n_lo), (d[1] if n_hi is None else n_hi)


def pressure(system, t: float, n_lo: int | None = None, n_hi: int | None = None) -> PressureValue:
    """P(t) from the difference quotient of log Q between two depths, which
    cancels the bounded-distortion constant."""
    n_lo, n_hi = _depths(system, n_lo, n_hi)
    if not 0 <= n_lo < n_hi:
        raise ValueError("need 0 <= n_lo < n_hi")
    a, b = qsum(system, n_lo, t), qsum(system, n_hi, t)
    d = n_hi - n_lo
    return PressureValue(
        value=(b.log_value - a.log_value) / d,
        lower=(b.log_lower - a.log_upper) / d,
        upper=(b.log_upper - a.log_lower) / d,
        depths=(n_lo, n_hi),
    )


def pressure_curve(system, ts, depths=(2, 4, 6, 8)) -> dict:
    """Samples (t, n, (1/n) log Q(n, t)) and difference-quotient estimates."""
    samples = [(float(t), n, qsum(system, n, t).log_value / n) for t in ts for n in depths]
    extrap = []
    for t in ts:
        p = pressure(system, t, depths[-2], depths[-1])
        extrap.append((float(t), p.value, (p.lower, p.upper)))
    return {"samples": samples, "extrapolated": extrap}


def _bisect(fn, lo: float, hi: float, tol: float, history: list) -> float:
    flo, fhi = fn(lo), fn(hi)
    history += [(lo, flo), (hi, fhi)]
    if not (flo > 0 > fhi):
        raise BracketError(f"P({lo}) = {flo:.6g}, P({hi}) = {fhi:.6g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        history.append((mid, fm))
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_monotone(history: list) -> None:
    pts = sorted(set(history))
    for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
        if t1 > t0 and not p1 < p0:
            raise ArithmeticError(f"pressure not decreasing between t = {t0} and {t1}")


def dimension(system, tol: float = 1e-10, n_lo: int | None = None, n_hi: int | None = None,
              t_range=(0.0, 2.0)) -> DimensionEstimate:
    """Zero of the pressure by bisection, with the bracket given by the
    zeros of its lower and upper variants."""
    n_lo, n_hi = _depths(system, n_lo, n_hi)
    hist: list = []
    val = lambda t: pressure(system, t, n_lo, n_hi).value
    p1 = pressure(system, 1.0, n_lo, n_hi)
    if abs(p1.value) <= 1e-12:
        # P(1) vanishes to working precision: report 1, never a side.
        t = 1.0
    else:
        t = _bisect(val, *t_range, tol, hist)
    _check_monotone(hist)
    at = pressure(system, t, n_lo, n_hi)
    if at.upper - at.lower <= 1e-14:
        return DimensionEstimate(value=t, method="qsum-bisection", bracket=(t - tol, t + tol), depth=n_hi,
                                 extra={"P(1)": p1.value})
    roots = []
    for which in ("lower", "upper"):
        fn = lambda s, w=which: getattr(pressure(system, s, n_lo, n_hi), w)
        try:
            roots.append(_bisect(fn, *t_range, tol, []))
        except BracketError:
            roots.append(t_range[0] if which == "lower" else t_range[1])
    lo, hi = min(roots[0], t - tol), max(roots[1], t + tol)
    return DimensionEstimate(value=t, method="qsum-bisection", bracket=(lo, hi), depth=n_hi,
                             extra={"P(1)": p1.value})


def moran_oracle(ratios, tol: float = 1e-14) -> float:
    """Root s of sum r_i^s = 1 by Newton iteration (the map is convex and
    decreasing, so Newton from s = 0 increases monotonically to the root)."""
    r = np.asarray(ratios, dtype=float)
    if len(r) == 0:
        raise ValueError("need at least one ratio")
    lr = np.log(r)
    s = 0.0
    for _ in range(200):
        w = np.exp(s * lr)
        g = w.sum() - 1.0
        step = g / float((w * lr).sum())
        s -= step
        if abs(step) < tol:
            break
    return s


# ---------------------------------------------------------------------------
# Chebyshev collocation


def cheb_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * (2 * k + 1) / (2 * n))


def bary_weights(n: int) -> np.ndarray:
    k = np.arange(n)
    return (-1.0) ** k * np.sin(np.pi * (2 * k + 1) / (2 * n))


def bary_matrix(nodes: np.ndarray, weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rows interpolate from values at the nodes to the points x (which may
    be complex for evaluation off the real axis)."""
    x = np.asarray(x)
    d = x[:, None] - nodes[None, :]
    exact = d == 0
    d = np.where(exact, 1.0, d)
    M = weights[None, :] / d
    M = M / M.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if hit.any():
        M[hit] = exact[hit]
    return M


@dataclass
class TransferResult:
    eigenvalue: float
    nodes: np.ndarray
    h: np.ndarray
    nu: np.ndarray
    iterations: int


def power_iteration(M: np.ndarray, tol: float = 1e-13, max_iter: int = 10_000):
    """Leading eigenvalue and eigenvector of a matrix with a dominant
    positive eigenvalue."""
    v = np.ones(M.shape[0])
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = M @ v
        new = float(np.linalg.norm(w) / np.linalg.norm(v))
        w = w / np.linalg.norm(w)
        if w.sum() < 0:
            w = -w
        if abs(new - lam) <= tol * new and np.linalg.norm(w - v / np.linalg.norm(v)) < 1e-9:
            return new, w, it
        v, lam = w, new
    raise ArithmeticError("power iteration did not converge")


def transfer_matrix(system, t: float, mesh: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Collocation matrix of L_t g(x) = sum_i |psi_i'(x)|^t g(psi_i(x))."""
    nodes = cheb_nodes(*system.range, mesh)
    w = bary_weights(mesh)
    y, ld = system.inverse(nodes)
    M = np.zeros((mesh, mesh))
    for i in range(y.shape[0]):
        M += np.exp(t * ld[i])[:, None] * bary_matrix(nodes, w, y[i])
    return M, nodes


def transfer_eigenvalue(system, t: float, mesh: int = 32) -> TransferResult:
    """Leading eigenvalue of the transfer operator, its eigenfunction h at
    the nodes and the conformal weights nu of the first-level cylinders.

    The left eigenvector acts as a quadrature rule for the conformal
    measure; nu_i = nu(psi_i(range)) = <nu, |psi_i'|^t> / lambda, which sums
    to 1 after normalisation.
    """
    if mesh < 16:
        raise ValueError("mesh must have at least 16 nodes")
    M, nodes = transfer_matrix(system, t, mesh)
    lam, h, it = power_iteration(M)
    _, left, _ = power_iteration(M.T)
    left = left / left.sum()
    _, ld = system.inverse(nodes)
    nu = np.exp(t * ld) @ left / lam
    nu = nu / nu.sum()
    return TransferResult(eigenvalue=lam, nodes=nodes, h=h / h.mean(), nu=nu, iterations=it)


def dimension_transfer(system, tol: float = 1e-10, mesh: int = 32) -> DimensionEstimate:
    """Zero of log lambda(t); the bracket comes from the half-size mesh."""
    f = lambda m: (lambda t: math.log(power_iteration(transfer_matrix(system, t, m)[0])[0]))
    t = brentq(f(mesh), 0.0, 2.0, xtol=tol)
    t2 = brentq(f(max(mesh // 2, 16)), 0.0, 2.0, xtol=tol)
    return DimensionEstimate(value=t, method="transfer-eigenvalue",
                             bracket=(min(t, t2) - tol, max(t, t2) + tol), depth=mesh)


# ---------------------------------------------------------------------------
# Real exterior parameters and quasicircles


def harmonic_lower_bound(c) -> float:
    g = green_function(as_parameter(c))
    return math.log(2.0) / (math.log(2.0) + g)


def dimension_exterior(param, tol: float = 1e-10, n_lo: int = 8, n_hi: int = 16, nsub: int = 16) -> DimensionEstimate:
    """Dimension of the Cantor Julia set for real c < -2 from the two
    inverse branches on [-p, p], checked against the harmonic lower bound."""
    param = as_parameter(param)
    if not (param.is_real and param.c.real < -2):
        raise ValueError(f"exterior pipeline needs real c < -2, got {param.c}")
    c = param.c.real
    est = dimension(SqrtSystem(c, nsub), tol=tol, n_lo=n_lo, n_hi=n_hi, t_range=(0.0, 1.0))
    hb = harmonic_lower_bound(c)
    if est.value < hb - max(tol, 1e-4):
        raise ArithmeticError(f"dimension {est.value} below harmonic bound {hb}")
    est.extra.update(c=c, harmonic_lower=hb)
    return est


def periodic_cycle_points(c: complex, n: int, rounds: int = 12) -> np.ndarray:
    """The 2^n - 1 points of J_c of period dividing n for |c| <= 1/4.

    The point with binary angle theta = k / (2^n - 1) is the limit of
    backward iteration around its cycle, each preimage chosen next to
    exp(2 pi i theta_j), where J_c lies close to the unit circle.
    Returns an array of shape (2^n - 1, n) holding each cycle in order.
    """
    N = 2 ** n - 1
    k = np.arange(N, dtype=np.int64)
    # theta_j = 2^j theta mod 1 as integer numerators mod N.
    num = np.stack([(k << j) % N for j in range(n)], axis=1)
    ref = np.exp(2j * np.pi * num / N)
    z = ref[:, 0].copy()
    cyc = np.empty((N, n), dtype=complex)
    for _ in range(rounds):
        for j in range(n - 1, -1, -1):
            w = np.sqrt(z - c)
            w = np.where(np.abs(w - ref[:, j]) <= np.abs(-w - ref[:, j]), w, -w)
            cyc[:, j] = w
            z = w
    resid = np.abs(cyc[:, 0] ** 2 + c - cyc[:, 1 % n]) if n > 1 else np.abs(cyc[:, 0] ** 2 + c - cyc[:, 0])
    if not np.all(resid < 1e-10):
        raise ArithmeticError("backward iteration did not converge")
    return cyc


def _periodic_root(log_deriv: np.ndarray, tol: float) -> float:
    fn = lambda t: float(logsumexp(-t * log_deriv))
    return brentq(fn, 0.0, 3.0, xtol=tol)


def dimension_quasicircle(param, n: int = 14, tol: float = 1e-12) -> DimensionEstimate:
    """Zero of the periodic-orbit pressure: sum over J_c-points fixed by
    f^n of |(f^n)'|^{-t} = 1, bracketed by the solutions at depths n - 1
    and n."""
    param = as_parameter(param)
    c = complex(param.c)
    if abs(c) > 0.25:
        raise ValueError("quasicircle pipeline needs |c| <= 1/4")
    roots = []
    for d in (n - 1, n):
        cyc = periodic_cycle_points(c, d)
        roots.append(_periodic_root(np.log(2.0 * np.abs(cyc)).sum(axis=1), tol))
    t = roots[1]
    lo, hi = min(roots) - tol, max(roots) + tol
    return DimensionEstimate(value=t, method="periodic-bisection", bracket=(lo, hi), depth=n,
                             extra={"c": [c.real, c.imag]})


# ---------------------------------------------------------------------------
# Tip repellers: factored transfer operator


def _assemble(weights: np.ndarray, Bx: np.ndarray, By: np.ndarray) -> np.ndarray:
    """sum_a weights[a, k] Bx[a, k, l] By[a, k, m] as a (k, l*m) matrix."""
    X = (weights[:, :, None] * Bx).transpose(1, 2, 0)
    Y = By.transpose(1, 0, 2)
    return (X @ Y).reshape(X.shape[0], -1)


class _Grid:
    def __init__(self, I, h, nx, ny):
        self.x = cheb_nodes(I[0], I[1], nx)
        self.wx = bary_weights(nx)
        if ny:
            self.y = cheb_nodes(-h, h, ny)
            self.wy = bary_weights(ny)
            self.points = (self.x[:, None] + 1j * self.y[None, :]).ravel()
        else:
            self.points = self.x

    @property
    def two_d(self) -> bool:
        return self.points.dtype.kind == "c"

    def basis(self, z: np.ndarray):
        if not self.two_d:
            return bary_matrix(self.x, self.wx, z.real), None
        return bary_matrix(self.x, self.wx, z.real), bary_matrix(self.y, self.wy, z.imag)


class RepellerOperator:
    """Transfer operator of a tip repeller built without listing branches.

    Every real branch is a prefix (onto U) after a word of the two
    return-time-2 generators (onto V), so L = R (sum_j G^j) A, where A
    applies the prefixes from V to U, G the generators on U and R restricts
    from U back to V. With the complex branch the functions live on a box
    around V of height 1.25 max Im W (three times that around U) and the
    W term is added separately.
    """

    def __init__(self, rep, nV: int = 32, nU: int = 64, ny: int = 0, with_complex: bool = False):
        from .words import group_by_length, pull, pull_many

        self.rep = rep
        c = rep.c
        self.with_complex = with_complex and rep.W is not None
        if self.with_complex and not ny:
            ny = 8
        if not self.with_complex:
            ny = 0
        h = 1.25 * rep.W.im_range[1] if self.with_complex else 0.0
        self.gV = _Grid(rep.V, h, nV, ny)
        self.gU = _Grid(rep.U, 3.0 * h, nU, ny)
        ZU = self.gU.points
        ld, bases = [], []
        for _, (idx, arr) in group_by_length([a.word for a in rep.prefixes]).items():
            x, l = pull_many(arr, ZU, c)
            ld.append(l)
            bases += [self.gV.basis(x[b]) for b in range(len(idx))]
        self._A = (np.concatenate(ld), bases)
        ld, bases = [], []
        for g in rep.generators:
            x, l = pull_many(np.array([g.word], dtype=np.int8), ZU, c)
            ld.append(l)
            bases.append(self.gU.basis(x[0]))
        self._G = (np.concatenate(ld), bases)
        self._R = self._matrix(np.ones((1, len(self.gV.points))), [self.gU.basis(self.gV.points)])
        if self.with_complex:
            x, logs = pull(rep.W.word, self.gV.points, c, steps=True)
            if np.max(np.abs(x.imag)) > h or x.real.min() < rep.V[0] or x.real.max() > rep.V[1]:
                raise ValueError("complex branch image leaves the collocation box")
            self._W = (logs.sum(axis=-1)[None], [self.gV.basis(x)])

    def _matrix(self, weights, bases):
        Bx = np.array([b[0] for b in bases])
        if bases[0][1] is None:
            return np.einsum("ak,akl->kl", weights, Bx)
        By = np.array([b[1] for b in bases])
        return _assemble(weights, Bx, By)

    def matrix(self, t: float) -> np.ndarray:
        A = self._matrix(np.exp(-t * self._A[0]), self._A[1])
        G = self._matrix(np.exp(-t * self._G[0]), self._G[1])
        S = np.eye(G.shape[0])
        P = np.eye(G.shape[0])
        for _ in range(self.rep.depth):
            P = G @ P
            S += P
        M = self._R @ S @ A
        if self.with_complex:
            M = M + self._matrix(np.exp(-t * self._W[0]), self._W[1])
        return M

    def eigenvalue(self, t: float) -> float:
        return power_iteration(self.matrix(t))[0]

    def dimension(self, tol: float = 1e-10) -> float:
        return brentq(lambda t: math.log(self.eigenvalue(t)), 0.5, 1.5, xtol=tol)


def repeller_dimension(rep, with_complex: bool, tol: float = 1e-10, nV: int = 32, nU: int = 64,
                       ny: int = 8) -> DimensionEstimate:
    """Dimension of a tip repeller, with the discretisation error bracketed
    by a coarser mesh."""
    fine = RepellerOperator(rep, nV, nU, ny, with_complex).dimension(tol)
    coarse = RepellerOperator(rep, nV // 2, nU // 2, max(ny // 2, 4), with_complex).dimension(tol)
    return DimensionEstimate(value=fine, method="transfer-eigenvalue",
                             bracket=(min(fine, coarse) - tol, max(fine, coarse) + tol), depth=rep.depth,
                             extra={"with_complex": bool(with_complex and rep.W is not None)})


@dataclass
class RepellerRow:
    epsilon: float
    dim_real: float | None
    dim_full: float | None
    bracket_real: tuple[float, float] | None = None
    bracket_full: tuple[float, float] | None = None
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None


def repeller_dimension_scan(epsilons, tol: float = 1e-10, C1: float = 8.0) -> list[RepellerRow]:
    """Dimensions of the tip repellers with and without the complex branch;
    a failed construction is reported on its row and the scan goes on."""
    from .inducing import ConstructionError, build_repeller

    rows = []
    for eps in epsilons:
        try:
            rep = build_repeller(-2.0 + float(eps), C1=C1)
            dr = repeller_dimension(rep, False, tol)
            df = repeller_dimension(rep, True, tol)
        except (ConstructionError, ValueError, ArithmeticError) as exc:
            rows.append(RepellerRow(float(eps), None, None, error=str(exc)))
            continue
        rows.append(RepellerRow(float(eps), dr.value, df.value, dr.bracket, df.bracket, dict(rep.diagnostics)))
    return rows
