"""Test functions on (Z/pZ)^d, the finite Fourier transform and the phase /
rescaling operators acting on them, weighted theta series with certified
truncation, and numerical verification of the transformation identities.

Conventions fixed throughout:

* ``finite_fourier`` is the plain counting-measure transform
  F(f)(xi) = sum_x f(x) e^{-2 pi i Q(x, xi)/p}, so F(F(f)) = p^d f(-x).
* Half-integral powers are always (principal sqrt)^d with
  arg(sqrt(z)) in (-pi/2, pi/2]; never exp((d/2) log z).
* The theta component at the cusp infinity is theta of the transform of f
  under the Plancherel-normalized pairing; with the plain transform above the
  p^d scale factors cancel, i.e. it equals theta_{F(f)} on the nose.  This is
  the unique normalization under which the whole generator-action table holds
  with unit cocycle values at 0 and infinity (the tests pin it numerically).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .arith import is_prime, j_prime_k
from .errors import ResourceLimitError, ValidationError
from .lattice import digit_table, qmod_vector, quadric_indices, quadric_modulus, residue_census
from .limits import DEFAULT_CENSUS_CELL_CAP, DEFAULT_ENTRY_CAP, DEFAULT_EPS

TWO_PI = 2.0 * math.pi

#: index of the cusp at infinity in the component family
INF = "inf"

CuspIndex = Union[int, str]

_perm_cache: dict[tuple[int, int, int], np.ndarray] = {}


def _scale_perm(p: int, d: int, j: int) -> np.ndarray:
    """Flat-index permutation of x -> j*x mod p."""
    key = (p, d, j % p)
    perm = _perm_cache.get(key)
    if perm is None:
        digits = digit_table(p, d)
        weights = p ** np.arange(d, dtype=np.int64)
        perm = ((j * digits) % p) @ weights
        perm.setflags(write=False)
        _perm_cache[key] = perm
    return perm


def _neg_perm(p: int, d: int) -> np.ndarray:
    return _scale_perm(p, d, p - 1)


class TestFunction:
    """A complex-valued function on (Z/pZ)^d, stored densely.

    Values are indexed by the base-p encoding of the argument (coordinate 0
    least significant) and are immutable after construction.
    """

    __test__ = False  # keep pytest from collecting this as a test class
    __slots__ = ("p", "d", "values", "_even")

    def __init__(self, p: int, d: int, values, entry_cap: int = DEFAULT_ENTRY_CAP):
        if not is_prime(p):
            raise ValidationError(f"TestFunction requires prime p, got {p}")
        if d < 1:
            raise ValidationError(f"TestFunction requires d >= 1, got {d}")
        if p**d > entry_cap:
            raise ResourceLimitError(f"p**d = {p**d} exceeds entry cap {entry_cap}")
        arr = np.array(values, dtype=np.complex128)
        if arr.shape != (p**d,):
            raise ValidationError(
                f"expected {p**d} values for p={p}, d={d}, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "_even", None)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("TestFunction is immutable")

    @property
    def is_even(self) -> bool:
        if self._even is None:
            v = self.values
            flipped = v[_neg_perm(self.p, self.d)]
            scale = max(1.0, float(np.abs(v).max(initial=0.0)))
            object.__setattr__(self, "_even", bool(np.abs(v - flipped).max(initial=0.0) <= 1e-12 * scale))
        return self._even

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.values).max(initial=0.0))

    def value_at(self, coords) -> complex:
        e = 0
        for i, c in enumerate(coords):
            e += (c % self.p) * self.p**i
        return complex(self.values[e])

    def __repr__(self):
        return f"TestFunction(p={self.p}, d={self.d}, even={self.is_even})"


def constant_function(p: int, d: int, value: complex = 1.0) -> TestFunction:
    return TestFunction(p, d, np.full(p**d, value, dtype=np.complex128))


def origin_indicator(p: int, d: int) -> TestFunction:
    v = np.zeros(p**d, dtype=np.complex128)
    v[0] = 1.0
    return TestFunction(p, d, v)


def even_projection(f: TestFunction) -> TestFunction:
    """(f(x) + f(-x)) / 2."""
    v = (f.values + f.values[_neg_perm(f.p, f.d)]) / 2.0
    return TestFunction(f.p, f.d, v)


def finite_fourier(f: TestFunction) -> TestFunction:
    """F(f)(xi) = sum_x f(x) e^{-2 pi i Q(x, xi)/p}, one 1-d transform per axis.

    Applying it twice gives p^d f(-x) (counting-measure normalization).
    """
    p, d = f.p, f.d
    w = np.exp(-2j * np.pi * np.outer(np.arange(p), np.arange(p)) / p)
    t = f.values.reshape((p,) * d)
    for ax in range(d):
        t = np.moveaxis(np.tensordot(w, t, axes=([1], [ax])), 0, ax)
    return TestFunction(p, d, np.ascontiguousarray(t).reshape(-1))


def op_L(f: TestFunction, k: int = 1) -> TestFunction:
    """Multiplication by the quadratic phase: (L^k f)(x) = e^{-2 pi i k Q(x,x)/p} f(x)."""
    q = qmod_vector(f.p, f.d)
    phase = np.exp(-2j * np.pi * ((k * q) % f.p) / f.p)
    return TestFunction(f.p, f.d, f.values * phase)


def op_Sj(f: TestFunction, j: int) -> TestFunction:
    """Rescaling of the argument: (S_j f)(x) = f(j x), for 1 <= j <= p-1."""
    if not 1 <= j <= f.p - 1:
        raise ValidationError(f"op_Sj needs 1 <= j <= p-1, got j={j}, p={f.p}")
    return TestFunction(f.p, f.d, f.values[_scale_perm(f.p, f.d, j)])


def op_M(f: TestFunction) -> TestFunction:
    """The p = 2 phase operator: (M f)(x) = e^{-2 pi i Q(x,x)/4} f(x), with
    Q(x,x) the integer sum of bits (well defined mod 4)."""
    if f.p != 2:
        raise ValidationError(f"op_M is defined only for p = 2, got p={f.p}")
    q = qmod_vector(2, f.d)  # already reduced mod 4
    phase = np.exp(-2j * np.pi * q / 4)
    return TestFunction(2, f.d, f.values * phase)


def random_even_function(p: int, d: int, seed: int) -> TestFunction:
    """Seeded uniform complex values in the unit square, even-projected."""
    rng = np.random.default_rng(seed)
    v = rng.random(p**d) + 1j * rng.random(p**d)
    return even_projection(TestFunction(p, d, v))


def random_cusp_function(p: int, d: int, seed: int) -> TestFunction:
    """Seeded even function satisfying the cusp vanishing conditions exactly:
    zero at the pinned corners, zero sum over every level set of Q."""
    f = random_even_function(p, d, seed)
    v = f.values.copy()
    pinned = {0}
    if p == 2:
        pinned.add(2**d - 1)  # the all-ones corner
    for e in pinned:
        v[e] = 0.0
    mod = quadric_modulus(p)
    for a in range(mod):
        idx = quadric_indices(p, d, a)
        free = np.array([e for e in idx if int(e) not in pinned], dtype=np.int64)
        if free.size == 0:
            continue
        v[free] -= v[idx].sum() / free.size
    return TestFunction(p, d, v)


# ---------------------------------------------------------------------------
# theta series evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientSeries:
    """c_n = sum over X_d(n) of f(x mod p), for n = 0..nmax."""

    p: int
    d: int
    nmax: int
    c: np.ndarray


def theta_coeffs(f: TestFunction, nmax: int, cell_cap: int = DEFAULT_CENSUS_CELL_CAP) -> CoefficientSeries:
    census = residue_census(f.d, nmax, f.p, cell_cap)
    return CoefficientSeries(p=f.p, d=f.d, nmax=nmax, c=census @ f.values)


@dataclass(frozen=True)
class ThetaValue:
    """A truncated theta evaluation with its certified tail bound."""

    value: complex
    tail: float
    radius: int


def _tail_bound(d: int, y: float, radius: int, max_abs: float) -> float:
    """Bound for |sum_{n > radius} c_n e^{2 pi i n tau}|, using
    |c_n| <= max|f| r_d(n) <= max|f| (3 sqrt n)^d and a geometric comparison."""
    n0 = radius + 1
    rho = math.exp(d / (2 * n0) - TWO_PI * y)
    if rho >= 1.0:
        return math.inf
    g = max_abs * (3.0 * math.sqrt(n0)) ** d * math.exp(-TWO_PI * n0 * y)
    return g / (1.0 - rho)


def _choose_radius(d: int, y: float, target: float, max_abs: float) -> int:
    r = max(8, int(d / (math.pi * y)) + 1)
    while _tail_bound(d, y, r, max_abs) > target:
        r = int(r * 1.4) + 16
        if r > 5 * 10**6:
            raise ResourceLimitError("theta truncation radius cap exceeded")
    return r


def _series_eval(f: TestFunction, tau_eff: complex, eps: float, cell_cap: int) -> ThetaValue:
    """Evaluate sum_n c_n(f) e^{2 pi i n tau_eff} with tail < eps (|value| + 1).

    The radius comes from the documented tail bound with a hard safety factor
    of 2; the achieved bound is returned so callers can assert against it.
    """
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    y = tau_eff.imag
    if y <= 0:
        raise ValidationError(f"Im(tau) must be positive, got {tau_eff}")
    m = f.max_abs
    if m == 0.0:
        return ThetaValue(0j, 0.0, 0)
    # heuristic magnitude estimate for the relative target; corrected below
    est = m * max(1.0, (2 * y) ** (-f.d / 2))
    while True:
        r_needed = _choose_radius(f.d, y, eps * (est + 1.0), m)
        radius = 2 * r_needed
        radius += (-radius) % 64  # bucket radii so census caches are shared
        if (radius + 1) * f.p**f.d > cell_cap:
            raise ResourceLimitError(
                f"truncation radius {radius} needs more than {cell_cap} census cells"
            )
        c = theta_coeffs(f, radius, cell_cap).c
        qn = np.exp(2j * np.pi * tau_eff * np.arange(radius + 1))
        value = complex(c @ qn)
        tail = _tail_bound(f.d, y, radius, m)
        if tail <= eps * (abs(value) + 1.0):
            return ThetaValue(value=value, tail=tail, radius=radius)
        est = abs(value)


def theta_eval_full(
    f: TestFunction,
    tau: complex,
    eps: float = DEFAULT_EPS,
    cell_cap: int = DEFAULT_CENSUS_CELL_CAP,
) -> ThetaValue:
    """theta_f(tau) = sum_{x in Z^d} f(x mod p) e^{2 pi i Q(x,x) tau}, truncated."""
    return _series_eval(f, complex(tau), eps, cell_cap)


def theta_eval(f: TestFunction, tau: complex, eps: float = DEFAULT_EPS) -> complex:
    return theta_eval_full(f, tau, eps).value


def theta_j_eval_full(
    f: TestFunction,
    j: CuspIndex,
    tau: complex,
    eps: float = DEFAULT_EPS,
    cell_cap: int = DEFAULT_CENSUS_CELL_CAP,
) -> ThetaValue:
    """The component theta_f^j for j in {0..p-1, inf} (odd p, even f).

    Finite j uses the exponent (tau - j)/p^2; j = inf is theta of the
    finite Fourier transform of f (the p^d scale of the component and the
    1/p^d of the Plancherel-normalized transform cancel).
    """
    if f.p == 2:
        raise ValidationError("theta components are defined for odd p only")
    if not f.is_even:
        raise ValidationError("theta components require an even test function")
    tau = complex(tau)
    if j == INF:
        return _series_eval(finite_fourier(f), tau, eps, cell_cap)
    if not isinstance(j, (int, np.integer)) or not 0 <= int(j) <= f.p - 1:
        raise ValidationError(f"cusp index must be in {{0..p-1}} or '{INF}', got {j!r}")
    return _series_eval(f, (tau - int(j)) / f.p**2, eps, cell_cap)


def theta_j_eval(f: TestFunction, j: CuspIndex, tau: complex, eps: float = DEFAULT_EPS) -> complex:
    return theta_j_eval_full(f, j, tau, eps).value


def half_power(z: complex, d: int) -> complex:
    """z^{d/2} = (principal sqrt of z)^d, arg(sqrt(z)) in (-pi/2, pi/2]."""
    return cmath.sqrt(z) ** d


@dataclass(frozen=True)
class TransformResidual:
    label: str
    lhs: complex
    rhs: complex
    residual: float


def _residual(label: str, lhs: complex, rhs: complex) -> TransformResidual:
    return TransformResidual(
        label=label, lhs=lhs, rhs=rhs, residual=abs(lhs - rhs) / max(1.0, abs(rhs))
    )


def verify_poisson(f: TestFunction, tau: complex, eps: float = DEFAULT_EPS) -> TransformResidual:
    """Residual of the summation identity
    theta_f^inf(tau) = (i/2tau)^{d/2} theta_f^0(-1/(4 tau))."""
    tau = complex(tau)
    lhs = theta_j_eval(f, INF, tau, eps)
    rhs = half_power(1j / (2 * tau), f.d) * theta_j_eval(f, 0, -1 / (4 * tau), eps)
    return _residual("poisson", lhs, rhs)


def verify_generator_actions(
    f: TestFunction, tau: complex, eps: float = DEFAULT_EPS
) -> list[TransformResidual]:
    """Residuals for the action of the two group generators on the component
    family: the translation generator permutes the finite components (picking
    up an L phase at the wrap) and fixes infinity; the inversion generator
    swaps 0 with infinity and pairs j with its involution partner j' through
    the composed L/S operator, with the (i/2tau)^{d/2} factor."""
    tau = complex(tau)
    p, d = f.p, f.d
    rows: list[TransformResidual] = []
    for j in range(p - 1):
        rows.append(
            _residual(
                f"alpha j={j}", theta_j_eval(f, j, tau - 1, eps), theta_j_eval(f, j + 1, tau, eps)
            )
        )
    rows.append(
        _residual(
            "alpha j=p-1",
            theta_j_eval(f, p - 1, tau - 1, eps),
            theta_j_eval(op_L(f), 0, tau, eps),
        )
    )
    rows.append(
        _residual(
            "alpha j=inf", theta_j_eval(f, INF, tau - 1, eps), theta_j_eval(f, INF, tau, eps)
        )
    )
    w = half_power(1j / (2 * tau), d)
    tau_inv = -1 / (4 * tau)
    for j in range(1, p):
        jp, kj = j_prime_k(j, p)
        g = op_L(op_Sj(f, (2 * jp) % p), k=(kj * jp) % p)
        rows.append(
            _residual(
                f"gamma j={j}",
                theta_j_eval(f, j, tau, eps),
                w * theta_j_eval(g, jp, tau_inv, eps),
            )
        )
    rows.append(
        _residual("gamma j=0", theta_j_eval(f, INF, tau, eps), w * theta_j_eval(f, 0, tau_inv, eps))
    )
    rows.append(
        _residual(
            "gamma j=inf",
            theta_j_eval(f, INF, tau_inv, eps),
            half_power(2 * tau / 1j, d) * theta_j_eval(f, 0, tau, eps),
        )
    )
    return rows


# ---------------------------------------------------------------------------
# cusp criterion and the S(r, w) sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CuspCheck:
    is_cusp: bool
    failing_condition: str | None


def cusp_check(f: TestFunction, tol: float = 1e-8) -> CuspCheck:
    """Vanishing conditions for the weighted theta series to be a cusp form:
    zero sum over every level set of Q, zero at the origin, and (p = 2 only)
    zero at the all-ones corner.  Reports the first failure, level sums in
    ascending order of the level, then the corner conditions."""
    p, d = f.p, f.d
    v = f.values
    for a in range(quadric_modulus(p)):
        if abs(v[quadric_indices(p, d, a)].sum()) > tol:
            return CuspCheck(is_cusp=False, failing_condition=f"level-sum a={a}")
    if p == 2 and abs(v[2**d - 1]) > tol:
        return CuspCheck(is_cusp=False, failing_condition="corner (1,...,1)")
    if abs(v[0]) > tol:
        return CuspCheck(is_cusp=False, failing_condition="origin")
    return CuspCheck(is_cusp=True, failing_condition=None)


def _tower_sums(p: int, r: int, w: int) -> np.ndarray:
    """Per-coordinate inner sums over the residue tower:
    t1[k] = sum_{u mod p^{max(r,1)-1}} e^{2 pi i (k + p u)^2 w / p^r}."""
    rt = max(r, 1)
    denom = p**r  # == 1 when r = 0: every phase is then trivial
    u = np.arange(p ** (rt - 1), dtype=np.int64)
    t1 = np.empty(p, dtype=np.complex128)
    for k in range(p):
        sq = ((k + p * u) ** 2) % denom
        t1[k] = np.exp(2j * np.pi * ((sq * (w % denom)) % denom) / denom).sum()
    return t1


def srw_sum(f: TestFunction, r: int, w: int, width_cap: int = 10**6) -> complex:
    """S(r, w) = sum over y in (Z/p^max(r,1) Z)^d of f(y mod p) e^{2 pi i Q(y,y) w / p^r}.

    Evaluated by the exact per-coordinate factorization of the defining sum
    (Q splits as a sum of squares), so the cost is p^d + p^max(r,1) instead of
    p^{d max(r,1)}.
    """
    if r < 0:
        raise ValidationError(f"srw_sum requires r >= 0, got {r}")
    p, d = f.p, f.d
    if p ** max(r, 1) > width_cap:
        raise ResourceLimitError(f"p**{max(r,1)} exceeds width cap {width_cap}")
    t1 = _tower_sums(p, r, w)
    prod = t1[digit_table(p, d)].prod(axis=1)
    return complex(f.values @ prod)


_srw_prod_cache: dict[tuple[int, int, int], np.ndarray] = {}


def srw_profile(f: TestFunction, r: int, cell_cap: int = 5 * 10**7) -> np.ndarray:
    """S(r, w) for every w in [0, p^r) at once (w enters only through w mod p^r)."""
    if r < 0:
        raise ValidationError(f"srw_profile requires r >= 0, got {r}")
    p, d = f.p, f.d
    if r == 0:
        return np.array([complex(f.values.sum())])
    denom = p**r
    key = (p, d, r)
    prod = _srw_prod_cache.get(key)
    if prod is None:
        if p**d * denom > cell_cap:
            raise ResourceLimitError("srw_profile table exceeds cell cap")
        u = np.arange(p ** (r - 1), dtype=np.int64)
        t1w = np.empty((p, denom), dtype=np.complex128)
        for k in range(p):
            counts = np.bincount(((k + p * u) ** 2) % denom, minlength=denom)
            t1w[k] = np.conj(np.fft.fft(counts))
        digits = digit_table(p, d)
        prod = np.ones((p**d, denom), dtype=np.complex128)
        for i in range(d):
            prod *= t1w[digits[:, i]]
        prod.setflags(write=False)
        _srw_prod_cache[key] = prod
    return f.values @ prod


def srw_vanishing(f: TestFunction, rmax: int, tol: float = 1e-8) -> bool:
    """True when every S(r, w), r <= rmax, 0 <= w < p^r, vanishes to within
    tol after dividing by the tower multiplicity p^{(max(r,1)-1) d} (the
    number of lifts behind each residue vector).  The normalization keeps the
    threshold meaningful across r: the raw sums grow like the multiplicity,
    so their roundoff does too.
    """
    p, d = f.p, f.d
    for r in range(rmax + 1):
        scale = float(p ** ((max(r, 1) - 1) * d))
        if float(np.abs(srw_profile(f, r)).max()) >= tol * scale:
            return False
    return True


@dataclass(frozen=True)
class SumCheck:
    value: complex
    predicted: complex
    passed: bool


def rsum_check(r: int, k, w: int, tol: float = 1e-8, brute_cap: int = 10**7) -> SumCheck:
    """The p = 2 auxiliary sum R(r,k,w) = sum_{u in (Z/2^{r-2})^d}
    e^{2 pi i Q(u, u+k) w / 2^{r-2}} for a bit vector k, brute-forced and
    compared with its closed value.

    For w coprime to 2 the closed value is the stated vanishing pattern
    (2^d at k = all-ones when r = 3, nonzero only at k = 0 when r >= 4);
    general w reduces to that case by pulling the 2-adic valuation of w out
    of the modulus, which multiplies the sum by 2^{s d}.
    """
    k = tuple(int(b) for b in k)
    d = len(k)
    if r < 3:
        raise ValidationError(f"rsum_check requires r >= 3, got {r}")
    if d < 1 or any(b not in (0, 1) for b in k):
        raise ValidationError(f"k must be a nonempty bit vector, got {k}")
    m = 2 ** (r - 2)
    if m**d > brute_cap:
        raise ResourceLimitError(f"brute-force grid 2^{(r-2)*d} exceeds cap {brute_cap}")
    wm = w % m
    u = np.arange(m, dtype=np.int64)
    tot = np.zeros(1, dtype=np.int64)
    for bit in k:
        col = (u * (u + bit)) % m
        tot = ((tot[:, None] + col[None, :]) % m).ravel()
    value = complex(np.exp(2j * np.pi * ((tot * wm) % m) / m).sum())

    if wm == 0:
        predicted = complex(m**d)
    else:
        s = 0
        w1 = wm
        while w1 % 2 == 0:
            w1 //= 2
            s += 1
        r2 = r - s  # wm < 2^{r-2} forces s <= r-3, hence r2 >= 3
        scale = 2 ** (s * d)
        if r2 == 3:
            predicted = complex(scale * 2**d) if all(b == 1 for b in k) else 0j
        elif any(k):
            predicted = 0j
        else:
            predicted = scale * _gauss_like(2 ** (r2 - 2), w1) ** d
    return SumCheck(value=value, predicted=predicted, passed=abs(value - predicted) <= tol * max(1.0, abs(predicted)))


def tsum_check(p: int, r: int, k, w: int, tol: float = 1e-8, brute_cap: int = 10**7) -> SumCheck:
    """The odd-p auxiliary sum T(r,k,w) = sum_{u in (Z/p^{r-1})^d}
    e^{2 pi i Q(k + p u, k + p u) w / p^r}, brute-forced and compared with its
    closed value: for w coprime to p it is p^d times the full square sum one
    level down when every coordinate of k is divisible by p, and 0 otherwise;
    general w reduces to that case through its p-adic valuation.
    """
    if p == 2 or not is_prime(p):
        raise ValidationError(f"tsum_check requires odd prime p, got {p}")
    if r < 2:
        raise ValidationError(f"tsum_check requires r >= 2, got {r}")
    k = tuple(int(c) for c in k)
    d = len(k)
    if d < 1:
        raise ValidationError("k must be nonempty")
    denom = p**r
    if (p ** (r - 1)) ** d > brute_cap:
        raise ResourceLimitError(f"brute-force grid p^{(r-1)*d} exceeds cap {brute_cap}")
    wm = w % denom
    u = np.arange(p ** (r - 1), dtype=np.int64)
    tot = np.zeros(1, dtype=np.int64)
    for c in k:
        col = (((c % denom) + p * u) ** 2) % denom
        tot = ((tot[:, None] + col[None, :]) % denom).ravel()
    value = complex(np.exp(2j * np.pi * ((tot * wm) % denom) / denom).sum())

    if wm == 0:
        predicted = complex(p ** ((r - 1) * d))
    else:
        s = 0
        w1 = wm
        while w1 % p == 0:
            w1 //= p
            s += 1
        r2 = r - s  # wm < p^r nonzero forces s <= r-1, hence r2 >= 1
        scale = p ** (s * d)
        if r2 == 1:
            qk = sum(c * c for c in k) % p
            predicted = scale * cmath.exp(2j * math.pi * ((qk * w1) % p) / p)
        elif all(c % p == 0 for c in k):
            predicted = scale * p**d * _gauss_like(p ** (r2 - 2), w1) ** d
        else:
            predicted = 0j
    return SumCheck(value=value, predicted=predicted, passed=abs(value - predicted) <= tol * max(1.0, abs(predicted)))


def _gauss_like(q: int, a: int) -> complex:
    # sum_{t mod q} e^{2 pi i a t^2 / q}; local import avoids a cycle
    from .density import gauss_sum

    return gauss_sum(q, a)


# ---------------------------------------------------------------------------
# congruence-group membership and weak modularity
# ---------------------------------------------------------------------------


def is_in_gamma(g, p: int) -> bool:
    """Membership in the level-p congruence group fixing the weighted theta
    series: diagonal entries 1 mod 4p and lower-left entry 0 mod 4p^2 for odd
    p; 1 mod 4 and 0 mod 16 for p = 2.  Requires det(g) = 1."""
    if not is_prime(p):
        raise ValidationError(f"is_in_gamma requires prime p, got {p}")
    (a, b), (c, d) = g
    a, b, c, d = int(a), int(b), int(c), int(d)
    if a * d - b * c != 1:
        raise ValidationError(f"matrix must have determinant 1, got {a * d - b * c}")
    if p == 2:
        return a % 4 == 1 and d % 4 == 1 and c % 16 == 0
    return a % (4 * p) == 1 and d % (4 * p) == 1 and c % (4 * p * p) == 0


def verify_weak_modularity(
    f: TestFunction, g, tau: complex, eps: float = DEFAULT_EPS
) -> TransformResidual:
    """Residual of the weight-d/2 transformation law under g in the level-p
    group.  Even d: theta_f(g tau) = (c tau + d)^{d/2} theta_f(tau) verified as
    complex numbers.  Odd d: only the modulus identity
    |theta_f(g tau)| = |c tau + d|^{d/2} |theta_f(tau)| is checked (the sign
    of the half-integral factor is not constructed here)."""
    if not is_in_gamma(g, f.p):
        raise ValidationError(f"matrix is not in the level-{f.p} group")
    if not f.is_even:
        raise ValidationError("verify_weak_modularity requires an even test function")
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValidationError(f"Im(tau) must be positive, got {tau}")
    (a, b), (c, d) = g
    a, b, c, d = int(a), int(b), int(c), int(d)
    cz = c * tau + d
    g_tau = (a * tau + b) / cz
    lhs = theta_eval(f, g_tau, eps)
    base = theta_eval(f, tau, eps)
    if f.d % 2 == 0:
        rhs = cz ** (f.d // 2) * base
        return _residual(f"weak-modularity c={c}", lhs, rhs)
    lhs_m = abs(lhs)
    rhs_m = abs(cz) ** (f.d / 2) * abs(base)
    return _residual(f"weak-modularity-modulus c={c}", complex(lhs_m), complex(rhs_m))
