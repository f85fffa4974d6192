"""Angular-momentum primitives: half-integer spins, Clebsch-Gordan
coefficients, Wigner small-d matrices and spherical harmonics.

Half-integers are carried as twice-values (integers) everywhere; they are
never represented as floats internally, which removes parity bugs at the
source. All coefficients follow the Condon-Shortley phase convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError

# Exact integer arithmetic is used up to this twice-spin; beyond it the
# log-factorial float path takes over (precision ~1e-13, still fine).
_EXACT_TWICE_LIMIT = 40


@dataclass(frozen=True, order=True)
class HalfSpin:
    """Spin label S stored as the integer 2S."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or self.twice < 0:
            raise DomainError(f"twice-spin must be a nonnegative integer, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def from_value(cls, value) -> "HalfSpin":
        twice = 2 * value
        if abs(twice - round(twice)) > 1e-12:
            raise DomainError(f"{value!r} is not a half-integer spin")
        return cls(int(round(twice)))

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def dim(self) -> int:
        return self.twice + 1

    def m_values(self) -> np.ndarray:
        """Projections m = S, S-1, ..., -S (the fixed basis ordering)."""
        return (self.twice - 2 * np.arange(self.dim)) / 2.0

    def twice_m_values(self) -> np.ndarray:
        return self.twice - 2 * np.arange(self.dim)

    def __str__(self):
        return f"{self.twice // 2}" if self.twice % 2 == 0 else f"{self.twice}/2"


def as_spin(spin) -> HalfSpin:
    """Coerce HalfSpin | int | float to HalfSpin."""
    if isinstance(spin, HalfSpin):
        return spin
    return HalfSpin.from_value(spin)


def _require_projection(twice_j: int, twice_m: int, label: str):
    if (twice_j - twice_m) % 2 != 0:
        raise DomainError(f"{label}: projection parity does not match spin "
                          f"(2j={twice_j}, 2m={twice_m})")
    if abs(twice_m) > twice_j:
        raise DomainError(f"{label}: |m| exceeds j (2j={twice_j}, 2m={twice_m})")


@dataclass(frozen=True)
class CGKey:
    """Arguments of a Clebsch-Gordan coefficient, as twice-values."""

    twice_j1: int
    twice_m1: int
    twice_j2: int
    twice_m2: int
    twice_J: int
    twice_M: int

    def validate(self):
        for tj in (self.twice_j1, self.twice_j2, self.twice_J):
            if tj < 0:
                raise DomainError(f"negative twice-spin {tj} in CG key")
        _require_projection(self.twice_j1, self.twice_m1, "j1/m1")
        _require_projection(self.twice_j2, self.twice_m2, "j2/m2")
        _require_projection(self.twice_J, self.twice_M, "J/M")


def _fact(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=None)
def _cg_twice(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    if tm1 + tm2 != tM:
        return 0.0
    if tJ < abs(tj1 - tj2) or tJ > tj1 + tj2 or (tj1 + tj2 - tJ) % 2 != 0:
        return 0.0

    # Integer halves of the Racah factorial arguments.
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tj2 + tJ) // 2
    c = (-tj1 + tj2 + tJ) // 2
    d = (tJ + tM) // 2
    e = (tJ - tM) // 2
    f = (tj1 - tm1) // 2
    g = (tj1 + tm1) // 2
    h = (tj2 - tm2) // 2
    i = (tj2 + tm2) // 2

    k_min = max(0, (tj2 - tJ - tm1) // 2, (tj1 - tJ + tm2) // 2)
    k_max = min(a, f, i)
    if k_max < k_min:
        return 0.0

    exact = max(tj1, tj2, tJ) <= _EXACT_TWICE_LIMIT
    if exact:
        total = Fraction(0)
        for k in range(k_min, k_max + 1):
            den = (_fact(k) * _fact(a - k) * _fact(f - k) * _fact(i - k)
                   * _fact((tJ - tj2 + tm1) // 2 + k) * _fact((tJ - tj1 - tm2) // 2 + k))
            total += Fraction((-1) ** k, den)
        if total == 0:
            return 0.0
        pref_sq = Fraction(
            (tJ + 1) * _fact(a) * _fact(b) * _fact(c)
            * _fact(d) * _fact(e) * _fact(f) * _fact(g) * _fact(h) * _fact(i),
            _fact((tj1 + tj2 + tJ) // 2 + 1),
        )
        value_sq = pref_sq * total * total
        return math.copysign(math.sqrt(float(value_sq)), float(total))

    # Large-spin fallback: log-factorial accumulation.
    lg = math.lgamma
    ln_pref = 0.5 * (math.log(tJ + 1)
                     + lg(a + 1) + lg(b + 1) + lg(c + 1) - lg((tj1 + tj2 + tJ) // 2 + 2)
                     + lg(d + 1) + lg(e + 1) + lg(f + 1) + lg(g + 1) + lg(h + 1) + lg(i + 1))
    total = 0.0
    for k in range(k_min, k_max + 1):
        ln_den = (lg(k + 1) + lg(a - k + 1) + lg(f - k + 1) + lg(i - k + 1)
                  + lg((tJ - tj2 + tm1) // 2 + k + 1) + lg((tJ - tj1 - tm2) // 2 + k + 1))
        total += (-1) ** k * math.exp(ln_pref - ln_den)
    return total


def clebsch_gordan(key: CGKey) -> float:
    """Condon-Shortley Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.

    Returns 0 when the selection rules (m1+m2=M, triangle inequality)
    fail; raises DomainError for malformed half-integer inputs.
    """
    key.validate()
    return _cg_twice(key.twice_j1, key.twice_m1, key.twice_j2, key.twice_m2,
                     key.twice_J, key.twice_M)


def cg(j1, m1, j2, m2, J, M) -> float:
    """Clebsch-Gordan coefficient with spins given as values (e.g. 0.5)."""
    key = CGKey(as_spin(j1).twice, _twice_projection(m1), as_spin(j2).twice,
                _twice_projection(m2), as_spin(J).twice, _twice_projection(M))
    return clebsch_gordan(key)


def _twice_projection(m) -> int:
    tm = 2 * m
    if abs(tm - round(tm)) > 1e-12:
        raise DomainError(f"{m!r} is not a half-integer projection")
    return int(round(tm))


def coupled_highest_weight_cg(spin: HalfSpin, K: int) -> float:
    """C_{SS,K0}^{SS}, the coefficient weighting rank-K terms of the Husimi
    expansion; equals sqrt(2S+1) (2S)! / sqrt((2S-K)! (2S+1+K)!)."""
    spin = as_spin(spin)
    t = spin.twice
    if not 0 <= K <= t:
        raise DomainError(f"rank K={K} out of range for 2S={t}")
    value_sq = Fraction((t + 1) * _fact(t) ** 2, _fact(t - K) * _fact(t + 1 + K))
    return math.sqrt(float(value_sq))


@lru_cache(maxsize=None)
def _wigner_d_cached(twice_spin: int, beta: float) -> np.ndarray:
    spin = HalfSpin(twice_spin)
    dim = spin.dim
    tj = twice_spin
    half = beta / 2.0
    c, s = math.cos(half), math.sin(half)
    out = np.zeros((dim, dim))
    for ip, tmp in enumerate(range(tj, -tj - 1, -2)):
        for im, tm in enumerate(range(tj, -tj - 1, -2)):
            # dm = m' - m; plain float powers keep 0**0 == 1 exact at poles.
            dm = (tmp - tm) // 2
            k_min = max(0, -dm)
            k_max = min((tj + tm) // 2, (tj - tmp) // 2)
            if k_max < k_min:
                continue
            pref = math.sqrt(float(
                _fact((tj + tmp) // 2) * _fact((tj - tmp) // 2)
                * _fact((tj + tm) // 2) * _fact((tj - tm) // 2)))
            total = 0.0
            for k in range(k_min, k_max + 1):
                p_c = tj - 2 * k - dm
                p_s = 2 * k + dm
                den = (_fact((tj + tm) // 2 - k) * _fact(k)
                       * _fact((tj - tmp) // 2 - k) * _fact(k + dm))
                total += (-1) ** (k + dm) * (c ** p_c) * (s ** p_s) / den
            out[ip, im] = pref * total
    out.setflags(write=False)
    return out


def wigner_small_d(spin: HalfSpin, beta: float) -> np.ndarray:
    """Small Wigner matrix d^S(beta), rows/columns ordered m = S..-S.

    Entries are <S,m'| exp(-i beta S_y) |S,m>; d(0) is the identity.
    """
    return _wigner_d_cached(as_spin(spin).twice, float(beta))


def wigner_small_d_element(spin: HalfSpin, mp, m, beta: float) -> float:
    spin = as_spin(spin)
    tmp, tm = _twice_projection(mp), _twice_projection(m)
    _require_projection(spin.twice, tmp, "m'")
    _require_projection(spin.twice, tm, "m")
    d = wigner_small_d(spin, beta)
    return float(d[(spin.twice - tmp) // 2, (spin.twice - tm) // 2])


def _normalized_legendre(k_max: int, q: int, x: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre values Pbar_Kq(x) for K=q..k_max.

    Normalized so that Y_Kq = Pbar_Kq(cos theta) * exp(i q phi); includes
    the Condon-Shortley phase. Returns array of shape (k_max-q+1,) + x.shape.
    Stable three-term recursion, good to K of several hundred.
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    # Seed: Pbar_qq
    p_qq = np.full(x.shape, 1.0 / math.sqrt(4.0 * math.pi))
    for j in range(1, q + 1):
        p_qq = -math.sqrt((2 * j + 1) / (2.0 * j)) * sin_t * p_qq
    values = [p_qq]
    if k_max > q:
        values.append(math.sqrt(2 * q + 3) * x * p_qq)
    for K in range(q + 2, k_max + 1):
        a = math.sqrt((4.0 * K * K - 1.0) / (K * K - q * q))
        b = math.sqrt(((K - 1.0) ** 2 - q * q) / (4.0 * (K - 1.0) ** 2 - 1.0))
        values.append(a * (x * values[-1] - b * values[-2]))
    return np.stack(values)


def spherical_harmonic(K: int, q: int, theta, phi) -> np.ndarray:
    """Orthonormal spherical harmonic Y_Kq(theta, phi), Condon-Shortley phase.

    theta/phi may be scalars or broadcast-compatible arrays.
    """
    if K < 0 or abs(q) > K:
        raise DomainError(f"|q| must not exceed K (K={K}, q={q})")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    aq = abs(q)
    pbar = _normalized_legendre(K, aq, np.cos(theta))[-1]
    y = pbar * np.exp(1j * aq * phi)
    if q < 0:
        y = (-1) ** aq * np.conjugate(y)
    return y if y.shape else complex(y)


def spherical_harmonics_stack(k_max: int, theta, phi) -> dict[tuple[int, int], np.ndarray]:
    """All Y_Kq for K <= k_max on the given points, as a {(K, q): array} map."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    x = np.cos(theta)
    out = {}
    for q in range(0, k_max + 1):
        block = _normalized_legendre(k_max, q, x)
        e_pos = np.exp(1j * q * phi)
        for K in range(q, k_max + 1):
            y = block[K - q] * e_pos
            out[(K, q)] = y
            if q > 0:
                out[(K, -q)] = (-1) ** q * np.conjugate(y)
    return out
