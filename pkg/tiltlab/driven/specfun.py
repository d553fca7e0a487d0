"""
Функции Бесселя первого рода целого порядка.

Семейство J_0..J_m считается обратной рекурсией Миллера с нормировкой
J_0 + 2·(J_2 + J_4 + ...) = 1, при малых |x| используется степенной ряд.
"""
import logging
import math

import numpy as np
from scipy import optimize

from .exceptions import DomainError

logger = logging.getLogger(__name__)

SERIES_RADIUS = 2.0
RESCALE_LIMIT = 1e250
ZERO_XTOL = 1e-14


def _check_order(m):
    if isinstance(m, bool) or int(m) != m:
        raise DomainError(f'Bessel order must be an integer, got {m!r}')
    return int(m)


def _check_argument(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f'Bessel argument must be finite, got {x!r}')
    return x


def _series(m, x):
    half = 0.5 * x
    term = half ** m / math.factorial(m)
    total = term
    k = 0
    while abs(term) > 1e-17 * max(abs(total), 1e-300):
        k += 1
        term *= -half * half / (k * (k + m))
        total += term
        if k > 200:
            break
    return total


def _start_index(m, x):
    scale = max(m, x, 1.0)
    start = int(scale) + 30 + int(math.sqrt(60.0 * scale))
    return start + start % 2


def bessel_j_family(m_max, x):
    """
    Возвращает массив [J_0(x), ..., J_{m_max}(x)].

    Отрицательный аргумент обрабатывается через J_k(-x) = (-1)^k J_k(x).
    """
    m_max = _check_order(m_max)
    if m_max < 0:
        raise DomainError('family order must be non-negative')
    x = _check_argument(x)
    ax = abs(x)
    if ax == 0.0:
        values = np.zeros(m_max + 1)
        values[0] = 1.0
        return values
    if ax <= SERIES_RADIUS:
        values = np.array([_series(k, ax) for k in range(m_max + 1)])
    else:
        values = _miller(m_max, ax)
    if x < 0.0:
        values[1::2] *= -1.0
    return values


def _miller(m_max, x):
    start = _start_index(m_max, x)
    values = np.zeros(m_max + 1)
    upper, current = 0.0, 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        lower = 2.0 * k / x * current - upper
        upper, current = current, lower
        if abs(current) > RESCALE_LIMIT:
            current /= RESCALE_LIMIT
            upper /= RESCALE_LIMIT
            values /= RESCALE_LIMIT
            norm /= RESCALE_LIMIT
        if k - 1 <= m_max:
            values[k - 1] = current
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * current
    norm += current
    return values / norm


def bessel_j(m, x):
    """J_m(x) для целого m; отрицательный порядок через J_{-m} = (-1)^m J_m."""
    m = _check_order(m)
    x = _check_argument(x)
    sign = 1.0
    if m < 0:
        m = -m
        sign = -1.0 if m % 2 else 1.0
    if abs(x) <= SERIES_RADIUS:
        value = _series(m, abs(x))
        if x < 0.0 and m % 2:
            value = -value
        return sign * value
    return sign * float(bessel_j_family(m, x)[m])


def _mcmahon_guess(m, k):
    mu = 4.0 * m * m
    beta = (k + 0.5 * m - 0.25) * math.pi
    eight_beta = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / eight_beta
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * eight_beta ** 3)
    )


def _scan_bracket(m, k, step=0.1):
    count = 0
    lo = max(float(m), step)
    f_lo = bessel_j(m, lo)
    while True:
        hi = lo + step
        f_hi = bessel_j(m, hi)
        if f_lo * f_hi < 0.0:
            count += 1
            if count == k:
                return lo, hi
        lo, f_lo = hi, f_hi


def bessel_j_zero(m, k):
    """
    k-й положительный нуль J_m.

    Начальное приближение берётся из асимптотики Макмагона, затем корень
    уточняется бисекцией; если скобка вокруг приближения не содержит
    ровно этот нуль, нули пересчитываются сканированием от x = m.
    """
    m = _check_order(m)
    if m < 0:
        raise DomainError('zeros are defined here for non-negative orders')
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f'zero index must be a positive integer, got {k!r}')
    k = int(k)
    guess = _mcmahon_guess(m, k)
    lo, hi = guess - 1.0, guess + 1.0
    if lo <= m or bessel_j(m, lo) * bessel_j(m, hi) >= 0.0:
        lo, hi = _scan_bracket(m, k)
    root = optimize.bisect(
        lambda x: bessel_j(m, x), lo, hi, xtol=ZERO_XTOL, maxiter=200
    )
    logger.debug('zero #%d of J_%d: %.15f', k, m, root)
    return root
