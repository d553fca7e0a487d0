"""
Высокочастотная эффективная модель.

Скорости туннелирования F(m, phi, Δ), символ f(k) и точное решение
усреднённых уравнений для частицы, стартующей из одного узла.
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from .exceptions import DegenerateRateError
from .lattice import guard_edges
from .specfun import bessel_j_family

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffectiveRates:
    """
    Скорости для чётного узла: forward = F(Δ_a) при A_{n+1},
    backward = F(-Δ_b) при A_{n-1}.
    """

    forward: complex
    backward: complex

    @property
    def odd(self):
        """Скорости нечётного узла: F(Δ_b) = F(-Δ_b)*, F(-Δ_a) = F(Δ_a)*."""
        return EffectiveRates(
            forward=np.conj(self.backward), backward=np.conj(self.forward)
        )

    def for_site(self, n):
        return self if n % 2 == 0 else self.odd

    @property
    def symbol(self):
        return SymbolCoefficients(
            j_plus=self.forward + self.backward,
            j_minus=self.forward - self.backward,
        )

    def profile(self, geom):
        """Векторы (forward_n, backward_n) по всем узлам окна."""
        even = geom.indices % 2 == 0
        odd = self.odd
        forward = np.where(even, self.forward, odd.forward).astype(complex)
        backward = np.where(even, self.backward, odd.backward).astype(complex)
        return forward, backward


@dataclass(frozen=True)
class SymbolCoefficients:
    j_plus: complex
    j_minus: complex


def effective_rate(J0, deltaJ, m, phi, delta):
    """
    Усреднённая по периоду скорость J(t)·exp(iΔ sin ωt).

    Ветка выбирается по чётности m: для чётного результат вещественный
    (мнимая часть ровно ноль), для нечётного модуляция входит через i·sin(phi).
    """
    bessel = bessel_j_family(m, delta)
    static = J0 * bessel[0]
    if m % 2 == 0:
        return complex(static + deltaJ * np.cos(phi) * bessel[m], 0.0)
    return complex(static, deltaJ * np.sin(phi) * bessel[m])


def rates_for_site(drive, gaps, parity='even'):
    if parity not in ('even', 'odd'):
        raise ValueError(f'parity must be even or odd, got {parity!r}')
    if parity == 'even':
        forward, backward = gaps.delta_a, gaps.delta_b
    else:
        forward, backward = gaps.delta_b, gaps.delta_a
    return EffectiveRates(
        forward=effective_rate(
            drive.J0, drive.deltaJ, drive.m, drive.phi, forward
        ),
        backward=effective_rate(
            drive.J0, drive.deltaJ, drive.m, drive.phi, -backward
        ),
    )


def symbol_f(rates, k):
    coefficients = rates.symbol
    return (
        coefficients.j_plus * np.cos(k)
        + 1j * coefficients.j_minus * np.sin(k)
    )


def k_grid(points=None):
    if points is None:
        points = settings.TILTLAB_K_POINTS
    return -np.pi + 2 * np.pi * np.arange(points) / points


def _spectral_amplitudes(rates, start, times, points):
    k = k_grid(points)
    own = rates.for_site(start)
    g = own.forward * np.exp(1j * k) + own.backward * np.exp(-1j * k)
    slope = (
        np.conj(own.forward) * np.exp(-1j * k)
        + np.conj(own.backward) * np.exp(1j * k)
    )
    modulus = np.abs(g)
    times = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    phase = modulus * times
    spectrum = np.exp(-1j * start * k) * (
        np.cos(phase) - 1j * times * np.sinc(phase / np.pi) * slope
    )
    return np.fft.ifft(spectrum, axis=-1)


def analytic_trajectory(
        rates, start, times, geom, points=None, leak_tol=None):
    """
    Амплитуды A_n(t) на окне geom для набора моментов times.

    Интеграл по k берётся формулой трапеций на равномерной сетке через
    обратное БПФ. Возвращает массив формы (len(times), geom.size).
    """
    if points is None:
        points = settings.TILTLAB_K_POINTS
    if leak_tol is None:
        leak_tol = settings.TILTLAB_EDGE_LEAK_TOL
    geom.offset(start)
    if geom.size > points:
        raise ValueError(
            f'k-grid of {points} points cannot resolve {geom.size} sites'
        )
    logger.debug(
        'analytic run from site %d: %d sample(s), %d k-points',
        start, len(np.atleast_1d(times)), points,
    )
    coefficients = _spectral_amplitudes(rates, start, times, points)
    n = geom.indices
    amplitudes = coefficients[:, n % points] * np.where(n % 2 == 0, 1, -1)
    guard_edges(amplitudes, times, leak_tol)
    return amplitudes


def analytic_amplitudes(rates, start, t, geom, points=None, leak_tol=None):
    return analytic_trajectory(
        rates, start, [t], geom, points=points, leak_tol=leak_tol
    )[0]


def rabi_solution(rate_active, direction, t):
    """
    Двухузловое решение (A_N, A_{N±1}) при нулевой противоположной связи.

    Частота Раби равна |rate_active|; для комплексной скорости соседняя
    амплитуда несёт сопряжённую фазу.
    """
    if direction not in (1, -1):
        raise ValueError(f'direction must be +1 or -1, got {direction!r}')
    frequency = abs(rate_active)
    if frequency == 0:
        raise DegenerateRateError(
            'active rate is zero: the bond is frozen (CDT), no Rabi swap'
        )
    unit = np.conj(rate_active) / frequency
    return (
        np.cos(frequency * t),
        -1j * unit * np.sin(frequency * t),
    )
