"""
Условия CDT, DL и неустойчивости как уравнения на фазу накачки.

Корни ищутся бисекцией; замкнутая формула через arccos служит
начальным приближением. Каждый возвращённый корень проверяется
подстановкой в effective_rate.
"""
import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np
from django.conf import settings
from scipy import optimize

from .effective import EffectiveRates, analytic_trajectory
from .exceptions import (
    DegenerateRateError,
    DomainError,
    InfeasibleConditionError,
)
from .specfun import bessel_j_family

logger = logging.getLogger(__name__)

PHASE_XTOL = 1e-15
DELTA_XTOL = 1e-13
REFINE_WIDTH = 1e-7


class ConditionKind(enum.Enum):
    CDT = 'cdt'
    DL_FORWARD = 'dl_forward'
    DL_BACKWARD = 'dl_backward'
    INSTABILITY = 'instability'


@dataclass(frozen=True)
class ConditionSolution:
    """
    Решение условия на фазу вместе со скоростями чётного узла.

    DL_FORWARD: обнулена связь вперёд (a-связь), DL_BACKWARD: связь назад.
    half_period = π/rabi_freq, transfer_time = π/(2·rabi_freq) -
    время полного переноса через активную связь.
    """

    kind: ConditionKind
    phi: float
    rates: EffectiveRates
    rabi_freq: Optional[float] = None
    half_period: Optional[float] = None
    transfer_time: Optional[float] = None

    def to_record(self):
        record = {
            'kind': self.kind.value,
            'phi': self.phi,
            'rates': {
                'forward': [self.rates.forward.real, self.rates.forward.imag],
                'backward': [
                    self.rates.backward.real, self.rates.backward.imag
                ],
            },
        }
        if self.rabi_freq is not None:
            record['rabi_freq'] = self.rabi_freq
            record['half_period'] = self.half_period
            record['transfer_time'] = self.transfer_time
        return record


def _scale(J0, deltaJ=0.0):
    """Масштаб допусков: J0, а при J0 = 0 - амплитуда модуляции."""
    return max(abs(J0) if J0 else abs(deltaJ), 1e-300)


def _root_tol():
    return settings.TILTLAB_ROOT_TOL


def _require_even(m):
    if m % 2:
        raise DomainError(f'phase condition needs an even order, got m={m}')


def _rate(J0, deltaJ, m, phi, bessel):
    if m % 2 == 0:
        return complex(J0 * bessel[0] + deltaJ * math.cos(phi) * bessel[m])
    return complex(J0 * bessel[0], deltaJ * math.sin(phi) * bessel[m])


def rates_at(J0, deltaJ, m, phi, delta_a, delta_b):
    """Скорости чётного узла (F(Δ_a), F(-Δ_b)) при фазе phi."""
    return EffectiveRates(
        forward=_rate(J0, deltaJ, m, phi, bessel_j_family(m, delta_a)),
        backward=_rate(J0, deltaJ, m, phi, bessel_j_family(m, -delta_b)),
    )


def _rates_chunk(J0, deltaJ, m, delta_a, delta_b, phis):
    return [rates_at(J0, deltaJ, m, phi, delta_a, delta_b) for phi in phis]


def scan_rates(J0, deltaJ, m, delta_a, delta_b, phis, workers=None):
    """
    Скорости чётного узла на сетке фаз phis.

    При workers > 1 сетка режется на куски и считается в пуле процессов;
    порядок результата совпадает с порядком phis.
    """
    if workers is None:
        workers = settings.TILTLAB_WORKERS
    phis = [float(phi) for phi in phis]
    job = partial(_rates_chunk, J0, deltaJ, m, delta_a, delta_b)
    if workers <= 1 or len(phis) < 2 * workers:
        return job(phis)
    chunks = np.array_split(np.array(phis), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        parts = executor.map(job, [chunk.tolist() for chunk in chunks])
        return [rates for part in parts for rates in part]


def _in_bracket(candidates, bracket):
    lo, hi = bracket
    for phi in candidates:
        shift = math.ceil((lo - phi) / (2 * math.pi))
        phi += 2 * math.pi * shift
        if lo <= phi <= hi:
            return phi
    return None


def _bisect(function, lo, hi, xtol, what):
    f_lo, f_hi = function(lo), function(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if f_lo * f_hi > 0:
        raise InfeasibleConditionError(
            f'{what}: no sign change on [{lo:.6g}, {hi:.6g}]'
        )
    return optimize.bisect(function, lo, hi, xtol=xtol, maxiter=200)


def solve_phase(J0, deltaJ, m, delta, bracket=(0.0, math.pi)):
    """
    Фаза, обнуляющая F(m, phi, delta) при чётном m.

    cos(phi) = -J0·J_0(Δ)/(δJ·J_m(Δ)); из пары phi и 2π - phi
    возвращается корень внутри bracket.
    """
    _require_even(m)
    bessel = bessel_j_family(m, delta)
    numerator = -J0 * bessel[0]
    denominator = deltaJ * bessel[m]
    if denominator == 0:
        raise InfeasibleConditionError(
            f'rate at delta={delta} does not depend on the phase '
            f'(deltaJ·J_{m} = 0)'
        )
    ratio = numerator / denominator
    if abs(ratio) > 1:
        raise InfeasibleConditionError(
            f'required cos(phi) = {ratio:.6g} is outside [-1, 1] '
            f'for delta={delta}'
        )
    guess = math.acos(ratio)
    phi = _in_bracket((guess, -guess), bracket)
    if phi is None:
        raise InfeasibleConditionError(
            f'zeros {guess:.6g} and {2 * math.pi - guess:.6g} (mod 2π) '
            f'lie outside bracket {tuple(bracket)}'
        )

    def real_rate(x):
        return _rate(J0, deltaJ, m, x, bessel).real

    lo = max(bracket[0], phi - REFINE_WIDTH)
    hi = min(bracket[1], phi + REFINE_WIDTH)
    if real_rate(lo) * real_rate(hi) < 0:
        phi = optimize.bisect(real_rate, lo, hi, xtol=PHASE_XTOL)
    residual = abs(_rate(J0, deltaJ, m, phi, bessel))
    if residual > _root_tol() * _scale(J0, deltaJ):
        raise InfeasibleConditionError(
            f'phase {phi} leaves residual rate {residual:.3e}'
        )
    logger.debug('zero of F(delta=%g) at phi=%.15f', delta, phi)
    return phi


def solve_cdt_phase(J0, deltaJ, m, delta_a, delta_b, ratio_tol=None):
    """
    Общая фаза phi_0, обнуляющая обе скорости.

    Для чётного m отношения J_0(Δ)/J_m(Δ) должны совпадать (с допуском
    ratio_tol); для нечётного m оба Δ должны быть нулями J_0 и phi_0 = 0.
    """
    if ratio_tol is None:
        ratio_tol = settings.TILTLAB_CDT_RATIO_TOL
    bessel_a = bessel_j_family(m, delta_a)
    bessel_b = bessel_j_family(m, delta_b)
    if m % 2:
        static = max(abs(J0 * bessel_a[0]), abs(J0 * bessel_b[0]))
        if static > ratio_tol * _scale(J0, deltaJ):
            raise InfeasibleConditionError(
                f'odd m={m}: CDT needs J_0(delta_a) = J_0(delta_b) = 0, got '
                f'J_0({delta_a}) = {bessel_a[0]:.3e}, '
                f'J_0({delta_b}) = {bessel_b[0]:.3e}'
            )
        return 0.0
    if bessel_a[m] == 0 or bessel_b[m] == 0:
        raise InfeasibleConditionError(
            f'J_{m} vanishes at one of the gaps; the ratio is undefined'
        )
    ratio_a = bessel_a[0] / bessel_a[m]
    ratio_b = bessel_b[0] / bessel_b[m]
    mismatch = abs(ratio_a - ratio_b) / max(1.0, abs(ratio_a), abs(ratio_b))
    if mismatch > ratio_tol:
        raise InfeasibleConditionError(
            f'ratios J_0/J_{m} differ: {ratio_a:.10g} at delta_a={delta_a} '
            f'vs {ratio_b:.10g} at delta_b={delta_b}'
        )
    if deltaJ == 0:
        if J0 * ratio_a == 0:
            return math.pi / 2
        raise InfeasibleConditionError(
            'deltaJ = 0: the rates do not depend on phi'
        )
    cosine = -J0 * 0.5 * (ratio_a + ratio_b) / deltaJ
    if abs(cosine) > 1:
        raise InfeasibleConditionError(
            f'required cos(phi_0) = {cosine:.6g} is outside [-1, 1]'
        )
    phi0 = math.acos(cosine)
    rates = rates_at(J0, deltaJ, m, phi0, delta_a, delta_b)
    residual = max(abs(rates.forward), abs(rates.backward))
    bound = (
        ratio_tol * max(1.0, abs(ratio_a), abs(ratio_b))
        + _root_tol()
    ) * _scale(J0, deltaJ)
    if residual > bound:
        raise InfeasibleConditionError(
            f'phase {phi0} leaves residual rate {residual:.3e} '
            f'above {bound:.3e}'
        )
    logger.debug(
        'CDT phase %.12f, residual rates %.3e / %.3e',
        phi0, abs(rates.forward), abs(rates.backward),
    )
    return phi0


def _pair_function(m, delta_a):
    seed = bessel_j_family(m, delta_a)

    def pole_free(delta):
        bessel = bessel_j_family(m, delta)
        return bessel[0] * seed[m] - seed[0] * bessel[m]

    return pole_free


def solve_cdt_delta_pair(J0, deltaJ, m, delta_a_seed, delta_b_bracket):
    """
    При фиксированном Δ_a ищет Δ_b с тем же отношением J_0/J_m.

    Ищется первая смена знака J_0(Δ)·J_m(Δ_a) - J_0(Δ_a)·J_m(Δ) на
    равномерной сетке скобки, затем бисекция.
    Возвращает (delta_a, delta_b, phi0).
    """
    _require_even(m)
    seed = bessel_j_family(m, delta_a_seed)
    if seed[m] == 0:
        raise InfeasibleConditionError(f'J_{m}({delta_a_seed}) = 0')
    ratio = seed[0] / seed[m]
    cosine = -J0 * ratio / deltaJ if deltaJ else math.inf
    if abs(cosine) > 1:
        raise InfeasibleConditionError(
            f'required cos(phi_0) = {cosine:.6g} is outside [-1, 1]: '
            'no common CDT phase'
        )
    function = _pair_function(m, delta_a_seed)
    grid = np.linspace(
        delta_b_bracket[0], delta_b_bracket[1],
        settings.TILTLAB_BRACKET_SCAN_POINTS + 1,
    )
    values = [function(x) for x in grid]
    for lo, hi, f_lo, f_hi in zip(grid, grid[1:], values, values[1:]):
        if f_lo * f_hi <= 0:
            delta_b = _bisect(function, lo, hi, DELTA_XTOL, 'delta pair')
            break
    else:
        raise InfeasibleConditionError(
            f'no delta_b in {tuple(delta_b_bracket)} matches '
            f'J_0/J_{m} = {ratio:.10g} of delta_a={delta_a_seed}'
        )
    phi0 = math.acos(cosine)
    logger.debug('delta pair (%.10f, %.10f), phi0=%.12f',
                 delta_a_seed, delta_b, phi0)
    return float(delta_a_seed), float(delta_b), phi0


def solve_instability_phase(J0, deltaJ, m, delta_a, delta_b, bracket):
    """
    Фаза phi_c, где F(Δ_a) = -F(-Δ_b): скорости равны по модулю
    и противоположны по знаку, J_+ = 0.
    """
    forward_bessel = bessel_j_family(m, delta_a)
    backward_bessel = bessel_j_family(m, -delta_b)

    def total(phi):
        return (
            _rate(J0, deltaJ, m, phi, forward_bessel)
            + _rate(J0, deltaJ, m, phi, backward_bessel)
        )

    def component(phi):
        value = total(phi)
        return value.real if m % 2 == 0 else value.imag

    phi_c = _bisect(component, bracket[0], bracket[1], PHASE_XTOL,
                    'instability condition')
    residual = abs(total(phi_c))
    scale = _scale(J0, deltaJ)
    if residual > _root_tol() * scale:
        raise InfeasibleConditionError(
            f'F(delta_a) + F(-delta_b) = {residual:.3e} at phi={phi_c}'
        )
    forward = _rate(J0, deltaJ, m, phi_c, forward_bessel)
    if abs(forward) < settings.TILTLAB_ZERO_TOL * scale:
        raise InfeasibleConditionError(
            f'crossing at phi={phi_c} has both rates zero (CDT, not a '
            'sign-split crossing)'
        )
    logger.debug('instability crossing at phi=%.15f, rate %.6g',
                 phi_c, abs(forward))
    return phi_c


def rabi_of(rates, active='forward', scale=1.0):
    """(rabi_freq, half_period) для связи active при замороженной второй."""
    if active not in ('forward', 'backward'):
        raise ValueError(f'active must be forward or backward, got {active!r}')
    inactive = 'backward' if active == 'forward' else 'forward'
    if abs(getattr(rates, inactive)) >= settings.TILTLAB_ZERO_TOL * scale:
        raise InfeasibleConditionError(
            f'{inactive} rate {abs(getattr(rates, inactive)):.3e} is not '
            'frozen: no two-site Rabi regime'
        )
    frequency = abs(getattr(rates, active))
    if frequency == 0:
        raise DegenerateRateError(
            'both rates vanish: CDT, the Rabi frequency is zero'
        )
    return frequency, math.pi / frequency


def dl_solution(J0, deltaJ, m, delta_a, delta_b, kind, bracket=(0, math.pi)):
    """Решение DL_FORWARD (φ_2) или DL_BACKWARD (φ_1) с данными Раби."""
    if kind is ConditionKind.DL_BACKWARD:
        phi = solve_phase(J0, deltaJ, m, -delta_b, bracket)
        active = 'forward'
    elif kind is ConditionKind.DL_FORWARD:
        phi = solve_phase(J0, deltaJ, m, delta_a, bracket)
        active = 'backward'
    else:
        raise ValueError(f'{kind} is not a localization condition')
    rates = rates_at(J0, deltaJ, m, phi, delta_a, delta_b)
    frequency, half_period = rabi_of(rates, active, _scale(J0, deltaJ))
    return ConditionSolution(
        kind=kind,
        phi=phi,
        rates=rates,
        rabi_freq=frequency,
        half_period=half_period,
        transfer_time=half_period / 2,
    )


def solve_transport_phases(J0, deltaJ, m, delta_a, delta_b,
                           bracket1=(0, math.pi), bracket2=(0, math.pi)):
    """
    Пара (φ_1, φ_2) протокола переноса.

    φ_1 замораживает b-связи (DL_BACKWARD), φ_2 - a-связи (DL_FORWARD).
    """
    return (
        dl_solution(J0, deltaJ, m, delta_a, delta_b,
                    ConditionKind.DL_BACKWARD, bracket1),
        dl_solution(J0, deltaJ, m, delta_a, delta_b,
                    ConditionKind.DL_FORWARD, bracket2),
    )


def cdt_solution(J0, deltaJ, m, delta_a, delta_b, ratio_tol=None):
    phi = solve_cdt_phase(J0, deltaJ, m, delta_a, delta_b, ratio_tol)
    return ConditionSolution(
        kind=ConditionKind.CDT,
        phi=phi,
        rates=rates_at(J0, deltaJ, m, phi, delta_a, delta_b),
    )


def instability_solution(J0, deltaJ, m, delta_a, delta_b, bracket):
    phi = solve_instability_phase(J0, deltaJ, m, delta_a, delta_b, bracket)
    return ConditionSolution(
        kind=ConditionKind.INSTABILITY,
        phi=phi,
        rates=rates_at(J0, deltaJ, m, phi, delta_a, delta_b),
    )


def spreading_profile(rates, start, t_end, geom, samples=None):
    """
    Отношение участия 1/Σp_n² во времени в усреднённой модели.

    Рост выше двух означает выход из двухузловой раби-локализации.
    """
    if samples is None:
        samples = settings.TILTLAB_SAMPLES
    times = np.linspace(0.0, t_end, samples + 1)
    amplitudes = analytic_trajectory(rates, start, times, geom)
    populations = np.abs(amplitudes) ** 2
    return times, 1.0 / np.sum(populations ** 2, axis=1)
