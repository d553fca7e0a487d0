"""
Интегрирование полной (лабораторной), калибровочно преобразованной
и усреднённой моделей на конечном окне решётки, наблюдаемые.
"""
import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from django.conf import settings
from scipy.integrate import solve_ivp

from .exceptions import DomainError, StiffnessError
from .lattice import GapArguments, coupling_at, guard_edges, tilt_at

logger = logging.getLogger(__name__)

NORM_TOL = 1e-8


class Picture(enum.Enum):
    FULL = 'full'
    TRANSFORMED = 'transformed'
    AVERAGED = 'averaged'


@dataclass(frozen=True)
class WaveState:
    t: float
    amps: np.ndarray
    picture: Picture = Picture.FULL

    @classmethod
    def localized(cls, geom, n, picture=Picture.FULL, t=0.0):
        amps = np.zeros(geom.size, dtype=complex)
        amps[geom.offset(n)] = 1.0
        return cls(t=t, amps=amps, picture=picture)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.amps) ** 2))

    def relabel(self, picture):
        """То же состояние в другой картине без пересчёта фаз."""
        return replace(self, picture=picture)


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = field(default_factory=lambda: settings.TILTLAB_RTOL)
    atol: float = field(default_factory=lambda: settings.TILTLAB_ATOL)
    edge_leak_tol: float = field(
        default_factory=lambda: settings.TILTLAB_EDGE_LEAK_TOL
    )
    samples: int = field(default_factory=lambda: settings.TILTLAB_SAMPLES)
    dt_max: float = math.inf

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.edge_leak_tol > 0):
            raise DomainError('integrator tolerances must be positive')
        if self.samples < 1:
            raise DomainError('at least one sample interval is required')

    def step_ceiling(self, drive):
        """dt_max для полной модели: не меньше 40 шагов на период накачки."""
        steps = settings.TILTLAB_STEPS_PER_PERIOD
        ceiling = drive.period / steps
        if math.isinf(self.dt_max):
            return ceiling
        if self.dt_max > ceiling * (1 + 1e-12):
            raise DomainError(
                f'dt_max={self.dt_max} gives fewer than {steps} steps '
                'per period'
            )
        return self.dt_max


@dataclass
class Trajectory:
    """Выборка состояний: times формы (K,), amplitudes формы (K, size)."""

    times: np.ndarray
    amplitudes: np.ndarray
    picture: Picture
    nfev: int = 0

    def __len__(self):
        return len(self.times)

    def __getitem__(self, index):
        return WaveState(
            t=float(self.times[index]),
            amps=self.amplitudes[index],
            picture=self.picture,
        )

    @property
    def final(self):
        return self[-1]

    def populations(self):
        return np.abs(self.amplitudes) ** 2

    def norms(self):
        return self.populations().sum(axis=1)

    def center_of_mass(self, geom):
        return self.populations() @ geom.positions()

    def participation_ratio(self):
        populations = self.populations()
        return 1.0 / np.sum(populations ** 2, axis=1)

    def extend(self, other):
        """Склейка сегментов; общий момент переключения берётся один раз."""
        skip = 1 if len(self) and np.isclose(
            other.times[0], self.times[-1], rtol=0, atol=1e-12
        ) else 0
        return Trajectory(
            times=np.concatenate([self.times, other.times[skip:]]),
            amplitudes=np.concatenate(
                [self.amplitudes, other.amplitudes[skip:]]
            ),
            picture=other.picture,
            nfev=self.nfev + other.nfev,
        )


def sample_times(t0, t_end, samples):
    return np.linspace(t0, t_end, samples + 1)


def _check_start(state, picture, check_norm=True):
    if state.picture is not picture:
        raise DomainError(
            f'expected a {picture.value} state, got {state.picture.value}'
        )
    if check_norm and abs(state.norm - 1.0) > NORM_TOL:
        raise DomainError(f'initial state is not normalized: {state.norm}')


def _hop(amps):
    """(A_{n+1}, A_{n-1}) с жёсткими стенками на краях окна."""
    up = np.zeros_like(amps)
    down = np.zeros_like(amps)
    up[:-1] = amps[1:]
    down[1:] = amps[:-1]
    return up, down


def _run(rhs, state, t_end, cfg, times, max_step, picture):
    if times is None:
        times = sample_times(state.t, t_end, cfg.samples)
    solution = solve_ivp(
        rhs,
        (state.t, t_end),
        np.asarray(state.amps, dtype=complex),
        method='DOP853',
        t_eval=times,
        rtol=cfg.rtol,
        atol=cfg.atol,
        max_step=max_step,
    )
    if solution.status < 0:
        raise StiffnessError(
            f'{picture.value} integration from t={state.t} failed: '
            f'{solution.message}'
        )
    amplitudes = solution.y.T
    guard_edges(amplitudes, solution.t, cfg.edge_leak_tol)
    logger.debug(
        '%s run to t=%.6g: %d samples, %d rhs calls',
        picture.value, t_end, len(solution.t), solution.nfev,
    )
    return Trajectory(
        times=solution.t,
        amplitudes=amplitudes,
        picture=picture,
        nfev=solution.nfev,
    )


def integrate_full(geom, drive, state0, t_end, cfg=None, times=None,
                 check_norm=True):
    """
    i·dc_n/dt = J(t)(c_{n+1} + c_{n-1}) - E0·cos(ωt)·x_n·c_n.

    Адаптивный DOP853 с ограничением шага по периоду накачки.
    check_norm=False продолжает траекторию с конечного состояния
    предыдущего прогона без проверки нормы.
    """
    cfg = cfg or IntegratorConfig()
    _check_start(state0, Picture.FULL, check_norm)
    positions = geom.positions()

    def rhs(t, amps):
        up, down = _hop(amps)
        return -1j * (
            coupling_at(drive, t) * (up + down)
            - tilt_at(drive, t) * positions * amps
        )

    return _run(
        rhs, state0, t_end, cfg, times, cfg.step_ceiling(drive), Picture.FULL
    )


def integrate_transformed(geom, drive, state0, t_end, cfg=None, times=None,
                          check_norm=True):
    """Точное преобразованное уравнение: связи несут exp(±iΔ sin ωt)."""
    cfg = cfg or IntegratorConfig()
    _check_start(state0, Picture.TRANSFORMED, check_norm)
    gaps = GapArguments.of(geom, drive)
    even = geom.indices % 2 == 0
    forward = np.where(even, gaps.delta_a, gaps.delta_b)
    backward = np.where(even, gaps.delta_b, gaps.delta_a)

    def rhs(t, amps):
        up, down = _hop(amps)
        s = math.sin(drive.omega * t)
        return -1j * coupling_at(drive, t) * (
            up * np.exp(1j * forward * s) + down * np.exp(-1j * backward * s)
        )

    return _run(
        rhs, state0, t_end, cfg, times, cfg.step_ceiling(drive),
        Picture.TRANSFORMED,
    )


def integrate_averaged(rates, geom, state0, t_end, cfg=None, times=None,
                       check_norm=True):
    """
    i·dA_n/dt = F_fwd(n)·A_{n+1} + F_bwd(n)·A_{n-1}.

    rates задаёт скорости чётного узла; скорости нечётного получаются
    сопряжением, так что генератор эрмитов.
    """
    cfg = cfg or IntegratorConfig()
    _check_start(state0, Picture.AVERAGED, check_norm)
    forward, backward = rates.profile(geom)

    def rhs(t, amps):
        up, down = _hop(amps)
        return -1j * (forward * up + backward * down)

    return _run(
        rhs, state0, t_end, cfg, times, cfg.dt_max, Picture.AVERAGED
    )


def _gauge_phase(geom, drive, t):
    return np.exp(
        1j * drive.E0 / drive.omega * geom.positions()
        * math.sin(drive.omega * t)
    )


def to_lab_frame(geom, drive, state):
    """c_n = A_n·exp(i(E0/ω)x_n sin ωt)."""
    if state.picture is Picture.FULL:
        return state
    return WaveState(
        t=state.t,
        amps=state.amps * _gauge_phase(geom, drive, state.t),
        picture=Picture.FULL,
    )


def to_moving_frame(geom, drive, state, picture=Picture.TRANSFORMED):
    if state.picture is not Picture.FULL:
        return state.relabel(picture)
    return WaveState(
        t=state.t,
        amps=state.amps * np.conj(_gauge_phase(geom, drive, state.t)),
        picture=picture,
    )


def lab_frame_trajectory(geom, drive, trajectory):
    if trajectory.picture is Picture.FULL:
        return trajectory
    phases = np.exp(
        1j * drive.E0 / drive.omega
        * np.sin(drive.omega * trajectory.times)[:, None]
        * geom.positions()[None, :]
    )
    return replace(
        trajectory,
        amplitudes=trajectory.amplitudes * phases,
        picture=Picture.FULL,
    )


def _amplitudes(state):
    return state.amps if isinstance(state, WaveState) else np.asarray(state)


def populations(state):
    return np.abs(_amplitudes(state)) ** 2


def center_of_mass(geom, state):
    return float(populations(state) @ geom.positions())


def participation_ratio(state):
    return float(1.0 / np.sum(populations(state) ** 2))


def max_population_deviation(first, second):
    """Максимум |p_n - p'_n| по общим моментам выборки и узлам."""
    if first.amplitudes.shape != second.amplitudes.shape:
        raise ValueError('trajectories are sampled differently')
    return float(np.max(np.abs(first.populations() - second.populations())))
