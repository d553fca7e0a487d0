"""
Направленный перенос переключением фазы накачки.

Фаза чередуется между φ_1 (активны a-связи) и φ_2 (активны b-связи);
на каждом сегменте частица совершает полный раби-перенос через одну связь.
"""
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from django.conf import settings

from .conditions import ConditionKind
from .dynamics import (
    IntegratorConfig,
    Picture,
    WaveState,
    center_of_mass,
    integrate_averaged,
    integrate_full,
)
from .effective import rates_for_site
from .exceptions import DomainError, ProtocolDegradedWarning, ScheduleError
from .lattice import GapArguments, coupling_at

logger = logging.getLogger(__name__)

MODELS = ('full', 'averaged')


@dataclass(frozen=True)
class Segment:
    """Отрезок постоянной фазы; bond - какая связь активна ('a', 'b')."""

    duration: float
    phi: float
    bond: Optional[str] = None


@dataclass(frozen=True)
class PhaseSchedule:
    segments: Tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ScheduleError('schedule has no segments')
        for segment in self.segments:
            if not segment.duration > 0:
                raise ScheduleError(
                    f'segment duration must be positive: {segment.duration}'
                )

    @property
    def t_total(self):
        return float(sum(segment.duration for segment in self.segments))

    @property
    def switch_times(self):
        """Моменты переключения (без конца последнего сегмента)."""
        return np.cumsum([s.duration for s in self.segments])[:-1]

    def phase_at(self, t):
        edges = np.cumsum([s.duration for s in self.segments])
        index = np.searchsorted(edges, t, side='right')
        index = np.minimum(index, len(self.segments) - 1)
        return np.array([s.phi for s in self.segments])[index]


def build_ratchet_schedule(sol1, sol2, cycles, dwell='transfer'):
    """
    [(T_1, φ_1), (T_2, φ_2)] × cycles.

    dwell='transfer' держит фазу π/(2ω_i) - полный перенос через связь;
    dwell='half_period' воспроизводит буквальные полупериоды π/ω_i,
    после которых частица возвращается на исходный узел.
    """
    if sol1.kind is not ConditionKind.DL_BACKWARD:
        raise ScheduleError(
            f'first phase must freeze the b-bonds, got {sol1.kind.value}'
        )
    if sol2.kind is not ConditionKind.DL_FORWARD:
        raise ScheduleError(
            f'second phase must freeze the a-bonds, got {sol2.kind.value}'
        )
    if isinstance(cycles, bool) or int(cycles) != cycles or cycles < 1:
        raise ScheduleError(f'cycles must be a positive integer: {cycles!r}')
    if dwell == 'transfer':
        first, second = sol1.transfer_time, sol2.transfer_time
    elif dwell == 'half_period':
        first, second = sol1.half_period, sol2.half_period
    else:
        raise ScheduleError(f'unknown dwell {dwell!r}')
    pair = (
        Segment(duration=first, phi=sol1.phi, bond='a'),
        Segment(duration=second, phi=sol2.phi, bond='b'),
    )
    return PhaseSchedule(segments=pair * int(cycles))


def mirror_schedule(schedule):
    """Обратный порядок фаз внутри каждой пары: φ_2 первой."""
    segments = list(schedule.segments)
    mirrored = []
    for index in range(0, len(segments) - 1, 2):
        mirrored.extend([segments[index + 1], segments[index]])
    if len(segments) % 2:
        mirrored.append(segments[-1])
    return PhaseSchedule(segments=tuple(mirrored))


def _target(site, bond):
    """Сосед через связь bond: a-связи (2k, 2k+1), b-связи (2k-1, 2k)."""
    if bond is None:
        return None
    even = site % 2 == 0
    if bond == 'a':
        return site + 1 if even else site - 1
    return site - 1 if even else site + 1


@dataclass(frozen=True)
class SegmentSummary:
    index: int
    phi: float
    t_start: float
    t_end: float
    dominant_site: int
    target_site: Optional[int]
    fidelity: Optional[float]
    x_mean: float


@dataclass
class ProtocolResult:
    trajectory: object
    phases: np.ndarray
    summaries: List[SegmentSummary]
    x_start: float
    cycles: float

    @property
    def displacement(self):
        return self.summaries[-1].x_mean - self.x_start

    @property
    def displacement_per_cycle(self):
        return self.displacement / self.cycles if self.cycles else 0.0


def run_protocol(geom, drive_base, schedule, model='averaged', start_site=0,
                 cfg=None, parity='even'):
    """
    Прогоняет расписание фаз в полной или усреднённой модели.

    Амплитуды непрерывны через переключения, меняется только генератор;
    норма проверяется один раз, на старте. Полная модель считается
    с допусками не грубее TILTLAB_PROTOCOL_TOL.
    parity='even' - стандартное соглашение (старт с чётного узла,
    первой идёт a-связь, движение вправо); parity='odd' - противоположное,
    то же расписание уводит частицу влево.
    """
    if model not in MODELS:
        raise DomainError(f'model must be one of {MODELS}, got {model!r}')
    if start_site % 2 != (0 if parity == 'even' else 1):
        raise ScheduleError(
            f'start site {start_site} does not match the {parity} convention'
        )
    cfg = cfg or IntegratorConfig()
    if model == 'full':
        tol = settings.TILTLAB_PROTOCOL_TOL
        cfg = replace(cfg, rtol=min(cfg.rtol, tol), atol=min(cfg.atol, tol))
    gaps = GapArguments.of(geom, drive_base)
    picture = Picture.FULL if model == 'full' else Picture.AVERAGED
    state = WaveState.localized(geom, start_site, picture)
    x_start = center_of_mass(geom, state)
    trajectory = None
    phases = []
    summaries = []
    site = start_site
    for index, segment in enumerate(schedule.segments):
        drive = drive_base.with_phase(segment.phi)
        t_end = state.t + segment.duration
        if model == 'full':
            part = integrate_full(geom, drive, state, t_end, cfg,
                                  check_norm=index == 0)
        else:
            rates = rates_for_site(drive, gaps, 'even')
            part = integrate_averaged(rates, geom, state, t_end, cfg,
                                      check_norm=index == 0)
        fresh = len(part) if trajectory is None else len(part) - 1
        trajectory = part if trajectory is None else trajectory.extend(part)
        phases.extend([segment.phi] * fresh)
        state = part.final
        populations = np.abs(state.amps) ** 2
        target = _target(site, segment.bond)
        fidelity = None
        if target is not None:
            fidelity = float(populations[geom.offset(target)])
            if fidelity < settings.TILTLAB_FIDELITY_THRESHOLD:
                message = (
                    f'segment {index}: population at target site {target} '
                    f'is {fidelity:.3f}'
                )
                logger.warning(message)
                warnings.warn(message, ProtocolDegradedWarning)
            site = target
        dominant = int(geom.indices[np.argmax(populations)])
        summaries.append(SegmentSummary(
            index=index,
            phi=segment.phi,
            t_start=float(part.times[0]),
            t_end=float(part.times[-1]),
            dominant_site=dominant,
            target_site=target,
            fidelity=fidelity,
            x_mean=center_of_mass(geom, state),
        ))
        logger.debug('segment %d done: dominant site %d', index, dominant)
    return ProtocolResult(
        trajectory=trajectory,
        phases=np.array(phases),
        summaries=summaries,
        x_start=x_start,
        cycles=len(schedule.segments) / 2,
    )


def coupling_trace(drive, schedule, samples=None):
    """J(t, φ(t)) на всём расписании: (times, phases, couplings)."""
    if samples is None:
        samples = settings.TILTLAB_SAMPLES
    times = np.linspace(0.0, schedule.t_total, samples + 1)
    phases = schedule.phase_at(times)
    couplings = drive.J0 + drive.deltaJ * np.cos(
        drive.m * drive.omega * times - phases
    )
    return times, phases, couplings


def switch_continuity(drive, schedule):
    """|J(t_s; φ_до) - J(t_s; φ_после)| в каждом моменте переключения."""
    jumps = []
    for t_switch, before, after in zip(
        schedule.switch_times, schedule.segments, schedule.segments[1:]
    ):
        jumps.append(abs(
            coupling_at(drive.with_phase(before.phi), t_switch)
            - coupling_at(drive.with_phase(after.phi), t_switch)
        ))
    return np.array(jumps)


def _run_job(job):
    return run_protocol(**job)


def run_batch(jobs, workers=None):
    """
    Независимые прогоны протокола; результаты в порядке jobs.

    Каждое задание - словарь аргументов run_protocol.
    """
    if workers is None:
        workers = settings.TILTLAB_WORKERS
    if workers <= 1 or len(jobs) < 2:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_run_job, jobs))
