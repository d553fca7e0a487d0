"""Геометрия бипартитной решётки и периодическая накачка."""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from django.conf import settings

from .exceptions import DomainError, EdgeLeakError, SiteIndexError

logger = logging.getLogger(__name__)

EDGE_SITES = 2


@dataclass(frozen=True)
class LatticeGeometry:
    """
    Решётка с чередующимися расстояниями a (после чётного узла)
    и b (после нечётного), обрезанная окном n_min..n_max.
    """

    a: float
    b: float
    n_min: int
    n_max: int

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(
                f'separations must be positive, got a={self.a}, b={self.b}'
            )
        if not self.n_min < 0 < self.n_max:
            raise DomainError(
                f'window [{self.n_min}, {self.n_max}] must contain site 0'
            )

    @classmethod
    def centered(cls, a, b, half_width=None):
        if half_width is None:
            half_width = settings.TILTLAB_WINDOW_HALF_WIDTH
        return cls(a=a, b=b, n_min=-half_width, n_max=half_width)

    @property
    def size(self):
        return self.n_max - self.n_min + 1

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_max + 1)

    def offset(self, n):
        """Позиция узла n в массиве амплитуд."""
        if not self.n_min <= n <= self.n_max:
            raise SiteIndexError(
                f'site {n} outside window [{self.n_min}, {self.n_max}]'
            )
        return n - self.n_min

    def positions(self):
        n = self.indices
        return np.where(
            n % 2 == 0,
            n * (self.a + self.b) / 2,
            (n + 1) * self.a / 2 + (n - 1) * self.b / 2,
        )


@dataclass(frozen=True)
class DriveParams:
    """J(t) = J0 + deltaJ·cos(m·ωt - phi), наклон E(t) = E0·cos(ωt)."""

    J0: float
    deltaJ: float
    E0: float
    omega: float
    m: int
    phi: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f'omega must be positive, got {self.omega}')
        if int(self.m) != self.m or self.m < 0:
            raise DomainError(f'resonance order must be >= 0, got {self.m}')

    def with_phase(self, phi):
        return replace(self, phi=phi)

    def at_frequency(self, omega):
        """Та же накачка на частоте omega при неизменном E0/ω."""
        return replace(self, omega=omega, E0=self.E0 * omega / self.omega)

    @property
    def period(self):
        return 2 * math.pi / self.omega


@dataclass(frozen=True)
class GapArguments:
    delta_a: float
    delta_b: float

    @classmethod
    def of(cls, geom, drive):
        ratio = drive.E0 / drive.omega
        return cls(delta_a=ratio * geom.a, delta_b=ratio * geom.b)

    def forward(self, n):
        """Δ_n: аргумент связи n → n+1."""
        return self.delta_a if n % 2 == 0 else self.delta_b

    def backward(self, n):
        """Δ_{n-1}: аргумент связи n-1 → n."""
        return self.delta_b if n % 2 == 0 else self.delta_a


def site_position(geom, n):
    geom.offset(n)
    if n % 2 == 0:
        return n * (geom.a + geom.b) / 2
    return (n + 1) * geom.a / 2 + (n - 1) * geom.b / 2


def gap_delta(geom, drive, n):
    """(E0/omega)·(x_{n+1} - x_n): a-связь при чётном n, иначе b-связь."""
    geom.offset(n + 1)
    return drive.E0 / drive.omega * (
        site_position(geom, n + 1) - site_position(geom, n)
    )


def coupling_at(drive, t):
    phase = drive.m * drive.omega * t - drive.phi
    return drive.J0 + drive.deltaJ * np.cos(phase)


def tilt_at(drive, t):
    return drive.E0 * np.cos(drive.omega * t)


def edge_population(amplitudes):
    """Заселённость трёх крайних узлов с каждой стороны окна (по строкам)."""
    populations = np.abs(np.atleast_2d(amplitudes)) ** 2
    width = EDGE_SITES + 1
    return (
        populations[:, :width].sum(axis=1)
        + populations[:, -width:].sum(axis=1)
    )


def guard_edges(amplitudes, times, tol):
    leak = edge_population(amplitudes)
    worst = int(np.argmax(leak))
    if leak[worst] > tol:
        logger.warning(
            'edge leak %.3g at t=%.6g exceeds %.3g', leak[worst],
            np.atleast_1d(times)[worst], tol,
        )
        raise EdgeLeakError(
            float(leak[worst]), float(np.atleast_1d(times)[worst]), tol
        )
