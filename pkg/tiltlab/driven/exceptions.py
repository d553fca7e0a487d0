"""Исключения расчётного ядра и коды выхода команд управления."""

EXIT_USAGE = 2
EXIT_INTEGRATION = 3
EXIT_INFEASIBLE = 4


class TiltlabError(Exception):
    """Базовое исключение; ``exit_code`` читают команды управления."""

    exit_code = 1


class DomainError(TiltlabError, ValueError):
    """Аргумент вне области определения функции."""

    exit_code = EXIT_USAGE


class SiteIndexError(TiltlabError, IndexError):
    """Номер узла вне окна решётки."""

    exit_code = EXIT_USAGE


class IntegrationError(TiltlabError):
    exit_code = EXIT_INTEGRATION


class EdgeLeakError(IntegrationError):
    """Заселённость у края окна превысила порог: окно слишком мало."""

    def __init__(self, leak, t, tol):
        self.leak = leak
        self.t = t
        self.tol = tol
        super().__init__(
            f'edge leak {leak:.3e} > {tol:.1e} at t={t:.6g}; '
            'widen the lattice window'
        )

    def __reduce__(self):
        return self.__class__, (self.leak, self.t, self.tol)


class StiffnessError(IntegrationError):
    """Шаг интегратора выродился."""


class DegenerateRateError(TiltlabError):
    """Активная скорость туннелирования равна нулю (CDT, а не DL)."""

    exit_code = EXIT_INFEASIBLE


class InfeasibleConditionError(TiltlabError):
    """Условие CDT/DL/неустойчивости не имеет решения при данных параметрах."""

    exit_code = EXIT_INFEASIBLE


class ScheduleError(TiltlabError, ValueError):
    exit_code = EXIT_USAGE


class ConfigError(TiltlabError):
    exit_code = EXIT_USAGE


class ProtocolDegradedWarning(UserWarning):
    """Перенос на сегменте протокола оказался неполным."""
