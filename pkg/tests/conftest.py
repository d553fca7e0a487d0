from typing import Iterable

import numpy as np
import pytest


class SafeImportFromContextManager:
    def __init__(
            self,
            import_path: str,
            import_names: Iterable[str],
            import_of: str = "",
    ):
        self._import_path: str = import_path
        self._import_names: Iterable[str] = import_names
        self._import_of = f"{import_of} " if import_of else ""

    def __enter__(self):
        pass

    def __exit__(self, exc_type, exc_value, traceback):
        if exc_type is ImportError:
            disp_imp_names = "`, ".join(self._import_names)
            raise AssertionError(
                f"Убедитесь, что в файле `{self._import_path}` нет ошибок. "
                f"При импорте из него {self._import_of}"
                f"`{disp_imp_names}` возникла ошибка:\n"
                f"{exc_type.__name__}: {exc_value}"
            )


with SafeImportFromContextManager(
        "driven/lattice.py",
        ["LatticeGeometry", "DriveParams"],
        import_of="геометрии решётки",
):
    from driven.lattice import DriveParams, LatticeGeometry  # noqa:F401

with SafeImportFromContextManager(
        "driven/dynamics.py", ["IntegratorConfig"], import_of="интеграторов"
):
    from driven.dynamics import IntegratorConfig

pytest_plugins = [
    "fixtures.drives",
    "fixtures.configs",
]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tight_cfg():
    return IntegratorConfig(rtol=1e-12, atol=1e-12, samples=100)


def max_abs(values) -> float:
    return float(np.max(np.abs(values)))
