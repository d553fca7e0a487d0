import math

import numpy as np
import pytest

from driven.dynamics import (
    IntegratorConfig,
    Picture,
    Trajectory,
    WaveState,
    center_of_mass,
    integrate_averaged,
    integrate_full,
    integrate_transformed,
    lab_frame_trajectory,
    max_population_deviation,
    participation_ratio,
    to_lab_frame,
    to_moving_frame,
)
from driven.effective import EffectiveRates, rates_for_site
from driven.exceptions import DomainError, EdgeLeakError
from driven.lattice import GapArguments, LatticeGeometry
from fixtures.drives import drive_for_gaps

DRIVE_PERIODS = 10


@pytest.mark.slow
def test_full_model_conserves_norm(ratchet_geometry_small, ratchet_phases):
    sol1, _ = ratchet_phases
    drive = drive_for_gaps(phi=sol1.phi)
    state = WaveState.localized(ratchet_geometry_small, 0)
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-12)
    trajectory = integrate_full(
        ratchet_geometry_small, drive, state, 100.0, cfg
    )
    assert np.max(np.abs(trajectory.norms() - 1.0)) < 1e-8, (
        "Убедитесь, что полная модель сохраняет норму на [0, 100]."
    )
    assert len(trajectory) == 201, (
        "Убедитесь, что выборка содержит samples + 1 моментов с концами."
    )


def test_gauge_map_matches_transformed_equation(
        ratchet_geometry_small, tight_cfg):
    drive = drive_for_gaps(phi=0.4)
    geom = ratchet_geometry_small
    t_end = 8.0
    lab = integrate_full(geom, drive, WaveState.localized(geom, 0), t_end,
                         tight_cfg)
    moving = integrate_transformed(
        geom, drive, WaveState.localized(geom, 0, Picture.TRANSFORMED),
        t_end, tight_cfg,
    )
    mapped = lab_frame_trajectory(geom, drive, moving)
    assert np.max(np.abs(mapped.amplitudes - lab.amplitudes)) < 1e-9, (
        "Убедитесь, что c_n = A_n·exp(i(E0/ω)x_n·sin ωt) связывает полную "
        "и преобразованную модели."
    )
    final = to_moving_frame(geom, drive, lab.final)
    assert final.picture is Picture.TRANSFORMED
    assert np.max(np.abs(final.amps - moving.final.amps)) < 1e-9


def test_frame_maps_are_inverse(ratchet_geometry_small, rng):
    geom = ratchet_geometry_small
    drive = drive_for_gaps()
    amps = rng.normal(size=geom.size) + 1j * rng.normal(size=geom.size)
    state = WaveState(t=0.37, amps=amps, picture=Picture.TRANSFORMED)
    back = to_moving_frame(geom, drive, to_lab_frame(geom, drive, state))
    assert np.allclose(back.amps, amps, rtol=0, atol=1e-14), (
        "Убедитесь, что переход в лабораторную систему и обратно "
        "возвращает исходные амплитуды."
    )
    assert to_lab_frame(geom, drive, state).picture is Picture.FULL


def test_cdt_freezes_the_particle(cdt_geometry, cdt_drive):
    t_end = DRIVE_PERIODS * cdt_drive.period
    state = WaveState.localized(cdt_geometry, 0)
    trajectory = integrate_full(cdt_geometry, cdt_drive, state, t_end)
    start_population = trajectory.populations()[:, cdt_geometry.offset(0)]
    assert start_population.min() >= 0.99, (
        "Убедитесь, что в режиме CDT частица остаётся на исходном узле "
        "с вероятностью не ниже 0.99."
    )


def _rabi_deviation(geom, sol, omega):
    drive = drive_for_gaps(omega=omega, phi=sol.phi)
    gaps = GapArguments.of(geom, drive)
    t_end = 2 * sol.half_period
    times = np.linspace(0.0, t_end, 201)
    full = integrate_full(geom, drive, WaveState.localized(geom, 0), t_end,
                          times=times)
    averaged = integrate_averaged(
        rates_for_site(drive, gaps), geom,
        WaveState.localized(geom, 0, Picture.AVERAGED), t_end, times=times,
    )
    return max_population_deviation(full, averaged), averaged


@pytest.mark.slow
def test_dynamical_localization_follows_rabi(
        ratchet_geometry_small, ratchet_phases):
    sol1, _ = ratchet_phases
    geom = ratchet_geometry_small
    deviation_30, averaged = _rabi_deviation(geom, sol1, 30.0)
    populations = averaged.populations()
    expected = np.cos(sol1.rabi_freq * averaged.times) ** 2
    assert np.allclose(populations[:, geom.offset(0)], expected, atol=1e-8), (
        "Убедитесь, что при φ_1 заселённость узла 0 равна cos²(ω_1·t)."
    )
    assert np.allclose(
        populations[:, geom.offset(1)], 1 - expected, atol=1e-8
    ), "Убедитесь, что при φ_1 заселённость узла 1 равна sin²(ω_1·t)."
    assert deviation_30 < 0.05, (
        "Убедитесь, что полная модель при ω=30 отличается от раби-решения "
        "не более чем на 0.05."
    )
    deviation_60, _ = _rabi_deviation(geom, sol1, 60.0)
    assert deviation_60 < deviation_30, (
        "Убедитесь, что с ростом частоты полная модель приближается "
        "к усреднённой."
    )


def test_time_reversal(ratchet_geometry):
    rates = EffectiveRates(forward=0.5, backward=-0.3)
    geom = ratchet_geometry
    start = WaveState.localized(geom, 0, Picture.AVERAGED)
    forward = integrate_averaged(rates, geom, start, 6.0)
    reversed_state = WaveState(
        t=0.0, amps=np.conj(forward.final.amps), picture=Picture.AVERAGED
    )
    back = integrate_averaged(rates, geom, reversed_state, 6.0)
    assert np.allclose(np.abs(back.final.amps) ** 2,
                       np.abs(start.amps) ** 2, atol=1e-8), (
        "Убедитесь, что при вещественных скоростях сопряжённое состояние "
        "возвращается в исходный узел."
    )


def test_edge_leak_is_reported():
    geom = LatticeGeometry.centered(2.0, 2.2, 5)
    rates = EffectiveRates(forward=1.0, backward=1.0)
    state = WaveState.localized(geom, 0, Picture.AVERAGED)
    with pytest.raises(EdgeLeakError):
        integrate_averaged(rates, geom, state, 10.0)


@pytest.mark.parametrize(
    "state_factory",
    [
        lambda g: WaveState.localized(g, 0, Picture.FULL),
        lambda g: WaveState(
            t=0.0, amps=2 * WaveState.localized(g, 0).amps,
            picture=Picture.AVERAGED,
        ),
    ],
    ids=["wrong picture", "not normalized"],
)
def test_start_state_is_checked(ratchet_geometry_small, state_factory):
    rates = EffectiveRates(forward=0.5, backward=0.5)
    with pytest.raises(DomainError):
        integrate_averaged(rates, ratchet_geometry_small,
                           state_factory(ratchet_geometry_small), 1.0)


def test_step_ceiling(ratchet_drive):
    assert IntegratorConfig().step_ceiling(ratchet_drive) == pytest.approx(
        2 * math.pi / 30 / 40
    ), "Убедитесь, что шаг полной модели не длиннее 1/40 периода накачки."
    with pytest.raises(DomainError):
        IntegratorConfig(dt_max=0.1).step_ceiling(ratchet_drive)


def test_observables(ratchet_geometry):
    amps = np.zeros(ratchet_geometry.size, dtype=complex)
    amps[ratchet_geometry.offset(0)] = math.sqrt(0.5)
    amps[ratchet_geometry.offset(1)] = 1j * math.sqrt(0.5)
    state = WaveState(t=0.0, amps=amps)
    assert center_of_mass(ratchet_geometry, state) == pytest.approx(1.0), (
        "Убедитесь, что ⟨x⟩ = Σ p_n·x_n."
    )
    assert participation_ratio(state) == pytest.approx(2.0), (
        "Убедитесь, что отношение участия 1/Σp_n² равно двум для пары узлов."
    )


def test_trajectories_join_at_switch(ratchet_geometry):
    rates = EffectiveRates(forward=0.5, backward=0.2)
    first = integrate_averaged(
        rates, ratchet_geometry,
        WaveState.localized(ratchet_geometry, 0, Picture.AVERAGED), 1.0,
    )
    second = integrate_averaged(rates, ratchet_geometry, first.final, 2.0)
    joined = first.extend(second)
    assert isinstance(joined, Trajectory)
    assert len(joined) == len(first) + len(second) - 1, (
        "Убедитесь, что общий момент переключения не дублируется."
    )
    assert np.all(np.diff(joined.times) > 0)


def test_full_model_runs_backward(ratchet_geometry_small):
    geom = ratchet_geometry_small
    drive = drive_for_gaps(phi=0.4)
    start = WaveState.localized(geom, 0)
    forward = integrate_full(geom, drive, start, 5.0)
    back = integrate_full(geom, drive, forward.final, 0.0)
    assert back.final.t == 0.0
    assert np.max(np.abs(back.final.amps - start.amps)) < 1e-7, (
        "Убедитесь, что интегрирование до t и обратно к 0 возвращает "
        "исходные амплитуды полной модели."
    )


def test_averaged_model_runs_backward(ratchet_geometry, rng):
    rates = EffectiveRates(forward=0.4 + 0.3j, backward=-0.2 + 0.1j)
    geom = ratchet_geometry
    amps = np.zeros(geom.size, dtype=complex)
    around = [geom.offset(n) for n in (-1, 0, 1)]
    amps[around] = rng.normal(size=3) + 1j * rng.normal(size=3)
    start = WaveState(
        t=0.0, amps=amps / np.linalg.norm(amps), picture=Picture.AVERAGED
    )
    forward = integrate_averaged(rates, geom, start, 6.0)
    back = integrate_averaged(rates, geom, forward.final, 0.0)
    assert np.max(np.abs(back.final.amps - start.amps)) < 1e-7, (
        "Убедитесь, что при комплексных скоростях интегрирование туда "
        "и обратно возвращает исходные амплитуды."
    )


def test_continuation_skips_norm_check(ratchet_geometry_small):
    rates = EffectiveRates(forward=0.5, backward=0.2)
    geom = ratchet_geometry_small
    amps = WaveState.localized(geom, 0).amps * math.sqrt(1 - 5e-8)
    state = WaveState(t=1.0, amps=amps, picture=Picture.AVERAGED)
    with pytest.raises(DomainError):
        integrate_averaged(rates, geom, state, 2.0)
    part = integrate_averaged(rates, geom, state, 2.0, check_norm=False)
    assert part.times[0] == 1.0, (
        "Убедитесь, что продолжение траектории не проверяет норму заново."
    )


def test_trajectory_observables(ratchet_geometry):
    amps = np.zeros((2, ratchet_geometry.size), dtype=complex)
    amps[0, ratchet_geometry.offset(0)] = 1.0
    amps[1, ratchet_geometry.offset(0)] = math.sqrt(0.5)
    amps[1, ratchet_geometry.offset(1)] = math.sqrt(0.5)
    trajectory = Trajectory(
        times=np.array([0.0, 1.0]), amplitudes=amps, picture=Picture.AVERAGED
    )
    assert trajectory.center_of_mass(ratchet_geometry) == pytest.approx(
        [0.0, 1.0]
    ), "Убедитесь, что ⟨x⟩ считается для каждого момента траектории."
    assert trajectory.participation_ratio() == pytest.approx([1.0, 2.0])
    assert trajectory.norms() == pytest.approx([1.0, 1.0])
