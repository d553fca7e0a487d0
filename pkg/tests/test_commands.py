import io
import json
import math

import numpy as np
import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from driven.conditions import solve_cdt_phase
from driven.config import load_config, parse_config
from fixtures.drives import DELTA_J, J0, M, PAIR_DELTA_A, PAIR_DELTA_B

RATE_COLUMNS = ["rate_fwd_re", "rate_fwd_im", "rate_bwd_re", "rate_bwd_im",
                "neg_rate_bwd_re"]


def run(command, **options):
    out = io.StringIO()
    call_command(command, stdout=out, **options)
    return out.getvalue()


def population_columns(frame):
    return [column for column in frame.columns if column.startswith("n=")]


def transport_phases(config_path):
    sol1 = json.loads(run("solve", config=str(config_path),
                          kind="dl_backward"))
    sol2 = json.loads(run("solve", config=str(config_path),
                          kind="dl_forward"))
    return sol1, sol2


def test_solve_instability(ratchet_config):
    record = json.loads(run("solve", config=str(ratchet_config),
                            **{"solve.bracket_lo": "1.93",
                               "solve.bracket_hi": "2.49"}))
    assert record["kind"] == "instability"
    assert record["phi"] == pytest.approx(2.17, abs=0.01), (
        "Убедитесь, что `solve` находит точку неустойчивости φ_c ≈ 2.17."
    )


def test_solve_cdt(pair_config):
    record = json.loads(run("solve", config=str(pair_config)))
    assert record["kind"] == "cdt"
    assert record["phi"] == pytest.approx(2.4, abs=0.05)


def test_solve_delta_pair(pair_config):
    record = json.loads(run("solve", config=str(pair_config),
                            kind="cdt_pair"))
    assert record["delta_b"] == pytest.approx(PAIR_DELTA_B, abs=1e-3), (
        "Убедитесь, что `solve --kind cdt_pair` подбирает Δ_b к Δ_a."
    )


def test_solve_dl_reports_rabi_data(ratchet_config):
    sol1, sol2 = transport_phases(ratchet_config)
    assert sol1["phi"] == pytest.approx(1.93, abs=0.01)
    assert sol2["phi"] == pytest.approx(2.49, abs=0.01)
    assert sol1["half_period"] * sol1["rabi_freq"] == pytest.approx(
        math.pi, abs=1e-12
    )


@pytest.mark.parametrize(
    ("command", "options", "returncode"),
    [
        ("solve", {"kind": "cdt"}, 4),
        ("solve", {"kind": "dl_forward", "drive.deltaJ": "0.1"}, 4),
        ("solve", {"kind": "teleport"}, 2),
        ("transport", {"cycles": 0}, 2),
        ("simulate", {"geometry.half_width": "3"}, 3),
        ("simulate", {"integrator.start_site": "99"}, 2),
        ("scan_phase", {"scan.steps": "1"}, 2),
    ],
    ids=["ratios differ", "cosine out of range", "unknown kind",
         "zero cycles", "edge leak", "start site outside window",
         "too few steps"],
)
def test_exit_codes(ratchet_config, command, options, returncode):
    with pytest.raises(CommandError) as error:
        run(command, config=str(ratchet_config), **options)
    assert error.value.returncode == returncode, (
        f"Убедитесь, что команда `{command}` завершается с кодом {returncode}."
    )


def test_unknown_config_key(write_config):
    path = write_config("[drive]\nJ0 = 1\nomega = 30\nomgea = 3\n")
    with pytest.raises(CommandError) as error:
        run("simulate", config=str(path))
    assert error.value.returncode == 2
    assert "omgea" in str(error.value), (
        "Убедитесь, что сообщение называет неизвестный ключ."
    )


def test_scan_phase_common_zero(pair_config, tmp_path):
    output = tmp_path / "scan.csv"
    run("scan_phase", config=str(pair_config), output=str(output))
    frame = pd.read_csv(output)
    assert list(frame.columns) == ["phi"] + RATE_COLUMNS
    assert len(frame) == 1000
    phi0 = solve_cdt_phase(J0, DELTA_J, M, PAIR_DELTA_A, PAIR_DELTA_B)
    row = frame.iloc[(frame["phi"] - phi0).abs().idxmin()]
    assert abs(row["rate_fwd_re"]) < 2e-3 and abs(row["rate_bwd_re"]) < 2e-3, (
        "Убедитесь, что обе кривые скоростей обращаются в ноль при φ_0."
    )


def test_scan_phase_crossing(ratchet_config):
    frame = pd.read_csv(io.StringIO(
        run("scan_phase", config=str(ratchet_config), workers=2)
    ))
    difference = (frame["rate_fwd_re"] - frame["neg_rate_bwd_re"]).to_numpy()
    crossings = np.nonzero(np.diff(np.sign(difference)))[0]
    assert len(crossings) == 1
    assert frame["phi"][crossings[0]] == pytest.approx(2.17, abs=0.015), (
        "Убедитесь, что кривые F(Δ_a) и -F(-Δ_b) пересекаются при φ ≈ 2.17."
    )
    assert np.all(frame["rate_fwd_im"] == 0.0)


def test_scan_phase_without_modulation(ratchet_config):
    frame = pd.read_csv(io.StringIO(
        run("scan_phase", config=str(ratchet_config),
            **{"drive.deltaJ": "0", "scan.steps": "50"})
    ))
    for column in RATE_COLUMNS:
        assert frame[column].nunique() == 1, (
            "Убедитесь, что при δJ = 0 скорости не зависят от фазы."
        )


def test_simulate_cdt_is_frozen(cdt_config):
    frame = pd.read_csv(io.StringIO(
        run("simulate", config=str(cdt_config), model="analytic")
    ))
    populations = frame[population_columns(frame)].to_numpy()
    assert len(frame) == 201
    assert np.max(np.abs(populations - populations[0])) < 1e-10, (
        "Убедитесь, что в режиме CDT все заселённости постоянны."
    )


def test_simulate_dl_oscillates(ratchet_config):
    sol1, _ = transport_phases(ratchet_config)
    frame = pd.read_csv(io.StringIO(
        run("simulate", config=str(ratchet_config), model="averaged",
            **{"drive.phi": repr(sol1["phi"])})
    ))
    expected = np.cos(sol1["rabi_freq"] * frame["t"]) ** 2
    assert np.allclose(frame["n=0"], expected, atol=1e-8), (
        "Убедитесь, что при φ_1 заселённость узла 0 равна cos²(ω_1·t)."
    )
    assert np.allclose(frame["n=1"], 1 - expected, atol=1e-8)
    assert np.allclose(frame["norm"], 1.0, atol=1e-8)
    assert frame["pr"].max() <= 2.0 + 1e-8


@pytest.mark.slow
def test_simulate_full_close_to_averaged(ratchet_config, tmp_path):
    sol1, _ = transport_phases(ratchet_config)
    frames = {}
    for model in ("full", "averaged"):
        output = tmp_path / f"{model}.csv"
        run("simulate", config=str(ratchet_config), model=model,
            output=str(output), **{"drive.phi": repr(sol1["phi"])})
        frames[model] = pd.read_csv(output)
    columns = population_columns(frames["full"])
    deviation = np.max(np.abs(
        frames["full"][columns].to_numpy()
        - frames["averaged"][columns].to_numpy()
    ))
    assert deviation < 0.05, (
        "Убедитесь, что при ω=30 полная и усреднённая модели отличаются "
        "не более чем на 0.05."
    )


def test_output_is_deterministic(ratchet_config, tmp_path):
    outputs = []
    for index in range(2):
        path = tmp_path / f"run{index}.csv"
        run("simulate", config=str(ratchet_config), output=str(path))
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1], (
        "Убедитесь, что одинаковая конфигурация даёт побайтно одинаковый "
        "вывод."
    )
    header = outputs[0].decode().splitlines()[0].split(",")
    assert header[0] == "t" and header[1] == "n=-20"
    assert header[-3:] == ["norm", "x_mean", "pr"]


def test_output_file_keeps_stdout_clean(ratchet_config, tmp_path):
    stdout = run("simulate", config=str(ratchet_config),
                 output=str(tmp_path / "run.csv"))
    assert stdout == "", (
        "Убедитесь, что при заданном --output данные не печатаются в stdout."
    )


def test_print_config_round_trip(ratchet_config):
    overrides = {"drive.phi": "0.5", "kind": "dl_forward"}
    echo = run("solve", config=str(ratchet_config), print_config=True,
               **overrides)
    expected = load_config(
        ratchet_config,
        {("drive", "phi"): "0.5", ("solve", "kind"): "dl_forward"},
    )
    assert parse_config(echo).sections == expected.sections, (
        "Убедитесь, что `--print-config` печатает конфигурацию, которая "
        "читается обратно без изменений."
    )


def test_transport_summary(ratchet_config, tmp_path):
    output = tmp_path / "ratchet.csv"
    run("transport", config=str(ratchet_config), output=str(output),
        cycles="3", **{"geometry.half_width": "60"})
    summary = json.loads((tmp_path / "ratchet.json").read_text())
    assert summary["displacement_per_cycle"] == pytest.approx(4.2, abs=1e-4)
    assert summary["displacement"] == pytest.approx(12.6, abs=1e-4), (
        "Убедитесь, что `transport` сообщает смещение 3·(a + b)."
    )
    assert summary["T1"] == pytest.approx(25.2, rel=0.01)
    assert len(summary["segments"]) == 6
    frame = pd.read_csv(output)
    assert list(frame.columns[-2:]) == ["phi", "coupling"]
    assert set(frame["phi"].round(12)) == {
        round(summary["phi1"], 12), round(summary["phi2"], 12)
    }


def test_transport_to_stdout(ratchet_config):
    summary = json.loads(run("transport", config=str(ratchet_config),
                             cycles="1"))
    assert summary["displacement"] == pytest.approx(4.2, abs=1e-4)


def test_transport_frequency_batch(ratchet_config):
    records = json.loads(run(
        "transport", config=str(ratchet_config), cycles="1",
        omega_grid="30,60", workers=2,
    ))
    assert [record["omega"] for record in records] == [30.0, 60.0], (
        "Убедитесь, что пакетный прогон сохраняет порядок частот."
    )
    for record in records:
        assert record["displacement"] == pytest.approx(4.2, abs=1e-4)


def test_transport_bad_frequency_grid(ratchet_config):
    with pytest.raises(CommandError) as error:
        run("transport", config=str(ratchet_config), omega_grid="30,-1")
    assert error.value.returncode == 2
