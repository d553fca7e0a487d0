"""Выгрузка траекторий, сканов и решений в CSV и JSON."""
import json

import numpy as np
import pandas as pd

FLOAT_FORMAT = '%.17g'


def trajectory_frame(geom, trajectory):
    """Столбцы t, n=<n_min>..n=<n_max>, norm, x_mean, pr."""
    populations = trajectory.populations()
    columns = {'t': trajectory.times}
    for column, n in enumerate(geom.indices):
        columns[f'n={n}'] = populations[:, column]
    columns['norm'] = trajectory.norms()
    columns['x_mean'] = trajectory.center_of_mass(geom)
    columns['pr'] = trajectory.participation_ratio()
    return pd.DataFrame(columns)


def transport_frame(geom, result, drive_base):
    """Столбцы траектории плюс активная фаза и J(t) при ней."""
    times = result.trajectory.times
    coupling = drive_base.J0 + drive_base.deltaJ * np.cos(
        drive_base.m * drive_base.omega * times - result.phases
    )
    extra = pd.DataFrame({'phi': result.phases, 'coupling': coupling})
    return pd.concat(
        [trajectory_frame(geom, result.trajectory), extra], axis=1
    )


def scan_frame(phis, rates):
    forward = np.array([r.forward for r in rates], dtype=complex)
    backward = np.array([r.backward for r in rates], dtype=complex)
    return pd.DataFrame({
        'phi': np.asarray(phis, dtype=float),
        'rate_fwd_re': forward.real,
        'rate_fwd_im': forward.imag,
        'rate_bwd_re': backward.real,
        'rate_bwd_im': backward.imag,
        'neg_rate_bwd_re': -backward.real,
    })


def csv_text(frame):
    return frame.to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator='\n'
    )


def json_text(record):
    """json печатает float кратчайшим точным представлением."""
    return json.dumps(record, indent=2) + '\n'


def write_text(text, path):
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        stream.write(text)


def transport_record(sol1, sol2, result):
    return {
        'phi1': sol1.phi,
        'phi2': sol2.phi,
        'T1': sol1.half_period,
        'T2': sol2.half_period,
        'transfer_time1': sol1.transfer_time,
        'transfer_time2': sol2.transfer_time,
        'cycles': result.cycles,
        'displacement': result.displacement,
        'displacement_per_cycle': result.displacement_per_cycle,
        'segments': [
            {
                'index': s.index,
                'phi': s.phi,
                't_start': s.t_start,
                't_end': s.t_end,
                'dominant_site': s.dominant_site,
                'target_site': s.target_site,
                'fidelity': s.fidelity,
                'x_mean': s.x_mean,
            }
            for s in result.summaries
        ],
    }
