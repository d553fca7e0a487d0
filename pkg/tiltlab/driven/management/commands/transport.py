from pathlib import Path

from driven.conditions import solve_transport_phases
from driven.exceptions import ConfigError
from driven.export import (
    csv_text,
    json_text,
    transport_frame,
    transport_record,
)
from driven.management.base import TiltlabCommand
from driven.transport import (
    MODELS,
    build_ratchet_schedule,
    run_batch,
    run_protocol,
)


def parse_grid(text):
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError as error:
        raise ConfigError(f'bad frequency list {text!r}: {error}') from error
    if not values or min(values) <= 0:
        raise ConfigError(f'frequencies must be positive: {text!r}')
    return values


class Command(TiltlabCommand):
    help = (
        'Протокол переключения фазы φ_1/φ_2: CSV траектории и JSON-сводка '
        'со смещением за цикл.'
    )

    shortcuts = {
        'cycles': ('transport', 'cycles'),
        'workers': ('transport', 'workers'),
    }

    def add_command_arguments(self, parser):
        parser.add_argument('--model', choices=MODELS, default='averaged')
        parser.add_argument('--cycles', help='То же, что --transport.cycles.')
        parser.add_argument(
            '--workers', type=int, help='То же, что --transport.workers.'
        )
        parser.add_argument(
            '--summary',
            help='Файл JSON-сводки; по умолчанию --output с суффиксом .json.',
        )
        parser.add_argument(
            '--omega-grid',
            help=(
                'Частоты через запятую: пакет прогонов при тех же Δ, '
                'в вывод идёт список сводок.'
            ),
        )

    def run(self, config, options):
        geom = config.geometry()
        drive = config.drive()
        gaps = config.gaps()
        transport = config['transport']
        solve = config['solve']
        bracket = (solve['bracket_lo'], solve['bracket_hi'])
        sol1, sol2 = solve_transport_phases(
            drive.J0, drive.deltaJ, drive.m, gaps.delta_a, gaps.delta_b,
            bracket, bracket,
        )
        schedule = build_ratchet_schedule(
            sol1, sol2, transport['cycles'], transport['dwell']
        )
        job = {
            'geom': geom,
            'schedule': schedule,
            'model': options['model'],
            'start_site': transport['start_site'],
            'cfg': config.integrator(),
            'parity': transport['parity'],
        }
        if options['omega_grid']:
            omegas = parse_grid(options['omega_grid'])
            results = run_batch(
                [
                    dict(job, drive_base=drive.at_frequency(omega))
                    for omega in omegas
                ],
                transport['workers'],
            )
            records = [
                dict(transport_record(sol1, sol2, result), omega=omega)
                for omega, result in zip(omegas, results)
            ]
            self.emit(json_text(records), options['output'])
            return
        result = run_protocol(drive_base=drive, **job)
        record = transport_record(sol1, sol2, result)
        output = options['output']
        if output is None:
            self.emit(json_text(record), None)
            return
        self.emit(csv_text(transport_frame(geom, result, drive)), output)
        summary = options['summary'] or str(Path(output).with_suffix('.json'))
        self.emit(json_text(record), summary)
