from driven.dynamics import (
    Picture,
    Trajectory,
    WaveState,
    integrate_averaged,
    integrate_full,
    sample_times,
)
from driven.effective import analytic_trajectory, rates_for_site
from driven.export import csv_text, trajectory_frame
from driven.management.base import TiltlabCommand

MODELS = ('full', 'averaged', 'analytic')


class Command(TiltlabCommand):
    help = 'Эволюция частицы из одного узла; CSV заселённостей по времени.'

    def add_command_arguments(self, parser):
        parser.add_argument('--model', choices=MODELS, default='averaged')

    def run(self, config, options):
        geom = config.geometry()
        drive = config.drive()
        cfg = config.integrator()
        t_end = config['integrator']['t_end']
        start = config['integrator']['start_site']
        model = options['model']
        if model == 'full':
            state = WaveState.localized(geom, start, Picture.FULL)
            trajectory = integrate_full(geom, drive, state, t_end, cfg)
        else:
            rates = rates_for_site(drive, config.gaps())
            if model == 'averaged':
                state = WaveState.localized(geom, start, Picture.AVERAGED)
                trajectory = integrate_averaged(
                    rates, geom, state, t_end, cfg
                )
            else:
                times = sample_times(0.0, t_end, cfg.samples)
                trajectory = Trajectory(
                    times=times,
                    amplitudes=analytic_trajectory(
                        rates, start, times, geom,
                        leak_tol=cfg.edge_leak_tol,
                    ),
                    picture=Picture.AVERAGED,
                )
        self.emit(csv_text(trajectory_frame(geom, trajectory)),
                  options['output'])
