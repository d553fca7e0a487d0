import numpy as np

from driven.conditions import scan_rates
from driven.export import csv_text, scan_frame
from driven.management.base import TiltlabCommand


class Command(TiltlabCommand):
    help = 'Скорости F(Δ_a) и F(-Δ_b) на сетке фаз [phi_min, phi_max].'

    shortcuts = {'workers': ('scan', 'workers')}

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--workers', type=int, help='То же, что --scan.workers.'
        )

    def run(self, config, options):
        scan = config['scan']
        drive = config.drive()
        gaps = config.gaps()
        phis = np.linspace(scan['phi_min'], scan['phi_max'], scan['steps'])
        rates = scan_rates(
            drive.J0, drive.deltaJ, drive.m,
            gaps.delta_a, gaps.delta_b, phis, workers=scan['workers'],
        )
        self.emit(csv_text(scan_frame(phis, rates)), options['output'])
