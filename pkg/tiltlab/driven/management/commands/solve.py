from driven.conditions import (
    ConditionKind,
    cdt_solution,
    dl_solution,
    instability_solution,
    solve_cdt_delta_pair,
)
from driven.export import json_text
from driven.management.base import TiltlabCommand


class Command(TiltlabCommand):
    help = 'Решает условие CDT, DL или неустойчивости; JSON-запись решения.'

    shortcuts = {'kind': ('solve', 'kind')}

    def add_command_arguments(self, parser):
        parser.add_argument('--kind', help='То же, что --solve.kind.')

    def run(self, config, options):
        solve = config['solve']
        drive = config.drive()
        gaps = config.gaps()
        common = (drive.J0, drive.deltaJ, drive.m)
        bracket = (solve['bracket_lo'], solve['bracket_hi'])
        kind = solve['kind']
        if kind == 'cdt':
            record = cdt_solution(
                *common, gaps.delta_a, gaps.delta_b, solve['ratio_tol']
            ).to_record()
        elif kind == 'cdt_pair':
            delta_a, delta_b, _ = solve_cdt_delta_pair(
                *common, gaps.delta_a,
                (solve['delta_b_lo'], solve['delta_b_hi']),
            )
            record = cdt_solution(*common, delta_a, delta_b).to_record()
            record['delta_a'] = delta_a
            record['delta_b'] = delta_b
        elif kind == 'instability':
            record = instability_solution(
                *common, gaps.delta_a, gaps.delta_b, bracket
            ).to_record()
        else:
            record = dl_solution(
                *common, gaps.delta_a, gaps.delta_b,
                ConditionKind(kind), bracket,
            ).to_record()
        self.emit(json_text(record), options['output'])
