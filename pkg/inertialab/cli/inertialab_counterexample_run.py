#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab counterexample-run'

import sys
import argparse

from typing import Optional, List, IO

from ..main import counterexample_run
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(counterexample_run.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=counterexample_run.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument(
        '--which',
        type=str,
        default=None,
        help=(
            'Construction to verify:\n'
            '    c1         two equilibria forcing even and odd manifold dimension\n'
            '    floquet    periodic equation whose period map is a weighted shift\n'
            '    segments   attractor holding orthogonal segments of every length\n'
        ),
    )
    parser.add_argument('--spectrum', type=str, default=None, help='linear (lambda_n = n) or a gap-find spectrum family')
    parser.add_argument('--T', type=float, default=None, help='Period of the Floquet equation')
    parser.add_argument('--amplitude', type=float, default=None, help='Scale of the Floquet rotation field')
    parser.add_argument('--L', type=float, default=None, help='Lipschitz constant of the construction')
    parser.add_argument('--amp', type=float, default=None, help='Distance of the c1 equilibria from the origin')
    parser.add_argument('--N-iter', type=int, default=None, help='Period map iterations for the decay table')
    parser.add_argument('--n-values', type=int, nargs='+', default=None, help='n values for the nonuniform decay table')
    parser.add_argument('--kicks', type=int, default=None, help='Number of segments for --which segments')
    parser.add_argument('--kappa', type=float, default=None, help='Eigenvalue growth lambda_n = n^kappa in the smoothness budget')
    parser.add_argument('--s', type=float, default=None, help='Sobolev index of the smoothness budget')
    parser.add_argument('--k', type=float, default=None, help='Derivative order of the smoothness budget')
    parser.add_argument('--workers', type=int, default=None, help='Worker threads for the period map cells')
    add_experiment_args(parser, seed=False)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    counterexample_run(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
