#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab gap-find'

import sys
import argparse

from typing import Optional, List, IO

from ..main import gap_find
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(gap_find.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=gap_find.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument(
        '--spectrum',
        type=str,
        default=None,
        help='Spectrum family: interval, torus2d, torus3d, sphere2, ks, sh or ch-torus2d (default: torus2d)',
    )
    parser.add_argument('--lmax', type=int, default=None, help='Largest eigenvalue kept for the torus families')
    parser.add_argument('--a', type=float, default=None, help='Family parameter (interval scale, KS shift, SH constant)')
    parser.add_argument('--alpha', type=float, default=None, help='Shift added to every eigenvalue')
    parser.add_argument('--L', type=float, default=None, help='Lipschitz constant of the nonlinearity')
    parser.add_argument(
        '--beta',
        type=float,
        default=None,
        help='Smoothing index of F in (-2, 0]: F maps H to H^beta (0 is the plain gap condition)',
    )
    parser.add_argument('--count', type=int, default=None, help='Stop after this many qualifying cuts')
    parser.add_argument('--k', type=int, default=None, help='Also report the cuts meeting the C^k gap condition')
    add_experiment_args(parser, seed=False, dt=False)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    gap_find(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
