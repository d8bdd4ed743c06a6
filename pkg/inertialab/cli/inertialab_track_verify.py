#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab track-verify'

import sys
import argparse

from typing import Optional, List, IO

from ..main import track_verify
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(track_verify.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=track_verify.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument('--model', type=str, default=None, help='Model: chafee-infante, limit-cycle or zero')
    parser.add_argument('--N', type=int, default=None, help='Manifold dimension (default: first cut meeting the gap condition)')
    parser.add_argument('--method', type=str, default=None, help='Point builder: lp (Lyapunov-Perron) or bvp (boundary value)')
    parser.add_argument('--radius', type=float, default=None, help='Half width of the grid box in the low modes')
    parser.add_argument('--points', type=int, default=None, help='Grid points per low mode')
    parser.add_argument('--interpolation', type=str, default=None, help='Grid interpolation: linear or cubic')
    parser.add_argument('--workers', type=int, default=None, help='Worker threads for the grid points')
    parser.add_argument('--starts', type=int, default=None, help='Number of random starting points (default: 20)')
    parser.add_argument('--T-fit', type=float, default=None, help='Time at which each trajectory is matched to the manifold')
    parser.add_argument('--start-radius', type=float, default=None, help='Radius of the low-mode ball of base points on the manifold (default: radius / 20)')
    parser.add_argument('--offset', type=float, default=None, help='Largest displacement off the manifold along e_(N+1) (default: 0.02)')
    add_experiment_args(parser, tol=True)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    track_verify(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
