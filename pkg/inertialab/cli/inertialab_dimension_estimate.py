#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab dimension-estimate'

import sys
import argparse

from typing import Optional, List, IO

from ..main import dimension_estimate
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(dimension_estimate.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=dimension_estimate.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument(
        '--cloud',
        type=str,
        default=None,
        help=(
            'Point set to measure:\n'
            '    segment, square          box-counting dimension of a known set\n'
            '    attractor                sampled attractor of --model\n'
            '    orthogonal-segments      doubling factors of eps_n-segments along e_n\n'
            '    cube-vertices            eps_n-separated vertices of eps_n-cubes\n'
        ),
    )
    parser.add_argument('--points', type=int, default=None, help='Points in the sampled set (default: 10000)')
    parser.add_argument('--method', type=str, default=None, help='Box counting method: grid or net')
    parser.add_argument('--model', type=str, default=None, help='Model for --cloud attractor')
    parser.add_argument('--n-traj', type=int, default=None, help='Trajectories sampled for --cloud attractor')
    parser.add_argument('--burn-in', type=float, default=None, help='Time discarded before sampling each trajectory')
    parser.add_argument('--n-max', type=int, default=None, help='Number of segments for --cloud orthogonal-segments')
    parser.add_argument('--rule', type=str, default=None, help='Segment lengths: power2, loglog or gauss')
    parser.add_argument('--cube-max', type=int, default=None, help='Largest cube dimension for --cloud cube-vertices (at most 12)')
    parser.add_argument('--beta', type=float, default=None, help='Rate of the gauss rule eps_n = exp(-beta n^2)')
    add_experiment_args(parser)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    dimension_estimate(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
