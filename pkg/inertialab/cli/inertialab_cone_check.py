#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab cone-check'

import sys
import argparse

from typing import Optional, List, IO

from ..main import cone_check
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(cone_check.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=cone_check.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument('--model', type=str, default=None, help='Model: chafee-infante, limit-cycle, zero or rotation')
    parser.add_argument('--N', type=int, default=None, help='Cut index of the cone (default: first cut meeting the gap condition)')
    parser.add_argument('--L', type=float, default=None, help='Rotation strength for --model rotation (default: 2)')
    parser.add_argument('--pairs', type=int, default=None, help='Number of random trajectory pairs (default: 1000)')
    parser.add_argument('--T', type=float, default=None, help='Length of each trajectory')
    parser.add_argument('--radius', type=float, default=None, help='Radius of the ball of starting points')
    parser.add_argument(
        '--expect-violations',
        action='store_true',
        default=None,
        help='Pass when the cone inequality breaks (use with a gap below 2L)',
    )
    parser.add_argument('--gamma-target', type=float, default=None, help='Also check squeezing at this shifted decay rate')
    add_experiment_args(parser)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    cone_check(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
