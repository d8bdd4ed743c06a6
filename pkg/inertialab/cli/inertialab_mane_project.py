#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab mane-project'

import sys
import argparse

from typing import Optional, List, IO

from ..main import mane_project
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(mane_project.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=mane_project.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument('--model', type=str, default=None, help='Model whose attractor is sampled (default: limit-cycle)')
    parser.add_argument('--N', type=int, default=None, help='Rank of the random projectors (default: 3)')
    parser.add_argument('--seeds', type=int, default=None, help='Number of random projectors (default: 100)')
    parser.add_argument('--n-traj', type=int, default=None, help='Trajectories sampled on the attractor')
    parser.add_argument('--burn-in', type=float, default=None, help='Time discarded before sampling each trajectory')
    parser.add_argument('--keep', type=int, default=None, help='Snapshots kept per trajectory')
    parser.add_argument(
        '--L-candidates',
        type=float,
        nargs='+',
        default=None,
        help='Cone slopes L for which the smallest separating spectral cut is reported',
    )
    add_experiment_args(parser)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    mane_project(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
