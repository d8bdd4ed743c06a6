#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab shell-search'

import sys
import argparse

from typing import Optional, List, IO

from ..main import shell_search
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin, add_experiment_args, experiment_params


@docstring(shell_search.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=shell_search.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument('--k', type=float, default=None, help='Half width of the shell N + 1/2 - k <= |p|^2 <= N + 1/2 + k (default: 2)')
    parser.add_argument('--rho', type=float, default=None, help='Minimum distance between lattice points of one shell (default: 3)')
    parser.add_argument('--N-max', type=int, default=None, help='Largest shell index searched (default: 2000)')
    parser.add_argument('--verify', type=int, default=None, help='Re-check this many hits pair by pair (default: 5)')
    add_experiment_args(parser, seed=False, dt=False, modes=False)
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    shell_search(
        params=experiment_params(command),
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
