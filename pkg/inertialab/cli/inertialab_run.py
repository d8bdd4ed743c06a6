#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab run'

import sys
import argparse

from typing import Optional, List, IO

from ..main import run
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin


@docstring(run.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=run.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument(
        'config_file',
        type=str,
        help=(
            'INI file with one [section] per experiment, e.g.:\n'
            '    [floquet]\n'
            '    kind = counterexample-run\n'
            '    which = floquet\n'
            '    modes = 16\n'
        ),
    )
    parser.add_argument(
        '--out', '-o',
        type=str,
        default=None,
        help='Path of the JSON report (default: OUTPUT_DIR/<config name>-report.json)',
    )
    parser.add_argument(
        '--force',
        action='store_true',
        help='Overwrite existing output files',
    )
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    run(
        config_file=command.config_file,
        out=command.out,
        force=command.force,
    )


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
