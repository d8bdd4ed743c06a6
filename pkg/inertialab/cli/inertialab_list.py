#!/usr/bin/env python3

__package__ = 'inertialab.cli'
__command__ = 'inertialab list'

import sys
import argparse

from typing import Optional, List, IO

from ..main import list_experiments
from ..util import docstring
from ..logging_util import SmartFormatter, reject_stdin


@docstring(list_experiments.__doc__)
def main(args: Optional[List[str]]=None, stdin: Optional[IO]=None, pwd: Optional[str]=None) -> None:
    parser = argparse.ArgumentParser(
        prog=__command__,
        description=list_experiments.__doc__,
        add_help=True,
        formatter_class=SmartFormatter,
    )
    parser.add_argument(
        'kind',
        nargs='?',
        type=str,
        default=None,
        help='Only show this experiment kind e.g. gap-find',
    )
    command = parser.parse_args(args or ())
    reject_stdin(__command__, stdin)

    list_experiments(kind=command.kind)


if __name__ == '__main__':
    main(args=sys.argv[1:], stdin=sys.stdin)
