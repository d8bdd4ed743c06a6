__package__ = 'inertialab'

import sys
import time
import argparse
from itertools import count
from multiprocessing import Process

from datetime import datetime, timezone
from dataclasses import dataclass
from typing import Any, Optional, List, Dict, IO, TYPE_CHECKING

if TYPE_CHECKING:
    from .reports.schema import CheckResult, ExperimentReport, LabError

from .util import enforce_types
from .config import (
    ConfigDict,
    PYTHON_ENCODING,
    VERSION,
    ANSI,
    TERM_WIDTH,
    SHOW_PROGRESS,
    stderr,
    hint,
)

@dataclass
class RuntimeStats:
    """mutable stats counter for logging experiment timing info to CLI output"""

    experiments: int = 0
    passed: int = 0
    failed: int = 0

    run_start_ts: Optional[datetime] = None
    run_end_ts: Optional[datetime] = None

# globals are bad, mmkay
_LAST_RUN_STATS = RuntimeStats()


class SmartFormatter(argparse.HelpFormatter):
    """Patched formatter that prints newlines in argparse help strings"""
    def _split_lines(self, text, width):
        if '\n' in text:
            return text.splitlines()
        return argparse.HelpFormatter._split_lines(self, text, width)


def add_experiment_args(parser: argparse.ArgumentParser, seed: bool=True, dt: bool=True, modes: bool=True, tol: bool=False) -> None:
    """flags shared by every experiment subcommand (unset flags fall back to the config defaults)"""
    if seed:
        parser.add_argument(
            '--seed',
            type=int,
            default=None,
            help='Seed for every random draw in the experiment (default: SEED from the config)',
        )
    if dt:
        parser.add_argument('--dt', type=float, default=None, help='Integrator time step')
    if modes:
        parser.add_argument('--modes', type=int, default=None, help='Number of Galerkin modes M')
    if tol:
        parser.add_argument('--tol', type=float, default=None, help='Tolerance of the manifold point solver')
    parser.add_argument(
        '--out', '-o',
        type=str,
        default=None,
        help='Write the JSON report here, with CSV tables next to it',
    )
    parser.add_argument(
        '--force',
        action='store_true',
        help='Overwrite existing output files',
    )


def experiment_params(command: argparse.Namespace) -> Dict[str, Any]:
    """the options actually passed on the command line, minus the output flags"""
    return {
        key: val
        for key, val in vars(command).items()
        if val is not None and key not in ('out', 'force')
    }


def reject_stdin(caller: str, stdin: Optional[IO]=sys.stdin) -> None:
    """Tell the user they passed stdin to a command that doesn't accept it"""

    if not stdin:
        return None

    if not stdin.isatty():
        stdin_raw_text = stdin.read()
        if stdin_raw_text.strip():
            stderr(f'[!] The "{caller}" command does not accept stdin (ignoring).', color='red')
            stderr(f'    Run inertialab "{caller} --help" to see usage and examples.')
            stderr()
    return None


def accept_stdin(stdin: Optional[IO]=sys.stdin) -> Optional[str]:
    """accept any standard input and return it as a string or None"""

    if not stdin:
        return None

    if not stdin.isatty():
        stdin_str = stdin.read()

        if stdin_str:
            return stdin_str

    return None


class ExperimentTimer:
    """Wall time of one experiment, with a live seconds counter while SHOW_PROGRESS is on"""

    def __init__(self, label: str, prefix: str='      '):
        self.start_ts = datetime.now(timezone.utc)
        self.end_ts: Optional[datetime] = None
        self.ticker: Optional[Process] = None
        if SHOW_PROGRESS:
            self.ticker = Process(target=elapsed_ticker, args=(label, prefix), daemon=True)
            self.ticker.start()

    @property
    def seconds(self) -> float:
        return ((self.end_ts or datetime.now(timezone.utc)) - self.start_ts).total_seconds()

    def end(self) -> float:
        """stop the counter and clear its line; calling it again is a no-op"""
        if self.end_ts is None:
            self.end_ts = datetime.now(timezone.utc)
            if self.ticker is not None:
                self.ticker.terminate()
                self.ticker.join()
                try:
                    sys.stdout.write('\r{}{}\r'.format(' ' * TERM_WIDTH(), ANSI['reset']))
                except (IOError, BrokenPipeError):
                    # the parent has stopped listening to our stdout
                    pass
        return self.seconds

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.end()


@enforce_types
def elapsed_ticker(label: str, prefix: str='') -> None:
    """rewrite one line with a spinner and the seconds spent so far, until terminated"""
    frames = '⠋⠙⠹⠸⠼⠴⠦⠧⠇⠏' if PYTHON_ENCODING == 'UTF-8' else '|/-\\'
    start = time.monotonic()
    try:
        for tick in count():
            # ⠹ manifold-build  12s
            sys.stdout.write('\r{0}{1}{2}{3} {4}  {5:.0f}s'.format(
                prefix,
                ANSI['green'],
                frames[tick % len(frames)],
                ANSI['reset'],
                label,
                time.monotonic() - start,
            ))
            sys.stdout.flush()
            time.sleep(0.2)
    except (KeyboardInterrupt, BrokenPipeError):
        print()


def log_cli_command(subcommand: str, subcommand_args: List[str], stdin: Optional[str], pwd: str):
    cmd = ' '.join(('inertialab', subcommand, *subcommand_args))
    stderr('{black}[i] [{now}] Inertialab v{VERSION}: {cmd}{reset}'.format(
        now=datetime.now(timezone.utc).strftime('%Y-%m-%d %H:%M:%S'),
        VERSION=VERSION,
        cmd=cmd,
        **ANSI,
    ))
    stderr('{black}    > {pwd}{reset}'.format(pwd=pwd, **ANSI))
    stderr()

### Experiment Stage


def log_run_started(num_experiments: int):
    _LAST_RUN_STATS.run_start_ts = datetime.now(timezone.utc)
    print('{green}[▶] [{}] Running {} experiment(s)...{reset}'.format(
        _LAST_RUN_STATS.run_start_ts.strftime('%Y-%m-%d %H:%M:%S'),
        num_experiments,
        **ANSI,
    ))


def log_experiment_started(kind: str, params: Dict[str, Any]):
    print()
    print('[{green}+{reset}] [{now}] {white}{kind}{reset}'.format(
        now=datetime.now(timezone.utc).strftime('%Y-%m-%d %H:%M:%S'),
        kind=kind,
        **ANSI,
    ))
    if params:
        print('    {black}{}{reset}'.format(
            ' '.join(f'{key}={val}' for key, val in params.items()),
            **ANSI,
        ))


def log_check_result(check: "CheckResult"):
    symbol, color = ('√', 'green') if check.passed else ('X', 'red')
    if check.op is not None:
        summary = f'{check.measured:.6g} {check.op} {check.bound:.6g}'
        if check.slack is not None:
            summary += f'  (slack {check.slack:.3g})'
    elif check.measured is not None:
        summary = str(check.measured)
    else:
        summary = ''

    print('    {}{}{} {} {}'.format(ANSI[color], symbol, ANSI['reset'], check.name.ljust(36), summary))
    if check.detail and not check.passed:
        print('      {black}{}{reset}'.format(check.detail, **ANSI))


def log_experiment_finished(report: "ExperimentReport"):
    _LAST_RUN_STATS.experiments += 1
    if report.passed:
        _LAST_RUN_STATS.passed += 1
    else:
        _LAST_RUN_STATS.failed += 1

    for check in report.checks:
        log_check_result(check)

    runtime = report.runtime
    print('    {black}{} checks, {} failed{}{reset}'.format(
        len(report.checks),
        report.num_failed,
        f' in {runtime:.2f}s' if runtime is not None else '',
        **ANSI,
    ))


def log_run_finished(out_path: Optional[str]=None):
    end_ts = datetime.now(timezone.utc)
    _LAST_RUN_STATS.run_end_ts = end_ts
    start_ts = _LAST_RUN_STATS.run_start_ts or end_ts
    seconds = end_ts.timestamp() - start_ts.timestamp()
    if seconds > 60:
        duration = '{0:.2f} min'.format(seconds / 60)
    else:
        duration = '{0:.2f} sec'.format(seconds)

    color = 'green' if not _LAST_RUN_STATS.failed else 'red'
    print()
    print('{}[√] [{}] Finished {} experiment(s) ({}){}'.format(
        ANSI[color],
        end_ts.strftime('%Y-%m-%d %H:%M:%S'),
        _LAST_RUN_STATS.experiments,
        duration,
        ANSI['reset'],
    ))
    print('    - {} passed all checks'.format(_LAST_RUN_STATS.passed))
    print('    - {} had failing checks'.format(_LAST_RUN_STATS.failed))
    if out_path:
        print('    > {}'.format(out_path))


def log_output_written(path: str, what: str='output'):
    print('    {black}> wrote {} to {}{reset}'.format(what, path, **ANSI))


def log_lab_error(err: "LabError", kind: Optional[str]=None):
    exit_code = getattr(err, 'exit_code', 1)
    label = 'Numerical failure' if exit_code == 3 else 'Invalid input'
    stderr()
    stderr('[X] {}{}: {}'.format(label, f' in {kind}' if kind else '', err), color='red')
    hints = getattr(err, 'hints', None)
    if hints:
        hint(hints)
    stderr()


def log_numerical_failure(err: "LabError", kind: Optional[str]=None):
    log_lab_error(err, kind=kind)
    hint(('Try a smaller --dt, a tighter --tol, or more --modes.',
          'Run with the same --seed to reproduce the failure exactly.'))


@enforce_types
def printable_config(config: ConfigDict, prefix: str='') -> str:
    return f'\n{prefix}'.join(
        f'{key}={val}'
        for key, val in config.items()
        if not (isinstance(val, dict) or callable(val))
    )
