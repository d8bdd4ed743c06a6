import pytest

from inertialab.config import load_config_val, get_real_name, CONFIG_FILENAME

from .fixtures import *


def test_env_values_are_parsed_by_type():
    assert load_config_val('SEED', default=1, type=int, env_vars={'SEED': '7'}) == 7
    assert load_config_val('SEED', default=1, type=int, env_vars={'INERTIALAB_SEED': '9', 'SEED': '7'}) == 9
    assert load_config_val('TIME_STEP', default=1e-3, type=float, env_vars={'TIME_STEP': '2e-4'}) == 2e-4
    assert load_config_val('FORCE', default=False, type=bool, env_vars={'FORCE': 'yes'}) is True
    assert load_config_val('L_CANDIDATES', default=None, type=list, env_vars={'L_CANDIDATES': '[1, 2.5]'}) == [1, 2.5]


def test_aliases_and_file_values():
    assert load_config_val('TIME_STEP', default=1e-3, type=float, aliases=('DT',), env_vars={'DT': '0.01'}) == 0.01
    assert load_config_val('SEED', default=1, type=int, config_file_vars={'SEED': '5'}) == 5
    assert get_real_name('dt') == 'TIME_STEP'
    assert get_real_name(' overwrite ') == 'FORCE'
    assert get_real_name('SEED') == 'SEED'


def test_defaults_may_depend_on_other_values():
    assert load_config_val('SHOW_PROGRESS', default=lambda c: c['IS_TTY'], type=bool, config={'IS_TTY': False}) is False
    assert load_config_val('MODES', default=32, type=int) == 32


def test_bad_values_are_rejected():
    with pytest.raises(ValueError):
        load_config_val('FORCE', default=False, type=bool, env_vars={'FORCE': 'maybe'})
    with pytest.raises(ValueError):
        load_config_val('GALERKIN_MODES', default=32, type=int, env_vars={'GALERKIN_MODES': '1.5'})
    with pytest.raises(ValueError):
        load_config_val('TIME_STEP', default=1e-3, type=float, env_vars={'TIME_STEP': 'fast'})
    with pytest.raises(ValueError):
        load_config_val('OUTPUT_DIR', default=None, type=str, env_vars={'OUTPUT_DIR': 'true'})


def test_config_file_is_written(process, cli_env, tmp_path):
    assert process.returncode == 0
    assert 'TIME_STEP = 0.002' in (tmp_path / CONFIG_FILENAME).read_text()

    got = run_cli('config', '--get', 'TIME_STEP', env=cli_env)
    assert got.returncode == 0
    assert got.stdout.decode().strip() == 'TIME_STEP=0.002'


def test_config_set_resolves_short_names(process, cli_env, tmp_path):
    result = run_cli('config', '--set', 'DT=0.005', env=cli_env)
    assert result.returncode == 0
    assert b'short name for TIME_STEP' in result.stderr
    assert 'TIME_STEP = 0.005' in (tmp_path / CONFIG_FILENAME).read_text()


def test_config_rejects_unknown_and_invalid_values(process, cli_env, tmp_path):
    result = run_cli('config', '--set', 'TIME_STPE=0.1', env=cli_env)
    assert result.returncode == 1
    assert b'Did you mean TIME_STEP?' in result.stderr

    result = run_cli('config', '--set', 'SEED=abc', env=cli_env)
    assert result.returncode != 0
    # the file is reverted when the new value does not parse
    assert 'SEED' not in (tmp_path / CONFIG_FILENAME).read_text()


def test_config_reset(process, cli_env, tmp_path):
    result = run_cli('config', '--reset', 'TIME_STEP', env=cli_env)
    assert result.returncode == 0
    assert result.stdout.decode().strip() == 'TIME_STEP=0.001'
    assert 'TIME_STEP' not in (tmp_path / CONFIG_FILENAME).read_text()

    assert run_cli('config', '--reset', 'NOT_A_KEY', env=cli_env).returncode == 2
