import os
import sys
import subprocess

import pytest

import numpy as np

from inertialab.spectral_core import Spectrum

@pytest.fixture
def process(tmp_path):
    os.chdir(tmp_path)
    process = subprocess.run(
        [sys.executable, '-m', 'inertialab', 'config', '--set', 'TIME_STEP=0.002'],
        capture_output=True,
    )
    return process

@pytest.fixture
def cli_env():
    env = os.environ.copy()
    env.update({
        "USE_COLOR": "False",
        "SHOW_PROGRESS": "False",
        "FORCE": "False",
        "GALERKIN_MODES": "16",
    })
    return env

@pytest.fixture
def linear_spectrum():
    """lambda_n = n, n = 1..16"""
    return Spectrum(values=np.arange(1, 17, dtype=float), source='linear')

def run_cli(*args, env=None, stdin=None):
    return subprocess.run(
        [sys.executable, '-m', 'inertialab', *args],
        capture_output=True,
        env=env,
        input=stdin,
    )
