import os

import pytest

# config is resolved at import time, so this has to happen before inertialab is imported
CLEAN_ENV = {
    'USE_COLOR': 'False',
    'SHOW_PROGRESS': 'False',
    'FORCE': 'False',
}

@pytest.hookimpl
def pytest_sessionstart(session):
    for key in CLEAN_ENV:
        os.environ.pop(f'INERTIALAB_{key}', None)
    os.environ.update(CLEAN_ENV)

@pytest.hookimpl
def pytest_sessionfinish(session):
    for key in CLEAN_ENV:
        os.environ.pop(key, None)
