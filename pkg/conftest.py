"""pytest wiring for the Django test suite under backend/.

The tests are written for ``manage.py test``; this configures the same
settings module and a throwaway test database so pytest can run them.
"""
import os
import sys

BACKEND = os.path.join(os.path.dirname(os.path.abspath(__file__)), "backend")
if BACKEND not in sys.path:
    sys.path.insert(0, BACKEND)
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "server.settings")

import django  # noqa: E402

django.setup()

import pytest  # noqa: E402
from django.test.runner import DiscoverRunner  # noqa: E402
from django.test.utils import (setup_test_environment,  # noqa: E402
                               teardown_test_environment)


@pytest.fixture(scope="session", autouse=True)
def _django_test_environment():
    setup_test_environment()
    runner = DiscoverRunner(verbosity=0, interactive=False)
    old_config = runner.setup_databases()
    try:
        yield
    finally:
        runner.teardown_databases(old_config)
        teardown_test_environment()
