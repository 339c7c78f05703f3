"""Pytest wiring for the Django test suite under src/certify/tests.

Mirrors what `python manage.py test` does: configure settings, set up the
test environment and create/destroy the test database around the session.
"""
import os

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "brc_home.settings")

import django

django.setup()

from django.test.utils import (
    setup_databases,
    setup_test_environment,
    teardown_databases,
    teardown_test_environment,
)

_db_config = None


def pytest_sessionstart(session):
    global _db_config
    setup_test_environment()
    _db_config = setup_databases(verbosity=0, interactive=False)


def pytest_sessionfinish(session, exitstatus):
    if _db_config is not None:
        teardown_databases(_db_config, verbosity=0)
    teardown_test_environment()
