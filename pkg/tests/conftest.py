import time


def pytest_configure(config):
    config._suite_started_at = time.perf_counter()
