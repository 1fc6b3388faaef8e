"""Pytest configuration file for rbs-ppr functional tests."""

import logging
import os
from subprocess import check_call, check_output

import pytest


def pytest_configure(config):
    """Pytest configuration."""
    config.addinivalue_line("markers", "smoke: mark test as a smoke test")


@pytest.fixture(scope="session", autouse=True)
def install_package():
    """Install the python package and uninstall it afterwards."""
    logging.warning("Installing python package")
    assert check_call("python3 -m pip install .".split()) == 0
    assert check_output("which rbs-ppr".split()).decode().strip()

    yield

    logging.info("Uninstalling python package rbsppr")
    check_call("python3 -m pip uninstall --yes rbsppr".split())


@pytest.fixture
def workdir(tmp_path):
    """Run each test from an empty directory so the local sources are not imported."""
    cwd = os.getcwd()
    os.chdir(tmp_path)
    yield tmp_path
    os.chdir(cwd)


@pytest.fixture
def er_graph(workdir):
    """A random edge list written by the installed tool."""
    path = workdir / "er.txt"
    check_call(
        "rbs-ppr gen-graph erdos_renyi --n 40 --p 0.1 --seed 3 -o {}".format(path).split()
    )
    return path
