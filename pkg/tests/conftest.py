import pathlib

import pytest

from hessmg.data import load_catalog

RESOURCES = pathlib.Path(__file__).resolve().parents[1] / "src" / "hessmg" / "resources"


@pytest.fixture(scope="session")
def case_catalog():
    return load_catalog(RESOURCES / "catalog_case_study.ini")


@pytest.fixture(scope="session")
def extended_catalog():
    return load_catalog(RESOURCES / "catalog_extended.ini")
