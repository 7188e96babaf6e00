import pytest

from fuzzydb.casestudy import case_study_catalog, case_study_database


@pytest.fixture(scope="session")
def catalog():
    return case_study_catalog()


@pytest.fixture(scope="session")
def database():
    return case_study_database()


@pytest.fixture()
def rollos(database):
    return database.get("Rollos")
