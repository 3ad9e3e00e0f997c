import pathlib

import pytest

from softagg import SampleBatch, build_kb, load_label_catalog, parse, relation_from_csv, rewrite

DATA = pathlib.Path(__file__).parent / "data"

EMPLOYEE_QUERY = "SELECT AVG(Salary) FROM employee WHERE age IS Young AND Salary IS Low"


@pytest.fixture(scope="session")
def employee_csv() -> str:
    return (DATA / "employee.csv").read_text()


@pytest.fixture(scope="session")
def labels_yaml() -> str:
    return (DATA / "labels.yaml").read_text()


@pytest.fixture(scope="session")
def employee_relation(employee_csv):
    return relation_from_csv(employee_csv, name="employee")


@pytest.fixture(scope="session")
def employee_labels(labels_yaml):
    return load_label_catalog(labels_yaml)


@pytest.fixture(scope="session")
def employee_kb(employee_relation, employee_labels):
    return build_kb(employee_relation, employee_labels, 0.4)


@pytest.fixture(scope="session")
def employee_query():
    return parse(EMPLOYEE_QUERY)


@pytest.fixture(scope="session")
def employee_aq(employee_query, employee_kb):
    return rewrite(employee_query, 100.0, employee_kb.value_ranges)


@pytest.fixture(scope="session")
def sample_batch(employee_relation):
    """All six fixture rows as one batch, in the sample table's row order."""
    return SampleBatch(ids=tuple(employee_relation.ids), index=1)
