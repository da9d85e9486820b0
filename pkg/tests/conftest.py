import os
from pathlib import Path

import numpy as np
import pytest

from widthsearch.tabular import load_dataset

CHURN_DEFAULT = Path(__file__).resolve().parents[1] / "data" / "Churn_Modelling.csv"
LONG = os.environ.get("WIDTHSEARCH_LONG") == "1"


def churn_csv_path():
    """Location of the bank-churn CSV, or None when it is not available."""
    p = os.environ.get("WIDTHSEARCH_CHURN_CSV")
    path = Path(p) if p else CHURN_DEFAULT
    return path if path.is_file() else None


@pytest.fixture(scope="session")
def titanic():
    return load_dataset("titanic")


def churn_like_csv(path, n_rows=200, seed=0):
    """Write a CSV with the bank-churn header and random plausible values."""
    rng = np.random.default_rng(seed)
    header = ("RowNumber,CustomerId,Surname,CreditScore,Geography,Gender,Age,Tenure,"
              "Balance,NumOfProducts,HasCrCard,IsActiveMember,EstimatedSalary,Exited")
    lines = [header]
    for i in range(n_rows):
        lines.append(",".join(map(str, [
            i + 1, 15600000 + i, f"Name{i}", rng.integers(350, 851),
            rng.choice(["France", "Spain", "Germany"]), rng.choice(["Male", "Female"]),
            rng.integers(18, 93), rng.integers(0, 11), round(float(rng.uniform(0, 250000)), 2),
            rng.integers(1, 5), rng.integers(0, 2), rng.integers(0, 2),
            round(float(rng.uniform(10, 200000)), 2), rng.integers(0, 2)])))
    Path(path).write_text("\n".join(lines) + "\n")
    return path
