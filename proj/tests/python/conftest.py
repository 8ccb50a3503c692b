import os
import pathlib

import pytest

CORPUS = pathlib.Path(os.environ.get("CONSICORE_CORPUS_DIR", pathlib.Path(__file__).parents[2] / "corpus"))


@pytest.fixture
def corpus():
    return CORPUS


@pytest.fixture
def students():
    import json
    return json.loads((CORPUS / "students.json").read_text())
