import json
import os
from pathlib import Path

import jsonschema
import pytest

SCHEMAS = Path(os.environ.get("PARCELPICK_SCHEMAS", Path(__file__).resolve().parents[2] / "schemas"))


@pytest.fixture(scope="session")
def validate():
    cache = {}

    def check(doc, name):
        if name not in cache:
            cache[name] = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
        jsonschema.validate(doc, cache[name])

    return check
