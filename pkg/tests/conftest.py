from pathlib import Path
from typing import Callable, Iterator

import pytest
from fastapi.testclient import TestClient

from tpgrass.config import ToolConfig
from tpgrass.linalg import ScalarMode
from tpgrass.models import Subspace
from tpgrass.web.app import create_app


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in ("TPGRASS_OUTPUT_DIR", "TPGRASS_TOLERANCE", "TPGRASS_JOBS"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture()
def output_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    path = tmp_path / "reports"
    monkeypatch.setenv("TPGRASS_OUTPUT_DIR", str(path))
    return path


@pytest.fixture()
def matrix_file(tmp_path: Path) -> Callable[[str], Path]:
    def write(text: str, name: str = "matrix.txt") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


@pytest.fixture()
def vandermonde_24() -> Subspace:
    """Nodes 1 and 2 in V = R^4; Plücker vector (1, 3, 7, 2, 6, 4)."""
    return Subspace([[1, 1, 1, 1], [1, 2, 4, 8]], ScalarMode.exact())


@pytest.fixture()
def api_client() -> Iterator[TestClient]:
    app = create_app(config=ToolConfig())
    with TestClient(app) as client:
        yield client
