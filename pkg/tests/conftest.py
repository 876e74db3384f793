import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from photonic_rnn import DeviceParams, LayerSpec, ModelSpec  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def params():
    return DeviceParams()


@pytest.fixture
def toy_rnn():
    return ModelSpec("toy_rnn", (LayerSpec("SIMPLE_RNN", 2, 3, 1),))


@pytest.fixture
def toy_models():
    return (
        ModelSpec("rnn", (LayerSpec("SIMPLE_RNN", 4, 8, 6),)),
        ModelSpec("gru", (LayerSpec("GRU", 6, 12, 5), LayerSpec("FC", 12, 2, 1, "SIGMOID"))),
        ModelSpec("lstm", (LayerSpec("LSTM", 8, 20, 4),)),
    )


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    RESULTS = getattr(module, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, text = RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
