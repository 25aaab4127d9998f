"""common: params.yaml 로딩, 예외 → 종료 코드, 로거"""

import logging

import pytest

from src.common import constants as C
from src.common.config import Numerics, build_numerics, load_config
from src.common.errors import (
    CapacityError,
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    StepError,
    UnsupportedBasisError,
    exit_code_for,
)
from src.common.logging import get_logger, setup_logger


def test_numerics_defaults_follow_constants():
    n = build_numerics(None)
    assert n == Numerics()
    assert n.dense_threshold == C.DENSE_THRESHOLD
    assert n.chebyshev_tol == C.CHEBYSHEV_TOL


def test_numerics_block_overrides_key_by_key():
    n = build_numerics({"dense_threshold": "2048", "threads": 3})
    assert n.dense_threshold == 2048
    assert n.threads == 3
    assert n.fd_rel_step == C.FD_REL_STEP


@pytest.mark.parametrize("block, path", [
    ({"dense_treshold": 10}, "numerics.dense_treshold"),
    ({"fd_rel_step": "abc"}, "numerics.fd_rel_step"),
    ({"chebyshev_tol": 1e-3}, "numerics.chebyshev_tol"),
    ({"threads": 0}, "numerics.threads"),
])
def test_numerics_block_rejects_bad_values(block, path):
    with pytest.raises(ConfigError) as e:
        build_numerics(block)
    assert e.value.path == path


def test_load_config_reads_yaml(tmp_path, monkeypatch):
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    p = tmp_path / "params.yaml"
    p.write_text("numerics:\n  max_n_full: 12\nlogging:\n  level: debug\n", encoding="utf-8")
    app = load_config(p)
    assert app.numerics.max_n_full == 12
    assert app.log_level == "DEBUG"


def test_load_config_without_file(tmp_path, monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "warning")
    app = load_config(tmp_path / "missing.yaml")
    assert app.params == {}
    assert app.numerics == Numerics()
    assert app.log_level == "WARNING"


def test_exit_codes():
    assert exit_code_for(None) == 0
    assert exit_code_for(ConfigError.kind) == 2
    assert exit_code_for(UnsupportedBasisError.kind) == 2
    assert exit_code_for(ConsistencyError.kind) == 2
    assert exit_code_for(CapacityError.kind) == 3
    assert exit_code_for(StepError.kind) == 4


def test_step_error_carries_suggestion():
    e = StepError("no agreement", suggested_step=0.125)
    assert e.suggested_step == 0.125
    assert "0.125" in str(e)
    assert isinstance(e, ConvergenceError)


def test_config_error_message_names_path():
    assert str(ConfigError("bad", path="model.Jx")) == "model.Jx: bad"


def test_setup_logger_is_idempotent():
    a = setup_logger("central_spin_test", "DEBUG")
    n = len(a.handlers)
    b = setup_logger("central_spin_test", logging.INFO)
    assert a is b
    assert len(b.handlers) == n
    assert b.level == logging.INFO


def test_child_logger_shares_parent_handlers():
    child = get_logger("metrology")
    assert child.name == "central_spin.metrology"
    assert child.propagate
    assert child.parent.handlers
