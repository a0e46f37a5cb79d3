from __future__ import annotations

from pathlib import Path

import pytest

from entropik.config import CONFIG_FILE, Config, get_config
from entropik.errors import ConfigError


def test_defaults(tmp_path: Path) -> None:
    config = get_config(cwd=tmp_path, environ={})
    assert config == Config()
    assert config.max_order == 4
    assert config.depth == 3
    assert config.output == "text"


def test_environment_and_overrides(tmp_path: Path) -> None:
    environ = {"ENTROPIK_TRIALS": "25", "ENTROPIK_SEED": "7", "ENTROPIK_LOG_LEVEL": "debug"}
    config = get_config(cwd=tmp_path, environ=environ)
    assert config.trials == 25
    assert config.seed == 7
    assert config.log_level == "DEBUG"
    config = get_config({"trials": 3, "seed": None}, cwd=tmp_path, environ=environ)
    assert config.trials == 3
    assert config.seed == 7


def test_config_file(tmp_path: Path) -> None:
    (tmp_path / CONFIG_FILE).write_text(
        "from entropik.config import Config\nconfig = Config(depth=5, workers=2)\n", encoding="utf-8"
    )
    config = get_config(cwd=tmp_path, environ={"ENTROPIK_WORKERS": "3"})
    assert config.depth == 5
    assert config.workers == 3
    (tmp_path / CONFIG_FILE).write_text("config = {'output': 'json'}\n", encoding="utf-8")
    assert get_config(cwd=tmp_path, environ={}).output == "json"


@pytest.mark.parametrize(
    "source",
    ["config = 3\n", "x = 1\n", "raise RuntimeError('boom')\n", "config = {'depth': 0}\n", "config = {'colour': 1}\n"],
)
def test_bad_config_file(tmp_path: Path, source: str) -> None:
    (tmp_path / CONFIG_FILE).write_text(source, encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        get_config(cwd=tmp_path, environ={})
    assert info.value.exit_code == 1


def test_invalid_values(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        get_config({"output": "html"}, cwd=tmp_path, environ={})
    with pytest.raises(ConfigError):
        get_config(cwd=tmp_path, environ={"ENTROPIK_MAX_ORDER": "zero"})
