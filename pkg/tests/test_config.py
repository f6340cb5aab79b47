import pytest
from pydantic import ValidationError

from hyperconv.config import HyperconvSettings, get_settings


def test_defaults():
    settings = HyperconvSettings()
    assert (settings.threads, settings.window, settings.depth, settings.seed) == (1, 12, 3, 0)
    assert settings.effective_log_level() == "WARNING"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("HYPERCONV_THREADS", "4")
    monkeypatch.setenv("HYPERCONV_LOG_LEVEL", "info")
    settings = get_settings()
    assert settings.threads == 4
    assert settings.log_level == "INFO"
    assert get_settings() is settings


def test_flag_and_debug_precedence(monkeypatch):
    settings = HyperconvSettings()
    assert settings.effective_log_level("error") == "ERROR"
    monkeypatch.setenv("HYPERCONV_DEBUG", "true")
    assert HyperconvSettings().effective_log_level("error") == "DEBUG"


@pytest.mark.parametrize("name, value", [("HYPERCONV_THREADS", "0"), ("HYPERCONV_LOG_LEVEL", "LOUD")])
def test_invalid_environment(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValidationError):
        HyperconvSettings()
