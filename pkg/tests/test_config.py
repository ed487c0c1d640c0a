from __future__ import annotations

import pytest

from factpipe.config import load_config, parse_config_file
from factpipe.orchestrator import PipelineConfig


def write_config(tmp_path, text):
    path = tmp_path / "factpipe.conf"
    path.write_text(text, encoding="utf-8")
    return path


class TestParseConfigFile:
    def test_key_value_with_comments(self, tmp_path):
        path = write_config(
            tmp_path,
            "\n".join(
                [
                    "# pipeline knobs",
                    "mode = kg_only   # ablation",
                    "k = 3",
                    "",
                    "sparql_endpoint = http://localhost:8890/sparql",
                ]
            ),
        )
        assert parse_config_file(path) == {
            "mode": "kg_only",
            "k": "3",
            "sparql_endpoint": "http://localhost:8890/sparql",
        }

    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(tmp_path, "verbosity = высокая\n")
        with pytest.raises(ValueError, match="line 1"):
            parse_config_file(path)

    def test_missing_equals_rejected(self, tmp_path):
        path = write_config(tmp_path, "mode kg_only\n")
        with pytest.raises(ValueError, match="KEY = VALUE"):
            parse_config_file(path)

    @pytest.mark.parametrize("secret", ["chat_api_key", "search_api_key", "search_engine_id"])
    def test_secrets_refused_from_files(self, tmp_path, secret):
        path = write_config(tmp_path, f"{secret} = sk-oops\n")
        with pytest.raises(ValueError, match="environment-only"):
            parse_config_file(path)


class TestLoadConfig:
    def test_defaults(self):
        config = load_config(env={})
        assert config == PipelineConfig()
        assert config.endpoints.sparql_endpoint == "https://dbpedia.org/sparql"
        assert config.chat_api_key is None

    def test_file_values_applied_and_cast(self, tmp_path):
        path = write_config(tmp_path, "k = 7\nbudget_seconds = 2.5\nmode = web_only\n")
        config = load_config(path, env={})
        assert config.k == 7
        assert config.budget_seconds == 2.5
        assert config.mode == "web_only"

    def test_env_beats_file(self, tmp_path):
        path = write_config(tmp_path, "sparql_endpoint = http://from-file/sparql\n")
        config = load_config(path, env={"SPARQL_ENDPOINT": "http://from-env/sparql"})
        assert config.endpoints.sparql_endpoint == "http://from-env/sparql"

    def test_flags_beat_env(self, tmp_path):
        path = write_config(tmp_path, "mode = kg_only\n")
        config = load_config(
            path,
            env={"FIXTURE_DIR": "/from/env"},
            overrides={"mode": "web_only", "fixture_dir": "/from/flag"},
        )
        assert config.mode == "web_only"
        assert config.fixture_dir == "/from/flag"

    def test_secrets_arrive_from_env_only(self):
        config = load_config(
            env={
                "CHAT_API_KEY": "sk-abc",
                "SEARCH_API_KEY": "search-key",
                "SEARCH_ENGINE_ID": "engine-1",
            }
        )
        assert config.chat_api_key == "sk-abc"
        assert config.search_api_key == "search-key"
        assert config.search_engine_id == "engine-1"

    def test_secrets_never_appear_in_repr(self):
        config = load_config(env={"CHAT_API_KEY": "sk-secret-value"})
        assert "sk-secret-value" not in repr(config)

    def test_blank_env_values_ignored(self):
        config = load_config(env={"CHAT_API_KEY": "", "SPARQL_ENDPOINT": ""})
        assert config.chat_api_key is None
        assert config.endpoints.sparql_endpoint == "https://dbpedia.org/sparql"

    def test_none_overrides_skipped(self):
        config = load_config(env={}, overrides={"k": None, "mode": None})
        assert config.k == 5
        assert config.mode == "full"

    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError, match="unknown config override"):
            load_config(env={}, overrides={"tempo": "fast"})

    def test_endpoint_override_lands_in_endpoints(self):
        config = load_config(env={}, overrides={"nli_url": "http://nli:9000"})
        assert config.endpoints.nli_url == "http://nli:9000"

    def test_invalid_combination_surfaces_config_error(self, tmp_path):
        path = write_config(tmp_path, "k = 0\n")
        with pytest.raises(ValueError):
            load_config(path, env={})
