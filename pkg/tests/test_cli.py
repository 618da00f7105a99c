import pytest
from click.testing import CliRunner

from jasper import cli, server
from jasper.app import demo_root

from conftest import write


@pytest.fixture
def runner():
    return CliRunner()


def test_render_date(runner):
    result = runner.invoke(cli.main, ["render", str(demo_root() / "template/_inc/date.html"),
                                      "--var", "vCurrentDate=10th May 2011"])
    assert result.exit_code == 0, result.output
    assert result.output == "<p>The current date is <strong>10th May 2011</strong></p>\n"


def test_render_token_free_is_identity(runner, tmp_path):
    text = "line one\r\nline two\n\nend"
    path = write(tmp_path / "plain.html", text)
    result = runner.invoke(cli.main, ["render", str(path)])
    assert result.exit_code == 0
    assert result.output == text.replace("\r\n", "\n")


def test_render_with_config(runner, tmp_path):
    root = demo_root()
    result = runner.invoke(cli.main, [
        "render", str(root / "template/main.html"),
        "--config", str(root / "config/php.config"), "--config", str(root / "config/global.config"),
        "--root", str(root),
    ])
    assert result.exit_code == 0, result.output
    assert '<a href="/php/main.php?page=feedback">' in result.output


def test_render_missing_config(runner, tmp_path):
    path = write(tmp_path / "t.html", "x")
    result = runner.invoke(cli.main, ["render", str(path), "--config", str(tmp_path / "nope.config")])
    assert result.exit_code != 0
    assert "nope.config" in result.stderr


def test_render_bad_var(runner, tmp_path):
    result = runner.invoke(cli.main, ["render", str(write(tmp_path / "t.html", "x")), "--var", "novalue"])
    assert result.exit_code != 0


def test_serve_env_overrides(runner, monkeypatch, site):
    seen = {}
    monkeypatch.setattr(cli, "serve", lambda cfg: seen.setdefault("cfg", cfg))
    result = runner.invoke(cli.main, ["serve"], env={"JASPER_PORT": "9123", "JASPER_ROOT": str(site)})
    assert result.exit_code == 0, result.output
    cfg = seen["cfg"]
    assert cfg.port == 9123 and cfg.root_dir == str(site)
    assert cfg.config_files == server.ServerConfig.config_files


def test_serve_options(runner, monkeypatch, site, tmp_path):
    seen = {}
    monkeypatch.setattr(cli, "serve", lambda cfg: seen.setdefault("cfg", cfg))
    result = runner.invoke(cli.main, [
        "serve", "--root", str(site), "--port", "9000", "--config", "config/php.config",
        "--config", "config/global.config", "--error-config", "config/error.config",
        "--spool", str(tmp_path / "m.spool"),
    ])
    assert result.exit_code == 0, result.output
    assert seen["cfg"].config_files == ("config/php.config", "config/global.config")


def test_serve_bad_root(runner, tmp_path):
    result = runner.invoke(cli.main, ["serve", "--root", str(tmp_path)])
    assert result.exit_code != 0
