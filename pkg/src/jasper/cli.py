from __future__ import annotations

import logging
import sys

import click

from jasper import app, config
from jasper.errors import JasperError
from jasper.properties import PropertyMap
from jasper.server import ServerConfig, serve
from jasper.template import process_file_plain


def _parse_var(ctx, param, values):
    pairs = []
    for item in values:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise click.BadParameter(f"expected NAME=VALUE, got {item!r}")
        pairs.append((name, value))
    return pairs


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log diagnostics to stderr.")
def main(verbose):
    """Jasper template engine and server."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("template")
@click.option("--config", "configs", multiple=True, help="Config file, parsed under CONFIG. (repeatable, later wins).")
@click.option("--error-config", help="Error message file, parsed under ERROR.")
@click.option("--var", "variables", multiple=True, callback=_parse_var, help="Temporary variable NAME=VALUE.")
@click.option("--root", help="Value for CONFIG.rootDir when the config does not set it.")
def render(template, configs, error_config, variables, root):
    """Render TEMPLATE to standard output."""
    props = PropertyMap()
    try:
        for path in configs:
            config.parse(path, props)
        if error_config:
            config.parse_bare(error_config, "ERROR", props)
        if root and props.get("CONFIG.rootDir") is None:
            props["CONFIG.rootDir"] = root
        for name, value in variables:
            props["VAR." + name] = value
        out = process_file_plain(template, app.FULL_CHAIN, props)
    except (OSError, JasperError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.stdout.write(out)
    sys.stdout.flush()


@main.command("serve")
@click.option("--root", envvar="JASPER_ROOT", type=click.Path(file_okay=False, exists=True),
              help="Site root holding template/ (default: the bundled demo).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="JASPER_PORT", default=8080, type=int, show_default=True)
@click.option("--config", "configs", multiple=True,
              help="Config files relative to the root, in parse order "
                   "(default: config/python.config config/global.config).")
@click.option("--error-config", default="config/error.config", show_default=True)
@click.option("--spool", default="jasper-mail.spool", show_default=True, help="File that receives sent mail.")
@click.option("--cache-config", is_flag=True, help="Parse config files once instead of per request.")
def serve_cmd(root, host, port, configs, error_config, spool, cache_config):
    """Serve the main server process on /main."""
    logging.getLogger("jasper").setLevel(logging.INFO)
    try:
        cfg = ServerConfig(
            root_dir=root or str(app.demo_root()),
            config_files=configs or ServerConfig.config_files,
            error_config=error_config or None,
            host=host,
            port=port,
            spool_path=spool,
            cache_config=cache_config,
        )
    except JasperError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"serving {cfg.root_dir} on http://{host}:{port}/main", err=True)
    serve(cfg)


if __name__ == "__main__":
    main()
