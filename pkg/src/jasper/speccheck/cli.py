import sys

import click

from jasper.speccheck.harness import HarnessError, check_triple, load_suite


@click.group()
def main():
    """Check pre/postcondition triples against the running code."""


@main.command()
@click.option("--suite", "suite_dir", type=click.Path(exists=True, file_okay=False),
              help="Directory of .triple files (default: the bundled suite).")
@click.option("--root", type=click.Path(exists=True, file_okay=False),
              help="Site root to run against (default: the bundled demo).")
def run(suite_dir, root):
    """Run every triple in a suite; exit nonzero if any fails."""
    try:
        triples = load_suite(suite_dir)
        results = [check_triple(t, root) for t in triples]
    except HarnessError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for result in results:
        click.echo(str(result))
    failed = sum(not r.passed for r in results)
    click.echo(f"{len(results) - failed} passed, {failed} failed")
    sys.exit(1 if failed else 0)
