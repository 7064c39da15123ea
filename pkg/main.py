"""
Reduction Toolkit - Main Entry Point
Runs the command-line interface; see `python main.py --help`.
"""

import io
import sys

import click

from cli import EXIT_INPUT, cli

# Set UTF-8 encoding for Windows console
if sys.platform == "win32":
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8')


def main():
    """Run the CLI; usage errors map to the INPUT exit code."""
    try:
        cli.main(prog_name="reduction-toolkit", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(EXIT_INPUT)
    except click.Abort:
        print("\nAborted.")
        sys.exit(1)


if __name__ == "__main__":
    main()
