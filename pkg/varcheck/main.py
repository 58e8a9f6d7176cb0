"""
Main entry point of the varcheck command-line tool.
"""
from varcheck import create_cli


def main():
    """Run the command-line application; `varcheck = "varcheck.main:main"` in pyproject."""
    cli = create_cli()
    cli(prog_name="varcheck")


if __name__ == "__main__":
    main()
