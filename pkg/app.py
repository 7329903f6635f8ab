"""Entry point: python app.py <command> ... (see README.md)."""
import sys

from proofnets.cli import main

if __name__ == "__main__":
    sys.exit(main())
