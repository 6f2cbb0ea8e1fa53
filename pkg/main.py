import sys

from cli.routes import run

if __name__ == "__main__":
    sys.exit(run())
