import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from core.config import get_settings
from core.errors import EstimationError

# Configure logging
logger = logging.getLogger(__name__)

class CommandParser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 means non-convergence"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_vector(text: str) -> List[float]:
    """'0.1' or '0.1,-2' into a list of floats"""
    try:
        return [float(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}")


def build_parser() -> CommandParser:
    """Create the command parser with every subcommand registered"""
    settings = get_settings()
    parser = CommandParser(
        prog="main.py",
        description=f"{settings.PROJECT_NAME}: threshold policies for remote estimation over a collision channel",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {settings.VERSION}")
    parser.add_argument('--log-level', default=None, help="Overrides MFRE_LOG_LEVEL")
    parser.add_argument('--log-dir', default=None, help="Also log to <dir>/<date>.log")
    parser.add_argument('--workers', type=int, default=None, help="Worker processes for simulate and experiment")

    subparsers = parser.add_subparsers(dest='command', metavar='command', parser_class=CommandParser)
    subparsers.required = True

    # Import command modules after defining the parser helpers to avoid circular imports
    from cli import design, experiment, fit, simulate, solve

    for module in (solve, fit, design, simulate, experiment):
        module.register(subparsers)
    return parser


def dispatch(args: argparse.Namespace) -> int:
    """Run the selected command and map failures to exit codes"""
    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid input: {str(e)}")
        return 1
    except EstimationError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        return e.exit_code


def run(argv: Optional[List[str]] = None) -> int:
    from core.logging_config import configure_logging
    from utils.logger import setup_run_logger

    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    log_dir = args.log_dir or get_settings().LOG_DIR
    handler = setup_run_logger(log_dir) if log_dir else None
    try:
        return dispatch(args)
    finally:
        if handler is not None:
            logging.getLogger().removeHandler(handler)
            handler.close()
