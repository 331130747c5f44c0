"""Command-line front end."""
from .config import DEFAULTS, SCHEMA, load_config, parse_config, parse_eps
from .main import cli

__all__ = ["DEFAULTS", "SCHEMA", "cli", "load_config", "parse_config", "parse_eps"]
