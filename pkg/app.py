"""
Dispersive lab
Main application entry point
Version: 1.0.0
"""

import logging

import click

from config import Config
from core.errors import ConfigError, DomainError, NumericalValidityError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class LabGroup(click.Group):
    """Command group mapping lab errors onto exit statuses"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (ConfigError, DomainError) as exc:
            click.echo(f'error: {exc}', err=True)
            ctx.exit(EXIT_CONFIG)
        except NumericalValidityError as exc:
            click.echo(f'numerical validity failure: {exc}', err=True)
            ctx.exit(EXIT_NUMERICAL)


def configure_logging(config_class):
    """Install one stream handler on the root logger with the configured format and level"""
    root = logging.getLogger()
    handler = next((item for item in root.handlers if getattr(item, '_lab_handler', False)), None)
    if handler is None:
        handler = logging.StreamHandler()
        handler._lab_handler = True
        root.addHandler(handler)
    handler.setFormatter(logging.Formatter(config_class.LOG_FORMAT))
    root.setLevel(config_class.LOG_LEVEL)


def create_app(config_class=Config):
    """Application factory: the click command group with every command module registered"""
    configure_logging(config_class)

    @click.group(cls=LabGroup)
    @click.pass_context
    def cli(ctx):
        """Phase-space dispersive laboratory"""
        ctx.obj = {'config': config_class}

    # Register command modules
    from commands import dynamics, estimates, partition, transform, waterwave

    for module in (transform, dynamics, estimates, partition, waterwave):
        for command in module.commands:
            cli.add_command(command)

    return cli
