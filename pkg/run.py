#!/usr/bin/env python
"""
Run script for the dispersive lab
Selects the configuration from LAB_ENV and dispatches to the command group
"""

import os

from app import create_app
from config import config

# Create the command group for console use
cli = create_app(config[os.environ.get('LAB_ENV') or 'default'])


def main():
    """Console entry point; exit statuses: 0 success, 2 config error, 3 numerical-validity failure"""
    cli(prog_name='dispersive-lab')


if __name__ == '__main__':
    main()
