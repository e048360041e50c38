from .runcli import cli
