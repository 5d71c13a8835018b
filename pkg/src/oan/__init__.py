"""Middleware-free humanoid control stack for the NAO V6."""

__version__ = "0.1.0"
