"""
Utilities Package

Shared utilities for the power monoid toolkit:
- errors: exception hierarchy shared by the algebra and verification packages
- settings: environment-driven configuration (python-dotenv + pydantic)
- logger: loguru sink configuration for the CLI
"""

__version__ = "1.0.0"
