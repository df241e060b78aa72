"""
Verification Package

Named checks over enumerated automorphisms, per-group verification reports
and the `powmon` command line:
- lemma_harness: checks and the per-group verification
- report: JSON / CSV / text rendering
- schemas: pydantic report and CLI configuration types
- exit_codes: process exit codes
- main: argparse entry point (python -m verification.main)
"""

__version__ = "1.0.0"
