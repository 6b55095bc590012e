"""Isolated model-based testing of self-organizing partitioning algorithms.

Thin re-export of the compiled module. Suite and result files are line
delimited json with a schema-version header; configs are plain dicts (or
paths to config files) with the same nested shape the CLI accepts.
"""

from ._sotest import (
    ConfigError,
    GenerationError,
    IoError,
    RESULT_SCHEMA,
    SUITE_SCHEMA,
    default_config,
    execute,
    fault_algorithm,
    fault_names,
    generate,
    load_config,
    metrics_table,
    report,
    run_campaign,
    save_config,
)

__all__ = [
    "ConfigError",
    "GenerationError",
    "IoError",
    "RESULT_SCHEMA",
    "SUITE_SCHEMA",
    "default_config",
    "execute",
    "fault_algorithm",
    "fault_names",
    "generate",
    "load_config",
    "metrics_table",
    "report",
    "run_campaign",
    "save_config",
]
