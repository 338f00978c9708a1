from .logging import configure_logging, PipelineLogger, bind_context, create_run_id
from .config import (
    CORPUS_ROOT_ENV,
    build_config,
    corpus_root_override,
    load_config,
    nest_dotted,
    parse_key_value_text,
    read_key_value_file,
)

__all__ = [
    "configure_logging",
    "PipelineLogger",
    "bind_context",
    "create_run_id",
    "CORPUS_ROOT_ENV",
    "build_config",
    "corpus_root_override",
    "load_config",
    "nest_dotted",
    "parse_key_value_text",
    "read_key_value_file",
]
