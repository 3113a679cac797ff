"""Python interface to the multi-agent research-simulation engine."""

try:
    from ._ascollab import (  # noqa: F401
        BackendError,
        ConfigError,
        ConflictError,
        IntegrityError,
        NotFoundError,
        ValidationError,
        analyze,
        default_config,
        load_log,
        log_digest,
        replay,
        run_ablation_independent,
        run_experiment,
        save_log,
    )
except ImportError:  # extension on sys.path directly (in-tree builds)
    from _ascollab import (  # noqa: F401
        BackendError,
        ConfigError,
        ConflictError,
        IntegrityError,
        NotFoundError,
        ValidationError,
        analyze,
        default_config,
        load_log,
        log_digest,
        replay,
        run_ablation_independent,
        run_experiment,
        save_log,
    )

__all__ = [
    "BackendError",
    "ConfigError",
    "ConflictError",
    "IntegrityError",
    "NotFoundError",
    "ValidationError",
    "analyze",
    "default_config",
    "load_log",
    "log_digest",
    "replay",
    "run_ablation_independent",
    "run_experiment",
    "save_log",
]
