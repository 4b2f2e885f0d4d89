"""junglekit: tiered semantic caching, a small-model answer ensemble, and a
deterministic simulator for read-heavy multilingual assistant workloads."""

__version__ = "0.1.0"
