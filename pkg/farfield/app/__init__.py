"""Application layer: CLI, settings, logging, error handling, schemas and I/O."""
