"""Exception types shared across the pipeline."""


class PipelineError(Exception):
    """A stage failed in a way the CLI reports as a processing error (exit 1)."""


class SchemaError(PipelineError):
    """An input file's header or format does not match the declared schema."""


class FitError(PipelineError):
    """A distribution fit cannot proceed (bad sample) or did not produce a finite optimum."""
