"""Exception types shared across the pipeline.

Everything raised on purpose derives from KeymaskError so the CLI can turn
failures into single-line JSON on stderr with a non-zero exit.
"""


class KeymaskError(Exception):
    """Base class for all errors this package raises deliberately."""


class CorpusFormatError(KeymaskError):
    """Malformed corpus, vocabulary, or keyword file. Carries a line number when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class TableFormatError(CorpusFormatError):
    """Bad static embedding table file."""


class UnembeddableDocumentError(KeymaskError):
    """No word of the document is covered by the embedding provider."""


class DegenerateVectorError(KeymaskError):
    """Cosine similarity asked for a zero vector."""


class RemoteServiceError(KeymaskError):
    """Remote embedding service failed after retries."""

    def __init__(self, message: str, status: int | None = None, body: str | None = None):
        self.status = status
        self.body_excerpt = (body or "")[:200]
        detail = message
        if status is not None:
            detail += f" (status {status})"
        if self.body_excerpt:
            detail += f": {self.body_excerpt}"
        super().__init__(detail)


class ProtocolError(KeymaskError):
    """Remote embedding service answered with an inconsistent or invalid payload."""


class ConfigError(KeymaskError):
    """Invalid pipeline configuration."""
