"""Exception types shared across the pipeline."""


class SpeakevalError(Exception):
    """Base class for all pipeline errors."""


# --- ingest ---

class UnsupportedFormat(SpeakevalError):
    pass


class CorruptFile(SpeakevalError):
    pass


class EmptyAudio(SpeakevalError):
    pass


class SchemaError(SpeakevalError):
    pass


class NonMonotoneTimestamps(SpeakevalError):
    pass


class NegativeDuration(SpeakevalError):
    pass


class UnknownExpressionLabel(SpeakevalError):
    pass


# --- prosody ---

class AudioTooShort(SpeakevalError):
    pass


class EmptyWindow(SpeakevalError):
    pass


class InsufficientData(SpeakevalError):
    pass


class ZeroDurationWindow(SpeakevalError):
    pass


# --- gesture ---

class TooFewSamples(SpeakevalError):
    pass


class NoBaseline(SpeakevalError):
    pass


class InsufficientLandmarks(SpeakevalError):
    pass


# --- segmenter ---

class NonPositiveDuration(SpeakevalError):
    pass


class ChannelLengthMismatch(SpeakevalError):
    pass


# --- rubric ---

class CatalogCorrupt(SpeakevalError):
    pass


class ModalityMismatch(SpeakevalError):
    pass


# --- llm client ---

class ProviderUnavailable(SpeakevalError):
    pass


class MalformedResponse(SpeakevalError):
    pass


class AuthError(SpeakevalError):
    pass


class RateLimited(SpeakevalError):
    pass


class NoJsonFound(MalformedResponse):
    pass


class MissingKey(MalformedResponse):
    pass


class ScoreOutOfRange(MalformedResponse):
    pass


class ScoreNotInteger(MalformedResponse):
    pass


# --- agreement ---

class InsufficientPairs(SpeakevalError):
    pass


class OutOfRangeScore(SpeakevalError):
    pass


class OutOfDomain(SpeakevalError):
    pass


class NoOverlap(SpeakevalError):
    pass
