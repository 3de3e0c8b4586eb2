"""Exception hierarchy for noisy-le"""


class NoisyLEError(Exception):
    """Base class for all errors raised by noisy-le"""


class DomainError(NoisyLEError, ValueError):
    """An argument lies outside the domain of a numerical operation"""


class ConfigError(NoisyLEError):
    """An experiment configuration is invalid or could not be read"""


class ValidationFailure(NoisyLEError):
    """A closed-form cross-check exceeded its tolerance"""
