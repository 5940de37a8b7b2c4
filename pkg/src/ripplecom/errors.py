"""Exception types shared across the package."""


class RipplecomError(Exception):
    """Base class for all package-specific errors."""


class InvalidBand(RipplecomError):
    """Band edges violate Nyquist, ordering, or positivity constraints."""


class InvalidWindow(RipplecomError):
    """Smoothing window is shorter than one sample."""


class EmptyTrace(RipplecomError):
    """Operation received a trace with no samples."""


class SegmentTooLong(RipplecomError):
    """Spectral segment (or hop) is incompatible with the trace length."""


class RateMismatch(RipplecomError):
    """Traces that must share a sample rate (or length) do not."""


class EmptyDeviceList(RipplecomError):
    """A scenario defines no devices at all."""


class InvalidAttenuation(RipplecomError):
    """Line-filter attenuation factor below 1."""


class LengthMismatch(RipplecomError):
    """Bit-sequence length does not match the expected frame geometry."""


class SymbolOutOfRange(RipplecomError):
    """Multi-level symbol value outside [0, 2**bits_per_symbol)."""


class DegenerateSpec(RipplecomError):
    """Distribution spec cannot produce samples (bad sigma or hopeless truncation)."""


class NoPilotFound(RipplecomError):
    """Passband scan exhausted its grid without decoding the pilot."""


class PilotNotFound(RipplecomError):
    """Time-domain frame search found no offset that decodes the pilot."""


class UnknownAxis(RipplecomError):
    """Sweep axis path does not name a numeric scenario field."""


class ConfigError(RipplecomError):
    """Scenario configuration file is malformed or inconsistent."""


class IoError(RipplecomError):
    """Report or trace export failed at the filesystem level."""
