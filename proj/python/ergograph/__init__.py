"""Python bindings for the ergograph reaction-network toolkit."""

from ergograph._ergograph import (
    Error,
    ParseError,
    ReactionNetwork,
    __version__,
    catalytic_layers,
    main,
    mixing_time,
    product_form,
    search_complex_balanced,
    simulate,
    spectral_gap,
    stationary,
    verify_complex_balanced,
)

__all__ = [
    "Error",
    "ParseError",
    "ReactionNetwork",
    "__version__",
    "catalytic_layers",
    "main",
    "mixing_time",
    "product_form",
    "search_complex_balanced",
    "simulate",
    "spectral_gap",
    "stationary",
    "verify_complex_balanced",
]
