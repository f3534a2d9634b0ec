"""Model specification strings such as ``polymer:n=64`` or ``sk:n=10,xi=x^2``."""
from __future__ import annotations

from ..errors import ModelSpecError, SuperconcError
from ..series import parse_xi
from .basic import EquicorrelatedSampler, IIDSampler
from .counterexamples import CEFieldA, CEFieldB
from .dgff import dgff_sampler
from .gue import GUESampler
from .nk import NKSampler
from .polymer import PolymerModel
from .sk import MixedSKModel

FAMILIES = {
    "polymer": (PolymerModel, {"n": int}, ()),
    "sk": (MixedSKModel, {"n": int, "xi": parse_xi, "backend": str}, ("backend",)),
    "nk": (NKSampler, {"N": int, "K": int}, ()),
    "dgff": (dgff_sampler, {"n": int, "boundary": str}, ("boundary",)),
    "gue": (GUESampler, {"n": int}, ()),
    "iid": (IIDSampler, {"n": int, "var": float}, ("var",)),
    "equi": (EquicorrelatedSampler, {"n": int, "rho": float}, ()),
    "ce_a": (CEFieldA, {"n": int}, ()),
    "ce_b": (CEFieldB, {"n": int}, ()),
}


def split_spec(text: str):
    """``family:k=v,...`` into (family, {k: v}) without building anything.

    Commas inside a value are allowed when the next piece has no ``=``, so
    ``xi=0.5x^2+0.5x^4`` and similar stay intact.
    """
    text = text.strip()
    family, sep, rest = text.partition(":")
    if not sep or family not in FAMILIES:
        raise ModelSpecError(text, "unknown model family")
    params = {}
    last = None
    for piece in rest.split(","):
        if "=" in piece:
            key, _, value = piece.partition("=")
            key = key.strip()
            if not key or key in params:
                raise ModelSpecError(piece, "bad or repeated parameter")
            params[key] = value.strip()
            last = key
        elif last is not None and piece.strip():
            params[last] += "," + piece.strip()
        elif piece.strip():
            raise ModelSpecError(piece, "expected key=value")
    return family, params


def parse_model_spec(text: str):
    """Build the sampler described by ``text``."""
    family, raw = split_spec(text)
    ctor, types, optional = FAMILIES[family]
    kwargs = {}
    for key, value in raw.items():
        if key not in types:
            raise ModelSpecError(f"{key}={value}", f"unknown parameter for {family}")
        try:
            kwargs[key] = types[key](value)
        except ValueError as exc:
            raise ModelSpecError(f"{key}={value}", str(exc)) from None
    missing = [k for k in types if k not in kwargs and k not in optional]
    if missing:
        raise ModelSpecError(text, f"missing parameter {missing[0]}")
    try:
        return ctor(**kwargs)
    except SuperconcError:
        raise
    except (ValueError, TypeError) as exc:
        raise ModelSpecError(text, str(exc)) from None
