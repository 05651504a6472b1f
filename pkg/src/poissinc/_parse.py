"""Parser for ``family(key=value, ...)`` spec strings."""

import re

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$", re.S)


class SpecSyntaxError(ValueError):
    pass


def _value(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if low == "pi":
        import math
        return math.pi
    return text


def parse_call(text):
    """Split ``"name(a=1, b=x)"`` into ``("name", {"a": 1, "b": "x"})``.

    A bare ``"name"`` yields an empty mapping.
    """
    m = _CALL.match(text)
    if m is None:
        raise SpecSyntaxError(f"cannot parse spec {text!r}")
    name, body = m.group(1).lower(), m.group(2)
    params = {}
    if body and body.strip():
        for item in body.split(","):
            if "=" not in item:
                raise SpecSyntaxError(
                    f"expected key=value in {text!r}, got {item.strip()!r}")
            k, v = item.split("=", 1)
            params[k.strip().lower()] = _value(v)
    return name, params


def format_call(name, params):
    if not params:
        return name
    inner = ", ".join(f"{k}={v!r}" if isinstance(v, str) else f"{k}={v}"
                      for k, v in params.items())
    return f"{name}({inner})".replace("'", "")
