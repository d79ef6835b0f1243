"""Parsing and formatting of complex literals (``a``, ``a+bi``, ``a-bi``)."""
import re

_REAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_LITERAL = re.compile(rf"^(?P<re>{_REAL})(?:(?P<sign>[+-])(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i)?$")


def parse_complex(text):
    """Parse one literal; raise ValueError if it is not of the accepted forms."""
    m = _LITERAL.match(text)
    if not m:
        raise ValueError(f"not a complex literal: {text!r}")
    re_part = float(m.group("re"))
    if m.group("im") is None:
        return complex(re_part, 0.0)
    im = float(m.group("im"))
    return complex(re_part, -im if m.group("sign") == "-" else im)


def _real(x, digits):
    if digits is None:
        s = repr(float(x))
        return s[:-2] if s.endswith(".0") else s
    return f"{float(x):.{digits}g}"


def format_complex(z, digits=None):
    """Inverse of :func:`parse_complex`.

    With ``digits=None`` the shortest exact round-trip representation is
    used; otherwise ``digits`` significant digits.
    """
    z = complex(z)
    re_s = _real(z.real + 0.0, digits)
    if z.imag == 0:
        return re_s
    sign = "-" if z.imag < 0 else "+"
    return f"{re_s}{sign}{_real(abs(z.imag), digits)}i"
