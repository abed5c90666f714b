"""Hermite-truncated tempered distributions and translation flows.

Thin Python layer over the compiled core; everything public lives in
``distflow._core`` and is re-exported here.
"""

from distflow._core import *  # noqa: F401,F403
from distflow._core import __doc__ as _core_doc

__doc__ = _core_doc or __doc__
__version__ = "0.1.0"
