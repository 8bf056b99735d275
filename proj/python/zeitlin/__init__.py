"""Matrix hydrodynamics on the sphere.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.  Matrices cross the boundary as numpy arrays (complex128 for
algebra elements), and the verdict/conclusion enums come back as strings.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
from ._core import __version__  # noqa: F401
