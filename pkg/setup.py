"""Build script: compiles the optional simplex kernel extension.

The package works without the extension (a pure-Python kernel is selected
at import time); compiling it just makes the LP-heavy paths much faster.
``PREFSORT_NO_EXT=1`` skips compilation entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("PREFSORT_NO_EXT"):
        return []
    if not os.path.exists("src/prefsort/lp/_kernel.pyx"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "prefsort.lp._kernel",
        ["src/prefsort/lp/_kernel.pyx"],
        # -ffp-contract=off keeps double arithmetic bit-identical with the
        # pure-Python kernel (no fused multiply-add, no fast-math).
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    """Never fail the install over a missing compiler."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - env specific
            print(f"warning: extension build skipped ({exc}); "
                  "falling back to the pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - env specific
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to the pure-Python kernel")


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
