"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed, never functionality.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            print(f"warning: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc})", file=sys.stderr)


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "crowdmap._kernels_c",
        sources=["src/crowdmap/_kernels_c.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O2"],
    )
    # No -ffast-math: the compiled and NumPy backends must agree bitwise.
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
