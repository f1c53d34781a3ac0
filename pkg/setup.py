"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure numpy fallback is selected at
import time), so a missing compiler or Cython must not break installation.
Set HELIXLAB_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compilation failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print("*" * 72)
        print("WARNING: building helixlab._core failed; falling back to the")
        print("pure-Python kernels. Reason: %s" % (exc,))
        print("*" * 72)


ext_modules = []
cmdclass = {}
if os.environ.get("HELIXLAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "helixlab._core",
                    ["src/helixlab/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        print("Cython not available; installing with pure-Python kernels only.")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
