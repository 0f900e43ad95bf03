"""Build the optional Cython convolution kernel.

The extension is optional: when Cython or a C compiler is unavailable the
package installs without it and falls back to the pure-Python kernels.
"""
import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping C kernel build ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc})")


def extensions():
    if os.environ.get("QTHETA_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    try:
        return cythonize(
            ["src/qtheta/_ckernels.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:
        print(f"warning: cythonize failed ({exc})")
        return []


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
