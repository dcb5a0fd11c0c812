"""Build hook for the optional compiled kernels.

The Cython extension is optional: if Cython or a C compiler is missing the
package installs without it and ``twistchar.kernels`` falls back to the pure
Python implementation at import time.
"""
import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or failing
            print(f"warning: compiled kernels not built ({exc}); using pure Python")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); using pure Python")


ext_modules = []
if os.environ.get("TWISTCHAR_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "twistchar.kernels._ckernels",
                    ["src/twistchar/kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
