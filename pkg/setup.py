"""Build script for the optional compiled stepping kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, headers, ...
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped: {exc}")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"compiled kernel skipped: {exc}")
        return []
    return cythonize(
        ["src/ecdsim/_kernels/_core.pyx"],
        compiler_directives={"language_level": "3"},
    ), [numpy.get_include()]


exts = extensions()
if exts:
    ext_modules, include_dirs = exts
else:
    ext_modules, include_dirs = [], []

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
    cmdclass={"build_ext": OptionalBuildExt},
)
