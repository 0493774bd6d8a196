import sys

from setuptools import setup

# The compiled word kernel is an optional speedup; the package falls back to
# the pure-Python twin when the extension is absent.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/freemult/_kernel.pyx"], language_level="3", annotate=False
    )
except Exception as exc:
    print(f"freemult: skipping compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
