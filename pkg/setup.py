import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("COLCACHE_SKIP_EXT", "") not in ("1", "true"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "colcache.kernels._native",
                ["src/colcache/kernels/_native.pyx"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
