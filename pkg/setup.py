import os

from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure-Python
# implementations in netdelay._kernels._pure when the extension is absent.
ext_modules = []
if os.environ.get("NETDELAY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "netdelay._kernels._core",
                    ["src/netdelay/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
