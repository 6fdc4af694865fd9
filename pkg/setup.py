"""Build glue for the optional compiled kernel.

The extension is a pure speedup; install proceeds without it and the
package falls back to the Python implementation at import time.
-ffp-contract=off keeps the compiled float results bit-identical to the
pure path (no fused multiply-add), and -fno-builtin stops the compiler
from pairing sin/cos calls into sincos, whose results can drift a ulp
from the separate libm calls the interpreter makes.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "spoofkit._kernels",
                ["src/spoofkit/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
