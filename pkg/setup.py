"""Build script for the optional compiled integrator kernel.

Everything else is configured in pyproject.toml. If Cython or a C compiler is
missing the package still installs and falls back to the pure-Python kernel.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build-time only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "quasilie.dynamics._dopri_ext",
                ["src/quasilie/dynamics/_dopri_ext.pyx"],
                # no contraction into FMA, so results match the Python twin bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
