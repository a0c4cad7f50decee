"""Build hook for the optional compiled kernels.

If Cython or a C compiler is missing the package still installs; memgrid
then runs on the pure-Python kernels.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "memgrid._ckernels",
                ["src/memgrid/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
