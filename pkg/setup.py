from setuptools import Extension, setup

# The compiled stepper core is optional: without Cython (or a C compiler)
# the package falls back to the numpy implementation at import time.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "membeam._core._stepper_cy",
                ["src/membeam/_core/_stepper_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
