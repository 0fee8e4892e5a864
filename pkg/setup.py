from setuptools import Extension, setup

# The compiled kernel is optional: rsthp.kernels falls back to the pure
# NumPy implementation when the extension is missing or fails to build.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rsthp._kernels_cy",
                ["src/rsthp/_kernels_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
