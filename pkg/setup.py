import os

from setuptools import Extension, setup

# QGA_PURE_PYTHON=1 skips the extension; the package then runs on the numpy fallback.
ext_modules = []
if os.environ.get("QGA_PURE_PYTHON") != "1":
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("qga._kernels", ["src/qga/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
