from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "isingmap._kernels",
        ["src/isingmap/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
