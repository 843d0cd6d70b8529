import os

from setuptools import setup

ext_modules = []
if os.environ.get("STRINGTOP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install; stringtop.kernel falls back
        pass
    else:
        ext_modules = cythonize(
            ["src/stringtop/_kernel.pyx"],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
