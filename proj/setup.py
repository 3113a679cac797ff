"""Builds the C++ core and its bindings as the ascollab_py._ascollab extension."""

from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "ascollab_py._ascollab",
    sources=sorted(glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    libraries=["pthread"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
