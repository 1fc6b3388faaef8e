# This file is part of rbs-ppr, a toolkit for single-target Personalized
# PageRank queries.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3, as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Setuptools packaging metadata for rbs-ppr."""
import warnings

import setuptools

warnings.simplefilter("ignore", UserWarning)  # Older pips complain about newer options.

with open("README.md", "r") as fh:
    long_description = fh.read()

with open("requirements.txt", "r") as fh:
    install_requires = [line.strip() for line in fh if line.strip()]

setuptools.setup(
    name="rbsppr",
    use_scm_version={"local_scheme": "node-and-date", "fallback_version": "0.1.0"},
    description="Single-target Personalized PageRank via randomized backward search",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Development Status :: 2 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Information Analysis",
    ],
    python_requires=">=3.8",
    packages=setuptools.find_packages(include=("rbsppr*",)),
    package_data={"rbsppr": ["config_default.yaml"]},
    install_requires=install_requires,
    entry_points={"console_scripts": ["rbs-ppr=rbsppr.cli:main"]},
    setup_requires=["setuptools_scm"],
    include_package_data=True,
)
