#! /usr/bin/env python

from setuptools import setup, find_packages


def parse_requirements(req_file):
    reqs = open(req_file).read().strip().split("\n")
    reqs = [r for r in reqs if r and not r.startswith("#")]
    return [r for r in reqs if "#egg=" not in r]


# Requirements
requirements = parse_requirements("requirements.txt")
requirements_test = parse_requirements("requirements/requirements.test.txt")

long_description = open("README.md").read()


# setup
setup(
    name="isoq",
    packages=find_packages(exclude=["tests", "tests.*"]),
    use_scm_version={
        "write_to": "isoq/_version.py",
        "write_to_template": '__version__ = "{version}"\n',
    },
    entry_points={"console_scripts": ["isoq = isoq.pipeline:main"]},
    description="Exact desk-scale simulations of one-pass measurements on isolated qubits.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.8",
        "License :: OSI Approved :: "
        "GNU General Public License v3 or later (GPLv3+)",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    keywords="quantum information, isolated qubits, one-time memory, "
    "data hiding, LOCC, simulation",
    license="GPL3",
    python_requires=">=3.8",
    setup_requires=["setuptools_scm"],
    install_requires=requirements,
    tests_require=requirements_test,
    extras_require={"testing": requirements_test},
    package_data={"isoq": ["config/default.yaml"]},
)
