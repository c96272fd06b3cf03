import os
import sys

from setuptools import setup, find_packages

entry_points = {
    'console_scripts': [
        "ghnx = ghnx.scripts.ghnx:entry_point",
    ]
}

install_reqs = [
    'numpy',
    'scipy',
    'pyyaml',
    'pytest',
]

setup(
    name = 'ghnx',
    description = 'graph hypernetworks for neural architecture search',
    classifiers = [
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        ],
    packages = find_packages(include=["ghnx", "ghnx.*"]),
    install_requires = install_reqs,
    entry_points = entry_points,
    )
