# -*- coding: utf-8 -*-
from setuptools import setup, find_packages

setup(
    name="b23-twinkernel",
    use_scm_version=True,
    setup_requires=['setuptools_scm'],
    packages=find_packages(exclude=['test*']),
    package_data={
        'twinkernel': ['logging.conf'],
    },
    include_package_data=True,
    install_requires=['numpy>=1.22.0', 'scipy>=1.8.0', 'pyyaml', 'tabulate'],
    author="David Kegley",
    author_email="kegs@b23.io",
    description="Group transported Mercer kernels and orthogonal series density estimators with numerical verification",
    keywords="b23 twinkernel kernel quadrature density estimation",
    url="https://b23.io",
    entry_points={
        'console_scripts': [
            'twinkernel=twinkernel.main:main',
        ],
    }
)
