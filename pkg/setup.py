# *****************************************************************************
# *
# * Authors:     The scipion-bayesrisk contributors
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 3 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *****************************************************************************

"""A setuptools based setup module.
See:
https://packaging.python.org/en/latest/distributing.html
"""

# Always prefer setuptools over distutils
from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

from bayesrisk import __version__

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='scipion-bayesrisk',  # Required

    version=__version__,  # Required

    description='Bayesian financial risk experiments (volatility, VaR, '
                'fraud and compliance) as a Scipion plugin and a command '
                'line tool',  # Required

    long_description=long_description,  # Optional
    long_description_content_type='text/x-rst',

    author='The scipion-bayesrisk contributors',  # Optional

    classifiers=[  # Optional
        # How mature is this project? Common values are
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 4 - Beta',

        'Intended Audience :: Financial and Insurance Industry',

        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',

        'Programming Language :: Python :: 3'
    ],

    # Note that this is a string of words separated by whitespace, not a list.
    keywords='scipion bayesian finance risk volatility value-at-risk garch '
             'dlm fraud-detection particle-filter scipion-3.0',  # Optional

    packages=find_packages(),

    # The heavy lifting is numpy/scipy; pandas reads the transaction files
    # and matplotlib writes the SVG charts.
    install_requires=['scipion-pyworkflow',
                      'scipion-em',
                      'numpy',
                      'scipy',
                      'pandas',
                      'matplotlib'],

    python_requires='>=3.8',

    # The plugin entry point registers the protocols with Scipion; the
    # console script runs the same experiments without a project.
    entry_points={
        'pyworkflow.plugin': 'bayesrisk = bayesrisk',
        'console_scripts': ['bayesrisk = bayesrisk.cli:main'],
    },
)
