# Copyright 2026 the quadwind Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""quadwind PyPI package setup."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

try:
  import setuptools
except ImportError:
  from ez_setup import use_setuptools
  use_setuptools()
  import setuptools

setuptools.setup(
    name='quadwind',
    version='1.0',
    description='Wind estimation for quadcopters with an LSTM network.',
    long_description=(
        'Simulate a PID-controlled quadcopter flying through Dryden, spectral, '
        'piecewise-constant or gridded wind; train an LSTM network to read the '
        'horizontal wind off the position and attitude log; compare it with '
        'the wind triangle using covariance-distance and normalized error '
        'metrics.'),
    author='The quadwind authors',
    license='Apache 2.0',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Scientific/Engineering :: Atmospheric Science',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    keywords=(
        'quadcopter '
        'uav '
        'wind estimation '
        'dryden turbulence '
        'lstm'),

    install_requires=[
        'numpy>=1.20',
        'scipy>=1.4',
        'six',
        'PyYAML>=5.1',
    ],

    packages=setuptools.find_packages(),
    package_data={'quadwind': ['configs/*.yaml']},
    zip_safe=False,
    entry_points={
        'console_scripts': [
            'quadwind = quadwind.cli:main',
        ],
    },

    test_suite='quadwind.tests',
)
