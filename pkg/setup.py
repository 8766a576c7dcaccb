import os
from setuptools import setup, find_packages


here = os.path.abspath(os.path.dirname(__file__))

try:
    README = open(os.path.join(here, 'README.rst')).read()
except:
    README = ''


setup(
    name='CoexistSim',
    version='0.1.0',
    license='BSD',
    description='Age and throughput optimizing networks sharing a collision channel: '
                'stage equilibria, repeated-game Monte Carlo and cooperation etiquette.',
    long_description=README,
    zip_safe=False,
    platforms='any',
    include_package_data=True,
    packages=find_packages(exclude=['tests']),
    package_data={'coexistsim': ['templates/*.cfg']},
    python_requires='>=3.7',
    install_requires=[
        'Flask>=1.0',
        'Blinker',
        'werkzeug',
        'Jinja2',
        'click>=7.0',
        'numpy>=1.17',
    ],
    extras_require={
        'tests': ['pytest'],
    },
    entry_points={
        'console_scripts': ['coexistsim=coexistsim.cli:main'],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering',
        'Topic :: System :: Networking',
    ]
)
