from setuptools import setup

setup(
    name='giat_grouping',
    version='0.1.0',
    description='Variable interaction detection and grouping for large-scale black-box optimisation',
    author='',
    author_email='',
    license='MIT',
    packages=['giat_grouping'],
    package_data={'giat_grouping': ['data/*.json']},
    python_requires='>=3.10',
    install_requires=[
        'numpy',
        'rich'
    ],
    extras_require={
        'test': ['pytest']
    },
    entry_points={
        'console_scripts': ['giat-grouping=giat_grouping.cli:main']
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Utilities'
    ],
)
