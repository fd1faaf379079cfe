#!/usr/bin/env python3

from setuptools import setup

setup(
    name="fbsim",
    version="1.0.0b1",
    description='Forward backward similarity search on graphs',
    long_description="""Node similarity search with forward backward similarity (personalized PageRank
    from the query and back to it on the reversed graph), the usual baselines, and the
    community, link prediction and graded relevance evaluations""",
    license='GPL-3.0',
    classifiers=[
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'License :: OSI Approved :: GNU General Public License (GPL)',
        'Programming Language :: Python :: 3',
    ],
    keywords='graph similarity pagerank link prediction community ',
    packages=["fbsim"],
    install_requires=['requests', 'numpy', 'scipy', 'networkx>=2.8', 'scikit-learn'],
    extras_require={'tests': ['pytest']},
    python_requires='>=3.9',
    entry_points={'console_scripts': ['fbsim=fbsim.cli:main']},
    package_data={},
    data_files=[],
)
