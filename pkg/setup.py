from setuptools import setup, find_packages


setup(
    name='shadowpy',
    version='0.1.0',

    description='synthetic portrait shadow datasets and evaluation tools',
    author='Adam Green',
    author_email='adam.green@adgefficiency.com',
    url='http://www.adgefficiency.com/',

    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={'shadowpy': ['examples/*.yaml']},

    setup_requires=['pytest-runner'],
    tests_require=['pytest', 'hypothesis'],
    install_requires=[
        'Click',
        'numpy',
        'scipy',
        'opencv-python',
        'scikit-image',
        'pandas',
        'pyyaml',
        'tqdm',
    ],
    entry_points='''
            [console_scripts]
            shadowpy=shadowpy.experiments.cli:cli
        '''
)
