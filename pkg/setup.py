from setuptools import find_packages, setup

package_name = 'taf_system'

setup(
    name=package_name,
    version='0.1.0',
    packages=find_packages(exclude=['test']),
    data_files=[
        ('share/' + package_name + '/config',
            ['config/pipeline_settings.yaml', 'config/pos_lexicon.yaml']),
    ],
    install_requires=[
        'numpy>=1.21.0',
        'pandas>=1.3.0',
        'PyYAML>=5.4.0',
        'tqdm>=4.62.0',
        'colorlog>=6.6.0',
    ],
    python_requires='>=3.8',
    zip_safe=True,
    description='Translate-and-fill and translate-align-project silver data for semantic parsing',
    license='Apache-2.0',
    tests_require=['pytest', 'flake8'],
    entry_points={
        'console_scripts': [
            'taf-system = taf_system.main:main',
        ],
    },
)
