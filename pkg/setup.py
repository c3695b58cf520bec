from setuptools import find_namespace_packages, setup

setup(
    name='xlmimo',
    author='Jean Da Rolt',
    packages=find_namespace_packages(include=['xlmimo*', 'tools']),
    package_data={'xlmimo.config': ['*.yml', 'presets/*.yml']},
    install_requires=['numpy>=1.22', 'scipy', 'PyYAML'],
    python_requires='>=3.8')
