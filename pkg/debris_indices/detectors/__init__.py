"""Built-in detectors

Each module defines a detector and its ``setup()`` entry point, with the
default configuration in the YAML file of the same name.
"""
