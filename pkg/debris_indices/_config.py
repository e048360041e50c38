#
#  Copyright (C) 2026 The debris-indices authors
#
#  This program is free software; you can redistribute it and/or
#  modify it under the terms of the GNU Lesser General Public
#  License as published by the Free Software Foundation; either
#  version 2 of the License, or (at your option) any later version.
#
#  This library is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
#  Lesser General Public License for more details.
#
#  You should have received a copy of the GNU Lesser General Public
#  License along with this library. If not, see <http://www.gnu.org/licenses/>.

"""Configuration loading helpers

Run configurations, label mappings, water references, scene specs and the
YAML defaults shipped with the package all go through this module. Files are
parsed by extension:

* ``.json`` with :mod:`json`
* ``.yaml`` / ``.yml`` with ``ruamel.yaml`` (safe loader)
* ``.toml`` with ``pytoml``
"""

import copy
import json
import os

import pytoml
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from ._exceptions import ConfigError, ConfigErrorReason


DATA_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), 'data')

_NO_DEFAULT = object()


def _yaml_loader():
    return YAML(typ='safe', pure=True)


# load_file()
#
# Load a configuration file into plain python dicts and lists
#
# Args:
#    path (str): The file to load
#
# Returns:
#    (dict|list): The loaded data
#
# Raises:
#    (ConfigError): If the file is missing or cannot be parsed
#
def load_file(path):
    _, ext = os.path.splitext(path)
    ext = ext.lower()

    try:
        with open(path, 'r') as f:
            if ext == '.json':
                return json.load(f)
            elif ext in ('.yaml', '.yml'):
                return _yaml_loader().load(f)
            elif ext == '.toml':
                return pytoml.load(f)
            else:
                raise ConfigError("Unsupported configuration file type '{}': {}".format(ext, path),
                                  reason=ConfigErrorReason.INVALID_DATA)
    except FileNotFoundError as e:
        raise ConfigError("Could not find configuration file: {}".format(path),
                          reason=ConfigErrorReason.MISSING_FILE) from e
    except json.JSONDecodeError as e:
        raise ConfigError("Malformed JSON file: {}".format(path), detail=str(e),
                          reason=ConfigErrorReason.INVALID_DATA) from e
    except YAMLError as e:
        raise ConfigError("Malformed YAML file: {}".format(path), detail=str(e),
                          reason=ConfigErrorReason.INVALID_DATA) from e
    except pytoml.core.TomlError as e:
        raise ConfigError("Malformed TOML file: {}".format(path), detail=str(e),
                          reason=ConfigErrorReason.INVALID_DATA) from e
    except OSError as e:
        raise ConfigError("Could not read configuration file {}: {}".format(path, e),
                          reason=ConfigErrorReason.MISSING_FILE) from e


# load_data()
#
# Load one of the YAML files shipped in the package data directory
#
# Args:
#    filename (str): The basename of the data file
#
def load_data(filename):
    return load_file(os.path.join(DATA_DIR, filename))


# composite()
#
# Deep merge ``overrides`` on top of ``base``. Dictionaries are
# merged recursively, any other value replaces the base value.
#
# Args:
#    base (dict): The underlying configuration
#    overrides (dict|None): The configuration to composite on top
#
# Returns:
#    (dict): A new dictionary, neither input is modified
#
def composite(base, overrides):
    result = copy.deepcopy(base)
    if not overrides:
        return result

    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = composite(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


# node_validate()
#
# Ensure that a configuration node only contains known keys
#
# Args:
#    node (dict): The node to validate
#    valid_keys (list): The accepted keys
#    path (str): The key path of the node, for error reporting
#
def node_validate(node, valid_keys, path=None):
    if not isinstance(node, dict):
        raise ConfigError("{}: Expected a dictionary".format(path or 'configuration'),
                          reason=ConfigErrorReason.INVALID_DATA)

    invalid = [key for key in node if key not in valid_keys]
    if invalid:
        raise ConfigError("{}: Unexpected key(s): {}".format(path or 'configuration', ', '.join(sorted(invalid))),
                          detail="Valid keys are: {}".format(', '.join(valid_keys)),
                          reason=ConfigErrorReason.INVALID_KEY)


# node_get_member()
#
# Fetch a typed value from a configuration node
#
# Args:
#    node (dict): The node to read from
#    expected_type (type): The expected type of the value
#    key (str): The key to look up
#    default: The value to return if the key is missing, if not
#             provided the key is mandatory
#    path (str): The key path of the node, for error reporting
#
# Returns:
#    The value, converted to ``expected_type`` where this is lossless
#
def node_get_member(node, expected_type, key, default=_NO_DEFAULT, path=None):
    keypath = key if path is None else '{}.{}'.format(path, key)

    if key not in node or node[key] is None:
        if default is _NO_DEFAULT:
            raise ConfigError("{}: Missing required key".format(keypath),
                              reason=ConfigErrorReason.INVALID_KEY)
        return default

    value = node[key]

    # Integers are acceptable wherever floats are expected
    if expected_type is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)

    if expected_type is int and isinstance(value, bool):
        value = None

    if not isinstance(value, expected_type):
        raise ConfigError("{}: Value of type '{}' is not of expected type '{}'"
                          .format(keypath, type(node[key]).__name__, expected_type.__name__),
                          reason=ConfigErrorReason.INVALID_VALUE)

    return value
