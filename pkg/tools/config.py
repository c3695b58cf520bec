"""
Configuration classes.
A scenario is a tree of UPPERCASE attributes loaded from YAML files. The
tree is built from base_config.yml and then overridden by experiment
files, which may only redefine keys that already exist in the base file.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import copy
import logging
import os

import yaml

from xlmimo.utils.exceptions import ConfigError


DEFAULT_CONFIG_FN = os.path.join(os.path.dirname(__file__), '..', 'xlmimo',
                                 'config', 'base_config.yml')


class ConfigNode():
    """Empty object where each instance stores the attributes of one
    subtree of the configuration. Every node points to the root of its
    tree so the whole tree can be frozen at once.
    """
    def __init__(self, root=None):
        self.__dict__['_root'] = self if root is None else root

    def __setattr__(self, name, value):
        if self._root._frozen:
            raise ConfigError('Configuration is frozen.')
        self.__dict__[name] = value

    def __deepcopy__(self, memo):
        root = memo.get(id(self._root))
        node = type(self).__new__(type(self))
        memo[id(self)] = node
        if root is None:
            root = node if self._root is self else \
                copy.deepcopy(self._root, memo)
        node.__dict__['_root'] = root
        for name, value in self.__dict__.items():
            if name == '_root':
                continue
            node.__dict__[name] = copy.deepcopy(value, memo)
        return node


class ScenarioConfig(ConfigNode):
    """Stores the configuration of one scenario.
    Usage:
        Initialization:
            config = ScenarioConfig.load_default()
            config.merge(other_fn)
            config.freeze()
        Get:
            config.ATTRIBUTE1.ATTRIBUTE1_1
        Sweep:
            config.with_value('GEOMETRY.M', 64)
    """
    def __init__(self):
        self.__dict__['_frozen'] = False
        self.__dict__['_default_loaded'] = False
        super().__init__()

    @classmethod
    def load_default(cls, config_fn=DEFAULT_CONFIG_FN):
        """Creates a configuration holding the values of config_fn.

        Args:
            config_fn: PATH to YAML file containing the base configuration.
        """
        config = cls()
        config._load(config_fn)
        config.__dict__['_default_loaded'] = True
        return config

    def merge(self, config_fn):
        """Merge configuration present at config_fn into this tree.

        Args:
            config_fn: YAML file containing configuration.
        """
        if not self._default_loaded:
            raise ConfigError('Default configuration should be loaded '
                              'before loading actual configurations')
        self._load(config_fn)

    def merge_dict(self, config_dict):
        """Same as merge, for an already parsed dictionary."""
        if not self._default_loaded:
            raise ConfigError('Default configuration should be loaded '
                              'before loading actual configurations')
        self._build_config_tree(self, config_dict)

    def freeze(self):
        """Blocks the configuration so it cannot be modified. Used to prevent
        changes in the configuration during execution."""
        self.__dict__['_frozen'] = True

    def unfreeze(self):
        """Unblocks the configuration to be changed."""
        self.__dict__['_frozen'] = False

    @property
    def frozen(self):
        return self._frozen

    def get(self, path):
        """Returns the value at a dotted path, e.g. 'GEOMETRY.M'."""
        node = self
        for name in path.split('.'):
            if not hasattr(node, name):
                raise ConfigError(f"Attribute {path} not defined in "
                                  f"base_config.yml")
            node = getattr(node, name)
        return node

    def with_value(self, path, value):
        """Returns a copy of this configuration where the attribute at a
        dotted path holds value. The copy keeps the frozen state."""
        config = copy.deepcopy(self)
        frozen = config.frozen
        config.unfreeze()
        *parents, leaf = path.split('.')
        node = config.get('.'.join(parents)) if parents else config
        if not hasattr(node, leaf):
            raise ConfigError(f"Attribute {path} not defined in "
                              f"base_config.yml")
        setattr(node, leaf, value)
        if frozen:
            config.freeze()
        return config

    def to_dict(self):
        """Recursively convert to dictionary."""
        return _to_dict(self)

    def display(self):
        """Logs the configuration tree."""
        logging.debug(f"Configuration:\n{yaml.safe_dump(self.to_dict())}")

    def dump(self, filename):
        with open(filename, 'w') as output_file:
            yaml.safe_dump(self.to_dict(), output_file)

    def _load(self, config_fn):
        """Load configurations in config_fn into this tree.

        Args:
            config_fn: YAML file containing configuration.
        """
        try:
            with open(config_fn) as stream:
                config_dict = yaml.safe_load(stream)
        except OSError as err:
            raise ConfigError(f"Cannot read {config_fn}: {err}") from err
        except yaml.YAMLError as err:
            raise ConfigError(f"Malformed YAML in {config_fn}: {err}") \
                from err

        self._build_config_tree(self, config_dict or {})

    def _build_config_tree(self, parent, value):
        """Convert a dictionary to attributes in a tree-fashion. The root
        object is this configuration.
        Note: Recursive function.
        Args:
            parent: node where attributes are created.
            value: value to be inserted into parent.
        """
        if not isinstance(value, dict):
            raise ConfigError(f"Expected a mapping, got {value!r}")
        for child_name, child_value in value.items():
            if isinstance(child_value, dict):
                if not hasattr(parent, child_name):
                    if self._default_loaded:
                        raise ConfigError(f"Attribute {child_name} not "
                                          f"defined in base_config.yml")
                    setattr(parent, child_name, ConfigNode(self))
                child_node = getattr(parent, child_name)
                if not isinstance(child_node, ConfigNode):
                    raise ConfigError(f"Attribute {child_name} is not a "
                                      f"section")
                self._build_config_tree(child_node, child_value)
            else:
                if self._default_loaded and not hasattr(parent, child_name):
                    raise ConfigError(f"Attribute {child_name} not "
                                      f"defined in base_config.yml")
                setattr(parent, child_name, child_value)


def _to_dict(node):
    if not isinstance(node, ConfigNode):
        return node
    return {name: _to_dict(child) for name, child in node.__dict__.items()
            if not name.startswith('_')}
