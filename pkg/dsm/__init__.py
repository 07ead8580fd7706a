# info
__version__ = "0.1.0"
__status__ = "Development"
