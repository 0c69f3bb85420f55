"""Mixed Chinese Postman and properly balanced subgraph toolkit."""

__version__ = "0.1.0"
