"""Martingale-posterior sampling with set-transformer predictive models and
one-shot federated protocols (consensus averaging, consensus MP, and
compressed-embedding MP with a meta-trained embedder)."""

__version__ = "0.1.0"
