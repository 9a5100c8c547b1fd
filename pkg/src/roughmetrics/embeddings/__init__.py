"""Isometric and bi-Lipschitz embeddings with distortion measurement."""
