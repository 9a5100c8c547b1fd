"""Ordered finite sets: rough self-contraction, medial SRA and bounded turning."""
