"""Constants, index iteration, triple coloring and SRA subset extraction."""
