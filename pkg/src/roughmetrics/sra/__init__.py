"""SRA, ultrametric and UNC conditions with their closed-form constants."""
