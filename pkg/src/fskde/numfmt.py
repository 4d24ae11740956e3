def fmt(x) -> str:
    """17 significant digits, enough to round-trip any float64."""
    return format(float(x), ".17g")
