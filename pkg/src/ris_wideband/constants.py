"""Physical constants and unit conversions."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def db_to_linear(db: float) -> float:
    """Power ratio from dB."""
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    import math

    return 10.0 * math.log10(x)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watt_to_dbm(w: float) -> float:
    import math

    return 10.0 * math.log10(w / 1e-3)
