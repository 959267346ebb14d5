SPEED_OF_LIGHT = 299_792_458.0  # m/s
EARTH_RADIUS_KM = 6371.0
MU_EARTH = 398_600.4418  # km^3/s^2
SIDEREAL_DAY_S = 86_164.0
