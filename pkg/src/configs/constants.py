import math

PI = math.pi
TWO_PI = 2.0 * math.pi

# Tolerancia numerica general (comparaciones de factibilidad, ventanas temporales)
EPS = 1e-9

# Marcador de difusion para receiver_id
BROADCAST = -1

VERSION = "1.0.0"
