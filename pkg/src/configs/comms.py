# Cabecera de trama: magic(4) + version(1) + kind(1) + length(4, big-endian)
MAGIC = b"SAWF"
WIRE_VERSION = 1

# Tamano maximo del cuerpo de una trama (bytes)
MAX_PAYLOAD = 65536

# Probabilidad de descarte por defecto (entrega fiable)
DROP_PROBABILITY = 0.0

# Hub TCP por defecto
HUB_HOST = "127.0.0.1"
HUB_PORT = 0

# Timeout de sockets (segundos)
SOCKET_TIMEOUT = 2.0
