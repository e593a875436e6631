from dataclasses import dataclass, field
from . import development as DEV
from . import constants as CONST
from . import comms as COMMS
from . import mpc as MPC
from . import cbf as CBF
from . import tasking as TASKING
from . import trace as TRACE

@dataclass
class DevelopmentConfig:
    DEBUG: bool = DEV.DEBUG
    LOG_LEVEL: str = DEV.LOG_LEVEL
    OUTPUT_DIR: str = DEV.OUTPUT_DIR
    OUTPUT_DIR_ENV: str = DEV.OUTPUT_DIR_ENV

@dataclass
class ConstantsConfig:
    PI: float = CONST.PI
    TWO_PI: float = CONST.TWO_PI
    EPS: float = CONST.EPS
    BROADCAST: int = CONST.BROADCAST
    VERSION: str = CONST.VERSION

@dataclass
class CommsConfig:
    MAGIC: bytes = COMMS.MAGIC
    WIRE_VERSION: int = COMMS.WIRE_VERSION
    MAX_PAYLOAD: int = COMMS.MAX_PAYLOAD
    DROP_PROBABILITY: float = COMMS.DROP_PROBABILITY
    HUB_HOST: str = COMMS.HUB_HOST
    HUB_PORT: int = COMMS.HUB_PORT
    SOCKET_TIMEOUT: float = COMMS.SOCKET_TIMEOUT

@dataclass
class MpcDefaults:
    BRANCHES: int = MPC.BRANCHES
    HORIZON: int = MPC.HORIZON
    ROBUST_HORIZON: int = MPC.ROBUST_HORIZON
    CANDIDATES: int = MPC.CANDIDATES
    ELITES: int = MPC.ELITES
    ITERATIONS: int = MPC.ITERATIONS
    PENALTY: float = MPC.PENALTY
    MIN_STD: float = MPC.MIN_STD
    ARRIVAL_FACTOR: float = MPC.ARRIVAL_FACTOR

@dataclass
class CbfDefaults:
    LAMBDA: float = CBF.LAMBDA
    SMOOTH_MIN_KAPPA: float = CBF.SMOOTH_MIN_KAPPA
    GAMMA_ETA: float = CBF.GAMMA_ETA
    GAMMA_MIN: float = CBF.GAMMA_MIN
    RISK_BARRIER_REF: float = CBF.RISK_BARRIER_REF
    DELTA_MAX: float = CBF.DELTA_MAX
    QP_TOL: float = CBF.QP_TOL

@dataclass
class TaskingDefaults:
    RISK_THRESHOLD: float = TASKING.RISK_THRESHOLD
    RISK_SAMPLES: int = TASKING.RISK_SAMPLES
    WALL_MARGIN: float = TASKING.WALL_MARGIN
    AWARD_DELAY: int = TASKING.AWARD_DELAY
    APPROACH_INSET: float = TASKING.APPROACH_INSET
    ROBOT_RADIUS: float = TASKING.ROBOT_RADIUS

@dataclass
class TraceConfig:
    SCHEMA_VERSION: str = TRACE.SCHEMA_VERSION
    SCHEMA_MAJOR: int = TRACE.SCHEMA_MAJOR
    COLUMNS: tuple = field(default_factory=lambda: tuple(TRACE.COLUMNS))
    HEADER_PREFIX: str = TRACE.HEADER_PREFIX
    FOOTER_PREFIX: str = TRACE.FOOTER_PREFIX
    RISK_CONFIDENCE: float = TRACE.RISK_CONFIDENCE

class Config:
    DEV: DevelopmentConfig
    CONST: ConstantsConfig
    COMMS: CommsConfig
    MPC: MpcDefaults
    CBF: CbfDefaults
    TASKING: TaskingDefaults
    TRACE: TraceConfig

    def __init__(self):
        self.DEV = DevelopmentConfig()
        self.CONST = ConstantsConfig()
        self.COMMS = CommsConfig()
        self.MPC = MpcDefaults()
        self.CBF = CbfDefaults()
        self.TASKING = TaskingDefaults()
        self.TRACE = TraceConfig()

CONF = Config()
