# src/config/settings.py

# Порядок ног во всех модулях
LEG_NAMES = ("FL", "FR", "RL", "RR")

# Параметры корпуса (класс Mini Cheetah, подобраны вручную)
BODY_MASS = 9.0                                  # кг
BODY_INERTIA_DIAG = (0.07, 0.26, 0.242)          # кг·м², в системе корпуса
GRAVITY = (0.0, 0.0, 9.81)                       # м/с², вычитается из суммы сил
HIP_OFFSETS = (
    (0.19, 0.049, 0.0),    # FL
    (0.19, -0.049, 0.0),   # FR
    (-0.19, 0.049, 0.0),   # RL
    (-0.19, -0.049, 0.0),  # RR
)
NOMINAL_HEIGHT = 0.28                            # м

# Кинематика ноги: abad, hip, knee
ABAD_LINK = 0.062
UPPER_LINK = 0.209
LOWER_LINK = 0.195
KNEE_LIMITS = (-2.7, -0.1)                       # рад, колено "вперед"

# Интегратор
MAX_SIM_DT = 0.01
MAX_DISCRETIZE_DT = 0.1

# MPC
MPC_HORIZON = 10
MPC_DT = 0.025
MPC_STATE_WEIGHTS = (0.25, 0.25, 10.0,   # roll, pitch, yaw
                     2.0, 2.0, 50.0,     # x, y, z
                     0.0, 0.0, 0.3,      # wx, wy, wz
                     0.2, 0.2, 0.1,      # vx, vy, vz
                     0.0)                # гравитационное состояние
MPC_INPUT_WEIGHT = 1e-6                         # при N = 1 сравним с Q·(dt/m)², опора меньше m·g
MPC_FRICTION = 0.6
MPC_F_MIN = 0.0
MPC_F_MAX = 150.0

# QP решатель (ADMM)
QP_RHO_SCALE = 0.1
QP_ALPHA = 1.6
QP_SIGMA = 1e-9
QP_TOL = 1e-6
QP_MAX_ITERS = 10000
QP_STALL_ITERS = 1000
QP_EQUALITY_RHO_FACTOR = 1e3
QP_FREE_RHO_FACTOR = 1e-6

# Параметры контроллера ног
CONTROL_DT = 0.001
CONTROLLER_QP_TOL = 1e-5
CONTROLLER_QP_MAX_ITERS = 4000
FALLBACK_DECAY = 0.9
RAIBERT_GAIN = 0.03                              # с
SWING_HEIGHT = 0.08                              # м
SWING_KP = (700.0, 700.0, 700.0)                 # Н/м
SWING_KD = (20.0, 20.0, 20.0)                    # Н·с/м
FOOT_MASS = 0.2                                  # кг, только для симуляции переноса

# Встроенные походки: период (с), фазовые сдвиги FL, FR, RL, RR, коэффициент опоры
GAITS = {
    "stand": {"period": 0.4, "offsets": (0.0, 0.0, 0.0, 0.0), "duty": 1.0},
    "trot": {"period": 0.4, "offsets": (0.0, 0.5, 0.5, 0.0), "duty": 0.5},
    "pace": {"period": 0.4, "offsets": (0.0, 0.5, 0.0, 0.5), "duty": 0.5},
    "bound": {"period": 0.4, "offsets": (0.0, 0.0, 0.5, 0.5), "duty": 0.5},
    "pronk": {"period": 0.4, "offsets": (0.0, 0.0, 0.0, 0.0), "duty": 0.6},
}

# Критерии падения
FALL_HEIGHT_RATIO = 0.4
FALL_TILT = 0.8                                  # рад

# Прыгун SLIP (значения выбраны вручную)
HOPPER_MASS = 10.0
HOPPER_INERTIA = 0.5
HOPPER_REST_LENGTH = 0.5
HOPPER_SPRING = 4000.0
HOPPER_THRUST = 0.02
HOPPER_SPEED_GAIN = 0.05
HOPPER_SPEED_INTEGRAL_GAIN = 0.01                # м на (м/с·прыжок)
HOPPER_SPEED_INTEGRAL_BAND = 0.3                 # м/с, интегрируем только малые ошибки
HOPPER_SPEED_INTEGRAL_LIMIT = 0.05               # м, предел поправки к смещению стопы
HOPPER_LEG_DAMPING = 20.0
HOPPER_ATTITUDE_KP = 150.0
HOPPER_ATTITUDE_KD = 15.0
HOPPER_LEG_SERVO_BANDWIDTH = 30.0                # рад/с
HOPPER_MAX_DT = 5e-4
HOPPER_EVENT_TOL = 1e-9

# Токовый контур FOC
FOC_VOLTAGE_LIMIT = 24.0
FOC_DT = 5e-5

# Логирование
LOG_ENV_VAR = "QUADMPC_LOG"
DEFAULT_LOG_LEVEL = "WARNING"
