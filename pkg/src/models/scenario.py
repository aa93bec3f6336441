# src/models/scenario.py

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.agent.states import GaitName
from src.config import settings
from src.models.control import GaitSchedule, TwistCommand
from src.models.hopper import HopperParams
from src.models.mpc import MpcConfig

Vector3 = Tuple[float, float, float]


class StrictModel(BaseModel):
    """Базовая модель конфигурации: неизвестные ключи запрещены"""
    model_config = ConfigDict(extra='forbid')


class GaitSection(StrictModel):
    name: GaitName = GaitName.STAND
    period: Optional[float] = Field(default=None, gt=0)
    duty: Optional[float] = Field(default=None, gt=0, le=1)

    def schedule(self) -> GaitSchedule:
        return GaitSchedule.from_name(self.name.value, period=self.period, duty=self.duty)


class CommandSegment(StrictModel):
    """Отрезок постоянной команды скорости, действует с момента start"""
    start: float = Field(ge=0)
    vx: float = 0.0
    vy: float = 0.0
    yaw_rate: float = 0.0

    def twist(self) -> TwistCommand:
        return TwistCommand(vx=self.vx, vy=self.vy, yaw_rate=self.yaw_rate)


class Disturbance(StrictModel):
    """Мгновенный импульс, точка приложения задана в системе корпуса относительно ЦМ"""
    time: float = Field(ge=0)
    impulse: Vector3
    point: Vector3 = (0.0, 0.0, 0.0)


class Perturbation(StrictModel):
    mass_scale: float = Field(default=1.0, gt=0)
    inertia_scale: float = Field(default=1.0, gt=0)


class InitialState(StrictModel):
    height: float = Field(default=settings.NOMINAL_HEIGHT, gt=0)
    yaw: float = 0.0
    velocity: Vector3 = (0.0, 0.0, 0.0)


class Scenario(StrictModel):
    """Сценарий прогона четвероногого робота"""
    name: str = "scenario"
    gait: GaitSection = GaitSection()
    duration: float = Field(gt=0)
    segments: List[CommandSegment] = Field(default_factory=lambda: [CommandSegment(start=0.0)])
    disturbances: List[Disturbance] = Field(default_factory=list)
    perturbation: Perturbation = Perturbation()
    initial: InitialState = InitialState()
    foothold_heights: Optional[List[float]] = None

    @field_validator('segments')
    @classmethod
    def _segments_ordered(cls, segments: List[CommandSegment]) -> List[CommandSegment]:
        if not segments:
            raise ValueError("segments: нужен хотя бы один отрезок команды")
        for index in range(1, len(segments)):
            if segments[index].start <= segments[index - 1].start:
                raise ValueError(
                    f"segments[{index}].start = {segments[index].start} должно быть больше "
                    f"segments[{index - 1}].start = {segments[index - 1].start}")
        return segments

    @model_validator(mode='after')
    def _times_within_duration(self) -> 'Scenario':
        for index, segment in enumerate(self.segments):
            if segment.start >= self.duration:
                raise ValueError(
                    f"segments[{index}].start = {segment.start} вне длительности {self.duration}")
        for index, disturbance in enumerate(self.disturbances):
            if disturbance.time >= self.duration:
                raise ValueError(
                    f"disturbances[{index}].time = {disturbance.time} вне длительности {self.duration}")
        return self

    def segment_index(self, t: float) -> int:
        """Номер действующего отрезка; -1 до начала первого"""
        index = -1
        for i, segment in enumerate(self.segments):
            if t + 1e-12 >= segment.start:
                index = i
        return index

    def twist_at(self, t: float) -> TwistCommand:
        index = self.segment_index(t)
        return self.segments[index].twist() if index >= 0 else TwistCommand()

    def segment_bounds(self) -> List[Tuple[float, float]]:
        starts = [segment.start for segment in self.segments]
        return list(zip(starts, starts[1:] + [self.duration]))


class MpcSection(StrictModel):
    horizon: int = Field(default=settings.MPC_HORIZON, ge=1)
    dt: float = Field(default=settings.MPC_DT, gt=0, le=settings.MAX_DISCRETIZE_DT)
    state_weights: List[float] = Field(default_factory=lambda: list(settings.MPC_STATE_WEIGHTS))
    input_weights: Vector3 = (settings.MPC_INPUT_WEIGHT,) * 3
    friction: float = Field(default=settings.MPC_FRICTION, gt=0)
    f_min: float = Field(default=settings.MPC_F_MIN, ge=0)
    u_max: float = Field(default=settings.MPC_F_MAX, gt=0)
    state_bounds: Optional[Tuple[List[float], List[float]]] = None

    @field_validator('state_weights')
    @classmethod
    def _thirteen_weights(cls, weights: List[float]) -> List[float]:
        if len(weights) != 13:
            raise ValueError(f"state_weights: нужно 13 значений, получено {len(weights)}")
        return weights

    def to_config(self) -> MpcConfig:
        bounds = None
        if self.state_bounds is not None:
            bounds = (tuple(self.state_bounds[0]), tuple(self.state_bounds[1]))
        return MpcConfig(
            horizon=self.horizon, dt=self.dt,
            state_weights=tuple(self.state_weights), input_weights=self.input_weights,
            u_max=self.u_max, f_min=self.f_min, friction=self.friction, state_bounds=bounds,
        )


class SolverSection(StrictModel):
    tol: float = Field(default=settings.CONTROLLER_QP_TOL, gt=0)
    max_iters: int = Field(default=settings.CONTROLLER_QP_MAX_ITERS, ge=1)
    fallback_decay: float = Field(default=settings.FALLBACK_DECAY, ge=0, le=1)


class SwingSection(StrictModel):
    raibert_gain: float = settings.RAIBERT_GAIN
    height: float = Field(default=settings.SWING_HEIGHT, ge=0)
    kp: Vector3 = settings.SWING_KP
    kd: Vector3 = settings.SWING_KD


class SimSection(StrictModel):
    control_dt: float = Field(default=settings.CONTROL_DT, gt=0, le=settings.MAX_SIM_DT)
    foot_mass: float = Field(default=settings.FOOT_MASS, gt=0)


class QuadConfig(StrictModel):
    """Настройки контроллера и симулятора четвероногого робота"""
    mass: float = Field(default=settings.BODY_MASS, gt=0)
    inertia: Vector3 = settings.BODY_INERTIA_DIAG
    mpc: MpcSection = MpcSection()
    solver: SolverSection = SolverSection()
    swing: SwingSection = SwingSection()
    sim: SimSection = SimSection()


class HopperScenario(StrictModel):
    """Сценарий прогона прыгуна SLIP"""
    duration: float = Field(default=10.0, gt=0)
    dt: float = Field(default=settings.HOPPER_MAX_DT, gt=0, le=settings.HOPPER_MAX_DT)
    speed_ref: float = 0.0
    drop_height: float = Field(default=0.1, ge=0)
    initial_speed: float = 0.0
    rest_length: float = Field(default=settings.HOPPER_REST_LENGTH, gt=0)
    spring: float = Field(default=settings.HOPPER_SPRING, gt=0)
    thrust: float = Field(default=settings.HOPPER_THRUST, ge=0)
    mass: float = Field(default=settings.HOPPER_MASS, gt=0)
    inertia: float = Field(default=settings.HOPPER_INERTIA, gt=0)
    leg_damping: float = Field(default=settings.HOPPER_LEG_DAMPING, ge=0)
    speed_gain: float = settings.HOPPER_SPEED_GAIN
    speed_integral_gain: float = Field(default=settings.HOPPER_SPEED_INTEGRAL_GAIN, ge=0)
    attitude_kp: float = settings.HOPPER_ATTITUDE_KP
    attitude_kd: float = settings.HOPPER_ATTITUDE_KD
    servo_bandwidth: float = Field(default=settings.HOPPER_LEG_SERVO_BANDWIDTH, gt=0)
    servos_on: bool = True

    def params(self) -> HopperParams:
        return HopperParams(
            mass=self.mass, inertia=self.inertia, leg_damping=self.leg_damping,
            speed_gain=self.speed_gain, speed_integral_gain=self.speed_integral_gain,
            attitude_kp=self.attitude_kp,
            attitude_kd=self.attitude_kd, servo_bandwidth=self.servo_bandwidth,
            servos_on=self.servos_on,
        )


class RunConfig(StrictModel):
    """Полностью разрешенная конфигурация запуска CLI"""
    mode: Literal['quad', 'hopper', 'qp-bench'] = 'quad'
    scenario_path: Optional[str] = None
    out: str = "runs"
    overrides: List[str] = Field(default_factory=list)
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    plots: bool = False
    controller: QuadConfig = QuadConfig()
    scenario: Optional[Scenario] = None
    hopper: Optional[HopperScenario] = None

    @model_validator(mode='after')
    def _mode_fields_present(self) -> 'RunConfig':
        if self.mode == 'quad' and self.scenario is None:
            raise ValueError("scenario: обязателен в режиме quad")
        if self.mode == 'hopper' and self.hopper is None:
            raise ValueError("hopper: обязателен в режиме hopper")
        if self.mode == 'qp-bench' and self.scenario_path is None:
            raise ValueError("scenario_path: обязателен в режиме qp-bench")
        return self
