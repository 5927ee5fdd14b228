from ._core import (
    IoError,
    LinkGeometry,
    Measurement,
    NoiseModel,
    NumericalError,
    SoilState,
    TrainedModel,
    ValidationError,
    attenuation_constant,
    decode_packet,
    default_config_json,
    encode_packet,
    mean_absolute_error,
    median_power,
    mix_permittivity,
    path_loss,
    predict,
    r_squared,
    read_log,
    read_vwc,
    report,
    simulate,
    sweep_curve,
    synth_rssi,
    train,
    write_log,
)

__version__ = "0.1.0"
