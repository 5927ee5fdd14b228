import json
import math

import pytest

import smol


def test_permittivity_bounds():
    assert smol.mix_permittivity(smol.SoilState.pure_air()) == pytest.approx(1 + 0j)
    eps = smol.mix_permittivity(smol.SoilState.pure_water())
    assert eps.real == pytest.approx(80.0)
    assert eps.imag == pytest.approx(-4.5)


def test_wetter_soil_loses_more():
    g = smol.LinkGeometry(receiver_height_cm=195.0)
    losses = [smol.path_loss(smol.SoilState(vwc=v), g) for v in (0.05, 0.2, 0.4)]
    assert losses == sorted(losses)
    curve = smol.sweep_curve(smol.SoilState(vwc=0.2), g, [5, 10, 15])
    assert [p for p, _ in curve] == [5, 10, 15]
    assert curve[1][1] - curve[0][1] == pytest.approx(5.0)


def test_frame_round_trip():
    frame = smol.encode_packet(0x0102, 3, 22)
    assert frame == bytes([0x53, 0x01, 0x01, 0x02, 0x03, 0x16, 0x44])
    assert smol.decode_packet(frame) == (0x0102, 3, 22)
    bad = bytearray(frame)
    bad[6] ^= 1
    with pytest.raises(smol.ValidationError):
        smol.decode_packet(bytes(bad))
    with pytest.raises(ValueError):
        smol.encode_packet(1, 0, 24)


def test_metrics():
    assert smol.r_squared([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert smol.r_squared([2, 2], [1, 3]) is None
    assert smol.mean_absolute_error([0, 0], [1, -3]) == pytest.approx(2.0)
    assert smol.median_power(list(range(5, 23))) == 13


def test_tdr_reading_in_range():
    r = smol.read_vwc(smol.SoilState(vwc=0.25), seed=7)
    assert 22.0 <= r <= 28.0


def test_pipeline(tmp_path):
    cfg = json.loads(smol.default_config_json())
    rows = smol.simulate(json.dumps(cfg))
    assert len(rows) > 0 and all(math.isfinite(m.rssi_dbm) for m in rows)
    log = tmp_path / "log.csv"
    smol.write_log(log, rows)
    assert log.read_text().splitlines()[0] == (
        "timestamp,device_id,tx_power_dbm,rssi_dbm,height_cm,depth_cm,scenario,vwc_truth_pct")
    assert smol.read_log(log) == rows

    model_path = tmp_path / "model.json"
    model, r2, mae = smol.train(log, model_path, kind="linear")
    assert model.kind == "linear" and mae >= 0
    again = smol.TrainedModel.load(model_path)
    x = [rows[0].rssi_dbm, float(rows[0].tx_power_dbm)]
    assert again.predict(x) == model.predict(x)

    n = smol.predict(model_path, log, tmp_path / "pred.csv")
    assert n == len(rows)

    table_rows, text = smol.report(log)
    assert len(table_rows) == 6
    assert sum(r["best"] for r in table_rows) == 1
    assert "*" in text
