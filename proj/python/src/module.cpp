#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "smol/calibrate.hpp"
#include "smol/cli/campaign.hpp"
#include "smol/cli/commands.hpp"
#include "smol/cli/measurement_log.hpp"
#include "smol/errors.hpp"
#include "smol/groundtruth.hpp"
#include "smol/model_io.hpp"
#include "smol/soilchan.hpp"
#include "smol/sweepproto.hpp"

namespace py = pybind11;
using namespace smol;

namespace {

std::vector<double> predict_rows(const calibrate::TrainedModel& model,
                                 const std::vector<std::vector<double>>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(model.predict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Soil moisture from LoRa RSSI sweeps";

  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  // soilchan
  py::class_<soilchan::SoilState>(m, "SoilState")
      .def(py::init([](double vwc, double porosity, double solid) {
             soilchan::SoilState s;
             s.vwc = vwc;
             s.porosity = porosity;
             s.solid_permittivity = solid;
             return s;
           }),
           py::arg("vwc") = 0.0, py::arg("porosity") = 0.45, py::arg("solid_permittivity") = 5.0)
      .def_readwrite("vwc", &soilchan::SoilState::vwc)
      .def_readwrite("porosity", &soilchan::SoilState::porosity)
      .def_readwrite("solid_permittivity", &soilchan::SoilState::solid_permittivity)
      .def_static("pure_air", &soilchan::SoilState::pure_air)
      .def_static("pure_water", &soilchan::SoilState::pure_water);

  py::class_<soilchan::LinkGeometry>(m, "LinkGeometry")
      .def(py::init([](double depth, double height, double freq, double tx_gain, double rx_gain) {
             soilchan::LinkGeometry g;
             g.burial_depth_cm = depth;
             g.receiver_height_cm = height;
             g.carrier_frequency_hz = freq;
             g.tx_antenna_gain_db = tx_gain;
             g.rx_antenna_gain_db = rx_gain;
             return g;
           }),
           py::arg("burial_depth_cm") = 15.0, py::arg("receiver_height_cm") = 0.0,
           py::arg("carrier_frequency_hz") = soilchan::kDefaultFrequencyHz,
           py::arg("tx_antenna_gain_db") = 0.0, py::arg("rx_antenna_gain_db") = 0.0)
      .def_readwrite("burial_depth_cm", &soilchan::LinkGeometry::burial_depth_cm)
      .def_readwrite("receiver_height_cm", &soilchan::LinkGeometry::receiver_height_cm)
      .def_readwrite("carrier_frequency_hz", &soilchan::LinkGeometry::carrier_frequency_hz);

  py::class_<soilchan::NoiseModel>(m, "NoiseModel")
      .def(py::init([](double sigma, bool quantize, std::uint64_t seed) {
             return soilchan::NoiseModel{.rssi_sigma_db = sigma, .quantize = quantize, .seed = seed};
           }),
           py::arg("rssi_sigma_db") = 2.0, py::arg("quantize") = true, py::arg("seed") = 0)
      .def_readwrite("rssi_sigma_db", &soilchan::NoiseModel::rssi_sigma_db)
      .def_readwrite("quantize", &soilchan::NoiseModel::quantize)
      .def_readwrite("seed", &soilchan::NoiseModel::seed)
      .def_static("none", &soilchan::NoiseModel::none);

  m.def("mix_permittivity",
        [](const soilchan::SoilState& s) { return soilchan::mix_permittivity(s).as_complex(); },
        "Effective permittivity as a complex number real - j*imag.");
  m.def("attenuation_constant",
        [](std::complex<double> eps, double f) {
          return soilchan::attenuation_constant({eps.real(), -eps.imag()}, f);
        },
        py::arg("eps"), py::arg("frequency_hz") = soilchan::kDefaultFrequencyHz);
  m.def("path_loss", &soilchan::path_loss);
  m.def("synth_rssi", &soilchan::synth_rssi, py::arg("tx_power_dbm"), py::arg("soil"),
        py::arg("geometry"), py::arg("noise") = soilchan::NoiseModel::none());
  m.def("sweep_curve",
        [](const soilchan::SoilState& s, const soilchan::LinkGeometry& g, std::vector<int> powers,
           const soilchan::NoiseModel& n) {
          std::vector<std::pair<int, double>> out;
          for (const auto& p : soilchan::sweep_curve(s, g, powers, n)) {
            out.emplace_back(p.tx_power_dbm, p.rssi_dbm);
          }
          return out;
        },
        py::arg("soil"), py::arg("geometry"), py::arg("powers_dbm"),
        py::arg("noise") = soilchan::NoiseModel::none());

  // sweepproto
  m.def("encode_packet", [](std::uint16_t id, std::uint8_t seq, std::int8_t tx) {
    const auto f = sweepproto::encode_packet({id, seq, tx});
    return py::bytes(reinterpret_cast<const char*>(f.data()), f.size());
  }, py::arg("device_id"), py::arg("sequence"), py::arg("tx_power_dbm"));
  m.def("decode_packet", [](const py::bytes& b) {
    const std::string s = b;
    const auto p = sweepproto::decode_packet(
        std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    return py::make_tuple(p.device_id, p.sequence, p.tx_power_dbm);
  });
  m.def("median_power", [](std::vector<int> levels) { return sweepproto::median_power(levels); });

  py::class_<sweepproto::Measurement>(m, "Measurement")
      .def(py::init<>())
      .def_readwrite("timestamp", &sweepproto::Measurement::timestamp)
      .def_readwrite("device_id", &sweepproto::Measurement::device_id)
      .def_readwrite("tx_power_dbm", &sweepproto::Measurement::tx_power_dbm)
      .def_readwrite("rssi_dbm", &sweepproto::Measurement::rssi_dbm)
      .def_readwrite("height_cm", &sweepproto::Measurement::height_cm)
      .def_readwrite("depth_cm", &sweepproto::Measurement::depth_cm)
      .def_readwrite("scenario", &sweepproto::Measurement::scenario)
      .def_readwrite("vwc_truth_pct", &sweepproto::Measurement::vwc_truth_pct)
      .def("__eq__", [](const sweepproto::Measurement& a, const sweepproto::Measurement& b) { return a == b; });

  // groundtruth
  m.def("read_vwc",
        [](const soilchan::SoilState& s, double error_bound, int spots, std::uint64_t seed) {
          groundtruth::TdrSensor t;
          t.error_bound = error_bound;
          t.spots = spots;
          t.seed = seed;
          return groundtruth::read_vwc(t, s);
        },
        py::arg("soil"), py::arg("error_bound") = 0.03, py::arg("spots") = 10, py::arg("seed") = 0,
        "Averaged TDR reading in percent.");

  // calibrate
  py::class_<calibrate::TrainedModel>(m, "TrainedModel")
      .def_property_readonly("kind", [](const calibrate::TrainedModel& t) { return calibrate::to_string(t.spec().kind); })
      .def_property_readonly("mode", [](const calibrate::TrainedModel& t) { return calibrate::to_string(t.mode()); })
      .def_property_readonly("feature_names", &calibrate::TrainedModel::feature_names)
      .def_property_readonly("median_power_dbm", &calibrate::TrainedModel::median_power_dbm)
      .def("predict", [](const calibrate::TrainedModel& t, std::vector<double> x) { return t.predict(x); })
      .def("predict_many", &predict_rows)
      .def("to_json", &calibrate::model_to_json)
      .def_static("from_json", &calibrate::model_from_json)
      .def("save", [](const calibrate::TrainedModel& t, const std::filesystem::path& p) { calibrate::save_model(t, p); })
      .def_static("load", &calibrate::load_model);

  m.def("r_squared", [](std::vector<double> t, std::vector<double> p) { return calibrate::r_squared(t, p); });
  m.def("mean_absolute_error", [](std::vector<double> t, std::vector<double> p) {
    return calibrate::mean_absolute_error(t, p);
  });

  // campaign and commands
  m.def("default_config_json", [] { return cli::config_to_json(cli::CampaignConfig::lab_default()); });
  m.def("simulate",
        [](const std::string& config_json) {
          const auto cfg = config_json.empty() ? cli::CampaignConfig::lab_default()
                                               : cli::config_from_json(config_json);
          return cli::simulate_campaign(cfg).measurements;
        },
        py::arg("config_json") = "");
  m.def("read_log", py::overload_cast<const std::filesystem::path&>(&cli::read_log));
  m.def("write_log", py::overload_cast<const std::filesystem::path&, const std::vector<sweepproto::Measurement>&>(&cli::write_log));

  m.def("train",
        [](const std::filesystem::path& log, const std::filesystem::path& out, const std::string& kind,
           const std::string& mode, std::uint64_t split_seed, std::uint64_t model_seed) {
          cli::TrainOptions o;
          o.spec.kind = calibrate::model_kind_from_string(kind);
          o.spec.seed = model_seed;
          o.mode = calibrate::feature_mode_from_string(mode);
          o.split.seed = split_seed;
          auto r = cli::cmd_train(log, o, out);
          return py::make_tuple(std::move(r.model), r.evaluation.r_squared, r.evaluation.mae);
        },
        py::arg("log"), py::arg("model_out"), py::arg("kind") = "random_forest",
        py::arg("mode") = "all_tx", py::arg("split_seed") = 0, py::arg("model_seed") = 0);
  m.def("predict", &cli::cmd_predict, py::arg("model"), py::arg("log"), py::arg("out"));
  m.def("report",
        [](const std::filesystem::path& log, std::uint64_t split_seed, std::uint64_t model_seed) {
          cli::ReportOptions o;
          o.split.seed = split_seed;
          o.model_seed = model_seed;
          const auto r = cli::cmd_report(log, o);
          py::list rows;
          for (const auto& row : r.rows) {
            py::dict d;
            d["model"] = row.model_name;
            d["mode"] = calibrate::to_string(row.mode);
            d["r_squared"] = row.evaluation ? row.evaluation->r_squared : std::nullopt;
            d["mae"] = row.evaluation ? std::optional<double>(row.evaluation->mae) : std::nullopt;
            d["best"] = row.best;
            d["error"] = row.error;
            rows.append(d);
          }
          return py::make_tuple(rows, r.table_text);
        },
        py::arg("log"), py::arg("split_seed") = 0, py::arg("model_seed") = 0);
}
