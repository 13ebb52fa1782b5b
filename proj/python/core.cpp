#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "psiart/config.hpp"
#include "psiart/engine.hpp"
#include "psiart/error.hpp"
#include "psiart/fixtures.hpp"
#include "psiart/image_io.hpp"
#include "psiart/imagefeat.hpp"
#include "psiart/som.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace psiart;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

RasterImage to_image(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    fail(ErrorKind::InvalidInput, "image must be an (H, W, 3) uint8 array");
  }
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  std::vector<Rgb> px(static_cast<std::size_t>(w) * h);
  const auto* src = a.data();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = {src[3 * i], src[3 * i + 1], src[3 * i + 2]};
  return RasterImage(w, h, std::move(px));
}

U8Array to_array(const RasterImage& img) {
  U8Array out({img.height(), img.width(), 3});
  auto* dst = out.mutable_data();
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    dst[3 * i] = px[i].r;
    dst[3 * i + 1] = px[i].g;
    dst[3 * i + 2] = px[i].b;
  }
  return out;
}

RasterImage image_arg(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return decode_image(obj.cast<std::string>());
  return to_image(obj.cast<U8Array>());
}

json features_json(const FeatureBundle& f) {
  return {{"rgb", f.rgb.bins},
          {"hsv", f.hsv.bins},
          {"lab", f.lab.bins},
          {"gabor", f.gabor.energies},
          {"haar", f.haar.responses},
          {"general", f.general.as_array()},
          {"detail", f.detail_vector()}};
}

json train_json(const TrainSummary& s) {
  json domains = json::array();
  for (const auto& d : s.domains) {
    domains.push_back({{"name", d.name}, {"entries", d.entries}, {"final_qe", d.final_qe}});
  }
  return {{"snapshot_id", s.snapshot_id},
          {"domains", domains},
          {"hub_assignments", s.hub_assignments},
          {"hub_qe", s.hub_qe},
          {"face_templates", s.face_templates}};
}

std::unique_ptr<Engine> open_engine(const std::string& store, const std::optional<std::string>& config) {
  std::optional<EngineConfig> cfg;
  if (config) cfg = load_engine_config(*config);
  return std::make_unique<Engine>(store, std::move(cfg));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the psiart engine";

  // Raised for every engine failure; `kind` names the error category.
  static PyObject* error = PyErr_NewException("psiart._core.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error, exc.ptr());
    }
  });

  m.def("load_image", [](const std::string& path) { return to_array(decode_image(path)); });
  m.def("save_png", [](const U8Array& img, const std::string& path) { write_png(path, to_image(img)); });
  m.def("sample_input", [] { return to_array(fixtures::sample_input()); });
  m.def("write_fixtures", [](const std::string& dir) { fixtures::write_corpus(fixtures::corpus(), dir); });

  m.def(
      "extract_features",
      [](const U8Array& img, int canvas_w, int canvas_h) {
        const auto raster = to_image(img);
        if (canvas_w <= 0) canvas_w = raster.width();
        if (canvas_h <= 0) canvas_h = raster.height();
        return features_json(extract_features(raster, canvas_w, canvas_h)).dump();
      },
      py::arg("image"), py::arg("canvas_w") = 0, py::arg("canvas_h") = 0);

  m.def(
      "som_train",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& data, int grid_w,
         int grid_h, int epochs, std::uint64_t seed) {
        if (data.ndim() != 2) fail(ErrorKind::InvalidInput, "samples must be a 2-D array");
        const auto n = static_cast<std::size_t>(data.shape(0));
        const auto d = static_cast<std::size_t>(data.shape(1));
        std::vector<Sample> samples(n, Sample(d));
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t k = 0; k < d; ++k) samples[i][k] = data.at(i, k);
        }
        SomConfig cfg;
        cfg.grid_w = grid_w;
        cfg.grid_h = grid_h;
        cfg.dim = static_cast<int>(d);
        cfg.epochs = epochs;
        cfg.seed = seed;
        Som som = [&] {
          py::gil_scoped_release release;
          return som_train(samples, cfg);
        }();
        py::array_t<double> weights({static_cast<py::ssize_t>(som.units()), static_cast<py::ssize_t>(d)});
        std::copy(som.weights().begin(), som.weights().end(), weights.mutable_data());
        return py::make_tuple(weights, som.initial_qe, som.final_qe);
      },
      py::arg("samples"), py::arg("grid_w") = 8, py::arg("grid_h") = 8, py::arg("epochs") = 50,
      py::arg("seed") = 1);

  py::class_<Engine>(m, "Engine")
      .def(py::init(&open_engine), py::arg("store"), py::arg("config") = std::nullopt)
      .def(
          "train",
          [](Engine& e, const std::string& datasets, std::optional<std::uint64_t> seed) {
            py::gil_scoped_release release;
            return train_json(e.train(datasets, seed)).dump();
          },
          py::arg("datasets"), py::arg("seed") = std::nullopt)
      .def(
          "create",
          [](Engine& e, const py::object& input, std::uint64_t seed, const std::string& target) {
            const RasterImage img = image_arg(input);
            CreativeTask task;
            task.target_domain = target;
            py::gil_scoped_release release;
            const auto res = e.create(img, seed, task);
            return json{{"record", to_json(res.record)}, {"state", to_json(res.state)}}.dump();
          },
          py::arg("input"), py::arg("seed") = 1, py::arg("target") = "")
      .def(
          "rate",
          [](Engine& e, const std::string& id, int rating, const std::string& rater) {
            return to_json(e.rate(id, rating, rater)).dump();
          },
          py::arg("artwork_id"), py::arg("rating"), py::arg("rater") = "anonymous")
      .def("agent_state", [](const Engine& e) { return to_json(e.agent_state()).dump(); })
      .def("catalog",
           [](const Engine& e) {
             json list = json::array();
             for (const auto& c : e.catalog()) list.push_back(to_json(c));
             return list.dump();
           })
      .def("artwork", [](const Engine& e, const std::string& id) { return to_json(e.artwork(id)).dump(); });
}
