#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "ncdm/classify.hpp"
#include "ncdm/error.hpp"
#include "ncdm/ingest.hpp"
#include "ncdm/ncd.hpp"
#include "ncdm/partition.hpp"

namespace py = pybind11;
using namespace ncdm;

namespace {

// Python passes plain byte strings; ids are their positions.
Multiset to_multiset(const std::vector<std::string>& items) {
  std::vector<Element> v;
  v.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) v.emplace_back(std::to_string(i), items[i]);
  return Multiset(std::move(v));
}

std::vector<int> positions(const Multiset& m) {
  std::vector<int> out;
  for (const auto& e : m) out.push_back(std::stoi(e.id()));
  std::sort(out.begin(), out.end());
  return out;
}

Framing framing_from(const std::string& name) {
  if (name == "text") return Framing::kText;
  if (name == "length-prefixed") return Framing::kLengthPrefixed;
  throw InvalidArgument("framing must be 'text' or 'length-prefixed'");
}

ingest::GrayImage to_image(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw InvalidArgument("image must be a 2-D array");
  ingest::GrayImage img;
  img.height = a.shape(0);
  img.width = a.shape(1);
  img.pixels.assign(a.data(), a.data() + a.size());
  return img;
}

py::dict report_dict(const ClassificationReport& r) {
  py::list items;
  for (const auto& it : r.items) {
    py::dict d;
    d["id"] = it.id;
    d["truth"] = it.truth ? py::cast(*it.truth) : py::none();
    d["predicted"] = it.predicted;
    d["scores"] = it.scores;
    items.append(d);
  }
  py::dict out;
  out["method"] = std::string(to_string(r.method));
  out["n"] = r.n;
  out["correct"] = r.correct;
  out["accuracy"] = r.accuracy;
  out["ci"] = py::make_tuple(r.ci.lo, r.ci.hi);
  out["items"] = items;
  return out;
}

LabeledCorpus to_corpus(const std::map<std::string, std::vector<std::string>>& classes) {
  LabeledCorpus c;
  for (const auto& [label, items] : classes) {
    std::vector<Element> v;
    for (std::size_t i = 0; i < items.size(); ++i) v.emplace_back(label + "/" + std::to_string(i), items[i]);
    c.classes[label] = Multiset(std::move(v));
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compression distances for multisets";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base);
  py::register_exception<DegenerateInput>(m, "DegenerateInput", base);
  py::register_exception<BackendUnavailable>(m, "BackendUnavailable", base);
  py::register_exception<LoadError>(m, "LoadError", base);

  py::class_<Engine>(m, "Engine")
      .def(py::init([](const std::string& backend, const std::string& framing, unsigned jobs) {
             EngineOptions o;
             o.framing = framing_from(framing);
             o.jobs = jobs;
             return Engine(Backend::parse(backend), o);
           }),
           py::arg("backend") = "bzip2", py::arg("framing") = "text", py::arg("jobs") = 0)
      .def_property_readonly("backend", [](const Engine& e) { return e.backend().name(); })
      .def_property_readonly("compression_jobs", &Engine::compression_jobs)
      .def("reset_job_counter", &Engine::reset_job_counter)
      .def("compressed_size",
           [](const Engine& e, const std::string& data) { return e.backend().compressed_size(data); })
      .def("g", [](const Engine& e, const std::vector<std::string>& x) { return e.g(to_multiset(x)); })
      .def("ncd1", [](const Engine& e, const std::vector<std::string>& x) { return ncd1(e, to_multiset(x)).value; })
      .def("ncd_exact", [](const Engine& e, const std::vector<std::string>& x) {
        return ncd_exact(e, to_multiset(x)).value;
      })
      .def("ncd", [](const Engine& e, const std::vector<std::string>& x) {
        return ncd_heuristic(e, to_multiset(x)).value;
      }, "Heuristic multiset NCD (a lower bound of the exact form).")
      .def("pairwise", [](const Engine& e, const std::string& a, const std::string& b) {
        return ncd_pairwise(e, Element("0", a), Element("1", b)).value;
      })
      .def("delta_ncd1", [](const Engine& e, const std::string& x, const std::vector<std::string>& a) {
        return delta_ncd1(e, Element("x", x), to_multiset(a));
      })
      .def("distance_matrix", [](const Engine& e, const std::vector<std::string>& items) {
        std::vector<Element> v;
        for (std::size_t i = 0; i < items.size(); ++i) v.emplace_back(std::to_string(i), items[i]);
        auto dm = distance_matrix(e, v);
        // Labels come back in canonical order; map them to input positions.
        const std::size_t n = dm.dimension();
        py::array_t<double> out({n, n});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            w(std::stoul(dm.labels[i]), std::stoul(dm.labels[j])) = dm.at(i, j);
          }
        }
        return out;
      })
      .def("margin", [](const Engine& e, const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return margin(e, to_multiset(a), to_multiset(b));
      })
      .def("split", [](const Engine& e, const std::vector<std::string>& x, std::size_t restarts,
                       std::size_t max_iters, std::uint64_t seed) {
        PartitionConfig cfg;
        cfg.restarts = restarts;
        cfg.max_iters = max_iters;
        cfg.seed = seed;
        auto r = klists_split(e, to_multiset(x), cfg);
        return py::make_tuple(positions(r.a), positions(r.b), r.margin);
      }, py::arg("items"), py::arg("restarts") = 5, py::arg("max_iters") = 100, py::arg("seed") = 1,
         "K-Lists bipartition; returns (indices_a, indices_b, margin).")
      .def("classify", [](const Engine& e, const std::string& x,
                          const std::map<std::string, std::vector<std::string>>& classes,
                          const std::string& method) {
        auto c = to_corpus(classes);
        auto p = predict(e, Element("x", x), c.classes, parse_method(method));
        return py::make_tuple(p.label, p.scores);
      }, py::arg("x"), py::arg("classes"), py::arg("method") = "delta")
      .def("loocv", [](const Engine& e, const std::map<std::string, std::vector<std::string>>& classes,
                       const std::string& method) {
        return report_dict(loocv(e, to_corpus(classes), parse_method(method)));
      }, py::arg("classes"), py::arg("method") = "delta");

  m.def("wilson_ci", [](double p, std::size_t n, double level) {
    auto ci = wilson_ci(p, n, level);
    return py::make_tuple(ci.lo, ci.hi);
  }, py::arg("p_hat"), py::arg("n"), py::arg("level") = 0.95);

  m.def("otsu_threshold", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
    return ingest::otsu_threshold(to_image(a));
  });
  m.def("image_to_bitstream", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a,
                                 std::size_t scale, bool packed) {
    auto e = ingest::image_to_bitstream(to_image(a), scale, packed);
    return py::bytes(std::string(e.bytes()));
  }, py::arg("image"), py::arg("scale") = 4, py::arg("packed") = false);
}
