#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "chromoseg/architecture.hpp"
#include "chromoseg/data.hpp"
#include "chromoseg/error.hpp"
#include "chromoseg/imaging.hpp"
#include "chromoseg/loss_reference.hpp"
#include "chromoseg/metrics.hpp"
#include "chromoseg/report.hpp"

namespace py = pybind11;
using namespace chromoseg;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> to_numpy(const Grid<T>& g) {
  py::array_t<T> out({g.rows(), g.cols()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

template <typename T>
Grid<T> grid_from(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw InvalidInput("expected a 2-D array");
  Grid<T> g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy_n(a.data(), g.size(), g.values().begin());
  return g;
}

py::array_t<std::uint8_t> rgb_to_numpy(const imaging::RgbImage& img) {
  py::array_t<std::uint8_t> out({img.rows, img.cols, 3});
  std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
  return out;
}

std::vector<std::uint8_t> flat_labels(const U8Array& labels) {
  return {labels.data(), labels.data() + labels.size()};
}

// probs: C x N (or C x H x W) channel-major.
std::vector<double> flat_probs(const F64Array& probs, int& classes) {
  if (probs.ndim() < 2) throw InvalidInput("probabilities need a leading class axis");
  classes = static_cast<int>(probs.shape(0));
  return {probs.data(), probs.data() + probs.size()};
}

py::tuple value_and_grad(const losses::reference::ValueAndGrad& r, const F64Array& like) {
  std::vector<py::ssize_t> shape(like.shape(), like.shape() + like.ndim());
  py::array_t<double> grad(shape);
  std::copy(r.grad.begin(), r.grad.end(), grad.mutable_data());
  return py::make_tuple(r.value, grad);
}

py::dict score_dict(const metrics::Score& s) {
  py::dict d;
  d["value"] = s.defined ? py::object(py::float_(s.value)) : py::object(py::none());
  d["absent"] = s.absent;
  return d;
}

}  // namespace

PYBIND11_MODULE(_chromoseg, m) {
  m.doc() = "Core data, loss, metric and architecture routines (no network runtime)";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.attr("RAW_ROWS") = data::kRawRows;
  m.attr("RAW_COLS") = data::kRawCols;
  m.attr("CANVAS") = data::kCanvas;
  m.attr("NUM_CLASSES") = data::kNumClasses;

  // ---- data
  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, const std::string& layout, const std::string& array) {
        data::LoadOptions o;
        o.layout = data::parse_layout(layout);
        o.published_array = array;
        const auto samples = data::load_dataset(path, o);
        py::list out;
        for (const auto& s : samples) out.append(py::make_tuple(to_numpy(s.image), to_numpy(s.label)));
        return out;
      },
      py::arg("path"), py::arg("layout") = "canonical", py::arg("published_array") = "",
      "List of (image, label) uint8 arrays of shape 94x93.");

  m.def(
      "save_canonical",
      [](const std::filesystem::path& path, const std::vector<std::pair<U8Array, U8Array>>& samples) {
        std::vector<data::RawSample> raw;
        for (const auto& [img, lab] : samples) raw.push_back({grid_from<std::uint8_t>(img), grid_from<std::uint8_t>(lab)});
        data::save_canonical(path, raw);
      },
      py::arg("path"), py::arg("samples"));

  m.def(
      "prepare_sample",
      [](const U8Array& image, const U8Array& label) {
        const auto p = data::prepare_sample({grid_from<std::uint8_t>(image), grid_from<std::uint8_t>(label)});
        return py::make_tuple(to_numpy(p.image), to_numpy(p.label));
      },
      py::arg("image"), py::arg("label"), "Pad to 128x128 and scale the image to [0, 1].");

  m.def(
      "one_hot",
      [](const U8Array& label, int classes) {
        const auto g = grid_from<std::uint8_t>(label);
        const auto v = data::one_hot(g, classes);
        py::array_t<float> out({classes, g.rows(), g.cols()});
        std::copy(v.begin(), v.end(), out.mutable_data());
        return out;
      },
      py::arg("label"), py::arg("classes") = data::kNumClasses);

  m.def(
      "split_dataset",
      [](std::size_t n, double ratio, std::uint64_t seed) {
        const auto s = data::split_dataset(n, ratio, seed);
        return py::make_tuple(s.train_indices, s.test_indices);
      },
      py::arg("n"), py::arg("ratio") = 0.8, py::arg("seed") = 123, "(train_indices, test_indices)");

  m.def(
      "batches",
      [](const std::vector<std::size_t>& items, std::size_t batch_size, std::uint64_t seed, std::uint64_t epoch,
         bool drop_last) { return data::batches(items, {batch_size, seed, drop_last}, epoch); },
      py::arg("items"), py::arg("batch_size") = 64, py::arg("seed") = 123, py::arg("epoch") = 1,
      py::arg("drop_last") = false);

  // ---- architecture
  m.def(
      "channel_plan",
      [](int level, int column, const std::string& upsample) {
        GeneratorConfig cfg;
        cfg.upsample = parse_upsample_mode(upsample);
        const auto p = channel_plan(level, column, cfg);
        return py::make_tuple(p.in_channels, p.mid_channels, p.out_channels);
      },
      py::arg("level"), py::arg("column"), py::arg("upsample") = "bilinear",
      "(in, mid, out) channels of a node in the default generator.");

  m.def(
      "generator_parameter_count",
      [](std::array<int, 5> filters, const std::string& upsample) {
        GeneratorConfig cfg;
        cfg.filters = filters;
        cfg.upsample = parse_upsample_mode(upsample);
        return generator_parameter_count(cfg);
      },
      py::arg("filters") = GeneratorConfig{}.filters, py::arg("upsample") = "bilinear");

  m.def(
      "discriminator_output_size",
      [](int input_size) { return discriminator_output_size(input_size, DiscriminatorConfig{}); },
      py::arg("input_size") = 128);

  // ---- losses (single image, double precision, with gradients)
  m.def(
      "lovasz_softmax",
      [](const F64Array& probs, const U8Array& labels, bool present_only) {
        int c = 0;
        const auto p = flat_probs(probs, c);
        return value_and_grad(losses::reference::lovasz_softmax(p, flat_labels(labels), c, present_only), probs);
      },
      py::arg("probs"), py::arg("labels"), py::arg("present_classes_only") = false,
      "(loss, gradient) for class-major probabilities.");
  m.def(
      "cross_entropy",
      [](const F64Array& probs, const U8Array& labels, const std::vector<double>& weights) {
        int c = 0;
        const auto p = flat_probs(probs, c);
        return value_and_grad(losses::reference::cross_entropy(p, flat_labels(labels), c, weights), probs);
      },
      py::arg("probs"), py::arg("labels"), py::arg("class_weights") = std::vector<double>{});
  m.def(
      "soft_dice_loss",
      [](const F64Array& probs, const U8Array& labels, const std::vector<double>& weights) {
        int c = 0;
        const auto p = flat_probs(probs, c);
        return value_and_grad(losses::reference::soft_dice_loss(p, flat_labels(labels), c, weights), probs);
      },
      py::arg("probs"), py::arg("labels"), py::arg("class_weights") = std::vector<double>{});
  m.def(
      "lsgan_discriminator_loss",
      [](const std::vector<double>& real, const std::vector<double>& fake) {
        return losses::reference::lsgan_discriminator_loss(real, fake);
      },
      py::arg("real_scores"), py::arg("fake_scores"));
  m.def(
      "lsgan_generator_loss",
      [](const std::vector<double>& fake) { return losses::reference::lsgan_generator_loss(fake); },
      py::arg("fake_scores"));

  // ---- metrics
  m.def(
      "confusion_matrix",
      [](const U8Array& pred, const U8Array& gt, int classes) {
        const auto cm = metrics::confusion_matrix(grid_from<std::uint8_t>(pred), grid_from<std::uint8_t>(gt), classes);
        py::array_t<std::int64_t> out({classes, classes});
        for (int t = 0; t < classes; ++t)
          for (int p = 0; p < classes; ++p) out.mutable_at(t, p) = cm.at(t, p);
        return out;
      },
      py::arg("pred"), py::arg("gt"), py::arg("classes") = data::kNumClasses,
      "counts[i, j]: pixels of true class i predicted as j.");

  m.def(
      "evaluate_sample",
      [](const U8Array& pred, const U8Array& gt, int classes, bool with_hausdorff) {
        const auto s =
            metrics::evaluate_sample(grid_from<std::uint8_t>(pred), grid_from<std::uint8_t>(gt), classes, with_hausdorff);
        py::dict out;
        out["accuracy"] = s.accuracy;
        py::list per_class;
        for (int c = 0; c < classes; ++c) {
          const auto& m = s.classes[static_cast<std::size_t>(c)];
          py::dict d;
          d["Dice"] = score_dict(m.dice);
          d["IoU"] = score_dict(m.iou);
          d["Precision"] = score_dict(m.precision);
          d["Recall"] = score_dict(m.recall);
          d["FNR"] = score_dict(m.fnr);
          d["FPR"] = score_dict(m.fpr);
          d["Hausdorff"] = score_dict(s.hausdorff[static_cast<std::size_t>(c)]);
          per_class.append(d);
        }
        out["classes"] = per_class;
        return out;
      },
      py::arg("pred"), py::arg("gt"), py::arg("classes") = data::kNumClasses, py::arg("with_hausdorff") = true,
      "Per-sample metrics; undefined scores are None.");

  m.def(
      "hausdorff",
      [](const std::vector<std::pair<int, int>>& a, const std::vector<std::pair<int, int>>& b) -> py::object {
        std::vector<metrics::Point> pa, pb;
        for (const auto& [r, c] : a) pa.push_back({r, c});
        for (const auto& [r, c] : b) pb.push_back({r, c});
        const auto h = metrics::hausdorff(pa, pb);
        return h ? py::object(py::float_(*h)) : py::object(py::none());
      },
      py::arg("a"), py::arg("b"), "Symmetric Hausdorff distance of (row, col) sets; None if either is empty.");

  m.def(
      "aggregate_report",
      [](const std::vector<std::pair<U8Array, U8Array>>& pairs, bool with_hausdorff) {
        std::vector<metrics::SampleMetrics> s;
        for (const auto& [pred, gt] : pairs) {
          s.push_back(metrics::evaluate_sample(grid_from<std::uint8_t>(pred), grid_from<std::uint8_t>(gt),
                                               data::kNumClasses, with_hausdorff));
        }
        return report::to_json(metrics::aggregate_report(s)).dump();
      },
      py::arg("pairs"), py::arg("with_hausdorff") = true, "JSON report over (pred, gt) pairs.");

  // ---- imaging
  m.def(
      "colorize", [](const U8Array& labels) { return rgb_to_numpy(imaging::colorize(grid_from<std::uint8_t>(labels))); },
      py::arg("labels"));
  m.def(
      "difference_image",
      [](const U8Array& pred, const U8Array& gt) {
        return rgb_to_numpy(imaging::difference_image(grid_from<std::uint8_t>(pred), grid_from<std::uint8_t>(gt)));
      },
      py::arg("pred"), py::arg("gt"));
}
