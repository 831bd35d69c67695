/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Python bindings. Tensors cross the boundary as C-contiguous numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>

#include "stmask/stmask.hpp"

namespace py = pybind11;
using namespace stmask;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename TensorT>
TensorT to_tensor(const CArray<typename TensorT::value_type>& a, const char* what) {
  using Shape = typename TensorT::Shape;
  if (static_cast<std::size_t>(a.ndim()) != TensorT::kRank) {
    throw ValidationError(std::string(what) + " must have rank " + std::to_string(TensorT::kRank) +
                          ", got " + std::to_string(a.ndim()));
  }
  Shape shape{};
  for (std::size_t i = 0; i < TensorT::kRank; ++i) shape[i] = static_cast<std::size_t>(a.shape(i));
  TensorT t(shape);
  std::memcpy(t.values().data(), a.data(), t.size() * sizeof(typename TensorT::value_type));
  return t;
}

template <typename TensorT>
py::array_t<typename TensorT::value_type> to_array(const TensorT& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<typename TensorT::value_type> a(shape);
  std::memcpy(a.mutable_data(), t.values().data(), t.size() * sizeof(typename TensorT::value_type));
  return a;
}

MaskConfig mask_config(double mask_ratio, double dc_ratio, const std::string& kernel, std::uint64_t seed) {
  MaskConfig cfg;
  cfg.mask_ratio = mask_ratio;
  cfg.dc_ratio = dc_ratio;
  cfg.kernel = parse_density_kernel(kernel);
  cfg.seed = seed;
  return cfg;
}

PoolingOperator pooling(const std::string& pool, double temperature) {
  if (pool == "mean") return MeanPool{};
  if (pool == "softmax") return SoftmaxPool{{}, temperature};
  throw DomainError("unknown pool '" + pool + "' (expected mean or softmax)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cluster-wise spatio-temporal token masking";

  auto base = py::register_exception<Error>(m, "StmaskError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<TruncationError>(m, "TruncationError", base);
  py::register_exception<DimensionOverflowError>(m, "DimensionOverflowError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<DomainError>(m, "DomainError", base);

  m.def("set_num_threads", &set_num_threads, py::arg("threads"),
        "Worker thread hint; 0 uses all hardware threads.");
  m.def("cluster_count", &cluster_count, py::arg("n_tokens"), py::arg("mask_ratio"));

  m.def(
      "temporal_density",
      [](const CArray<float>& tokens, double dc_ratio, const std::string& kernel) {
        const auto x = to_tensor<TokenTensor>(tokens, "tokens");
        const auto k = parse_density_kernel(kernel);
        DensityTensor rho;
        {
          py::gil_scoped_release release;
          rho = temporal_density(x, dc_ratio, k);
        }
        return to_array(rho);
      },
      py::arg("tokens"), py::arg("dc_ratio") = 0.2, py::arg("kernel") = "gauss-norm");
  m.def(
      "temporal_density_reference",
      [](const CArray<float>& tokens, double dc_ratio, const std::string& kernel) {
        return to_array(temporal_density_reference(to_tensor<TokenTensor>(tokens, "tokens"), dc_ratio,
                                                   parse_density_kernel(kernel)));
      },
      py::arg("tokens"), py::arg("dc_ratio") = 0.2, py::arg("kernel") = "gauss-norm");

  m.def(
      "dpc_cluster",
      [](const CArray<float>& frame, std::size_t n_clusters, double dc_ratio) {
        if (frame.ndim() != 2) throw ValidationError("frame must have shape (N, C)");
        const auto rows = static_cast<std::size_t>(frame.shape(0));
        const auto cols = static_cast<std::size_t>(frame.shape(1));
        std::vector<float> data(frame.data(), frame.data() + rows * cols);
        const auto a = dpc_cluster(MatrixView(data, rows, cols), n_clusters, dc_ratio);
        return py::make_tuple(py::array_t<std::int32_t>(a.labels.size(), a.labels.data()),
                              py::array_t<std::int32_t>(a.centers.size(), a.centers.data()));
      },
      py::arg("frame"), py::arg("n_clusters"), py::arg("dc_ratio") = 0.2,
      "Returns (labels, centers) for one (N, C) frame.");

  m.def(
      "make_mask",
      [](const CArray<float>& tokens, const std::string& strategy, double mask_ratio, double dc_ratio,
         const std::string& kernel, std::uint64_t seed) {
        const auto x = to_tensor<TokenTensor>(tokens, "tokens");
        const auto cfg = mask_config(mask_ratio, dc_ratio, kernel, seed);
        return to_array(make_mask(parse_mask_strategy(strategy), x, cfg));
      },
      py::arg("tokens"), py::arg("strategy") = "cluster-st", py::arg("mask_ratio") = 0.9,
      py::arg("dc_ratio") = 0.2, py::arg("kernel") = "gauss-norm", py::arg("seed") = 0,
      "Mask of shape (B, T, N); 1 = masked, 0 = retained.");
  m.def(
      "naive_cluster_st_mask",
      [](const CArray<float>& tokens, double mask_ratio, double dc_ratio, const std::string& kernel) {
        return to_array(naive_cluster_st_mask(to_tensor<TokenTensor>(tokens, "tokens"),
                                              mask_config(mask_ratio, dc_ratio, kernel, 0)));
      },
      py::arg("tokens"), py::arg("mask_ratio") = 0.9, py::arg("dc_ratio") = 0.2,
      py::arg("kernel") = "gauss-norm");
  m.def(
      "leakage_score",
      [](const CArray<std::uint8_t>& mask, const CArray<float>& density) {
        return leakage_score(to_tensor<MaskTensor>(mask, "mask"), to_tensor<DensityTensor>(density, "density"));
      },
      py::arg("mask"), py::arg("density"));

  m.def(
      "generate_relevance",
      [](const CArray<float>& tokens, const CArray<float>& text, std::size_t window, const std::string& pool,
         double temperature) {
        return to_array(generate_relevance(to_tensor<TokenTensor>(tokens, "tokens"),
                                           to_tensor<TextFeature>(text, "text"), WindowSpec{window},
                                           pooling(pool, temperature)));
      },
      py::arg("tokens"), py::arg("text"), py::arg("window") = 3, py::arg("pool") = "mean",
      py::arg("temperature") = 1.0);
  m.def(
      "mrm_loss",
      [](const CArray<float>& pred, const CArray<float>& target, const CArray<std::uint8_t>& mask) {
        return mrm_loss(to_tensor<RelevanceTensor>(pred, "pred"), to_tensor<RelevanceTensor>(target, "target"),
                        to_tensor<MaskTensor>(mask, "mask"));
      },
      py::arg("pred"), py::arg("target"), py::arg("mask"));

  m.def(
      "generate_synthetic",
      [](std::size_t batch, std::size_t frames, std::size_t tokens, std::size_t channels, std::size_t motion,
         double noise, std::uint64_t seed) {
        SyntheticSpec s{batch, frames, tokens, channels, motion, noise, seed};
        const auto v = generate_synthetic(s);
        return py::make_tuple(to_array(v.tokens), to_array(v.text));
      },
      py::arg("batch") = 1, py::arg("frames") = 8, py::arg("tokens") = 196, py::arg("channels") = 64,
      py::arg("motion") = 1, py::arg("noise") = 0.05, py::arg("seed") = 0,
      "Returns (tokens, text) for a moving-blob video.");

  m.def("load_tokens", [](const std::string& p) { return to_array(load_token_tensor(p)); }, py::arg("path"));
  m.def("load_text", [](const std::string& p) { return to_array(load_text_feature(p)); }, py::arg("path"));
  m.def("load_mask", [](const std::string& p) { return to_array(load_mask(p)); }, py::arg("path"));
  m.def("load_density", [](const std::string& p) { return to_array(load_density(p)); }, py::arg("path"));
  m.def("load_relevance", [](const std::string& p) { return to_array(load_relevance(p)); }, py::arg("path"));
  m.def(
      "save_tokens",
      [](const CArray<float>& a, const std::string& p) { save_token_tensor(to_tensor<TokenTensor>(a, "tokens"), p); },
      py::arg("array"), py::arg("path"));
  m.def(
      "save_text",
      [](const CArray<float>& a, const std::string& p) { save_text_feature(to_tensor<TextFeature>(a, "text"), p); },
      py::arg("array"), py::arg("path"));
  m.def(
      "save_mask",
      [](const CArray<std::uint8_t>& a, const std::string& p) { save_mask(to_tensor<MaskTensor>(a, "mask"), p); },
      py::arg("array"), py::arg("path"));
  m.def(
      "save_density",
      [](const CArray<float>& a, const std::string& p) { save_density(to_tensor<DensityTensor>(a, "density"), p); },
      py::arg("array"), py::arg("path"));
  m.def(
      "save_relevance",
      [](const CArray<float>& a, const std::string& p) {
        save_relevance(to_tensor<RelevanceTensor>(a, "relevance"), p);
      },
      py::arg("array"), py::arg("path"));
}
