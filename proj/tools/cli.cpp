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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "stmask/stmask.hpp"

namespace stmask::cli {

namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
double time_ms(F&& f) {
  const auto start = Clock::now();
  f();
  return elapsed_ms(start);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string shape_string(std::span<const std::size_t> dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

template <typename TensorT>
std::string shape_of(const TensorT& t) {
  return shape_string(t.shape());
}

json json_record(std::string_view kind) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = kind;
  return j;
}

double retained_fraction(const MaskTensor& mask) {
  const auto m = mask.values();
  return static_cast<double>(std::count(m.begin(), m.end(), std::uint8_t{0})) /
         static_cast<double>(m.size());
}

bool tube_slices_identical(const MaskTensor& mask) {
  for (std::size_t b = 0; b < mask.dim(0); ++b) {
    for (std::size_t t = 1; t < mask.dim(1); ++t) {
      for (std::size_t n = 0; n < mask.dim(2); ++n) {
        if (mask(b, t, n) != mask(b, 0, n)) return false;
      }
    }
  }
  return true;
}

template <typename TensorT>
bool bit_equal(const TensorT& a, const TensorT& b) {
  if (a.shape() != b.shape()) return false;
  const auto x = a.values();
  const auto y = b.values();
  return std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
}

double max_relative_error(const DensityTensor& a, const DensityTensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.values()[i], y = b.values()[i];
    const double scale = std::max({std::abs(x), std::abs(y), 1e-30});
    worst = std::max(worst, std::abs(x - y) / scale);
  }
  return worst;
}

// Checks inputs exist and output directories are reachable before any compute.
void validate_paths(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  for (const std::string* in : {&cfg.input, &cfg.text_input}) {
    if (in->empty()) continue;
    if (!fs::is_regular_file(*in)) throw IoError("input file not found: " + *in);
  }
  for (const std::string* o : {&cfg.output, &cfg.text_output}) {
    if (o->empty()) continue;
    if (cfg.subcommand == "heatmap" && o == &cfg.output) continue;  // created on demand
    const fs::path parent = fs::path(*o).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
      throw IoError("output directory does not exist: " + parent.string());
  }
}

}  // namespace

int cmd_mask(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const TokenTensor tokens = load_token_tensor(cfg.input);
  const MaskTensor mask = make_mask(cfg.strategy, tokens, cfg.mask);
  save_mask(mask, cfg.output);
  const double ms = elapsed_ms(start);
  if (cfg.format == ReportFormat::kJsonLines) {
    json j = json_record("mask");
    j["strategy"] = to_string(cfg.strategy);
    j["shape"] = mask.shape();
    j["retained_fraction"] = retained_fraction(mask);
    j["elapsed_ms"] = ms;
    j["output"] = cfg.output;
    out << j.dump() << '\n';
  } else {
    out << "mask strategy=" << to_string(cfg.strategy) << " shape=" << shape_of(mask)
        << " retained_fraction=" << std::fixed << std::setprecision(4) << retained_fraction(mask)
        << " elapsed_ms=" << std::setprecision(2) << ms << " -> " << cfg.output << '\n';
  }
  return kOk;
}

int cmd_density(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const TokenTensor tokens = load_token_tensor(cfg.input);
  const DensityTensor density = temporal_density(tokens, cfg.mask.dc_ratio, cfg.mask.kernel);
  save_density(density, cfg.output);
  const double ms = elapsed_ms(start);
  const auto v = density.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (cfg.format == ReportFormat::kJsonLines) {
    json j = json_record("density");
    j["kernel"] = to_string(cfg.mask.kernel);
    j["shape"] = density.shape();
    j["min"] = *lo;
    j["max"] = *hi;
    j["elapsed_ms"] = ms;
    j["output"] = cfg.output;
    out << j.dump() << '\n';
  } else {
    out << "density kernel=" << to_string(cfg.mask.kernel) << " shape=" << shape_of(density)
        << " min=" << *lo << " max=" << *hi << " elapsed_ms=" << std::fixed << std::setprecision(2)
        << ms << " -> " << cfg.output << '\n';
  }
  return kOk;
}

int cmd_relevance(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const TokenTensor tokens = load_token_tensor(cfg.input);
  const TextFeature text = load_text_feature(cfg.text_input);
  PoolingOperator pool = MeanPool{};
  if (cfg.pool == "softmax") pool = SoftmaxPool{{}, cfg.temperature};
  const RelevanceTensor rel = generate_relevance(tokens, text, cfg.window, pool);
  save_relevance(rel, cfg.output);
  const double ms = elapsed_ms(start);
  if (cfg.format == ReportFormat::kJsonLines) {
    json j = json_record("relevance");
    j["window"] = cfg.window.side;
    j["pool"] = cfg.pool;
    j["shape"] = rel.shape();
    j["elapsed_ms"] = ms;
    j["output"] = cfg.output;
    out << j.dump() << '\n';
  } else {
    out << "relevance window=" << cfg.window.side << "x" << cfg.window.side << " pool=" << cfg.pool
        << " shape=" << shape_of(rel) << " elapsed_ms=" << std::fixed << std::setprecision(2) << ms
        << " -> " << cfg.output << '\n';
  }
  return kOk;
}

int cmd_heatmap(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const RelevanceTensor rel = load_relevance(cfg.input);
  std::filesystem::create_directories(cfg.output);
  const auto files = write_heatmaps(rel, cfg.output);
  const double ms = elapsed_ms(start);
  if (cfg.format == ReportFormat::kJsonLines) {
    json j = json_record("heatmap");
    j["files"] = files.size();
    j["grid"] = grid_side(rel.dim(2));
    j["elapsed_ms"] = ms;
    j["output_dir"] = cfg.output;
    out << j.dump() << '\n';
  } else {
    out << "heatmap files=" << files.size() << " grid=" << grid_side(rel.dim(2)) << "x"
        << grid_side(rel.dim(2)) << " elapsed_ms=" << std::fixed << std::setprecision(2) << ms
        << " -> " << cfg.output << '\n';
  }
  return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const TokenTensor tokens = load_token_tensor(cfg.input);
  const DensityTensor density = temporal_density(tokens, cfg.mask.dc_ratio, cfg.mask.kernel);

  struct Row {
    MaskStrategy strategy;
    double retained;
    double leakage;
    double ms;
    bool tube_ok;
  };
  std::vector<Row> rows;
  for (MaskStrategy s : kAllStrategies) {
    MaskTensor mask;
    const double ms = time_ms([&] { mask = make_mask(s, tokens, cfg.mask); });
    rows.push_back({s, retained_fraction(mask), leakage_score(mask, density), ms,
                    s != MaskStrategy::kTube || tube_slices_identical(mask)});
  }
  auto find = [&](MaskStrategy s) {
    return *std::find_if(rows.begin(), rows.end(), [&](const Row& r) { return r.strategy == s; });
  };
  const bool dominance = find(MaskStrategy::kClusterST).leakage >= find(MaskStrategy::kClusterS).leakage;
  const bool tube_ok = find(MaskStrategy::kTube).tube_ok;

  if (cfg.format == ReportFormat::kJsonLines) {
    for (const Row& r : rows) {
      json j = json_record("compare");
      j["strategy"] = to_string(r.strategy);
      j["retained_fraction"] = r.retained;
      j["leakage_score"] = r.leakage;
      j["wall_ms"] = r.ms;
      if (r.strategy == MaskStrategy::kTube) j["tube_slices_identical"] = r.tube_ok;
      out << j.dump() << '\n';
    }
  } else {
    out << "compare input=" << cfg.input << " shape=" << shape_of(tokens)
        << " mask_ratio=" << cfg.mask.mask_ratio << " kernel=" << to_string(cfg.mask.kernel)
        << " seed=" << cfg.mask.seed << '\n';
    out << std::left << std::setw(12) << "strategy" << std::right << std::setw(10) << "retained"
        << std::setw(14) << "leakage" << std::setw(12) << "wall_ms" << "  note\n";
    for (const Row& r : rows) {
      out << std::left << std::setw(12) << to_string(r.strategy) << std::right << std::fixed
          << std::setprecision(4) << std::setw(10) << r.retained << std::setprecision(6)
          << std::setw(14) << r.leakage << std::setprecision(2) << std::setw(12) << r.ms;
      if (r.strategy == MaskStrategy::kTube) {
        out << "  slices identical across t: " << (r.tube_ok ? "yes" : "NO");
      }
      out << '\n';
    }
    out << "cluster-st leakage >= cluster-s leakage: " << (dominance ? "true" : "false") << '\n';
  }
  if (!dominance || !tube_ok) return kInternal;
  return kOk;
}

int cmd_gen_synthetic(const RunConfig& cfg, std::ostream& out) {
  const SyntheticVideo video = generate_synthetic(cfg.synthetic);
  save_token_tensor(video.tokens, cfg.output);
  if (!cfg.text_output.empty()) save_text_feature(video.text, cfg.text_output);
  if (cfg.format == ReportFormat::kJsonLines) {
    json j = json_record("gen-synthetic");
    j["shape"] = video.tokens.shape();
    j["motion"] = cfg.synthetic.motion;
    j["noise"] = cfg.synthetic.noise;
    j["seed"] = cfg.synthetic.seed;
    j["output"] = cfg.output;
    if (!cfg.text_output.empty()) j["text_output"] = cfg.text_output;
    out << j.dump() << '\n';
  } else {
    out << "gen-synthetic shape=" << shape_of(video.tokens) << " grid=" << video.grid << "x"
        << video.grid << " blob=" << video.blob_side << "x" << video.blob_side
        << " motion=" << cfg.synthetic.motion << " noise=" << cfg.synthetic.noise
        << " seed=" << cfg.synthetic.seed << " -> " << cfg.output;
    if (!cfg.text_output.empty()) out << " (+ " << cfg.text_output << ")";
    out << '\n';
  }
  return kOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  if (cfg.repeats == 0) throw CLI::ValidationError("--repeats must be >= 1");
  const SyntheticVideo video = generate_synthetic(cfg.synthetic);
  const TokenTensor& tokens = video.tokens;
  const MaskConfig& mc = cfg.mask;

  DensityTensor fast_density, ref_density;
  MaskTensor fast_mask, naive_mask;
  std::vector<double> t_fast_d, t_ref_d, t_fast_m, t_naive_m;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    t_fast_d.push_back(time_ms([&] { fast_density = temporal_density(tokens, mc.dc_ratio, mc.kernel); }));
    t_ref_d.push_back(
        time_ms([&] { ref_density = temporal_density_reference(tokens, mc.dc_ratio, mc.kernel); }));
    t_fast_m.push_back(time_ms([&] { fast_mask = cluster_st_mask(tokens, mc); }));
    t_naive_m.push_back(time_ms([&] { naive_mask = naive_cluster_st_mask(tokens, mc); }));
  }

  // Same outputs at a single worker and at a multi-worker hint (at least 4,
  // so the check splits work even on single-core hosts).
  const unsigned configured = num_threads();
  const unsigned wide = std::max(configured, 4u);
  set_num_threads(1);
  const DensityTensor serial_density = temporal_density(tokens, mc.dc_ratio, mc.kernel);
  const MaskTensor serial_mask = cluster_st_mask(tokens, mc);
  set_num_threads(wide);
  const DensityTensor wide_density = temporal_density(tokens, mc.dc_ratio, mc.kernel);
  const MaskTensor wide_mask = cluster_st_mask(tokens, mc);
  set_num_threads(configured);

  const bool density_equal = bit_equal(fast_density, ref_density);
  const bool mask_equal = bit_equal(fast_mask, naive_mask);
  const bool threads_equal = bit_equal(serial_density, fast_density) &&
                             bit_equal(serial_mask, fast_mask) &&
                             bit_equal(wide_density, fast_density) && bit_equal(wide_mask, fast_mask);
  const bool identical = density_equal && mask_equal && threads_equal;
  const double rel_err = max_relative_error(fast_density, ref_density);

  const double fd = median(t_fast_d), rd = median(t_ref_d), fm = median(t_fast_m), nm = median(t_naive_m);
  if (cfg.format == ReportFormat::kJsonLines) {
    json j = json_record("bench");
    j["shape"] = tokens.shape();
    j["kernel"] = to_string(mc.kernel);
    j["threads"] = configured;
    j["threads_checked"] = {1, wide};
    j["repeats"] = cfg.repeats;
    j["density_fast_ms"] = fd;
    j["density_reference_ms"] = rd;
    j["mask_fast_ms"] = fm;
    j["mask_naive_ms"] = nm;
    j["density_max_rel_err"] = rel_err;
    j["density_identical"] = density_equal;
    j["mask_identical"] = mask_equal;
    j["threads_identical"] = threads_equal;
    j["outputs_identical"] = identical;
    out << j.dump() << '\n';
  } else {
    out << "bench shape=" << shape_of(tokens) << " kernel=" << to_string(mc.kernel)
        << " threads=" << configured << " repeats=" << cfg.repeats << " (median wall times)\n"
        << std::fixed << std::setprecision(2) << "density  fast_ms=" << fd << " reference_ms=" << rd
        << " speedup=" << (fd > 0 ? rd / fd : 0.0) << '\n'
        << "mask     fast_ms=" << fm << " naive_ms=" << nm << " speedup=" << (fm > 0 ? nm / fm : 0.0)
        << '\n'
        << std::scientific << std::setprecision(2) << "density max relative error: " << rel_err << '\n'
        << "density identical: " << (density_equal ? "true" : "false") << '\n'
        << "mask identical: " << (mask_equal ? "true" : "false") << '\n'
        << "threads 1 vs " << wide << " identical: " << (threads_equal ? "true" : "false") << '\n'
        << "outputs identical: " << (identical ? "true" : "false") << '\n';
  }
  return identical ? kOk : kInternal;
}

namespace {

void add_mask_options(CLI::App* cmd, RunConfig& cfg, std::string& kernel) {
  cmd->add_option("--mask-ratio", cfg.mask.mask_ratio, "Masking ratio r in (0, 1)")
      ->capture_default_str();
  cmd->add_option("--dc-ratio", cfg.mask.dc_ratio, "Quantile level of the cutoff distance")
      ->capture_default_str();
  cmd->add_option("--kernel", kernel, "Temporal density kernel")
      ->check(CLI::IsMember({"exp", "gauss-norm"}))
      ->capture_default_str();
  cmd->add_option("--seed", cfg.mask.seed, "Seed for randomized strategies")->capture_default_str();
}

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& format) {
  cmd->add_option("--threads", cfg.threads, "Worker thread hint (0 = all cores)")
      ->capture_default_str();
  cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "json-lines"}))
      ->capture_default_str();
}

void add_synthetic_options(CLI::App* cmd, SyntheticSpec& s) {
  cmd->add_option("--batch", s.batch, "B")->capture_default_str();
  cmd->add_option("--frames", s.frames, "T")->capture_default_str();
  cmd->add_option("--tokens", s.tokens, "N (perfect square)")->capture_default_str();
  cmd->add_option("--channels", s.channels, "C")->capture_default_str();
  cmd->add_option("--motion", s.motion, "Blob shift in grid cells per frame")->capture_default_str();
  cmd->add_option("--noise", s.noise, "Per-token Gaussian noise scale")->capture_default_str();
  cmd->add_option("--data-seed", s.seed, "Seed of the synthetic generator")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster-wise spatio-temporal token masking toolkit", "stmask"};
  app.require_subcommand(1);
  // A repeated flag overrides earlier occurrences.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "stmask 0.1.0");

  RunConfig cfg;
  std::string kernel = "gauss-norm";
  std::string strategy = "cluster-st";
  std::string format = "text";

  auto* mask = app.add_subcommand("mask", "Generate a spatio-temporal mask (VTOK -> VMSK)");
  mask->add_option("-i,--input", cfg.input, "Token tensor (VTOK)")->required();
  mask->add_option("-o,--output", cfg.output, "Mask output (VMSK)")->required();
  mask->add_option("--strategy", strategy, "Masking strategy")
      ->check(CLI::IsMember({"cluster-st", "cluster-s", "random", "tube", "frame"}))
      ->capture_default_str();
  add_mask_options(mask, cfg, kernel);
  add_common(mask, cfg, format);

  auto* density = app.add_subcommand("density", "Temporal density of every token (VTOK -> VDEN)");
  density->add_option("-i,--input", cfg.input, "Token tensor (VTOK)")->required();
  density->add_option("-o,--output", cfg.output, "Density output (VDEN)")->required();
  density->add_option("--dc-ratio", cfg.mask.dc_ratio, "Quantile level of the cutoff distance")
      ->capture_default_str();
  density->add_option("--kernel", kernel, "Temporal density kernel")
      ->check(CLI::IsMember({"exp", "gauss-norm"}))
      ->capture_default_str();
  add_common(density, cfg, format);

  std::size_t window = 3;
  auto* relevance = app.add_subcommand("relevance", "Video-text relevance (VTOK + VTXT -> VREL)");
  relevance->add_option("-i,--input", cfg.input, "Token tensor (VTOK)")->required();
  relevance->add_option("-t,--text", cfg.text_input, "Text feature (VTXT)")->required();
  relevance->add_option("-o,--output", cfg.output, "Relevance output (VREL)")->required();
  relevance->add_option("--window", window, "Sliding window side")
      ->check(CLI::IsMember({1, 3}))
      ->capture_default_str();
  relevance->add_option("--pool", cfg.pool, "Window pooling operator")
      ->check(CLI::IsMember({"mean", "softmax"}))
      ->capture_default_str();
  relevance->add_option("--temperature", cfg.temperature, "Softmax pooling temperature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(relevance, cfg, format);

  auto* heatmap = app.add_subcommand("heatmap", "Write one P5 PGM per (b, t) from a VREL file");
  heatmap->add_option("-i,--input", cfg.input, "Relevance tensor (VREL)")->required();
  heatmap->add_option("-o,--output-dir", cfg.output, "Directory for rel_b{b}_t{t}.pgm")->required();
  add_common(heatmap, cfg, format);

  auto* compare = app.add_subcommand("compare", "Leakage and retention of all five strategies");
  compare->add_option("-i,--input", cfg.input, "Token tensor (VTOK), T >= 2")->required();
  add_mask_options(compare, cfg, kernel);
  add_common(compare, cfg, format);

  auto* gen = app.add_subcommand("gen-synthetic", "Write a moving-blob token tensor");
  gen->add_option("-o,--output", cfg.output, "Token output (VTOK)")->required();
  gen->add_option("--text-output", cfg.text_output, "Optional text feature output (VTXT)");
  add_synthetic_options(gen, cfg.synthetic);
  add_common(gen, cfg, format);

  SyntheticSpec bench_spec;
  bench_spec.batch = 4;
  bench_spec.frames = 8;
  auto* bench = app.add_subcommand("bench", "Time reference vs fast paths and check equality");
  add_synthetic_options(bench, bench_spec);
  bench->add_option("--repeats", cfg.repeats, "Timed repetitions (median reported)")
      ->capture_default_str();
  add_mask_options(bench, cfg, kernel);
  add_common(bench, cfg, format);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    cfg.mask.kernel = parse_density_kernel(kernel);
    cfg.strategy = parse_mask_strategy(strategy);
    cfg.format = format == "json-lines" ? ReportFormat::kJsonLines : ReportFormat::kText;
    cfg.window.side = window;
    set_num_threads(cfg.threads);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "bench") cfg.synthetic = bench_spec;

    const std::map<std::string, int (*)(const RunConfig&, std::ostream&)> dispatch = {
        {"mask", cmd_mask},           {"density", cmd_density},
        {"relevance", cmd_relevance}, {"heatmap", cmd_heatmap},
        {"compare", cmd_compare},     {"gen-synthetic", cmd_gen_synthetic},
        {"bench", cmd_bench},
    };
    validate_paths(cfg);
    const int code = dispatch.at(cfg.subcommand)(cfg, out);
    if (code == kInternal) err << "error: self-check failed (see report)\n";
    return code;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace stmask::cli
