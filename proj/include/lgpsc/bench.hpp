#pragma once

// Benchmark harness: expands model hyperparameter grids over datasets, scores
// every fit with NMI and ARI against the ground truth, and writes the raw
// records, a best-over-grid (or mean) summary and per-cell quantiles.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lgpsc/data.hpp"
#include "lgpsc/error.hpp"
#include "lgpsc/kmeans.hpp"
#include "lgpsc/metrics.hpp"
#include "lgpsc/models.hpp"

namespace lgpsc::bench {

/// Malformed or out-of-domain benchmark specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

enum class ModelId { kKMeans, kSc, kScpca, kMultilevel, kCosineSc };

inline const std::vector<ModelId>& all_models() {
  static const std::vector<ModelId> ids{ModelId::kKMeans, ModelId::kSc, ModelId::kScpca,
                                        ModelId::kMultilevel, ModelId::kCosineSc};
  return ids;
}

inline std::string_view model_name(ModelId id) {
  switch (id) {
    case ModelId::kKMeans: return "kmeans";
    case ModelId::kSc: return "sc";
    case ModelId::kScpca: return "scpca";
    case ModelId::kMultilevel: return "multilevel";
    case ModelId::kCosineSc: return "cosine_sc";
  }
  return "?";
}

inline std::string_view model_description(ModelId id) {
  switch (id) {
    case ModelId::kKMeans: return "Lloyd k-means with k-means++ seeding on the raw features";
    case ModelId::kSc: return "spectral clustering on the Gaussian kNN graph Laplacian";
    case ModelId::kScpca: return "spectral clustering blended with PCA (global + local structure)";
    case ModelId::kMultilevel: return "spectral clustering with mean-point multilevel Laplacian";
    case ModelId::kCosineSc: return "cosine-similarity spectral clustering via left singular vectors";
  }
  return "";
}

inline std::optional<ModelId> parse_model(std::string_view name) {
  for (ModelId id : all_models()) {
    if (model_name(id) == name) return id;
  }
  return std::nullopt;
}

/// Candidate values per hyperparameter; the grid is their cartesian product.
struct ParamGrid {
  std::vector<Index> k;
  std::vector<Sigma> sigma;
  std::vector<double> beta;
  std::vector<std::optional<Index>> k_prime;  // nullopt: same as k
  std::vector<int> levels;
  std::vector<bool> center;
  std::vector<bool> raw_coarse_scale;
  std::vector<Symmetrization> symmetrization;

  /// k in {5, 10, 15, 20}, sigma in {auto, auto/2, 2 auto}, beta in
  /// {0.1, 0.3, 0.5, 0.7, 0.9}; k' = k, one level, centered SC-PCA.
  static ParamGrid defaults(ModelId id) {
    ParamGrid g;
    if (id == ModelId::kKMeans || id == ModelId::kCosineSc) return g;
    g.k = {5, 10, 15, 20};
    g.sigma = {Sigma::automatic(1.0), Sigma::automatic(0.5), Sigma::automatic(2.0)};
    g.symmetrization = {Symmetrization::kUnion};
    if (id == ModelId::kScpca) {
      g.beta = {0.1, 0.3, 0.5, 0.7, 0.9};
      g.center = {true};
    }
    if (id == ModelId::kMultilevel) {
      g.k_prime = {std::nullopt};
      g.levels = {1};
      g.raw_coarse_scale = {false};
    }
    return g;
  }
};

struct GridCell {
  std::string params;  // canonical "key=value;..." label, "-" when empty
  ModelConfig config;  // d and seeds are filled in per run
};

namespace detail {

inline std::string format_number(double v) { return lgpsc::detail::format_double(v); }

inline std::string sigma_label(const Sigma& s) {
  if (!s.is_auto()) return format_number(s.value());
  if (s.value() == 1.0) return "auto";
  return "auto*" + format_number(s.value());
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::vector<GridCell> expand_grid(ModelId id, const ParamGrid& grid) {
  if (id == ModelId::kKMeans || id == ModelId::kCosineSc) return {GridCell{"-", ModelConfig{}}};

  std::vector<GridCell> cells;
  const bool scpca = id == ModelId::kScpca;
  const bool multi = id == ModelId::kMultilevel;
  const std::vector<double> betas = scpca ? grid.beta : std::vector<double>{0.5};
  const std::vector<bool> centers = scpca ? grid.center : std::vector<bool>{true};
  const std::vector<std::optional<Index>> kps =
      multi ? grid.k_prime : std::vector<std::optional<Index>>{std::nullopt};
  const std::vector<int> levels = multi ? grid.levels : std::vector<int>{1};
  const std::vector<bool> raws = multi ? grid.raw_coarse_scale : std::vector<bool>{false};

  for (Index k : grid.k) {
    for (const auto& kp : kps) {
      for (const Sigma& sigma : grid.sigma) {
        for (double beta : betas) {
          for (bool center : centers) {
            for (int lv : levels) {
              for (bool raw : raws) {
                for (Symmetrization sym : grid.symmetrization) {
                  ModelConfig c;
                  c.k = k;
                  c.k_prime = kp;
                  c.sigma = sigma;
                  c.beta = beta;
                  c.center_data = center;
                  c.levels = lv;
                  c.raw_coarse_scale = raw;
                  c.symmetrization = sym;
                  std::string p = "k=" + std::to_string(k);
                  if (multi) p += ";k_prime=" + (kp ? std::to_string(*kp) : std::string("k"));
                  p += ";sigma=" + detail::sigma_label(sigma);
                  if (scpca) {
                    p += ";beta=" + detail::format_number(beta);
                    p += std::string(";center=") + (center ? "1" : "0");
                  }
                  if (multi) {
                    p += ";levels=" + std::to_string(lv);
                    if (raw) p += ";raw_scale=1";
                  }
                  if (sym == Symmetrization::kMutual) p += ";sym=mutual";
                  cells.push_back(GridCell{std::move(p), c});
                }
              }
            }
          }
        }
      }
    }
  }
  return cells;
}

inline Labeling fit_model(ModelId id, const DataMatrix& x, const ModelConfig& cfg) {
  switch (id) {
    case ModelId::kKMeans: return kmeans_fit(x, cfg.kmeans_config());
    case ModelId::kSc: return sc_fit(x, cfg);
    case ModelId::kScpca: return scpca_fit(x, cfg);
    case ModelId::kMultilevel: return multilevel_fit(x, cfg);
    case ModelId::kCosineSc: return cosine_sc_fit(x, cfg);
  }
  throw ParameterError("unknown model");
}

// ------------------------------------------------------------------ datasets

struct FileSource {
  std::filesystem::path path;
  LabelColumn label_column = LabelColumn::last();
  char delimiter = ',';
  bool header = false;
};

struct MoonsSource {
  Index n = 200;
  double noise = 0.05;
  std::uint64_t seed = 0;
};

struct BlobsSource {
  std::vector<std::vector<double>> centers;
  Index points_per = 50;
  double stddev = 1.0;
  std::uint64_t seed = 0;
};

struct DatasetSource {
  std::string name;
  std::variant<FileSource, MoonsSource, BlobsSource> source;
};

inline LabeledDataset load_source(const DatasetSource& src) {
  LabeledDataset ds = std::visit(
      [](const auto& s) -> LabeledDataset {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FileSource>) {
          return load_delimited(s.path, s.label_column, s.delimiter, s.header);
        } else if constexpr (std::is_same_v<T, MoonsSource>) {
          return gen_two_moons(s.n, s.noise, s.seed);
        } else {
          return gen_blobs(s.centers, s.points_per, s.stddev, s.seed);
        }
      },
      src.source);
  ds.name = src.name;
  return ds;
}

// ---------------------------------------------------------------------- spec

struct ModelSpec {
  ModelId id = ModelId::kSc;
  ParamGrid grid;
};

struct BenchmarkSpec {
  std::vector<DatasetSource> datasets;
  std::vector<ModelSpec> models;
  std::uint64_t seed = 0;
  int repeats = 5;
  std::filesystem::path output_dir = "results";
  int jobs = 1;
  int kmeans_restarts = 10;

  void validate() const {
    if (datasets.empty()) throw SpecError("spec lists no datasets");
    if (models.empty()) throw SpecError("spec lists no models");
    if (repeats < 1) throw SpecError("repeats must be >= 1");
    if (jobs < 1) throw SpecError("jobs must be >= 1");
    if (kmeans_restarts < 1) throw SpecError("kmeans_restarts must be >= 1");
    for (const auto& d : datasets) {
      if (d.name.empty() || d.name.find_first_of(",\n\r") != std::string::npos) {
        throw SpecError("dataset name '" + d.name + "' must be nonempty without commas");
      }
    }
    for (const auto& m : models) {
      const auto cells = expand_grid(m.id, m.grid);
      if (cells.empty()) {
        throw SpecError("grid of model " + std::string(model_name(m.id)) + " is empty");
      }
      for (const auto& c : cells) {
        try {
          c.config.validate();
        } catch (const Error& e) {
          throw SpecError("model " + std::string(model_name(m.id)) + " cell " + c.params + ": " +
                          e.what());
        }
      }
    }
  }
};

namespace detail {

using nlohmann::json;

inline Sigma parse_sigma(const json& v) {
  try {
    if (v.is_number()) return Sigma::fixed(v.get<double>());
    if (!v.is_string()) throw SpecError("sigma values must be numbers or strings");
    std::string s = v.get<std::string>();
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s == "auto") return Sigma::automatic(1.0);
    auto number = [&](std::string_view t) {
      const auto d = lgpsc::detail::parse_double(t);
      if (!d) throw SpecError("bad sigma expression '" + s + "'");
      return *d;
    };
    if (s.rfind("auto*", 0) == 0) return Sigma::automatic(number(std::string_view(s).substr(5)));
    if (s.rfind("auto/", 0) == 0) return Sigma::automatic(1.0 / number(std::string_view(s).substr(5)));
    if (s.size() > 5 && s.substr(s.size() - 5) == "*auto") {
      return Sigma::automatic(number(std::string_view(s).substr(0, s.size() - 5)));
    }
    throw SpecError("bad sigma expression '" + s + "'");
  } catch (const ParameterError& e) {
    throw SpecError(e.what());
  }
}

template <typename T, typename F>
std::vector<T> parse_list(const json& v, const std::string& key, F&& one) {
  std::vector<T> out;
  if (!v.is_array()) {
    out.push_back(one(v));
    return out;
  }
  if (v.empty()) throw SpecError("grid list '" + key + "' is empty");
  for (const auto& e : v) out.push_back(one(e));
  return out;
}

inline Index positive_index(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw SpecError("'" + key + "' values must be positive integers");
  }
  return static_cast<Index>(v.get<long long>());
}

inline ParamGrid parse_grid(ModelId id, const json& g) {
  ParamGrid grid = ParamGrid::defaults(id);
  if (g.is_null()) return grid;
  if (!g.is_object()) throw SpecError("grid must be an object");
  const bool graph = id == ModelId::kSc || id == ModelId::kScpca || id == ModelId::kMultilevel;
  for (const auto& [key, v] : g.items()) {
    auto only = [&](bool allowed) {
      if (!allowed) {
        throw SpecError("grid key '" + key + "' does not apply to model " +
                        std::string(model_name(id)));
      }
    };
    if (key == "k") {
      only(graph);
      grid.k = parse_list<Index>(v, key, [&](const json& e) { return positive_index(e, key); });
    } else if (key == "sigma") {
      only(graph);
      grid.sigma = parse_list<Sigma>(v, key, parse_sigma);
    } else if (key == "beta") {
      only(id == ModelId::kScpca);
      grid.beta = parse_list<double>(v, key, [&](const json& e) {
        if (!e.is_number()) throw SpecError("beta values must be numbers");
        const double b = e.get<double>();
        if (!(b >= 0.0 && b <= 1.0)) throw SpecError("beta must be in [0, 1]");
        return b;
      });
    } else if (key == "center") {
      only(id == ModelId::kScpca);
      grid.center = parse_list<bool>(v, key, [&](const json& e) {
        if (!e.is_boolean()) throw SpecError("center values must be booleans");
        return e.get<bool>();
      });
    } else if (key == "k_prime") {
      only(id == ModelId::kMultilevel);
      grid.k_prime = parse_list<std::optional<Index>>(v, key, [&](const json& e) {
        if (e.is_string() && e.get<std::string>() == "k") return std::optional<Index>{};
        return std::optional<Index>{positive_index(e, key)};
      });
    } else if (key == "levels") {
      only(id == ModelId::kMultilevel);
      grid.levels = parse_list<int>(v, key, [&](const json& e) {
        return static_cast<int>(positive_index(e, key));
      });
    } else if (key == "raw_coarse_scale") {
      only(id == ModelId::kMultilevel);
      grid.raw_coarse_scale = parse_list<bool>(v, key, [&](const json& e) {
        if (!e.is_boolean()) throw SpecError("raw_coarse_scale values must be booleans");
        return e.get<bool>();
      });
    } else if (key == "symmetrization") {
      only(graph);
      grid.symmetrization = parse_list<Symmetrization>(v, key, [&](const json& e) {
        const std::string s = e.is_string() ? e.get<std::string>() : "";
        if (s == "union") return Symmetrization::kUnion;
        if (s == "mutual") return Symmetrization::kMutual;
        throw SpecError("symmetrization must be \"union\" or \"mutual\"");
      });
    } else {
      throw SpecError("unknown grid key '" + key + "'");
    }
  }
  return grid;
}

inline std::uint64_t parse_seed(const json& v) {
  if (!v.is_number_integer()) throw SpecError("seeds must be integers");
  return v.is_number_unsigned() ? v.get<std::uint64_t>()
                                : static_cast<std::uint64_t>(v.get<std::int64_t>());
}

inline DatasetSource parse_dataset(const json& d, const std::filesystem::path& base) {
  if (!d.is_object()) throw SpecError("dataset entries must be objects");
  DatasetSource src;
  src.name = d.value("name", "");
  if (d.contains("path")) {
    FileSource f;
    f.path = d.at("path").get<std::string>();
    if (f.path.is_relative()) f.path = base / f.path;
    if (src.name.empty()) src.name = f.path.stem().string();
    if (d.contains("label_column")) {
      const auto& lc = d.at("label_column");
      if (lc.is_string() && lc.get<std::string>() == "last") {
        f.label_column = LabelColumn::last();
      } else if (lc.is_number_unsigned()) {
        f.label_column = LabelColumn::at(lc.get<std::size_t>());
      } else {
        throw SpecError("label_column must be \"last\" or a column index");
      }
    }
    const std::string delim = d.value("delimiter", ",");
    if (delim.size() != 1) throw SpecError("delimiter must be a single character");
    f.delimiter = delim == "\\t" ? '\t' : delim[0];
    f.header = d.value("header", false);
    src.source = f;
  } else if (d.contains("generator")) {
    const std::string gen = d.at("generator").get<std::string>();
    if (gen == "two_moons" || gen == "moons") {
      MoonsSource m;
      m.n = d.value("n", Index{200});
      m.noise = d.value("noise", 0.05);
      if (d.contains("seed")) m.seed = parse_seed(d.at("seed"));
      if (m.n < 4 || m.n % 2 != 0) throw SpecError("two_moons needs an even n >= 4");
      if (!(m.noise >= 0.0)) throw SpecError("two_moons noise must be >= 0");
      src.source = m;
    } else if (gen == "blobs") {
      BlobsSource b;
      b.centers = d.at("centers").get<std::vector<std::vector<double>>>();
      b.points_per = d.value("points_per", Index{50});
      b.stddev = d.value("stddev", 1.0);
      if (d.contains("seed")) b.seed = parse_seed(d.at("seed"));
      if (b.centers.size() < 2) throw SpecError("blobs need at least 2 centers");
      if (b.points_per < 1 || !(b.stddev > 0.0)) throw SpecError("bad blobs parameters");
      src.source = b;
    } else {
      throw SpecError("unknown generator '" + gen + "'");
    }
    if (src.name.empty()) src.name = gen;
  } else {
    throw SpecError("dataset needs either \"path\" or \"generator\"");
  }
  return src;
}

}  // namespace detail

/// Builds a spec from parsed JSON; relative dataset paths resolve against
/// base_dir.
inline BenchmarkSpec parse_spec(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  using nlohmann::json;
  BenchmarkSpec spec;
  try {
    if (!j.is_object()) throw SpecError("spec must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") {
        spec.seed = detail::parse_seed(v);
      } else if (key == "repeats") {
        spec.repeats = v.get<int>();
      } else if (key == "jobs") {
        spec.jobs = v.get<int>();
      } else if (key == "kmeans_restarts") {
        spec.kmeans_restarts = v.get<int>();
      } else if (key == "output_dir") {
        spec.output_dir = v.get<std::string>();
        if (spec.output_dir.is_relative()) spec.output_dir = base_dir / spec.output_dir;
      } else if (key == "datasets") {
        for (const auto& d : v) spec.datasets.push_back(detail::parse_dataset(d, base_dir));
      } else if (key == "models") {
        for (const auto& m : v) {
          const std::string name = m.is_string() ? m.get<std::string>() : m.value("model", "");
          const auto id = parse_model(name);
          if (!id) throw SpecError("unknown model '" + name + "'");
          const json grid = m.is_object() && m.contains("grid") ? m.at("grid") : json();
          spec.models.push_back(ModelSpec{*id, detail::parse_grid(*id, grid)});
        }
      } else {
        throw SpecError("unknown spec key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

/// Reads a JSON spec file. Comments (// and /* */) are allowed.
inline BenchmarkSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  return parse_spec(j, path.parent_path());
}

// ------------------------------------------------------------------- running

struct ResultRecord {
  std::string dataset;
  std::string model;
  std::string params;
  int repeat = 0;
  double nmi = 0.0;
  double ari = 0.0;
  double seconds = 0.0;
};

/// A dataset that failed to load (model and params empty) or a fit that
/// threw.
struct RunError {
  std::string dataset;
  std::string model;
  std::string params;
  std::string message;
};

struct BenchmarkResult {
  std::vector<ResultRecord> records;
  std::vector<RunError> errors;
};

using RecordSink = std::function<void(const ResultRecord&)>;

/// k-means seed of a repeat; shared by every model and grid cell.
inline std::uint64_t repeat_seed(std::uint64_t seed, int repeat) {
  return derive_seed(seed, static_cast<std::uint64_t>(repeat));
}

/// Runs every (dataset, model, grid cell, repeat). Records come out in that
/// canonical order whatever the job count; sink sees each one as soon as it
/// and all its predecessors are done.
inline BenchmarkResult run_benchmark(const BenchmarkSpec& spec, const RecordSink& sink = {}) {
  spec.validate();
  BenchmarkResult result;

  struct Job {
    ModelId model;
    const GridCell* cell;
    int repeat;
  };
  std::vector<std::vector<GridCell>> cells;
  cells.reserve(spec.models.size());
  for (const auto& m : spec.models) cells.push_back(expand_grid(m.id, m.grid));

  for (const auto& src : spec.datasets) {
    std::optional<LabeledDataset> ds;
    try {
      ds = load_source(src);
    } catch (const Error& e) {
      result.errors.push_back(RunError{src.name, "", "", e.what()});
      continue;
    }

    std::vector<Job> jobs;
    for (std::size_t m = 0; m < spec.models.size(); ++m) {
      for (const auto& cell : cells[m]) {
        for (int r = 0; r < spec.repeats; ++r) jobs.push_back(Job{spec.models[m].id, &cell, r});
      }
    }

    std::vector<std::optional<ResultRecord>> done(jobs.size());
    std::vector<std::optional<RunError>> failed(jobs.size());
    auto run_one = [&](std::size_t i) {
      const Job& job = jobs[i];
      ModelConfig cfg = job.cell->config;
      cfg.d = ds->d_true;
      cfg.kmeans.seed = repeat_seed(spec.seed, job.repeat);
      cfg.kmeans.restarts = spec.kmeans_restarts;
      try {
        const auto start = std::chrono::steady_clock::now();
        const Labeling pred = fit_model(job.model, ds->x, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        done[i] = ResultRecord{src.name,  std::string(model_name(job.model)), job.cell->params,
                               job.repeat, nmi(ds->labels, pred), ari(ds->labels, pred), secs};
      } catch (const Error& e) {
        failed[i] = RunError{src.name, std::string(model_name(job.model)), job.cell->params,
                             e.what()};
      }
    };
    auto collect = [&](std::size_t i) {
      if (done[i]) {
        if (sink) sink(*done[i]);
        result.records.push_back(std::move(*done[i]));
      } else if (failed[i]) {
        result.errors.push_back(std::move(*failed[i]));
      }
    };

    if (spec.jobs <= 1) {
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        run_one(i);
        collect(i);
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> workers;
      for (int w = 0; w < spec.jobs; ++w) {
        workers.emplace_back([&] {
          for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
        });
      }
      workers.clear();  // joins
      for (std::size_t i = 0; i < jobs.size(); ++i) collect(i);
    }
  }
  return result;
}

// ------------------------------------------------------------------- records

inline constexpr std::string_view kRecordHeader = "dataset,model,params,repeat,nmi,ari,seconds";

inline std::string format_record(const ResultRecord& r) {
  return r.dataset + "," + r.model + "," + r.params + "," + std::to_string(r.repeat) + "," +
         detail::fixed(r.nmi, 10) + "," + detail::fixed(r.ari, 10) + "," +
         detail::fixed(r.seconds, 6);
}

inline std::vector<ResultRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records " + path.string());
  std::vector<ResultRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (lgpsc::detail::trim(line).empty()) continue;
    if (line_no == 1) {
      if (lgpsc::detail::trim(line) != kRecordHeader) {
        throw ParseError(path.string() + ":1: expected header '" + std::string(kRecordHeader) + "'");
      }
      continue;
    }
    const auto f = lgpsc::detail::split(line, ',');
    auto fail = [&](const std::string& what) {
      return ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 7) throw fail("expected 7 fields, got " + std::to_string(f.size()));
    const auto repeat = lgpsc::detail::parse_integer(f[3]);
    const auto n = lgpsc::detail::parse_double(f[4]);
    const auto a = lgpsc::detail::parse_double(f[5]);
    const auto s = lgpsc::detail::parse_double(f[6]);
    if (!repeat || !n || !a || !s) throw fail("malformed numeric field");
    out.push_back(ResultRecord{std::string(f[0]), std::string(f[1]), std::string(f[2]),
                               static_cast<int>(*repeat), *n, *a, *s});
  }
  return out;
}

// ------------------------------------------------------------------- summary

enum class Reduction {
  kBest,  // cell with the best mean NMI over repeats
  kMean,  // mean over every record
};

struct SummaryRow {
  std::string dataset;
  std::string model;
  std::string params;  // best cell, or "*" for the mean reduction
  std::size_t runs = 0;
  double nmi = 0.0;
  double ari = 0.0;
  double seconds = 0.0;
};

struct ModelAverage {
  std::string model;
  std::size_t datasets = 0;
  double nmi = 0.0;
  double ari = 0.0;
  double seconds = 0.0;
};

struct Summary {
  Reduction reduction = Reduction::kBest;
  std::vector<SummaryRow> rows;          // one per (dataset, model)
  std::vector<ModelAverage> averages;    // one per model, across datasets
  std::vector<ResultRecord> records;     // inputs, for the quantile report
};

namespace detail {

template <typename T>
std::size_t slot(std::vector<T>& keys, const T& key) {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it != keys.end()) return static_cast<std::size_t>(it - keys.begin());
  keys.push_back(key);
  return keys.size() - 1;
}

struct Accum {
  std::size_t n = 0;
  double nmi = 0.0, ari = 0.0, seconds = 0.0;
  void add(const ResultRecord& r) {
    ++n;
    nmi += r.nmi;
    ari += r.ari;
    seconds += r.seconds;
  }
  SummaryRow row(std::string dataset, std::string model, std::string params) const {
    const double c = static_cast<double>(n);
    return SummaryRow{std::move(dataset), std::move(model), std::move(params), n,
                      nmi / c,            ari / c,          seconds / c};
  }
};

}  // namespace detail

inline Summary summarize(const std::vector<ResultRecord>& records, Reduction reduction) {
  if (records.empty()) throw ParameterError("cannot summarize an empty record set");
  Summary s;
  s.reduction = reduction;
  s.records = records;

  using Pair = std::pair<std::string, std::string>;
  std::vector<Pair> pairs;
  std::vector<std::vector<std::string>> cell_keys;
  std::vector<std::vector<detail::Accum>> cell_acc;
  std::vector<detail::Accum> total;
  for (const auto& r : records) {
    const std::size_t p = detail::slot(pairs, Pair{r.dataset, r.model});
    if (p == cell_keys.size()) {
      cell_keys.emplace_back();
      cell_acc.emplace_back();
      total.emplace_back();
    }
    const std::size_t c = detail::slot(cell_keys[p], r.params);
    if (c == cell_acc[p].size()) cell_acc[p].emplace_back();
    cell_acc[p][c].add(r);
    total[p].add(r);
  }

  std::vector<std::string> models;
  std::vector<detail::Accum> per_model;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [dataset, model] = pairs[p];
    if (reduction == Reduction::kMean) {
      s.rows.push_back(total[p].row(dataset, model, "*"));
    } else {
      std::size_t best = 0;
      double best_nmi = -1.0;
      for (std::size_t c = 0; c < cell_acc[p].size(); ++c) {
        const double v = cell_acc[p][c].nmi / static_cast<double>(cell_acc[p][c].n);
        if (v > best_nmi) {
          best_nmi = v;
          best = c;
        }
      }
      s.rows.push_back(cell_acc[p][best].row(dataset, model, cell_keys[p][best]));
    }
    const std::size_t m = detail::slot(models, model);
    if (m == per_model.size()) per_model.emplace_back();
    const SummaryRow& row = s.rows.back();
    per_model[m].add(ResultRecord{"", "", "", 0, row.nmi, row.ari, row.seconds});
  }
  for (std::size_t m = 0; m < models.size(); ++m) {
    const double c = static_cast<double>(per_model[m].n);
    s.averages.push_back(ModelAverage{models[m], per_model[m].n, per_model[m].nmi / c,
                                      per_model[m].ari / c, per_model[m].seconds / c});
  }
  return s;
}

/// Datasets on which the LGPSC models trail classic SC: multilevel below sc,
/// or scpca more than 0.01 below sc (NMI).
inline std::vector<std::string> trend_flags(const Summary& s) {
  std::vector<std::string> flags;
  std::vector<std::string> datasets;
  for (const auto& r : s.rows) detail::slot(datasets, r.dataset);
  for (const auto& d : datasets) {
    auto find = [&](std::string_view model) -> const SummaryRow* {
      for (const auto& r : s.rows) {
        if (r.dataset == d && r.model == model) return &r;
      }
      return nullptr;
    };
    const SummaryRow* sc = find("sc");
    if (sc == nullptr) continue;
    if (const SummaryRow* ml = find("multilevel"); ml && ml->nmi < sc->nmi) {
      flags.push_back(d + ": multilevel NMI " + detail::fixed(ml->nmi, 4) + " < sc NMI " +
                      detail::fixed(sc->nmi, 4));
    }
    if (const SummaryRow* sp = find("scpca"); sp && sp->nmi < sc->nmi - 0.01) {
      flags.push_back(d + ": scpca NMI " + detail::fixed(sp->nmi, 4) + " < sc NMI " +
                      detail::fixed(sc->nmi, 4) + " - 0.01");
    }
  }
  return flags;
}

/// Linear-interpolation quantile of sorted values, q in [0, 1].
inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// ------------------------------------------------------------------- reports

namespace detail {

/// Plain-text table with columns padded to their widest cell.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header, std::vector<bool> numeric)
      : numeric_(std::move(numeric)) {
    rows_.push_back(std::move(header));
  }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    auto emit = [&](const std::vector<std::string>& r) {
      std::string line;
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c > 0) line += "  ";
        const std::string pad(width[c] - r[c].size(), ' ');
        line += numeric_[c] ? pad + r[c] : r[c] + pad;
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    };
    emit(rows_.front());
    std::size_t total = 0;
    for (std::size_t w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    for (std::size_t i = 1; i < rows_.size(); ++i) emit(rows_[i]);
    return out;
  }

 private:
  std::vector<bool> numeric_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

inline std::string summary_csv(const Summary& s) {
  std::string out = "dataset,model,params,runs,nmi,ari,seconds\n";
  for (const auto& r : s.rows) {
    out += r.dataset + "," + r.model + "," + r.params + "," + std::to_string(r.runs) + "," +
           detail::fixed(r.nmi, 6) + "," + detail::fixed(r.ari, 6) + "," +
           detail::fixed(r.seconds, 6) + "\n";
  }
  for (const auto& a : s.averages) {
    out += "average," + a.model + ",*," + std::to_string(a.datasets) + "," +
           detail::fixed(a.nmi, 6) + "," + detail::fixed(a.ari, 6) + "," +
           detail::fixed(a.seconds, 6) + "\n";
  }
  return out;
}

inline std::string summary_text(const Summary& s) {
  std::string out = s.reduction == Reduction::kBest ? "Per-dataset results (best over grid)\n\n"
                                                    : "Per-dataset results (mean over runs)\n\n";
  detail::TextTable rows({"dataset", "model", "params", "runs", "NMI", "ARI", "seconds"},
                         {false, false, false, true, true, true, true});
  for (const auto& r : s.rows) {
    rows.add({r.dataset, r.model, r.params, std::to_string(r.runs), detail::fixed(r.nmi, 4),
              detail::fixed(r.ari, 4), detail::fixed(r.seconds, 4)});
  }
  out += rows.str();
  out += "\nAverages across datasets\n\n";
  detail::TextTable avg({"model", "datasets", "NMI", "ARI", "seconds"},
                        {false, true, true, true, true});
  for (const auto& a : s.averages) {
    avg.add({a.model, std::to_string(a.datasets), detail::fixed(a.nmi, 4), detail::fixed(a.ari, 4),
             detail::fixed(a.seconds, 4)});
  }
  out += avg.str();
  const auto flags = trend_flags(s);
  if (!flags.empty()) {
    out += "\nTrend flags\n\n";
    for (const auto& f : flags) out += "  FLAG " + f + "\n";
  }
  return out;
}

/// min, q1, median, q3, max of NMI and ARI per (dataset, model).
inline std::string quantiles_text(const Summary& s) {
  detail::TextTable t({"dataset", "model", "metric", "n", "min", "q1", "median", "q3", "max"},
                      {false, false, false, true, true, true, true, true, true});
  using Pair = std::pair<std::string, std::string>;
  std::vector<Pair> pairs;
  for (const auto& r : s.records) detail::slot(pairs, Pair{r.dataset, r.model});
  for (const auto& [dataset, model] : pairs) {
    for (const char* metric : {"nmi", "ari"}) {
      std::vector<double> v;
      for (const auto& r : s.records) {
        if (r.dataset == dataset && r.model == model) {
          v.push_back(std::string_view(metric) == "nmi" ? r.nmi : r.ari);
        }
      }
      std::sort(v.begin(), v.end());
      t.add({dataset, model, metric, std::to_string(v.size()), detail::fixed(v.front(), 4),
             detail::fixed(quantile(v, 0.25), 4), detail::fixed(quantile(v, 0.5), 4),
             detail::fixed(quantile(v, 0.75), 4), detail::fixed(v.back(), 4)});
    }
  }
  return t.str();
}

/// Writes records.csv, summary.csv, summary.txt and quantiles.txt into dir
/// (created if missing) and returns their paths.
inline std::vector<std::filesystem::path> emit_reports(const Summary& s,
                                                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::string records = std::string(kRecordHeader) + "\n";
  for (const auto& r : s.records) records += format_record(r) + "\n";

  const std::vector<std::pair<std::string, std::string>> files{
      {"records.csv", records},
      {"summary.csv", summary_csv(s)},
      {"summary.txt", summary_text(s)},
      {"quantiles.txt", quantiles_text(s)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    detail::write_file(dir / name, text);
    written.push_back(dir / name);
  }
  return written;
}

}  // namespace lgpsc::bench
