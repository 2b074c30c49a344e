// bench: run clustering benchmarks, summarize result records, list the
// available models and write synthetic datasets.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lgpsc/bench.hpp"
#include "lgpsc/data.hpp"

namespace fs = std::filesystem;
using namespace lgpsc;

namespace {

// Each token holds one or more "x,y,..." centers separated by ';'.
std::vector<std::vector<double>> parse_centers(const std::vector<std::string>& tokens) {
  std::vector<std::vector<double>> centers;
  for (const auto& text : tokens) {
    std::stringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
      std::vector<double> c;
      for (auto field : lgpsc::detail::split(group, ',')) {
        const auto v = lgpsc::detail::parse_double(field);
        if (!v) throw ParameterError("bad center coordinate '" + std::string(field) + "'");
        c.push_back(*v);
      }
      centers.push_back(std::move(c));
    }
  }
  return centers;
}

int run_command(const fs::path& spec_path, const std::optional<fs::path>& output_dir,
                const std::optional<std::uint64_t>& seed, const std::optional<int>& jobs) {
  bench::BenchmarkSpec spec = bench::load_spec(spec_path);
  if (output_dir) spec.output_dir = *output_dir;
  if (seed) spec.seed = *seed;
  if (jobs) spec.jobs = *jobs;

  fs::create_directories(spec.output_dir);
  const fs::path records_path = spec.output_dir / "records.csv";
  std::ofstream records(records_path);
  if (!records) throw IoError("cannot write " + records_path.string());
  records << bench::kRecordHeader << '\n' << std::flush;

  const auto result = bench::run_benchmark(spec, [&](const bench::ResultRecord& r) {
    records << bench::format_record(r) << '\n' << std::flush;
    std::cerr << r.dataset << ' ' << r.model << ' ' << r.params << " #" << r.repeat
              << " nmi=" << bench::detail::fixed(r.nmi, 4) << '\n';
  });
  records.close();

  for (const auto& e : result.errors) {
    std::cerr << "error: " << e.dataset;
    if (!e.model.empty()) std::cerr << ' ' << e.model << ' ' << e.params;
    std::cerr << ": " << e.message << '\n';
  }
  if (result.records.empty()) {
    std::cerr << "no records produced\n";
    return 1;
  }
  const auto summary = bench::summarize(result.records, bench::Reduction::kBest);
  bench::emit_reports(summary, spec.output_dir);
  std::cout << bench::summary_text(summary);
  std::cout << "\nreports written to " << spec.output_dir.string() << '\n';
  return 0;
}

int summarize_command(const fs::path& records_path, const std::string& reduction,
                      const std::optional<fs::path>& output_dir) {
  const auto records = bench::read_records(records_path);
  if (records.empty()) {
    std::cerr << records_path.string() << ": no records\n";
    return 1;
  }
  const auto summary = bench::summarize(
      records, reduction == "mean" ? bench::Reduction::kMean : bench::Reduction::kBest);
  std::cout << bench::summary_text(summary);
  if (output_dir) {
    bench::emit_reports(summary, *output_dir);
    std::cout << "\nreports written to " << output_dir->string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering benchmark harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a benchmark spec (JSON) and write reports");
  fs::path spec_path;
  std::optional<fs::path> run_output;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_jobs;
  run->add_option("spec-file", spec_path, "Benchmark spec file")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", run_output, "Directory for records and reports");
  run->add_option("--seed", run_seed, "Override the spec seed");
  run->add_option("--jobs", run_jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* summarize = app.add_subcommand("summarize", "Summarize a records.csv file");
  fs::path records_path;
  std::string reduction = "best";
  std::optional<fs::path> summary_output;
  summarize->add_option("records-file", records_path, "Records file")->required()->check(CLI::ExistingFile);
  summarize->add_option("--reduction", reduction, "best or mean")
      ->check(CLI::IsMember({"best", "mean"}));
  summarize->add_option("--output-dir", summary_output, "Also write report files here");

  auto* list = app.add_subcommand("list-models", "List model ids");

  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset");
  std::string generator;
  fs::path gen_out;
  Index n = 200;
  double noise = 0.05;
  std::uint64_t gen_seed = 0;
  std::vector<std::string> centers{"0,0", "10,0"};
  Index points_per = 50;
  double stddev = 1.0;
  gen->add_option("generator", generator, "two_moons or blobs")
      ->required()
      ->check(CLI::IsMember({"two_moons", "moons", "blobs"}));
  gen->add_option("-o,--out", gen_out, "Output file")->required();
  gen->add_option("--n", n, "two_moons: point count (even)");
  gen->add_option("--noise", noise, "two_moons: Gaussian noise stddev");
  gen->add_option("--centers", centers, "blobs: centers, e.g. \"0,0;5,5\" or 0,0 5,5");
  gen->add_option("--points-per", points_per, "blobs: points per center");
  gen->add_option("--stddev", stddev, "blobs: cluster stddev");
  gen->add_option("--seed", gen_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(spec_path, run_output, run_seed, run_jobs);
    if (*summarize) return summarize_command(records_path, reduction, summary_output);
    if (*list) {
      for (auto id : bench::all_models()) {
        std::cout << bench::model_name(id) << "\t" << bench::model_description(id) << '\n';
      }
      return 0;
    }
    if (*gen) {
      const LabeledDataset ds = generator == "blobs"
                                    ? gen_blobs(parse_centers(centers), points_per, stddev, gen_seed)
                                    : gen_two_moons(n, noise, gen_seed);
      write_delimited(ds, gen_out);
      std::cout << "wrote " << ds.x.point_count() << " points to " << gen_out.string() << '\n';
      return 0;
    }
  } catch (const lgpsc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
