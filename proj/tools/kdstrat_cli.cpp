// kdstrat: command-line front end for kd-tree stratified sampling.
//
//   kdstrat bounds --n 12 --d 2 --i 7
//   kdstrat generate --sampler kdt --n 16 --d 2 --seed 1
//   kdstrat discrepancy --l2 --sampler kdt --n 1024 --d 2 --reps 100
//   kdstrat convergence --plan smoke.toml
//
// Exit status: 0 success, 2 usage error, 1 runtime error.

#include <boost/multiprecision/cpp_int.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kdstrat/kdstrat.hpp"

namespace {

using kdstrat::InvalidArgument;
using kdstrat::detail::format_double;

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 1;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "text";
  unsigned threads = kdstrat::default_thread_count();
};

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw kdstrat::Error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kdstrat::Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Reads a point file written by `generate` (text or csv).
kdstrat::SampleSet read_points(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> coords;
  std::size_t d = 0;
  std::size_t n = 0;
  bool csv = false;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      csv = line.find(',') != std::string::npos;
      first = false;
      if (csv && line.rfind("i,", 0) == 0) continue;
    }
    if (csv)
      for (char& c : line)
        if (c == ',') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) row.push_back(kdstrat::detail::parse_number<double>(token, "coordinate"));
    if (csv && !row.empty()) row.erase(row.begin());
    if (row.empty()) continue;
    if (d == 0) d = row.size();
    if (row.size() != d) throw InvalidArgument("inconsistent point dimension in '" + path + "'");
    coords.insert(coords.end(), row.begin(), row.end());
    ++n;
  }
  if (n == 0) throw InvalidArgument("no points in '" + path + "'");
  return kdstrat::SampleSet(n, d, std::move(coords));
}

void check_format(const GlobalOptions& g) {
  if (g.format != "text" && g.format != "csv") throw InvalidArgument("--format must be text or csv");
}

void cmd_bounds(const GlobalOptions& g, std::uint64_t n, std::size_t d, std::uint64_t i) {
  using Rational = boost::multiprecision::cpp_rational;
  const kdstrat::PartitionParams params{n, d, i};
  const auto exact = kdstrat::calculate_bounds_as<Rational>(params);
  const auto approx = kdstrat::calculate_bounds(params);
  Output out(g.out);
  auto& os = out.stream();
  if (g.format == "csv") {
    os << "axis,lower,upper,lower_decimal,upper_decimal\n";
    for (std::size_t m = 0; m < d; ++m)
      os << m << ',' << exact.lower[m].str() << ',' << exact.upper[m].str() << ',' << format_double(approx.lower[m])
         << ',' << format_double(approx.upper[m]) << '\n';
    return;
  }
  os << "lower";
  for (const auto& v : exact.lower) os << ' ' << v.str();
  os << " | upper";
  for (const auto& v : exact.upper) os << ' ' << v.str();
  os << "\ndecimal lower";
  for (double v : approx.lower) os << ' ' << format_double(v);
  os << " | upper";
  for (double v : approx.upper) os << ' ' << format_double(v);
  os << '\n';
}

void write_points(std::ostream& os, const kdstrat::SampleSet& set, const std::string& format) {
  if (format == "csv") {
    os << 'i';
    for (std::size_t m = 0; m < set.dimension(); ++m) os << ",x" << m;
    os << '\n';
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (format == "csv") os << i << ',';
    const auto p = set.point(i);
    for (std::size_t m = 0; m < p.size(); ++m) {
      if (m > 0) os << (format == "csv" ? ',' : ' ');
      os << format_double(p[m]);
    }
    os << '\n';
  }
}

void cmd_generate(const GlobalOptions& g, const std::string& sampler, std::uint64_t n, std::size_t d) {
  const auto spec = kdstrat::SamplerSpec::parse(sampler, g.seed);
  const auto set = kdstrat::generate(spec, n, d, g.threads);
  Output out(g.out);
  write_points(out.stream(), set, g.format);
}

struct DiscrepancyOptions {
  bool l2 = false;
  bool linf = false;
  bool bound = false;
  std::string input;
  std::string sampler;
  std::uint64_t n = 0;
  std::size_t d = 0;
  std::size_t reps = 1;
};

void cmd_discrepancy(const GlobalOptions& g, const DiscrepancyOptions& o) {
  const bool l2 = o.l2 || (!o.linf && !o.bound);
  struct Row {
    std::string metric;
    double value;
    std::optional<double> stderr_of_mean;
    std::size_t reps;
  };
  std::vector<Row> rows;
  std::size_t n = o.n;
  std::size_t d = o.d;

  std::optional<kdstrat::SampleSet> single;
  if (!o.input.empty()) {
    if (!o.sampler.empty()) throw InvalidArgument("give either --input or --sampler, not both");
    single = read_points(o.input);
    n = single->size();
    d = single->dimension();
  } else if (o.sampler.empty()) {
    if (!o.bound || l2 || o.linf) throw InvalidArgument("discrepancy needs --input FILE or --sampler KIND");
  } else {
    if (o.n == 0 || o.d == 0) throw InvalidArgument("--sampler requires --n and --d");
    if (o.reps == 0) throw InvalidArgument("--reps must be positive");
    if (o.reps == 1) single = kdstrat::generate(kdstrat::SamplerSpec::parse(o.sampler, g.seed), o.n, o.d, g.threads);
  }

  if (l2) {
    if (single) {
      rows.push_back({"l2_star", kdstrat::l2_star_discrepancy(*single, g.threads), std::nullopt, 1});
    } else if (!o.sampler.empty()) {
      const auto m = kdstrat::mean_l2_discrepancy(kdstrat::SamplerSpec::parse(o.sampler), o.n, o.d, o.reps, g.seed,
                                                  g.threads);
      rows.push_back({"l2_star_mean", m.mean, m.stderr_of_mean, m.reps});
    }
  }
  if (o.linf) {
    if (!single) throw InvalidArgument("--linf-exact works on a single set (use --input or --reps 1)");
    rows.push_back({"linf_star_exact", kdstrat::linf_star_discrepancy_exact(*single), std::nullopt, 1});
  }
  if (o.bound) {
    if (n == 0 || d == 0) throw InvalidArgument("--bound needs --n and --d or an input file");
    rows.push_back({"theorem1_bound", kdstrat::theorem1_bound(n, d), std::nullopt, 1});
  }

  Output out(g.out);
  auto& os = out.stream();
  if (g.format == "csv") os << "metric,n,d,reps,value,stderr\n";
  for (const auto& r : rows) {
    if (g.format == "csv") {
      os << r.metric << ',' << n << ',' << d << ',' << r.reps << ',' << format_double(r.value) << ','
         << (r.stderr_of_mean ? format_double(*r.stderr_of_mean) : "") << '\n';
    } else {
      os << r.metric << ' ' << format_double(r.value);
      if (r.stderr_of_mean) os << " stderr " << format_double(*r.stderr_of_mean) << " reps " << r.reps;
      os << '\n';
    }
  }
}

struct ConvergenceOptions {
  std::string plan;
  std::string samplers;
  std::string integrands;
  std::string counts;
  std::size_t reps = 100;
  std::optional<std::uint64_t> volume_samples;
};

void cmd_convergence(const GlobalOptions& g, const ConvergenceOptions& o, bool seed_given) {
  kdstrat::ExperimentPlan plan;
  if (!o.plan.empty()) {
    if (!o.samplers.empty() || !o.integrands.empty() || !o.counts.empty())
      throw InvalidArgument("give either --plan or inline --samplers/--integrands/--counts");
    plan = kdstrat::parse_plan(read_file(o.plan));
    if (seed_given) plan.master_seed = g.seed;
  } else {
    if (o.samplers.empty() || o.integrands.empty() || o.counts.empty())
      throw InvalidArgument("convergence needs --plan FILE or --samplers, --integrands and --counts");
    plan.samplers = kdstrat::parse_sampler_list(o.samplers);
    plan.integrands = kdstrat::parse_integrand_list(o.integrands);
    plan.sample_counts = kdstrat::parse_count_list(o.counts);
    plan.reps = o.reps;
    plan.master_seed = g.seed;
  }
  if (o.volume_samples) plan.volume_samples = *o.volume_samples;
  plan.validate();

  const auto result = kdstrat::run_plan(plan, g.threads);
  Output out(g.out);
  kdstrat::write_csv(out.stream(), result.records);
  for (const auto& f : result.failures)
    std::cerr << "cell failed: sampler=" << f.sampler << " integrand=" << f.integrand << " n=" << f.n << ": "
              << f.message << '\n';
  if (!result.failures.empty()) throw kdstrat::Error(std::to_string(result.failures.size()) + " cell(s) failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jittered kd-tree stratified sampling: bounds, generation, discrepancy and convergence experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed (u64)");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--threads", g.threads, "Worker thread cap; never changes results")->check(CLI::PositiveNumber);

  std::uint64_t n = 0, i = 0;
  std::size_t d = 0;
  auto* bounds = app.add_subcommand("bounds", "Print the bounds of one kd-tree stratum");
  bounds->add_option("--n", n, "Stratum count")->required();
  bounds->add_option("--d", d, "Dimension")->required();
  bounds->add_option("--i", i, "Stratum index")->required();

  std::string sampler;
  auto* generate = app.add_subcommand("generate", "Write a sample set");
  generate->add_option("--sampler", sampler, "Sampler kind, optionally +shift for halton/sobol")->required();
  generate->add_option("--n", n, "Sample count")->required();
  generate->add_option("--d", d, "Dimension")->required();

  DiscrepancyOptions disc;
  auto* discrepancy = app.add_subcommand("discrepancy", "Measure star discrepancy");
  discrepancy->add_flag("--l2", disc.l2, "Mean L2 star discrepancy (Warnock)");
  discrepancy->add_flag("--linf-exact", disc.linf, "Exact L-infinity star discrepancy (n <= 512, d <= 3)");
  discrepancy->add_flag("--bound", disc.bound, "Also print the kd-tree worst-case bound");
  discrepancy->add_option("--input", disc.input, "Point file written by generate");
  discrepancy->add_option("--sampler", disc.sampler, "Sampler kind");
  discrepancy->add_option("--n", disc.n, "Sample count");
  discrepancy->add_option("--d", disc.d, "Dimension");
  discrepancy->add_option("--reps", disc.reps, "Independent realizations to average");

  ConvergenceOptions conv;
  std::uint64_t volume_samples = 0;
  auto* convergence = app.add_subcommand("convergence", "Run an MSE-vs-n experiment and write CSV");
  convergence->add_option("--plan", conv.plan, "Plan file (key = value lines)");
  convergence->add_option("--samplers", conv.samplers, "Comma-separated sampler ids");
  convergence->add_option("--integrands", conv.integrands, "Comma-separated kind:k:d[:seed]");
  convergence->add_option("--counts", conv.counts, "Comma-separated, strictly increasing sample counts");
  convergence->add_option("--reps", conv.reps, "Realizations per cell");
  auto* volume_opt = convergence->add_option("--volume-samples", volume_samples,
                                             "Points for nearest-site cell volume estimates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    check_format(g);
    if (*bounds) {
      cmd_bounds(g, n, d, i);
    } else if (*generate) {
      cmd_generate(g, sampler, n, d);
    } else if (*discrepancy) {
      cmd_discrepancy(g, disc);
    } else if (*convergence) {
      if (*volume_opt) conv.volume_samples = volume_samples;
      cmd_convergence(g, conv, seed_opt->count() > 0);
    }
  } catch (const kdstrat::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
