#pragma once

// Convergence experiments: mean squared error of Monte Carlo estimates
// against exact reference integrals, over a grid of samplers, integrands and
// sample counts. Every (sampler, integrand, n, rep) cell has its own seed
// derived from identifiers, so results are independent of list order and of
// how many threads run them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "kdstrat/counter_rng.hpp"
#include "kdstrat/discrepancy.hpp"
#include "kdstrat/error.hpp"
#include "kdstrat/integrands.hpp"
#include "kdstrat/parallel.hpp"
#include "kdstrat/sample_set.hpp"
#include "kdstrat/samplers.hpp"

namespace kdstrat {

struct ConvergenceRecord {
  std::string sampler;
  std::string integrand;
  std::size_t d = 0;
  std::uint64_t n = 0;
  std::size_t reps = 0;
  double mse = 0.0;
  double stderr_of_mse = 0.0;

  friend bool operator==(const ConvergenceRecord&, const ConvergenceRecord&) = default;
};

template <Integrand F>
double estimate(const F& f, const SampleSet& set) {
  if (set.dimension() != f.dimension())
    throw InvalidArgument("sample dimension " + std::to_string(set.dimension()) + " does not match integrand dimension " +
                          std::to_string(f.dimension()));
  if (set.size() == 0) throw InvalidArgument("cannot estimate from an empty set");
  CompensatedSum sum;
  for (std::size_t i = 0; i < set.size(); ++i) sum.add(f(set.point(i)));
  return sum.value() / static_cast<double>(set.size());
}

/// Whether repeated realizations of this sampler differ. Unrandomized QMC
/// sets are deterministic and run once.
constexpr bool is_stochastic(const SamplerSpec& spec) noexcept {
  return !is_qmc(spec.kind) || spec.randomization != Randomization::none;
}

namespace detail {

inline void summarize(ConvergenceRecord& rec, std::span<const double> squared_errors) {
  const auto reps = static_cast<double>(squared_errors.size());
  CompensatedSum sum;
  for (double e : squared_errors) sum.add(e);
  rec.reps = squared_errors.size();
  rec.mse = sum.value() / reps;
  rec.stderr_of_mse = 0.0;
  if (squared_errors.size() > 1) {
    CompensatedSum sq;
    for (double e : squared_errors) sq.add((e - rec.mse) * (e - rec.mse));
    rec.stderr_of_mse = std::sqrt(sq.value() / (reps - 1.0) / reps);
  }
}

template <Integrand F>
double squared_error(const SamplerSpec& sampler, const F& f, std::uint64_t n, std::uint64_t rep_seed) {
  SamplerSpec realization = sampler;
  realization.master_seed = rep_seed;
  const double err = estimate(f, generate(realization, n, f.dimension())) - f.reference_integral();
  return err * err;
}

template <class F>
std::string integrand_id(const F& f) {
  if constexpr (requires { f.id(); })
    return f.id();
  else
    return "integrand";
}

}  // namespace detail

/// MSE over `reps` realizations seeded from `seed`. Deterministic samplers
/// (unrandomized Halton/Sobol) are evaluated once and reported with reps = 1.
template <Integrand F>
ConvergenceRecord run_mse(const SamplerSpec& sampler, const F& f, std::uint64_t n, std::size_t reps,
                          std::uint64_t seed, unsigned threads = 1) {
  sampler.validate();
  if (is_stochastic(sampler) && reps < 2) throw InvalidArgument("run_mse needs reps >= 2");
  const std::size_t runs = is_stochastic(sampler) ? reps : 1;
  std::vector<double> errors(runs);
  parallel_for(runs, threads,
               [&](std::size_t r) { errors[r] = detail::squared_error(sampler, f, n, realization_seed(seed, r)); });
  ConvergenceRecord rec{sampler.id(), detail::integrand_id(f), f.dimension(), n, 0, 0.0, 0.0};
  detail::summarize(rec, errors);
  return rec;
}

struct ExperimentPlan {
  std::vector<SamplerSpec> samplers;
  std::vector<IntegrandDescriptor> integrands;
  std::vector<std::uint64_t> sample_counts;
  std::size_t reps = 100;
  std::uint64_t master_seed = 0;
  /// Points used to estimate nearest-site cell volumes for pwconst with d != 2.
  std::uint64_t volume_samples = kDefaultVolumeSamples;

  void validate() const {
    if (samplers.empty()) throw InvalidArgument("plan lists no samplers");
    if (integrands.empty()) throw InvalidArgument("plan lists no integrands");
    if (sample_counts.empty()) throw InvalidArgument("plan lists no sample counts");
    if (reps < 2) throw InvalidArgument("plan reps must be at least 2");
    for (std::size_t j = 0; j < sample_counts.size(); ++j) {
      if (sample_counts[j] == 0) throw InvalidArgument("sample counts must be positive");
      if (j > 0 && sample_counts[j] <= sample_counts[j - 1])
        throw InvalidArgument("sample counts must be strictly increasing");
    }
    for (const auto& s : samplers) s.validate();
  }
};

struct CellFailure {
  std::string sampler;
  std::string integrand;
  std::uint64_t n = 0;
  std::string message;
};

struct PlanResult {
  std::vector<ConvergenceRecord> records;
  std::vector<CellFailure> failures;
};

/// Seed of one plan cell. Depends on identifiers only, never on positions.
inline std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view sampler_id, std::string_view integrand_id,
                               std::uint64_t n) {
  return derive_seed(master_seed, hash_string(sampler_id), hash_string(integrand_id), n);
}

/// Runs the cross product of samplers x integrands x counts. Counts a sampler
/// cannot accept (non-square n for grid kinds) are skipped. Records come back
/// sorted by (integrand, sampler, n); failing cells are reported separately.
inline PlanResult run_plan(const ExperimentPlan& plan, unsigned threads = 1) {
  plan.validate();

  std::vector<IntegrandSpec> integrands;
  integrands.reserve(plan.integrands.size());
  for (const auto& desc : plan.integrands) integrands.push_back(make_integrand(desc, plan.volume_samples, threads));

  struct Cell {
    const SamplerSpec* sampler;
    const IntegrandSpec* integrand;
    std::uint64_t n;
    std::uint64_t seed;
    std::size_t runs;
    std::size_t first_task;
  };
  std::vector<Cell> cells;
  std::size_t tasks = 0;
  for (const auto& f : integrands)
    for (const auto& s : plan.samplers)
      for (std::uint64_t n : plan.sample_counts) {
        if (!accepts(s.kind, n, f.dimension())) continue;
        const std::size_t runs = is_stochastic(s) ? plan.reps : 1;
        cells.push_back(Cell{&s, &f, n, cell_seed(plan.master_seed, s.id(), f.id(), n), runs, tasks});
        tasks += runs;
      }

  std::vector<double> errors(tasks);
  std::vector<std::string> messages(tasks);
  std::vector<std::size_t> owner(tasks);
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t r = 0; r < cells[c].runs; ++r) owner[cells[c].first_task + r] = c;

  parallel_for(tasks, threads, [&](std::size_t t) {
    const Cell& cell = cells[owner[t]];
    const std::size_t rep = t - cell.first_task;
    try {
      errors[t] = detail::squared_error(*cell.sampler, *cell.integrand, cell.n, realization_seed(cell.seed, rep));
    } catch (const std::exception& e) {
      messages[t] = e.what();
    }
  });

  PlanResult result;
  for (const Cell& cell : cells) {
    const auto begin = messages.begin() + static_cast<std::ptrdiff_t>(cell.first_task);
    const auto failed = std::find_if(begin, begin + static_cast<std::ptrdiff_t>(cell.runs),
                                     [](const std::string& m) { return !m.empty(); });
    if (failed != begin + static_cast<std::ptrdiff_t>(cell.runs)) {
      result.failures.push_back({cell.sampler->id(), cell.integrand->id(), cell.n, *failed});
      continue;
    }
    ConvergenceRecord rec{cell.sampler->id(), cell.integrand->id(), cell.integrand->dimension(), cell.n, 0, 0.0, 0.0};
    detail::summarize(rec, std::span<const double>(errors).subspan(cell.first_task, cell.runs));
    result.records.push_back(std::move(rec));
  }
  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.integrand, a.sampler, a.n) < std::tie(b.integrand, b.sampler, b.n);
  });
  return result;
}

// ---------------------------------------------------------------------------
// CSV output

inline constexpr std::string_view kCsvHeader = "sampler,integrand,d,n,reps,mse,stderr";

inline void write_csv(std::ostream& out, std::span<const ConvergenceRecord> records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records)
    out << r.sampler << ',' << r.integrand << ',' << r.d << ',' << r.n << ',' << r.reps << ','
        << detail::format_double(r.mse) << ',' << detail::format_double(r.stderr_of_mse) << '\n';
}

// ---------------------------------------------------------------------------
// Plan files: one `key = value` per line, '#' comments, list values separated
// by commas. Brackets and quotes are ignored, so TOML-style arrays work.
//
//   samplers   = ["kdt", "random", "sobol+shift"]
//   integrands = ["gmm:3:2:1"]        # kind:k:d[:seed]
//   counts     = [64, 256, 1024]
//   reps       = 100
//   seed       = 7

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(std::string_view value) {
  std::string cleaned;
  for (char c : value)
    if (c != '[' && c != ']' && c != '"' && c != '\'') cleaned += c;
  std::vector<std::string> items;
  std::string_view rest = cleaned;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return items;
}

}  // namespace detail

inline std::vector<SamplerSpec> parse_sampler_list(std::string_view value) {
  std::vector<SamplerSpec> out;
  for (const auto& item : detail::split_list(value)) out.push_back(SamplerSpec::parse(item));
  return out;
}

inline std::vector<IntegrandDescriptor> parse_integrand_list(std::string_view value) {
  std::vector<IntegrandDescriptor> out;
  for (const auto& item : detail::split_list(value)) out.push_back(IntegrandDescriptor::parse(item));
  return out;
}

inline std::vector<std::uint64_t> parse_count_list(std::string_view value) {
  std::vector<std::uint64_t> out;
  for (const auto& item : detail::split_list(value)) out.push_back(detail::parse_number<std::uint64_t>(item, "count"));
  return out;
}

inline ExperimentPlan parse_plan(std::string_view text) {
  ExperimentPlan plan;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("plan line " + std::to_string(line_no) + ": expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    const auto scalar = [&] {
      const auto items = detail::split_list(value);
      if (items.size() != 1) throw InvalidArgument("plan key '" + std::string(key) + "' takes one value");
      return items.front();
    };
    if (key == "samplers")
      plan.samplers = parse_sampler_list(value);
    else if (key == "integrands")
      plan.integrands = parse_integrand_list(value);
    else if (key == "counts" || key == "sample_counts")
      plan.sample_counts = parse_count_list(value);
    else if (key == "reps")
      plan.reps = detail::parse_number<std::size_t>(scalar(), "reps");
    else if (key == "seed" || key == "master_seed")
      plan.master_seed = detail::parse_number<std::uint64_t>(scalar(), "seed");
    else if (key == "volume_samples")
      plan.volume_samples = detail::parse_number<std::uint64_t>(scalar(), "volume_samples");
    else
      throw InvalidArgument("plan line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
  plan.validate();
  return plan;
}

}  // namespace kdstrat
