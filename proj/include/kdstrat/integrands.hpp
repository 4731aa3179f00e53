#pragma once

// Analytic test integrands on [0,1]^d with known reference integrals:
// Gaussian mixtures with randomly centred, randomly weighted isotropic modes,
// and random piecewise-constant functions normalised to integrate to one.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kdstrat/counter_rng.hpp"
#include "kdstrat/delaunay.hpp"
#include "kdstrat/error.hpp"
#include "kdstrat/parallel.hpp"
#include "kdstrat/samplers.hpp"

namespace kdstrat {

/// Anything the harness can integrate.
template <class F>
concept Integrand = requires(const F& f, std::span<const double> x) {
  { f(x) } -> std::convertible_to<double>;
  { f.dimension() } -> std::convertible_to<std::size_t>;
  { f.reference_integral() } -> std::convertible_to<double>;
};

/// f(x) = c.
struct ConstantIntegrand {
  std::size_t d = 1;
  double value = 1.0;

  double operator()(std::span<const double>) const noexcept { return value; }
  std::size_t dimension() const noexcept { return d; }
  double reference_integral() const noexcept { return value; }
  std::string id() const { return "const_d" + std::to_string(d); }
};

/// f(x) = x[axis].
struct CoordinateIntegrand {
  std::size_t d = 1;
  std::size_t axis = 0;

  double operator()(std::span<const double> x) const noexcept { return x[axis]; }
  std::size_t dimension() const noexcept { return d; }
  double reference_integral() const noexcept { return 0.5; }
  std::string id() const { return "x" + std::to_string(axis) + "_d" + std::to_string(d); }
};

// ---------------------------------------------------------------------------
// Gaussian mixture

class GaussianMixture {
 public:
  /// Weights are normalised to sum to one. sigma is one third of the minimum
  /// distance between centres; a single mode defaults to 1/3 and is the only
  /// case where an explicit sigma may be given.
  GaussianMixture(std::vector<std::vector<double>> centers, std::vector<double> weights,
                  std::optional<double> sigma = std::nullopt)
      : centers_(std::move(centers)), weights_(std::move(weights)) {
    if (centers_.empty()) throw InvalidArgument("mixture needs at least one mode");
    if (weights_.size() != centers_.size()) throw InvalidArgument("one weight per centre required");
    d_ = centers_.front().size();
    if (d_ == 0) throw InvalidArgument("dimension d must be positive");
    for (const auto& c : centers_)
      if (c.size() != d_) throw InvalidArgument("centres differ in dimension");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw InvalidArgument("mixture weights must be nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("mixture weights sum to zero");
    for (double& w : weights_) w /= total;

    if (centers_.size() == 1) {
      sigma_ = sigma.value_or(1.0 / 3.0);
      if (!(sigma_ > 0.0)) throw InvalidArgument("sigma must be positive");
    } else {
      if (sigma) throw InvalidArgument("sigma is derived from centre spacing when there are several modes");
      sigma_ = min_center_distance() / 3.0;
      if (!(sigma_ > 0.0)) throw DegenerateGeometry("coincident mixture centres");
    }
    peak_ = std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.5 * static_cast<double>(d_));
    reference_ = closed_form_integral();
  }

  std::size_t dimension() const noexcept { return d_; }
  std::size_t modes() const noexcept { return centers_.size(); }
  double sigma() const noexcept { return sigma_; }
  const std::vector<std::vector<double>>& centers() const noexcept { return centers_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double reference_integral() const noexcept { return reference_; }

  double operator()(std::span<const double> x) const noexcept {
    const double inv_two_var = 1.0 / (2.0 * sigma_ * sigma_);
    double value = 0.0;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      double r2 = 0.0;
      for (std::size_t m = 0; m < d_; ++m) {
        const double t = x[m] - centers_[j][m];
        r2 += t * t;
      }
      value += weights_[j] * std::exp(-r2 * inv_two_var);
    }
    return peak_ * value;
  }

  /// Copy with one centre moved; sigma is re-derived.
  GaussianMixture with_center(std::size_t j, std::vector<double> center) const {
    auto centers = centers_;
    centers.at(j) = std::move(center);
    return centers.size() == 1 ? GaussianMixture(std::move(centers), weights_, sigma_)
                               : GaussianMixture(std::move(centers), weights_);
  }

 private:
  double min_center_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < centers_.size(); ++a)
      for (std::size_t b = a + 1; b < centers_.size(); ++b) {
        double r2 = 0.0;
        for (std::size_t m = 0; m < d_; ++m) {
          const double t = centers_[a][m] - centers_[b][m];
          r2 += t * t;
        }
        best = std::min(best, std::sqrt(r2));
      }
    return best;
  }

  // Isotropic modes separate by axis: each is a product of 1D erf masses.
  double closed_form_integral() const {
    const double scale = 1.0 / (sigma_ * std::numbers::sqrt2);
    double total = 0.0;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      double mass = 1.0;
      for (double c : centers_[j]) mass *= 0.5 * (std::erf((1.0 - c) * scale) + std::erf(c * scale));
      total += weights_[j] * mass;
    }
    return total;
  }

  std::vector<std::vector<double>> centers_;
  std::vector<double> weights_;
  std::size_t d_ = 0;
  double sigma_ = 0.0;
  double peak_ = 0.0;
  double reference_ = 0.0;
};

inline constexpr int kMaxConstructionAttempts = 64;

inline GaussianMixture make_gmm(std::size_t k, std::size_t d, std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("mode count k must be positive");
  if (d == 0) throw InvalidArgument("dimension d must be positive");
  for (int attempt = 0; attempt < kMaxConstructionAttempts; ++attempt) {
    CounterStream rng(derive_seed(seed, hash_string("gmm"), static_cast<std::uint64_t>(attempt)));
    std::vector<std::vector<double>> centers(k, std::vector<double>(d));
    for (auto& c : centers)
      for (double& x : c) x = rng.next_double();
    std::vector<double> weights(k);
    for (double& w : weights) w = rng.next_double();
    try {
      return GaussianMixture(std::move(centers), std::move(weights));
    } catch (const DegenerateGeometry&) {
    } catch (const InvalidArgument&) {
      // all-zero weights; redraw
    }
  }
  throw DegenerateGeometry("could not construct a non-degenerate mixture");
}

// ---------------------------------------------------------------------------
// Piecewise constant

enum class CellRule { delaunay, nearest_site };

class PiecewiseConstant {
 public:
  /// Delaunay triangulation of the unit square with the given interior sites.
  static PiecewiseConstant triangulated(std::span<const Point2> interior, std::span<const double> raw_weights) {
    PiecewiseConstant f;
    f.d_ = 2;
    f.rule_ = CellRule::delaunay;
    std::vector<Point2> vertices;
    f.triangles_ = delaunay_unit_square(interior, vertices);
    for (const Point2& v : vertices) f.sites_.push_back({v[0], v[1]});
    for (const Triangle& t : f.triangles_) f.volumes_.push_back(triangle_area(vertices, t));
    f.interior_count_ = interior.size();
    f.set_raw_weights(raw_weights);
    return f;
  }

  /// Nearest-site cells over the interior sites plus the 2^d domain corners.
  /// Cell volumes come from `volume_samples` unscrambled low-discrepancy points.
  static PiecewiseConstant nearest_site(std::vector<std::vector<double>> interior, std::size_t d,
                                        std::span<const double> raw_weights, std::uint64_t volume_samples,
                                        unsigned threads = 1) {
    if (d == 0) throw InvalidArgument("dimension d must be positive");
    if (d > 20) throw InvalidArgument("nearest-site cells limited to d <= 20");
    PiecewiseConstant f;
    f.d_ = d;
    f.rule_ = CellRule::nearest_site;
    f.interior_count_ = interior.size();
    for (std::uint64_t corner = 0; corner < (std::uint64_t{1} << d); ++corner) {
      std::vector<double> c(d);
      for (std::size_t m = 0; m < d; ++m) c[m] = (corner >> m) & 1u ? 1.0 : 0.0;
      f.sites_.push_back(std::move(c));
    }
    for (auto& s : interior) {
      if (s.size() != d) throw InvalidArgument("site dimension mismatch");
      f.sites_.push_back(std::move(s));
    }
    std::sort(f.sites_.begin(), f.sites_.end());
    if (std::adjacent_find(f.sites_.begin(), f.sites_.end()) != f.sites_.end())
      throw DegenerateGeometry("duplicate sites");
    f.volumes_ = f.estimate_volumes(volume_samples, threads);
    f.set_raw_weights(raw_weights);
    return f;
  }

  /// Rebuilds from serialised parts without re-deriving volumes.
  static PiecewiseConstant from_parts(std::size_t d, CellRule rule, std::size_t interior_count,
                                      std::vector<std::vector<double>> sites, std::vector<Triangle> triangles,
                                      std::vector<double> weights, std::vector<double> volumes) {
    PiecewiseConstant f;
    f.d_ = d;
    f.rule_ = rule;
    f.interior_count_ = interior_count;
    f.sites_ = std::move(sites);
    f.triangles_ = std::move(triangles);
    f.weights_ = std::move(weights);
    f.volumes_ = std::move(volumes);
    if (f.weights_.size() != f.cell_count() || f.volumes_.size() != f.cell_count())
      throw InvalidArgument("piecewise-constant parts have inconsistent cell counts");
    return f;
  }

  std::size_t dimension() const noexcept { return d_; }
  CellRule rule() const noexcept { return rule_; }
  std::size_t interior_site_count() const noexcept { return interior_count_; }
  std::size_t cell_count() const noexcept { return rule_ == CellRule::delaunay ? triangles_.size() : sites_.size(); }
  const std::vector<std::vector<double>>& sites() const noexcept { return sites_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& volumes() const noexcept { return volumes_; }
  double reference_integral() const noexcept { return 1.0; }

  /// Copy with new raw weights, re-normalised to unit integral.
  PiecewiseConstant with_raw_weights(std::span<const double> raw) const {
    PiecewiseConstant f = *this;
    f.set_raw_weights(raw);
    return f;
  }

  std::size_t cell_of(std::span<const double> x) const {
    if (rule_ == CellRule::delaunay) {
      const Point2 p{x[0], x[1]};
      // Barycentric signs against each triangle in order; the first hit wins on shared edges.
      for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        const Point2 a{sites_[tri[0]][0], sites_[tri[0]][1]};
        const Point2 b{sites_[tri[1]][0], sites_[tri[1]][1]};
        const Point2 c{sites_[tri[2]][0], sites_[tri[2]][1]};
        if (orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0) return t;
      }
      // Only reachable through rounding on an edge; fall back to the least-violated triangle.
      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        const Point2 a{sites_[tri[0]][0], sites_[tri[0]][1]};
        const Point2 b{sites_[tri[1]][0], sites_[tri[1]][1]};
        const Point2 c{sites_[tri[2]][0], sites_[tri[2]][1]};
        const double score = std::min({orient2d(a, b, p), orient2d(b, c, p), orient2d(c, a, p)});
        if (score > best_score) {
          best_score = score;
          best = t;
        }
      }
      return best;
    }
    // Sites are sorted lexicographically, so the first strict minimum is the
    // lexicographic tie-break.
    std::size_t best = 0;
    double best_r2 = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sites_.size(); ++s) {
      double r2 = 0.0;
      for (std::size_t m = 0; m < d_; ++m) {
        const double t = x[m] - sites_[s][m];
        r2 += t * t;
      }
      if (r2 < best_r2) {
        best_r2 = r2;
        best = s;
      }
    }
    return best;
  }

  double operator()(std::span<const double> x) const { return weights_[cell_of(x)]; }

 private:
  PiecewiseConstant() = default;

  void set_raw_weights(std::span<const double> raw) {
    if (raw.size() != cell_count())
      throw InvalidArgument("expected " + std::to_string(cell_count()) + " raw weights, got " +
                            std::to_string(raw.size()));
    double mass = 0.0;
    for (std::size_t c = 0; c < raw.size(); ++c) {
      if (!(raw[c] >= 0.0)) throw InvalidArgument("raw weights must be nonnegative");
      mass += raw[c] * volumes_[c];
    }
    if (!(mass > 0.0)) throw DegenerateGeometry("piecewise-constant function has zero mass");
    weights_.assign(raw.begin(), raw.end());
    for (double& w : weights_) w /= mass;
  }

  std::vector<double> estimate_volumes(std::uint64_t samples, unsigned threads) const {
    if (samples == 0) throw InvalidArgument("volume estimate needs samples");
    const bool use_sobol = d_ <= sobol::kMaxDimension;
    constexpr std::uint64_t kChunk = 1 << 16;
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(sites_.size(), 0));
    parallel_for(chunks, threads, [&](std::size_t chunk) {
      std::vector<double> x(d_);
      const std::uint64_t end = std::min(samples, (chunk + 1) * kChunk);
      for (std::uint64_t i = chunk * kChunk; i < end; ++i) {
        if (use_sobol)
          sobol_point(i, x);
        else
          halton_point(i, x);
        ++partial[chunk][cell_of(x)];
      }
    });
    std::vector<double> volumes(sites_.size(), 0.0);
    for (std::size_t s = 0; s < sites_.size(); ++s) {
      std::uint64_t count = 0;
      for (const auto& p : partial) count += p[s];
      volumes[s] = static_cast<double>(count) / static_cast<double>(samples);
    }
    return volumes;
  }

  std::size_t d_ = 0;
  CellRule rule_ = CellRule::nearest_site;
  std::size_t interior_count_ = 0;
  std::vector<std::vector<double>> sites_;
  std::vector<Triangle> triangles_;
  std::vector<double> weights_;
  std::vector<double> volumes_;
};

inline constexpr std::uint64_t kDefaultVolumeSamples = 10'000'000;

/// k random sites; d = 2 triangulates, other d use nearest-site cells.
/// Degenerate site draws are redrawn from a perturbed seed.
inline PiecewiseConstant make_pwconst(std::size_t k, std::size_t d, std::uint64_t seed,
                                      std::uint64_t volume_samples = kDefaultVolumeSamples, unsigned threads = 1) {
  if (k == 0) throw InvalidArgument("site count k must be positive");
  if (d == 0) throw InvalidArgument("dimension d must be positive");
  for (int attempt = 0; attempt < kMaxConstructionAttempts; ++attempt) {
    CounterStream rng(derive_seed(seed, hash_string("pwconst"), static_cast<std::uint64_t>(attempt)));
    const auto interior_coordinate = [&rng] {
      double x = rng.next_double();
      while (x == 0.0) x = rng.next_double();
      return x;
    };
    try {
      if (d == 2) {
        std::vector<Point2> sites(k);
        for (auto& s : sites) s = {interior_coordinate(), interior_coordinate()};
        // A triangulation of k interior sites plus 4 corners has 2k + 2 faces.
        std::vector<double> raw(2 * k + 2);
        for (double& w : raw) w = rng.next_double();
        return PiecewiseConstant::triangulated(sites, raw);
      }
      std::vector<std::vector<double>> sites(k, std::vector<double>(d));
      for (auto& s : sites)
        for (double& x : s) x = interior_coordinate();
      std::vector<double> raw(k + (std::size_t{1} << d));
      for (double& w : raw) w = rng.next_double();
      return PiecewiseConstant::nearest_site(std::move(sites), d, raw, volume_samples, threads);
    } catch (const DegenerateGeometry&) {
    }
  }
  throw DegenerateGeometry("could not construct a non-degenerate piecewise-constant function");
}

// ---------------------------------------------------------------------------
// Descriptors and the tagged integrand

enum class IntegrandKind { gmm, pwconst };

constexpr std::string_view to_string(IntegrandKind kind) noexcept {
  return kind == IntegrandKind::gmm ? "gmm" : "pwconst";
}

inline IntegrandKind parse_integrand_kind(std::string_view s) {
  if (s == "gmm") return IntegrandKind::gmm;
  if (s == "pwconst") return IntegrandKind::pwconst;
  throw InvalidArgument("unknown integrand kind '" + std::string(s) + "'");
}

namespace detail {

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InvalidArgument("invalid " + std::string(what) + " '" + std::string(s) + "'");
  return value;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace detail

/// (kind, k, d, seed), written "kind:k:d:seed".
struct IntegrandDescriptor {
  IntegrandKind kind = IntegrandKind::gmm;
  std::size_t k = 1;
  std::size_t d = 2;
  std::uint64_t seed = 0;

  std::string id() const {
    return std::string(to_string(kind)) + "_k" + std::to_string(k) + "_d" + std::to_string(d) + "_s" +
           std::to_string(seed);
  }

  static IntegrandDescriptor parse(std::string_view text) {
    std::vector<std::string_view> parts;
    while (true) {
      const auto colon = text.find(':');
      parts.push_back(text.substr(0, colon));
      if (colon == std::string_view::npos) break;
      text = text.substr(colon + 1);
    }
    if (parts.size() < 3 || parts.size() > 4)
      throw InvalidArgument("integrand descriptor must be kind:k:d[:seed]");
    IntegrandDescriptor desc;
    desc.kind = parse_integrand_kind(parts[0]);
    desc.k = detail::parse_number<std::size_t>(parts[1], "k");
    desc.d = detail::parse_number<std::size_t>(parts[2], "d");
    if (parts.size() == 4) desc.seed = detail::parse_number<std::uint64_t>(parts[3], "seed");
    if (desc.k == 0 || desc.d == 0) throw InvalidArgument("integrand k and d must be positive");
    return desc;
  }

  friend bool operator==(const IntegrandDescriptor&, const IntegrandDescriptor&) = default;
};

class IntegrandSpec {
 public:
  IntegrandSpec(IntegrandDescriptor desc, std::variant<GaussianMixture, PiecewiseConstant> function)
      : desc_(desc), function_(std::move(function)) {
    reference_ = std::visit([](const auto& f) { return f.reference_integral(); }, function_);
  }

  const IntegrandDescriptor& descriptor() const noexcept { return desc_; }
  std::string id() const { return desc_.id(); }
  std::size_t dimension() const noexcept { return desc_.d; }
  double reference_integral() const noexcept { return reference_; }
  const std::variant<GaussianMixture, PiecewiseConstant>& function() const noexcept { return function_; }

  double operator()(std::span<const double> x) const {
    return std::visit([x](const auto& f) { return f(x); }, function_);
  }

 private:
  IntegrandDescriptor desc_;
  std::variant<GaussianMixture, PiecewiseConstant> function_;
  double reference_ = 0.0;
};

inline IntegrandSpec make_integrand(const IntegrandDescriptor& desc,
                                    std::uint64_t volume_samples = kDefaultVolumeSamples, unsigned threads = 1) {
  if (desc.kind == IntegrandKind::gmm) return IntegrandSpec(desc, make_gmm(desc.k, desc.d, desc.seed));
  return IntegrandSpec(desc, make_pwconst(desc.k, desc.d, desc.seed, volume_samples, threads));
}

// ---------------------------------------------------------------------------
// Text serialisation. Line oriented "key value..." records; doubles carry
// 17 significant digits so a round trip is exact.

inline std::string to_text(const IntegrandSpec& spec) {
  using detail::format_double;
  std::ostringstream out;
  const auto& desc = spec.descriptor();
  out << "kdstrat-integrand 1\n";
  out << "kind " << to_string(desc.kind) << "\n";
  out << "k " << desc.k << "\n";
  out << "d " << desc.d << "\n";
  out << "seed " << desc.seed << "\n";
  if (const auto* g = std::get_if<GaussianMixture>(&spec.function())) {
    out << "sigma " << format_double(g->sigma()) << "\n";
    for (std::size_t j = 0; j < g->modes(); ++j) {
      out << "mode " << format_double(g->weights()[j]);
      for (double c : g->centers()[j]) out << ' ' << format_double(c);
      out << "\n";
    }
  } else {
    const auto& f = std::get<PiecewiseConstant>(spec.function());
    out << "cell_rule " << (f.rule() == CellRule::delaunay ? "delaunay" : "nearest_site") << "\n";
    out << "interior_sites " << f.interior_site_count() << "\n";
    for (const auto& s : f.sites()) {
      out << "site";
      for (double x : s) out << ' ' << format_double(x);
      out << "\n";
    }
    for (std::size_t c = 0; c < f.cell_count(); ++c) {
      out << "cell " << format_double(f.weights()[c]) << ' ' << format_double(f.volumes()[c]);
      if (f.rule() == CellRule::delaunay)
        for (std::size_t v : f.triangles()[c]) out << ' ' << v;
      out << "\n";
    }
  }
  out << "reference_integral " << format_double(spec.reference_integral()) << "\n";
  return out.str();
}

inline IntegrandSpec integrand_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "kdstrat-integrand 1") throw InvalidArgument("not a kdstrat integrand file");

  IntegrandDescriptor desc;
  std::optional<double> sigma;
  std::optional<double> reference;
  std::vector<double> mode_weights;
  std::vector<std::vector<double>> centers;
  CellRule rule = CellRule::nearest_site;
  std::size_t interior = 0;
  std::vector<std::vector<double>> sites;
  std::vector<Triangle> triangles;
  std::vector<double> cell_weights, cell_volumes;

  const auto read_doubles = [](std::istringstream& fields) {
    std::vector<double> values;
    std::string token;
    while (fields >> token) values.push_back(detail::parse_number<double>(token, "number"));
    return values;
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    std::string value;
    if (key == "kind") {
      fields >> value;
      desc.kind = parse_integrand_kind(value);
    } else if (key == "k") {
      fields >> desc.k;
    } else if (key == "d") {
      fields >> desc.d;
    } else if (key == "seed") {
      fields >> desc.seed;
    } else if (key == "sigma") {
      fields >> value;
      sigma = detail::parse_number<double>(value, "sigma");
    } else if (key == "mode") {
      auto values = read_doubles(fields);
      if (values.size() != desc.d + 1) throw InvalidArgument("mode line has wrong arity");
      mode_weights.push_back(values.front());
      centers.emplace_back(values.begin() + 1, values.end());
    } else if (key == "cell_rule") {
      fields >> value;
      rule = value == "delaunay" ? CellRule::delaunay : CellRule::nearest_site;
    } else if (key == "interior_sites") {
      fields >> interior;
    } else if (key == "site") {
      sites.push_back(read_doubles(fields));
    } else if (key == "cell") {
      auto values = read_doubles(fields);
      if (values.size() < 2) throw InvalidArgument("cell line needs weight and volume");
      cell_weights.push_back(values[0]);
      cell_volumes.push_back(values[1]);
      if (rule == CellRule::delaunay) {
        if (values.size() != 5) throw InvalidArgument("delaunay cell needs three vertex indices");
        triangles.push_back({static_cast<std::size_t>(values[2]), static_cast<std::size_t>(values[3]),
                             static_cast<std::size_t>(values[4])});
      }
    } else if (key == "reference_integral") {
      fields >> value;
      reference = detail::parse_number<double>(value, "reference_integral");
    } else {
      throw InvalidArgument("unknown integrand field '" + key + "'");
    }
  }

  std::optional<IntegrandSpec> spec;
  if (desc.kind == IntegrandKind::gmm) {
    GaussianMixture g = centers.size() == 1 ? GaussianMixture(centers, mode_weights, sigma)
                                            : GaussianMixture(centers, mode_weights);
    spec.emplace(desc, std::move(g));
  } else {
    spec.emplace(desc, PiecewiseConstant::from_parts(desc.d, rule, interior, std::move(sites), std::move(triangles),
                                                     std::move(cell_weights), std::move(cell_volumes)));
  }
  if (reference && std::abs(*reference - spec->reference_integral()) > 1e-12 * std::max(1.0, std::abs(*reference)))
    throw InvalidArgument("recorded reference_integral does not match the reconstructed integrand");
  return *std::move(spec);
}

}  // namespace kdstrat
