#include "lobrate/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lobrate/error.hpp"
#include "lobrate/special.hpp"

namespace lobrate::dist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void domain(bool ok, const std::string& what) {
    if (!ok) throw Error(Errc::DomainError, what);
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double inv_logit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Weights normalised to sum to one; checks shape and sign.
std::array<double, kArrivalTicks> normalised_weights(Density density) {
    if (density.size() != static_cast<std::size_t>(kArrivalTicks)) {
        throw Error(Errc::LengthMismatch, "density must have 15 entries, got " + std::to_string(density.size()));
    }
    double total = 0.0;
    for (double w : density) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::DomainError, "density entries must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw Error(Errc::DegenerateData, "density has no positive mass");
    std::array<double, kArrivalTicks> out{};
    for (int i = 0; i < kArrivalTicks; ++i) out[i] = density[i] / total;
    return out;
}

int positive_ticks(const std::array<double, kArrivalTicks>& w) {
    return static_cast<int>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0.0; }));
}

double log_pmf_dw(double q, double beta, long x) {
    // ln(q^a - q^b) = a ln q + ln(1 - q^(b - a))
    const double lq = std::log(q);
    const double a = x == 1 ? 0.0 : std::pow(static_cast<double>(x - 1), beta);
    const double b = std::pow(static_cast<double>(x), beta);
    return a * lq + std::log(-std::expm1((b - a) * lq));
}

double log_pmf_bb(double alpha, double beta, int n, long x) {
    const double ln_choose = stats::ln_gamma(n + 1.0) - stats::ln_gamma(static_cast<double>(x) + 1.0) -
                             stats::ln_gamma(static_cast<double>(n - x) + 1.0);
    return ln_choose + stats::ln_beta(static_cast<double>(x) + alpha, static_cast<double>(n - x) + beta) -
           stats::ln_beta(alpha, beta);
}

double log_pmf_geometric(double p, long x) {
    if (p == 1.0) return x == 1 ? 0.0 : -std::numeric_limits<double>::infinity();
    return static_cast<double>(x - 1) * std::log1p(-p) + std::log(p);
}

TickCurve normalise(TickCurve raw) {
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    domain(total > 0.0 && std::isfinite(total), "model puts no representable mass on ticks 1..15");
    for (auto& v : raw) v /= total;
    return raw;
}

}  // namespace

FamilyTag tag_of(const ModelFamily& model) noexcept {
    return static_cast<FamilyTag>(model.index());
}

std::string_view short_name(FamilyTag tag) noexcept {
    switch (tag) {
        case FamilyTag::Geometric: return "geo";
        case FamilyTag::DiscreteWeibull: return "dw";
        case FamilyTag::BetaBinomial: return "bb";
        case FamilyTag::Exponential: return "exp";
        case FamilyTag::PowerLaw: return "pow";
    }
    return "?";
}

std::string_view display_name(FamilyTag tag) noexcept {
    switch (tag) {
        case FamilyTag::Geometric: return "Geometric";
        case FamilyTag::DiscreteWeibull: return "Discrete Weibull";
        case FamilyTag::BetaBinomial: return "Beta-Binomial";
        case FamilyTag::Exponential: return "Exponential";
        case FamilyTag::PowerLaw: return "Power law";
    }
    return "?";
}

std::optional<FamilyTag> parse_family(std::string_view name) noexcept {
    for (auto tag : kAllFamilies) {
        if (short_name(tag) == name) return tag;
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, double>> parameters(const ModelFamily& model) {
    return std::visit(overloaded{
                          [](const Geometric& m) -> std::vector<std::pair<std::string, double>> {
                              return {{"p", m.p}};
                          },
                          [](const DiscreteWeibull& m) -> std::vector<std::pair<std::string, double>> {
                              return {{"q", m.q}, {"beta", m.beta}};
                          },
                          [](const BetaBinomial& m) -> std::vector<std::pair<std::string, double>> {
                              return {{"alpha", m.alpha}, {"beta", m.beta}, {"n", static_cast<double>(m.n)}};
                          },
                          [](const Exponential& m) -> std::vector<std::pair<std::string, double>> {
                              return {{"lambda", m.lambda}};
                          },
                          [](const PowerLaw& m) -> std::vector<std::pair<std::string, double>> {
                              return {{"k", m.k}, {"alpha", m.alpha}};
                          },
                      },
                      model);
}

void validate(const ModelFamily& model) {
    std::visit(overloaded{
                   // p = 1 is the boundary estimate for data entirely on tick 1.
                   [](const Geometric& m) { domain(m.p > 0.0 && m.p <= 1.0, "geometric p must lie in (0, 1]"); },
                   [](const DiscreteWeibull& m) {
                       domain(m.q > 0.0 && m.q < 1.0, "discrete Weibull q must lie in (0, 1)");
                       domain(m.beta > 0.0 && std::isfinite(m.beta), "discrete Weibull beta must be > 0");
                   },
                   [](const BetaBinomial& m) {
                       domain(m.alpha > 0.0 && std::isfinite(m.alpha), "beta-binomial alpha must be > 0");
                       domain(m.beta > 0.0 && std::isfinite(m.beta), "beta-binomial beta must be > 0");
                       domain(m.n >= 1, "beta-binomial n must be >= 1");
                   },
                   [](const Exponential& m) {
                       domain(m.lambda > 0.0 && std::isfinite(m.lambda), "exponential lambda must be > 0");
                   },
                   [](const PowerLaw& m) {
                       domain(m.k > 0.0 && std::isfinite(m.k), "power law k must be > 0");
                       domain(std::isfinite(m.alpha), "power law alpha must be finite");
                   },
               },
               model);
}

double pmf_discrete_weibull(double q, double beta, long x) {
    validate(DiscreteWeibull{q, beta});
    domain(x >= 1, "discrete Weibull support starts at 1");
    return std::exp(log_pmf_dw(q, beta, x));
}

double pmf_beta_binomial(double alpha, double beta, int n, long x) {
    validate(BetaBinomial{alpha, beta, n});
    domain(x >= 0 && x <= n, "beta-binomial x must lie in [0, n]");
    return std::exp(log_pmf_bb(alpha, beta, n, x));
}

double pmf_geometric(double p, long x) {
    domain(p > 0.0 && p < 1.0, "geometric p must lie in (0, 1)");
    domain(x >= 1, "geometric support starts at 1");
    return std::pow(1.0 - p, static_cast<double>(x - 1)) * p;
}

double power_law_value(double k, double alpha, long i) {
    return k / std::pow(static_cast<double>(i), alpha);
}

TickCurve discretize_exponential(double lambda) {
    validate(Exponential{lambda});
    // Area over [i - 1, i) is e^{-lambda (i-1)} (1 - e^{-lambda}); the common
    // factor cancels in the normalisation but is kept so raw masses are exact.
    const double width = -std::expm1(-lambda);
    TickCurve raw{};
    for (int i = 1; i <= kArrivalTicks; ++i) raw[i - 1] = std::exp(-lambda * (i - 1)) * width;
    return normalise(raw);
}

double log_mass_at_tick(const ModelFamily& model, int tick) {
    validate(model);
    domain(tick >= 1, "ticks start at 1");
    return std::visit(overloaded{
                          [&](const Geometric& m) { return log_pmf_geometric(m.p, tick); },
                          [&](const DiscreteWeibull& m) { return log_pmf_dw(m.q, m.beta, tick); },
                          [&](const BetaBinomial& m) {
                              if (tick - 1 > m.n) return -std::numeric_limits<double>::infinity();
                              return log_pmf_bb(m.alpha, m.beta, m.n, tick - 1);
                          },
                          [&](const Exponential& m) {
                              return -m.lambda * (tick - 1) + std::log(-std::expm1(-m.lambda));
                          },
                          [&](const PowerLaw& m) { return std::log(m.k) - m.alpha * std::log(double(tick)); },
                      },
                      model);
}

TickCurve tick_curve(const ModelFamily& model) {
    validate(model);
    if (const auto* e = std::get_if<Exponential>(&model)) return discretize_exponential(e->lambda);
    TickCurve raw{};
    if (const auto* dw = std::get_if<DiscreteWeibull>(&model)) {
        // Differences of the survival function q^(x^beta), each computed as
        // S(i-1) (1 - q^(i^beta - (i-1)^beta)) to avoid cancellation.
        const double lq = std::log(dw->q);
        for (int i = 1; i <= kArrivalTicks; ++i) {
            const double a = i == 1 ? 0.0 : std::pow(i - 1.0, dw->beta);
            const double b = std::pow(static_cast<double>(i), dw->beta);
            raw[i - 1] = std::exp(a * lq) * -std::expm1((b - a) * lq);
        }
        return normalise(raw);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&model)) {
        for (int i = 1; i <= kArrivalTicks; ++i) raw[i - 1] = power_law_value(pl->k, pl->alpha, i);
        return normalise(raw);
    }
    for (int i = 1; i <= kArrivalTicks; ++i) raw[i - 1] = std::exp(log_mass_at_tick(model, i));
    return normalise(raw);
}

double log_likelihood(Density density, const ModelFamily& model, bool truncated) {
    const auto w = normalised_weights(density);
    double log_z = 0.0;
    if (truncated) {
        std::array<double, kArrivalTicks> logs{};
        for (int i = 1; i <= kArrivalTicks; ++i) logs[i - 1] = log_mass_at_tick(model, i);
        const double mx = *std::max_element(logs.begin(), logs.end());
        double s = 0.0;
        for (double l : logs) s += std::exp(l - mx);
        log_z = mx + std::log(s);
    }
    double total = 0.0;
    for (int i = 1; i <= kArrivalTicks; ++i) {
        if (w[i - 1] == 0.0) continue;
        total += w[i - 1] * (log_mass_at_tick(model, i) - log_z);
    }
    return total;
}

double power_law_residual(Density density, double k, double alpha) {
    if (density.size() != static_cast<std::size_t>(kArrivalTicks)) {
        throw Error(Errc::LengthMismatch, "density must have 15 entries");
    }
    double rss = 0.0;
    for (int i = 1; i <= kArrivalTicks; ++i) {
        const double r = density[i - 1] - power_law_value(k, alpha, i);
        rss += r * r;
    }
    return rss;
}

FitResult fit_closed_form(Density density, FamilyTag family) {
    if (family != FamilyTag::Geometric && family != FamilyTag::Exponential) {
        throw Error(Errc::DomainError, "closed-form fit only covers Geometric and Exponential");
    }
    const auto w = normalised_weights(density);
    double mean = 0.0;
    for (int i = 1; i <= kArrivalTicks; ++i) mean += i * w[i - 1];
    FitResult r;
    r.starts_used = 0;
    const double estimate = 1.0 / mean;
    if (family == FamilyTag::Geometric) {
        r.boundary = estimate >= 1.0;
        r.model = Geometric{std::min(estimate, 1.0)};
    } else {
        r.model = Exponential{estimate};
    }
    return r;
}

namespace {

struct StartGrid {
    std::array<double, 5> first;
    std::array<double, 5> second;
};

// Log-spaced seeds; q seeds are spread evenly in (0, 1).
constexpr StartGrid kWeibullStarts{{0.1, 0.3, 0.5, 0.7, 0.9}, {0.25, 0.5, 1.0, 2.0, 4.0}};
constexpr StartGrid kBetaBinomialStarts{{0.1, 0.31622776601683794, 1.0, 3.1622776601683795, 10.0},
                                        {0.1, 0.31622776601683794, 1.0, 3.1622776601683795, 10.0}};

ModelFamily from_transformed(FamilyTag family, const std::vector<double>& z) {
    if (family == FamilyTag::DiscreteWeibull) return DiscreteWeibull{inv_logit(z[0]), std::exp(z[1])};
    return BetaBinomial{std::exp(z[0]), std::exp(z[1]), kBetaBinomialTrials};
}

std::vector<double> to_transformed(FamilyTag family, double a, double b) {
    if (family == FamilyTag::DiscreteWeibull) return {logit(a), std::log(b)};
    return {std::log(a), std::log(b)};
}

bool in_domain(const ModelFamily& m) {
    return std::visit(overloaded{
                          [](const DiscreteWeibull& d) {
                              return d.q > 0.0 && d.q < 1.0 && d.beta > 0.0 && std::isfinite(d.beta);
                          },
                          [](const BetaBinomial& b) {
                              return b.alpha > 0.0 && b.beta > 0.0 && std::isfinite(b.alpha) && std::isfinite(b.beta);
                          },
                          [](const auto&) { return true; },
                      },
                      m);
}

/// Runs the simplex from `start`, then restarts once from its answer so a
/// collapsed simplex cannot stop short of the optimum.
optimize::SimplexResult minimise_with_restart(const optimize::Objective& f, std::vector<double> start,
                                              const optimize::SimplexOptions& options) {
    auto first = optimize::nelder_mead(f, std::move(start), options);
    auto second = optimize::nelder_mead(f, first.point, options);
    second.iterations += first.iterations;
    if (second.value <= first.value) return second;
    first.iterations = second.iterations;
    return first;
}

}  // namespace

FitResult fit_mle(Density density, FamilyTag family, const FitOptions& options) {
    if (family != FamilyTag::DiscreteWeibull && family != FamilyTag::BetaBinomial) {
        throw Error(Errc::DomainError, "simplex MLE only covers Discrete Weibull and Beta-Binomial");
    }
    const auto w = normalised_weights(density);
    if (positive_ticks(w) < 2) throw Error(Errc::DegenerateData, "MLE needs mass on at least two ticks");

    const optimize::Objective neg_ll = [&](const std::vector<double>& z) {
        const auto model = from_transformed(family, z);
        if (!in_domain(model)) return std::numeric_limits<double>::infinity();
        return -log_likelihood(w, model, options.truncated_likelihood);
    };

    const auto& grid = family == FamilyTag::DiscreteWeibull ? kWeibullStarts : kBetaBinomialStarts;
    FitResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    bool have = false;
    for (double a : grid.first) {
        for (double b : grid.second) {
            const auto res = minimise_with_restart(neg_ll, to_transformed(family, a, b), options.simplex);
            ++best.starts_used;
            if (!std::isfinite(res.value)) continue;
            // Strict improvement keeps the earliest start on ties.
            if (!have || -res.value > best.objective) {
                best.model = from_transformed(family, res.point);
                best.objective = -res.value;
                best.converged = res.converged;
                have = true;
            }
        }
    }
    if (!have) throw Error(Errc::NonConvergence, "no simplex start reached a finite likelihood");
    return best;
}

FitResult fit_power_law(Density density, const FitOptions& options) {
    const auto w = normalised_weights(density);
    const optimize::Objective rss = [&](const std::vector<double>& z) {
        return power_law_residual(w, std::exp(z[0]), z[1]);
    };

    FitResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (double alpha : {0.0, 0.5, 1.0, 1.5, 2.5}) {
        // For fixed alpha the least-squares k is linear: sum w_i i^-a / sum i^-2a.
        double num = 0.0;
        double den = 0.0;
        for (int i = 1; i <= kArrivalTicks; ++i) {
            const double x = std::pow(static_cast<double>(i), -alpha);
            num += w[i - 1] * x;
            den += x * x;
        }
        const double k0 = num > 0.0 ? num / den : 1.0 / kArrivalTicks;
        const auto res = minimise_with_restart(rss, {std::log(k0), alpha}, options.simplex);
        ++best.starts_used;
        if (res.value < best.objective) {
            best.model = PowerLaw{std::exp(res.point[0]), res.point[1]};
            best.objective = res.value;
            best.converged = res.converged;
        }
    }
    return best;
}

FitResult fit(Density density, FamilyTag family, const FitOptions& options) {
    switch (family) {
        case FamilyTag::Geometric:
        case FamilyTag::Exponential: return fit_closed_form(density, family);
        case FamilyTag::DiscreteWeibull:
        case FamilyTag::BetaBinomial: return fit_mle(density, family, options);
        case FamilyTag::PowerLaw: return fit_power_law(density, options);
    }
    throw Error(Errc::DomainError, "unknown family");
}

}  // namespace lobrate::dist
