#pragma once

// Candidate models for per-tick arrival densities.
//
// Every model is turned into a TickCurve: its mass on ticks 1..15, normalised
// to sum to one. The support conventions are
//   Geometric, DiscreteWeibull  x = i          (support starts at 1)
//   BetaBinomial (n = 14)       x = i - 1      (support 0..n shifted one tick right)
//   Exponential                 [i - 1, i)     (area under the density)
//   PowerLaw                    k / i^alpha

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lobrate/simplex.hpp"
#include "lobrate/types.hpp"

namespace lobrate::dist {

struct Geometric {
    double p = 0.5;
};
struct DiscreteWeibull {
    double q = 0.5;
    double beta = 1.0;
};
struct BetaBinomial {
    double alpha = 1.0;
    double beta = 1.0;
    int n = 14;
};
struct Exponential {
    double lambda = 1.0;
};
struct PowerLaw {
    double k = 1.0;
    double alpha = 1.0;
};

using ModelFamily = std::variant<Geometric, DiscreteWeibull, BetaBinomial, Exponential, PowerLaw>;

enum class FamilyTag { Geometric, DiscreteWeibull, BetaBinomial, Exponential, PowerLaw };

inline constexpr std::array<FamilyTag, 5> kAllFamilies = {FamilyTag::Geometric, FamilyTag::DiscreteWeibull,
                                                          FamilyTag::BetaBinomial, FamilyTag::Exponential,
                                                          FamilyTag::PowerLaw};
inline constexpr int kBetaBinomialTrials = kArrivalTicks - 1;

FamilyTag tag_of(const ModelFamily& model) noexcept;
/// Short CLI names: geo, dw, bb, exp, pow.
std::string_view short_name(FamilyTag tag) noexcept;
std::string_view display_name(FamilyTag tag) noexcept;
std::optional<FamilyTag> parse_family(std::string_view name) noexcept;

/// Parameter names and values in a fixed order, e.g. {{"q", 0.8}, {"beta", 1.2}}.
std::vector<std::pair<std::string, double>> parameters(const ModelFamily& model);

/// Throws DomainError when a parameter violates its family's constraints.
void validate(const ModelFamily& model);

using TickCurve = std::array<double, kArrivalTicks>;
using Density = std::span<const double>;

double pmf_discrete_weibull(double q, double beta, long x);
double pmf_beta_binomial(double alpha, double beta, int n, long x);
double pmf_geometric(double p, long x);
double power_law_value(double k, double alpha, long i);
TickCurve discretize_exponential(double lambda);

/// Natural log of the model's mass at tick i (1-based) before truncation.
double log_mass_at_tick(const ModelFamily& model, int tick);

TickCurve tick_curve(const ModelFamily& model);

struct FitOptions {
    /// Renormalise the model over ticks 1..15 inside the likelihood.
    bool truncated_likelihood = false;
    optimize::SimplexOptions simplex{};
};

struct FitResult {
    ModelFamily model;
    bool converged = true;
    int starts_used = 0;
    /// Estimate sits on the parameter boundary (e.g. Geometric p = 1).
    bool boundary = false;
    /// Weighted log-likelihood for MLE fits, residual sum of squares for
    /// the power law, unused for closed forms.
    double objective = 0.0;
};

/// Weighted log-likelihood sum_i w(i) ln P(tick i; model), weights normalised
/// to sum to one.
double log_likelihood(Density density, const ModelFamily& model, bool truncated = false);

/// Residual sum of squares of k / i^alpha against the density.
double power_law_residual(Density density, double k, double alpha);

/// Weighted moment estimates: p = lambda = 1 / sum_i i * w(i).
FitResult fit_closed_form(Density density, FamilyTag family);

/// Multi-start simplex MLE for DiscreteWeibull and BetaBinomial.
FitResult fit_mle(Density density, FamilyTag family, const FitOptions& options = {});

FitResult fit_power_law(Density density, const FitOptions& options = {});

/// Dispatches to the right estimator for `family`.
FitResult fit(Density density, FamilyTag family, const FitOptions& options = {});

}  // namespace lobrate::dist
