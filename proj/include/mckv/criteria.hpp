#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mckv/density.hpp"

namespace mckv {

enum class VerdictKind { Blowup, NoBlowup, Indeterminate };

std::string to_string(VerdictKind k);

/// Mechanical verdict from the model's blow-up / global-solvability criteria.
/// Blowup carries an upper bound on the existence time (infinite when only
/// the mean criterion fires, which proves nonexistence without a time bound).
struct Verdict {
    VerdictKind kind = VerdictKind::Indeterminate;
    double T_bound = 0.0;                 // meaningful only for Blowup
    std::optional<double> witness_mu;     // mu achieving the moment criterion
    std::optional<double> witness_x;      // x where the mass deficit is tightest
    std::optional<double> min_deficit;    // value of the deficit at witness_x

    /// one-line record: model,alpha,beta,kind,T_bound,witness_mu,witness_x
    std::string csv_record(FeedbackModel model, double alpha, double beta) const;
};

/// 64 log-spaced points in [1e-2, 1e3].
std::vector<double> default_mu_grid();

/// Linear model: exponential-moment blow-up test, mean-based blow-up test,
/// and the vanishing-endpoints + positive-deficit global-existence test.
Verdict blowup_linear(const Density& p0, double alpha,
                      const std::vector<double>& mu_grid = default_mu_grid());

/// Log model: exponential-moment blow-up test restricted to mu > 2 beta.
/// There is no NoBlowup branch; the global-existence constants for this
/// model are existential, so everything else is Indeterminate.
Verdict blowup_log(const Density& q0, double alpha, double beta,
                   const std::vector<double>& mu_grid = default_mu_grid());

/// Point-mass dichotomy: NoBlowup below x0, Blowup above 2 x0,
/// Indeterminate in the gap.
Verdict delta_verdict(double x0, double alpha);

} // namespace mckv
