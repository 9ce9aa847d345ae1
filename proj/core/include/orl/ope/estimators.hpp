#pragma once

#include <span>

#include "orl/datastore/dataset.hpp"
#include "orl/env/spaces.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/ope/report.hpp"
#include "orl/policy.hpp"

namespace orl {

/// (sum w)^2 / sum w^2. Throws NumericalError when every weight is zero.
double effective_sample_size(std::span<const double> weights);

/// Trajectory importance sampling with W = prod_t pi(a_t|s_t) / mu(a_t|s_t).
/// Plain: mean of W * G. Weighted: sum(W * G) / sum(W); throws
/// NumericalError when every weight vanishes.
OpeReport estimate_is(const Dataset& dataset, const PolicyArtifact& policy, const RewardSpec& reward, double gamma,
                      bool weighted);

/// Mean over episode-initial states of sum_a pi(a|s0) Q(s0, a).
OpeReport estimate_dm_fqe(const QFunction& q, const Dataset& dataset, const PolicyArtifact& policy);

/// Per-decision doubly robust estimate computed backwards through each
/// episode: V(t) = V^(s_t) + rho_t (r_t + gamma V(t+1) - Q^(s_t, a_t)).
/// Truncated episodes bootstrap from V^ at the final next state.
OpeReport estimate_dr(const Dataset& dataset, const QFunction& q, const PolicyArtifact& policy,
                      const RewardSpec& reward, double gamma);

}  // namespace orl
