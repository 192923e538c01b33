#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "msnar/model.hpp"
#include "msnar/trajectory.hpp"

namespace msnar {

// y0 = "stationary": start from 0, run burn_in extra steps, keep the suffix.
struct StationaryStart {};
using InitialValue = std::variant<double, StationaryStart>;

inline constexpr int kDefaultBurnIn = 500;

// Regime labels x_1..x_n (0-based internally): x_1 ~ init, then row draws.
std::vector<int> simulate_chain(const TransitionMatrix& a, const std::vector<double>& init,
                                int n, std::uint64_t seed);

// y_k = r_{x_k}(y_{k-1}) + sigma_{x_k} eps_k.  The regime chain and the
// innovations consume two independent streams derived from the master seed,
// so paths with identical noise but different regimes can be coupled.
Trajectory simulate(const ModelSpec& model, int n, InitialValue y0, std::uint64_t seed,
                    int burn_in = kDefaultBurnIn);

// Stream-level variant backing the coupling tests.
Trajectory simulate_with_streams(const ModelSpec& model, int n, InitialValue y0,
                                 std::uint64_t chain_seed, std::uint64_t noise_seed, int burn_in);

// Lag-k sample autocorrelation, used by the mixing diagnostics.
double sample_autocorrelation(const std::vector<double>& series, int lag);

}  // namespace msnar
