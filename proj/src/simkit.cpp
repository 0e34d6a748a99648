// SPDX-License-Identifier: Apache-2.0
//
// wetsim - training design and link-level simulation for multi-antenna
// wireless energy transfer
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "wetsim/simkit.hpp"

#include <cmath>

#include "chunked_mc.hpp"

namespace wetsim {

namespace {

constexpr long kTrialChunk = 1024;

void check_consistent(const RicianSpec &spec, const SystemParams &params) {
    if (spec.m != params.m || spec.n != params.n) {
        throw ContractViolation("simkit: spec and params disagree on antenna counts");
    }
    if (spec.k != params.k || spec.beta != params.beta) {
        throw ContractViolation("simkit: spec and params disagree on k or beta");
    }
}

} // namespace

const char *to_string(BenchmarkScheme scheme) {
    switch (scheme) {
    case BenchmarkScheme::ideal: return "ideal";
    case BenchmarkScheme::isotropic: return "isotropic";
    case BenchmarkScheme::los: return "los";
    }
    return "unknown";
}

EnergyReport run_block(const RicianSpec &spec, const SystemParams &params,
                       const TrainingDesign &design, std::mt19937_64 &rng) {
    check_consistent(spec, params);
    design.validate(spec.n, params.t);
    const ChannelRealization real = draw_channel(spec, rng);

    if (design.n1 == 0) {
        // Phase one skipped: the transmitter knows only the deterministic
        // component (nothing at all under Rayleigh, where e1 is used).
        const CMatrix h_hat =
            std::sqrt(spec.beta * spec.k / (spec.k + 1.0)) * spec.hbar;
        const CVector v = beamformer_from_estimate(h_hat);
        return EnergyReport::make(block_harvest(real.h, v, params, 0), 0.0);
    }

    PilotConfig cfg;
    cfg.tau = design.tau;
    cfg.power = design.pr;
    cfg.trained_set = design.trained_set;

    const CMatrix y_tr = simulate_training(real, spec, cfg, params.sigma_r2, rng);
    const EstimationOutcome est = mmse_estimate(y_tr, spec, cfg, params.sigma_r2);
    const CVector v = beamformer_from_estimate(est.h_hat);
    const double harvested = block_harvest(real.h, v, params, design.tau);
    return EnergyReport::make(harvested, est.energy_spent);
}

EnergyReport run_benchmark_block(const RicianSpec &spec, const SystemParams &params,
                                 BenchmarkScheme scheme, std::mt19937_64 &rng) {
    check_consistent(spec, params);
    const ChannelRealization real = draw_channel(spec, rng);
    double harvested = 0.0;
    switch (scheme) {
    case BenchmarkScheme::ideal:
        harvested = benchmark_ideal(real.h, params);
        break;
    case BenchmarkScheme::isotropic:
        harvested = benchmark_isotropic(real.h, params);
        break;
    case BenchmarkScheme::los:
        harvested = benchmark_los(real.h, spec.hbar, params);
        break;
    }
    return EnergyReport::make(harvested, 0.0);
}

TrialStats run_plan(const TrialPlan &plan) {
    plan.params.validate();
    plan.spec.validate();
    if (plan.trials < 1) {
        throw ContractViolation("run_plan: trials must be >= 1");
    }
    if (const auto *design = std::get_if<TrainingDesign>(&plan.target)) {
        design->validate(plan.spec.n, plan.params.t);
    }

    // Each trial draws from its own stream keyed by trial index, so two
    // plans sharing a master seed see identical channels trial for trial
    // (common random numbers for design comparisons).
    auto sums = detail::chunked_mc<2>(
        plan.trials, splitmix64(plan.master_seed), plan.workers, kTrialChunk,
        [&](long trial, std::mt19937_64 &, std::array<double, 2> &values) {
            auto rng = make_stream(plan.master_seed, static_cast<std::uint64_t>(trial));
            EnergyReport report;
            if (const auto *design = std::get_if<TrainingDesign>(&plan.target)) {
                report = run_block(plan.spec, plan.params, *design, rng);
            } else {
                report = run_benchmark_block(plan.spec, plan.params,
                                             std::get<BenchmarkScheme>(plan.target), rng);
            }
            values[0] = report.net;
            values[1] = report.harvested;
        });

    TrialStats stats;
    stats.trials = plan.trials;
    const double inv = 1.0 / static_cast<double>(plan.trials);
    stats.mean_net = sums.sum[0] * inv;
    stats.mean_harvested = sums.sum[1] * inv;
    if (plan.trials > 1) {
        double var = sums.sum_sq[0] * inv - stats.mean_net * stats.mean_net;
        var = std::max(var, 0.0) * plan.trials / (plan.trials - 1.0);
        stats.halfwidth95 = 1.96 * std::sqrt(var * inv);
    }
    return stats;
}

} // namespace wetsim
