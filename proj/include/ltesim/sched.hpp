#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltesim/traffic.hpp"

namespace ltesim::sched {

using traffic::FlowClass;

/// What the scheduler sees of one flow at the start of a TTI.
struct FlowSnapshot {
    std::uint32_t flow_id = 0;
    std::uint32_t ue_id = 0;
    FlowClass flow_class = FlowClass::video;
    double queue_bits = 0.0;      // Q_i
    double hol_delay_s = 0.0;     // W_i
    int cqi = 1;                  // wideband, this TTI
    double rate_per_prb = 0.0;    // mu_i, bits per PRB per TTI at cqi
    double avg_rate = 1.0;        // PF average R_i, bits/TTI
    double delay_budget_s = traffic::kInfiniteBudget;
};

/// mu_i for a CQI: efficiency x usable REs of one PRB.
double rate_per_prb(int cqi);

enum class Policy { pf, exp, log, fls };

Policy parse_policy(std::string_view name);
std::string_view to_string(Policy p);

enum class ExpVariant { queue_length, waiting_time };

struct ExpRuleParams {
    ExpVariant variant = ExpVariant::waiting_time;
    double beta = 0.5;
    double eta = 0.5;
    // a_i = delay_weight / tau_i. In the queue variant Q_i is first expressed
    // in TTIs of service at the flow's average rate.
    double delay_weight = 6.0;
};

struct LogRuleParams {
    double c = 1.1;
    double delay_weight = 5.0;  // a_i = delay_weight / tau_i; b_i = 1 / R_i
};

struct SchedulerParams {
    Policy policy = Policy::fls;
    ExpRuleParams exp;
    LogRuleParams log;
    double rate_floor = 1.0;  // epsilon_rate, bits/TTI
    double tti_s = 0.001;
};

inline constexpr double kExpExponentClamp = 50.0;

double pf_metric(double mu, double avg_rate, double rate_floor = 1.0);

/// gamma * mu * exp(a * x / (beta + mean_ax^eta)), exponent clamped at 50.
/// `clamps` is incremented whenever the clamp engages.
double exp_rule_metric(double gamma, double mu, double a, double x, double mean_ax, double beta, double eta,
                       std::int64_t* clamps = nullptr);

/// (1/N) sum a_j x_j.
double exp_mean_term(std::span<const double> a, std::span<const double> x);

/// b * mu * ln(c + a * w).
double log_rule_metric(double b, double mu, double c, double a, double w);

/// Per-flow EXP terms under the default weighting (gamma = 1/R, a = weight/tau).
struct ExpTerms {
    double gamma;
    double a;
    double x;
};
ExpTerms exp_terms(const FlowSnapshot& f, double pending_bits, const ExpRuleParams& p, double rate_floor,
                   double tti_s);

/// One-step exponential average, floored at rate_floor.
double pf_average_update(double avg_rate, double served_bits, double window_ttis, double rate_floor = 1.0);

/// Frame-level quota filter state of one real-time flow.
struct FlsFlowState {
    double previous_quota = 0.0;
    double residual_quota = 0.0;
    double drain = 1.0;  // c in (0, 1]
};

/// c = 1 - 0.01^(1/M) with M the delay budget in frames: the impulse response
/// decays to 1% within the budget.
double fls_drain_coefficient(double delay_budget_s, double frame_s = 0.010);

/// u(k) = clamp(c q(k) + (1 - c) u(k-1), 0, q(k)); resets the residual quota.
double fls_quota_update(FlsFlowState& state, double queue_bits);

/// Indexed by flow id.
struct FlsState {
    std::vector<FlsFlowState> flows;

    FlsFlowState& at(std::uint32_t flow_id)
    {
        if (flow_id >= flows.size()) {
            flows.resize(flow_id + 1);
        }
        return flows[flow_id];
    }
};

struct PrbAssignment {
    std::uint32_t flow_id;
    std::uint32_t ue_id;
};

struct FlowGrant {
    std::uint32_t flow_id = 0;
    std::uint32_t ue_id = 0;
    int cqi = 1;
    int prbs = 0;
    std::int64_t bits = 0;  // transport block for `prbs` PRBs at `cqi`
};

struct SchedulerDecision {
    std::vector<std::optional<PrbAssignment>> prbs;
    std::vector<FlowGrant> grants;  // ascending flow id, only flows with prbs > 0
    std::int64_t exp_clamps = 0;

    const FlowGrant* grant_for(std::uint32_t flow_id) const;
};

/// Per-PRB greedy allocation. PF/EXP/LOG give each PRB, in index order, to the
/// non-empty flow with the highest metric (ties to the lowest flow id) and
/// then charge that flow's pending bits. Best-effort flows are always ranked
/// by the PF metric. FLS serves real-time flows with residual quota by PF
/// first, then best-effort flows by PF.
SchedulerDecision allocate_subframe(std::span<const FlowSnapshot> flows, const SchedulerParams& params, int n_prb,
                                    FlsState* fls = nullptr);

}  // namespace ltesim::sched
