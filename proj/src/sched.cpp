#include "ltesim/sched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ltesim/errors.hpp"
#include "ltesim/radio.hpp"

namespace ltesim::sched {

double rate_per_prb(int cqi)
{
    return radio::cqi_entry(cqi).efficiency_bits_per_re * radio::kUsableRePerPrb;
}

Policy parse_policy(std::string_view name)
{
    if (name == "PF") return Policy::pf;
    if (name == "EXP") return Policy::exp;
    if (name == "LOG") return Policy::log;
    if (name == "FLS") return Policy::fls;
    throw ConfigError("unknown scheduler '" + std::string(name) + "' (expected PF | EXP | LOG | FLS)");
}

std::string_view to_string(Policy p)
{
    switch (p) {
        case Policy::pf: return "PF";
        case Policy::exp: return "EXP";
        case Policy::log: return "LOG";
        case Policy::fls: return "FLS";
    }
    return "?";
}

double pf_metric(double mu, double avg_rate, double rate_floor) { return mu / std::max(avg_rate, rate_floor); }

double exp_rule_metric(double gamma, double mu, double a, double x, double mean_ax, double beta, double eta,
                       std::int64_t* clamps)
{
    double exponent = a * x / (beta + std::pow(mean_ax, eta));
    if (exponent > kExpExponentClamp) {
        exponent = kExpExponentClamp;
        if (clamps) {
            ++*clamps;
        }
    }
    return gamma * mu * std::exp(exponent);
}

double exp_mean_term(std::span<const double> a, std::span<const double> x)
{
    if (a.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        sum += a[j] * x[j];
    }
    return sum / static_cast<double>(a.size());
}

double log_rule_metric(double b, double mu, double c, double a, double w) { return b * mu * std::log(c + a * w); }

ExpTerms exp_terms(const FlowSnapshot& f, double pending_bits, const ExpRuleParams& p, double rate_floor, double tti_s)
{
    const double avg = std::max(f.avg_rate, rate_floor);
    const double a = p.delay_weight / f.delay_budget_s;
    if (p.variant == ExpVariant::waiting_time) {
        return {1.0 / avg, a, f.hol_delay_s};
    }
    // Queue expressed as seconds of service at the average rate.
    return {1.0 / avg, a, pending_bits / avg * tti_s};
}

double pf_average_update(double avg_rate, double served_bits, double window_ttis, double rate_floor)
{
    const double w = 1.0 / window_ttis;
    return std::max((1.0 - w) * avg_rate + w * served_bits, rate_floor);
}

double fls_drain_coefficient(double delay_budget_s, double frame_s)
{
    const double frames = delay_budget_s / frame_s;
    if (!(frames >= 1.0) || std::isinf(frames)) {
        return 1.0;
    }
    return 1.0 - std::pow(0.01, 1.0 / frames);
}

double fls_quota_update(FlsFlowState& state, double queue_bits)
{
    const double u =
        std::clamp(state.drain * queue_bits + (1.0 - state.drain) * state.previous_quota, 0.0, queue_bits);
    state.previous_quota = u;
    state.residual_quota = u;
    return u;
}

const FlowGrant* SchedulerDecision::grant_for(std::uint32_t flow_id) const
{
    for (const auto& g : grants) {
        if (g.flow_id == flow_id) {
            return &g;
        }
    }
    return nullptr;
}

namespace {

struct Contender {
    std::size_t index;  // into the snapshot span
    double pending;
    int prbs = 0;
    double metric = 0.0;
    bool active = true;
};

double prb_contribution(int cqi, int already)
{
    return static_cast<double>(radio::transport_block_bits(cqi, already + 1) -
                               radio::transport_block_bits(cqi, already));
}

// Highest metric among active contenders; contenders are sorted by flow id so
// the first strict maximum wins ties.
Contender* best(std::vector<Contender>& cs)
{
    Contender* pick = nullptr;
    for (auto& c : cs) {
        if (c.active && (!pick || c.metric > pick->metric)) {
            pick = &c;
        }
    }
    return pick;
}

class MetricEvaluator {
public:
    MetricEvaluator(std::span<const FlowSnapshot> flows, const SchedulerParams& params, std::int64_t& clamps)
        : flows_(flows), params_(params), clamps_(clamps)
    {
    }

    // Rebuilds every contender's metric from the current pending state.
    void refresh(std::vector<Contender>& cs) const
    {
        double mean_ax = 0.0;
        if (params_.policy == Policy::exp) {
            std::vector<double> a, x;
            for (const auto& c : cs) {
                const auto& f = flows_[c.index];
                if (c.active && traffic::is_real_time(f.flow_class)) {
                    const auto t = exp_terms(f, c.pending, params_.exp, params_.rate_floor, params_.tti_s);
                    a.push_back(t.a);
                    x.push_back(t.x);
                }
            }
            mean_ax = exp_mean_term(a, x);
        }
        for (auto& c : cs) {
            if (c.active) {
                c.metric = metric(c, mean_ax);
            }
        }
    }

    // Whether a grant can change any metric: only EXP couples flows through its
    // mean term, which moves with pending bits (queue variant) or membership.
    bool needs_refresh(bool membership_changed) const
    {
        return params_.policy == Policy::exp &&
               (membership_changed || params_.exp.variant == ExpVariant::queue_length);
    }

    double metric(const Contender& c, double mean_ax) const
    {
        const auto& f = flows_[c.index];
        if (!traffic::is_real_time(f.flow_class)) {
            return pf_metric(f.rate_per_prb, f.avg_rate, params_.rate_floor);
        }
        switch (params_.policy) {
            case Policy::exp: {
                const auto t = exp_terms(f, c.pending, params_.exp, params_.rate_floor, params_.tti_s);
                return exp_rule_metric(t.gamma, f.rate_per_prb, t.a, t.x, mean_ax, params_.exp.beta,
                                       params_.exp.eta, &clamps_);
            }
            case Policy::log: {
                const double b = 1.0 / std::max(f.avg_rate, params_.rate_floor);
                const double a = params_.log.delay_weight / f.delay_budget_s;
                return log_rule_metric(b, f.rate_per_prb, params_.log.c, a, f.hol_delay_s);
            }
            case Policy::pf:
            case Policy::fls: return pf_metric(f.rate_per_prb, f.avg_rate, params_.rate_floor);
        }
        return 0.0;
    }

private:
    std::span<const FlowSnapshot> flows_;
    const SchedulerParams& params_;
    std::int64_t& clamps_;
};

std::vector<std::size_t> by_flow_id(std::span<const FlowSnapshot> flows)
{
    std::vector<std::size_t> order(flows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return flows[a].flow_id < flows[b].flow_id; });
    return order;
}

// Assigns PRBs [next_prb, n_prb) greedily among `cs`; returns the next free PRB.
int greedy_fill(std::vector<Contender>& cs, std::span<const FlowSnapshot> flows, const MetricEvaluator& eval,
                int next_prb, int n_prb, SchedulerDecision& out, std::vector<double>* quota)
{
    eval.refresh(cs);
    for (int prb = next_prb; prb < n_prb; ++prb) {
        Contender* pick = best(cs);
        if (!pick) {
            return prb;
        }
        const auto& f = flows[pick->index];
        const double granted = prb_contribution(f.cqi, pick->prbs);
        out.prbs[static_cast<std::size_t>(prb)] = PrbAssignment{f.flow_id, f.ue_id};
        ++pick->prbs;
        pick->pending -= granted;
        bool exhausted = pick->pending <= 0.0;
        if (quota) {
            auto& q = (*quota)[pick->index];
            q -= granted;
            exhausted = exhausted || q <= 0.0;
        }
        if (exhausted) {
            pick->active = false;
        }
        if (eval.needs_refresh(exhausted)) {
            eval.refresh(cs);
        }
    }
    return n_prb;
}

}  // namespace

SchedulerDecision allocate_subframe(std::span<const FlowSnapshot> flows, const SchedulerParams& params, int n_prb,
                                    FlsState* fls)
{
    SchedulerDecision out;
    out.prbs.assign(static_cast<std::size_t>(std::max(n_prb, 0)), std::nullopt);
    if (flows.empty() || n_prb <= 0) {
        return out;
    }

    MetricEvaluator eval(flows, params, out.exp_clamps);
    const auto order = by_flow_id(flows);
    std::vector<int> prbs_of(flows.size(), 0);

    auto collect = [&](std::vector<Contender>& cs) {
        for (const auto& c : cs) {
            prbs_of[c.index] += c.prbs;
        }
    };

    if (params.policy != Policy::fls) {
        std::vector<Contender> cs;
        for (auto i : order) {
            if (flows[i].queue_bits > 0.0) {
                cs.push_back({i, flows[i].queue_bits});
            }
        }
        greedy_fill(cs, flows, eval, 0, n_prb, out, nullptr);
        collect(cs);
    } else {
        FlsState scratch;
        FlsState& state = fls ? *fls : scratch;
        std::vector<double> quota(flows.size(), 0.0);
        std::vector<Contender> real_time;
        std::vector<Contender> best_effort;
        for (auto i : order) {
            const auto& f = flows[i];
            if (f.queue_bits <= 0.0) {
                continue;
            }
            if (traffic::is_real_time(f.flow_class)) {
                quota[i] = state.at(f.flow_id).residual_quota;
                if (quota[i] > 0.0) {
                    real_time.push_back({i, f.queue_bits});
                }
            } else {
                best_effort.push_back({i, f.queue_bits});
            }
        }
        const int used = greedy_fill(real_time, flows, eval, 0, n_prb, out, &quota);
        greedy_fill(best_effort, flows, eval, used, n_prb, out, nullptr);
        collect(real_time);
        collect(best_effort);
        for (const auto& c : real_time) {
            state.at(flows[c.index].flow_id).residual_quota = std::max(0.0, quota[c.index]);
        }
    }

    for (auto i : order) {
        if (prbs_of[i] > 0) {
            const auto& f = flows[i];
            out.grants.push_back(
                {f.flow_id, f.ue_id, f.cqi, prbs_of[i], radio::transport_block_bits(f.cqi, prbs_of[i])});
        }
    }
    return out;
}

}  // namespace ltesim::sched
